from __future__ import annotations

import itertools
import random

import pytest

from hycoa.coalgebra import truth_set
from hycoa.functors import KripkeFunctor, MultigraphFunctor
from hycoa.gen import random_formula, random_model, random_proof_script
from hycoa.hilbert import (
    AXIOMS,
    DA,
    MP,
    AtGen,
    AxiomInstance,
    Local,
    Name,
    PasteOp,
    ProofScript,
    PureAxiom,
    RuleInstance,
    Taut,
    TBox,
    at_ref_script,
    back_axiom_script,
    check_derives,
    check_proof,
    derived_rule_fixtures,
    format_proof,
    load_proof,
    parse_proof,
)
from hycoa.rules import graded_rules, k_rules
from hycoa.syntax import (
    GRADED_SIG,
    K_SIG,
    At,
    Implies,
    Modal,
    Nom,
    ParseError,
    Prop,
    Substitution,
    conj,
    disj,
    parse,
    show,
)

p = Prop("p")


def script(*lines, **kw) -> ProofScript:
    s = ProofScript(kw.pop("sig", K_SIG), kw.pop("ruleset", k_rules()), **kw)
    for text, just in lines:
        s.add(text, just)
    return s


# ---------------------------------------------------------------- examples


def test_at_ref_accepted():
    assert check_proof(at_ref_script())


def test_back_axiom_accepted():
    res = check_proof(back_axiom_script())
    assert res and res.formula == parse("@i' p -> box @i' p")


def test_derived_rule_fixtures():
    fixtures = derived_rule_fixtures()
    assert fixtures
    for name, s in fixtures:
        assert check_proof(s), name


def test_name_side_condition():
    s = script(("i' -> (i' | p)", Taut()), ("(i' | p)", Name(1, "i")))
    res = check_proof(s)
    assert not res and res.line == 2 and res.reason == "name-side-condition"


def test_name_needs_freshness_against_assumptions():
    s = script(("i' -> (p | ~ p)", Taut()), ("(p | ~ p)", Name(1, "i")), tbox=[parse("@i' p")])
    assert check_proof(s).reason == "name-side-condition"
    assert check_proof(script(("i' -> (p | ~ p)", Taut()), ("(p | ~ p)", Name(1, "i"))))


def test_check_derives_examples():
    assert check_derives([], [p], p, script(("p -> p", Taut())))
    tb = parse("@i' p")
    assert check_derives([tb], [], tb, script(("@i' p", TBox(0)), tbox=[tb]))
    intro = script(("(i' & p) -> @i' p", AxiomInstance("intro", Substitution({}, {}))))
    assert check_derives([], [Nom("i"), p], At("i", p), intro)
    assert not check_derives([], [Nom("i")], At("i", p), intro)


def test_local_lines_cannot_be_generalised():
    s = script(("p", Local(0)), ("@i' p", AtGen(1, "i")), local=[p])
    assert check_proof(s).reason == "local-premise"
    s = script(("p", Local(0)), ("(p -> (q | p))", Taut()), ("(q | p)", MP(1, 2)), local=[p])
    res = check_proof(s)
    assert res and res.local


# ---------------------------------------------------------------- rejection reasons


@pytest.mark.parametrize("lines, kw, reason", [
    ([("p", Taut())], {}, "not-tautology"),
    ([("@i' i'", AxiomInstance("nope", Substitution()))], {}, "unknown-axiom"),
    ([("@i' j'", AxiomInstance("ref", Substitution()))], {}, "axiom-mismatch"),
    ([("p", TBox(0))], {}, "bad-index"),
    ([("q", TBox(0))], {"tbox": [p]}, "assumption-mismatch"),
    ([("p", MP(1, 2))], {}, "bad-ref"),
    ([("(p | ~ p)", Taut()), ("(q | ~ q)", Taut()), ("q", MP(1, 2))], {}, "mp-mismatch"),
    ([("(p | ~ p)", Taut()), ("@j' (q | ~ q)", AtGen(1, "j"))], {}, "atgen-mismatch"),
    ([("(p | ~ p)", Taut()), ("box p", RuleInstance(0, Substitution({"a": p}), 1))], {}, "rule-mismatch"),
    ([("(p | ~ p)", Taut()), ("(p | ~ p)", Name(1, "i"))], {}, "name-mismatch"),
    ([("@i' ((dn j'. dia j') <-> dia j')", DA("i", "j", parse("dia j'")))], {}, "da-mismatch"),
    ([(Modal("<1>", (p,)), Taut())], {}, "unknown-operator"),
    ([("dia (dia i' -> dia i')", PureAxiom(0, Substitution()))], {"axioms": [parse("dia dia i' -> dia i'")]},
     "axiom-mismatch"),
])
def test_rejection_reasons(lines, kw, reason):
    s = script(*lines, **kw)
    res = check_proof(s)
    assert not res and res.reason == reason, res


def test_impure_axioms_rejected():
    assert check_proof(script(("p -> p", Taut()), axioms=[parse("dia p")])).reason == "impure-axiom"


def test_empty_script_rejected():
    assert not check_proof(ProofScript())


def test_pure_axiom_instances():
    ax = parse("dia dia i' -> dia i'")
    s = script(("dia dia j' -> dia j'", PureAxiom(0, Substitution({}, {"i": "j"}))), axioms=[ax])
    assert check_proof(s)
    s = script(("dia dia j' -> dia j'", PureAxiom(0, Substitution({"p": p}, {"i": "j"}))), axioms=[ax])
    assert check_proof(s).reason == "axiom-mismatch"


# ---------------------------------------------------------------- paste


def _paste_script(op, k, witnesses, i="i", phi=p, sig=GRADED_SIG, rules=None):
    psi = parse("(q | ~ q)")
    body = conj([At(j, phi) for j in witnesses] + [At(i, Modal(op, (disj(Nom(j) for j in witnesses),)))])
    s = ProofScript(sig, rules or graded_rules(2))
    s.add(Implies(body, psi), Taut())
    s.add(Implies(At(i, Modal(op, (phi,))), psi), PasteOp(op, k, 1, tuple(witnesses)))
    return s


def test_paste_accepts_bounded_operator():
    assert check_proof(_paste_script("<1>", 2, ["j", "k"]))
    assert check_proof(_paste_script("dia", 1, ["j"], sig=K_SIG, rules=k_rules()))


def test_paste_rejections():
    assert check_proof(_paste_script("<1>", 2, ["j", "j"])).reason == "paste-not-distinct"
    assert check_proof(_paste_script("<1>", 2, ["i", "k"])).reason == "paste-not-fresh"
    assert check_proof(_paste_script("<1>", 1, ["j"])).reason == "paste-unbounded"
    assert check_proof(_paste_script("box", 1, ["j"], sig=K_SIG, rules=k_rules())).reason == "paste-unbounded"
    assert check_proof(_paste_script("<1>", 2, ["j", "k"], phi=Nom("j"))).reason == "paste-not-fresh"


@pytest.mark.parametrize("functor, op, k", [(KripkeFunctor(), "dia", 1), (MultigraphFunctor(), "<0>", 1),
                                            (MultigraphFunctor(), "<1>", 2)])
def test_paste_semantic_content(functor, op, k):
    """Whenever @_i op(phi) holds, some k witnesses make the Paste premise body true."""
    rng = random.Random(9)
    ops = [(op, 1)]
    for _ in range(200):
        M = random_model(rng, functor, rng.randint(1, 3), ("p", "q"), ("i",))
        phi = random_formula(rng, ops, ("p", "q"), ("i",), depth=1, size=4)
        if not truth_set(M, At("i", Modal(op, (phi,)))):
            continue
        js = [f"w{r}" for r in range(k)]
        body = conj([At(j, phi) for j in js] + [At("i", Modal(op, (disj(Nom(j) for j in js),)))])
        found = False
        for asg in itertools.product(M.states, repeat=k):
            if truth_set(M.with_noms({**M.noms, **dict(zip(js, asg))}), body):
                found = True
                break
        assert found, show(phi)


# ---------------------------------------------------------------- files, determinism, monotonicity


def test_proof_file_round_trip():
    rng = random.Random(3)
    for n in range(40):
        s = random_proof_script(rng, "K" if n % 2 else "graded", steps=6, require=("name", "paste", "da"))
        again = parse_proof(format_proof(s))
        assert format_proof(again) == format_proof(s)
        assert bool(check_proof(again)) == bool(check_proof(s))
    for _, s in derived_rule_fixtures():
        assert check_proof(parse_proof(format_proof(s)))


def test_proof_file_headers(tmp_path):
    (tmp_path / "tb.txt").write_text("@i' p\n")
    (tmp_path / "x.proof").write_text("sig: K\nrules: K\ntbox: tb.txt\n1. @i' p BY tbox:0\n")
    assert check_proof(load_proof(tmp_path / "x.proof"))
    (tmp_path / "y.proof").write_text("tbox: @i' p ; q\n1. q BY tbox:1\n")
    assert check_proof(load_proof(tmp_path / "y.proof"))


@pytest.mark.parametrize("text", ["1. p BY frobnicate", "2. p BY taut", "1. p taut", "1. p BY mp 1"])
def test_proof_file_errors(text):
    with pytest.raises(ParseError):
        parse_proof(text)


def test_checker_is_deterministic():
    rng = random.Random(5)
    for _ in range(20):
        s = random_proof_script(rng, "K", steps=8)
        assert check_proof(s) == check_proof(s)


def test_monotone_in_assumptions():
    rng = random.Random(6)
    for _ in range(30):
        s = random_proof_script(rng, "K", steps=6)
        assert check_proof(s)
        bigger = ProofScript(s.sig, s.ruleset, s.axioms, s.tbox + [parse("@z' r")], s.local + [parse("r")], s.lines)
        assert check_proof(bigger)


def test_axiom_list_is_complete():
    assert set(AXIOMS) == {"bot", "neg", "and", "ref", "sym", "nom", "intro"}
