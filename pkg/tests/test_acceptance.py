"""Acceptance suite: the ten primary criteria at their stated tolerances.

Every criterion is a plain function returning ``(ok, detail)``; the pytest
wrappers print one ``PASS``/``FAIL`` line per criterion and then assert.
The module can also be run directly::

    python tests/test_acceptance.py [N ...]
"""

from __future__ import annotations

import collections
import itertools
import random
import sys
import time

import pytest

from hycoa.bruteforce import kripke_satisfiable
from hycoa.coalgebra import (
    check_bounded,
    check_naturality,
    frame_satisfies_pure,
    kripke_formula_to_graded,
    model_satisfies_globally,
    truth_sets,
)
from hycoa.errors import ResourceBound
from hycoa.functors import (
    GameFunctor,
    KripkeFunctor,
    MultigraphFunctor,
    Multiset,
    SearchBounds,
    functor_by_name,
    operators_for_tests,
    powerset,
)
from hycoa.gen import random_formula, random_model, random_proof_script, kripke_corpus
from hycoa.hilbert import AXIOMS, check_proof, da_instance, derived_rule_fixtures, mob_axiom
from hycoa.namedmodel import NamedModelProblem, named_model_search, verify_named_model
from hycoa.onestep import UNSAT, OneStepProblem, naive_one_step_sat, one_step_sat
from hycoa.syntax import (
    GRADED_SIG,
    K_SIG,
    TOP,
    At,
    Implies,
    Modal,
    Nom,
    Not,
    Prop,
    Substitution,
    all_nominals,
    box,
    parse,
    prop_vars,
    show,
    size,
    substitute,
)

# ---------------------------------------------------------------- reporting

_LINES: dict = {}


def _emit(n: int, ok: bool, detail: str, seconds: float) -> str:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} ({seconds:.1f}s) {detail}"
    _LINES[n] = line
    return line


def _run(n: int, fn, capsys=None):
    t0 = time.time()
    ok, detail = fn()
    line = _emit(n, ok, detail, time.time() - t0)
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok, line


# ---------------------------------------------------------------- criterion 1

AXIOM_FUNCTORS = [
    ("kripke", 4), ("multigraph", 4), ("neighborhood", 4), ("monotone", 4), ("selection", 4), ("game", 3),
]


def _axiom_formulas(functor, rng) -> list:
    """The @-axiom group, mob for every operator and DA instances, both as
    schemes and under random substitutions."""
    ops = [(op, functor.signature[op].arity) for op in operators_for_tests(functor)]
    schemes = list(AXIOMS.values())
    schemes += [mob_axiom(op, ar) for op, ar in ops]
    if functor.name == "kripke":
        schemes.append(Implies(At("i", Prop("p")), box(At("i", Prop("p")))))
    out = list(schemes)
    # nominal identification i = j
    out += [substitute(s, Substitution({}, {"j": "i"})) for s in schemes]
    for s in schemes:
        sigma = Substitution(
            {v: random_formula(rng, ops, ("p", "q"), ("i", "j"), depth=1, size=4)
             for v in sorted(prop_vars(s))},
            {v: rng.choice(["i", "j"]) for v in sorted(all_nominals(s))},
        )
        out.append(substitute(s, sigma))
    for i in ("i", "j"):
        for _ in range(3):
            body = random_formula(rng, ops, ("p", "q"), ("i", "j"), depth=2, size=6, down=True, bound=("x",))
            out.append(da_instance(i, "x", body))
        out.append(da_instance(i, "j", Modal(ops[0][0], tuple(Nom("j") for _ in range(ops[0][1])))))
    return out


def criterion_1(count: int = 1000, seed: int = 1):
    rng = random.Random(seed)
    failures = []
    total = 0
    for name, max_states in AXIOM_FUNCTORS:
        for m in range(count):
            functor = functor_by_name(name, ("a", "b") if m % 2 else ("a",)) if name == "game" \
                else functor_by_name(name)
            formulas = _axiom_formulas(functor, rng)
            props = sorted(set().union(*(prop_vars(f) for f in formulas)))
            model = random_model(rng, functor, rng.randint(1, max_states), props, ("i", "j"))
            for f, ext in truth_sets(model, formulas).items():
                total += 1
                if ext != model.carrier:
                    failures.append((name, show(f)))
    detail = f"{total} formula/model checks over {len(AXIOM_FUNCTORS)} functors x {count} models"
    if failures:
        detail += f"; {len(failures)} failures, first: {failures[0]}"
    return not failures, detail


# ---------------------------------------------------------------- criterion 2


def _naturality_functors():
    return [functor_by_name(n) for n in ("kripke", "multigraph", "neighborhood", "monotone", "selection")] + [
        GameFunctor(("a",)), GameFunctor(("a", "b"))]


def criterion_2():
    bounds = SearchBounds(max_multiplicity=3, max_strategies=2)
    bad = []
    checks = 0
    for functor in _naturality_functors():
        for op in operators_for_tests(functor):
            for nx in range(0, 4):
                for ny in range(1, 4):
                    X = [f"x{k}" for k in range(nx)]
                    Y = [f"y{k}" for k in range(ny)]
                    checks += 1
                    cex = check_naturality(functor, op, X, Y, bounds)
                    if cex is not None:
                        bad.append((functor.name, op, nx, ny, cex))
    detail = f"{checks} (lifting, |X|, |Y|) combinations, all f: X->Y and argument tuples"
    if bad:
        detail += f"; counterexample {bad[0]}"
    return not bad, detail


# ---------------------------------------------------------------- criterion 3


def criterion_3():
    cases = []
    for n in range(0, 4):
        X = [f"x{k}" for k in range(n)]
        cases.append(("kripke dia 1", check_bounded(KripkeFunctor(), "dia", 1, X)))
        for k in range(4):
            b = SearchBounds(max_multiplicity=k + 2)
            cases.append((f"multigraph <{k}> {k + 1}", check_bounded(MultigraphFunctor(), f"<{k}>", k + 1, X, b)))
        cases.append(("selection > 1 (2nd arg)", check_bounded(functor_by_name("selection"), ">", 1, X, arg=1)))
    bad = [c for c, ok in cases if not ok]
    return not bad, f"{len(cases)} boundedness checks, |X| <= 3" + (f"; failed: {bad}" if bad else "")


# ---------------------------------------------------------------- criterion 4


def _onestep_atoms(functor) -> list:
    args1 = [Prop("a"), Prop("b"), Not(Prop("a")), TOP]
    atoms = []
    for op in operators_for_tests(functor):
        ar = functor.signature[op].arity
        for args in itertools.product(args1, repeat=ar):
            atoms.append(Modal(op, args))
    return atoms


def criterion_4():
    functors = _naturality_functors()
    bounds = SearchBounds(max_multiplicity=4, max_strategies=2)
    instances = 0
    mismatches = []
    limited = 0
    for functor in functors:
        atoms = _onestep_atoms(functor)
        lits = atoms + [Not(a) for a in atoms]
        sets = [()] + [(l,) for l in lits] + list(itertools.combinations(lits, 2))
        for n in range(0, 3):
            X = frozenset(f"x{k}" for k in range(n))
            subsets = powerset(sorted(X))
            # tau(b) ranges only over {}, X to keep the count moderate
            for ta in subsets:
                for tb in {frozenset(), X}:
                    tau = {"a": ta, "b": tb}
                    for Xi in sets:
                        p = OneStepProblem(X, tau, Xi)
                        instances += 1
                        try:
                            fast = one_step_sat(p, functor, bounds)
                        except ResourceBound:
                            limited += 1
                            fast = None
                        naive = naive_one_step_sat(p, functor, bounds)
                        if fast is None:
                            # a resource bound is only acceptable when naive search is empty too
                            if naive is not UNSAT:
                                mismatches.append((functor.name, n, tau, [show(f) for f in Xi], "RB", naive))
                        elif (fast is UNSAT) != (naive is UNSAT):
                            mismatches.append((functor.name, n, tau, [show(f) for f in Xi], fast, naive))
    ok = not mismatches and instances >= 10_000
    detail = f"{instances} instances over {len(functors)} functors, {limited} resource-bounded"
    if mismatches:
        detail += f"; {len(mismatches)} mismatches, first: {mismatches[0]}"
    return ok, detail


# ---------------------------------------------------------------- criterion 5


def _valid_on_random_models(rng, script, functor, models: int) -> list:
    noms = set()
    for ln in script.lines:
        noms |= all_nominals(ln.formula)
    bad = []
    formulas = [ln.formula for ln in script.lines]
    done = 0
    while done < models:
        M = random_model(rng, functor, rng.randint(1, 3), ("p", "q"), sorted(noms))
        # soundness is relative to the global assumptions: sample models of the TBox
        if script.tbox and not model_satisfies_globally(M, script.tbox):
            continue
        done += 1
        for f, ext in truth_sets(M, formulas).items():
            if ext != M.carrier:
                bad.append(show(f))
    return bad


def criterion_5(scripts: int = 500, models: int = 100, seed: int = 0):
    rng = random.Random(seed)
    invalid = []
    rejected = 0
    kinds = collections.Counter()
    for k in range(scripts):
        family = "K" if k % 2 else "graded"
        s = random_proof_script(rng, family, steps=6, require=("name", "paste", "da"))
        for ln in s.lines:
            kinds[type(ln.just).__name__] += 1
        if not check_proof(s):
            rejected += 1
            continue
        functor = functor_by_name("kripke" if family == "K" else "multigraph")
        invalid += _valid_on_random_models(rng, s, functor, models)
    for _, s in derived_rule_fixtures():
        if not check_proof(s):
            rejected += 1
        invalid += _valid_on_random_models(rng, s, KripkeFunctor(), models)
    ok = not invalid and not rejected
    detail = (f"{scripts} random + {len(derived_rule_fixtures())} fixture scripts x {models} models; "
              f"Name={kinds['Name']} PasteOp={kinds['PasteOp']} DA={kinds['DA']} lines")
    if rejected:
        detail += f"; {rejected} generated scripts rejected"
    if invalid:
        detail += f"; {len(invalid)} invalid lines, first: {invalid[0]}"
    return ok, detail


# ---------------------------------------------------------------- criterion 6


def criterion_6():
    results = {name: check_proof(s) for name, s in derived_rule_fixtures()}
    ok = all(results.values()) and {"back-axiom", "name-prime", "name-cong"} <= set(results)
    return ok, ", ".join(f"{k}={'accepted' if v else v}" for k, v in sorted(results.items()))


# ---------------------------------------------------------------- criteria 7, 9, 10

_RUNS: dict = {}


def _corpus():
    if "corpus" not in _RUNS:
        _RUNS["corpus"] = kripke_corpus(2000, seed=1, max_size=9)
    return _RUNS["corpus"]


def _brute(f):
    key = ("bf", f)
    if key not in _RUNS:
        _RUNS[key] = kripke_satisfiable(f, 3)
    return _RUNS[key]


def _search_corpus(kind: str) -> list:
    """Run named model search over the corpus; cached per ``kind``."""
    if kind in _RUNS:
        return _RUNS[kind]
    out = []
    for f in _corpus():
        bounds = SearchBounds(max_states=3 * (size(f) + 1))
        if kind == "kripke":
            prob = NamedModelProblem(KripkeFunctor(), K_SIG, None, [], [], [f], bounds)
        else:
            prob = NamedModelProblem(MultigraphFunctor(), GRADED_SIG, None, [parse("~ <1> i'", GRADED_SIG)], [],
                                     [kripke_formula_to_graded(f)], bounds)
        try:
            res = named_model_search(prob)
        except ResourceBound:
            res = None
        out.append((f, prob, res))
    _RUNS[kind] = out
    return out


def _agreement(kind: str):
    runs = _search_corpus(kind)
    stats = collections.Counter()
    diffs = []
    for f, prob, res in runs:
        bf = _brute(f) is not None
        status = "resource-bound" if res is None else res.status
        stats[(("sat" if bf else "unsat") + "/" + status)] += 1
        if bf != (res is not None and res.sat) or res is None:
            diffs.append((show(f), bf, status))
    detail = f"{len(runs)} formulas: " + ", ".join(f"{k}={v}" for k, v in sorted(stats.items()))
    if diffs:
        detail += f"; {len(diffs)} disagreements, first: {diffs[0]}"
    return len(runs) >= 2000 and not diffs, detail


def criterion_7():
    return _agreement("kripke")


def criterion_9():
    return _agreement("multigraph")


def criterion_10():
    checked = 0
    bad = []
    for kind in ("kripke", "multigraph"):
        for f, prob, res in _search_corpus(kind):
            if res is None or not res.sat:
                continue
            checked += 1
            rep = verify_named_model(res.model, res.designated, prob, res.labels)
            if not rep.ok:
                bad.append((kind, show(f), rep.failures[:2]))
    detail = f"{checked} search outputs re-verified (goal, tbox, frame, truth lemma, named)"
    if bad:
        detail += f"; {len(bad)} failures, first: {bad[0]}"
    return checked > 0 and not bad, detail


# ---------------------------------------------------------------- criterion 8


def _kripke_frames(n: int):
    states = tuple(range(n))
    pairs = list(itertools.product(states, repeat=2))
    for bits in range(2 ** len(pairs)):
        R = {(a, b) for k, (a, b) in enumerate(pairs) if bits >> k & 1}
        yield states, {s: frozenset(b for a, b in R if a == s) for s in states}, R


def _multigraph_frames(n: int, cap: int):
    states = tuple(range(n))
    pairs = list(itertools.product(states, repeat=2))
    for ms in itertools.product(range(cap + 1), repeat=len(pairs)):
        w = dict(zip(pairs, ms))
        gamma = {s: Multiset({b: w[(s, b)] for b in states}) for s in states}
        yield states, gamma, w


def criterion_8():
    problems = []
    frames = 0
    trans = parse("dia dia i' -> dia i'", K_SIG)
    for states, gamma, R in _kripke_frames(3):
        frames += 1
        transitive = all((a, c) in R for (a, b) in R for (b2, c) in R if b == b2)
        if bool(frame_satisfies_pure(KripkeFunctor(), states, gamma, [trans])) != transitive:
            problems.append(("transitive", sorted(R)))
    refl = parse("i' -> <0> i'", GRADED_SIG)
    sym = {k: parse(f"(i' & <{k}> j') -> @j' <{k}> i'", GRADED_SIG) for k in (0, 1)}
    MG = MultigraphFunctor()
    for n in (1, 2):
        for states, gamma, w in _multigraph_frames(n, 2):
            frames += 1
            reflexive = all(w[(s, s)] >= 1 for s in states)
            if bool(frame_satisfies_pure(MG, states, gamma, [refl])) != reflexive:
                problems.append(("reflexive", w))
            # the k-instance says: an edge of weight > k is matched by a reverse edge of weight > k
            per_k = {}
            for k, ax in sym.items():
                expected = all(w[(b, a)] > k for (a, b) in w if w[(a, b)] > k)
                per_k[k] = bool(frame_satisfies_pure(MG, states, gamma, [ax]))
                if per_k[k] != expected:
                    problems.append((f"symmetric k={k}", w))
            # together (multiplicities <= 2) they hold exactly when the weights are symmetric
            symmetric = all(w[(a, b)] == w[(b, a)] for (a, b) in w)
            if (per_k[0] and per_k[1]) != symmetric:
                problems.append(("symmetric", w))
    detail = f"{frames} frames (512 Kripke |C|=3, multigraphs |C|<=2 mult<=2)"
    if problems:
        detail += f"; {len(problems)} mismatches, first: {problems[0]}"
    return not problems, detail


# ---------------------------------------------------------------- pytest wrappers

CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}
LIMITS = {1: 60, 2: 120, 3: 60, 4: 120, 5: 300, 6: 1, 7: 600, 8: 120, 9: 600, 10: None}


def _check(n, capsys):
    t0 = time.time()
    ok, line = _run(n, CRITERIA[n], capsys)
    assert ok, line
    if LIMITS[n] is not None:
        # runtime targets are reported, not enforced: timing depends on the machine
        if time.time() - t0 > LIMITS[n]:
            with capsys.disabled():
                print(f"criterion {n:2d}: note: exceeded the {LIMITS[n]} s runtime target")


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    _check(n, capsys)


if __name__ == "__main__":
    wanted = [int(a) for a in sys.argv[1:]] or sorted(CRITERIA)
    results = [_run(n, CRITERIA[n])[0] for n in wanted]
    sys.exit(0 if all(results) else 1)
