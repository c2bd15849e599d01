from __future__ import annotations

import random

import pytest

from hycoa.errors import ResourceBound
from hycoa.functors import (
    GameFunctor,
    KripkeFunctor,
    MonotoneFunctor,
    SearchBounds,
    functor_by_name,
    is_upward_closed,
    operators_for_tests,
)
from hycoa.onestep import (
    UNSAT,
    OneStepProblem,
    agreement_check,
    naive_one_step_sat,
    one_step_consistent,
    one_step_sat,
    subalgebra_representatives,
    verify_one_step_soundness,
    verify_witness,
)
from hycoa.rules import OneStepRule, ck_rules, graded_rules, k_rules
from hycoa.syntax import GRADED_SIG, TOP, And, Modal, Not, Prop, parse

K = KripkeFunctor()
XY = frozenset({"x", "y"})
FUNCTORS = ["kripke", "multigraph", "neighborhood", "monotone", "selection", "game"]


def P(X, tau, *xi, sig=None):
    return OneStepProblem(frozenset(X), tau, tuple(parse(f, sig) if sig else parse(f) for f in xi))


def test_kripke_box_example():
    res = one_step_sat(P(XY, {"a": {"x"}}, "box a"), K)
    assert res.witness in (frozenset({"x"}), frozenset())


@pytest.mark.parametrize("name", FUNCTORS)
def test_contradictory_literals(name):
    F = functor_by_name(name)
    op = operators_for_tests(F)[0]
    arity = F.signature[op].arity
    atom = Modal(op, (Prop("a"),) * arity)
    p = OneStepProblem(XY, {"a": frozenset({"x"})}, (atom, Not(atom)))
    assert one_step_sat(p, F) is UNSAT


def test_multigraph_example():
    p = P(XY, {"a": {"x"}}, "<0> a", "~ <1> a", sig=GRADED_SIG)
    res = one_step_sat(p, functor_by_name("multigraph"))
    assert res.witness.mass(frozenset({"x"})) == 1
    # brute force over all capped multisets agrees
    assert naive_one_step_sat(p, functor_by_name("multigraph"), SearchBounds(max_multiplicity=2)) is not UNSAT


def test_multigraph_presburger():
    M = functor_by_name("multigraph")
    p = P(XY, {"a": {"x"}, "b": {"y"}}, "sum{1*#,2*#}>=5 (a, b)", "~ <1> a", sig=GRADED_SIG)
    res = one_step_sat(p, M)
    assert verify_witness(p, M, res.witness)
    q = P(XY, {"a": {"x"}, "b": {"y"}}, "sum{1*#,1*#}>=3 (a, b)", "~ <0> a", "~ <1> b", sig=GRADED_SIG)
    assert one_step_sat(q, M) is UNSAT


def test_empty_base():
    assert one_step_sat(P([], {"a": set()}, "~ dia a"), K).witness == frozenset()
    assert one_step_sat(P([], {"a": set()}, "dia a"), K) is UNSAT


def test_monotone_solutions_are_upsets():
    F = MonotoneFunctor()
    rng = random.Random(2)
    for _ in range(200):
        X = frozenset(f"x{k}" for k in range(rng.randint(0, 3)))
        tau = {v: frozenset(x for x in X if rng.random() < 0.5) for v in "ab"}
        xi = [rng.choice([Modal(o, (Prop(v),)), Not(Modal(o, (Prop(v),)))]) for o in ("box", "dia") for v in "ab"
              if rng.random() < 0.5]
        res = one_step_sat(OneStepProblem(X, tau, tuple(xi)), F)
        if res is not UNSAT:
            assert is_upward_closed(res.witness, X)


def test_game_resource_bound_is_not_unsat():
    G = GameFunctor(("a",))
    # [a] a and ~[] ~a ... satisfiable with one strategy; a hard instance with a
    # tiny strategy cap must report a resource bound, never a refutation
    p = P(XY, {"a": {"x"}, "b": {"y"}}, "[a] a", "[a] b", "~ [] a", "~ [] b", sig=G.signature)
    with pytest.raises(ResourceBound):
        one_step_sat(p, G, SearchBounds(max_strategies=1))
    assert one_step_sat(p, G, SearchBounds(max_strategies=2)) is not UNSAT


@pytest.mark.parametrize("name", FUNCTORS)
def test_oracle_equivalence_random(name):
    F = functor_by_name(name)
    rng = random.Random(7)
    ops = operators_for_tests(F, 2)
    bounds = SearchBounds(max_multiplicity=3)
    args = [Prop("a"), Prop("b"), Not(Prop("a")), And(Prop("a"), Prop("b")), TOP]
    for _ in range(150):
        X = frozenset(f"x{k}" for k in range(rng.randint(1, 2)))
        tau = {v: frozenset(x for x in X if rng.random() < 0.5) for v in "ab"}
        xi = []
        for _ in range(rng.randint(1, 3)):
            op = rng.choice(ops)
            atom = Modal(op, tuple(rng.choice(args) for _ in range(F.signature[op].arity)))
            xi.append(atom if rng.random() < 0.5 else Not(atom))
        p = OneStepProblem(X, tau, tuple(xi))
        naive = naive_one_step_sat(p, F, bounds)
        try:
            fast = one_step_sat(p, F, bounds)
        except ResourceBound:
            # game search may give up, but only where no bounded element exists
            assert name == "game" and naive is UNSAT
            continue
        assert (fast is UNSAT) == (naive is UNSAT)
        if fast is not UNSAT:
            assert verify_witness(p, F, fast.witness)


def test_consistency_examples():
    rules = k_rules()
    assert one_step_consistent(P(XY, {"a": XY}, "box a"), rules)
    assert not one_step_consistent(P(XY, {"a": {"x"}, "b": {"x"}}, "box a", "~ box b"), rules)
    assert one_step_consistent(OneStepProblem(XY, {}, ()), rules)
    assert not one_step_consistent(P(XY, {"a": XY}, "~ box a"), rules)


def test_subalgebra_representatives():
    reps = subalgebra_representatives({"a": frozenset({"x"})}, XY)
    assert set(reps) == {frozenset(), frozenset({"x"}), frozenset({"y"}), XY}
    reps = subalgebra_representatives({"a": XY}, XY)
    assert set(reps) == {frozenset(), XY}


def test_soundness_of_shipped_rules():
    for n in range(4):
        X = [f"x{k}" for k in range(n)]
        for rule in k_rules().rules:
            assert verify_one_step_soundness(rule, K, X), rule
    M = functor_by_name("multigraph")
    for n in range(3):
        for rule in graded_rules(2).rules:
            assert verify_one_step_soundness(rule, M, [f"x{k}" for k in range(n)], SearchBounds(max_multiplicity=3)), rule
    S = functor_by_name("selection")
    for n in range(2):
        for rule in ck_rules().rules:
            assert verify_one_step_soundness(rule, S, [f"x{k}" for k in range(n)]), rule


def test_soundness_check_refutes_bogus_rule():
    assert not verify_one_step_soundness(OneStepRule("bogus", parse("a"), parse("dia a")), K, ["x"])


def test_agreement_examples():
    r = agreement_check(P(XY, {"a": {"x"}}, "box a"), K, k_rules())
    assert r.agree and r.consistent and r.satisfiable
    r = agreement_check(P(XY, {"a": {"x"}}, "box a", "~ box a"), K, k_rules())
    assert r.agree and not r.consistent and not r.satisfiable


def test_agreement_random_k():
    rng = random.Random(1)

    def rprop(d=1):
        c = rng.random()
        if d == 0 or c < 0.5:
            return rng.choice([Prop("a"), Prop("b"), TOP])
        return Not(rprop(d - 1)) if c < 0.7 else And(rprop(d - 1), rprop(d - 1))

    def rform(d=2):
        c = rng.random()
        if d == 0 or c < 0.4:
            return Modal(rng.choice(["box", "dia"]), (rprop(),))
        return Not(rform(d - 1)) if c < 0.7 else And(rform(d - 1), rform(d - 1))

    for _ in range(2000):
        X = frozenset(f"x{k}" for k in range(rng.randint(0, 2)))
        tau = {v: frozenset(x for x in X if rng.random() < 0.5) for v in "ab"}
        p = OneStepProblem(X, tau, tuple(rform() for _ in range(rng.randint(1, 3))))
        rep = agreement_check(p, K, k_rules())
        assert rep.agree
        # directional soundness: satisfiable implies consistent
        assert not rep.satisfiable or rep.consistent


def test_problem_validation():
    with pytest.raises(ValueError):
        P(XY, {}, "box a")
    with pytest.raises(ValueError):
        P(XY, {"a": {"x"}}, "box box a")
    with pytest.raises(ValueError):
        P(XY, {"a": {"z"}}, "box a")
