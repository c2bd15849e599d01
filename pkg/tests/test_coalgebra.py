from __future__ import annotations

import random

import pytest

from hycoa.coalgebra import (
    HybridModel,
    check_bounded,
    frame_satisfies_pure,
    kripke_formula_to_graded,
    kripke_to_multigraph,
    model_satisfies_globally,
    satisfies,
    truth_set,
)
from hycoa.errors import NotPure, UnboundNominal
from hycoa.functors import (
    KripkeFunctor,
    MonotoneFunctor,
    MultigraphFunctor,
    Multiset,
    SearchBounds,
    functor_by_name,
    operators_for_tests,
)
from hycoa.gen import random_formula, random_model
from hycoa.syntax import GRADED_SIG, TOP, Down, Nom, parse, rename_nominal

K = KripkeFunctor()
MG = MultigraphFunctor()


def example_model() -> HybridModel:
    return HybridModel(K, ("s0", "s1"), {"s0": frozenset({"s0", "s1"}), "s1": frozenset()},
                       {"p": frozenset({"s1"})}, {"i": "s0"})


def test_satisfies_examples():
    M = example_model()
    assert satisfies(M, "s1", parse("@i' dia p"))
    assert satisfies(M, "s0", Down("x", Nom("x")))
    assert satisfies(M, "s1", Down("x", Nom("x")))
    G = HybridModel(MG, ("s", "t"), {"s": Multiset({"t": 1}), "t": Multiset({"s": 1, "t": 1})}, {}, {"i": "s"})
    for c in G.states:
        assert satisfies(G, c, parse("~ <1> i'", GRADED_SIG))


def test_truth_set_examples():
    M = example_model()
    assert truth_set(M, Nom("i")) == {"s0"}
    assert truth_set(M, TOP) == M.carrier
    assert truth_set(M, parse("dia p")) == {"s0"}


def test_unbound_nominal():
    with pytest.raises(UnboundNominal):
        truth_set(example_model(), parse("j'"))


def test_global_examples():
    M = example_model()
    assert model_satisfies_globally(M, [TOP])
    total = HybridModel(K, ("a", "b"), {"a": frozenset({"b"}), "b": frozenset({"a"})})
    assert model_satisfies_globally(total, [parse("dia true")])
    assert not model_satisfies_globally(M, [parse("dia true")])
    G = HybridModel(MG, ("s", "t"), {"s": Multiset({"t": 2}), "t": Multiset()}, {}, {"i": "t"})
    assert not model_satisfies_globally(G, [parse("~ <1> i'", GRADED_SIG)])


def test_frame_examples():
    cycle = {"s0": frozenset({"s1"}), "s1": frozenset({"s0"})}
    res = frame_satisfies_pure(K, ("s0", "s1"), cycle, [parse("dia dia i' -> dia i'")])
    assert not res
    assert res.failure.assignment == {"i": "s0"} and res.failure.state == "s0"
    refl = {"s0": Multiset({"s0": 1, "s1": 2}), "s1": Multiset({"s1": 3})}
    assert frame_satisfies_pure(MG, ("s0", "s1"), refl, [parse("i' -> <0> i'", GRADED_SIG)])
    assert frame_satisfies_pure(K, ("s0", "s1"), cycle, [parse("@i' i'")])


def test_frame_check_rejects_impure_axioms():
    with pytest.raises(NotPure):
        frame_satisfies_pure(K, ("s",), {"s": frozenset()}, [parse("dia p -> p")])


def test_kripke_to_multigraph_examples():
    M = HybridModel(K, ("s0", "s1"), {"s0": frozenset({"s1"}), "s1": frozenset()}, {"p": frozenset({"s1"})},
                    {"i": "s0", "j": "s1"})
    G = kripke_to_multigraph(M)
    assert G.gamma["s0"] == Multiset({"s1": 1}) and G.gamma["s1"] == Multiset()
    E = example_model()
    assert truth_set(E, parse("dia p")) == truth_set(kripke_to_multigraph(E), parse("<0> p", GRADED_SIG))
    for i in ("i", "j"):
        assert model_satisfies_globally(G, [parse(f"~ <1> {i}'", GRADED_SIG)])


def test_kripke_to_multigraph_preserves_random_formulas():
    rng = random.Random(3)
    for _ in range(300):
        M = random_model(rng, K, rng.randint(1, 4), ("p", "q"), ("i", "j"))
        G = kripke_to_multigraph(M)
        f = random_formula(rng, [("dia", 1), ("box", 1)], depth=4, size=12, down=True)
        assert truth_set(M, f) == truth_set(G, kripke_formula_to_graded(f))


def test_back_axiom_on_random_kripke_models():
    rng = random.Random(4)
    back = parse("@i' p -> box @i' p")
    for _ in range(300):
        M = random_model(rng, K, rng.randint(1, 4), ("p",), ("i",))
        assert model_satisfies_globally(M, [back])


@pytest.mark.parametrize("name", ["kripke", "multigraph", "neighborhood", "monotone", "selection", "game"])
def test_alpha_invariance(name):
    rng = random.Random(5)
    F = functor_by_name(name)
    ops = [(op, F.signature[op].arity) for op in operators_for_tests(F, 2)]
    for _ in range(100):
        M = random_model(rng, F, rng.randint(1, 3), ("p", "q"), ("i", "j"))
        f = random_formula(rng, ops, depth=2, size=8, down=True, bound=("x",))
        g = Down("x", f)
        h = Down("z", rename_nominal(f, "x", "z"))
        assert truth_set(M, g) == truth_set(M, h)


def test_check_bounded_examples():
    X3 = ["x0", "x1", "x2"]
    assert check_bounded(K, "dia", 1, X3)
    for k in range(3):
        assert check_bounded(MG, f"<{k}>", k + 1, X3, SearchBounds(max_multiplicity=k + 2))
    assert not check_bounded(K, "box", 1, ["x0", "x1"])
    assert not check_bounded(MG, "<1>", 1, ["x0", "x1"], SearchBounds(max_multiplicity=3))


def test_conditional_and_monotone_boundedness():
    S = functor_by_name("selection")
    for n in range(3):
        assert check_bounded(S, ">", 1, [f"x{k}" for k in range(n)], arg=1)
    assert not check_bounded(S, "=>", 1, ["x0", "x1"], arg=1)
    # monotone dia is not bounded in general (see the decisions ledger);
    # monotone box over a two-element set is not 1-bounded either
    assert not check_bounded(MonotoneFunctor(), "box", 1, ["x0", "x1"])


def test_model_rejects_bad_gamma():
    with pytest.raises(ValueError):
        HybridModel(K, ("s",), {"s": frozenset({"t"})})
    with pytest.raises(ValueError):
        HybridModel(K, ("s",), {"s": frozenset()}, {}, {"i": "t"})
    with pytest.raises(ValueError):
        HybridModel(MonotoneFunctor(), ("s", "t"), {"s": frozenset({frozenset({"s"})}), "t": frozenset()})
