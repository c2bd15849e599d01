from __future__ import annotations

import random
from pathlib import Path

import pytest

from hycoa.coalgebra import truth_set
from hycoa.errors import ConfigError
from hycoa.formats import (
    format_bounds,
    format_model,
    format_onestep,
    format_problem,
    load_model,
    load_onestep,
    load_problem,
    parse_bounds,
    parse_formula_list,
    parse_model,
    parse_onestep,
    parse_problem,
)
from hycoa.functors import (
    DEFAULT_BOUNDS,
    GameFunctor,
    KripkeFunctor,
    MonotoneFunctor,
    MultigraphFunctor,
    NeighborhoodFunctor,
    SearchBounds,
    SelectionFunctor,
)
from hycoa.gen import random_formula, random_model
from hycoa.syntax import K_SIG, ParseError, parse

DATA = Path(__file__).parent / "data"

FUNCTORS = [
    KripkeFunctor(),
    MultigraphFunctor(),
    NeighborhoodFunctor(),
    MonotoneFunctor(),
    SelectionFunctor(),
    GameFunctor(("a", "b")),
]


# ---------------------------------------------------------------- models


@pytest.mark.parametrize("functor", FUNCTORS, ids=lambda f: f.name)
def test_model_round_trip_is_byte_stable(functor):
    rng = random.Random(7)
    bounds = SearchBounds(max_multiplicity=3, max_strategies=2)
    for _ in range(30):
        m = random_model(rng, functor, rng.randint(1, 3), bounds=bounds)
        text = format_model(m)
        again = parse_model(text)
        assert format_model(again) == text
        assert format_model(parse_model(format_model(again))) == text


@pytest.mark.parametrize("functor", FUNCTORS[:2], ids=lambda f: f.name)
def test_model_round_trip_preserves_truth(functor):
    rng = random.Random(3)
    ops = [(name, functor.signature[name].arity) for name in ("dia", "box", "<0>", "<1>") if name in functor.signature]
    for _ in range(20):
        m = random_model(rng, functor, 3)
        again = parse_model(format_model(m))
        for _ in range(10):
            f = random_formula(rng, ops, ("p", "q"), ("i", "j"), depth=3, size=10, down=True)
            assert {str(s) for s in truth_set(m, f)} == set(truth_set(again, f))


def test_load_model_fixture():
    m = load_model(DATA / "kripke_example.model")
    assert m.functor.name == "kripke"
    assert m.states == ("s0", "s1")
    assert m.gamma["s0"] == {"s0", "s1"} and m.gamma["s1"] == frozenset()
    assert m.props["p"] == {"s1"} and m.noms["i"] == "s0"
    g = load_model(DATA / "multigraph_double.model")
    assert g.gamma["s0"]("s1") == 2


@pytest.mark.parametrize(
    "text",
    [
        "states: s0\nsucc s0: s0\n",  # no functor line
        "functor: kripke\nstates: s0\nsucc s0 s0\n",  # missing colon
        "functor: kripke\nstates: s0\nsucc s0: s1\n",  # successor outside the carrier
        "functor: kripke\nstates: s0\nsucc s0:\nname i': s7\n",  # unknown named state
        "functor: neighborhood\nstates: s0\nnbhd s0: {s0} junk\n",
    ],
)
def test_model_parse_errors(text):
    with pytest.raises((ParseError, ConfigError, ValueError)):
        parse_model(text)


# ---------------------------------------------------------------- one-step files


def test_onestep_round_trip():
    of = load_onestep(DATA / "graded.onestep")
    text = format_onestep(of)
    again = parse_onestep(text)
    assert format_onestep(again) == text
    assert again.problem.Xi == of.problem.Xi
    assert again.functor.name == "multigraph"


def test_onestep_rules_and_errors():
    of = load_onestep(DATA / "contradiction.onestep")
    assert of.ruleset is not None and of.ruleset.name == "K"
    with pytest.raises(ParseError):
        parse_onestep("functor: kripke\ntau a: x\nconstraint: box a\n")  # no base
    with pytest.raises(ParseError):
        parse_onestep("functor: kripke\nbase: x\nwhatever: 1\n")
    with pytest.raises(ConfigError):
        parse_onestep("functor: nonsense\nbase: x\n")


# ---------------------------------------------------------------- bounds and problems


def test_bounds_round_trip():
    b = SearchBounds(max_multiplicity=5, max_strategies=2, max_states=7, max_enum=1000, max_nodes=99)
    assert parse_bounds(format_bounds(b)) == b
    assert parse_bounds("") == DEFAULT_BOUNDS
    assert parse_bounds("max_states=3, max_mult=2").max_multiplicity == 2


@pytest.mark.parametrize("text", ["max_states", "bogus=1", "max_states=x"])
def test_bounds_errors(text):
    with pytest.raises(ConfigError):
        parse_bounds(text)


def test_problem_round_trip():
    pf = load_problem(DATA / "unsat_transitive.problem")
    assert pf.bounds.max_states == 6 and pf.bounds_given["max_states"] == 6
    assert pf.axioms == [parse("dia dia i' -> dia i'", K_SIG)]
    text = format_problem(pf)
    again = parse_problem(text)
    assert format_problem(again) == text
    assert again.goal == pf.goal and again.axioms == pf.axioms and again.bounds == pf.bounds


def test_problem_inline_sections_and_errors():
    pf = parse_problem("functor: kripke\ngoal: dia p\nbounds: max_states=2\n")
    assert pf.goal == [parse("dia p", K_SIG)]
    with pytest.raises(ParseError):
        parse_problem("goal: dia p\n")
    with pytest.raises(ParseError):
        parse_problem("dia p\nfunctor: kripke\n")
    with pytest.raises(ParseError):
        parse_problem("functor: kripke\ngoal:\n  dia (p\n")
    with pytest.raises(ConfigError):
        parse_problem("functor: kripke\nbounds: max_states=-\n")


def test_formula_list():
    fs = parse_formula_list("# header\ndia p\n\nbox q  # trailing\n", K_SIG)
    assert fs == [parse("dia p", K_SIG), parse("box q", K_SIG)]
    with pytest.raises(ParseError) as e:
        parse_formula_list("dia p\n(p &\n", K_SIG)
    assert "line 2" in str(e.value)
