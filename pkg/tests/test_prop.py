from __future__ import annotations

import itertools
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from hycoa.gen import random_formula
from hycoa.prop import dpll, is_tautology, iter_atom_models, satisfiable
from hycoa.syntax import TOP, And, Not, Prop, Top, parse


def _truth_table_sat(f) -> bool:
    names = sorted({a.name for a in _props(f)})
    for vals in itertools.product([False, True], repeat=len(names)):
        env = dict(zip(names, vals))
        if _ev(f, env):
            return True
    return False


def _props(f):
    if isinstance(f, Prop):
        yield f
    elif isinstance(f, Not):
        yield from _props(f.arg)
    elif isinstance(f, And):
        yield from _props(f.left)
        yield from _props(f.right)


def _ev(f, env):
    if isinstance(f, Top):
        return True
    if isinstance(f, Prop):
        return env[f.name]
    if isinstance(f, Not):
        return not _ev(f.arg, env)
    return _ev(f.left, env) and _ev(f.right, env)


@settings(max_examples=400, deadline=None)
@given(st.integers(0, 10**9))
def test_dpll_matches_truth_tables(seed):
    rng = random.Random(seed)
    f = random_formula(rng, [], ("p", "q", "r", "s"), (), depth=0, size=rng.randint(1, 20), at=False)
    assert satisfiable([f]) == _truth_table_sat(f)


def test_tautologies():
    assert is_tautology(parse("(p -> p)"))
    assert is_tautology(parse("(p | ~ p)"))
    assert is_tautology(parse("((p & (p -> q)) -> q)"))
    assert not is_tautology(parse("(p -> q)"))
    assert is_tautology(TOP)


def test_modal_subformulas_are_opaque_atoms():
    assert is_tautology(parse("(dia p -> dia p)"))
    assert not is_tautology(parse("(dia p -> dia ~ ~ p)"))
    # atoms are identified up to alpha-equivalence
    assert is_tautology(parse("((dn x'. dia x') -> (dn y'. dia y'))"))
    assert not is_tautology(parse("(box p -> p)"))


def test_dpll_direct():
    assert dpll([(1, 2), (-1,), (-2, 3)], 3) is not None
    assert dpll([(1,), (-1,)], 1) is None
    assert dpll([], 0) == {}


def test_iter_atom_models_enumerates_projection():
    models = list(iter_atom_models([parse("(p | q)")]))
    got = {tuple(sorted((str(k), v) for k, v in m.items())) for m in models}
    assert len(got) == 3
    extra = list(iter_atom_models([parse("p")], [Prop("q")]))
    assert len(extra) == 2
