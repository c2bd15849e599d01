"""Finite hybrid T-models and the satisfaction relation.

A model is a finite carrier, a transition map assigning each state an
element of ``T(states)`` (see :mod:`hycoa.functors`) and a hybrid
valuation.  Truth sets are computed bottom-up; ``@`` jumps to the named
state and ``dn`` rebinds a nominal to the current state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .errors import NotPure, ResourceBound, UnboundNominal
from .functors import (
    DEFAULT_BOUNDS,
    Functor,
    KripkeFunctor,
    Multiset,
    MultigraphFunctor,
    SearchBounds,
    functor_by_name,
    powerset,
    preimage,
)
from .syntax import (
    And,
    At,
    Down,
    Formula,
    Modal,
    Nom,
    Not,
    Prop,
    Top,
    free_nominals,
    is_pure,
    show,
)


@dataclass(frozen=True)
class HybridModel:
    functor: Functor
    states: tuple
    gamma: dict
    props: dict = field(default_factory=dict)
    noms: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        S = frozenset(self.states)
        if len(S) != len(self.states):
            raise ValueError("duplicate states")
        missing = S - set(self.gamma)
        if missing:
            raise ValueError(f"gamma undefined on {sorted(map(str, missing))}")
        for s in self.states:
            if not self.functor.is_element(self.gamma[s], S):
                raise ValueError(f"gamma({s}) is not a well-formed {self.functor.name} element")
        for p, ext in self.props.items():
            if not frozenset(ext) <= S:
                raise ValueError(f"valuation of {p} leaves the carrier")
        for i, s in self.noms.items():
            if s not in S:
                raise ValueError(f"nominal {i}' denotes unknown state {s}")

    @property
    def carrier(self) -> frozenset:
        return frozenset(self.states)

    def with_noms(self, noms: dict) -> "HybridModel":
        return HybridModel(self.functor, self.states, self.gamma, self.props, noms)

    def with_props(self, props: dict) -> "HybridModel":
        return HybridModel(self.functor, self.states, self.gamma, props, self.noms)


class _Evaluator:
    def __init__(self, model: HybridModel):
        self.m = model
        self.C = model.carrier
        self.memo = {}

    def run(self, f: Formula, env: dict) -> frozenset:
        key = (f, tuple(sorted(env.items())) if env else ())
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self._eval(f, env)
        self.memo[key] = out
        return out

    def _nom(self, name: str, env: dict):
        if name in env:
            return env[name]
        try:
            return self.m.noms[name]
        except KeyError:
            raise UnboundNominal(f"nominal {name}' has no valuation") from None

    def _eval(self, f: Formula, env: dict) -> frozenset:
        m = self.m
        if isinstance(f, Top):
            return self.C
        if isinstance(f, Prop):
            return frozenset(m.props.get(f.name, ()))
        if isinstance(f, Nom):
            return frozenset((self._nom(f.name, env),))
        if isinstance(f, Not):
            return self.C - self.run(f.arg, env)
        if isinstance(f, And):
            left = self.run(f.left, env)
            if not left:
                return left
            return left & self.run(f.right, env)
        if isinstance(f, At):
            s = self._nom(f.nom, env)
            return self.C if s in self.run(f.arg, env) else frozenset()
        if isinstance(f, Modal):
            args = tuple(self.run(a, env) for a in f.args)
            member = m.functor.member
            return frozenset(c for c in m.states if member(f.op, m.gamma[c], args, self.C))
        if isinstance(f, Down):
            out = []
            for c in m.states:
                inner = dict(env)
                inner[f.nom] = c
                if c in self.run(f.arg, inner):
                    out.append(c)
            return frozenset(out)
        raise TypeError(f"not a formula: {f!r}")


def truth_set(model: HybridModel, f: Formula) -> frozenset:
    return _Evaluator(model).run(f, {})


def truth_sets(model: HybridModel, formulas: Iterable[Formula]) -> dict:
    """Truth sets of several formulas sharing one evaluation cache."""
    ev = _Evaluator(model)
    return {f: ev.run(f, {}) for f in formulas}


def satisfies(model: HybridModel, state, f: Formula) -> bool:
    if state not in model.carrier:
        raise ValueError(f"unknown state {state}")
    return state in truth_set(model, f)


def model_satisfies_globally(model: HybridModel, formulas: Iterable[Formula]) -> bool:
    ev = _Evaluator(model)
    return all(ev.run(f, {}) == ev.C for f in formulas)


# ---------------------------------------------------------------- frames


@dataclass(frozen=True)
class FrameFailure:
    axiom: Formula
    assignment: dict
    state: object

    def describe(self) -> str:
        asg = " ".join(f"{i}'={s}" for i, s in sorted(self.assignment.items()))
        return f"axiom {show(self.axiom)} fails at {self.state} under {asg or '(no nominals)'}"


@dataclass(frozen=True)
class FrameResult:
    holds: bool
    failure: FrameFailure | None = None

    def __bool__(self):
        return self.holds


def nominal_assignments(noms: Iterable[str], states: Iterable) -> Iterable[dict]:
    noms = sorted(noms)
    states = list(states)
    for combo in itertools.product(states, repeat=len(noms)):
        yield dict(zip(noms, combo))


def frame_satisfies_pure(functor: Functor, states: Iterable, gamma: dict, axioms: Iterable[Formula]) -> FrameResult:
    """Check pure axioms as frame conditions.

    Only nominal assignments matter for pure formulas, and only those of the
    nominals free in each axiom.
    """
    axioms = list(axioms)
    for ax in axioms:
        if not is_pure(ax):
            raise NotPure(f"axiom {show(ax)} contains propositional variables")
    states = tuple(states)
    for ax in axioms:
        for asg in nominal_assignments(free_nominals(ax), states):
            model = HybridModel(functor, states, gamma, {}, asg)
            ext = truth_set(model, ax)
            if len(ext) != len(states):
                bad = next(s for s in states if s not in ext)
                return FrameResult(False, FrameFailure(ax, asg, bad))
    return FrameResult(True)


def model_satisfies_pure(model: HybridModel, axioms: Iterable[Formula]) -> FrameResult:
    return frame_satisfies_pure(model.functor, model.states, model.gamma, axioms)


# ---------------------------------------------------------------- Kripke -> multigraph


def kripke_to_multigraph(model: HybridModel) -> HybridModel:
    if model.functor.name != "kripke":
        raise ValueError("expected a Kripke model")
    gamma = {c: Multiset({d: 1 for d in model.gamma[c]}) for c in model.states}
    return HybridModel(MultigraphFunctor(), model.states, gamma, dict(model.props), dict(model.noms))


def kripke_formula_to_graded(f: Formula) -> Formula:
    """Read ``dia`` as ``<0>`` and ``box phi`` as ``~ <0> ~ phi``."""
    if isinstance(f, (Top, Prop, Nom)):
        return f
    if isinstance(f, Not):
        return Not(kripke_formula_to_graded(f.arg))
    if isinstance(f, And):
        return And(kripke_formula_to_graded(f.left), kripke_formula_to_graded(f.right))
    if isinstance(f, At):
        return At(f.nom, kripke_formula_to_graded(f.arg))
    if isinstance(f, Down):
        return Down(f.nom, kripke_formula_to_graded(f.arg))
    if isinstance(f, Modal):
        (a,) = f.args
        a = kripke_formula_to_graded(a)
        if f.op == "dia":
            return Modal("<0>", (a,))
        if f.op == "box":
            return Not(Modal("<0>", (Not(a),)))
    raise ValueError(f"not a Kripke formula: {f!r}")


# ---------------------------------------------------------------- liftings


def check_bounded(functor: Functor, op: str, k: int, X: Iterable, bounds: SearchBounds = DEFAULT_BOUNDS,
                  arg: int | None = None) -> bool:
    """Is ``op`` k-bounded (in argument ``arg``) over the finite set ``X``?

    Checks ``[op](.., A, ..) = U_{B <= A, |B| <= k} [op](.., B, ..)`` for
    every ``A`` and every choice of the remaining arguments, over the
    enumerable fragment of ``TX``.
    """
    X = frozenset(X)
    opdef = functor.signature[op]
    if arg is None:
        arg = next((r for r, b in enumerate(opdef.bounds) if b is not None), 0)
    subsets = powerset(sorted(X, key=str))
    small = {A: [B for B in subsets if B <= A and len(B) <= k] for A in subsets}
    others = [r for r in range(opdef.arity) if r != arg]
    for rest in itertools.product(subsets, repeat=len(others)):
        def args_with(A):
            out = [None] * opdef.arity
            for r, S in zip(others, rest):
                out[r] = S
            out[arg] = A
            return tuple(out)

        if arg in functor.relevant_args:
            elements = list(functor.enumerate(X, bounds))
        else:
            elements = list(functor.enumerate(X, bounds, op, args_with(frozenset())))
        for t in elements:
            for A in subsets:
                lhs = functor.member(op, t, args_with(A), X)
                rhs = any(functor.member(op, t, args_with(B), X) for B in small[A])
                if lhs != rhs:
                    return False
    return True


def all_functions(X: Iterable, Y: Iterable) -> Iterable[dict]:
    X = sorted(X, key=str)
    Y = sorted(Y, key=str)
    for img in itertools.product(Y, repeat=len(X)):
        yield dict(zip(X, img))


def check_naturality(functor: Functor, op: str, X: Iterable, Y: Iterable, bounds: SearchBounds = DEFAULT_BOUNDS):
    """Return ``None`` if naturality holds for every ``f: X -> Y``, else a
    counterexample ``(f, t, args)``."""
    X, Y = frozenset(X), frozenset(Y)
    arity = functor.signature[op].arity
    ysubs = powerset(sorted(Y, key=str))
    for f in all_functions(X, Y):
        for args in itertools.product(ysubs, repeat=arity):
            pre = tuple(preimage(f, A) for A in args)
            for t in functor.enumerate(X, bounds, op, pre):
                if functor.member(op, functor.map(f, t, Y), args, Y) != functor.member(op, t, pre, X):
                    return f, t, args
    return None


__all__ = [
    "HybridModel",
    "truth_set",
    "truth_sets",
    "satisfies",
    "model_satisfies_globally",
    "frame_satisfies_pure",
    "model_satisfies_pure",
    "FrameResult",
    "FrameFailure",
    "kripke_to_multigraph",
    "kripke_formula_to_graded",
    "check_bounded",
    "check_naturality",
    "all_functions",
    "nominal_assignments",
    "functor_by_name",
    "KripkeFunctor",
    "ResourceBound",
    "UnboundNominal",
    "NotPure",
]
