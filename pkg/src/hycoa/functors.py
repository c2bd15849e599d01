"""Finite-set functors with their predicate liftings.

Each functor fixes how elements of ``TX`` are represented for a finite
state set ``X``, decides membership in the liftings of its operators,
pushes elements forward along maps (``Tf``) and enumerates a finite
fragment of ``TX`` under :class:`SearchBounds`.

Element representations:

* kripke: ``frozenset`` of successors.
* multigraph: :class:`Multiset` (state -> multiplicity, ``math.inf`` allowed).
* neighborhood / monotone: ``frozenset`` of ``frozenset`` neighbourhoods.
* selection: :class:`Selection` (sparse table plus default value).
* game: :class:`Game` (strategy-set sizes plus outcome table).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ResourceBound
from .syntax import (
    CK_SIG,
    GRADED_RE,
    K_SIG,
    NEIGHBORHOOD_SIG,
    PRESBURGER_RE,
    COALITION_RE,
    SimilarityType,
    coalition_agents,
    coalition_signature,
    parse_presburger,
)


@dataclass(frozen=True)
class SearchBounds:
    max_multiplicity: int = 2
    max_strategies: int = 2
    max_states: int = 8
    max_enum: int = 200_000
    max_nodes: int = 200_000

    def __post_init__(self):
        for name in ("max_multiplicity", "max_strategies", "max_states", "max_enum", "max_nodes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


DEFAULT_BOUNDS = SearchBounds()


def powerset(xs: Iterable) -> list:
    xs = list(xs)
    return [frozenset(c) for r in range(len(xs) + 1) for c in itertools.combinations(xs, r)]


def preimage(f: dict, B: frozenset) -> frozenset:
    return frozenset(x for x, y in f.items() if y in B)


# ---------------------------------------------------------------- element types


class Multiset:
    """Finite map from states to multiplicities in N u {inf}; zeros dropped."""

    __slots__ = ("_items", "_hash")

    def __init__(self, items=()):
        d = {}
        for x, m in dict(items).items():
            if m != math.inf:
                m = int(m)
            if m < 0:
                raise ValueError("negative multiplicity")
            if m:
                d[x] = m
        self._items = d
        self._hash = hash(frozenset(d.items()))

    def __call__(self, x) -> int | float:
        return self._items.get(x, 0)

    def items(self):
        return self._items.items()

    def support(self) -> frozenset:
        return frozenset(self._items)

    def mass(self, A: Iterable) -> int | float:
        return sum(self._items.get(x, 0) for x in A)

    def __eq__(self, other):
        return isinstance(other, Multiset) and self._items == other._items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"{x!r}: {m}" for x, m in sorted(self._items.items(), key=lambda kv: str(kv[0])))
        return f"Multiset({{{inner}}})"


@dataclass(frozen=True)
class Selection:
    """Selection function ``P(X) -> P(X)``: explicit entries, else ``default``."""

    entries: frozenset = frozenset()
    default: frozenset = frozenset()

    def __call__(self, A: frozenset) -> frozenset:
        for arg, val in self.entries:
            if arg == A:
                return val
        return self.default

    @staticmethod
    def from_table(table: dict, default: frozenset = frozenset()) -> "Selection":
        return Selection(frozenset((frozenset(a), frozenset(b)) for a, b in table.items() if frozenset(b) != default),
                         frozenset(default))

    def support(self) -> frozenset:
        out = set(self.default)
        for a, b in self.entries:
            out |= b
        return frozenset(out)


@dataclass(frozen=True)
class Game:
    """Game-frame element: strategy-set sizes per agent and an outcome per
    strategy profile (profiles in ``itertools.product`` order)."""

    sizes: tuple
    outcome: tuple

    def profiles(self):
        return itertools.product(*(range(s) for s in self.sizes))

    def outcome_of(self, profile: tuple):
        idx = 0
        for s, p in zip(self.sizes, profile):
            idx = idx * s + p
        return self.outcome[idx]

    def support(self) -> frozenset:
        return frozenset(self.outcome)


# ---------------------------------------------------------------- functors


class Functor:
    name = "abstract"
    signature: SimilarityType
    # argument positions that a restricted enumeration depends on
    relevant_args: tuple = ()

    def member(self, op: str, t, args: tuple, X: frozenset) -> bool:
        raise NotImplementedError

    def enumerate(self, X, bounds: SearchBounds = DEFAULT_BOUNDS, op: str | None = None,
                  args: tuple | None = None) -> Iterator:
        """Enumerate (a bounded fragment of) ``TX``.

        When ``op`` and ``args`` are given, implementations may restrict to a
        sub-family on which membership in ``op`` at ``args`` already takes
        every value it takes on the full fragment.
        """
        raise NotImplementedError

    def map(self, f: dict, t, Y) -> object:
        raise NotImplementedError

    def support(self, t) -> frozenset | None:
        """States that ``t`` can mention, or ``None`` if not meaningful."""
        return None

    def is_element(self, t, X: frozenset) -> bool:
        return True

    def supports(self, op: str) -> bool:
        return self.signature.resolve(op) is not None

    def __repr__(self):
        return f"<functor {self.name}>"


class KripkeFunctor(Functor):
    name = "kripke"
    signature = K_SIG

    def member(self, op, t, args, X):
        (A,) = args
        if op == "box":
            return t <= A
        if op == "dia":
            return not t.isdisjoint(A)
        raise KeyError(op)

    def enumerate(self, X, bounds=DEFAULT_BOUNDS, op=None, args=None):
        X = sorted(X, key=str)
        if 2 ** len(X) > bounds.max_enum:
            raise ResourceBound(f"|P(X)| = 2^{len(X)} exceeds enumeration limit")
        return iter(powerset(X))

    def map(self, f, t, Y):
        return frozenset(f[x] for x in t)

    def support(self, t):
        return frozenset(t)

    def is_element(self, t, X):
        return isinstance(t, frozenset) and t <= X


class MultigraphFunctor(Functor):
    name = "multigraph"
    signature = SimilarityType("graded", (), frozenset({"graded", "presburger"}))

    def member(self, op, t, args, X):
        m = GRADED_RE.match(op)
        if m:
            return t.mass(args[0]) > int(m.group(1))
        if PRESBURGER_RE.match(op):
            coeffs, k = parse_presburger(op)
            return sum(a * t.mass(A) for a, A in zip(coeffs, args)) >= k
        raise KeyError(op)

    def enumerate(self, X, bounds=DEFAULT_BOUNDS, op=None, args=None):
        X = sorted(X, key=str)
        cap = bounds.max_multiplicity
        if (cap + 1) ** len(X) > bounds.max_enum:
            raise ResourceBound(f"{cap + 1}^{len(X)} multisets exceed enumeration limit")
        for ms in itertools.product(range(cap + 1), repeat=len(X)):
            yield Multiset(zip(X, ms))

    def map(self, f, t, Y):
        out = {}
        for x, m in t.items():
            out[f[x]] = out.get(f[x], 0) + m
        return Multiset(out)

    def support(self, t):
        return t.support()

    def is_element(self, t, X):
        return isinstance(t, Multiset) and t.support() <= X


class NeighborhoodFunctor(Functor):
    name = "neighborhood"
    signature = NEIGHBORHOOD_SIG
    monotone = False

    def member(self, op, t, args, X):
        (A,) = args
        if op == "box":
            return A in t
        if op == "dia":
            return (X - A) not in t
        raise KeyError(op)

    def enumerate(self, X, bounds=DEFAULT_BOUNDS, op=None, args=None):
        X = frozenset(X)
        subsets = powerset(sorted(X, key=str))
        if self.monotone:
            return iter(upsets(X, bounds))
        if 2 ** len(subsets) > bounds.max_enum:
            raise ResourceBound(f"2^{len(subsets)} neighbourhood systems exceed enumeration limit")
        return (frozenset(c) for c in powerset(subsets))

    def map(self, f, t, Y):
        Y = frozenset(Y)
        return frozenset(B for B in powerset(sorted(Y, key=str)) if preimage(f, B) in t)

    def is_element(self, t, X):
        if not all(isinstance(s, frozenset) and s <= X for s in t):
            return False
        return not self.monotone or is_upward_closed(t, X)


class MonotoneFunctor(NeighborhoodFunctor):
    name = "monotone"
    monotone = True


def is_upward_closed(S: frozenset, X: frozenset) -> bool:
    for A in S:
        for x in X - A:
            if A | {x} not in S:
                return False
    return True


def upward_closure(gens: Iterable[frozenset], X: frozenset) -> frozenset:
    gens = [frozenset(g) for g in gens]
    return frozenset(B for B in powerset(sorted(X, key=str)) if any(g <= B for g in gens))


def upsets(X: frozenset, bounds: SearchBounds = DEFAULT_BOUNDS) -> list:
    """All upward-closed families over ``X`` (one per antichain of generators)."""
    subsets = powerset(sorted(X, key=str))
    if len(subsets) > 16:
        raise ResourceBound(f"monotone enumeration over {len(X)} states is not supported")
    out = []
    seen = set()

    def rec(idx, chosen):
        if idx == len(subsets):
            up = upward_closure(chosen, X)
            if up not in seen:
                seen.add(up)
                out.append(up)
                if len(out) > bounds.max_enum:
                    raise ResourceBound("monotone enumeration limit exceeded")
            return
        s = subsets[idx]
        rec(idx + 1, chosen)
        if not any(c <= s or s <= c for c in chosen):
            rec(idx + 1, chosen + [s])

    rec(0, [])
    return out


class SelectionFunctor(Functor):
    name = "selection"
    signature = CK_SIG
    relevant_args = (0,)

    def member(self, op, t, args, X):
        A, B = args
        if op == "=>":
            return t(A) <= B
        if op == ">":
            return not t(A).isdisjoint(B)
        raise KeyError(op)

    def enumerate(self, X, bounds=DEFAULT_BOUNDS, op=None, args=None):
        subsets = powerset(sorted(X, key=str))
        if args is not None:
            # membership only inspects the entry at the first argument
            key = frozenset(args[0])
            return (Selection.from_table({key: v}) for v in subsets)
        if len(subsets) ** len(subsets) > bounds.max_enum:
            raise ResourceBound(f"{len(subsets)}^{len(subsets)} selection tables exceed enumeration limit")
        return (Selection.from_table(dict(zip(subsets, vals)))
                for vals in itertools.product(subsets, repeat=len(subsets)))

    def map(self, f, t, Y):
        table = {}
        for B in powerset(sorted(frozenset(Y), key=str)):
            table[B] = frozenset(f[x] for x in t(preimage(f, B)))
        return Selection.from_table(table)

    def support(self, t):
        return t.support()

    def is_element(self, t, X):
        return isinstance(t, Selection) and t.support() <= X and all(a <= X for a, _ in t.entries)


class GameFunctor(Functor):
    name = "game"

    def __init__(self, agents: Iterable[str] = ("a", "b")):
        self.agents = tuple(sorted(agents))
        self.signature = coalition_signature(self.agents)

    def coalition(self, op: str) -> tuple:
        if not COALITION_RE.match(op):
            raise KeyError(op)
        members = coalition_agents(op)
        return tuple(self.agents.index(a) for a in members)

    def member(self, op, t, args, X):
        (A,) = args
        coal = self.coalition(op)
        others = [n for n in range(len(self.agents)) if n not in coal]
        for mine in itertools.product(*(range(t.sizes[n]) for n in coal)):
            ok = True
            for theirs in itertools.product(*(range(t.sizes[n]) for n in others)):
                profile = [0] * len(self.agents)
                for n, s in zip(coal, mine):
                    profile[n] = s
                for n, s in zip(others, theirs):
                    profile[n] = s
                if t.outcome_of(tuple(profile)) not in A:
                    ok = False
                    break
            if ok:
                return True
        return False

    def enumerate(self, X, bounds=DEFAULT_BOUNDS, op=None, args=None):
        X = sorted(X, key=str)
        if not X:
            return
        total = 0
        for sizes in itertools.product(range(1, bounds.max_strategies + 1), repeat=len(self.agents)):
            total += len(X) ** math.prod(sizes)
        if total > bounds.max_enum:
            raise ResourceBound(f"{total} game elements exceed enumeration limit")
        for sizes in itertools.product(range(1, bounds.max_strategies + 1), repeat=len(self.agents)):
            for out in itertools.product(X, repeat=math.prod(sizes)):
                yield Game(tuple(sizes), tuple(out))

    def map(self, f, t, Y):
        return Game(t.sizes, tuple(f[x] for x in t.outcome))

    def support(self, t):
        return t.support()

    def is_element(self, t, X):
        return (isinstance(t, Game) and len(t.sizes) == len(self.agents) and all(s >= 1 for s in t.sizes)
                and len(t.outcome) == math.prod(t.sizes) and set(t.outcome) <= X)

    def __repr__(self):
        return f"<functor game agents={','.join(self.agents)}>"


FUNCTOR_NAMES = ("kripke", "multigraph", "neighborhood", "monotone", "selection", "game")


def functor_by_name(name: str, agents: Iterable[str] = ("a", "b")) -> Functor:
    if name == "kripke":
        return KripkeFunctor()
    if name == "multigraph":
        return MultigraphFunctor()
    if name == "neighborhood":
        return NeighborhoodFunctor()
    if name == "monotone":
        return MonotoneFunctor()
    if name == "selection":
        return SelectionFunctor()
    if name == "game":
        return GameFunctor(agents)
    raise ValueError(f"unknown functor {name!r}")


def operators_for_tests(functor: Functor, max_grade: int = 3) -> list:
    """A representative finite list of operator names of ``functor``."""
    if functor.name == "kripke":
        return ["box", "dia"]
    if functor.name == "multigraph":
        return [f"<{k}>" for k in range(max_grade + 1)] + ["sum{1*#,2*#}>=2"]
    if functor.name in ("neighborhood", "monotone"):
        return ["box", "dia"]
    if functor.name == "selection":
        return ["=>", ">"]
    if functor.name == "game":
        agents = functor.agents
        return ["[" + ",".join(c) + "]" for r in range(len(agents) + 1) for c in itertools.combinations(agents, r)]
    raise ValueError(functor.name)


def arity_of(functor: Functor, op: str) -> int:
    return functor.signature[op].arity
