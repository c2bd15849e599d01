"""Propositional reasoning over the boolean skeleton of hybrid formulas.

Every subformula that is not built from ``true``, ``~`` and ``&`` is an
opaque atom; atoms are identified up to alpha-equivalence.  Satisfiability
is decided by DPLL on a Tseitin encoding.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .syntax import And, Formula, Not, Top, canonical


class Skeleton:
    """Tseitin encoder: maps formulas to DIMACS-style literals."""

    def __init__(self):
        self.atoms = {}
        self.atom_formula = {}
        self.clauses = []
        self.nvars = 0
        self._cache = {}
        self._top = None

    def _new(self) -> int:
        self.nvars += 1
        return self.nvars

    def atom(self, f: Formula) -> int:
        key = canonical(f)
        v = self.atoms.get(key)
        if v is None:
            v = self._new()
            self.atoms[key] = v
            self.atom_formula[v] = f
        return v

    def lit(self, f: Formula) -> int:
        hit = self._cache.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Top):
            if self._top is None:
                self._top = self._new()
                self.clauses.append((self._top,))
            out = self._top
        elif isinstance(f, Not):
            out = -self.lit(f.arg)
        elif isinstance(f, And):
            a, b = self.lit(f.left), self.lit(f.right)
            out = self._new()
            self.clauses.append((-out, a))
            self.clauses.append((-out, b))
            self.clauses.append((out, -a, -b))
        else:
            out = self.atom(f)
        self._cache[f] = out
        return out

    def assert_formula(self, f: Formula) -> None:
        self.clauses.append((self.lit(f),))


def dpll(clauses: list, nvars: int, assumptions: Iterable[int] = ()) -> dict | None:
    """Return a satisfying assignment ``{var: bool}`` or ``None``."""
    assign = {}
    for a in assumptions:
        if assign.get(abs(a), a > 0) != (a > 0):
            return None
        assign[abs(a)] = a > 0
    clauses = [tuple(c) for c in clauses]
    occurs = {}
    for idx, c in enumerate(clauses):
        for l in c:
            occurs.setdefault(abs(l), []).append(idx)
    return _search(clauses, occurs, assign, nvars)


def _value(l: int, assign: dict):
    v = assign.get(abs(l))
    if v is None:
        return None
    return v if l > 0 else not v


def _propagate(clauses: list, occurs: dict, assign: dict, trail: list, queue: list) -> bool:
    while queue:
        var = queue.pop()
        for idx in occurs.get(var, ()):
            unassigned = None
            count = 0
            sat = False
            for l in clauses[idx]:
                val = _value(l, assign)
                if val is True:
                    sat = True
                    break
                if val is None:
                    count += 1
                    unassigned = l
                    if count > 1:
                        break
            if sat or count > 1:
                continue
            if count == 0:
                return False
            assign[abs(unassigned)] = unassigned > 0
            trail.append(abs(unassigned))
            queue.append(abs(unassigned))
    return True


def _search(clauses: list, occurs: dict, assign: dict, nvars: int) -> dict | None:
    trail = []
    # initial unit clauses and assumptions
    queue = list(assign)
    for c in clauses:
        if len(c) == 1:
            l = c[0]
            val = _value(l, assign)
            if val is False:
                return None
            if val is None:
                assign[abs(l)] = l > 0
                trail.append(abs(l))
                queue.append(abs(l))
    if not _propagate(clauses, occurs, assign, trail, queue):
        return None
    return _branch(clauses, occurs, assign, nvars)


def _branch(clauses: list, occurs: dict, assign: dict, nvars: int) -> dict | None:
    var = None
    for c in clauses:
        if any(_value(l, assign) is True for l in c):
            continue
        for l in c:
            if abs(l) not in assign:
                var = abs(l)
                break
        if var is not None:
            break
    if var is None:
        # every clause is satisfied (or the formula is empty)
        return dict(assign)
    for choice in (True, False):
        trail = [var]
        assign[var] = choice
        if _propagate(clauses, occurs, assign, trail, [var]):
            out = _branch(clauses, occurs, assign, nvars)
            if out is not None:
                return out
        for v in trail:
            del assign[v]
    return None


def satisfiable(formulas: Iterable[Formula]) -> bool:
    sk = Skeleton()
    for f in formulas:
        sk.assert_formula(f)
    return dpll(sk.clauses, sk.nvars) is not None


def is_tautology(f: Formula) -> bool:
    return not satisfiable([Not(f)])


def iter_atom_models(formulas: Iterable[Formula], project: Iterable[Formula] = ()) -> Iterator[dict]:
    """Enumerate satisfying assignments projected to atoms.

    Yields ``{atom formula: bool}`` over the atoms of ``formulas`` plus the
    extra ``project`` atoms; distinct yields differ on some projected atom.
    """
    sk = Skeleton()
    for f in formulas:
        sk.assert_formula(f)
    for f in project:
        sk.atom(f)
    atom_vars = sorted(sk.atom_formula)
    clauses = list(sk.clauses)
    while True:
        model = dpll(clauses, sk.nvars)
        if model is None:
            return
        proj = {v: model.get(v, False) for v in atom_vars}
        yield {sk.atom_formula[v]: val for v, val in proj.items()}
        if not atom_vars:
            return
        clauses.append(tuple(-v if val else v for v, val in proj.items()))
