"""One-step satisfiability and one-step consistency.

A one-step problem fixes a finite base set ``X``, a valuation ``tau`` of
propositional variables as subsets of ``X`` and a finite set ``Xi`` of
one-layer modal formulas.  It is satisfiable when a single element of
``TX`` satisfies all of ``Xi``.

``one_step_sat`` enumerates the propositional models of ``Xi`` over its
modal atoms and hands each resulting literal set to a solver for the
functor at hand.  Solvers for Kripke, multigraph, neighbourhood, monotone
and selection structures are exact; the game solver is bounded by
``max_strategies`` and reports :class:`ResourceBound` rather than
unsatisfiability when it gives up.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .errors import ResourceBound
from .functors import (
    DEFAULT_BOUNDS,
    Functor,
    Game,
    Multiset,
    SearchBounds,
    Selection,
    powerset,
    upward_closure,
)
from .prop import iter_atom_models, satisfiable
from .rules import OneStepRule, RuleSet, is_one_step, modal_atoms
from .syntax import (
    BOT,
    GRADED_RE,
    PRESBURGER_RE,
    TOP,
    And,
    Formula,
    Modal,
    Not,
    Prop,
    Top,
    conj,
    disj,
    parse_presburger,
    prop_vars,
    show,
    substitute,
    Substitution,
)


@dataclass(frozen=True)
class OneStepProblem:
    X: frozenset
    tau: dict
    Xi: tuple

    def __post_init__(self):
        object.__setattr__(self, "X", frozenset(self.X))
        object.__setattr__(self, "tau", {p: frozenset(v) for p, v in self.tau.items()})
        object.__setattr__(self, "Xi", tuple(self.Xi))
        for f in self.Xi:
            if not is_one_step(f):
                raise ValueError(f"not a one-step formula: {show(f)}")
            missing = prop_vars(f) - set(self.tau)
            if missing:
                raise ValueError(f"variables without valuation: {sorted(missing)}")
        for p, v in self.tau.items():
            if not v <= self.X:
                raise ValueError(f"tau({p}) leaves the base set")


@dataclass(frozen=True)
class OneStepSolution:
    witness: object


class _Unsat:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "UNSAT"

    def __bool__(self):
        return False


UNSAT = _Unsat()


# ---------------------------------------------------------------- evaluation


def prop_extension(f: Formula, tau: dict, X: frozenset) -> frozenset:
    """``[[f]]_tau`` for a propositional formula."""
    if isinstance(f, Top):
        return X
    if isinstance(f, Prop):
        return tau[f.name]
    if isinstance(f, Not):
        return X - prop_extension(f.arg, tau, X)
    if isinstance(f, And):
        return prop_extension(f.left, tau, X) & prop_extension(f.right, tau, X)
    raise ValueError(f"not propositional: {show(f)}")


def holds_one_step(functor: Functor, t, f: Formula, tau: dict, X: frozenset) -> bool:
    """``t |=_{TX,tau} f`` for a one-step formula."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Not):
        return not holds_one_step(functor, t, f.arg, tau, X)
    if isinstance(f, And):
        return holds_one_step(functor, t, f.left, tau, X) and holds_one_step(functor, t, f.right, tau, X)
    if isinstance(f, Modal):
        return functor.member(f.op, t, tuple(prop_extension(a, tau, X) for a in f.args), X)
    raise ValueError(f"not a one-step formula: {show(f)}")


def verify_witness(p: OneStepProblem, functor: Functor, t) -> bool:
    return functor.is_element(t, p.X) and all(holds_one_step(functor, t, f, p.tau, p.X) for f in p.Xi)


# ---------------------------------------------------------------- literal solvers
#
# A literal is (op, argument sets, polarity).  Each solver returns a TX
# element, None when the literal set is unsatisfiable, or raises
# ResourceBound.


def _hitting(allowed: frozenset, hits: list) -> frozenset | None:
    """Largest subset of ``allowed`` meeting every set in ``hits``."""
    for H in hits:
        if allowed.isdisjoint(H):
            return None
    return allowed


def solve_kripke(X, lits, bounds):
    allowed = X
    hits = []
    for op, (A,), pol in lits:
        if op == "box":
            if pol:
                allowed &= A
            else:
                hits.append(X - A)
        elif op == "dia":
            if pol:
                hits.append(A)
            else:
                allowed &= X - A
        else:
            raise KeyError(op)
    return _hitting(allowed, hits)


def _cells(X: frozenset, sets: Iterable[frozenset]) -> list:
    """Partition ``X`` by membership in each of ``sets``; cells in a fixed order."""
    sets = list(sets)
    groups = {}
    for x in sorted(X, key=str):
        key = tuple(x in S for S in sets)
        groups.setdefault(key, []).append(x)
    return [frozenset(v) for _, v in sorted(groups.items(), key=lambda kv: kv[0], reverse=True)]


def solve_multigraph(X, lits, bounds):
    # Each literal becomes sum_c coeff[c] * m[c] (>= need | <= limit) over cells c.
    sets = []
    for op, args, pol in lits:
        sets.extend(args)
    cells = _cells(X, sets)
    cons = []
    cap = 1
    for op, args, pol in lits:
        m = GRADED_RE.match(op)
        if m:
            k = int(m.group(1))
            coeff = [1 if c <= args[0] else 0 for c in cells]
            cons.append((coeff, k + 1, pol))
            cap = max(cap, k + 1)
        elif PRESBURGER_RE.match(op):
            coeffs, k = parse_presburger(op)
            coeff = [sum(a for a, A in zip(coeffs, args) if c <= A) for c in cells]
            cons.append((coeff, k, pol))
            cap = max(cap, k)
        else:
            raise KeyError(op)
    # positive: sum >= thr;  negative: sum <= thr - 1
    n = len(cells)
    masses = [0] * n
    budget = [bounds.max_nodes]

    def feasible(upto: int) -> bool:
        for coeff, thr, pol in cons:
            done = sum(coeff[c] * masses[c] for c in range(upto))
            if pol:
                rest = sum(coeff[c] for c in range(upto, n)) * cap
                if done + rest < thr:
                    return False
            elif done > thr - 1:
                return False
        return True

    def rec(idx: int) -> bool:
        budget[0] -= 1
        if budget[0] < 0:
            raise ResourceBound("multigraph one-step search budget exhausted")
        if not feasible(idx):
            return False
        if idx == n:
            return True
        for v in range(cap + 1):
            masses[idx] = v
            if rec(idx + 1):
                return True
        masses[idx] = 0
        return False

    if not rec(0):
        return None
    out = {}
    for c, v in zip(cells, masses):
        if v:
            out[min(c, key=str)] = v
    return Multiset(out)


def solve_neighborhood(X, lits, bounds, monotone=False):
    inside, outside = set(), set()
    for op, (A,), pol in lits:
        if op == "box":
            (inside if pol else outside).add(A)
        elif op == "dia":
            (outside if pol else inside).add(X - A)
        else:
            raise KeyError(op)
    if monotone:
        if any(I <= O for I in inside for O in outside):
            return None
        return upward_closure(inside, X)
    if inside & outside:
        return None
    return frozenset(inside)


def solve_selection(X, lits, bounds):
    per_arg = {}
    for op, (A, B), pol in lits:
        allowed, hits = per_arg.setdefault(A, [X, []])
        if op == "=>":
            if pol:
                per_arg[A][0] = allowed & B
            else:
                hits.append(X - B)
        elif op == ">":
            if pol:
                hits.append(B)
            else:
                per_arg[A][0] = allowed & (X - B)
        else:
            raise KeyError(op)
    table = {}
    for A, (allowed, hits) in per_arg.items():
        val = _hitting(allowed, hits)
        if val is None:
            return None
        table[A] = val
    return Selection.from_table(table)


def _game_refuted(functor, X, lits) -> bool:
    """Sound refutations valid for all strategy-set sizes."""
    agents = range(len(functor.agents))
    pos = [(frozenset(functor.coalition(op)), A) for op, (A,), pol in lits if pol]
    neg = [(frozenset(functor.coalition(op)), A) for op, (A,), pol in lits if not pol]
    full = frozenset(agents)
    for C, A in pos:
        if not A:
            return True
        for D, B in neg:
            # coalition monotonicity: [C]A -> [D]B for C <= D, A <= B
            if C <= D and A <= B:
                return True
        for D, B in pos:
            if C.isdisjoint(D) and A.isdisjoint(B):
                return True
    for C, A in neg:
        if A == X:
            return True
    # not [] ~A  implies  [N] A  (some profile lands in A)
    for C, A in neg:
        if not C:
            for D, B in neg:
                if D == full and (X - A) <= B:
                    return True
    return False


def solve_game(functor, X, lits, bounds):
    if not X:
        return None
    if _game_refuted(functor, X, lits):
        return None
    sets = [A for _, (A,), _ in lits]
    cells = _cells(X, sets)
    reps = [min(c, key=str) for c in cells]
    n = len(functor.agents)
    work = 0
    for sizes in itertools.product(range(1, bounds.max_strategies + 1), repeat=n):
        profiles = 1
        for s in sizes:
            profiles *= s
        for out in itertools.product(reps, repeat=profiles):
            work += 1
            if work > bounds.max_enum:
                raise ResourceBound("game one-step enumeration limit exceeded")
            g = Game(tuple(sizes), tuple(out))
            if all(functor.member(op, g, args, X) == pol for op, args, pol in lits):
                return g
    raise ResourceBound(f"no game structure with at most {bounds.max_strategies} strategies per agent")


def solve_literals(functor: Functor, X: frozenset, lits: list, bounds: SearchBounds = DEFAULT_BOUNDS):
    name = functor.name
    if name == "kripke":
        return solve_kripke(X, lits, bounds)
    if name == "multigraph":
        return solve_multigraph(X, lits, bounds)
    if name == "neighborhood":
        return solve_neighborhood(X, lits, bounds)
    if name == "monotone":
        return solve_neighborhood(X, lits, bounds, monotone=True)
    if name == "selection":
        return solve_selection(X, lits, bounds)
    if name == "game":
        return solve_game(functor, X, lits, bounds)
    raise ValueError(f"no one-step solver for {name}")


# ---------------------------------------------------------------- satisfiability


def literal_sets(p: OneStepProblem) -> Iterable[list]:
    """Literal sets (op, argsets, polarity) from propositional models of Xi."""
    atoms = []
    for f in p.Xi:
        for a in modal_atoms(f):
            if a not in atoms:
                atoms.append(a)
    ext = {a: tuple(prop_extension(x, p.tau, p.X) for x in a.args) for a in atoms}
    seen = set()
    for model in iter_atom_models(p.Xi, atoms):
        lits = {}
        clash = False
        for a in atoms:
            key = (a.op, ext[a])
            pol = model[a]
            if lits.get(key, pol) != pol:
                clash = True
                break
            lits[key] = pol
        if clash:
            continue
        frozen = frozenset(lits.items())
        if frozen in seen:
            continue
        seen.add(frozen)
        yield [(op, args, pol) for (op, args), pol in sorted(lits.items(), key=lambda kv: (kv[0][0], [sorted(map(str, s)) for s in kv[0][1]], kv[1]))]


def one_step_sat(p: OneStepProblem, functor: Functor, bounds: SearchBounds = DEFAULT_BOUNDS):
    """Return a :class:`OneStepSolution` or ``UNSAT``; raise ResourceBound."""
    limited = None
    for lits in literal_sets(p):
        try:
            t = solve_literals(functor, p.X, lits, bounds)
        except ResourceBound as e:
            limited = e
            continue
        if t is None:
            continue
        if not verify_witness(p, functor, t):
            raise AssertionError(f"{functor.name} solver produced an invalid witness")
        return OneStepSolution(t)
    if limited is not None:
        raise limited
    return UNSAT


def naive_one_step_sat(p: OneStepProblem, functor: Functor, bounds: SearchBounds = DEFAULT_BOUNDS):
    """Reference implementation: scan the enumerable fragment of TX."""
    for t in functor.enumerate(p.X, bounds):
        if all(holds_one_step(functor, t, f, p.tau, p.X) for f in p.Xi):
            return OneStepSolution(t)
    return UNSAT


# ---------------------------------------------------------------- consistency


def subalgebra_representatives(tau: dict, X: frozenset) -> dict:
    """One propositional formula per element of the boolean subalgebra of
    P(X) generated by the range of ``tau``: ``{set: formula}``."""
    names = sorted(tau)
    cells = {}
    for x in sorted(X, key=str):
        key = tuple(x in tau[n] for n in names)
        cells.setdefault(key, set()).add(x)
    cell_list = sorted(cells.items(), reverse=True)
    cell_formula = []
    for key, members in cell_list:
        lits = [Prop(n) if b else Not(Prop(n)) for n, b in zip(names, key)]
        cell_formula.append((frozenset(members), conj(lits) if lits else TOP))
    out = {frozenset(): BOT}
    for r in range(1, len(cell_formula) + 1):
        for combo in itertools.combinations(cell_formula, r):
            S = frozenset().union(*(c for c, _ in combo))
            out[S] = TOP if S == X else disj(f for _, f in combo)
    return out


def rule_instances(p: OneStepProblem, rules: RuleSet, bounds: SearchBounds = DEFAULT_BOUNDS) -> list:
    """Conclusions ``psi sigma`` of rule instances whose premise holds under tau.

    ``sigma`` ranges over the subalgebra representatives together with the
    argument formulas occurring in Xi.
    """
    reps = subalgebra_representatives(p.tau, p.X)
    cands = list(reps.values())
    for f in p.Xi:
        for a in modal_atoms(f):
            for x in a.args:
                if x not in cands:
                    cands.append(x)
    ext = [prop_extension(c, p.tau, p.X) for c in cands]
    out = []
    total = 0
    for rule in rules.rules:
        vs = rule.variables
        total += len(cands) ** len(vs)
        if total > bounds.max_enum:
            raise ResourceBound("rule-instance space exceeds enumeration limit")
        for choice in itertools.product(range(len(cands)), repeat=len(vs)):
            tau2 = {v: ext[c] for v, c in zip(vs, choice)}
            if prop_extension(rule.premise, tau2, p.X) != p.X:
                continue
            sigma = Substitution({v: cands[c] for v, c in zip(vs, choice)}, {})
            out.append(substitute(rule.conclusion, sigma))
    return out


def one_step_consistent(p: OneStepProblem, rules: RuleSet, bounds: SearchBounds = DEFAULT_BOUNDS) -> bool:
    return satisfiable(list(p.Xi) + rule_instances(p, rules, bounds))


def verify_one_step_soundness(rule: OneStepRule, functor: Functor, X: Iterable,
                              bounds: SearchBounds = DEFAULT_BOUNDS) -> bool:
    X = frozenset(X)
    vs = rule.variables
    subsets = powerset(sorted(X, key=str))
    elements = list(functor.enumerate(X, bounds))
    for choice in itertools.product(subsets, repeat=len(vs)):
        tau = dict(zip(vs, choice))
        if prop_extension(rule.premise, tau, X) != X:
            continue
        for t in elements:
            if not holds_one_step(functor, t, rule.conclusion, tau, X):
                return False
    return True


@dataclass
class AgreementReport:
    consistent: bool
    satisfiable: bool | None
    witness: object = None
    note: str = ""

    @property
    def agree(self) -> bool:
        return self.satisfiable is not None and self.consistent == self.satisfiable


def agreement_check(p: OneStepProblem, functor: Functor, rules: RuleSet,
                    bounds: SearchBounds = DEFAULT_BOUNDS) -> AgreementReport:
    consistent = one_step_consistent(p, rules, bounds)
    try:
        res = one_step_sat(p, functor, bounds)
    except ResourceBound as e:
        return AgreementReport(consistent, None, None, f"resource bound: {e}")
    if res is UNSAT:
        return AgreementReport(consistent, False)
    return AgreementReport(consistent, True, res.witness)


__all__ = [
    "OneStepProblem",
    "OneStepSolution",
    "UNSAT",
    "one_step_sat",
    "naive_one_step_sat",
    "one_step_consistent",
    "rule_instances",
    "verify_one_step_soundness",
    "agreement_check",
    "AgreementReport",
    "holds_one_step",
    "prop_extension",
    "verify_witness",
    "solve_literals",
    "subalgebra_representatives",
]
