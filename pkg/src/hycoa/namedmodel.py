"""ABox labels, pastedness, saturation and bounded named-model search.

Search strategy
---------------
Types are the propositional models of the closure atoms that satisfy the
TBox and the pure-axiom instances over the problem's nominals.  Types are
pruned by elimination: a type survives only if its one-step problem is
satisfiable over the surviving types (quotiented by the argument
extensions, which is exact by naturality) and its @-formulas are backed by
a surviving type for the relevant nominal.  Every type realised in any
model survives, so an empty result refutes the problem outright.

Surviving configurations are then turned into models, in three tiers:
(a) one state per surviving type, shrunk to the witnesses actually used;
(b) the same with extra copies of unnamed types, with pure axioms that only
talk about one transition step compiled into the one-step problems;
(c) an exhaustive, budgeted search over type assignments and transition
structures.  Every candidate is re-verified before it is returned; all
states are named (fresh nominals for unnamed ones).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .coalgebra import HybridModel, frame_satisfies_pure, truth_sets
from .errors import ConfigError, ResourceBound, UnboundedOperator, UnboundNominal
from .functors import DEFAULT_BOUNDS, Functor, SearchBounds
from .onestep import UNSAT, OneStepProblem, holds_one_step, one_step_sat, solve_literals
from .rules import RuleSet
from .syntax import (
    TOP,
    And,
    At,
    Down,
    Formula,
    Iff,
    Modal,
    Nom,
    Not,
    Prop,
    SimilarityType,
    Substitution,
    Top,
    all_nominals,
    canonical,
    disj,
    free_nominals,
    free_nominals_of,
    fresh_nominal,
    fresh_nominals,
    rename_nominal,
    show,
    subformulas,
    substitute,
)


# ---------------------------------------------------------------- ABoxes


@dataclass(frozen=True)
class ABoxLabel:
    """A finite set of @-formulas with per-nominal labels ``K_i``."""

    formulas: frozenset

    def __post_init__(self):
        fs = frozenset(canonical(f) for f in self.formulas)
        for f in fs:
            if not isinstance(f, At):
                raise ValueError(f"ABox members must be @-formulas, got {show(f)}")
        object.__setattr__(self, "formulas", fs)

    @property
    def nominal_index(self) -> dict:
        out = {}
        for f in self.formulas:
            out.setdefault(f.nom, set()).add(f.arg)
        return {i: frozenset(v) for i, v in out.items()}

    def K(self, i: str) -> frozenset:
        return self.nominal_index.get(i, frozenset())

    @property
    def nominals(self) -> frozenset:
        return free_nominals_of(self.formulas)

    def __contains__(self, f: Formula) -> bool:
        return canonical(f) in self.formulas

    def __len__(self):
        return len(self.formulas)

    def union(self, more: Iterable[Formula]) -> "ABoxLabel":
        return ABoxLabel(self.formulas | frozenset(more))


def is_zero_pasted(K: ABoxLabel, closure: Iterable[Formula]) -> bool:
    """Congruence closure: if ``@_j(phi <-> psi)`` for every nominal ``j``,
    then ``@_i(op phi <-> op psi)`` for every ``i`` (with ``op phi`` and
    ``op psi`` ranging over the closure's subformulas)."""
    closure = list(closure)
    noms = sorted(K.nominals | free_nominals_of(closure))
    forms = []
    for f in closure:
        for g in subformulas(f):
            if g not in forms:
                forms.append(g)
    if not noms:
        return True
    equiv = {}

    def equivalent(a, b):
        # only pairs of modal arguments are ever asked for
        if (a, b) not in equiv:
            equiv[a, b] = all(At(j, Iff(a, b)) in K for j in noms)
        return equiv[a, b]

    modals = [g for g in forms if isinstance(g, Modal)]
    for a in modals:
        for b in modals:
            if a.op != b.op or not all(equivalent(x, y) for x, y in zip(a.args, b.args)):
                continue
            target = Iff(a, b)
            for i in noms:
                if At(i, target) not in K:
                    return False
    return True


def _designated_arg(sig: SimilarityType, op: str):
    opdef = sig.resolve(op)
    if opdef is None:
        raise ConfigError(f"operator {op} is not in signature {sig.name}")
    for r, b in enumerate(opdef.bounds):
        if b is not None:
            return r, b
    raise UnboundedOperator(f"operator {op} has no declared bound")


def _disj_leaves(f: Formula) -> list | None:
    """Nominal leaves of a left-nested disjunction ``j1 | ... | jk``."""
    if isinstance(f, Nom):
        return [f.name]
    if isinstance(f, Not) and isinstance(f.arg, And) and isinstance(f.arg.left, Not) \
            and isinstance(f.arg.right, Not) and isinstance(f.arg.right.arg, Nom):
        rest = _disj_leaves(f.arg.left.arg)
        return None if rest is None else rest + [f.arg.right.arg.name]
    return None


@dataclass(frozen=True)
class PasteReport:
    pasted: bool
    obligations: tuple

    def __bool__(self):
        return self.pasted


def is_one_pasted(K: ABoxLabel, sig: SimilarityType, closure: Iterable[Formula] | None = None) -> PasteReport:
    """Every ``@_i op(phi)`` (with ``op phi`` in ``closure`` when given) has
    witnesses ``@_j1 phi .. @_jk phi`` and ``@_i op(j1 | .. | jk)`` in K."""
    allowed = None if closure is None else {canonical(f) for f in closure}
    pending = []
    by_head = {}
    for f in K.formulas:
        if isinstance(f.arg, Modal):
            by_head.setdefault((f.nom, f.arg.op), []).append(f.arg)
    for f in sorted(K.formulas, key=show):
        if not isinstance(f.arg, Modal):
            continue
        if allowed is not None and f.arg not in allowed:
            continue
        r, k = _designated_arg(sig, f.arg.op)
        phi = f.arg.args[r]
        leaves = _disj_leaves(phi)
        if leaves is not None and len(leaves) <= k:
            # witnessed by its own nominals, since @_j j always holds
            continue
        ok = False
        for cand in by_head.get((f.nom, f.arg.op), []):
            if cand.args[:r] != f.arg.args[:r] or cand.args[r + 1:] != f.arg.args[r + 1:]:
                continue
            leaves = _disj_leaves(cand.args[r])
            if leaves is None or len(leaves) != k:
                continue
            if all(At(j, phi) in K for j in leaves):
                ok = True
                break
        if not ok:
            pending.append(f)
    return PasteReport(not pending, tuple(pending))


def saturate(K: ABoxLabel, sig: SimilarityType, bounds: SearchBounds = DEFAULT_BOUNDS,
             closure: Iterable[Formula] | None = None, budget: int | None = None) -> ABoxLabel:
    """Discharge Paste obligations with fresh witnesses.

    Obligations are restricted to ``closure`` (default: the modal formulas
    of the seed), so witness formulas ``@_i op(j1 | ..)`` raise none.
    ``budget`` (default ``bounds.max_states``) caps the fresh nominals.
    """
    if closure is None:
        closure = [f.arg for f in K.formulas if isinstance(f.arg, Modal)]
    closure = list(closure)
    budget = bounds.max_states if budget is None else budget
    used = 0
    out = K
    while True:
        rep = is_one_pasted(out, sig, closure)
        if rep.pasted:
            return out
        f = rep.obligations[0]
        r, k = _designated_arg(sig, f.arg.op)
        if used + k > budget:
            raise ResourceBound(f"saturation needs more than {budget} fresh nominals")
        avoid = out.nominals | free_nominals_of(closure)
        js = fresh_nominals(k, avoid)
        used += k
        phi = f.arg.args[r]
        args = f.arg.args[:r] + (disj(Nom(j) for j in js),) + f.arg.args[r + 1:]
        out = out.union([At(j, phi) for j in js] + [At(f.nom, Modal(f.arg.op, args))])


# ---------------------------------------------------------------- problems


def _neg(f: Formula) -> Formula:
    return f.arg if isinstance(f, Not) else Not(f)


def pure_instances(axioms: Iterable[Formula], noms: Iterable[str]) -> list:
    """Instances of pure axioms with their free nominals renamed into ``noms``."""
    noms = sorted(noms)
    out = []
    for ax in axioms:
        fn = sorted(free_nominals(ax))
        if not fn:
            out.append(ax)
            continue
        if not noms:
            continue
        for combo in itertools.product(noms, repeat=len(fn)):
            inst = substitute(ax, Substitution({}, dict(zip(fn, combo))))
            if inst not in out:
                out.append(inst)
    return out


def da_instances(formulas: Iterable[Formula], noms: Iterable[str]) -> list:
    """``@_i((dn j. phi) <-> phi[i/j])`` for every binder subformula and nominal."""
    out = []
    for f in formulas:
        for g in subformulas(f):
            if isinstance(g, Down):
                for i in sorted(noms):
                    inst = At(i, Iff(g, rename_nominal(g.arg, g.nom, i)))
                    if inst not in out:
                        out.append(inst)
    return out


def _atoms_of(f: Formula, acc: list, seen: set) -> None:
    if isinstance(f, Top):
        return
    if isinstance(f, Not):
        _atoms_of(f.arg, acc, seen)
        return
    if isinstance(f, And):
        _atoms_of(f.left, acc, seen)
        _atoms_of(f.right, acc, seen)
        return
    c = canonical(f)
    if c not in seen:
        seen.add(c)
        acc.append(c)
    if isinstance(f, Modal):
        for a in f.args:
            _atoms_of(a, acc, seen)
    elif isinstance(f, (At, Down)):
        _atoms_of(f.arg, acc, seen)


@dataclass
class NamedModelProblem:
    functor: Functor
    sig: SimilarityType
    ruleset: RuleSet | None = None
    axioms: list = field(default_factory=list)
    tbox: list = field(default_factory=list)
    goal: list = field(default_factory=list)
    bounds: SearchBounds = DEFAULT_BOUNDS

    def __post_init__(self):
        self.axioms = list(self.axioms)
        self.tbox = list(self.tbox)
        self.goal = list(self.goal)
        for f in self.axioms + self.tbox + self.goal:
            for g in subformulas(f):
                if isinstance(g, Modal) and not self.functor.supports(g.op):
                    raise ConfigError(f"operator {g.op} is not interpreted by the {self.functor.name} functor")
        present = free_nominals_of(self.tbox + self.goal)
        if len(present) > self.bounds.max_states:
            raise ConfigError(f"{len(present)} nominals but max_states={self.bounds.max_states}")
        # The goal state of a named model carries a nominal of its own; naming
        # it up front lets axiom instances constrain it during elimination.
        self.search_goal = list(self.goal)
        if any(free_nominals(ax) for ax in self.axioms):
            used = set(present)
            for f in self.axioms + self.tbox + self.goal:
                used |= all_nominals(f)
            d = fresh_nominal(used)
            present = present | {d}
            self.search_goal.append(Nom(d))
        self.nominals = tuple(sorted(present))
        self.instances = pure_instances(self.axioms, self.nominals)
        globals_ = self.tbox + self.instances
        self.da = da_instances(globals_ + self.search_goal, self.nominals)
        self.global_formulas = [canonical(f) for f in globals_ + self.da]
        base = []
        for f in self.global_formulas + [canonical(g) for g in self.search_goal]:
            for g in subformulas(f):
                for h in (g, _neg(g)):
                    if h not in base:
                        base.append(h)
        self.base_closure = base
        ext = list(base)
        for i in self.nominals:
            for g in base:
                if isinstance(g, Not) and isinstance(g.arg, At):
                    continue
                for h in (At(i, g), Not(At(i, g))):
                    h = canonical(h)
                    if h not in ext:
                        ext.append(h)
        self.closure = ext

    @property
    def all_nominals(self) -> frozenset:
        out = set()
        for f in self.closure + self.axioms:
            out |= all_nominals(f)
        return frozenset(out)


# ---------------------------------------------------------------- type space


class _TypeSpace:
    """All closure-atom assignments consistent with the global formulas."""

    MAX_ATOMS = 22

    def __init__(self, prob: NamedModelProblem):
        self.prob = prob
        atoms, seen = [], set()
        for f in prob.base_closure:
            _atoms_of(f, atoms, seen)
        for i in prob.nominals:
            if Nom(i) not in seen:
                seen.add(Nom(i))
                atoms.append(Nom(i))
        self.atoms = atoms
        n = len(atoms)
        if n > self.MAX_ATOMS:
            raise ResourceBound(f"{n} closure atoms exceed the type-space limit of {self.MAX_ATOMS}")
        if 2 ** n > max(prob.bounds.max_enum, 1 << 16) * 64:
            raise ResourceBound(f"2^{n} candidate types exceed the enumeration limit")
        rows = np.arange(2 ** n, dtype=np.int64)
        self._cols = {a: ((rows >> k) & 1).astype(bool) for k, a in enumerate(atoms)}
        self.T = 2 ** n
        self._memo = {}
        ok = np.ones(self.T, dtype=bool)
        for g in prob.global_formulas:
            ok &= self.val(g)
        # a type naming a nominal must satisfy every @-atom of that nominal
        for a in atoms:
            if isinstance(a, At) and Nom(a.nom) in self._cols:
                ok &= ~self._cols[Nom(a.nom)] | (self._cols[a] == self.val(a.arg))
        idx = np.nonzero(ok)[0]
        if len(idx) > max(prob.bounds.max_enum, 1 << 16):
            raise ResourceBound(f"{len(idx)} types exceed the enumeration limit")
        self._cols = {a: c[idx] for a, c in self._cols.items()}
        self.T = len(idx)
        self.rows = rows[idx]
        self._memo = {}
        self.modal_atoms = [a for a in atoms if isinstance(a, Modal)]
        self.at_atoms = [a for a in atoms if isinstance(a, At)]
        self.arg_formulas = []
        for a in self.modal_atoms:
            for x in a.args:
                x = canonical(x)
                if x not in self.arg_formulas:
                    self.arg_formulas.append(x)
        self.argvals = np.array([self.val(x) for x in self.arg_formulas], dtype=bool).reshape(len(self.arg_formulas), self.T)
        self.modvals = np.array([self.val(a) for a in self.modal_atoms], dtype=bool).reshape(len(self.modal_atoms), self.T)
        self.gsig = np.zeros(self.T, dtype=np.int64)
        for k, a in enumerate(self.at_atoms):
            self.gsig |= self.val(a).astype(np.int64) << k
        self.nomcols = {i: self.val(Nom(i)) for i in prob.nominals}
        any_nom = np.zeros(self.T, dtype=bool)
        for c in self.nomcols.values():
            any_nom |= c
        self.any_nom = any_nom
        goal = np.ones(self.T, dtype=bool)
        for g in prob.search_goal:
            goal &= self.val(canonical(g))
        self.goal = goal
        self.local_axioms = [ax for ax in prob.axioms if _is_local_axiom(ax)]
        # one-step verdicts keyed by cell structure and literal polarities
        self.cache = {}

    def val(self, f: Formula) -> np.ndarray:
        hit = self._memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Top):
            out = np.ones(self.T, dtype=bool)
        elif isinstance(f, Not):
            out = ~self.val(f.arg)
        elif isinstance(f, And):
            out = self.val(f.left) & self.val(f.right)
        else:
            c = canonical(f)
            if c not in self._cols:
                raise KeyError(f"{show(f)} is not a closure atom")
            out = self._cols[c]
        self._memo[f] = out
        return out

    def holds(self, f: Formula, t: int) -> bool:
        return bool(self.val(canonical(f))[t])


class _Budget:
    def __init__(self, n: int):
        self.left = n

    def tick(self, what: str = "search"):
        self.left -= 1
        if self.left < 0:
            raise ResourceBound(f"{what} node budget exhausted")


def _eliminate(ts: _TypeSpace, alive: np.ndarray, forced: Iterable[int], budget: _Budget, stats: dict):
    """Greatest fixpoint of the survival conditions inside ``alive``.

    Returns the surviving mask, or ``None`` if a forced type dies.
    """
    prob = ts.prob
    alive = alive.copy()
    forced = list(forced)
    cache = ts.cache
    while True:
        budget.tick("elimination")
        changed = False
        for g in np.unique(ts.gsig[alive]):
            members = alive & (ts.gsig == g)
            dead = False
            for i, col in ts.nomcols.items():
                if not (members & col).any():
                    dead = True
                    break
            if not dead:
                for a in ts.at_atoms:
                    gval = bool(ts.val(a)[np.argmax(members)])
                    ok = members & ts.nomcols.get(a.nom, np.zeros(ts.T, dtype=bool)) & (ts.val(a.arg) == gval)
                    if not ok.any():
                        dead = True
                        break
            if dead:
                alive &= ~members
                changed = True
                continue
            idx = np.nonzero(members)[0]
            if not ts.modal_atoms:
                continue
            argm = ts.argvals[:, idx]
            cells, cell_of = np.unique(argm.T, axis=0, return_inverse=True)
            cell_of = cell_of.reshape(-1)
            Q = frozenset(range(len(cells)))
            arg_sets = [frozenset(np.nonzero(cells[:, r])[0].tolist()) for r in range(len(ts.arg_formulas))]
            sigs, sig_of = np.unique(ts.modvals[:, idx].T, axis=0, return_inverse=True)
            sig_of = sig_of.reshape(-1)
            for s_idx, sig in enumerate(sigs):
                key = (cells.tobytes(), cells.shape, sig.tobytes())
                res = cache.get(key)
                if res is None:
                    lits = []
                    for a, pol in zip(ts.modal_atoms, sig):
                        lits.append((a.op, tuple(arg_sets[ts.arg_formulas.index(canonical(x))] for x in a.args), bool(pol)))
                    stats["onestep"] = stats.get("onestep", 0) + 1
                    try:
                        res = solve_literals(prob.functor, Q, lits, prob.bounds) is not None
                    except ResourceBound:
                        # undecided: keep the type (over-approximation stays sound)
                        stats["undecided"] = stats.get("undecided", 0) + 1
                        res = True
                    cache[key] = res
                if not res:
                    kill = idx[sig_of == s_idx]
                    alive[kill] = False
                    changed = True
            if ts.local_axioms:
                # a state also satisfies the local axiom instances that name
                # the state itself; split it off its cell to check them
                combo = np.concatenate([ts.modvals[:, idx], ts.argvals[:, idx]]).T
                keys, key_of = np.unique(combo, axis=0, return_inverse=True)
                key_of = key_of.reshape(-1)
                for k_idx, row in enumerate(keys):
                    sig, argvec = row[:len(ts.modal_atoms)], row[len(ts.modal_atoms):]
                    key = ("self", cells.tobytes(), cells.shape, row.tobytes())
                    res = cache.get(key)
                    if res is None:
                        stats["onestep"] = stats.get("onestep", 0) + 1
                        try:
                            res = _self_check(ts, len(cells), arg_sets, sig, argvec)
                        except ResourceBound:
                            stats["undecided"] = stats.get("undecided", 0) + 1
                            res = True
                        cache[key] = res
                    if not res:
                        kill = idx[key_of == k_idx]
                        if alive[kill].any():
                            alive[kill] = False
                            changed = True
        if any(not alive[t] for t in forced):
            return None
        if not changed:
            return alive


# ---------------------------------------------------------------- search results


@dataclass
class SearchResult:
    status: str
    model: HybridModel | None = None
    designated: object = None
    labels: dict | None = None
    tier: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.status == "sat"


EXHAUSTED = "exhausted"


def _is_local_axiom(ax: Formula) -> bool:
    """Depth-one pure axiom without @ or binders: its instances at a state
    only constrain that state's transition."""

    def flat(f):
        if isinstance(f, (Top, Nom)):
            return True
        if isinstance(f, Not):
            return flat(f.arg)
        if isinstance(f, And):
            return flat(f.left) and flat(f.right)
        return False

    def top(f):
        if isinstance(f, (Top, Nom)):
            return True
        if isinstance(f, Not):
            return top(f.arg)
        if isinstance(f, And):
            return top(f.left) and top(f.right)
        if isinstance(f, Modal):
            return all(flat(a) for a in f.args)
        return False

    return top(ax)


def _local_constraints(ax: Formula, state, states: list) -> list:
    """One-step formulas (with their tau) for all instances of ``ax`` at ``state``."""
    noms = sorted(free_nominals(ax))
    out = []
    for combo in itertools.product(states, repeat=len(noms)):
        asg = dict(zip(noms, combo))
        tau = {}

        def tr(f, inside):
            if isinstance(f, Top):
                return f
            if isinstance(f, Nom):
                if inside:
                    v = f"_n{noms.index(f.name)}"
                    tau[v] = frozenset([asg[f.name]])
                    return Prop(v)
                return TOP if asg[f.name] == state else Not(TOP)
            if isinstance(f, Not):
                return Not(tr(f.arg, inside))
            if isinstance(f, And):
                return And(tr(f.left, inside), tr(f.right, inside))
            if isinstance(f, Modal):
                return Modal(f.op, tuple(tr(a, True) for a in f.args))
            raise ValueError(show(f))

        out.append((tr(ax, False), tau))
    return out


def _add_local(Xi: list, tau: dict, axioms: list, state, states: list) -> None:
    """Append the instances of local ``axioms`` at ``state`` to a one-step problem."""
    for ax in axioms:
        for f, tau2 in _local_constraints(ax, state, states):
            fresh = {}
            for v, S in sorted(tau2.items()):
                w = f"_l{len(tau)}"
                fresh[v] = w
                tau[w] = S
            Xi.append(substitute(f, Substitution({v: Prop(w) for v, w in fresh.items()}, {})))


def _self_check(ts: "_TypeSpace", ncells: int, arg_sets: list, sig, argvec) -> bool:
    me = ncells
    X = frozenset(range(ncells + 1))
    tau = {f"_a{r}": (S | {me}) if argvec[r] else S for r, S in enumerate(arg_sets)}
    Xi = []
    for a, pol in zip(ts.modal_atoms, sig):
        lit = Modal(a.op, tuple(Prop(f"_a{ts.arg_formulas.index(canonical(x))}") for x in a.args))
        Xi.append(lit if pol else Not(lit))
    _add_local(Xi, tau, ts.local_axioms, me, [me])
    return one_step_sat(OneStepProblem(X, tau, Xi), ts.prob.functor, ts.prob.bounds) is not UNSAT


class _Builder:
    def __init__(self, prob: NamedModelProblem, ts: _TypeSpace, budget: _Budget, stats: dict):
        self.prob = prob
        self.ts = ts
        self.budget = budget
        self.stats = stats
        self.local_axioms = [ax for ax in prob.axioms if _is_local_axiom(ax)]
        self.global_axioms = [ax for ax in prob.axioms if not _is_local_axiom(ax)]
        self.has_down = any(isinstance(g, Down) for f in prob.base_closure for g in subformulas(f))

    # -- one-step problems over concrete state lists

    def problem_for(self, state_types: list, s: int, extra_local: bool) -> OneStepProblem:
        ts = self.ts
        X = frozenset(range(len(state_types)))
        tau = {}
        names = {}
        for r, x in enumerate(ts.arg_formulas):
            v = f"_a{r}"
            names[x] = v
            tau[v] = frozenset(k for k, t in enumerate(state_types) if ts.val(x)[t])
        Xi = []
        t = state_types[s]
        for a in ts.modal_atoms:
            lit = Modal(a.op, tuple(Prop(names[canonical(x)]) for x in a.args))
            Xi.append(lit if ts.val(a)[t] else Not(lit))
        if extra_local:
            _add_local(Xi, tau, self.local_axioms, s, sorted(X))
        return OneStepProblem(X, tau, Xi)

    def solve_all(self, state_types: list, extra_local: bool):
        gamma = {}
        for s in range(len(state_types)):
            self.budget.tick("construction")
            res = one_step_sat(self.problem_for(state_types, s, extra_local), self.prob.functor, self.prob.bounds)
            if res is UNSAT:
                return None
            gamma[s] = res.witness
        return gamma

    # -- witness supports on the quotient, used to shrink the X-model

    def needed_cells(self, alive_idx: np.ndarray, t: int, prefer: set):
        ts = self.ts
        argm = ts.argvals[:, alive_idx]
        cells, cell_of = np.unique(argm.T, axis=0, return_inverse=True)
        cell_of = cell_of.reshape(-1)
        Q = frozenset(range(len(cells)))
        arg_sets = [frozenset(np.nonzero(cells[:, r])[0].tolist()) for r in range(len(ts.arg_formulas))]
        lits = []
        for a in ts.modal_atoms:
            lits.append((a.op, tuple(arg_sets[ts.arg_formulas.index(canonical(x))] for x in a.args), bool(ts.val(a)[t])))
        preferred_cells = {int(cell_of[k]) for k, u in enumerate(alive_idx) if u in prefer}
        name = self.prob.functor.name
        if name == "kripke":
            allowed = Q
            hits = []
            for op, (A,), pol in lits:
                if op == "box":
                    if pol:
                        allowed &= A
                    else:
                        hits.append(Q - A)
                else:
                    if pol:
                        hits.append(A)
                    else:
                        allowed &= Q - A
            chosen = set()
            for H in hits:
                opts = allowed & H
                if not opts:
                    return None, cell_of
                if opts & chosen:
                    continue
                pref = opts & preferred_cells
                chosen.add(min(pref) if pref else min(opts))
            return chosen, cell_of
        if name == "multigraph":
            w = solve_literals(self.prob.functor, Q, lits, self.prob.bounds)
            if w is None:
                return None, cell_of
            return set(w.support()), cell_of
        if not lits:
            return set(), cell_of
        return set(Q), cell_of

    def shrink(self, alive: np.ndarray, required: list) -> list:
        ts = self.ts
        alive_idx = np.nonzero(alive)[0]
        chosen = list(dict.fromkeys(required))
        queue = list(chosen)
        while queue:
            self.budget.tick("shrink")
            t = queue.pop(0)
            cells, cell_of = self.needed_cells(alive_idx, t, set(chosen))
            if cells is None:
                return list(alive_idx)
            for c in sorted(cells):
                members = [int(u) for k, u in enumerate(alive_idx) if cell_of[k] == c]
                if any(u in chosen for u in members):
                    continue
                pick = next((u for u in members if not ts.any_nom[u]), members[0])
                chosen.append(pick)
                queue.append(pick)
        return chosen

    # -- assembling and verifying

    def assemble(self, state_types: list, gamma: dict, sigma: dict):
        prob = self.prob
        ts = self.ts
        n = len(state_types)
        names = [f"s{k}" for k in range(n)]
        noms = {}
        for i, t in sigma.items():
            noms[i] = names[state_types.index(t)]
        unnamed = [k for k in range(n) if names[k] not in noms.values()]
        for k, j in zip(unnamed, fresh_nominals(len(unnamed), prob.all_nominals)):
            noms[j] = names[k]
        ren = dict(enumerate(names))
        g2 = {names[k]: prob.functor.map(ren, gamma[k], names) for k in range(n)}
        props = {}
        for a in ts.atoms:
            if isinstance(a, Prop):
                props[a.name] = frozenset(names[k] for k, t in enumerate(state_types) if ts.val(a)[t])
        model = HybridModel(prob.functor, tuple(names), g2, props, noms)
        labels = {}
        for k, t in enumerate(state_types):
            lab = set()
            for f in prob.closure:
                if self.label_value(f, t, sigma):
                    lab.add(f)
            labels[names[k]] = frozenset(lab)
        designated = next(names[k] for k, t in enumerate(state_types) if ts.goal[t])
        return model, designated, labels

    def label_value(self, f: Formula, t: int, sigma: dict) -> bool:
        ts = self.ts
        try:
            return bool(ts.val(f)[t])
        except KeyError:
            pass
        if isinstance(f, Not):
            return not self.label_value(f.arg, t, sigma)
        if isinstance(f, At) and f.nom in sigma:
            return self.label_value(f.arg, sigma[f.nom], sigma)
        raise KeyError(show(f))

    def try_states(self, state_types: list, sigma: dict, tier: str, extra_local: bool):
        if len(state_types) > self.prob.bounds.max_states:
            self.stats["too_big"] = self.stats.get("too_big", 0) + 1
            return None
        gamma = self.solve_all(state_types, extra_local)
        if gamma is None:
            return None
        model, designated, labels = self.assemble(state_types, gamma, sigma)
        rep = verify_named_model(model, designated, self.prob, labels)
        if rep.ok:
            return SearchResult("sat", model, designated, labels, tier, self.stats)
        self.stats.setdefault("rejected", []).append(rep.failures[:3])
        return None

    def build(self, alive: np.ndarray, sigma: dict):
        ts = self.ts
        goal_types = [int(t) for t in np.nonzero(alive & ts.goal)[0]]
        named = list(dict.fromkeys(sigma.values()))
        # (a) one state per needed type
        for t0 in goal_types[:4]:
            required = named + ([t0] if t0 not in named else [])
            states = self.shrink(alive, required)
            res = self.try_states(states, sigma, "a", bool(self.local_axioms))
            if res:
                return res
            # (b) extra copies of unnamed types
            unnamed = [t for t in states if t not in named]
            for m in range(2, 4):
                if not unnamed or len(named) + m * len(unnamed) > self.prob.bounds.max_states:
                    break
                res = self.try_states(named + unnamed * m, sigma, "b", bool(self.local_axioms))
                if res:
                    return res
        return None

    def exhaustive(self, alive: np.ndarray, sigma: dict):
        """Tier (c): every type assignment and transition structure within bounds."""
        ts = self.ts
        prob = self.prob
        named = list(dict.fromkeys(sigma.values()))
        pool = [int(t) for t in np.nonzero(alive & ~ts.any_nom)[0]]
        for n in range(len(named), prob.bounds.max_states + 1):
            for extra in itertools.combinations_with_replacement(pool, n - len(named)):
                state_types = named + list(extra)
                if not any(ts.goal[t] for t in state_types):
                    continue
                self.budget.tick("exhaustive")
                X = frozenset(range(n))
                options = []
                for s in range(n):
                    p = self.problem_for(state_types, s, bool(self.local_axioms))
                    opts = []
                    for el in prob.functor.enumerate(X, prob.bounds):
                        self.budget.tick("exhaustive")
                        if all(holds_one_step(prob.functor, el, f, p.tau, X) for f in p.Xi):
                            opts.append(el)
                    if not opts:
                        break
                    options.append(opts)
                else:
                    for combo in itertools.product(*options):
                        self.budget.tick("exhaustive")
                        gamma = dict(enumerate(combo))
                        model, designated, labels = self.assemble(state_types, gamma, sigma)
                        if verify_named_model(model, designated, prob, labels).ok:
                            return SearchResult("sat", model, designated, labels, "c", self.stats)
        return None


def _choices(ts: _TypeSpace, alive: np.ndarray, budget: _Budget, stats: dict):
    """Yield ``(alive, sigma)`` for nominal-type choices that survive elimination."""
    noms = list(ts.prob.nominals)
    groups = [int(g) for g in np.unique(ts.gsig[alive & ts.goal])]
    for g in groups:
        base = alive & (ts.gsig == g)

        def rec(k, sigma, cur):
            if k == len(noms):
                yield cur, dict(sigma)
                return
            i = noms[k]
            if i in sigma:
                yield from rec(k + 1, sigma, cur)
                return
            for t in np.nonzero(cur & ts.nomcols[i])[0]:
                t = int(t)
                clash = False
                new = dict(sigma)
                for j in noms:
                    if ts.nomcols[j][t]:
                        if j in new and new[j] != t:
                            clash = True
                            break
                        new[j] = t
                if clash:
                    continue
                keep = cur.copy()
                for j, tj in new.items():
                    keep &= ~ts.nomcols[j] | (np.arange(ts.T) == tj)
                stats["choices"] = stats.get("choices", 0) + 1
                nxt = _eliminate(ts, keep, list(new.values()), budget, stats)
                if nxt is None or not (nxt & ts.goal).any():
                    continue
                yield from rec(k + 1, new, nxt)

        start = _eliminate(ts, base, [], budget, stats)
        if start is None or not (start & ts.goal).any():
            continue
        yield from rec(0, {}, start)


def named_model_search(prob: NamedModelProblem) -> SearchResult:
    """Search for a named model of the goal (locally) and TBox (globally).

    Returns a ``sat`` result with a verified model, or status ``exhausted``
    when no model exists within the bounds; raises :class:`ResourceBound`
    when a budget runs out first.
    """
    stats = {}
    budget = _Budget(prob.bounds.max_nodes)
    ts = _TypeSpace(prob)
    stats["types"] = ts.T
    alive = np.ones(ts.T, dtype=bool)
    alive = _eliminate(ts, alive, [], budget, stats)
    if alive is None or not (alive & ts.goal).any():
        return SearchResult(EXHAUSTED, stats=stats)
    builder = _Builder(prob, ts, budget, stats)
    pending = []
    for cur, sigma in _choices(ts, alive, budget, stats):
        res = builder.build(cur, sigma)
        if res:
            return res
        pending.append((cur, sigma))
    for cur, sigma in pending:
        res = builder.exhaustive(cur, sigma)
        if res:
            return res
    # every surviving configuration was searched exhaustively within bounds
    return SearchResult(EXHAUSTED, stats=stats)


# ---------------------------------------------------------------- verification


@dataclass
class CheckReport:
    goal: bool = True
    tbox: bool = True
    frame: bool = True
    truth_lemma: bool = True
    named: bool = True
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.goal and self.tbox and self.frame and self.truth_lemma and self.named


def verify_named_model(model: HybridModel, designated, prob: NamedModelProblem, labels: dict | None = None) -> CheckReport:
    """Re-check a model using only the satisfaction relation.

    (a) goal at ``designated``; (b) TBox globally; (c) pure axioms as frame
    conditions; (d) ``labels`` (when given) agree with satisfaction on the
    closure; plus: every state is named.
    """
    rep = CheckReport()
    formulas = [canonical(g) for g in prob.goal] + list(prob.tbox)
    if labels is not None:
        formulas += list(prob.closure)
    try:
        ext = truth_sets(model, formulas)
    except UnboundNominal as e:
        rep.goal = rep.tbox = rep.truth_lemma = False
        rep.failures.append(f"(a/b/d) {e}")
        ext = None
    if ext is None:
        fr = frame_satisfies_pure(model.functor, model.states, model.gamma, prob.axioms)
        rep.frame = fr.holds
        return rep
    for g in prob.goal:
        if designated not in ext[canonical(g)]:
            rep.goal = False
            rep.failures.append(f"(a) goal {show(g)} fails at {designated}")
    C = model.carrier
    for f in prob.tbox:
        if ext[f] != C:
            rep.tbox = False
            rep.failures.append(f"(b) tbox {show(f)} fails at {sorted(map(str, C - ext[f]))}")
    fr = frame_satisfies_pure(model.functor, model.states, model.gamma, prob.axioms)
    if not fr.holds:
        rep.frame = False
        rep.failures.append(f"(c) {fr.failure.describe()}")
    if labels is not None:
        for s in model.states:
            lab = labels.get(s)
            if lab is None:
                rep.truth_lemma = False
                rep.failures.append(f"(d) no label for {s}")
                continue
            for f in prob.closure:
                if (s in ext[f]) != (f in lab):
                    rep.truth_lemma = False
                    rep.failures.append(f"(d) {show(f)} at {s}: satisfied={s in ext[f]} labelled={f in lab}")
                    break
    denoted = set(model.noms.values())
    if denoted != set(model.states):
        rep.named = False
        rep.failures.append(f"named: states {sorted(map(str, set(model.states) - denoted))} have no nominal")
    return rep


def model_abox(model: HybridModel, formulas: Iterable[Formula]) -> ABoxLabel:
    """``{@_i phi | M, V(i) |= phi}`` for the given formulas and all nominals."""
    formulas = list(formulas)
    ext = truth_sets(model, formulas)
    out = []
    for i, s in sorted(model.noms.items()):
        for f in formulas:
            if s in ext[f]:
                out.append(At(i, f))
    return ABoxLabel(frozenset(out))


__all__ = [
    "ABoxLabel",
    "PasteReport",
    "is_zero_pasted",
    "is_one_pasted",
    "saturate",
    "NamedModelProblem",
    "SearchResult",
    "EXHAUSTED",
    "named_model_search",
    "verify_named_model",
    "CheckReport",
    "model_abox",
    "pure_instances",
    "da_instances",
]
