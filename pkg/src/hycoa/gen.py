"""Seeded random generators for formulas, models and corpora."""

from __future__ import annotations

import math
import random
from typing import Iterable

from .coalgebra import HybridModel
from .functors import DEFAULT_BOUNDS, Functor, Game, Multiset, SearchBounds, Selection, powerset, upward_closure
from .syntax import (
    TOP,
    And,
    At,
    Down,
    Formula,
    Modal,
    Nom,
    Not,
    Prop,
    canonical,
    modal_depth,
    show,
)


def random_formula(rng: random.Random, ops: list, props: Iterable[str] = ("p", "q"),
                   noms: Iterable[str] = ("i", "j"), depth: int = 2, size: int = 6,
                   at: bool = True, down: bool = False, bound: tuple = ()) -> Formula:
    """A random formula with modal depth <= ``depth`` and about ``size`` nodes.

    ``ops`` is a list of ``(name, arity)`` pairs.
    """
    props = list(props)
    noms = list(noms)

    def leaf():
        pool = [Prop(p) for p in props] + [Nom(i) for i in noms + list(bound)] + [TOP]
        return rng.choice(pool)

    def gen(d, budget, bnd):
        if budget <= 1:
            f = leaf() if not bnd or rng.random() < 0.7 else Nom(rng.choice(bnd))
            return Not(f) if rng.random() < 0.3 else f
        choices = ["not", "and", "or"]
        if d > 0 and ops:
            choices += ["modal"] * 3
        if at and noms:
            choices.append("at")
        if down and d > 0:
            choices.append("down")
        kind = rng.choice(choices)
        if kind == "not":
            return Not(gen(d, budget - 1, bnd))
        if kind in ("and", "or"):
            k = rng.randint(1, budget - 2) if budget > 2 else 1
            a, b = gen(d, k, bnd), gen(d, max(1, budget - 1 - k), bnd)
            return And(a, b) if kind == "and" else Not(And(Not(a), Not(b)))
        if kind == "modal":
            op, arity = rng.choice(ops)
            per = max(1, (budget - 1) // arity)
            return Modal(op, tuple(gen(d - 1, per, bnd) for _ in range(arity)))
        if kind == "at":
            return At(rng.choice(noms), gen(d, budget - 1, bnd))
        name = f"x{len(bnd)}"
        return Down(name, gen(d, budget - 1, bnd + [name]))

    return gen(depth, size, list(bound))


def kripke_corpus(count: int = 2000, seed: int = 0, max_size: int = 9) -> list:
    """Distinct (up to canonical form) hybrid K formulas with modal depth <= 2,
    at most two propositional variables and two nominals."""
    rng = random.Random(seed)
    ops = [("dia", 1), ("box", 1)]
    seen = set()
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > count * 200:
            raise RuntimeError("corpus generator stalled")
        f = random_formula(rng, ops, depth=2, size=rng.randint(1, max_size))
        if modal_depth(f) > 2:
            continue
        key = show(canonical(f))
        if key in seen:
            continue
        seen.add(key)
        out.append(f)
    return out


def random_model(rng: random.Random, functor: Functor, n: int, props: Iterable[str] = ("p", "q"),
                 noms: Iterable[str] = ("i", "j"), bounds: SearchBounds = DEFAULT_BOUNDS) -> HybridModel:
    """A random model over states ``0..n-1`` with every listed nominal bound."""
    states = tuple(range(n))
    X = frozenset(states)
    gamma = {s: random_element(rng, functor, X, bounds) for s in states}
    val = {p: frozenset(s for s in states if rng.random() < 0.5) for p in props}
    nv = {i: rng.choice(states) for i in noms}
    return HybridModel(functor, states, gamma, val, nv)


def random_element(rng: random.Random, functor: Functor, X: frozenset, bounds: SearchBounds = DEFAULT_BOUNDS):
    """A random element of (the bounded fragment of) ``TX``."""
    X = sorted(X, key=str)
    subsets = powerset(X)

    def rsub():
        return frozenset(x for x in X if rng.random() < 0.5)

    name = functor.name
    if name == "kripke":
        return rsub()
    if name == "multigraph":
        cap = bounds.max_multiplicity
        return Multiset({x: rng.randint(0, cap) for x in X if rng.random() < 0.6})
    if name == "neighborhood":
        return frozenset(A for A in subsets if rng.random() < 0.5)
    if name == "monotone":
        gens = [A for A in subsets if rng.random() < 1.5 / max(1, len(subsets) ** 0.5)]
        return upward_closure(gens, frozenset(X))
    if name == "selection":
        return Selection.from_table({A: rsub() for A in subsets}, rsub())
    if name == "game":
        sizes = tuple(rng.randint(1, bounds.max_strategies) for _ in functor.agents)
        return Game(sizes, tuple(rng.choice(X) for _ in range(math.prod(sizes))))
    raise ValueError(f"no random elements for functor {name!r}")


# ---------------------------------------------------------------- proof scripts


class _ScriptBuilder:
    """Grows a checker-acceptable script from sound building blocks."""

    def __init__(self, rng: random.Random, family: str):
        from .hilbert import ProofScript
        from .rules import graded_rules, k_rules
        from .syntax import GRADED_SIG, K_SIG

        self.rng = rng
        self.family = family
        if family == "K":
            self.script = ProofScript(K_SIG, k_rules())
            self.ops = [("dia", 1), ("box", 1)]
            self.paste_ops = [("dia", 1)]
        elif family == "graded":
            self.script = ProofScript(GRADED_SIG, graded_rules(2))
            self.ops = [(f"<{k}>", 1) for k in range(3)]
            self.paste_ops = [(f"<{k}>", k + 1) for k in range(2)]
        else:
            raise ValueError(family)
        self.noms = ["i", "j"]
        self.global_lines = []

    def formula(self, size: int = 4, depth: int = 1, bound: tuple = ()) -> Formula:
        return random_formula(self.rng, self.ops, ("p", "q"), self.noms, depth=depth, size=size, bound=bound)

    def add(self, f: Formula, just) -> int:
        n = self.script.add(f, just)
        self.global_lines.append(n)
        return n

    def line(self, n: int) -> Formula:
        return self.script.lines[n - 1].formula

    def pick(self) -> int:
        if not self.global_lines:
            self.step_taut()
        return self.rng.choice(self.global_lines)

    def fresh(self, count: int, avoid: Iterable[Formula]) -> list:
        from .syntax import all_nominals, fresh_nominals

        used = set(self.noms)
        for f in avoid:
            used |= all_nominals(f)
        for ln in self.script.lines:
            used |= all_nominals(ln.formula)
        return fresh_nominals(count, used)

    # -- steps

    def step_taut(self) -> int:
        from .syntax import Iff, Implies, Or

        a, b = self.formula(), self.formula()
        schema = self.rng.choice([
            lambda: Implies(a, a),
            lambda: Implies(a, Implies(b, a)),
            lambda: Implies(And(a, b), a),
            lambda: Or(a, Not(a)),
            lambda: Iff(a, Not(Not(a))),
            lambda: Implies(And(Implies(a, b), a), b),
        ])
        from .hilbert import Taut

        return self.add(schema(), Taut())

    def step_axiom(self) -> int:
        from .hilbert import AXIOMS, AxiomInstance, axiom_scheme
        from .syntax import Substitution, substitute

        names = sorted(AXIOMS) + [f"mob:{op}" for op, _ in self.ops]
        name = self.rng.choice(names)
        scheme = axiom_scheme(name, self.script.sig)
        props = {v: self.formula(3) for v in ("p", "q", "q1")}
        noms = {v: self.rng.choice(self.noms) for v in ("i", "j")}
        sigma = Substitution(props, noms)
        return self.add(substitute(scheme, sigma), AxiomInstance(name, sigma))

    def step_mp(self) -> int:
        from .hilbert import MP, Taut
        from .syntax import Implies, Or

        n1 = self.pick()
        a = self.line(n1)
        c = self.formula(3)
        b = self.rng.choice([Or(a, c), Implies(c, a), Or(c, a)])
        n2 = self.add(Implies(a, b), Taut())
        return self.add(b, MP(n1, n2))

    def step_atgen(self) -> int:
        from .hilbert import AtGen

        n = self.pick()
        i = self.rng.choice(self.noms)
        return self.add(At(i, self.line(n)), AtGen(n, i))

    def step_rule(self) -> int:
        from .hilbert import RuleInstance, Taut
        from .syntax import Substitution, substitute

        rs = self.script.ruleset
        idx = self.rng.randrange(len(rs.rules))
        rule = rs.rules[idx]
        # choose formulas for the rule variables so that the premise is a tautology
        # or an existing line
        if rule.name == "nec":
            n = self.pick()
            sigma = Substitution({"a": self.line(n)}, {})
        else:
            for _ in range(50):
                sigma = Substitution({v: self.formula(3) for v in rule.variables}, {})
                prem = substitute(rule.premise, sigma)
                from .prop import is_tautology

                if is_tautology(prem):
                    break
            else:
                return self.step_taut()
            n = self.add(prem, Taut())
        return self.add(substitute(rule.conclusion, sigma), RuleInstance(idx, sigma, n))

    def step_name(self) -> int:
        from .hilbert import MP, Name, Taut
        from .syntax import Implies

        n = self.pick()
        phi = self.line(n)
        (j,) = self.fresh(1, [phi])
        n2 = self.add(Implies(phi, Implies(Nom(j), phi)), Taut())
        n3 = self.add(Implies(Nom(j), phi), MP(n, n2))
        return self.add(phi, Name(n3, j))

    def step_paste(self) -> int:
        from .hilbert import MP, PasteOp, Taut
        from .syntax import Implies, conj, disj

        n = self.pick()
        psi = self.line(n)
        op, k = self.rng.choice(self.paste_ops)
        phi = self.formula(3, depth=0)
        i = self.rng.choice(self.noms)
        js = self.fresh(k, [psi, phi])
        body = conj([At(j, phi) for j in js] + [At(i, Modal(op, (disj(Nom(j) for j in js),)))])
        n2 = self.add(Implies(psi, Implies(body, psi)), Taut())
        n3 = self.add(Implies(body, psi), MP(n, n2))
        return self.add(Implies(At(i, Modal(op, (phi,))), psi), PasteOp(op, k, n3, tuple(js)))

    def step_da(self) -> int:
        from .hilbert import DA, da_instance

        i = self.rng.choice(self.noms)
        phi = And(Nom("x"), self.formula(3, depth=1, bound=("x",))) if self.rng.random() < 0.3 \
            else self.formula(4, depth=1, bound=("x",))
        return self.add(da_instance(i, "x", phi), DA(i, "x", phi))

    STEPS = ("taut", "axiom", "mp", "atgen", "rule", "name", "paste", "da")


def random_proof_script(rng: random.Random, family: str = "K", steps: int = 6, require: Iterable[str] = ()):
    """A random script built only from sound steps (so the checker accepts it).

    ``require`` lists step kinds that must occur at least once.
    """
    b = _ScriptBuilder(rng, family)
    kinds = list(require) + [rng.choice(_ScriptBuilder.STEPS) for _ in range(max(0, steps - len(list(require))))]
    rng.shuffle(kinds)
    for kind in kinds:
        getattr(b, f"step_{kind}")()
    return b.script


__all__ = ["random_formula", "kripke_corpus", "random_model", "random_element", "random_proof_script"]
