"""Hybrid formulas over a modal similarity type.

Formulas are immutable trees built from propositional variables, nominals,
the constant ``Top``, negation, conjunction, modal operators, satisfaction
operators ``@`` and the ``dn`` (down-arrow) binder.  Disjunction, implication,
equivalence and ``false`` are derived and only exist in the surface syntax.

Surface grammar (whitespace-insensitive)::

    formula := "true" | "false" | ident | nominal | "~" formula
             | "(" formula bin formula ")" | "@" nominal formula
             | "dn" nominal "." formula | opname "(" formula ("," formula)* ")"
             | unop formula
    nominal := ident "'"

Binary connectives may also be written without parentheses; precedence from
loosest to tightest is ``<->``, ``->``, infix modal operators (``=>``, ``>``),
``|``, ``&``, prefix forms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields
from functools import lru_cache
from typing import Iterable, Mapping


# ---------------------------------------------------------------- formulas


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return show(self)


def _cached_hash(cls):
    """Formulas are hashed constantly (caches, Tseitin atoms); memoize it."""
    names = tuple(f.name for f in fields(cls) if f.name != "_h")
    tag = cls.__name__

    def __hash__(self):
        h = self._h
        if not h:
            h = hash((tag,) + tuple(getattr(self, n) for n in names)) or 1
            object.__setattr__(self, "_h", h)
        return h

    cls.__hash__ = __hash__
    return cls


_H = field(default=0, init=False, repr=False, compare=False)


@_cached_hash
@dataclass(frozen=True, slots=True)
class Top(Formula):
    _h: int = _H


@_cached_hash
@dataclass(frozen=True, slots=True)
class Prop(Formula):
    name: str
    _h: int = _H


@_cached_hash
@dataclass(frozen=True, slots=True)
class Nom(Formula):
    name: str
    _h: int = _H


@_cached_hash
@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula
    _h: int = _H


@_cached_hash
@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula
    _h: int = _H


@_cached_hash
@dataclass(frozen=True, slots=True)
class Modal(Formula):
    op: str
    args: tuple
    _h: int = _H


@_cached_hash
@dataclass(frozen=True, slots=True)
class At(Formula):
    nom: str
    arg: Formula
    _h: int = _H


@_cached_hash
@dataclass(frozen=True, slots=True)
class Down(Formula):
    nom: str
    arg: Formula
    _h: int = _H


TOP = Top()
BOT = Not(TOP)


def Or(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def Implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def conj(items: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    out = None
    for f in items:
        out = f if out is None else And(out, f)
    return TOP if out is None else out


def disj(items: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is ``false``."""
    out = None
    for f in items:
        out = f if out is None else Or(out, f)
    return BOT if out is None else out


def dia(f: Formula) -> Formula:
    return Modal("dia", (f,))


def box(f: Formula) -> Formula:
    return Modal("box", (f,))


def graded(k: int, f: Formula) -> Formula:
    return Modal(f"<{k}>", (f,))


# ---------------------------------------------------------------- signatures


class ParseError(ValueError):
    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} (at position {pos})")


@dataclass(frozen=True)
class Operator:
    """A modal operator with its arity and per-argument boundedness.

    ``bounds[r]`` is ``None`` for an unbounded argument or the positive
    integer ``k`` when the operator is ``k``-bounded in argument ``r``.
    """

    name: str
    arity: int
    bounds: tuple = ()
    infix: bool = False

    def __post_init__(self):
        if not self.bounds:
            object.__setattr__(self, "bounds", (None,) * self.arity)
        if len(self.bounds) != self.arity:
            raise ValueError(f"operator {self.name}: {len(self.bounds)} bounds for arity {self.arity}")
        for b in self.bounds:
            if b is not None and b < 1:
                raise ValueError(f"operator {self.name}: bound must be positive, got {b}")
        if self.infix and self.arity != 2:
            raise ValueError(f"operator {self.name}: only binary operators can be infix")

    @property
    def bounded(self) -> bool:
        return any(b is not None for b in self.bounds)

    @property
    def fully_bounded(self) -> bool:
        return self.arity > 0 and all(b is not None for b in self.bounds)


GRADED_RE = re.compile(r"<(\d+)>$")
PRESBURGER_RE = re.compile(r"sum\{([^}]*)\}>=(\d+)$")
COALITION_RE = re.compile(r"\[([^\]]*)\]$")


def parse_presburger(name: str) -> tuple[tuple[int, ...], int]:
    """Coefficients and threshold of ``sum{a1*#,...}>=k``.

    Only positive coefficients are accepted (the bounded fragment).
    """
    m = PRESBURGER_RE.match(name)
    if not m:
        raise ValueError(f"not a Presburger operator: {name}")
    coeffs = []
    for part in m.group(1).split(","):
        part = part.strip()
        cm = re.fullmatch(r"(-?\d+)\s*\*\s*#", part)
        if not cm:
            raise ValueError(f"bad Presburger term {part!r} in {name}")
        a = int(cm.group(1))
        if a <= 0:
            raise ValueError(f"Presburger coefficients must be positive: {name}")
        coeffs.append(a)
    return tuple(coeffs), int(m.group(2))


def coalition_agents(name: str) -> tuple[str, ...]:
    m = COALITION_RE.match(name)
    if not m:
        raise ValueError(f"not a coalition operator: {name}")
    inner = m.group(1).strip()
    return tuple(sorted(a.strip() for a in inner.split(","))) if inner else ()


def coalition_name(agents: Iterable[str]) -> str:
    return "[" + ",".join(sorted(agents)) + "]"


@dataclass(frozen=True)
class SimilarityType:
    """A modal similarity type: explicit operators plus optional families.

    Families cover operators indexed by numbers or agent sets: ``graded``
    resolves ``<k>`` for every k, ``presburger`` resolves ``sum{...}>=k``
    and ``coalition`` resolves ``[C]`` for subsets C of ``agents``.
    """

    name: str
    operators: tuple = ()
    families: frozenset = frozenset()
    agents: tuple = ()

    def __post_init__(self):
        names = [op.name for op in self.operators]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate operator names in signature {self.name}")

    def resolve(self, name: str) -> Operator | None:
        for op in self.operators:
            if op.name == name:
                return op
        if "graded" in self.families:
            m = GRADED_RE.match(name)
            if m:
                return Operator(name, 1, (int(m.group(1)) + 1,))
        if "presburger" in self.families and PRESBURGER_RE.match(name):
            coeffs, k = parse_presburger(name)
            # threshold 0 is trivially true, so pasting witnesses for it is unsound
            return Operator(name, len(coeffs), ((k if k >= 1 else None),) * len(coeffs))
        if "coalition" in self.families and COALITION_RE.match(name):
            agents = coalition_agents(name)
            if set(agents) <= set(self.agents):
                return Operator(coalition_name(agents), 1)
        return None

    def __getitem__(self, name: str) -> Operator:
        op = self.resolve(name)
        if op is None:
            raise KeyError(name)
        return op

    def __contains__(self, name: str) -> bool:
        return self.resolve(name) is not None

    def infix_names(self) -> set:
        return {op.name for op in self.operators if op.infix}

    def prefix_words(self) -> set:
        return {op.name for op in self.operators if not op.infix and re.fullmatch(r"[A-Za-z_]\w*", op.name)}

    def with_operators(self, *ops: Operator) -> "SimilarityType":
        return SimilarityType(self.name, self.operators + tuple(ops), self.families, self.agents)


K_SIG = SimilarityType("K", (Operator("box", 1), Operator("dia", 1, (1,))))
GRADED_SIG = SimilarityType("graded", (), frozenset({"graded", "presburger"}))
CK_SIG = SimilarityType("CK", (Operator("=>", 2, infix=True), Operator(">", 2, (None, 1), infix=True)))
NEIGHBORHOOD_SIG = SimilarityType("neighborhood", (Operator("box", 1), Operator("dia", 1)))


def coalition_signature(agents: Iterable[str]) -> SimilarityType:
    return SimilarityType("coalition", (), frozenset({"coalition"}), tuple(sorted(agents)))


BUILTIN_SIGNATURES = {
    "K": K_SIG,
    "graded": GRADED_SIG,
    "CK": CK_SIG,
    "neighborhood": NEIGHBORHOOD_SIG,
    "monotone": NEIGHBORHOOD_SIG,
}


def signature_by_name(name: str) -> SimilarityType:
    if name.startswith("coalition"):
        _, _, agents = name.partition(":")
        return coalition_signature(a for a in agents.split(",") if a)
    try:
        return BUILTIN_SIGNATURES[name]
    except KeyError:
        raise ValueError(f"unknown signature {name!r}") from None


def parse_signature(text: str, name: str = "custom") -> SimilarityType:
    """Read ``op <name> arity=<n> bound=<k|unbounded>[,...]`` lines.

    An optional ``infix`` flag marks binary operators written between their
    arguments.
    """
    ops = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "op" or len(parts) < 3:
            raise ParseError(f"line {lineno}: expected 'op <name> arity=<n> bound=...'")
        opname = parts[1]
        fields = {}
        flags = set()
        for p in parts[2:]:
            if "=" in p:
                k, _, v = p.partition("=")
                fields[k] = v
            else:
                flags.add(p)
        try:
            arity = int(fields["arity"])
        except (KeyError, ValueError):
            raise ParseError(f"line {lineno}: missing or bad arity") from None
        bound_spec = fields.get("bound", "unbounded").split(",")
        if len(bound_spec) == 1:
            bound_spec = bound_spec * arity
        bounds = []
        for b in bound_spec:
            if b == "unbounded":
                bounds.append(None)
            else:
                try:
                    bounds.append(int(b))
                except ValueError:
                    raise ParseError(f"line {lineno}: bad bound {b!r}") from None
        if PRESBURGER_RE.match(opname):
            try:
                parse_presburger(opname)
            except ValueError as e:
                raise ParseError(f"line {lineno}: {e}") from None
        try:
            ops.append(Operator(opname, arity, tuple(bounds), infix="infix" in flags))
        except ValueError as e:
            raise ParseError(f"line {lineno}: {e}") from None
    return SimilarityType(name, tuple(ops))


# ---------------------------------------------------------------- lexer


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<presburger>sum\{[^}]*\}>=\d+)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<graded><\d+>)
  | (?P<coalition>\[[^\]]*\])
  | (?P<sym>=>|>|&|\||~|@|\(|\)|,|\.)
  | (?P<nominal>[A-Za-z_]\w*')
  | (?P<ident>[A-Za-z_]\w*)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group(kind)
            if kind in ("iff", "imp", "sym"):
                kind = "sym"
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("eof", "", pos))
    return tokens


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str, sig: SimilarityType):
        self.tokens = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.infix = sig.infix_names()

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.next()
        if v != value:
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", pos)

    def at(self, value: str) -> bool:
        return self.peek()[1] == value and self.peek()[0] == "sym"

    def nominal(self) -> str:
        kind, v, pos = self.next()
        if kind != "nominal":
            raise ParseError(f"expected a nominal (name followed by '), found {v or 'end of input'!r}", pos)
        return v[:-1]

    def formula(self) -> Formula:
        left = self.implication()
        if self.at("<->"):
            self.next()
            return Iff(left, self.formula())
        return left

    def implication(self) -> Formula:
        left = self.infix_modal()
        if self.at("->"):
            self.next()
            return Implies(left, self.implication())
        return left

    def infix_modal(self) -> Formula:
        left = self.disjunction()
        kind, v, pos = self.peek()
        if kind == "sym" and v in self.infix:
            self.next()
            return Modal(v, (left, self.infix_modal()))
        if kind == "sym" and v in ("=>", ">"):
            raise ParseError(f"unknown operator {v!r} for signature {self.sig.name}", pos)
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.at("|"):
            self.next()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        kind, v, pos = self.peek()
        if kind == "sym":
            if v == "~":
                self.next()
                return Not(self.unary())
            if v == "@":
                self.next()
                nom = self.nominal()
                return At(nom, self.unary())
            if v == "(":
                self.next()
                f = self.formula()
                self.expect(")")
                return f
            raise ParseError(f"unexpected {v!r}", pos)
        if kind == "nominal":
            self.next()
            return Nom(v[:-1])
        if kind == "ident":
            if v == "true":
                self.next()
                return TOP
            if v == "false":
                self.next()
                return BOT
            if v == "dn":
                self.next()
                nom = self.nominal()
                self.expect(".")
                return Down(nom, self.unary())
            if self.sig.resolve(v) is not None:
                return self.modal()
            self.next()
            return Prop(v)
        if kind in ("graded", "presburger", "coalition"):
            return self.modal()
        if kind == "eof":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected {v!r}", pos)

    def modal(self) -> Formula:
        kind, v, pos = self.next()
        op = self.sig.resolve(v)
        if op is None:
            raise ParseError(f"unknown operator {v!r} for signature {self.sig.name}", pos)
        if op.arity == 1 and not self.at("("):
            return Modal(op.name, (self.unary(),))
        if op.arity == 0:
            return Modal(op.name, ())
        self.expect("(")
        args = [self.formula()]
        while self.at(","):
            self.next()
            args.append(self.formula())
        self.expect(")")
        if len(args) != op.arity:
            raise ParseError(f"operator {op.name} expects {op.arity} arguments, got {len(args)}", pos)
        if op.arity == 1:
            # `dia (p)` is a parenthesised argument, not an argument list; keep
            # parsing in case the parenthesis only opened a larger unary form.
            return Modal(op.name, (args[0],))
        return Modal(op.name, tuple(args))


def parse(text: str, sig: SimilarityType = K_SIG) -> Formula:
    p = _Parser(text, sig)
    f = p.formula()
    kind, v, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {v!r}", pos)
    check_arity(f, sig)
    return f


def check_arity(f: Formula, sig: SimilarityType) -> None:
    for g in subformulas(f):
        if isinstance(g, Modal):
            op = sig.resolve(g.op)
            if op is None:
                raise ParseError(f"unknown operator {g.op!r} for signature {sig.name}")
            if op.arity != len(g.args):
                raise ParseError(f"operator {g.op} expects {op.arity} arguments, got {len(g.args)}")


# ---------------------------------------------------------------- printer


def _is_imp(f: Formula):
    if isinstance(f, Not) and isinstance(f.arg, And) and isinstance(f.arg.right, Not):
        return f.arg.left, f.arg.right.arg
    return None


def _is_or(f: Formula):
    if isinstance(f, Not) and isinstance(f.arg, And) and isinstance(f.arg.left, Not) and isinstance(f.arg.right, Not):
        return f.arg.left.arg, f.arg.right.arg
    return None


def _is_iff(f: Formula):
    if isinstance(f, And):
        a, b = _is_imp(f.left), _is_imp(f.right)
        if a and b and a[0] == b[1] and a[1] == b[0]:
            return a
    return None


_WORD_RE = re.compile(r"[A-Za-z_]\w*")


@lru_cache(maxsize=200_000)
def show(f: Formula) -> str:
    """Render ``f`` in the surface syntax; re-sugars ``|``, ``->``, ``<->``."""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Nom):
        return f.name + "'"
    if isinstance(f, Not):
        if isinstance(f.arg, Top):
            return "false"
        pair = _is_or(f)
        # ~a | b and a -> b share one tree; only read it as a disjunction
        # when the first disjunct is not itself a negated conjunction
        if pair and not (isinstance(f.arg.left.arg, And)):
            return f"({show(pair[0])} | {show(pair[1])})"
        pair = _is_imp(f)
        if pair:
            return f"({show(pair[0])} -> {show(pair[1])})"
        return "~ " + _wrap(f.arg)
    if isinstance(f, And):
        pair = _is_iff(f)
        if pair:
            return f"({show(pair[0])} <-> {show(pair[1])})"
        return f"({show(f.left)} & {show(f.right)})"
    if isinstance(f, Modal):
        if len(f.args) == 2 and f.op in ("=>", ">"):
            return f"({show(f.args[0])} {f.op} {show(f.args[1])})"
        if len(f.args) == 1:
            return f"{f.op} {_wrap(f.args[0])}"
        return f"{f.op}(" + ", ".join(show(a) for a in f.args) + ")"
    if isinstance(f, At):
        return f"@{f.nom}' {_wrap(f.arg)}"
    if isinstance(f, Down):
        return f"dn {f.nom}'. {_wrap(f.arg)}"
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f: Formula) -> str:
    s = show(f)
    if isinstance(f, (Top, Prop, Nom)) or f == BOT:
        return s
    if s.startswith("(") and _balanced_outer(s):
        return s
    return f"({s})"


def _balanced_outer(s: str) -> bool:
    depth = 0
    for idx, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0 and idx != len(s) - 1:
                return False
    return True


# ---------------------------------------------------------------- traversal


def subformulas(f: Formula) -> list:
    """All subformula occurrences, parents before children (deduplicated)."""
    out = []
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        out.append(g)
        stack.extend(reversed(children(g)))
    return out


def children(f: Formula) -> tuple:
    if isinstance(f, (Not, At, Down)):
        return (f.arg,)
    if isinstance(f, And):
        return (f.left, f.right)
    if isinstance(f, Modal):
        return f.args
    return ()


@lru_cache(maxsize=200_000)
def free_nominals(f: Formula) -> frozenset:
    if isinstance(f, Nom):
        return frozenset((f.name,))
    if isinstance(f, At):
        return free_nominals(f.arg) | {f.nom}
    if isinstance(f, Down):
        return free_nominals(f.arg) - {f.nom}
    out = frozenset()
    for c in children(f):
        out |= free_nominals(c)
    return out


def free_nominals_of(formulas: Iterable[Formula]) -> frozenset:
    out = frozenset()
    for f in formulas:
        out |= free_nominals(f)
    return out


@lru_cache(maxsize=200_000)
def all_nominals(f: Formula) -> frozenset:
    """Free and bound nominal names, including binder positions."""
    if isinstance(f, Nom):
        return frozenset((f.name,))
    if isinstance(f, (At, Down)):
        return all_nominals(f.arg) | {f.nom}
    out = frozenset()
    for c in children(f):
        out |= all_nominals(c)
    return out


@lru_cache(maxsize=200_000)
def prop_vars(f: Formula) -> frozenset:
    if isinstance(f, Prop):
        return frozenset((f.name,))
    out = frozenset()
    for c in children(f):
        out |= prop_vars(c)
    return out


def is_pure(f: Formula) -> bool:
    return not prop_vars(f)


def has_down(f: Formula) -> bool:
    return any(isinstance(g, Down) for g in subformulas(f))


def size(f: Formula) -> int:
    """Number of nodes in the syntax tree (with repetitions)."""
    return 1 + sum(size(c) for c in children(f))


def modal_depth(f: Formula) -> int:
    if isinstance(f, Modal):
        return 1 + max((modal_depth(a) for a in f.args), default=0)
    return max((modal_depth(c) for c in children(f)), default=0)


def operators_of(f: Formula) -> set:
    return {g.op for g in subformulas(f) if isinstance(g, Modal)}


# ---------------------------------------------------------------- nominals


FRESH_PREFIX = "i"


def fresh_nominal(avoid: Iterable[str]) -> str:
    """Lowest-index name ``i0, i1, ...`` not in ``avoid``."""
    avoid = set(avoid)
    n = 0
    while f"{FRESH_PREFIX}{n}" in avoid:
        n += 1
    return f"{FRESH_PREFIX}{n}"


def fresh_nominals(count: int, avoid: Iterable[str]) -> list:
    avoid = set(avoid)
    out = []
    for _ in range(count):
        j = fresh_nominal(avoid)
        avoid.add(j)
        out.append(j)
    return out


# ---------------------------------------------------------------- substitution


@dataclass(frozen=True)
class Substitution:
    """Simultaneous replacement of propositional variables by formulas and
    of free nominals by nominals."""

    props: Mapping = field(default_factory=dict)
    noms: Mapping = field(default_factory=dict)

    def __hash__(self):
        return hash((tuple(sorted(self.props.items(), key=lambda kv: kv[0])),
                     tuple(sorted(self.noms.items()))))

    def then(self, other: "Substitution") -> "Substitution":
        """The substitution ``phi -> (phi self) other``."""
        props = {p: substitute(f, other) for p, f in self.props.items()}
        for p, f in other.props.items():
            props.setdefault(p, f)
        noms = {i: other.noms.get(j, j) for i, j in self.noms.items()}
        for i, j in other.noms.items():
            noms.setdefault(i, j)
        return Substitution(props, noms)


def substitute(f: Formula, sigma: Substitution) -> Formula:
    if not sigma.props and not sigma.noms:
        return f
    return _subst(f, dict(sigma.props), dict(sigma.noms))


def _subst(f: Formula, props: dict, noms: dict) -> Formula:
    if isinstance(f, Top):
        return f
    if isinstance(f, Prop):
        return props.get(f.name, f)
    if isinstance(f, Nom):
        return Nom(noms[f.name]) if f.name in noms else f
    if isinstance(f, Not):
        return Not(_subst(f.arg, props, noms))
    if isinstance(f, And):
        return And(_subst(f.left, props, noms), _subst(f.right, props, noms))
    if isinstance(f, Modal):
        return Modal(f.op, tuple(_subst(a, props, noms) for a in f.args))
    if isinstance(f, At):
        return At(noms.get(f.nom, f.nom), _subst(f.arg, props, noms))
    if isinstance(f, Down):
        j = f.nom
        inner_noms = {k: v for k, v in noms.items() if k != j}
        body = f.arg
        free_body = free_nominals(body) - {j}
        captured = any(inner_noms.get(k) == j for k in free_body)
        if not captured:
            captured = any(j in free_nominals(props[p]) for p in prop_vars(body) if p in props)
        if captured:
            avoid = set(all_nominals(body)) | set(inner_noms) | set(inner_noms.values()) | {j}
            for p in prop_vars(body):
                if p in props:
                    avoid |= all_nominals(props[p])
            new = fresh_nominal(avoid)
            body = _subst(body, {}, {j: new})
            j = new
        return Down(j, _subst(body, props, inner_noms))
    raise TypeError(f"not a formula: {f!r}")


def rename_nominal(f: Formula, old: str, new: str) -> Formula:
    """``f[new/old]``: replace free occurrences of nominal ``old`` by ``new``."""
    return substitute(f, Substitution({}, {old: new}))


# ---------------------------------------------------------------- alpha-equivalence


@lru_cache(maxsize=200_000)
def canonical(f: Formula) -> Formula:
    """Representative of the alpha-equivalence class of ``f``.

    Bound nominals are renamed to ``%d`` by binder depth; such names cannot
    occur in parsed input.
    """
    if not has_down_cached(f):
        return f
    return _canon(f, {}, 0)


@lru_cache(maxsize=200_000)
def has_down_cached(f: Formula) -> bool:
    if isinstance(f, Down):
        return True
    return any(has_down_cached(c) for c in children(f))


def _canon(f: Formula, env: dict, depth: int) -> Formula:
    if isinstance(f, (Top, Prop)):
        return f
    if isinstance(f, Nom):
        return Nom(env.get(f.name, f.name))
    if isinstance(f, Not):
        return Not(_canon(f.arg, env, depth))
    if isinstance(f, And):
        return And(_canon(f.left, env, depth), _canon(f.right, env, depth))
    if isinstance(f, Modal):
        return Modal(f.op, tuple(_canon(a, env, depth) for a in f.args))
    if isinstance(f, At):
        return At(env.get(f.nom, f.nom), _canon(f.arg, env, depth))
    if isinstance(f, Down):
        inner = dict(env)
        inner[f.nom] = f"%{depth}"
        return Down(f"%{depth}", _canon(f.arg, inner, depth + 1))
    raise TypeError(f"not a formula: {f!r}")


def alpha_eq(a: Formula, b: Formula) -> bool:
    return a == b or canonical(a) == canonical(b)
