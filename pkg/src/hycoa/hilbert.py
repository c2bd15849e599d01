"""Proof scripts for the hybrid Hilbert calculus and their checker.

A script is a numbered list of formulas, each with a justification.  The
checker never searches: substitutions and fresh nominals are given
explicitly and only verified.

Lines that depend on a local assumption are *local*: they are only claimed
at states where all local assumptions hold.  Modus ponens propagates this;
@-generalisation, rule application, Name and Paste need global premises.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .prop import is_tautology
from .rules import RuleSet, k_rules, load_ruleset
from .syntax import (
    BOT,
    TOP,
    And,
    At,
    Down,
    Formula,
    Implies,
    Iff,
    K_SIG,
    Modal,
    Nom,
    Not,
    ParseError,
    Prop,
    SimilarityType,
    Substitution,
    alpha_eq,
    check_arity,
    conj,
    disj,
    free_nominals,
    free_nominals_of,
    is_pure,
    parse,
    parse_signature,
    rename_nominal,
    show,
    signature_by_name,
    substitute,
)


# ---------------------------------------------------------------- axiom schemes


_p, _q = Prop("p"), Prop("q")

AXIOMS = {
    "bot": Not(At("i", BOT)),
    "neg": Iff(Not(At("i", _p)), At("i", Not(_p))),
    "and": Iff(At("i", And(_p, _q)), And(At("i", _p), At("i", _q))),
    "ref": At("i", Nom("i")),
    "sym": Iff(At("i", Nom("j")), At("j", Nom("i"))),
    "nom": Implies(And(At("i", Nom("j")), At("j", _p)), At("i", _p)),
    "intro": Implies(And(Nom("i"), _p), At("i", _p)),
}


def mob_axiom(op: str, arity: int) -> Formula:
    """``@_i p -> (op(q1..qn) <-> op(@_i p & q1, ..., @_i p & qn))``."""
    qs = [Prop(f"q{r}") for r in range(1, arity + 1)]
    ip = At("i", _p)
    return Implies(ip, Iff(Modal(op, tuple(qs)), Modal(op, tuple(And(ip, q) for q in qs))))


def axiom_scheme(name: str, sig: SimilarityType) -> Formula:
    if name in AXIOMS:
        return AXIOMS[name]
    if name.startswith("mob:"):
        op = sig.resolve(name[4:])
        if op is None:
            raise KeyError(name)
        return mob_axiom(op.name, op.arity)
    raise KeyError(name)


def da_instance(i: str, j: str, phi: Formula) -> Formula:
    """``@_i((dn j. phi) <-> phi[i/j])``."""
    return At(i, Iff(Down(j, phi), rename_nominal(phi, j, i)))


# ---------------------------------------------------------------- justifications


@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class AxiomInstance:
    name: str
    sigma: Substitution = field(default_factory=Substitution)


@dataclass(frozen=True)
class PureAxiom:
    index: int
    sigma: Substitution = field(default_factory=Substitution)


@dataclass(frozen=True)
class TBox:
    index: int


@dataclass(frozen=True)
class Local:
    index: int


@dataclass(frozen=True)
class MP:
    m: int
    n: int


@dataclass(frozen=True)
class AtGen:
    m: int
    nom: str


@dataclass(frozen=True)
class RuleInstance:
    index: int
    sigma: Substitution
    m: int


@dataclass(frozen=True)
class Name:
    m: int
    nom: str


@dataclass(frozen=True)
class PasteOp:
    op: str
    k: int
    m: int
    noms: tuple


@dataclass(frozen=True)
class DA:
    i: str
    j: str
    phi: Formula


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    just: object


@dataclass
class ProofScript:
    sig: SimilarityType = K_SIG
    ruleset: RuleSet = field(default_factory=k_rules)
    axioms: list = field(default_factory=list)
    tbox: list = field(default_factory=list)
    local: list = field(default_factory=list)
    lines: list = field(default_factory=list)

    def add(self, formula: Formula | str, just) -> int:
        """Append a line; returns its 1-based number."""
        if isinstance(formula, str):
            formula = parse(formula, self.sig)
        self.lines.append(ProofLine(formula, just))
        return len(self.lines)


@dataclass(frozen=True)
class Accepted:
    formula: Formula
    local: bool = False

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Rejected:
    line: int
    reason: str
    detail: str = ""

    def __bool__(self):
        return False


# ---------------------------------------------------------------- checker


def _split_implication(f: Formula):
    """``(a, b)`` if ``f`` is ``a -> b`` i.e. ``~(a & ~b)``."""
    if isinstance(f, Not) and isinstance(f.arg, And) and isinstance(f.arg.right, Not):
        return f.arg.left, f.arg.right.arg
    return None


def _context_nominals(script: ProofScript, include_axioms: bool) -> frozenset:
    out = free_nominals_of(script.tbox) | free_nominals_of(script.local)
    if include_axioms:
        out |= free_nominals_of(script.axioms)
    return out


def _check_paste(script: ProofScript, j: PasteOp, premise: Formula, current: Formula):
    """Return ``None`` if the Paste step is correct, else a (reason, detail) pair."""
    op = script.sig.resolve(j.op)
    if op is None:
        return "unknown-operator", j.op
    if not op.bounded:
        return "paste-unbounded", f"{op.name} has no declared bound"
    if len(j.noms) != j.k:
        return "paste-mismatch", f"{len(j.noms)} witnesses for k={j.k}"
    if len(set(j.noms)) != len(j.noms):
        return "paste-not-distinct", ", ".join(j.noms)
    cur = _split_implication(current)
    pre = _split_implication(premise)
    if cur is None or pre is None:
        return "paste-mismatch", "premise and conclusion must be implications"
    head, psi = cur
    if not (isinstance(head, At) and isinstance(head.arg, Modal) and head.arg.op == op.name):
        return "paste-mismatch", f"conclusion must be @i' {op.name}(...) -> psi"
    i, args = head.nom, head.arg.args
    pre_body, pre_psi = pre
    if pre_psi != psi:
        return "paste-mismatch", "premise and conclusion differ in psi"
    witness_disj = disj(Nom(n) for n in j.noms)
    for r, bound in enumerate(op.bounds):
        if bound is None or bound > j.k:
            continue
        phi = args[r]
        new_args = args[:r] + (witness_disj,) + args[r + 1:]
        expected = conj([At(n, phi) for n in j.noms] + [At(i, Modal(op.name, new_args))])
        if pre_body == expected:
            used = free_nominals(psi) | free_nominals_of(args) | {i} | _context_nominals(script, True)
            clash = sorted(set(j.noms) & used)
            if clash:
                return "paste-not-fresh", ", ".join(clash)
            return None
    if all(b is None or b > j.k for b in op.bounds):
        return "paste-unbounded", f"{op.name} is not {j.k}-bounded in any argument"
    return "paste-mismatch", "premise does not have the Paste shape"


def check_proof(script: ProofScript):
    """Check every line; return :class:`Accepted` or the first :class:`Rejected`."""
    if not script.lines:
        return Rejected(0, "empty-script")
    for idx, ax in enumerate(script.axioms):
        if not is_pure(ax):
            return Rejected(0, "impure-axiom", f"axiom {idx} is not pure")
    local = []
    for n, line in enumerate(script.lines, 1):
        f, j = line.formula, line.just

        def ref(m):
            if not isinstance(m, int) or not 1 <= m < n:
                raise _Reject("bad-ref", f"line {m} does not precede line {n}")
            return script.lines[m - 1].formula, local[m - 1]

        try:
            try:
                check_arity(f, script.sig)
            except ParseError as e:
                raise _Reject("unknown-operator", str(e)) from None
            is_local = False
            if isinstance(j, Taut):
                if not is_tautology(f):
                    raise _Reject("not-tautology")
            elif isinstance(j, AxiomInstance):
                try:
                    scheme = axiom_scheme(j.name, script.sig)
                except KeyError:
                    raise _Reject("unknown-axiom", j.name) from None
                if not alpha_eq(substitute(scheme, j.sigma), f):
                    raise _Reject("axiom-mismatch", j.name)
            elif isinstance(j, PureAxiom):
                if not 0 <= j.index < len(script.axioms):
                    raise _Reject("bad-index", f"pure axiom {j.index}")
                if j.sigma.props:
                    raise _Reject("axiom-mismatch", "pure axioms take nominal substitutions only")
                if not alpha_eq(substitute(script.axioms[j.index], j.sigma), f):
                    raise _Reject("axiom-mismatch", f"pure axiom {j.index}")
            elif isinstance(j, TBox):
                if not 0 <= j.index < len(script.tbox):
                    raise _Reject("bad-index", f"tbox {j.index}")
                if not alpha_eq(script.tbox[j.index], f):
                    raise _Reject("assumption-mismatch", f"tbox {j.index}")
            elif isinstance(j, Local):
                if not 0 <= j.index < len(script.local):
                    raise _Reject("bad-index", f"local {j.index}")
                if not alpha_eq(script.local[j.index], f):
                    raise _Reject("assumption-mismatch", f"local {j.index}")
                is_local = True
            elif isinstance(j, MP):
                a, la = ref(j.m)
                imp, lb = ref(j.n)
                parts = _split_implication(imp)
                if parts is None or not alpha_eq(parts[0], a) or not alpha_eq(parts[1], f):
                    raise _Reject("mp-mismatch", f"line {j.n} is not line {j.m} -> current")
                is_local = la or lb
            elif isinstance(j, AtGen):
                a, la = ref(j.m)
                if la:
                    raise _Reject("local-premise", "@-generalisation needs a global premise")
                if not alpha_eq(At(j.nom, a), f):
                    raise _Reject("atgen-mismatch")
            elif isinstance(j, RuleInstance):
                if not 0 <= j.index < len(script.ruleset.rules):
                    raise _Reject("bad-index", f"rule {j.index}")
                rule = script.ruleset.rules[j.index]
                a, la = ref(j.m)
                if la:
                    raise _Reject("local-premise", "rule application needs a global premise")
                if j.sigma.noms:
                    raise _Reject("rule-mismatch", "one-step rules take propositional substitutions only")
                if not alpha_eq(substitute(rule.premise, j.sigma), a):
                    raise _Reject("rule-mismatch", f"line {j.m} is not the premise instance")
                if not alpha_eq(substitute(rule.conclusion, j.sigma), f):
                    raise _Reject("rule-mismatch", "current line is not the conclusion instance")
            elif isinstance(j, Name):
                a, la = ref(j.m)
                if la:
                    raise _Reject("local-premise", "Name needs a global premise")
                parts = _split_implication(a)
                if parts is None or parts[0] != Nom(j.nom) or not alpha_eq(parts[1], f):
                    raise _Reject("name-mismatch", f"line {j.m} is not {j.nom}' -> current")
                if j.nom in free_nominals(f) or j.nom in _context_nominals(script, False):
                    raise _Reject("name-side-condition", f"{j.nom}' is not fresh")
            elif isinstance(j, PasteOp):
                a, la = ref(j.m)
                if la:
                    raise _Reject("local-premise", "Paste needs a global premise")
                err = _check_paste(script, j, a, f)
                if err is not None:
                    raise _Reject(*err)
            elif isinstance(j, DA):
                if not alpha_eq(da_instance(j.i, j.j, j.phi), f):
                    raise _Reject("da-mismatch")
            else:
                raise _Reject("unknown-justification", type(j).__name__)
        except _Reject as r:
            return Rejected(n, r.reason, r.detail)
        local.append(is_local)
    return Accepted(script.lines[-1].formula, local[-1])


class _Reject(Exception):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail


def _conjuncts_of(f: Formula, pool: list) -> bool:
    """Is ``f`` a (left-nested) conjunction of members of ``pool``?"""
    if any(alpha_eq(f, g) for g in pool):
        return True
    return isinstance(f, And) and _conjuncts_of(f.left, pool) and _conjuncts_of(f.right, pool)


def check_derives(tbox, local, phi: Formula, script: ProofScript) -> bool:
    """Does ``script`` witness ``tbox; local |- phi``?"""
    if list(script.tbox) != list(tbox) or list(script.local) != list(local):
        script = ProofScript(script.sig, script.ruleset, script.axioms, list(tbox), list(local), script.lines)
    res = check_proof(script)
    if not res:
        return False
    final = res.formula
    if alpha_eq(final, phi):
        return True
    if res.local:
        return False
    parts = _split_implication(final)
    return parts is not None and alpha_eq(parts[1], phi) and _conjuncts_of(parts[0], list(local))


# ---------------------------------------------------------------- proof files


_LINE_RE = re.compile(r"^\s*(\d+)\s*\.\s*(.*?)\s+BY\s+(.*)$")


def _split_top(text: str, sep: str) -> list:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "({[":
            depth += 1
        elif ch in ")}]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s for s in (x.strip() for x in out) if s]


def parse_substitution(text: str, sig: SimilarityType) -> Substitution:
    """``sub{p:=<f>,...;i':=j',...}`` (the ``sub`` prefix is optional)."""
    text = text.strip()
    if text.startswith("sub"):
        text = text[3:].strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(f"bad substitution {text!r}")
    props, noms = {}, {}
    for part in _split_top(text[1:-1], ";"):
        for item in _split_top(part, ","):
            lhs, sep, rhs = item.partition(":=")
            if not sep:
                raise ParseError(f"bad substitution item {item!r}")
            lhs, rhs = lhs.strip(), rhs.strip()
            if lhs.endswith("'"):
                if not rhs.endswith("'"):
                    raise ParseError(f"nominal {lhs} must map to a nominal")
                noms[lhs[:-1]] = rhs[:-1]
            else:
                props[lhs] = parse(rhs, sig)
    return Substitution(props, noms)


def format_substitution(sigma: Substitution) -> str:
    props = ",".join(f"{p}:={show(f)}" for p, f in sorted(sigma.props.items()))
    noms = ",".join(f"{i}':={j}'" for i, j in sorted(sigma.noms.items()))
    return f"sub{{{props};{noms}}}"


def _nom(tok: str) -> str:
    tok = tok.strip()
    if not tok.endswith("'") or len(tok) < 2:
        raise ParseError(f"expected a nominal, got {tok!r}")
    return tok[:-1]


def parse_justification(text: str, sig: SimilarityType):
    text = text.strip()
    head, _, rest = text.partition(" ")
    rest = rest.strip()
    try:
        if head == "taut":
            return Taut()
        if head.startswith("ax:"):
            return AxiomInstance(head[3:], parse_substitution(rest, sig) if rest else Substitution())
        if head.startswith("pure:"):
            return PureAxiom(int(head[5:]), parse_substitution(rest, sig) if rest else Substitution())
        if head.startswith("tbox:"):
            return TBox(int(head[5:]))
        if head.startswith("local:"):
            return Local(int(head[6:]))
        if head == "mp":
            m, n = rest.split()
            return MP(int(m), int(n))
        if head == "atgen":
            m, nom = rest.split()
            return AtGen(int(m), _nom(nom))
        if head.startswith("rule:"):
            sub, sep, m = rest.rpartition(" from ")
            if not sep:
                raise ParseError("rule justification needs 'from <m>'")
            return RuleInstance(int(head[5:]), parse_substitution(sub, sig), int(m))
        if head == "name":
            m, nom = rest.split()
            return Name(int(m), _nom(nom))
        if head.startswith("paste:"):
            body = head[6:]
            op, _, k = body.rpartition(":")
            m, sep, noms = rest.partition(" with ")
            if not sep:
                raise ParseError("paste justification needs 'with <nominals>'")
            return PasteOp(op, int(k), int(m), tuple(_nom(x) for x in noms.split(",")))
        if head == "da":
            i, j, phi = rest.split(None, 2)
            return DA(_nom(i), _nom(j), parse(phi, sig))
    except ValueError as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError(f"bad justification {text!r}: {e}") from None
    raise ParseError(f"unknown justification {text!r}")


def format_justification(j) -> str:
    if isinstance(j, Taut):
        return "taut"
    if isinstance(j, AxiomInstance):
        return f"ax:{j.name} {format_substitution(j.sigma)}"
    if isinstance(j, PureAxiom):
        return f"pure:{j.index} {format_substitution(j.sigma)}"
    if isinstance(j, TBox):
        return f"tbox:{j.index}"
    if isinstance(j, Local):
        return f"local:{j.index}"
    if isinstance(j, MP):
        return f"mp {j.m} {j.n}"
    if isinstance(j, AtGen):
        return f"atgen {j.m} {j.nom}'"
    if isinstance(j, RuleInstance):
        return f"rule:{j.index} {format_substitution(j.sigma)} from {j.m}"
    if isinstance(j, Name):
        return f"name {j.m} {j.nom}'"
    if isinstance(j, PasteOp):
        return f"paste:{j.op}:{j.k} {j.m} with {','.join(n + chr(39) for n in j.noms)}"
    if isinstance(j, DA):
        return f"da {j.i}' {j.j}' {show(j.phi)}"
    raise TypeError(j)


def _formula_list(value: str, sig: SimilarityType, base: Path | None) -> list:
    value = value.strip()
    if not value:
        return []
    path = Path(value) if base is None else base / value
    if path.is_file():
        lines = path.read_text(encoding="utf-8").splitlines()
    else:
        lines = value.split(";")
    out = []
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(parse(line, sig))
    return out


def load_signature(spec: str, base: Path | None = None) -> SimilarityType:
    path = Path(spec) if base is None else base / spec
    if path.is_file():
        return parse_signature(path.read_text(encoding="utf-8"), path.stem)
    return signature_by_name(spec)


def parse_proof(text: str, base: Path | None = None) -> ProofScript:
    """Read a proof file.

    Header values for ``axioms``/``tbox``/``local`` are file references
    (relative to ``base``) or inline ``;``-separated formula lists.
    """
    headers = {}
    body = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = re.match(r"^\s*(sig|rules|axioms|tbox|local)\s*:(.*)$", line)
        if m and not body:
            headers[m.group(1)] = m.group(2).strip()
            continue
        body.append((lineno, line))
    sig = load_signature(headers["sig"], base) if headers.get("sig") else K_SIG
    if headers.get("rules"):
        rspec = headers["rules"]
        rpath = Path(rspec) if base is None else base / rspec
        ruleset = load_ruleset(str(rpath) if rpath.is_file() else rspec)
    else:
        ruleset = k_rules()
    script = ProofScript(
        sig,
        ruleset,
        _formula_list(headers.get("axioms", ""), sig, base),
        _formula_list(headers.get("tbox", ""), sig, base),
        _formula_list(headers.get("local", ""), sig, base),
    )
    for lineno, line in body:
        m = _LINE_RE.match(line)
        if not m:
            raise ParseError(f"line {lineno}: expected '<n>. <formula> BY <justification>'")
        if int(m.group(1)) != len(script.lines) + 1:
            raise ParseError(f"line {lineno}: expected line number {len(script.lines) + 1}")
        try:
            script.add(parse(m.group(2), sig), parse_justification(m.group(3), sig))
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e}") from None
    return script


def load_proof(path: str | Path) -> ProofScript:
    path = Path(path)
    return parse_proof(path.read_text(encoding="utf-8"), path.parent)


def format_proof(script: ProofScript) -> str:
    out = [f"sig: {script.sig.name}", f"rules: {script.ruleset.name}"]
    for key, items in (("axioms", script.axioms), ("tbox", script.tbox), ("local", script.local)):
        if items:
            out.append(f"{key}: " + " ; ".join(show(f) for f in items))
    for n, line in enumerate(script.lines, 1):
        out.append(f"{n}. {show(line.formula)} BY {format_justification(line.just)}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- fixtures


def _sub(props=None, noms=None) -> Substitution:
    return Substitution(dict(props or {}), dict(noms or {}))


def back_axiom_script() -> ProofScript:
    """``@_i p -> box @_i p`` in hybrid K, from (mob) for ``box``."""
    s = ProofScript(K_SIG, k_rules())
    ip = At("i", _p)
    mob = s.add(substitute(mob_axiom("box", 1), _sub({"q1": TOP})), AxiomInstance("mob:box", _sub({"q1": TOP})))
    top = s.add(TOP, Taut())
    nec = s.add(Modal("box", (TOP,)), RuleInstance(0, _sub({"a": TOP}), top))
    a = And(ip, TOP)
    prem = s.add(Implies(And(a, a), ip), Taut())
    k = s.add(Implies(And(Modal("box", (a,)), Modal("box", (a,))), Modal("box", (ip,))),
              RuleInstance(1, _sub({"a": a, "b": a, "c": ip}), prem))
    goal = Implies(ip, Modal("box", (ip,)))
    l1 = s.lines[mob - 1].formula
    l3 = s.lines[nec - 1].formula
    l5 = s.lines[k - 1].formula
    glue = s.add(Implies(l1, Implies(l3, Implies(l5, goal))), Taut())
    s1 = s.add(Implies(l3, Implies(l5, goal)), MP(mob, glue))
    s2 = s.add(Implies(l5, goal), MP(nec, s1))
    s.add(goal, MP(k, s2))
    return s


def name_prime_script() -> ProofScript:
    """Name': from ``@_i phi`` (here derived from the TBox ``p``) conclude ``phi``."""
    s = ProofScript(K_SIG, k_rules(), tbox=[_p])
    i = "i"
    t = s.add(_p, TBox(0))
    at = s.add(At(i, _p), AtGen(t, i))
    _name_prime_tail(s, at, i, _p)
    return s


def _name_prime_tail(s: ProofScript, at_line: int, i: str, phi: Formula) -> int:
    """From line ``at_line`` = ``@_i phi`` derive ``phi`` (Name')."""
    intro = s.add(Implies(And(Nom(i), Not(phi)), At(i, Not(phi))),
                  AxiomInstance("intro", _sub({"p": Not(phi)}, {"i": i})))
    neg = s.add(Iff(Not(At(i, phi)), At(i, Not(phi))), AxiomInstance("neg", _sub({"p": phi}, {"i": i})))
    goal = Implies(Nom(i), phi)
    f_at, f_intro, f_neg = (s.lines[n - 1].formula for n in (at_line, intro, neg))
    glue = s.add(Implies(f_at, Implies(f_intro, Implies(f_neg, goal))), Taut())
    a = s.add(Implies(f_intro, Implies(f_neg, goal)), MP(at_line, glue))
    b = s.add(Implies(f_neg, goal), MP(intro, a))
    c = s.add(goal, MP(neg, b))
    return s.add(phi, Name(c, i))


def name_cong_script() -> ProofScript:
    """NameCong for ``box``: from ``@_j(p <-> q)`` conclude ``box p <-> box q``."""
    s = ProofScript(K_SIG, k_rules(), tbox=[Iff(_p, _q)])
    t = s.add(Iff(_p, _q), TBox(0))
    at = s.add(At("j", Iff(_p, _q)), AtGen(t, "j"))
    eq = _name_prime_tail(s, at, "j", Iff(_p, _q))
    bp, bq = Modal("box", (_p,)), Modal("box", (_q,))
    fwd_prem = s.add(Implies(Iff(_p, _q), Implies(And(_p, _p), _q)), Taut())
    fwd_p = s.add(Implies(And(_p, _p), _q), MP(eq, fwd_prem))
    fwd = s.add(Implies(And(bp, bp), bq), RuleInstance(1, _sub({"a": _p, "b": _p, "c": _q}), fwd_p))
    bwd_prem = s.add(Implies(Iff(_p, _q), Implies(And(_q, _q), _p)), Taut())
    bwd_p = s.add(Implies(And(_q, _q), _p), MP(eq, bwd_prem))
    bwd = s.add(Implies(And(bq, bq), bp), RuleInstance(1, _sub({"a": _q, "b": _q, "c": _p}), bwd_p))
    goal = Iff(bp, bq)
    f_fwd, f_bwd = s.lines[fwd - 1].formula, s.lines[bwd - 1].formula
    glue = s.add(Implies(f_fwd, Implies(f_bwd, goal)), Taut())
    g1 = s.add(Implies(f_bwd, goal), MP(fwd, glue))
    s.add(goal, MP(bwd, g1))
    return s


def at_ref_script() -> ProofScript:
    s = ProofScript(K_SIG, k_rules())
    s.add(At("i", Nom("i")), AxiomInstance("ref", _sub({}, {})))
    return s


def derived_rule_fixtures() -> list:
    """Accepted scripts witnessing the back axiom, Name' and NameCong."""
    return [
        ("back-axiom", back_axiom_script()),
        ("name-prime", name_prime_script()),
        ("name-cong", name_cong_script()),
    ]


__all__ = [
    "AXIOMS",
    "mob_axiom",
    "axiom_scheme",
    "da_instance",
    "Taut",
    "AxiomInstance",
    "PureAxiom",
    "TBox",
    "Local",
    "MP",
    "AtGen",
    "RuleInstance",
    "Name",
    "PasteOp",
    "DA",
    "ProofLine",
    "ProofScript",
    "Accepted",
    "Rejected",
    "check_proof",
    "check_derives",
    "parse_proof",
    "load_proof",
    "format_proof",
    "parse_justification",
    "format_justification",
    "parse_substitution",
    "format_substitution",
    "derived_rule_fixtures",
    "back_axiom_script",
    "name_prime_script",
    "name_cong_script",
    "at_ref_script",
]
