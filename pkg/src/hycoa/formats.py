"""Line-oriented text formats: models, one-step problems and search problems.

All formats are UTF-8, one directive per line, ``#`` starts a comment.
Formatting is deterministic so that round trips and machine reports are
byte-stable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .coalgebra import HybridModel
from .errors import ConfigError
from .functors import DEFAULT_BOUNDS, Game, Multiset, SearchBounds, Selection, functor_by_name
from .onestep import OneStepProblem
from .rules import RuleSet, load_ruleset
from .syntax import (
    NEIGHBORHOOD_SIG,
    ParseError,
    SimilarityType,
    coalition_signature,
    parse,
    parse_signature,
    show,
    signature_by_name,
)

_SET_RE = re.compile(r"\{([^{}]*)\}")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _nom_name(tok: str) -> str:
    return tok[:-1] if tok.endswith("'") else tok


def _set_tokens(text: str) -> list:
    sets = _SET_RE.findall(text)
    rest = _SET_RE.sub("", text).strip()
    if rest:
        raise ParseError(f"unexpected text {rest!r} outside braces")
    return [frozenset(s.split()) for s in sets]


def _fmt_set(S) -> str:
    return "{" + " ".join(map(str, _order(S))) + "}"


_ORDER: dict = {}


def _order(S) -> list:
    return sorted(S, key=lambda x: (_ORDER.get(x, math.inf), str(x)))


def default_signature(functor_name: str, agents=("a", "b")) -> SimilarityType:
    if functor_name == "kripke":
        return signature_by_name("K")
    if functor_name == "multigraph":
        return signature_by_name("graded")
    if functor_name in ("neighborhood", "monotone"):
        return NEIGHBORHOOD_SIG
    if functor_name == "selection":
        return signature_by_name("CK")
    if functor_name == "game":
        return coalition_signature(agents)
    raise ConfigError(f"unknown functor {functor_name!r}")


def load_signature_spec(spec: str) -> SimilarityType:
    """A shipped signature by name, or a signature file path."""
    p = Path(spec)
    if p.is_file():
        return parse_signature(p.read_text(encoding="utf-8"), p.stem)
    try:
        return signature_by_name(spec)
    except (KeyError, ValueError):
        raise ConfigError(f"unknown signature {spec!r}") from None


# ---------------------------------------------------------------- models


def parse_model(text: str) -> HybridModel:
    functor_name = None
    agents = ("a", "b")
    states = None
    succ, mult, nbhd, sel, sel_default, strat, out = {}, {}, {}, {}, {}, {}, {}
    props, noms = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ParseError(f"line {lineno}: expected '<directive>: ...'")
        head = head.split()
        body = body.strip()
        try:
            kind = head[0]
            if kind == "functor":
                functor_name = body
            elif kind == "agents":
                agents = tuple(body.split())
            elif kind == "states":
                states = body.split()
            elif kind == "succ":
                succ[head[1]] = frozenset(body.split())
            elif kind == "mult":
                d = {}
                for tok in body.split():
                    s, _, m = tok.partition("=")
                    d[s] = math.inf if m == "inf" else int(m)
                mult[head[1]] = Multiset(d)
            elif kind == "nbhd":
                nbhd[head[1]] = frozenset(_set_tokens(body))
            elif kind == "sel":
                arg, arrow, val = body.partition("->")
                if not arrow:
                    raise ParseError("expected '<set> -> <set>'")
                (v,) = _set_tokens(val)
                if arg.strip() == "default":
                    sel_default[head[1]] = v
                else:
                    (a,) = _set_tokens(arg)
                    sel.setdefault(head[1], {})[a] = v
            elif kind == "strat":
                strat.setdefault(head[1], {})[head[2]] = int(body)
            elif kind == "out":
                table = {}
                for prof, target in re.findall(r"\(([^()]*)\)\s*->\s*(\S+)", body):
                    table[tuple(int(x) - 1 for x in prof.split(","))] = target
                out[head[1]] = table
            elif kind == "val":
                props[head[1]] = frozenset(body.split())
            elif kind == "name":
                if len(body.split()) != 1:
                    raise ParseError("a nominal names exactly one state")
                noms[_nom_name(head[1])] = body
            else:
                raise ParseError(f"unknown directive {kind!r}")
        except (IndexError, ValueError) as e:
            raise ParseError(f"line {lineno}: {e}") from None
    if functor_name is None:
        raise ParseError("missing 'functor:' line")
    if states is None:
        raise ParseError("missing 'states:' line")
    try:
        functor = functor_by_name(functor_name, agents)
    except ValueError as e:
        raise ParseError(str(e)) from None
    gamma = {}
    for s in states:
        if functor_name == "kripke":
            gamma[s] = succ.get(s, frozenset())
        elif functor_name == "multigraph":
            gamma[s] = mult.get(s, Multiset())
        elif functor_name in ("neighborhood", "monotone"):
            gamma[s] = nbhd.get(s, frozenset())
        elif functor_name == "selection":
            gamma[s] = Selection.from_table(sel.get(s, {}), sel_default.get(s, frozenset()))
        elif functor_name == "game":
            sizes = tuple(strat.get(s, {}).get(a, 1) for a in functor.agents)
            table = out.get(s, {})
            outcome = []
            for prof in Game(sizes, ()).profiles():
                if prof not in table:
                    raise ParseError(f"state {s}: no outcome for profile {tuple(x + 1 for x in prof)}")
                outcome.append(table[prof])
            gamma[s] = Game(sizes, tuple(outcome))
    try:
        return HybridModel(functor, tuple(states), gamma, props, noms)
    except ValueError as e:
        raise ParseError(str(e)) from None


def format_model(m: HybridModel) -> str:
    _ORDER.clear()
    _ORDER.update({s: k for k, s in enumerate(m.states)})
    name = m.functor.name
    lines = [f"functor: {name}"]
    if name == "game":
        lines.append("agents: " + " ".join(m.functor.agents))
    lines.append("states: " + " ".join(map(str, m.states)))
    for s in m.states:
        t = m.gamma[s]
        if name == "kripke":
            lines.append(f"succ {s}: " + " ".join(map(str, _order(t))) if t else f"succ {s}:")
        elif name == "multigraph":
            body = " ".join(f"{x}={'inf' if k == math.inf else k}" for x, k in
                            sorted(t.items(), key=lambda kv: (_ORDER.get(kv[0], math.inf), str(kv[0]))))
            lines.append(f"mult {s}: {body}".rstrip())
        elif name in ("neighborhood", "monotone"):
            fam = sorted(t, key=lambda A: (len(A), [_ORDER.get(x, math.inf) for x in _order(A)]))
            lines.append(f"nbhd {s}: " + " ".join(_fmt_set(A) for A in fam) if fam else f"nbhd {s}:")
        elif name == "selection":
            entries = sorted(t.entries, key=lambda e: (len(e[0]), [_ORDER.get(x, math.inf) for x in _order(e[0])]))
            for a, v in entries:
                lines.append(f"sel {s}: {_fmt_set(a)} -> {_fmt_set(v)}")
            lines.append(f"sel {s}: default -> {_fmt_set(t.default)}")
        elif name == "game":
            for a, k in zip(m.functor.agents, t.sizes):
                lines.append(f"strat {s} {a}: {k}")
            outs = " ".join(f"({','.join(str(x + 1) for x in prof)})->{t.outcome_of(prof)}" for prof in t.profiles())
            lines.append(f"out {s}: {outs}")
    for p in sorted(m.props):
        lines.append(f"val {p}: " + " ".join(map(str, _order(m.props[p]))) if m.props[p] else f"val {p}:")
    for i in sorted(m.noms):
        lines.append(f"name {i}': {m.noms[i]}")
    return "\n".join(lines) + "\n"


def load_model(path: str | Path) -> HybridModel:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def model_signature(m: HybridModel) -> SimilarityType:
    return m.functor.signature


# ---------------------------------------------------------------- one-step problems


@dataclass
class OneStepFile:
    problem: OneStepProblem
    functor: object
    sig: SimilarityType
    ruleset: RuleSet | None = None


def parse_onestep(text: str, base_dir: Path | None = None) -> OneStepFile:
    functor_name, agents, sig, rules = "kripke", ("a", "b"), None, None
    base, tau, constraints = None, {}, []
    pending = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ParseError(f"line {lineno}: expected '<directive>: ...'")
        head = head.split()
        body = body.strip()
        if head[0] == "functor":
            functor_name = body
        elif head[0] == "agents":
            agents = tuple(body.split())
        elif head[0] == "sig":
            sig = load_signature_spec(_resolve(body, base_dir))
        elif head[0] == "rules":
            rules = body
        elif head[0] == "base":
            base = body.split()
        elif head[0] == "tau" and len(head) == 2:
            tau[head[1]] = frozenset(body.split())
        elif head[0] == "constraint":
            pending.append((lineno, body))
        else:
            raise ParseError(f"line {lineno}: unknown directive {head[0]!r}")
    if base is None:
        raise ParseError("missing 'base:' line")
    try:
        functor = functor_by_name(functor_name, agents)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    sig = sig or functor.signature
    for lineno, body in pending:
        try:
            constraints.append(parse(body, sig))
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e}") from None
    ruleset = _load_rules(rules, base_dir) if rules else None
    try:
        prob = OneStepProblem(frozenset(base), tau, tuple(constraints))
    except ValueError as e:
        raise ParseError(str(e)) from None
    return OneStepFile(prob, functor, sig, ruleset)


def format_onestep(f: OneStepFile) -> str:
    p = f.problem
    lines = [f"functor: {f.functor.name}"]
    if f.functor.name == "game":
        lines.append("agents: " + " ".join(f.functor.agents))
    lines.append("base: " + " ".join(sorted(map(str, p.X))))
    for a in sorted(p.tau):
        lines.append(f"tau {a}: " + " ".join(sorted(map(str, p.tau[a]))))
    for c in p.Xi:
        lines.append(f"constraint: {show(c)}")
    return "\n".join(lines) + "\n"


def load_onestep(path: str | Path) -> OneStepFile:
    path = Path(path)
    return parse_onestep(path.read_text(encoding="utf-8"), path.parent)


# ---------------------------------------------------------------- search problems


_BOUND_KEYS = {
    "max_states": "max_states",
    "max_mult": "max_multiplicity",
    "max_multiplicity": "max_multiplicity",
    "max_strat": "max_strategies",
    "max_strategies": "max_strategies",
    "max_enum": "max_enum",
    "max_nodes": "max_nodes",
}


def parse_bounds(text: str, base: SearchBounds = DEFAULT_BOUNDS) -> SearchBounds:
    """``key=value`` pairs (space or comma separated) over ``base``."""
    values = {}
    for tok in re.split(r"[\s,]+", text.strip()):
        if not tok:
            continue
        k, sep, v = tok.partition("=")
        if not sep or k not in _BOUND_KEYS:
            raise ConfigError(f"bad bound {tok!r}; known keys: {', '.join(sorted(_BOUND_KEYS))}")
        try:
            values[_BOUND_KEYS[k]] = int(v)
        except ValueError:
            raise ConfigError(f"bound {k} must be an integer") from None
    fields_ = {k: getattr(base, k) for k in ("max_multiplicity", "max_strategies", "max_states", "max_enum", "max_nodes")}
    fields_.update(values)
    try:
        return SearchBounds(**fields_)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def format_bounds(b: SearchBounds) -> str:
    return (f"max_states={b.max_states} max_mult={b.max_multiplicity} max_strat={b.max_strategies} "
            f"max_enum={b.max_enum} max_nodes={b.max_nodes}")


@dataclass
class ProblemFile:
    functor: object
    sig: SimilarityType
    ruleset: RuleSet | None
    axioms: list = field(default_factory=list)
    tbox: list = field(default_factory=list)
    goal: list = field(default_factory=list)
    bounds: SearchBounds = DEFAULT_BOUNDS
    bounds_given: dict = field(default_factory=dict)


def _resolve(ref: str, base_dir: Path | None) -> str:
    if base_dir is not None and not Path(ref).is_absolute() and (base_dir / ref).exists():
        return str(base_dir / ref)
    return ref


def _load_rules(ref: str, base_dir: Path | None) -> RuleSet:
    try:
        return load_ruleset(_resolve(ref, base_dir))
    except (ValueError, OSError) as e:
        raise ConfigError(f"cannot load rules {ref!r}: {e}") from None


_SECTIONS = ("functor", "agents", "sig", "rules", "axioms", "tbox", "goal", "bounds")


def parse_problem(text: str, base_dir: Path | None = None, bounds: SearchBounds = DEFAULT_BOUNDS) -> ProblemFile:
    """Sections ``functor: rules: axioms: tbox: goal: bounds:`` (plus optional
    ``sig:`` and ``agents:``).  Formula sections take one formula per line,
    either inline after the header or on the following lines."""
    raw_sections = {k: [] for k in _SECTIONS}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        m = re.match(r"^([a-z]+):\s*(.*)$", line)
        if m and m.group(1) in _SECTIONS:
            current = m.group(1)
            if m.group(2):
                raw_sections[current].append((lineno, m.group(2)))
            continue
        if current is None:
            raise ParseError(f"line {lineno}: text before the first section")
        raw_sections[current].append((lineno, line))

    def single(key, default=None):
        vals = raw_sections[key]
        if not vals:
            return default
        if len(vals) > 1:
            raise ParseError(f"line {vals[1][0]}: section {key}: takes one value")
        return vals[0][1]

    functor_name = single("functor")
    if functor_name is None:
        raise ParseError("missing 'functor:' section")
    agents = tuple((single("agents") or "a b").split())
    try:
        functor = functor_by_name(functor_name, agents)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    sig_ref = single("sig")
    sig = load_signature_spec(_resolve(sig_ref, base_dir)) if sig_ref else functor.signature
    rules_ref = single("rules")
    ruleset = _load_rules(rules_ref, base_dir) if rules_ref else None

    def formulas(key):
        out = []
        for lineno, body in raw_sections[key]:
            try:
                out.append(parse(body, sig))
            except ParseError as e:
                raise ParseError(f"line {lineno}: {e}") from None
        return out

    given = {}
    b = bounds
    bt = single("bounds")
    if bt:
        b = parse_bounds(bt, bounds)
        given = {k: getattr(b, k) for k in ("max_multiplicity", "max_strategies", "max_states", "max_enum", "max_nodes")}
    return ProblemFile(functor, sig, ruleset, formulas("axioms"), formulas("tbox"), formulas("goal"), b, given)


def format_problem(p: ProblemFile) -> str:
    lines = [f"functor: {p.functor.name}"]
    if p.functor.name == "game":
        lines.append("agents: " + " ".join(p.functor.agents))
    if p.ruleset is not None:
        lines.append(f"rules: {p.ruleset.name}")
    for key, fs in (("axioms", p.axioms), ("tbox", p.tbox), ("goal", p.goal)):
        lines.append(f"{key}:")
        lines.extend(f"  {show(f)}" for f in fs)
    lines.append(f"bounds: {format_bounds(p.bounds)}")
    return "\n".join(lines) + "\n"


def load_problem(path: str | Path, bounds: SearchBounds = DEFAULT_BOUNDS) -> ProblemFile:
    path = Path(path)
    return parse_problem(path.read_text(encoding="utf-8"), path.parent, bounds)


def parse_formula_list(text: str, sig: SimilarityType) -> list:
    """One formula per non-empty, non-comment line."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if line:
            try:
                out.append(parse(line, sig))
            except ParseError as e:
                raise ParseError(f"line {lineno}: {e}") from None
    return out


__all__ = [
    "parse_model",
    "format_model",
    "load_model",
    "parse_onestep",
    "format_onestep",
    "load_onestep",
    "OneStepFile",
    "parse_problem",
    "format_problem",
    "load_problem",
    "ProblemFile",
    "parse_bounds",
    "format_bounds",
    "parse_formula_list",
    "default_signature",
    "load_signature_spec",
]
