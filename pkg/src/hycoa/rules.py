"""One-step rules and rule sets.

A one-step rule ``premise / conclusion`` has a purely propositional
premise over rule variables and a conclusion that is a boolean combination
of modal atoms ``op(a1, ..., an)`` whose arguments are propositional.

Rule files contain ``sig: <name>`` and lines ``rule <name>: <premise> / <conclusion>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .syntax import (
    And,
    At,
    Down,
    Formula,
    GRADED_SIG,
    K_SIG,
    CK_SIG,
    Modal,
    Not,
    ParseError,
    Prop,
    SimilarityType,
    Top,
    parse,
    prop_vars,
    show,
    signature_by_name,
)


def is_propositional(f: Formula) -> bool:
    if isinstance(f, (Top, Prop)):
        return True
    if isinstance(f, Not):
        return is_propositional(f.arg)
    if isinstance(f, And):
        return is_propositional(f.left) and is_propositional(f.right)
    return False


def is_one_step(f: Formula) -> bool:
    """Is ``f`` in Prop(Lambda(P)): one modal layer over propositional formulas?"""
    if isinstance(f, Top):
        return True
    if isinstance(f, Not):
        return is_one_step(f.arg)
    if isinstance(f, And):
        return is_one_step(f.left) and is_one_step(f.right)
    if isinstance(f, Modal):
        return all(is_propositional(a) for a in f.args)
    return False


def modal_atoms(f: Formula) -> list:
    """Modal subformulas at the top modal layer, in first-occurrence order."""
    out = []
    seen = set()

    def walk(g):
        if isinstance(g, Modal):
            if g not in seen:
                seen.add(g)
                out.append(g)
        elif isinstance(g, Not):
            walk(g.arg)
        elif isinstance(g, And):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (At, Down)):
            walk(g.arg)

    walk(f)
    return out


@dataclass(frozen=True)
class OneStepRule:
    name: str
    premise: Formula
    conclusion: Formula

    def __post_init__(self):
        if not is_propositional(self.premise):
            raise ValueError(f"rule {self.name}: premise must be propositional")
        if not is_one_step(self.conclusion):
            raise ValueError(f"rule {self.name}: conclusion must be one modal layer over variables")

    @property
    def variables(self) -> list:
        return sorted(prop_vars(self.premise) | prop_vars(self.conclusion))

    def __str__(self):
        return f"{show(self.premise)} / {show(self.conclusion)}"


@dataclass(frozen=True)
class RuleSet:
    name: str
    rules: tuple
    sig: SimilarityType = K_SIG

    def __len__(self):
        return len(self.rules)

    def __getitem__(self, idx: int) -> OneStepRule:
        return self.rules[idx]

    def by_name(self, name: str) -> OneStepRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)


def parse_rules(text: str, name: str = "custom", sig: SimilarityType | None = None) -> RuleSet:
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("sig:"):
            sig = signature_by_name(line[4:].strip())
            continue
        if line.startswith("name:"):
            name = line[5:].strip()
            continue
        if not line.startswith("rule"):
            raise ParseError(f"line {lineno}: expected 'rule <name>: <premise> / <conclusion>'")
        head, sep, body = line[4:].partition(":")
        if not sep or "/" not in body:
            raise ParseError(f"line {lineno}: expected 'rule <name>: <premise> / <conclusion>'")
        prem_text, _, concl_text = body.partition(" / ")
        if not concl_text:
            raise ParseError(f"line {lineno}: premise and conclusion must be separated by ' / '")
        sig = sig or K_SIG
        try:
            rules.append(OneStepRule(head.strip() or f"r{len(rules)}", parse(prem_text, sig), parse(concl_text, sig)))
        except ValueError as e:
            raise ParseError(f"line {lineno}: {e}") from None
    return RuleSet(name, tuple(rules), sig or K_SIG)


def format_rules(rs: RuleSet) -> str:
    lines = [f"name: {rs.name}", f"sig: {rs.sig.name}"]
    for r in rs.rules:
        lines.append(f"rule {r.name}: {show(r.premise)} / {show(r.conclusion)}")
    return "\n".join(lines) + "\n"


def load_rules(path: str | Path) -> RuleSet:
    path = Path(path)
    return parse_rules(path.read_text(encoding="utf-8"), path.stem)


# ---------------------------------------------------------------- shipped rule sets


_K_TEXT = """\
name: K
sig: K
rule nec: a / box a
rule k: ((a & b) -> c) / ((box a & box b) -> box c)
# dia is primitive here, so its duality with box is a rule
rule dual: (a <-> ~ b) / (dia a <-> ~ box b)
"""


def _graded_text(max_grade: int) -> str:
    lines = [f"name: graded:{max_grade}", "sig: graded"]
    for k in range(max_grade + 1):
        lines.append(f"rule mono{k}: (a -> b) / (<{k}> a -> <{k}> b)")
        lines.append(f"rule empty{k}: ~ a / ~ <{k}> a")
        if k + 1 <= max_grade:
            lines.append(f"rule down{k}: true / (<{k + 1}> a -> <{k}> a)")
        for l in range(max_grade + 1 - k):
            lines.append(f"rule split{k}_{l}: true / (<{k + l}> (a | b) -> (<{k}> a | <{l}> b))")
            if k + l + 1 <= max_grade:
                lines.append(f"rule join{k}_{l}: ~ (a & b) / ((<{k}> a & <{l}> b) -> <{k + l + 1}> (a | b))")
    return "\n".join(lines) + "\n"


_CK_TEXT = """\
name: CK
sig: CK
rule ck0: b0 / (a0 => b0)
rule ck1: ((a0 <-> a1) & (b1 -> b0)) / ((a1 => b1) -> (a0 => b0))
rule ck2: (((a0 <-> a1) & (a0 <-> a2)) & ((b1 & b2) -> b0)) / (((a1 => b1) & (a2 => b2)) -> (a0 => b0))
rule dual: ((a0 <-> a1) & (b <-> ~ c)) / ((a0 > b) <-> ~ (a1 => c))
"""


def k_rules() -> RuleSet:
    return parse_rules(_K_TEXT)


def graded_rules(max_grade: int = 3) -> RuleSet:
    return parse_rules(_graded_text(max_grade))


def ck_rules() -> RuleSet:
    return parse_rules(_CK_TEXT)


def ruleset_by_name(name: str) -> RuleSet:
    if name == "K":
        return k_rules()
    if name.startswith("graded"):
        _, _, g = name.partition(":")
        return graded_rules(int(g) if g else 3)
    if name == "CK":
        return ck_rules()
    raise ValueError(f"unknown rule set {name!r}")


def load_ruleset(spec: str) -> RuleSet:
    """A shipped rule set by name, or a rule file path."""
    if Path(spec).is_file():
        return load_rules(spec)
    return ruleset_by_name(spec)


__all__ = [
    "OneStepRule",
    "RuleSet",
    "parse_rules",
    "format_rules",
    "load_rules",
    "load_ruleset",
    "k_rules",
    "graded_rules",
    "ck_rules",
    "ruleset_by_name",
    "is_propositional",
    "is_one_step",
    "modal_atoms",
    "GRADED_SIG",
    "CK_SIG",
]
