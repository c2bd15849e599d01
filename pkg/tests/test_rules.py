from __future__ import annotations

import pytest

from hycoa.rules import (
    OneStepRule,
    ck_rules,
    format_rules,
    graded_rules,
    is_one_step,
    k_rules,
    load_ruleset,
    parse_rules,
    ruleset_by_name,
)
from hycoa.syntax import GRADED_SIG, ParseError, parse


def test_shipped_k_rules():
    rs = k_rules()
    assert rs.name == "K"
    assert str(rs.by_name("nec")) == "a / box a"
    assert str(rs.by_name("k")) == "((a & b) -> c) / ((box a & box b) -> box c)"


def test_rule_shape_is_checked():
    with pytest.raises(ValueError):
        OneStepRule("bad", parse("box a"), parse("box a"))
    with pytest.raises(ValueError):
        OneStepRule("bad", parse("a"), parse("box box a"))
    with pytest.raises(ValueError):
        OneStepRule("bad", parse("a"), parse("box i'"))
    assert is_one_step(parse("(box a -> ~ dia (a & b))"))


@pytest.mark.parametrize("rs", [k_rules(), graded_rules(2), ck_rules()], ids=lambda r: r.name)
def test_format_parse_round_trip(rs):
    again = parse_rules(format_rules(rs))
    assert again.name == rs.name
    assert [(r.name, r.premise, r.conclusion) for r in again.rules] == \
        [(r.name, r.premise, r.conclusion) for r in rs.rules]


def test_graded_name_carries_grade():
    assert graded_rules(2).name == "graded:2"
    assert len(ruleset_by_name("graded:2").rules) == len(graded_rules(2).rules)
    assert ruleset_by_name("graded").name == "graded:3"


def test_load_ruleset_from_file(tmp_path):
    p = tmp_path / "mine.rules"
    p.write_text("sig: graded\nrule m: (a -> b) / (<0> a -> <0> b)\n")
    rs = load_ruleset(str(p))
    assert rs.sig is GRADED_SIG and rs.rules[0].name == "m"
    assert load_ruleset("K").name == "K"
    with pytest.raises(ValueError):
        load_ruleset("nonsense")


def test_rule_file_errors():
    with pytest.raises(ParseError):
        parse_rules("rule x: a box a")
    with pytest.raises(ParseError):
        parse_rules("axiom x: a / box a")
