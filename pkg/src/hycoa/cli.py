"""Command-line front end: ``hycoa check|validate|frame-check|prove|sat|onestep``.

Exit codes: 0 positive verdict (valid, sat, accepted), 1 negative verdict
(invalid, unsat-within-bounds, rejected), 2 error (parse, configuration,
resource bound).  ``--format machine`` prints one JSON report with sorted
keys and no timing, so identical runs give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .coalgebra import frame_satisfies_pure, satisfies, truth_set
from .errors import HycoaError, NotPure, ResourceBound
from .formats import (
    format_bounds,
    format_model,
    load_model,
    load_onestep,
    load_problem,
    load_signature_spec,
    parse_bounds,
    parse_formula_list,
    parse_model,
)
from .functors import DEFAULT_BOUNDS, Multiset, SearchBounds
from .hilbert import Accepted, check_derives, check_proof, load_proof
from .namedmodel import NamedModelProblem, named_model_search, verify_named_model
from .onestep import agreement_check, one_step_sat, verify_witness
from .rules import load_ruleset
from .syntax import ParseError, parse, show

POSITIVE = ("valid", "sat", "accepted")
NEGATIVE = ("invalid", "unsat-within-bounds", "rejected")
EXIT_CODES = {**{v: 0 for v in POSITIVE}, **{v: 1 for v in NEGATIVE}, "error": 2}


@dataclass
class Report:
    command: str
    verdict: str
    witness: dict | None = None
    detail: dict = field(default_factory=dict)
    message: str = ""
    seconds: float = 0.0

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def machine(self) -> str:
        obj = {"command": self.command, "verdict": self.verdict, "witness": self.witness,
               "detail": self.detail, "message": self.message}
        return json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n"

    def human(self) -> str:
        lines = [f"{self.command}: {self.verdict}"]
        if self.message:
            lines.append(self.message)
        for k in sorted(self.detail):
            v = self.detail[k]
            if isinstance(v, str) and "\n" in v:
                lines.append(f"{k}:")
                lines.extend("  " + x for x in v.rstrip("\n").split("\n"))
            else:
                lines.append(f"{k}: {v}")
        if self.witness:
            for k in sorted(self.witness):
                v = self.witness[k]
                if isinstance(v, str) and "\n" in v:
                    lines.append(f"witness {k}:")
                    lines.extend("  " + x for x in v.rstrip("\n").split("\n"))
                else:
                    lines.append(f"witness {k}: {v}")
        lines.append(f"time: {self.seconds:.3f}s")
        return "\n".join(lines) + "\n"


@dataclass
class RunConfig:
    command: str
    model: str | None = None
    formula: str | None = None
    state: str | None = None
    axioms: str | None = None
    proof: str | None = None
    problem: str | None = None
    sig: str | None = None
    rules: str | None = None
    bounds: SearchBounds = DEFAULT_BOUNDS
    bound_flags: dict = field(default_factory=dict)
    seed: int = 0
    fmt: str = "human"
    out: str | None = None


# ---------------------------------------------------------------- helpers


def _need(cfg: RunConfig, attr: str) -> str:
    val = getattr(cfg, attr)
    if val is None:
        raise HycoaError(f"{cfg.command} needs --{attr}")
    if attr in ("model", "axioms", "proof", "problem") and not Path(val).is_file():
        raise HycoaError(f"no such file: {val}")
    return val


def _sig_for(cfg: RunConfig, default):
    return load_signature_spec(cfg.sig) if cfg.sig else default


def _with_flags(b: SearchBounds, flags: dict) -> SearchBounds:
    vals = {k: getattr(b, k) for k in ("max_multiplicity", "max_strategies", "max_states", "max_enum", "max_nodes")}
    vals.update(flags)
    return SearchBounds(**vals)


# ---------------------------------------------------------------- commands


def cmd_check(cfg: RunConfig) -> Report:
    m = load_model(_need(cfg, "model"))
    sig = _sig_for(cfg, m.functor.signature)
    f = parse(_need(cfg, "formula"), sig)
    if cfg.state is not None:
        if cfg.state not in m.carrier:
            raise HycoaError(f"unknown state {cfg.state}")
        ok = satisfies(m, cfg.state, f)
        wit = None if ok else {"state": cfg.state}
        return Report("check", "valid" if ok else "invalid", wit, {"formula": show(f), "scope": cfg.state})
    ext = truth_set(m, f)
    failing = [s for s in m.states if s not in ext]
    if not failing:
        return Report("check", "valid", None, {"formula": show(f), "scope": "global"})
    # re-verify the witness through the pointwise relation
    assert not satisfies(m, failing[0], f)
    return Report("check", "invalid", {"state": failing[0]}, {"formula": show(f), "scope": "global",
                                                               "failing_states": " ".join(map(str, failing))})


def cmd_validate(cfg: RunConfig) -> Report:
    checked = {}
    sig = None
    if cfg.sig:
        sig = load_signature_spec(cfg.sig)
        checked["sig"] = sig.name
    if cfg.rules:
        rs = load_ruleset(cfg.rules)
        checked["rules"] = f"{rs.name} ({len(rs)} rules)"
    if cfg.model:
        m = load_model(_need(cfg, "model"))
        sig = sig or m.functor.signature
        checked["model"] = f"{m.functor.name}, {len(m.states)} states"
    if cfg.formula:
        f = parse(cfg.formula, sig or load_signature_spec("K"))
        checked["formula"] = show(f)
    if cfg.axioms:
        axs = parse_formula_list(Path(_need(cfg, "axioms")).read_text(encoding="utf-8"), sig or load_signature_spec("K"))
        checked["axioms"] = f"{len(axs)} formulas"
    if cfg.proof:
        script = load_proof(_need(cfg, "proof"))
        checked["proof"] = f"{len(script.lines)} lines"
    if cfg.problem:
        p = load_problem(_need(cfg, "problem"))
        checked["problem"] = f"{p.functor.name}, {len(p.goal)} goal formulas"
    if not checked:
        raise HycoaError("validate needs at least one input")
    return Report("validate", "valid", None, checked)


def cmd_frame_check(cfg: RunConfig) -> Report:
    m = load_model(_need(cfg, "model"))
    sig = _sig_for(cfg, m.functor.signature)
    if cfg.axioms:
        axioms = parse_formula_list(Path(_need(cfg, "axioms")).read_text(encoding="utf-8"), sig)
    else:
        axioms = [parse(_need(cfg, "formula"), sig)]
    res = frame_satisfies_pure(m.functor, m.states, m.gamma, axioms)
    detail = {"axioms": " ; ".join(show(a) for a in axioms)}
    if res.holds:
        return Report("frame-check", "valid", None, detail)
    fail = res.failure
    # re-verify: the axiom is false at the reported state under the assignment
    assert not satisfies(m.with_noms(fail.assignment), fail.state, fail.axiom)
    wit = {"axiom": show(fail.axiom), "state": fail.state,
           "assignment": " ".join(f"{i}'={s}" for i, s in sorted(fail.assignment.items()))}
    return Report("frame-check", "invalid", wit, detail, fail.describe())


def cmd_prove(cfg: RunConfig) -> Report:
    script = load_proof(_need(cfg, "proof"))
    res = check_proof(script)
    detail = {"lines": len(script.lines)}
    if not isinstance(res, Accepted):
        return Report("prove", "rejected", {"line": res.line, "reason": res.reason}, detail, res.detail)
    detail["conclusion"] = show(res.formula)
    detail["depends_on_local"] = res.local
    if cfg.formula:
        goal = parse(cfg.formula, script.sig)
        if not check_derives(script.tbox, script.local, goal, script):
            return Report("prove", "rejected", {"line": len(script.lines), "reason": "goal-mismatch"}, detail,
                          f"script does not derive {show(goal)}")
        detail["goal"] = show(goal)
    return Report("prove", "accepted", None, detail)


def cmd_sat(cfg: RunConfig) -> Report:
    pf = load_problem(_need(cfg, "problem"), cfg.bounds)
    bounds = _with_flags(pf.bounds, cfg.bound_flags)
    if cfg.rules:
        pf.ruleset = load_ruleset(cfg.rules)
    prob = NamedModelProblem(pf.functor, pf.sig, pf.ruleset, pf.axioms, pf.tbox, pf.goal, bounds)
    res = named_model_search(prob)
    detail = {"bounds": format_bounds(bounds), "goal": " ; ".join(show(g) for g in pf.goal)}
    if not res.sat:
        return Report("sat", "unsat-within-bounds", None, detail, "no model exists within the bounds")
    text = format_model(res.model)
    # re-verify the emitted file through the independent satisfaction path
    reread = parse_model(text)
    rep = verify_named_model(reread, res.designated, prob, res.labels)
    if not rep.ok:
        raise HycoaError("internal error: emitted model fails verification: " + "; ".join(rep.failures))
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
        detail["model_file"] = cfg.out
    detail["states"] = len(res.model.states)
    return Report("sat", "sat", {"designated": res.designated, "model": text}, detail)


def cmd_onestep(cfg: RunConfig) -> Report:
    of = load_onestep(_need(cfg, "problem"))
    bounds = _with_flags(cfg.bounds, cfg.bound_flags)
    rules = load_ruleset(cfg.rules) if cfg.rules else of.ruleset
    p = of.problem
    res = one_step_sat(p, of.functor, bounds)
    detail = {"functor": of.functor.name, "base": " ".join(sorted(map(str, p.X))),
              "constraints": " ; ".join(show(f) for f in p.Xi)}
    if rules is not None:
        ag = agreement_check(p, of.functor, rules, bounds)
        detail["rules"] = rules.name
        detail["consistent"] = ag.consistent
        detail["agree"] = ag.agree
    if not res:
        return Report("onestep", "unsat-within-bounds", None, detail, "no element of TX satisfies the constraints")
    assert verify_witness(p, of.functor, res.witness)
    return Report("onestep", "sat", {"element": _show_element(res.witness)}, detail)


def _show_element(t) -> str:
    if isinstance(t, Multiset):
        return "{" + " ".join(f"{x}={m}" for x, m in sorted(t.items(), key=lambda kv: str(kv[0]))) + "}"
    if isinstance(t, frozenset):
        inner = []
        for x in sorted(t, key=lambda v: (isinstance(v, frozenset), sorted(map(str, v)) if isinstance(v, frozenset) else str(v))):
            inner.append("{" + " ".join(sorted(map(str, x))) + "}" if isinstance(x, frozenset) else str(x))
        return "{" + " ".join(inner) + "}"
    return repr(t)


COMMANDS = {
    "check": cmd_check,
    "validate": cmd_validate,
    "frame-check": cmd_frame_check,
    "prove": cmd_prove,
    "sat": cmd_sat,
    "onestep": cmd_onestep,
}


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hycoa", description="Coalgebraic hybrid logic workbench")
    ap.add_argument("--version", action="version", version=f"hycoa {__version__}")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--model")
    ap.add_argument("--formula")
    ap.add_argument("--state")
    ap.add_argument("--axioms")
    ap.add_argument("--proof")
    ap.add_argument("--problem")
    ap.add_argument("--sig")
    ap.add_argument("--rules")
    ap.add_argument("--max-states", type=int)
    ap.add_argument("--max-mult", type=int)
    ap.add_argument("--max-nodes", type=int)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--format", choices=("human", "machine"), default="human")
    ap.add_argument("--out", help="write the model found by 'sat' to this file")
    return ap


def config_from_args(ns: argparse.Namespace, env: dict | None = None) -> RunConfig:
    env = os.environ if env is None else env
    bounds = DEFAULT_BOUNDS
    if env.get("HYCOA_BOUNDS"):
        bounds = parse_bounds(env["HYCOA_BOUNDS"])
    flags = {}
    for attr, key in (("max_states", "max_states"), ("max_mult", "max_multiplicity"), ("max_nodes", "max_nodes")):
        v = getattr(ns, attr)
        if v is not None:
            flags[key] = v
    bounds = _with_flags(bounds, flags)
    return RunConfig(ns.command, ns.model, ns.formula, ns.state, ns.axioms, ns.proof, ns.problem, ns.sig, ns.rules,
                     bounds, flags, ns.seed, ns.format, ns.out)


def run(argv: list | None = None, env: dict | None = None) -> tuple:
    """Run one command; returns ``(exit code, output text)``."""
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return (2 if e.code else 0), ""
    fmt = ns.format
    start = time.perf_counter()
    try:
        cfg = config_from_args(ns, env)
        rep = COMMANDS[cfg.command](cfg)
    except ResourceBound as e:
        rep = Report(ns.command, "error", None, {"kind": "resource-bound"}, str(e))
    except NotPure as e:
        rep = Report(ns.command, "error", None, {"kind": "not-pure"}, str(e))
    except ParseError as e:
        rep = Report(ns.command, "error", None, {"kind": "parse"}, str(e))
    except (HycoaError, ValueError, KeyError, OSError) as e:
        rep = Report(ns.command, "error", None, {"kind": "config"}, str(e))
    rep.seconds = time.perf_counter() - start
    return rep.exit_code, rep.machine() if fmt == "machine" else rep.human()


def main(argv: list | None = None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
