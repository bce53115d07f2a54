"""Command-line interface: ``unionsplit <command> ...``.

Every command prints one result object (JSON by default) on stdout and exits
with 0 for yes, 1 for no, 2 for unknown and 3 for input errors.  Diagnostics
go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .algebra import validates
from .decider import (
    BudgetExhausted, axiomatization_problem_decider, equivalence_report, is_consistent,
    is_decidable_formula, is_splitting, is_union_splitting, violates_condition_four,
)
from .formula import Formula, FormulaSyntaxError, parse, to_text
from .frame import (
    IRREFLEXIVE_POINT, REFLEXIVE_POINT, Frame, enumerate_frames, frame_from_json,
    is_cycle_free, is_rooted,
)
from .jankov import JankovAxiomSet, NotAJankovFrame, jankov_formula, jankov_logic_equal
from .kprover import Budget, Outcome, ProofCertificate, is_jankov_countermodel, member_of_jankov_logic

EXIT = {Outcome.YES: 0, Outcome.NO: 1, Outcome.UNKNOWN: 2}
INPUT_ERROR = 3

UNDECIDABLE_NOTE = (
    "neither logic was shown to be a union-splitting or inconsistent within budget; "
    "logic equality is undecidable in general"
)


class InputError(Exception):
    pass


def _result(query: dict, verdict: Outcome, witness: Any = None, effort: dict | None = None,
            cursor: dict | None = None) -> dict:
    return {
        "query": query,
        "verdict": verdict.value,
        "witness": witness if witness is not None else {},
        "effort": effort or {},
        "cursor": cursor or {},
    }


def _budget(args) -> Budget:
    try:
        return Budget(args.max_steps, args.max_frame_size, args.max_subst_depth, args.max_prefix)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _budget_json(b: Budget) -> dict:
    return {"max_frame_size": b.max_frame_size, "max_steps": b.max_candidates,
            "max_subst_depth": b.max_subst_depth, "max_prefix": b.max_prefix}


def _formula(text: str) -> Formula:
    try:
        return parse(text)
    except FormulaSyntaxError as exc:
        raise InputError(f"malformed formula {text!r}: {exc}") from None


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _frame_file(path: str) -> Frame:
    data = _read_json(path)
    try:
        return frame_from_json(data)
    except ValueError as exc:
        raise InputError(f"malformed frame in {path}: {exc}") from None


def _axiom_file(path: str) -> JankovAxiomSet:
    data = _read_json(path)
    try:
        return JankovAxiomSet.from_json(data)
    except ValueError as exc:
        raise InputError(f"malformed axiom set in {path}: {exc}") from None


def _us_witness(res) -> dict | None:
    if res.outcome is Outcome.YES:
        cert = res.certificate.to_json() if res.certificate is not None else None
        return {"axiomatization": res.axiomatization.to_json(), "certificate": cert}
    if res.outcome is Outcome.NO:
        return {"counterexample": res.counterexample.to_json()}
    return None


# ---------------------------------------------------------------- commands

def cmd_check_union_splitting(args) -> dict:
    f = _formula(args.formula)
    budget = _budget(args)
    cursor = None
    if args.resume:
        saved = _read_json(args.resume)
        cursor = saved.get("cursor") if isinstance(saved, dict) else None
        if not isinstance(cursor, dict):
            raise InputError(f"{args.resume} holds no resumable cursor")
    res = is_union_splitting(f, budget, cursor)
    query = {"command": "check-union-splitting", "formula": to_text(f), "budget": _budget_json(budget)}
    return _result(query, res.outcome, _us_witness(res), res.verdict.effort, res.cursor)


def cmd_check_splitting(args) -> dict:
    f = _formula(args.formula)
    budget = _budget(args)
    v = is_splitting(f, budget)
    us = is_union_splitting(f, budget)
    witness = _us_witness(us) or {}
    if v.outcome is Outcome.YES:
        witness["splitting_frame"] = v.witness.to_json()
    query = {"command": "check-splitting", "formula": to_text(f), "budget": _budget_json(budget)}
    return _result(query, v.outcome, witness, v.effort, us.cursor)


def _consistency_witness(f: Formula) -> dict:
    named = {"reflexive point": REFLEXIVE_POINT, "irreflexive point": IRREFLEXIVE_POINT}
    return {name: validates(fr, f) for name, fr in named.items()}


def cmd_consistent(args) -> dict:
    f = _formula(args.formula)
    ok = is_consistent(f)
    query = {"command": "consistent", "formula": to_text(f)}
    return _result(query, Outcome.YES if ok else Outcome.NO, {"validated_by": _consistency_witness(f)})


def cmd_decidable_formula(args) -> dict:
    f = _formula(args.formula)
    budget = _budget(args)
    v = is_decidable_formula(f, budget)
    query = {"command": "decidable-formula", "formula": to_text(f), "budget": _budget_json(budget)}
    if not is_consistent(f):
        return _result(query, v.outcome, {"inconsistent": True}, v.effort)
    res = is_union_splitting(f, budget)
    return _result(query, v.outcome, _us_witness(res), v.effort, res.cursor)


def cmd_equal(args) -> dict:
    f, g = _formula(args.formula), _formula(args.other)
    budget = _budget(args)
    query = {"command": "equal", "formulas": [to_text(f), to_text(g)], "budget": _budget_json(budget)}
    attempts = []
    for side, this, that in (("first", f, g), ("second", g, f)):
        try:
            decision = axiomatization_problem_decider(this, budget)
        except BudgetExhausted:
            attempts.append({"side": side, "status": "unknown"})
            continue
        attempts.append({"side": side, "status": decision.status})
        if not decision.decidable:
            continue
        try:
            same = decision(that)
        except BudgetExhausted:
            attempts[-1]["status"] = "membership unknown"
            continue
        witness = {"decided_via": side, "status": decision.status}
        if decision.axiomatization is not None:
            witness["axiomatization"] = decision.axiomatization.to_json()
        return _result(query, Outcome.YES if same else Outcome.NO, witness)
    return _result(query, Outcome.UNKNOWN, {"attempts": attempts, "note": UNDECIDABLE_NOTE})


def cmd_member(args) -> dict:
    s = _axiom_file(args.axioms)
    f = _formula(args.formula)
    budget = _budget(args)
    v = member_of_jankov_logic(s, f, budget)
    query = {"command": "member", "axioms": s.to_json(), "formula": to_text(f), "budget": _budget_json(budget)}
    if v.outcome is Outcome.YES:
        witness = {"certificate": v.witness.to_json()}
    elif v.outcome is Outcome.NO:
        witness = {"countermodel": v.witness.to_json()}
    else:
        witness = None
    return _result(query, v.outcome, witness, v.effort)


def cmd_jankov(args) -> dict:
    a = _frame_file(args.frame)
    try:
        ax = jankov_formula(a)
    except NotAJankovFrame as exc:
        raise InputError(str(exc)) from None
    query = {"command": "jankov", "frame": a.to_json()}
    return _result(query, Outcome.YES, {"formula": to_text(ax.formula), "height": ax.height})


def cmd_enum_frames(args) -> dict:
    if not 1 <= args.size <= 5:
        raise InputError("--size must be between 1 and 5")
    frames = list(enumerate_frames(args.size, args.filter))
    counts: dict[str, int] = {}
    for fr in frames:
        counts[str(fr.size)] = counts.get(str(fr.size), 0) + 1
    query = {"command": "enum-frames", "size": args.size, "filter": args.filter}
    witness = {"counts": counts}
    if not args.counts_only:
        witness["frames"] = [fr.to_json() for fr in frames]
    return _result(query, Outcome.YES, witness)


def cmd_report(args) -> dict:
    f = _formula(args.formula)
    budget = _budget(args)
    rep = equivalence_report(f, budget)
    query = {"command": "report", "formula": to_text(f), "budget": _budget_json(budget)}
    witness: dict = {
        "axiomatization_problem_decidable": rep.axiomatization_problem_decidable.value,
        "decidable_formula": rep.decidable_formula.value,
        "union_splitting_or_inconsistent": rep.union_splitting_or_inconsistent.value,
        "consistent": rep.consistent,
        "agree": rep.agree,
    }
    cursor = None
    if rep.union_splitting is not None:
        witness["union_splitting"] = _us_witness(rep.union_splitting)
        cursor = rep.union_splitting.cursor
    outcome = rep.decidable_formula if rep.agree else Outcome.UNKNOWN
    return _result(query, outcome, witness, cursor=cursor)


# ---------------------------------------------------------------- verification

def _verify_us_witness(f: Formula, verdict: str, w: dict) -> bool:
    if verdict == "yes":
        s = JankovAxiomSet.from_json(w["axiomatization"])
        if any(validates(a, f) for a in s.frames):
            return False
        if w.get("certificate") is None:
            return member_of_jankov_logic(s, f).outcome is Outcome.YES
        return ProofCertificate.from_json(w["certificate"]).verify(s.formulas, f)
    if verdict == "no":
        return violates_condition_four(frame_from_json(w["counterexample"]), f)
    return False


def verify_result(data: dict) -> bool:
    """Re-check the witness of a saved result independently of the search."""
    query, verdict, w = data["query"], data["verdict"], data.get("witness") or {}
    cmd = query["command"]
    if verdict == "unknown":
        # nothing to replay beyond well-formedness
        return cmd in COMMANDS
    if cmd == "check-union-splitting":
        return _verify_us_witness(parse(query["formula"]), verdict, w)
    if cmd == "check-splitting":
        f = parse(query["formula"])
        if verdict == "yes":
            b = frame_from_json(w["splitting_frame"])
            s = JankovAxiomSet.from_json(w["axiomatization"])
            return (is_rooted(b) and is_cycle_free(b) and _verify_us_witness(f, "yes", w)
                    and jankov_logic_equal(JankovAxiomSet.of([b]), s)
                    and b.size <= max((a.size for a in s.frames), default=0))
        if "counterexample" in w:
            return _verify_us_witness(f, "no", w)
        s = JankovAxiomSet.from_json(w["axiomatization"])
        bound = max((a.size for a in s.frames), default=0)
        return _verify_us_witness(f, "yes", w) and not any(
            jankov_logic_equal(JankovAxiomSet.of([b]), s)
            for b in (enumerate_frames(bound, "rootedCycleFree") if bound else ()))
    if cmd == "consistent":
        f = parse(query["formula"])
        return (verdict == "yes") == any(_consistency_witness(f).values()) == any(w["validated_by"].values())
    if cmd == "member":
        s = JankovAxiomSet.from_json(query["axioms"])
        f = parse(query["formula"])
        if verdict == "yes":
            return ProofCertificate.from_json(w["certificate"]).verify(s.formulas, f)
        return is_jankov_countermodel(frame_from_json(w["countermodel"]), s, f)
    if cmd == "jankov":
        ax = jankov_formula(frame_from_json(query["frame"]))
        return w == {"formula": to_text(ax.formula), "height": ax.height}
    if cmd in ("decidable-formula", "report"):
        f = parse(query["formula"])
        if not is_consistent(f):
            return verdict == "yes"
        sub = w.get("union_splitting", w) if cmd == "report" else w
        return _verify_us_witness(f, verdict, sub)
    # the remaining commands are recomputed and compared
    fresh = COMMANDS[cmd](_namespace_from_query(query))
    return fresh["verdict"] == verdict and fresh["witness"] == w


def _namespace_from_query(query: dict) -> argparse.Namespace:
    b = query.get("budget", {})
    ns = argparse.Namespace(
        max_frame_size=b.get("max_frame_size", 5), max_steps=b.get("max_steps", 100_000),
        max_subst_depth=b.get("max_subst_depth", 2), max_prefix=b.get("max_prefix", 3),
        resume=None, counts_only=False,
    )
    if query["command"] == "equal":
        ns.formula, ns.other = query["formulas"]
    if query["command"] == "enum-frames":
        ns.size, ns.filter = query["size"], query["filter"]
    return ns


# ---------------------------------------------------------------- text output

def _text(result: dict) -> str:
    lines = [f"{result['query']['command']}: {result['verdict']}"]
    w = result["witness"]
    for key in sorted(w):
        value = w[key]
        if key == "formula":
            lines.append(f"formula: {value}")
        elif key == "frames":
            lines.extend(str(frame_from_json(fr)) for fr in value)
        elif key in ("counterexample", "countermodel", "splitting_frame"):
            lines.append(f"{key}: {frame_from_json(value)}")
        elif key == "axiomatization":
            frames = ", ".join(str(frame_from_json(fr)) for fr in value) or "(empty: the logic is K)"
            lines.append(f"axiomatization: {frames}")
        else:
            lines.append(f"{key}: {json.dumps(value, sort_keys=True)}")
    if result["effort"]:
        lines.append("effort: " + ", ".join(f"{k}={v}" for k, v in sorted(result["effort"].items())))
    return "\n".join(lines)


# ---------------------------------------------------------------- entry point

COMMANDS = {
    "check-union-splitting": cmd_check_union_splitting,
    "check-splitting": cmd_check_splitting,
    "consistent": cmd_consistent,
    "decidable-formula": cmd_decidable_formula,
    "equal": cmd_equal,
    "member": cmd_member,
    "jankov": cmd_jankov,
    "enum-frames": cmd_enum_frames,
    "report": cmd_report,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(INPUT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--max-frame-size", type=int, default=5)
    common.add_argument("--max-steps", type=int, default=100_000)
    common.add_argument("--max-subst-depth", type=int, default=2)
    common.add_argument("--max-prefix", type=int, default=3)
    common.add_argument("--output", choices=("json", "text"), default="json")

    parser = _Parser(prog="unionsplit", description="Decide union-splitting and related properties of K + f.")
    parser.add_argument("--verify", metavar="FILE", help="replay the witness of a saved JSON result and exit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("check-union-splitting", parents=[common], help="is K + f a union-splitting?")
    p.add_argument("formula")
    p.add_argument("--resume", metavar="PATH", help="continue from the cursor of a saved unknown result")
    for name, text in (("check-splitting", "is K + f a splitting?"),
                       ("consistent", "is K + f consistent?"),
                       ("decidable-formula", "is f a decidable formula?"),
                       ("report", "the three equivalent statuses of f")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("formula")
    p = sub.add_parser("equal", parents=[common], help="is K + f = K + g?")
    p.add_argument("formula")
    p.add_argument("other")
    p = sub.add_parser("member", parents=[common], help="is f in K + {Jankov formulas of the frames}?")
    p.add_argument("--axioms", required=True, metavar="FILE", help="JSON list of frames")
    p.add_argument("formula")
    p = sub.add_parser("jankov", parents=[common], help="print the Jankov formula of a frame")
    p.add_argument("--frame", required=True, metavar="FILE")
    p = sub.add_parser("enum-frames", parents=[common], help="list frames up to isomorphism")
    p.add_argument("--size", type=int, required=True, help="largest number of points")
    p.add_argument("--filter", choices=("any", "rooted", "rootedCycleFree"), default="any")
    p.add_argument("--counts-only", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verify:
            data = _read_json(args.verify)
            try:
                ok = verify_result(data)
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(f"malformed result in {args.verify}: {exc}") from None
            print(json.dumps({"verify": args.verify, "ok": ok}, sort_keys=True))
            return 0 if ok else 1
        if args.command is None:
            parser.print_usage(sys.stderr)
            print("unionsplit: error: a command is required", file=sys.stderr)
            return INPUT_ERROR
        result = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"unionsplit: error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    if args.output == "text":
        print(_text(result))
    else:
        print(json.dumps(result, sort_keys=True))
    return EXIT[Outcome(result["verdict"])]


if __name__ == "__main__":
    sys.exit(main())
