"""Command-line entry point: ``synthminer discover|evaluate|check``.

Exit codes: 0 success, 1 bad input (missing file, parse error, structural
problem, failed check), 2 inconclusive (a state cap was exceeded).
Set ``SYNTHMINER_LOG=INFO`` (or ``DEBUG``) to see progress on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from fractions import Fraction

from . import conformance
from .discovery import BFS, FREQUENCY, DiscoveryConfig, discover
from .event_log import EventLog, LogParseError, filter_variant_coverage, read_log
from .petri_net import (
    DEFAULT_STATE_CAP,
    InconclusiveError,
    NetStructureError,
    check_structure,
    free_choice_violations,
    infer_workflow_net,
    soundness_check,
)
from .pnml import PnmlError, read_pnml, read_pnml_net, write_dot, write_pnml
from .synthesis import EnumerationCaps

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1]: {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text}")
    return value


def _add_log_columns(p: argparse.ArgumentParser) -> None:
    p.add_argument("--case-column", default="case", help="CSV column with the case id")
    p.add_argument("--activity-column", default="activity", help="CSV column with the activity")
    p.add_argument("--order-column", default=None,
                   help="CSV column to order events within a case (number or ISO timestamp); default: file order")


def _write_json(data, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(data, fh, indent=2, sort_keys=False)
        fh.write("\n")


def _read_log(args) -> EventLog:
    return read_log(args.log, args.case_column, args.activity_column, args.order_column)


def _print_scores(score: conformance.Score) -> None:
    for name in ("fitness", "precision", "f1"):
        value = getattr(score, name)
        print(f"{name}: {float(value):.6f} ({value})")


def cmd_discover(args) -> int:
    started = time.perf_counter()
    full = _read_log(args)
    if not full.activities:
        raise LogParseError("the log contains no events")
    log = filter_variant_coverage(full, args.variant_coverage)
    caps = EnumerationCaps(max_candidates=args.max_candidates)
    config = DiscoveryConfig(theta=args.theta, c=args.causal_threshold, ordering=args.ordering, caps=caps,
                             state_cap=args.state_cap, jobs=args.jobs, record_candidates=args.all_candidates)
    result = discover(log, config)
    final = conformance.evaluate(result.net, full, args.state_cap)

    if args.out_pnml:
        write_pnml(result.net, args.out_pnml)
    if args.out_dot:
        write_dot(result.net, args.out_dot)
    if args.iterations_jsonl:
        with open(args.iterations_jsonl, "w", encoding="utf-8", newline="\n") as fh:
            for rec in result.records:
                row = rec.to_json()
                if args.no_timings:
                    del row["wall_time"]
                fh.write(json.dumps(row) + "\n")
    if args.report:
        iterations = [rec.to_json(with_candidates=args.all_candidates) for rec in result.records]
        report = {
            "input": {"path": os.path.basename(args.log), "traces": full.total, "variants": len(full),
                      "traces_used": log.total, "variants_used": len(log)},
            "config": dict(config.to_json(), variant_coverage=str(args.variant_coverage)),
            "order": list(result.order),
            "iterations": iterations,
            "final": conformance.Score.to_json(final),
            "net": {"places": len(result.net.places), "transitions": len(result.net.transitions),
                    "arcs": len(result.net.arcs)},
        }
        if args.no_timings:
            for it in iterations:
                del it["wall_time"]
        else:
            report["wall_time"] = round(time.perf_counter() - started, 3)
        _write_json(report, args.report)

    print("order:", " ".join(result.order))
    print(f"iterations: {len(result.records)} ({sum(r.fall_through for r in result.records)} fall-through)")
    _print_scores(final)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    w = read_pnml(args.model)
    check_structure(w)
    log = _read_log(args)
    score = conformance.evaluate(w, log, args.state_cap)
    _print_scores(score)
    if args.report:
        _write_json({"model": os.path.basename(args.model), "log": os.path.basename(args.log),
                     "scores": score.to_json()}, args.report)
    return EXIT_OK


def cmd_check(args) -> int:
    net = read_pnml_net(args.model)
    ok = True
    try:
        w = infer_workflow_net(net)
        print("workflow net: true")
    except NetStructureError as exc:
        w = None
        ok = False
        print(f"workflow net: false ({exc})")
    bad = free_choice_violations(net)
    if bad:
        ok = False
        print("free-choice: false (overlapping presets: " + ", ".join(f"{a}/{b}" for a, b in bad) + ")")
    else:
        print("free-choice: true")
    if w is None:
        print("sound: n/a (not a workflow net)")
    else:
        try:
            sound, reason = soundness_check(w, args.state_cap)
        except InconclusiveError as exc:
            print(f"sound: inconclusive ({exc})")
            return EXIT_INCONCLUSIVE
        ok = ok and sound
        print("sound: true" if sound else f"sound: false ({reason})")
    return EXIT_OK if ok else EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="synthminer",
                                     description="Discover sound free-choice workflow nets with synthesis rules.")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("discover", help="discover a workflow net from an event log (.xes or .csv)")
    d.add_argument("log")
    _add_log_columns(d)
    d.add_argument("--theta", type=_fraction, default=Fraction(95, 100), help="fitness threshold (default 0.95)")
    d.add_argument("--causal-threshold", type=_fraction, default=Fraction(9, 10),
                   help="causality threshold for the pruning region (default 0.9)")
    d.add_argument("--ordering", choices=(BFS, FREQUENCY), default=BFS)
    d.add_argument("--variant-coverage", type=_fraction, default=Fraction(1),
                   help="keep the most frequent variants covering this share of cases (default 1 keeps all)")
    d.add_argument("--max-candidates", type=int, default=EnumerationCaps().max_candidates,
                   help="candidate nets scored per iteration (0 forces the fall-through)")
    d.add_argument("--state-cap", type=_positive_int, default=DEFAULT_STATE_CAP)
    d.add_argument("--jobs", type=_positive_int, default=1, help="worker processes for candidate scoring")
    d.add_argument("--out-pnml")
    d.add_argument("--out-dot")
    d.add_argument("--report", help="JSON run report")
    d.add_argument("--iterations-jsonl", help="one JSON line per iteration (pruning ratio, scores, ...)")
    d.add_argument("--all-candidates", action="store_true", help="include every candidate's scores in the report")
    d.add_argument("--no-timings", action="store_true", help="omit wall times so reports are byte-identical")
    d.add_argument("--seedless", action="store_true",
                   help="accepted for compatibility; discovery is always deterministic")
    d.set_defaults(func=cmd_discover)

    e = sub.add_parser("evaluate", help="fitness, precision and F1 of a PNML model on a log")
    e.add_argument("model")
    e.add_argument("log")
    _add_log_columns(e)
    e.add_argument("--state-cap", type=_positive_int, default=DEFAULT_STATE_CAP)
    e.add_argument("--report", help="JSON file with exact scores")
    e.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("check", help="workflow-net, free-choice and soundness verdicts for a PNML model")
    c.add_argument("model")
    c.add_argument("--state-cap", type=_positive_int, default=DEFAULT_STATE_CAP)
    c.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("SYNTHMINER_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (OSError, LogParseError, PnmlError, NetStructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
