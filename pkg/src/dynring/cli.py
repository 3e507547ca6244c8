"""Command-line front end: single runs, batch campaigns and oracle checks.

Exit codes: 0 success, 1 an invariant verdict failed, 2 bound exceeded,
3 incomplete exploration / missing termination / no meeting, 4 bad input,
5 protocol violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from dynring import oracle
from dynring.batch import load_manifest, run_batch
from dynring.engine import ConfigError, SimulationOutcome, dump_trace, load_config, run, verify_trace

log = logging.getLogger("dynring")

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_BOUND = 2
EXIT_INCOMPLETE = 3
EXIT_INPUT = 4
EXIT_VIOLATION = 5


def _setup_logging() -> None:
    level = os.environ.get("DYNRING_LOG", "off").lower()
    levels = {"info": logging.INFO, "debug": logging.DEBUG}
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(levels.get(level, logging.CRITICAL + 1))
    log.propagate = False


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def exit_code(out: SimulationOutcome) -> int:
    if out.violation is not None:
        return EXIT_VIOLATION
    if out.protocol == "meeting":
        if out.first_meeting_round is None:
            return EXIT_INCOMPLETE
    elif not (out.explored and out.all_terminated):
        return EXIT_INCOMPLETE
    if not all(v["ok"] for v in out.verdicts):
        return EXIT_VERDICT
    if not out.bound_satisfied:
        return EXIT_BOUND
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed_override is not None and cfg.adversary.get("kind") == "random":
        cfg.adversary = {**cfg.adversary, "seed": args.seed_override}
    if args.max_rounds_multiplier is not None:
        cfg.max_rounds = max(1, int(args.max_rounds_multiplier * cfg.bound))
    if args.trace:
        cfg.trace_level = "full"
    out, trace = run(cfg)
    if args.trace:
        out.verdicts = verify_trace(trace, cfg)
        dump_trace(trace, args.trace)
        log.info("wrote %d rounds to %s", len(trace), args.trace)
    _emit(out.to_json())
    code = exit_code(out)
    if code:
        log.info("run failed with exit code %d", code)
    return code


def cmd_batch(args) -> int:
    manifest = load_manifest(args.manifest)
    report = run_batch(manifest, args.jobs, args.seed_override, args.max_rounds_multiplier)
    _emit(report)
    if report["failed"] == 0:
        return EXIT_OK
    reasons = report["failure_reasons"]
    if any(r.startswith("violation") for r in reasons):
        return EXIT_VIOLATION
    if any(r in ("not_explored", "not_terminated", "no_meeting") for r in reasons):
        return EXIT_INCOMPLETE
    if any(r.startswith("verdict") for r in reasons):
        return EXIT_VERDICT
    return EXIT_BOUND


def cmd_oracle(args) -> int:
    if args.check == "lemma-main":
        verdict = oracle.check_lemma_main(args.n, inverted=args.inverted)
    elif args.check == "agreement":
        verdict = oracle.check_agreement_indices(args.k)
    else:
        verdict = oracle.check_contiguous_block(args.k, args.j)
    doc = verdict.to_json()
    doc.pop("seconds")
    _emit(doc)
    log.info("%s finished in %.2fs", verdict.check, verdict.seconds)
    return EXIT_OK if verdict.passed else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynring", description="Three-agent exploration of a dynamic ring.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one configuration")
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--trace", help="write a JSONL trace here")
    p.add_argument("--max-rounds-multiplier", type=float, help="round cap as a multiple of the bound")
    p.add_argument("--seed-override", type=int, help="replace the random adversary's seed")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("batch", help="run a campaign manifest")
    p.add_argument("--manifest", required=True, help="JSON campaign manifest")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--max-rounds-multiplier", type=float, help="round cap as a multiple of the bound")
    p.add_argument("--seed-override", type=int, help="replace the campaign seed")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("oracle", help="exhaustive small-instance checks")
    p.add_argument("check", help="lemma-main, agreement or contiguous")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--j", type=int, default=3)
    p.add_argument("--inverted", action="store_true", help="lemma-main with its premise inverted")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    if args.command == "oracle" and args.check not in oracle.CHECKS:
        print(f"unknown check {args.check!r}; choose from {', '.join(oracle.CHECKS)}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (ConfigError, oracle.InfeasibleCheck) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
