"""Command line front end.

Exit status: 0 when every trial passes, 1 on a residual failure, 2 on a
configuration or constraint error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .errors import EllipsumError
from .km import solve_balance, verify_balance
from .pochhammer import RefinedBase
from .sampling import IDENTITIES
from .theta import Nome

DEFAULT_TOLERANCE = 1e-8
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _read_json(path: str | None) -> dict:
    if path is None:
        return {}
    return json.loads(Path(path).read_text())


def _verify(args) -> int:
    cfg, extras = harness.load_config(_read_json(args.config))
    overrides = {}
    env_seed = os.environ.get("ELLIPSUM_SEED")
    if args.seed is not None:
        overrides["seed"] = args.seed
    elif env_seed is not None:
        overrides["seed"] = int(env_seed)
    if args.trials is not None:
        overrides["trials"] = args.trials
    if overrides:
        cfg = replace(cfg, **overrides)
    tolerance = args.tolerance if args.tolerance is not None else extras.get("tolerance", DEFAULT_TOLERANCE)
    if args.identity == "all":
        identities = list(extras.get("identities", IDENTITIES))
    else:
        identities = args.identity.split(",")
    reports = harness.run_suite(cfg, identities, tolerance, workers=args.workers or extras.get("workers", 1))
    text = harness.emit_report(reports, args.format)
    if args.output:
        Path(args.output).write_text(harness.emit_report(reports, "structured"))
    sys.stdout.write(text)
    return harness.exit_code(reports)


def _solve(args) -> int:
    params = _read_json(args.params)
    base_spec = params.pop("base")
    nome = Nome(harness._complex(base_spec.get("p", 0.0)))
    base = RefinedBase(harness._complex(base_spec["q_star"]), int(base_spec.get("Y", 1)), nome)
    for key in ("a", "b", "c"):
        if key in params:
            params[key] = [None if v is None else harness._complex(v) for v in params[key]]
    if args.check is not None:
        value = harness._complex(json.loads(args.check))
        verify_balance(args.mode, params, value, base)
        sys.stdout.write(harness.to_jsonl({"mode": args.mode, "value": value, "satisfied": True}) + "\n")
        return EXIT_OK
    sol = solve_balance(args.mode, params, base)
    sys.stdout.write(harness.to_jsonl({"mode": args.mode, "principal": sol.principal,
                                       "roots": list(sol.roots)}) + "\n")
    return EXIT_OK


def _report(args) -> int:
    text = Path(args.input).read_text() if args.input else sys.stdin.read()
    reports = harness.read_structured(text)
    sys.stdout.write(harness.emit_report(reports, args.format))
    return harness.exit_code(reports)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ellipsum", description="Numerical verification of elliptic hypergeometric identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="sample instances and check identity residuals")
    v.add_argument("identity", help=f"'all' or comma-separated names from: {', '.join(IDENTITIES)}")
    v.add_argument("--config", help="JSON sampler configuration")
    v.add_argument("--tolerance", type=float)
    v.add_argument("--seed", type=int)
    v.add_argument("--trials", type=int)
    v.add_argument("--format", choices=("human", "structured"), default="human")
    v.add_argument("--output", help="also write the structured report here")
    v.add_argument("--workers", type=int)
    v.set_defaults(func=_verify)

    s = sub.add_parser("solve-balance", help="solve a balancing constraint for its free parameter")
    s.add_argument("mode", choices=("apc", "npc", "akms_b"))
    s.add_argument("--params", required=True, help="JSON file with 'base' and the known parameters")
    s.add_argument("--check", help="verify a supplied value (JSON number or [re, im]) instead of solving")
    s.set_defaults(func=_solve)

    r = sub.add_parser("report", help="re-render a structured report")
    r.add_argument("--format", choices=("human", "structured"), default="human")
    r.add_argument("--input", help="structured report file (default: stdin)")
    r.set_defaults(func=_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EllipsumError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
