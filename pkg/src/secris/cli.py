"""Command-line interface.

Subcommands:
  sweep     run a parameter sweep and write the aggregated CSV
  solve     single scenario / single scheme, with optional trace dump
  validate  run the oracle suite with fixed seeds

Exit codes: 0 ok, 1 usage error, 2 validation failure.
Set SECRIS_WORKERS to parallelize sweep realizations (output is identical
regardless of worker count).
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, ExperimentConfig
from .sweeps import SWEEP_KINDS, run_sweep, solve_once
from . import validate as validate_mod


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="secris",
                description="RIS-assisted secure beamforming experiments")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("sweep", help="run a parameter sweep")
    sp.add_argument("--kind", required=True,
                    choices=[k.replace("_", "-") for k in SWEEP_KINDS])
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=None)

    so = sub.add_parser("solve", help="solve one scenario with one scheme")
    so.add_argument("--config", required=True)
    so.add_argument("--scheme", required=True,
                    choices=["pdca", "ao_ew", "no_ris", "random"])
    so.add_argument("--trace", default=None)
    so.add_argument("--seed", type=int, default=None)

    sv = sub.add_parser("validate", help="run the oracle suite")
    sv.add_argument("--fast", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "validate":
        reports = validate_mod.run_suite(fast=args.fast)
        failed = False
        for rep in reports:
            status = "PASS" if rep.passed else "FAIL"
            print(f"[{status}] {rep.name}: {rep.margin}")
            failed |= not rep.passed
        return 2 if failed else 0

    try:
        cfg = ExperimentConfig.from_json(args.config)
    except (ConfigError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: bad config: {exc}\n")
        return 1

    if args.command == "sweep":
        kind = args.kind.replace("-", "_")
        try:
            rows = run_sweep(cfg, kind, args.out, seed=args.seed)
        except (OSError, ValueError) as exc:
            sys.stderr.write(f"error: {exc}\n")
            return 1
        print(f"wrote {len(rows)} rows to {args.out}")
        return 0

    if args.command == "solve":
        sol, trace, iters = solve_once(cfg, args.scheme, trace_path=args.trace,
                                       seed=args.seed)
        print(f"scheme={args.scheme} lesr={sol.lesr:.6f} bps/Hz "
              f"power={sol.power():.6e} W iterations={iters}")
        if trace is not None:
            print(f"final violation (pre-projection): "
                  f"{trace.violation_pre_projection:.3e}")
        return 0

    return 1


if __name__ == "__main__":
    sys.exit(main())
