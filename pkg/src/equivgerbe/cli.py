"""Command-line entry point: ``equivgerbe --suite amm --model su2 --samples 200``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import SUITES, SuiteConfig, UsageError, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def build_parser():
    p = argparse.ArgumentParser(prog="equivgerbe", description="Run one numerical verification suite.")
    p.add_argument("--suite", choices=SUITES)
    p.add_argument("--model", help="su2, so3, abelian(n) or heisenberg(2n)")
    p.add_argument("--grid", type=int, dest="N", help="loop grid size N (power of two)")
    p.add_argument("--ode-steps", type=int, dest="M", help="holonomy steps M")
    p.add_argument("--fd-step", type=float, dest="h", help="finite-difference step")
    p.add_argument("--band", type=int, help="band limit of random loops")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--conventions", help="conventions file; calibrated and written if missing")
    p.add_argument("--config", help="JSON file with SuiteConfig fields; flags override it")
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--quiet", action="store_true", help="print only the overall verdict")
    return p


def _tolerances(extra, parser):
    """Collect ``--tol.<check> value`` and ``--tol.<check>=value`` pairs."""
    tol, it = {}, iter(extra)
    for arg in it:
        if not arg.startswith("--tol."):
            parser.error(f"unrecognized argument {arg}")
        key, _, val = arg[len("--tol."):].partition("=")
        if not val:
            val = next(it, None)
            if val is None:
                parser.error(f"--tol.{key} needs a value")
        try:
            tol[key] = float(val)
        except ValueError:
            parser.error(f"--tol.{key}: not a number: {val!r}")
    return tol


def make_config(argv):
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    tol = _tolerances(extra, parser)
    flags = {k: getattr(args, k) for k in ("suite", "model", "N", "M", "h", "band", "samples", "seed",
                                           "conventions")}
    flags = {k: v for k, v in flags.items() if v is not None}
    if args.config:
        cfg = SuiteConfig.from_file(args.config, **flags)
        if tol:
            cfg = SuiteConfig(**{**cfg.__dict__, "tol": {**cfg.tol, **tol}})
    else:
        if "suite" not in flags:
            parser.error("--suite is required without --config")
        cfg = SuiteConfig(**flags, tol=tol)
    return cfg, args


def main(argv=None):
    try:
        cfg, args = make_config(sys.argv[1:] if argv is None else argv)
        report = run_suite(cfg)
    except SystemExit as exc:  # argparse
        return EXIT_USAGE if exc.code else EXIT_PASS
    except (UsageError, TypeError, ValueError, KeyError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:  # calibration failure
        print(f"calibration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.report:
        Path(args.report).write_text(report.to_json())
    if args.quiet:
        print("PASS" if report.passed else "FAIL")
    else:
        print(report.summary())
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
