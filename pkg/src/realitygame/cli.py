"""Command line: ``realitygame <subcommand> --spec FILE [--out DIR] [--seed U64] [--workers K]``."""

from __future__ import annotations

import argparse
import sys

from . import __version__, engine
from .errors import RealityGameError
from .specfile import KINDS, load_spec


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _workers(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("workers must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="realitygame",
        description="Run reality-game experiments and write CSV, SVG and manifest files.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    worker_help = f"worker threads (default: ${engine.WORKERS_ENV} or the CPU count)"
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} experiment")
        p.add_argument("--spec", required=True, help="key = value spec file")
        p.add_argument("--out", help="output directory (default: spec 'out' or out/<kind>)")
        p.add_argument("--seed", type=_u64, help="override the spec seed")
        p.add_argument("--workers", type=_workers, help=worker_help)
    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--full", action="store_true",
                   help="use the full sizes from the criteria (slow)")
    v.add_argument("--seed", type=_u64, default=0)
    v.add_argument("--workers", type=_workers, help=worker_help)
    v.add_argument("--only", type=int, action="append", metavar="N",
                   help="run only criterion N (repeatable)")
    return parser


def _verify(args) -> int:
    from . import checks

    selected = [c for i, c in enumerate(checks.CHECKS, 1)
                if not args.only or i in args.only]
    failed = 0
    for check in selected:
        for res in check(full=args.full, seed=args.seed, workers=args.workers):
            print(res.line(), flush=True)
            failed += not res.passed
    print(f"{'all checks passed' if not failed else f'{failed} check(s) failed'}")
    return 1 if failed else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _verify(args)
        from .experiments import run_experiment

        spec = load_spec(args.spec, kind=args.command)
        if args.seed is not None:
            spec.seed = args.seed
        out = run_experiment(spec, args.out, args.workers)
    except (RealityGameError, OSError, ValueError) as exc:
        print(f"realitygame {args.command}: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
