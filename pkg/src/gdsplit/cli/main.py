"""Command-line entry point.

Exit status: 0 success; 1 I/O error; 2 config parse or validation error;
3 numeric error; 4 the run finished but an ``expect`` check failed.
"""

from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError, ConfigValidationError, NumericError, ParameterError
from .config import load_config
from .presets import PRESETS, load_preset
from .runner import run

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3, 4

SUBCOMMANDS = ("run", "classify", "lyapunov", "recurrence", "lemma-search", "liminf", "minimality",
               "verify-example")


def build_parser():
    parser = argparse.ArgumentParser(prog="gdsplit", description="Generalized dominated splitting experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name, help="run the analyses listed in the config" if name == "run"
                            else f"run the {name} analysis")
        src = sp.add_mutually_exclusive_group(required=name != "verify-example")
        src.add_argument("--config", metavar="PATH", help="YAML experiment config")
        src.add_argument("--preset", choices=list(PRESETS), help="built-in config")
        sp.add_argument("--out", metavar="DIR", default=None, help="output directory (default: gdsplit-out/<name>)")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed (unsigned 64-bit)")
        sp.add_argument("--grid", type=int, default=None, metavar="N", help="N grid points per axis")
        sp.add_argument("--threads", type=int, default=1, metavar="K", help="worker threads for grid sweeps")
    sub.add_parser("list-presets", help="show the built-in configs")
    return parser


def _load(args):
    cfg = load_config(args.config) if args.config else load_preset(args.preset or "verify-example")
    raw = cfg.to_dict()
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.grid is not None:
        raw["params"]["grid"] = args.grid
    if args.seed is not None or args.grid is not None:
        cfg = type(cfg).from_dict(raw)
    return cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "list-presets":
        for name, (desc, _) in PRESETS.items():
            print(f"{name:20s} {desc}")
        return EXIT_OK
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _load(args)
        analyses = None if args.command == "run" else [args.command]
        report = run(cfg, analyses=analyses, threads=args.threads)
        out = report.write(args.out or f"gdsplit-out/{cfg.name}")
    except ConfigValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"validation error: {exc.field or 'parameter'}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric error in {exc.operation or 'computation'} at step {exc.step}, point {exc.point}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(report.summary(), end="")
    print(f"report written to {out}")
    return EXIT_OK if report.all_checks_passed else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
