"""Command line entry point: ``subdiff run|oracle|weights|selftest``."""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .cq import cq_weights
from .harness import (
    ConfigError,
    ExperimentConfig,
    describe,
    run_experiment,
    run_oracle_check,
    to_csv,
    to_text,
    write_outputs,
)
from .selftest import run_selftest

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def resolve_config(name: str) -> Path:
    """A filesystem path, or the stem of a bundled config such as ``product_a0.7_mu0.8``."""
    path = Path(name)
    if path.exists():
        return path
    stem = name[:-5] if name.endswith(".json") else name
    bundled = resources.files("subdiff") / "configs" / f"{stem}.json"
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError("config", f"no such file or bundled config: {name}")


def bundled_configs() -> list[str]:
    root = resources.files("subdiff") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _load(args) -> ExperimentConfig:
    path = resolve_config(args.config)
    cfg = ExperimentConfig.load(path)
    overrides = {
        "format": args.format,
        "nodes": args.nodes,
        "space": args.space,
        "res": args.res,
        "workers": args.workers,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.corr_every_step:
        cfg.corr_every_step = True
    if args.allow_incompatible:
        cfg.allow_incompatible = True
    if not cfg.name:
        cfg.name = path.name[:-5] if path.name.endswith(".json") else path.name
    cfg.validate()
    return cfg


def _emit(result, args) -> int:
    cfg = result.config
    if cfg.format in ("table", "both"):
        sys.stdout.write(to_text(result, describe(cfg)))
    if cfg.format == "csv" and not args.out:
        sys.stdout.write(to_csv(result))
    if args.out:
        for path in write_outputs(result, args.out, cfg.name):
            logging.getLogger("subdiff").info("wrote %s", path)
    bad = result.unexpected_nonfinite
    if bad:
        print(f"non-finite errors in {', '.join(bad)}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_run(args) -> int:
    return _emit(run_experiment(_load(args)), args)


def _cmd_oracle(args) -> int:
    return _emit(run_oracle_check(_load(args)), args)


def _cmd_weights(args) -> int:
    w = cq_weights(args.alpha, args.n)
    for j, value in enumerate(w):
        print(f"{j:6d}  {float(value)!r}")
    return EXIT_OK


def _cmd_selftest(args) -> int:
    return EXIT_OK if run_selftest() else EXIT_NUMERIC


def _cmd_list(args) -> int:
    for name in bundled_configs():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subdiff", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (
        ("run", _cmd_run, "self-convergence sweep"),
        ("oracle", _cmd_oracle, "direct errors against the exact solution"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="JSON config path or bundled config name")
        p.add_argument("--out", help="directory for CSV / text output")
        p.add_argument("--format", choices=("csv", "table", "both"))
        p.add_argument("--corr-every-step", action="store_true", help="apply the Corr-BDF2 correction at every step")
        p.add_argument("--allow-incompatible", action="store_true", help="mark incompatible schemes instead of failing")
        p.add_argument("--nodes", type=int, help="Gauss-Jacobi rule size")
        p.add_argument("--space", choices=("fd", "cheb"))
        p.add_argument("--res", type=int, help="spatial resolution M")
        p.add_argument("--workers", type=int, help="parallel solves")
        p.set_defaults(fn=fn)

    p = sub.add_parser("weights", help="dump CQ weights")
    p.add_argument("alpha", type=float)
    p.add_argument("n", type=int)
    p.set_defaults(fn=_cmd_weights)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.set_defaults(fn=_cmd_selftest)

    p = sub.add_parser("list", help="list bundled configs")
    p.set_defaults(fn=_cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    np.set_printoptions(precision=17)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        if args.command == "weights":
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        raise


if __name__ == "__main__":
    sys.exit(main())
