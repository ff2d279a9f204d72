"""Command line front end for the registered experiments.

Exit codes: 0 all metrics passed, 1 at least one metric failed,
2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import ConfigError, list_experiments, load_config, run_experiment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcsft",
        description="Run seeded numerical experiments and write deterministic reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment from a JSON config file")
    run.add_argument("config", help="path to a JSON configuration file")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--out", default=None, help="override the output directory")

    sub.add_parser("list", help="list the registered experiments")
    return parser


def _print_record(record) -> None:
    for m in record.metrics:
        status = "PASS" if m.passed else "FAIL"
        extra = f" stderr={m.stderr:.3g}" if m.stderr is not None else ""
        print(
            f"[{status}] {m.name}: value={m.value:.6g} "
            f"{m.comparison} {m.tolerance:.6g}{extra}"
        )
    verdict = "PASS" if record.passed else "FAIL"
    good = sum(1 for m in record.metrics if m.passed)
    print(
        f"{record.experiment}: {verdict} ({good}/{len(record.metrics)} metrics, "
        f"seed={record.seed}, {record.duration_seconds:.2f}s)"
    )


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; keep its code
        return int(exc.code or 0)

    if args.command == "list":
        for name, description in list_experiments():
            print(f"{name}: {description}")
        return 0

    try:
        config = load_config(args.config)
        if args.seed is not None:
            config["seed"] = int(args.seed)
        if args.out is not None:
            config["out_dir"] = args.out
        record = run_experiment(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    _print_record(record)
    return 0 if record.passed else 1


if __name__ == "__main__":
    sys.exit(main())
