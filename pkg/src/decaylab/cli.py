"""Command-line interface: character estimation, runs, verification, plots.

Exit codes: 0 success, 1 failed verification criteria, 2 invalid input
(config, file format, arguments), 3 solver blow-up.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .character import Classification, ResolutionError, estimate_character, indicator_curve
from .dclb import FormatError, read_field
from .experiment import (
    ConfigError,
    ExperimentBlowup,
    emit_plot_script,
    read_config,
    run_experiment,
    run_sweep,
)


def _default_out_root(explicit: str | None) -> Path:
    if explicit:
        return Path(explicit)
    return Path(os.environ.get("DECAYLAB_OUT", "runs"))


def _parse_s_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad s list {text!r}: {exc}")


def _parse_window(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("window must be LO,HI")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad window {text!r}: {exc}")


def cmd_character(args) -> int:
    try:
        field = read_field(args.field)
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_base = Path(args.out) if args.out else Path(args.field).with_suffix("")
    for s in args.s:
        try:
            curve = indicator_curve(field, s)
            estimate = estimate_character(curve)
        except ResolutionError as exc:
            print(f"s={s:g}: unresolved - {exc}", file=sys.stderr)
            return 2
        curve_path = Path(f"{out_base}.curve_s{s:g}.csv")
        curve.write_csv(curve_path)
        label = estimate.classification.value
        if estimate.classification is Classification.FINITE:
            print(
                f"s={s:g}: classification: {label}, r_hat={estimate.exponent:.4f}, "
                f"slope={estimate.slope:.4f}  (curve: {curve_path})"
            )
        else:
            print(f"s={s:g}: classification: {label}  (curve: {curve_path})")
    return 0


def cmd_run(args) -> int:
    try:
        config = read_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.window is not None:
            overrides["window_lo"], overrides["window_hi"] = args.window
        if overrides:
            import dataclasses

            config = dataclasses.replace(config, **overrides)
            config.validate()
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_root = _default_out_root(args.out)
    try:
        record = run_experiment(config, out_root)
    except ExperimentBlowup as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        print(f"partial run directory: {exc.record.run_dir}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"run directory: {record.run_dir}")
    for line in (record.run_dir / "report.txt").read_text().splitlines():
        print(f"  {line}")
    return 0


def cmd_verify(args) -> int:
    from .verification import SUITES, run_suite

    if args.suite not in SUITES:
        names = [name for name in SUITES if name != "all"] + ["all"]
        print(
            f"error: unknown suite {args.suite!r}; available: {', '.join(names)}",
            file=sys.stderr,
        )
        return 2
    results = run_suite(args.suite, verbose=True)
    failed = [r for r in results if not r.passed]
    print()
    print(f"suite {args.suite}: {len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def cmd_plot(args) -> int:
    try:
        script = emit_plot_script(args.run_dir)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {script}")
    return 0


def cmd_sweep(args) -> int:
    try:
        config = read_config(args.config)
        vary: dict[str, list[str]] = {}
        for spec in args.vary or []:
            if "=" not in spec:
                raise ConfigError(f"--vary expects key=v1,v2,... got {spec!r}")
            key, values = spec.split("=", 1)
            vary[key.strip()] = [v.strip() for v in values.split(",") if v.strip()]
        records = run_sweep(config, vary, _default_out_root(args.out), jobs=args.jobs)
    except ExperimentBlowup as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for record in records:
        status = "invalid" if record.manifest.get("invalid") else "ok"
        print(f"{record.manifest['run_id']}: {status} ({record.run_dir})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decaylab",
        description="Spectral decay-rate experiments for dissipative flows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_char = sub.add_parser("character", help="estimate the decay character of a field file")
    p_char.add_argument("field", help="DCLB field file")
    p_char.add_argument("--s", type=_parse_s_list, default=[0.0], help="comma list of orders")
    p_char.add_argument("--out", default=None, help="basename for indicator-curve CSVs")
    p_char.set_defaults(func=cmd_character)

    p_run = sub.add_parser("run", help="execute one experiment config")
    p_run.add_argument("--config", required=True, help="experiment INI file")
    p_run.add_argument("--out", default=None, help="output root (default $DECAYLAB_OUT or ./runs)")
    p_run.add_argument("--seed", type=int, default=None, help="override the datum seed")
    p_run.add_argument("--window", type=_parse_window, default=None, metavar="LO,HI")
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="run an acceptance suite")
    p_verify.add_argument("suite", nargs="?", default="all", help="suite name (default: all)")
    p_verify.set_defaults(func=cmd_verify)

    p_plot = sub.add_parser("plot", help="emit a gnuplot script for a run directory")
    p_plot.add_argument("run_dir", help="completed run directory")
    p_plot.set_defaults(func=cmd_plot)

    p_sweep = sub.add_parser("sweep", help="run a config cross-product on a worker pool")
    p_sweep.add_argument("--config", required=True, help="base experiment INI file")
    p_sweep.add_argument(
        "--vary", action="append", metavar="KEY=V1,V2,...", help="values to cross (repeatable)"
    )
    p_sweep.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_sweep.add_argument("--out", default=None, help="output root")
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
