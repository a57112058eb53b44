"""Experiment orchestration: configs, run directories, manifests, sweeps.

A run is fully described by an :class:`ExperimentConfig`, which serializes
losslessly to a flat INI file with sections ``[experiment]``,
``[initial_data]`` and ``[fit]``.  Executing a run produces a directory

    <out>/<run-id>/{config.ini, manifest.json, series.csv,
                    diagnostics.csv, report.txt, fields/*.dclb, plot.gp}

where the run id is a UTC timestamp plus a short hash of the serialized
config.  The manifest is written atomically at completion and records the
fits, the bound checks and the artifact list.  Identical configs produce
byte-identical ``series.csv`` files regardless of worker count.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import time
import typing
from concurrent.futures import ProcessPoolExecutor
from configparser import ConfigParser
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__ as _pkg_version
from .character import Classification, ResolutionError, estimate_field_character
from .dclb import write_field
from .field import SpectralField, sobolev_norm_sq, to_physical
from .grid import SpectralGrid, make_grid
from .initial_data import (
    Annulus,
    DatumSpec,
    Gaussian,
    PowerLaw,
    RandomPhasePowerLaw,
    generate,
    solenoidal_project,
)
from .kernels import BACKEND as _kernel_backend
from .linear import linear_norm_series
from .rates import (
    MIN_FIT_SAMPLES,
    FitError,
    HypothesisError,
    Model,
    WindowError,
    box_validity_window,
    check_bounds,
    fit_power_law,
    predict_bounds,
)
from .series import NormTimeSeries, geometric_sample_times, norm_column_name, write_series_csv
from .solvers import BlowupError, CompressibleConfig, QGConfig, riesz_velocity, run_simulation
from .symbols import FractionalLaplacian


class ConfigError(ValueError):
    """Experiment configuration rejected before any computation starts."""


class ExperimentBlowup(RuntimeError):
    """A nonlinear run aborted; the run directory holds the partial record."""

    def __init__(self, message: str, record: "RunRecord"):
        super().__init__(message)
        self.record = record


#: Hard ceiling on the estimated working set of one run.  The estimate is
#: 16 bytes per complex coefficient times components times N^dim, times a
#: workspace multiplier of 16 (state, linear twin, predictor stages, FFT
#: scratch and physical-space products).
MEMORY_BUDGET_BYTES = 4 * 1024**3
MEMORY_WORKSPACE_FACTOR = 16

_MODELS = ("linear", "qg", "compressible")
_DATUM_KINDS = ("power_law", "gaussian", "annulus", "random_phase_power_law")


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat description of one run; round-trips losslessly through INI text.

    Zero values of ``t_end``, ``window_lo``, ``window_hi`` and ``tolerance``
    mean "resolve from the grid": the box-validity window supplies the times
    and the model supplies the default tolerance (0.10 linear, 0.15
    nonlinear).
    """

    # [experiment]
    model: str = "linear"
    dim: int = 2
    points_per_axis: int = 64
    box_length: float = 16.0 * 2.0 * np.pi
    alpha: float = 1.0
    kappa: float = 1.0
    epsilon: float = 1.0
    dt: float = 0.1
    t_end: float = 0.0
    sample_t0: float = 0.5
    sample_growth: float = 1.15
    s_values: tuple[float, ...] = ()
    cfl_safety: float = 0.5
    # [initial_data]
    kind: str = "power_law"
    q: float = 0.0
    cutoff: float = 1.0
    width: float = 1.0
    inner: float = 0.5
    outer: float = 1.0
    seed: int = 0
    components: int = 1
    amplitude: float = 1.0
    mean_zero: bool = True
    smooth_cutoff: bool = False
    solenoidal: bool = False
    normalize_speed: float = 0.0
    # [fit]
    window_lo: float = 0.0
    window_hi: float = 0.0
    tolerance: float = 0.0

    def validate(self) -> None:
        if self.model not in _MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {_MODELS}")
        if self.kind not in _DATUM_KINDS:
            raise ConfigError(f"unknown datum kind {self.kind!r}; expected one of {_DATUM_KINDS}")
        if self.model == "qg" and self.dim != 2:
            raise ConfigError("qg runs are two-dimensional; set dim = 2")
        if self.model == "compressible" and self.dim != 3:
            raise ConfigError("compressible runs are three-dimensional; set dim = 3")
        if self.model == "compressible" and self.components != 3:
            raise ConfigError("compressible runs need components = 3")
        if self.model == "qg" and self.components != 1:
            raise ConfigError("qg runs evolve a scalar; set components = 1")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha out of range (0, 1], got {self.alpha}")
        if self.kappa <= 0.0:
            raise ConfigError(f"kappa must be positive, got {self.kappa}")
        if self.epsilon <= 0.0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.sample_growth <= 1.0:
            raise ConfigError(f"sample_growth must exceed 1, got {self.sample_growth}")
        if self.sample_t0 <= 0.0:
            raise ConfigError(f"sample_t0 must be positive, got {self.sample_t0}")
        if self.model != "linear" and self.dt <= 0.0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        for name in ("t_end", "window_lo", "window_hi", "tolerance", "normalize_speed"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"{name} must be >= 0 (0 means automatic)")
        estimate = self.memory_estimate_bytes()
        if estimate > MEMORY_BUDGET_BYTES:
            raise ConfigError(
                f"grid needs ~{estimate / 1024**3:.1f} GiB "
                f"(16 B x {self.components} components x {self.points_per_axis}^{self.dim} "
                f"x workspace factor {MEMORY_WORKSPACE_FACTOR}); "
                f"budget is {MEMORY_BUDGET_BYTES / 1024**3:.1f} GiB"
            )

    def memory_estimate_bytes(self) -> int:
        modes = self.points_per_axis**self.dim
        return 16 * self.components * modes * MEMORY_WORKSPACE_FACTOR

    def grid(self) -> SpectralGrid:
        return make_grid(self.dim, self.points_per_axis, self.box_length)

    def datum_spec(self) -> DatumSpec:
        if self.kind == "power_law":
            kind = PowerLaw(self.q, self.cutoff)
        elif self.kind == "gaussian":
            kind = Gaussian(self.width)
        elif self.kind == "annulus":
            kind = Annulus(self.inner, self.outer)
        else:
            kind = RandomPhasePowerLaw(self.q, self.cutoff, self.seed)
        return DatumSpec(
            kind=kind,
            components=self.components,
            amplitude=self.amplitude,
            mean_zero=self.mean_zero,
            smooth_cutoff=self.smooth_cutoff,
        )

    def resolved_window(self) -> tuple[float, float]:
        auto = box_validity_window(self.grid(), self.alpha, self.kappa)
        lo = self.window_lo if self.window_lo > 0.0 else auto[0]
        hi = self.window_hi if self.window_hi > 0.0 else auto[1]
        if not lo < hi:
            raise ConfigError(f"empty fit window [{lo}, {hi}]")
        return lo, hi

    def resolved_t_end(self) -> float:
        if self.t_end > 0.0:
            return self.t_end
        return self.resolved_window()[1]

    def resolved_tolerance(self) -> float:
        if self.tolerance > 0.0:
            return self.tolerance
        return 0.10 if self.model == "linear" else 0.15

    def sample_times(self) -> np.ndarray:
        return geometric_sample_times(
            self.resolved_t_end(), t0=self.sample_t0, growth=self.sample_growth
        )

    def solver_config(self) -> QGConfig | CompressibleConfig:
        if self.model == "qg":
            return QGConfig(
                grid=self.grid(),
                alpha=self.alpha,
                kappa=self.kappa,
                dt=self.dt,
                t_end=self.resolved_t_end(),
                cfl_safety=self.cfl_safety,
                s_values=self.s_values,
            )
        if self.model == "compressible":
            return CompressibleConfig(
                grid=self.grid(),
                epsilon=self.epsilon,
                dt=self.dt,
                t_end=self.resolved_t_end(),
                cfl_safety=self.cfl_safety,
                s_values=self.s_values,
            )
        raise ConfigError("linear experiments have no solver config")

    def linear_symbol(self) -> FractionalLaplacian:
        return FractionalLaplacian(
            self.alpha, self.kappa, components=self.components, dim=self.dim
        )


_SECTION_FIELDS = {
    "experiment": (
        "model", "dim", "points_per_axis", "box_length", "alpha", "kappa",
        "epsilon", "dt", "t_end", "sample_t0", "sample_growth", "s_values",
        "cfl_safety",
    ),
    "initial_data": (
        "kind", "q", "cutoff", "width", "inner", "outer", "seed",
        "components", "amplitude", "mean_zero", "smooth_cutoff", "solenoidal",
        "normalize_speed",
    ),
    "fit": ("window_lo", "window_hi", "tolerance"),
}

_FIELD_TYPES = typing.get_type_hints(ExperimentConfig)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(repr(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(name: str, text: str):
    target = _FIELD_TYPES[name]
    text = text.strip()
    try:
        if target is bool:
            if text.lower() in ("true", "yes", "on", "1"):
                return True
            if text.lower() in ("false", "no", "off", "0"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if target is int:
            return int(text)
        if target is float:
            return float(text)
        if target is str:
            return text
        # remaining field type: tuple of floats
        if not text:
            return ()
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {exc}") from exc


def config_to_text(config: ExperimentConfig) -> str:
    lines = []
    for section, names in _SECTION_FIELDS.items():
        lines.append(f"[{section}]")
        for name in names:
            lines.append(f"{name} = {_format_value(getattr(config, name))}")
        lines.append("")
    return "\n".join(lines)


def config_from_text(text: str) -> ExperimentConfig:
    parser = ConfigParser()
    try:
        parser.read_string(text)
    except Exception as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    values = {}
    for section in parser.sections():
        if section not in _SECTION_FIELDS:
            raise ConfigError(f"unknown config section [{section}]")
        for name, raw in parser.items(section):
            if name not in _SECTION_FIELDS[section]:
                raise ConfigError(f"unknown key {name!r} in section [{section}]")
            values[name] = _parse_value(name, raw)
    config = ExperimentConfig(**values)
    config.validate()
    return config


def write_config(config: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(config_to_text(config))


def read_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_text(text)


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(config_to_text(config).encode()).hexdigest()[:8]


def make_run_id(config: ExperimentConfig, when: float | None = None) -> str:
    stamp = time.strftime("%Y%m%dT%H%M%SZ", time.gmtime(when))
    return f"{stamp}-{config_hash(config)}"


# ---------------------------------------------------------------------------
# running one experiment


@dataclass
class RunRecord:
    run_dir: Path
    manifest: dict


def _write_json_atomic(payload: dict, path: Path) -> None:
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, path)


def measured_max_speed(field: SpectralField, model: str) -> float:
    """Largest pointwise advecting speed the datum produces."""
    if model == "qg":
        velocity = riesz_velocity(field)
    else:
        velocity = field
    phys = to_physical(velocity)
    return float(np.sqrt((phys**2).sum(axis=0)).max())


def _prepare_datum(config: ExperimentConfig, grid: SpectralGrid) -> SpectralField:
    field = generate(config.datum_spec(), grid)
    if config.solenoidal:
        field = solenoidal_project(field)
    if config.normalize_speed > 0.0:
        speed = measured_max_speed(field, config.model)
        if speed <= 0.0:
            raise ConfigError("cannot normalize the speed of a zero datum")
        field = SpectralField(grid, field.coeffs * (config.normalize_speed / speed))
    return field


def _fit_models(config: ExperimentConfig) -> dict[str, tuple[Model, float]]:
    """Map series columns to (bound model, s) pairs for this experiment."""
    if config.model == "qg":
        primary, hs, diff = Model.QG_L2, Model.QG_HS, Model.QG_DIFFERENCE
    elif config.model == "compressible":
        primary, hs, diff = Model.COMPRESSIBLE_L2, Model.COMPRESSIBLE_HS, Model.COMPRESSIBLE_DIFFERENCE
    else:
        primary, hs, diff = Model.LINEAR, Model.LINEAR, None
    columns = {"l2_sq": (primary, 0.0)}
    for s in config.s_values:
        if s > 0.0:
            columns[norm_column_name(s)] = (hs, float(s))
    if config.model != "linear":
        columns["lin_l2_sq"] = (Model.LINEAR, 0.0)
        columns["diff_l2_sq"] = (diff, 0.0)
    return columns


DIFF_TAIL_FACTOR = 4.0


def _diff_fit_window(
    window: tuple[float, float], times: np.ndarray
) -> tuple[float, float]:
    """Fit window for the nonlinear-minus-linear column.

    The difference norm reaches its asymptotic slope later than the norms
    themselves, so a full-window fit is biased low.  Start the fit at
    ``DIFF_TAIL_FACTOR`` times the window opening when enough samples remain;
    otherwise keep the full window rather than refuse the fit.
    """
    lo = DIFF_TAIL_FACTOR * window[0]
    inside = np.count_nonzero((times >= lo) & (times <= window[1]))
    if lo >= window[1] or inside < MIN_FIT_SAMPLES:
        return window
    return (lo, window[1])


def _fit_dict(fit) -> dict:
    return {
        "s": fit.s,
        "exponent": fit.exponent,
        "prefactor": fit.prefactor,
        "residual_rms": fit.residual_rms,
        "n_samples": fit.n_samples,
        "window": list(fit.window),
    }


def _check_dict(check) -> dict:
    return {
        "passed": check.passed,
        "fit_exponent": check.fit_exponent,
        "upper_exponent": check.prediction.upper_exponent,
        "lower_exponent": check.prediction.lower_exponent,
        "regime": check.prediction.regime,
        "tolerance": check.tolerance,
        "margin_upper": check.margin_upper,
        "margin_lower": check.margin_lower,
        "explanation": check.explanation,
    }


def _analyze_series(
    config: ExperimentConfig,
    series: dict[str, np.ndarray],
    times: np.ndarray,
    r_hat: float | None,
) -> tuple[dict, dict, list[str]]:
    """Fit every column and check proven bounds where a character is known."""
    window = config.resolved_window()
    tolerance = config.resolved_tolerance()
    fits: dict[str, dict] = {}
    checks: dict[str, dict] = {}
    report: list[str] = []
    for column, (model, s) in _fit_models(config).items():
        if column not in series:
            continue
        norms = {0.0: series[column]}
        norms[s] = series[column]
        wrapped = NormTimeSeries(times=times, norms_sq=norms, metadata={})
        fit_window = window
        if column == "diff_l2_sq":
            fit_window = _diff_fit_window(window, times)
        try:
            fit = fit_power_law(wrapped, s, fit_window)
        except (FitError, WindowError) as exc:
            fits[column] = {"error": str(exc)}
            report.append(f"{column}: fit refused - {exc}")
            continue
        fits[column] = _fit_dict(fit)
        if r_hat is None:
            report.append(
                f"{column}: fitted exponent {fit.exponent:.4f} "
                "(no algebraic character; bound check skipped)"
            )
            continue
        try:
            prediction = predict_bounds(
                model, config.alpha, r_hat, s=s, epsilon=config.epsilon, dim=config.dim
            )
        except HypothesisError as exc:
            checks[column] = {"skipped": str(exc)}
            report.append(f"{column}: bound check skipped - {exc}")
            continue
        check = check_bounds(fit, prediction, tolerance, validity_window=window)
        checks[column] = _check_dict(check)
        verdict = "pass" if check.passed else "FAIL"
        tail = ""
        if fit_window != window:
            tail = f" (tail window [{fit_window[0]:g}, {fit_window[1]:g}])"
        report.append(
            f"{column}: fitted {fit.exponent:.4f} vs "
            f"[upper {prediction.upper_exponent}, lower {prediction.lower_exponent}] "
            f"({prediction.regime}) tol {tolerance:g} -> {verdict}; "
            f"{check.explanation}{tail}"
        )
    return fits, checks, report


def run_experiment(
    config: ExperimentConfig,
    out_root: str | Path,
    run_id: str | None = None,
) -> RunRecord:
    """Execute one experiment and persist its run directory.

    Raises :class:`ExperimentBlowup` after persisting a partial record if the
    nonlinear solver aborts; propagates :class:`ConfigError` for rejected
    configs before anything is written.
    """
    config.validate()
    grid = config.grid()
    window = config.resolved_window()
    if run_id is None:
        run_id = make_run_id(config)
    run_dir = Path(out_root) / run_id
    fields_dir = run_dir / "fields"
    fields_dir.mkdir(parents=True, exist_ok=True)
    write_config(config, run_dir / "config.ini")

    started = time.perf_counter()
    datum = _prepare_datum(config, grid)
    write_field(fields_dir / "initial.dclb", datum)

    try:
        estimate = estimate_field_character(datum)
        character = {
            "classification": estimate.classification.value,
            "exponent": float(estimate.exponent),
        }
        r_hat = (
            float(estimate.exponent)
            if estimate.classification is Classification.FINITE
            else None
        )
    except ResolutionError as exc:
        character = {"classification": "unresolved", "error": str(exc)}
        r_hat = None

    times = config.sample_times()
    manifest: dict = {
        "run_id": run_id,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "package_version": _pkg_version,
        "kernel_backend": _kernel_backend,
        "model": config.model,
        "config": {
            section: {name: _format_value(getattr(config, name)) for name in names}
            for section, names in _SECTION_FIELDS.items()
        },
        "grid": {
            "dim": grid.dim,
            "points_per_axis": grid.points_per_axis,
            "box_length": grid.box_length,
            "xi_min": grid.xi_min,
        },
        "datum_character": character,
        "validity_window": list(window),
        "t_end": config.resolved_t_end(),
        "invalid": False,
    }

    blowup: BlowupError | None = None
    series_columns: dict[str, np.ndarray] = {}
    extra_columns: dict[str, np.ndarray] = {}
    diagnostics_rows: list[tuple[float, float, float]] = []

    if config.model == "linear":
        series = linear_norm_series(datum, config.linear_symbol(), times, config.s_values)
        sample_times = series.times
        for s in series.orders:
            series_columns[norm_column_name(s)] = series.column(s)
        final_state = None
        write_series = series
    else:
        solver_config = config.solver_config()
        try:
            result = run_simulation(solver_config, datum, times)
        except BlowupError as exc:
            blowup = exc
            result = exc.partial
        if result is None:
            manifest["invalid"] = True
            manifest["blowup"] = str(blowup)
            manifest["artifacts"] = ["config.ini", "fields/initial.dclb"]
            _write_json_atomic(manifest, run_dir / "manifest.json")
            raise ExperimentBlowup(str(blowup), RunRecord(run_dir, manifest))
        sample_times = result.nonlinear.times
        for s in result.nonlinear.orders:
            series_columns[norm_column_name(s)] = result.nonlinear.column(s)
        extra_columns["lin_l2_sq"] = result.linear.column(0.0)
        extra_columns["diff_l2_sq"] = result.difference.column(0.0)
        diagnostics_rows = list(
            zip(
                result.diagnostics.times,
                result.diagnostics.energies,
                result.diagnostics.max_speeds,
            )
        )
        manifest["orthogonality_defect_max"] = (
            max(result.diagnostics.orthogonality_defects)
            if result.diagnostics.orthogonality_defects
            else None
        )
        final_state = result.final_state
        write_series = result.nonlinear

    write_series_csv(run_dir / "series.csv", write_series, extra=extra_columns)
    if diagnostics_rows:
        with open(run_dir / "diagnostics.csv", "w") as handle:
            handle.write("t,energy,max_speed\n")
            for row in diagnostics_rows:
                handle.write("%.17g,%.17g,%.17g\n" % row)
    if final_state is not None:
        write_field(fields_dir / "final.dclb", final_state)

    all_columns = dict(series_columns)
    all_columns.update(extra_columns)
    if blowup is None:
        fits, checks, report_lines = _analyze_series(config, all_columns, sample_times, r_hat)
    else:
        fits, checks = {}, {}
        report_lines = [f"run aborted: {blowup}"]
    manifest["fits"] = fits
    manifest["bound_checks"] = checks
    manifest["wall_clock_s"] = time.perf_counter() - started
    if blowup is not None:
        manifest["invalid"] = True
        manifest["blowup"] = str(blowup)

    report_path = run_dir / "report.txt"
    header = [
        f"run {run_id} ({config.model}), grid N={grid.points_per_axis}^{grid.dim}, "
        f"box {grid.box_length:g}",
        f"validity window [{window[0]:g}, {window[1]:g}], "
        f"datum character: {character}",
        "upper bounds are one-sided: decaying faster than the proven upper "
        "bound is a pass.",
    ]
    report_path.write_text("\n".join(header + report_lines) + "\n")

    artifacts = ["config.ini", "series.csv", "report.txt", "plot.gp", "fields/initial.dclb"]
    if diagnostics_rows:
        artifacts.append("diagnostics.csv")
    if final_state is not None:
        artifacts.append("fields/final.dclb")
    manifest["artifacts"] = sorted(artifacts)
    _write_json_atomic(manifest, run_dir / "manifest.json")
    emit_plot_script(run_dir)

    record = RunRecord(run_dir, manifest)
    if blowup is not None:
        raise ExperimentBlowup(str(blowup), record)
    return record


# ---------------------------------------------------------------------------
# plot-script emission


def emit_plot_script(run_dir: str | Path) -> Path:
    """Write a self-contained gnuplot script for the run's norm series.

    Log-log plot of every series column against ``1+t`` with guide lines at
    the predicted (or fitted) slopes taken from the manifest.
    """
    run_dir = Path(run_dir)
    series_path = run_dir / "series.csv"
    if not series_path.exists():
        raise FileNotFoundError(f"{series_path} missing; nothing to plot")
    header = series_path.read_text().splitlines()[0].split(",")
    manifest = {}
    manifest_path = run_dir / "manifest.json"
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())

    lines = [
        "# gnuplot script; run from this directory:  gnuplot plot.gp",
        'set datafile separator ","',
        "set logscale xy",
        'set xlabel "1 + t"',
        'set ylabel "squared norm"',
        "set key left bottom",
        'set terminal pngcairo size 900,600',
        'set output "norms.png"',
    ]
    plot_parts = []
    for idx, column in enumerate(header[1:], start=2):
        plot_parts.append(
            f'"series.csv" every ::1 using (1+$1):{idx} with linespoints title "{column}"'
        )
        fit = manifest.get("fits", {}).get(column)
        check = manifest.get("bound_checks", {}).get(column, {})
        slope = check.get("upper_exponent") if isinstance(check, dict) else None
        if slope is None and fit and "exponent" in fit:
            slope = fit["exponent"]
        if slope is not None and fit and "prefactor" in fit:
            plot_parts.append(
                f'{fit["prefactor"]!r} * x**(-{slope!r}) title "guide slope -{slope:g}"'
            )
    if not plot_parts:
        plot_parts.append('"series.csv" every ::1 using (1+$1):2 with linespoints title "l2_sq"')
    lines.append("plot \\\n    " + ", \\\n    ".join(plot_parts))
    script = run_dir / "plot.gp"
    script.write_text("\n".join(lines) + "\n")
    return script


# ---------------------------------------------------------------------------
# sweeps


def _sweep_worker(args: tuple[str, str, str]) -> tuple[str, str]:
    text, out_root, run_id = args
    config = config_from_text(text)
    record = run_experiment(config, out_root, run_id=run_id)
    return run_id, str(record.run_dir)


def expand_sweep(
    base: ExperimentConfig, vary: dict[str, list[str]]
) -> list[ExperimentConfig]:
    """Cross product of the base config with every varied value."""
    for name in vary:
        if name not in _FIELD_TYPES:
            raise ConfigError(f"unknown sweep key {name!r}")
    configs = [base]
    for name in sorted(vary):
        next_round = []
        for cfg in configs:
            for raw in vary[name]:
                next_round.append(
                    dataclasses.replace(cfg, **{name: _parse_value(name, raw)})
                )
        configs = next_round
    for cfg in configs:
        cfg.validate()
    return configs


def run_sweep(
    base: ExperimentConfig,
    vary: dict[str, list[str]],
    out_root: str | Path,
    jobs: int = 1,
) -> list[RunRecord]:
    """Run the sweep's cross product on a bounded worker pool.

    Results are aggregated in deterministic (submission) order; each run owns
    its directory exclusively, so worker count never changes any artifact.
    """
    configs = expand_sweep(base, vary)
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    stamp = time.time()
    named = [
        (config_to_text(cfg), str(out_root), f"{make_run_id(cfg, stamp)}-{i:03d}")
        for i, cfg in enumerate(configs)
    ]
    records: list[RunRecord] = []
    if jobs <= 1:
        for args in named:
            _sweep_worker(args)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(_sweep_worker, named))
    for _, _, run_id in named:
        run_dir = out_root / run_id
        manifest = json.loads((run_dir / "manifest.json").read_text())
        records.append(RunRecord(run_dir, manifest))
    summary = {
        "runs": [
            {"run_id": rec.manifest["run_id"], "dir": rec.run_dir.name,
             "model": rec.manifest["model"], "invalid": rec.manifest["invalid"]}
            for rec in records
        ]
    }
    _write_json_atomic(summary, out_root / "sweep_summary.json")
    return records
