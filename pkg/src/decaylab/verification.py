"""Acceptance suites: named pass/fail criteria shared by the CLI and tests.

Each criterion exercises a documented guarantee end to end — closed-form
propagators against a matrix-exponential oracle, decay-character recovery,
fitted decay rates against the proven exponent windows, discrete energy
identities, and infrastructure determinism.  Criteria are grouped into
suites; ``run_suite("all")`` executes everything within the desk-scale
runtime budgets the criteria themselves assert.

Heavy simulations are memoized per process so criteria that share a run
(for example the L2 rate, the derivative-norm rate and the runtime budget
of the same nonlinear run) execute it once.
"""

from __future__ import annotations

import tempfile
import time
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from .character import (
    Classification,
    estimate_field_character,
    shift_consistency,
)
from .experiment import ExperimentConfig, measured_max_speed, run_sweep
from .field import SpectralField, dealias, from_physical, sobolev_norm_sq, to_physical
from .grid import make_grid
from .initial_data import (
    Annulus,
    DatumSpec,
    PowerLaw,
    RandomPhasePowerLaw,
    generate,
    solenoidal_project,
)
from .linear import dissipation_step_defects, linear_norm_series
from .rates import (
    Model,
    box_validity_window,
    fit_power_law,
    predict_bounds,
)
from .series import NormTimeSeries, geometric_sample_times
from .solvers import (
    CompressibleConfig,
    QGConfig,
    compressible_nonlinear,
    nonlinear_orthogonality_defect,
    qg_energy_law_residual,
    qg_nonlinear,
    run_simulation,
)
from .symbols import (
    CompressibleStokes,
    FractionalLaplacian,
    dissipativity_report,
    propagator,
    propagator_oracle,
)

TWO_PI = 2.0 * np.pi


@dataclass
class CriterionResult:
    name: str
    suite: str
    passed: bool
    detail: str
    elapsed_s: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name} ({self.elapsed_s:.1f}s): {self.detail}"


_CRITERIA: dict[str, tuple[str, Callable[[], tuple[bool, str]]]] = {}
SUITES: dict[str, list[str]] = {}


def criterion(name: str, suite: str):
    def register(fn):
        _CRITERIA[name] = (suite, fn)
        SUITES.setdefault(suite, []).append(name)
        SUITES.setdefault("all", []).append(name)
        return fn

    return register


def run_criterion(name: str) -> CriterionResult:
    suite, fn = _CRITERIA[name]
    started = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crashed criterion is a failed criterion
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CriterionResult(name, suite, passed, detail, time.perf_counter() - started)


def run_suite(name: str, verbose: bool = False) -> list[CriterionResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; available: {sorted(SUITES)}")
    results = []
    for crit_name in SUITES[name]:
        result = run_criterion(crit_name)
        if verbose:
            print(result.line(), flush=True)
        results.append(result)
    return results


def criterion_names() -> list[str]:
    return list(SUITES["all"])


# ---------------------------------------------------------------------------
# shared run bundles (memoized per process)


def _normalized_datum(spec: DatumSpec, grid, model: str, target_speed: float) -> SpectralField:
    field = dealias(generate(spec, grid))
    if model == "compressible":
        field = solenoidal_project(field)
    speed = measured_max_speed(field, model)
    return SpectralField(grid, field.coeffs * (target_speed / speed))


@lru_cache(maxsize=None)
def _character_bundle():
    started = time.perf_counter()
    grid = make_grid(2, 256, 128.0 * TWO_PI)
    recovery = {}
    for q in (-0.5, 0.0, 0.5, 1.0, 2.0):
        field = generate(DatumSpec(kind=PowerLaw(q, cutoff=1.0)), grid)
        recovery[q] = estimate_field_character(field)
    annulus = estimate_field_character(
        generate(DatumSpec(kind=Annulus(inner=0.5, outer=1.0)), grid)
    )
    shift_field = generate(DatumSpec(kind=PowerLaw(0.5, cutoff=1.0)), grid)
    shifts = {s: shift_consistency(shift_field, s) for s in (1.0, 2.0)}
    return {
        "recovery": recovery,
        "annulus": annulus,
        "shifts": shifts,
        "elapsed": time.perf_counter() - started,
    }


@lru_cache(maxsize=None)
def _qg_sharp_bundle():
    started = time.perf_counter()
    grid = make_grid(2, 256, 128.0 * TWO_PI)
    window = box_validity_window(grid, 1.0, 1.0)
    datum = _normalized_datum(
        DatumSpec(kind=RandomPhasePowerLaw(q=0.0, cutoff=0.7, seed=11)), grid, "qg", 0.3
    )
    config = QGConfig(
        grid=grid, alpha=1.0, kappa=1.0, dt=1.0, t_end=window[1], s_values=(0.0, 1.0)
    )
    result = run_simulation(config, datum, geometric_sample_times(window[1]))
    return {
        "r_hat": estimate_field_character(datum).exponent,
        "window": window,
        "l2": fit_power_law(result.nonlinear, 0.0, window),
        "h1": fit_power_law(result.nonlinear, 1.0, window),
        "linear": fit_power_law(result.linear, 0.0, window),
        "elapsed": time.perf_counter() - started,
    }


@lru_cache(maxsize=None)
def _qg_gap_bundle():
    started = time.perf_counter()
    grid = make_grid(2, 256, 128.0 * TWO_PI)
    window = box_validity_window(grid, 0.75, 1.0)
    datum = _normalized_datum(
        DatumSpec(kind=RandomPhasePowerLaw(q=0.5, cutoff=0.4, seed=11)), grid, "qg", 0.3
    )
    config = QGConfig(
        grid=grid, alpha=0.75, kappa=1.0, dt=0.5, t_end=window[1], s_values=(0.0,)
    )
    result = run_simulation(config, datum, geometric_sample_times(window[1]))
    return {
        "r_hat": estimate_field_character(datum).exponent,
        "window": window,
        "l2": fit_power_law(result.nonlinear, 0.0, window),
        "elapsed": time.perf_counter() - started,
    }


@lru_cache(maxsize=None)
def _compressible_bundle():
    started = time.perf_counter()
    grid = make_grid(3, 64, 16.0 * TWO_PI)
    window = box_validity_window(grid, 1.0, 1.0)
    datum = _normalized_datum(
        DatumSpec(kind=RandomPhasePowerLaw(q=0.0, cutoff=0.7, seed=9), components=3),
        grid,
        "compressible",
        0.25,
    )
    config = CompressibleConfig(
        grid=grid, epsilon=1.0, dt=0.25, t_end=window[1], s_values=(0.0, 1.0)
    )
    result = run_simulation(config, datum, geometric_sample_times(window[1]))
    diff_window = (4.0, window[1])
    return {
        "r_hat": estimate_field_character(datum).exponent,
        "window": window,
        "l2": fit_power_law(result.nonlinear, 0.0, window),
        "h1": fit_power_law(result.nonlinear, 1.0, window),
        "difference": fit_power_law(result.difference, 0.0, diff_window),
        "diff_window": diff_window,
        "orthogonality": max(result.diagnostics.orthogonality_defects),
        "elapsed": time.perf_counter() - started,
    }


def _in_band(value: float, center: float, rel_tol: float) -> bool:
    return abs(value - center) <= rel_tol * center


# ---------------------------------------------------------------------------
# propagator suite


@criterion("propagator-closed-form-oracle", suite="propagator")
def _check_propagator_oracle():
    rng = np.random.default_rng(0)
    worst = 0.0
    started = time.perf_counter()
    for epsilon in (0.1, 0.5, 1.0, 10.0):
        symbol = CompressibleStokes(epsilon, dim=3)
        for _ in range(250):
            xi = rng.normal(size=3) * 10.0 ** rng.uniform(-1.0, 1.0)
            t = rng.uniform(0.0, 2.0)
            diff = propagator(symbol, xi, t) - propagator_oracle(symbol, xi, t)
            worst = max(worst, float(np.abs(diff).max()))
    elapsed = time.perf_counter() - started
    ok = worst <= 1e-10 and elapsed < 5.0
    return ok, (
        f"1000 modes: closed form vs matrix exponential, worst defect {worst:.2e} "
        f"(<= 1e-10), {elapsed:.2f}s (< 5s)"
    )


# ---------------------------------------------------------------------------
# character suite


@criterion("character-recovery-power-law", suite="character")
def _check_character_recovery():
    bundle = _character_bundle()
    errors = {
        q: abs(est.exponent - q) for q, est in bundle["recovery"].items()
    }
    finite = all(
        est.classification is Classification.FINITE for est in bundle["recovery"].values()
    )
    worst = max(errors.values())
    ok = finite and worst <= 0.1
    listing = ", ".join(f"q={q:g}: {err:.3f}" for q, err in sorted(errors.items()))
    return ok, f"|r_hat - q| per datum: {listing} (all <= 0.1)"


@criterion("character-annulus-infinite", suite="character")
def _check_character_annulus():
    est = _character_bundle()["annulus"]
    ok = est.classification is Classification.INFINITE
    return ok, f"low-frequency-free datum classified {est.classification.value}"


@criterion("character-shift-law", suite="character")
def _check_character_shift():
    shifts = _character_bundle()["shifts"]
    worst = max(report.defect for report in shifts.values())
    ok = worst <= 0.2
    listing = ", ".join(f"s={s:g}: {rep.defect:.4f}" for s, rep in sorted(shifts.items()))
    return ok, f"derivative-order shift defects: {listing} (all <= 0.2)"


@criterion("character-runtime-budget", suite="character")
def _check_character_runtime():
    elapsed = _character_bundle()["elapsed"]
    return elapsed < 30.0, f"character suite computed in {elapsed:.1f}s (< 30s)"


# ---------------------------------------------------------------------------
# linear suite

_LINEAR_CASES = (
    # (alpha, q, points, box, datum cutoff)
    (0.5, 0.0, 1024, 512.0 * TWO_PI, 0.6),
    (0.5, 1.0, 1024, 512.0 * TWO_PI, 0.9),
    (1.0, 0.0, 256, 128.0 * TWO_PI, 0.7),
    (1.0, 1.0, 256, 128.0 * TWO_PI, 0.7),
)


@criterion("linear-two-sided-rates", suite="linear")
def _check_linear_rates():
    started = time.perf_counter()
    lines = []
    ok = True
    for alpha, q, points, box, cutoff in _LINEAR_CASES:
        grid = make_grid(2, points, box)
        window = box_validity_window(grid, alpha, 1.0)
        datum = generate(DatumSpec(kind=PowerLaw(q, cutoff=cutoff)), grid)
        symbol = FractionalLaplacian(alpha, 1.0, components=1, dim=2)
        series = linear_norm_series(
            datum, symbol, geometric_sample_times(window[1]), s_values=(0.0, 1.0)
        )
        for s, target in ((0.0, (1.0 + q) / alpha), (1.0, (2.0 + q) / alpha)):
            fit = fit_power_law(series, s, window)
            good = _in_band(fit.exponent, target, 0.10)
            ok = ok and good
            lines.append(
                f"a={alpha:g},q={q:g},s={s:g}: {fit.exponent:.3f} vs {target:g}"
                + ("" if good else " OUT")
            )
    elapsed = time.perf_counter() - started
    ok = ok and elapsed < 120.0
    return ok, "; ".join(lines) + f" (all within 10%; {elapsed:.0f}s < 120s)"


# ---------------------------------------------------------------------------
# qg suite


@criterion("qg-sharp-l2-rate", suite="qg")
def _check_qg_sharp():
    bundle = _qg_sharp_bundle()
    exponent = bundle["l2"].exponent
    ok = 0.85 <= exponent <= 1.15
    return ok, (
        f"fitted L2 exponent {exponent:.4f} in [0.85, 1.15] "
        f"(datum r_hat {bundle['r_hat']:.3f}, window {bundle['window'][1]:.0f})"
    )


@criterion("qg-derivative-rate", suite="qg")
def _check_qg_h1():
    bundle = _qg_sharp_bundle()
    exponent = bundle["h1"].exponent
    ok = _in_band(exponent, 2.0, 0.15)
    return ok, f"fitted first-derivative exponent {exponent:.4f} within 15% of 2"


@criterion("qg-linear-gap", suite="qg")
def _check_qg_gap_vs_linear():
    bundle = _qg_sharp_bundle()
    gap = abs(bundle["l2"].exponent - bundle["linear"].exponent)
    ok = gap <= 0.15
    return ok, (
        f"nonlinear vs paired-linear fitted exponents differ by {gap:.4f} (<= 0.15)"
    )


@criterion("qg-runtime-budget", suite="qg")
def _check_qg_runtime():
    elapsed = _qg_sharp_bundle()["elapsed"]
    return elapsed < 600.0, f"sharp-regime run completed in {elapsed:.0f}s (< 600s)"


# ---------------------------------------------------------------------------
# qg-gap suite


@criterion("qg-gap-containment", suite="qg-gap")
def _check_qg_gap_containment():
    bundle = _qg_gap_bundle()
    exponent = bundle["l2"].exponent
    lo = (1.0 / 0.75) * (1.0 + 0.5) * 0.85
    hi = (1.0 / 0.75) * (2.0 - 0.75) * 1.15
    ok = lo <= exponent <= hi and bundle["elapsed"] < 900.0
    return ok, (
        f"fitted exponent {exponent:.4f} inside the unresolved band "
        f"[{lo:.4f}, {hi:.4f}] (datum r_hat {bundle['r_hat']:.3f}, "
        f"{bundle['elapsed']:.0f}s < 900s)"
    )


# ---------------------------------------------------------------------------
# compressible suite


@criterion("compressible-l2-rate", suite="compressible")
def _check_compressible_l2():
    bundle = _compressible_bundle()
    exponent = bundle["l2"].exponent
    ok = _in_band(exponent, 1.5, 0.20)
    return ok, (
        f"fitted L2 exponent {exponent:.4f} within 20% of 3/2 "
        f"(datum r_hat {bundle['r_hat']:.3f})"
    )


@criterion("compressible-difference-rate", suite="compressible")
def _check_compressible_difference():
    bundle = _compressible_bundle()
    exponent = bundle["difference"].exponent
    threshold = 1.75 * (1.0 - 0.20)
    ok = exponent >= threshold
    return ok, (
        f"fitted nonlinear-minus-linear exponent {exponent:.4f} >= {threshold:g} "
        "(upper bound is one-sided: decaying faster than 7/4 passes; "
        f"tail window {bundle['diff_window']})"
    )


@criterion("compressible-derivative-rate", suite="compressible")
def _check_compressible_h1():
    bundle = _compressible_bundle()
    exponent = bundle["h1"].exponent
    ok = _in_band(exponent, 2.5, 0.20)
    return ok, f"fitted first-derivative exponent {exponent:.4f} within 20% of 5/2"


@criterion("compressible-runtime-budget", suite="compressible")
def _check_compressible_runtime():
    elapsed = _compressible_bundle()["elapsed"]
    return elapsed < 1800.0, f"3D run completed in {elapsed:.0f}s (< 1800s)"


# ---------------------------------------------------------------------------
# energy suite


@criterion("energy-orthogonality-qg", suite="energy")
def _check_orthogonality_qg():
    grid = make_grid(2, 64, 16.0 * TWO_PI)
    worst = 0.0
    for seed in (1, 2, 3):
        field = dealias(
            generate(DatumSpec(kind=RandomPhasePowerLaw(q=0.0, cutoff=0.8, seed=seed)), grid)
        )
        tendency = qg_nonlinear(field)
        worst = max(worst, nonlinear_orthogonality_defect(field, tendency))
    ok = worst <= 1e-10
    return ok, f"advective-tendency pairing defect {worst:.2e} (<= 1e-10 relative)"


@criterion("energy-orthogonality-compressible", suite="energy")
def _check_orthogonality_compressible():
    grid = make_grid(3, 32, 8.0 * TWO_PI)
    worst = 0.0
    for seed in (1, 2, 3):
        field = dealias(
            generate(
                DatumSpec(kind=RandomPhasePowerLaw(q=0.0, cutoff=1.2, seed=seed), components=3),
                grid,
            )
        )
        tendency = compressible_nonlinear(field)
        worst = max(worst, nonlinear_orthogonality_defect(field, tendency))
    ok = worst <= 1e-10
    return ok, f"quadratic-tendency pairing defect {worst:.2e} (<= 1e-10 relative)"


@criterion("energy-law-qg", suite="energy")
def _check_energy_law():
    grid = make_grid(2, 64, 16.0 * TWO_PI)
    datum = _normalized_datum(
        DatumSpec(kind=RandomPhasePowerLaw(q=0.0, cutoff=0.7, seed=3)), grid, "qg", 0.3
    )
    config = QGConfig(grid=grid, alpha=0.75, kappa=1.0, dt=0.01, t_end=1.0)
    residual = qg_energy_law_residual(config, datum)
    ok = residual <= 1e-8
    return ok, f"discrete energy-law residual {residual:.2e} per unit time (<= 1e-8)"


@criterion("energy-dissipation-steps", suite="energy")
def _check_dissipation_steps():
    results = []
    ok = True
    times = geometric_sample_times(10.0, t0=0.05, growth=1.3)
    grid2 = make_grid(2, 64, 16.0 * TWO_PI)
    datum2 = generate(DatumSpec(kind=RandomPhasePowerLaw(q=0.0, cutoff=0.8, seed=4)), grid2)
    grid3 = make_grid(3, 32, 8.0 * TWO_PI)
    datum3 = generate(
        DatumSpec(kind=RandomPhasePowerLaw(q=0.0, cutoff=1.2, seed=5), components=3), grid3
    )
    for label, datum, symbol in (
        ("fractional", datum2, FractionalLaplacian(0.75, 1.0, components=1, dim=2)),
        ("stiff-viscous", datum3, CompressibleStokes(0.5, dim=3)),
    ):
        margin = dissipativity_report(symbol).min_margin
        defects = dissipation_step_defects(datum, symbol, times, margin)
        scale = sobolev_norm_sq(datum, 0.0)
        worst = float(defects.max())
        good = worst <= 1e-10 * scale
        ok = ok and good
        results.append(f"{label}: worst step defect {worst:.2e} (tol {1e-10 * scale:.2e})")
    return ok, "; ".join(results)


# ---------------------------------------------------------------------------
# infrastructure suite


@criterion("infra-fft-round-trip", suite="infrastructure")
def _check_fft_round_trip():
    worst = 0.0
    for dim, points in ((2, 64), (3, 32)):
        grid = make_grid(dim, points, 8.0 * TWO_PI)
        rng = np.random.default_rng(dim)
        values = rng.standard_normal((1,) + grid.shape)
        field = from_physical(grid, values)
        back = to_physical(field)
        worst = max(worst, float(np.abs(back - values).max() / np.abs(values).max()))
    ok = worst <= 1e-12
    return ok, f"transform round-trip relative error {worst:.2e} (<= 1e-12)"


@criterion("infra-fit-recovery", suite="infrastructure")
def _check_fit_recovery():
    times = geometric_sample_times(100.0, t0=1.0, growth=1.2, include_zero=False)
    worst = 0.0
    for sigma in (0.5, 1.0, 1.5, 2.5):
        series = NormTimeSeries(
            times=times, norms_sq={0.0: 5.0 * (1.0 + times) ** (-sigma)}, metadata={}
        )
        fit = fit_power_law(series, 0.0, (times[0], times[-1]))
        worst = max(worst, abs(fit.exponent - sigma))
    ok = worst <= 1e-6
    return ok, f"synthetic power-law exponents recovered to {worst:.2e} (<= 1e-6)"


@criterion("infra-bounds-continuity", suite="infrastructure")
def _check_bounds_continuity():
    step = 0.01
    worst = 0.0
    checks = 0
    cases = []
    for alpha in (0.6, 0.75, 1.0):
        cases.append((Model.QG_L2, alpha, 0.0, None, np.arange(-0.9, 2.5, step)))
        cases.append((Model.QG_HS, alpha, 1.0, None, np.arange(-0.9, 2.5, step)))
        cases.append((Model.QG_DIFFERENCE, alpha, 0.0, None, np.arange(-0.9, 2.5, step)))
        cases.append((Model.LINEAR, alpha, 0.5, None, np.arange(-0.9, 2.5, step)))
    cases.append((Model.COMPRESSIBLE_L2, 1.0, 0.0, 1.0, np.arange(-1.4, 2.5, step)))
    cases.append((Model.COMPRESSIBLE_HS, 1.0, 1.0, 1.0, np.arange(-1.4, 2.5, step)))
    cases.append((Model.COMPRESSIBLE_DIFFERENCE, 1.0, 0.0, 1.0, np.arange(-1.4, 2.5, step)))
    for model, alpha, s, epsilon, r_grid in cases:
        uppers = np.array(
            [
                predict_bounds(model, alpha, float(r), s=s, epsilon=epsilon, dim=2).upper_exponent
                for r in r_grid
            ]
        )
        jumps = np.abs(np.diff(uppers))
        # piecewise linear in the character with slope at most 1/alpha
        allowed = step / alpha + 1e-9
        worst = max(worst, float(jumps.max() - allowed))
        checks += len(jumps)
    ok = worst <= 0.0
    return ok, (
        f"{checks} adjacent-pair continuity checks across every regime boundary; "
        f"worst excess jump {worst:.2e} (<= 0)"
    )


@criterion("infra-parallel-determinism", suite="infrastructure")
def _check_parallel_determinism():
    base = ExperimentConfig(
        model="linear",
        dim=2,
        points_per_axis=32,
        box_length=16.0 * TWO_PI,
        alpha=1.0,
        kind="power_law",
        cutoff=1.0,
    )
    vary = {"q": ["0.0", "0.5", "1.0"]}
    with tempfile.TemporaryDirectory() as tmp:
        serial = run_sweep(base, vary, Path(tmp) / "serial", jobs=1)
        parallel = run_sweep(base, vary, Path(tmp) / "parallel", jobs=8)
        if len(serial) != len(parallel):
            return False, "sweep sizes differ between worker counts"
        mismatches = []
        for rec_s, rec_p in zip(serial, parallel):
            bytes_s = (rec_s.run_dir / "series.csv").read_bytes()
            bytes_p = (rec_p.run_dir / "series.csv").read_bytes()
            if bytes_s != bytes_p:
                mismatches.append(rec_s.run_dir.name)
    ok = not mismatches
    detail = (
        f"{len(serial)} runs: series.csv byte-identical between --jobs 1 and --jobs 8"
        if ok
        else f"mismatched series for {mismatches}"
    )
    return ok, detail
