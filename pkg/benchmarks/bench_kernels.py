"""Benchmark the compiled kernel core against the numpy reference.

Times the three per-mode hot loops on mode counts matching the acceptance
grids (64^2 through 256^2 and 64^3) and reports the speedup.  Run with::

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import timeit

import numpy as np

from decaylab.kernels import reference

try:
    from decaylab.kernels import _fastcore
except ImportError:
    _fastcore = None


def make_inputs(modes, components, seed=0):
    rng = np.random.default_rng(seed)
    coeffs = np.ascontiguousarray(
        rng.standard_normal((components, modes)) + 1j * rng.standard_normal((components, modes))
    )
    ksq = np.ascontiguousarray(np.abs(rng.standard_normal(modes)) * 4.0)
    ksq[0] = 0.0
    return coeffs, ksq


def best_time(fn, repeats):
    return min(timeit.repeat(fn, number=1, repeat=repeats))


def bench_weighted_sum(backend, modes, components, repeats):
    coeffs, ksq = make_inputs(modes, components)
    rho_sq = float(np.median(ksq))
    return best_time(lambda: backend.weighted_mode_sum(coeffs, ksq, 1.0, rho_sq, False), repeats)


def bench_count(backend, modes, repeats):
    _, ksq = make_inputs(modes, 1)
    rho_sq = float(np.median(ksq))
    return best_time(lambda: backend.count_modes_in_ball(ksq, rho_sq), repeats)


def bench_longitudinal(backend, modes, repeats):
    rng = np.random.default_rng(1)
    kvec = tuple(np.ascontiguousarray(rng.standard_normal(modes)) for _ in range(3))
    ksq = sum(k**2 for k in kvec)
    inv_ksq = np.ascontiguousarray(1.0 / ksq)
    diag = np.ascontiguousarray(np.exp(-0.2 * ksq))
    long = np.ascontiguousarray(np.exp(-0.7 * ksq))
    coeffs = np.ascontiguousarray(
        rng.standard_normal((3, modes)) + 1j * rng.standard_normal((3, modes))
    )

    def run():
        work = coeffs.copy()
        backend.apply_longitudinal_factor(work, kvec, inv_ksq, diag, long)

    return best_time(run, repeats)


CASES = [
    ("weighted_mode_sum (1 comp)", lambda b, m, r: bench_weighted_sum(b, m, 1, r)),
    ("weighted_mode_sum (3 comp)", lambda b, m, r: bench_weighted_sum(b, m, 3, r)),
    ("count_modes_in_ball", lambda b, m, r: bench_count(b, m, r)),
    ("apply_longitudinal_factor", lambda b, m, r: bench_longitudinal(b, m, r)),
]

MODE_COUNTS = [64 * 64, 256 * 256, 64 * 64 * 64]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7, help="best-of repeats per case")
    args = parser.parse_args()

    if _fastcore is None:
        print("compiled backend not built; showing the python reference alone")
    backends = [("python", reference)] + ([("compiled", _fastcore)] if _fastcore else [])

    header = f"{'kernel':<28} {'modes':>9} " + "".join(f"{name:>12}" for name, _ in backends)
    if _fastcore is not None:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, bench in CASES:
        for modes in MODE_COUNTS:
            times = [bench(impl, modes, args.repeats) for _, impl in backends]
            row = f"{label:<28} {modes:>9} " + "".join(f"{t * 1e6:>10.1f}us" for t in times)
            if len(times) == 2:
                row += f"{times[0] / times[1]:>9.2f}x"
            print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
