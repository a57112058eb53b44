# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-mode kernels: fused loops over the flattened mode lattice.

Reductions use blocked pairwise summation in lattice index order, so results
are deterministic for a fixed array layout regardless of how callers
parallelise across runs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport pow as cpow

cnp.import_array()

BACKEND = "compiled"

DEF BLOCK = 128


cdef double _pairwise(double* buf, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t mid, i
    cdef double acc = 0.0
    if hi - lo <= BLOCK:
        for i in range(lo, hi):
            acc += buf[i]
        return acc
    mid = lo + ((hi - lo) // 2)
    return _pairwise(buf, lo, mid) + _pairwise(buf, mid, hi)


def weighted_mode_sum(
    cnp.complex128_t[:, ::1] coeffs,
    cnp.float64_t[::1] ksq,
    double s,
    double rho_sq,
    bint include_zero,
):
    """Sum of ``|xi|^(2s) * |coeff|^2`` over retained modes, all components."""
    cdef Py_ssize_t m = coeffs.shape[0]
    cdef Py_ssize_t n = coeffs.shape[1]
    cdef Py_ssize_t i, c
    cdef double w, p, re, im, k2
    terms_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.float64_t[::1] terms = terms_arr
    with nogil:
        for i in range(n):
            k2 = ksq[i]
            if k2 > rho_sq:
                continue
            if k2 == 0.0:
                if not include_zero or s != 0.0:
                    continue
                w = 1.0
            elif s == 0.0:
                w = 1.0
            elif s == 1.0:
                w = k2
            else:
                w = cpow(k2, s)
            p = 0.0
            for c in range(m):
                re = coeffs[c, i].real
                im = coeffs[c, i].imag
                p += re * re + im * im
            terms[i] = w * p
    cdef double total
    with nogil:
        total = _pairwise(&terms[0], 0, n)
    return total


def count_modes_in_ball(cnp.float64_t[::1] ksq, double rho_sq):
    """Number of nonzero lattice modes with ``|xi|^2 <= rho_sq``."""
    cdef Py_ssize_t i, n = ksq.shape[0]
    cdef long count = 0
    with nogil:
        for i in range(n):
            if ksq[i] > 0.0 and ksq[i] <= rho_sq:
                count += 1
    return count


def apply_longitudinal_factor(
    cnp.complex128_t[:, ::1] coeffs,
    kvec,
    cnp.float64_t[::1] inv_ksq,
    cnp.float64_t[::1] diag_factor,
    cnp.float64_t[::1] long_factor,
):
    """In-place per-mode update used by the viscous/pressure propagator."""
    cdef Py_ssize_t m = coeffs.shape[0]
    cdef Py_ssize_t n = coeffs.shape[1]
    if m != len(kvec):
        raise ValueError("component count must match wavenumber axes")
    cdef cnp.float64_t[::1] k0 = kvec[0]
    cdef cnp.float64_t[::1] k1 = kvec[1]
    cdef cnp.float64_t[::1] k2 = kvec[2] if m == 3 else kvec[0]
    cdef Py_ssize_t i
    cdef double complex dot, scale
    cdef double a, g
    with nogil:
        for i in range(n):
            a = diag_factor[i]
            g = inv_ksq[i] * (long_factor[i] - a)
            if m == 3:
                dot = k0[i] * coeffs[0, i] + k1[i] * coeffs[1, i] + k2[i] * coeffs[2, i]
                scale = dot * g
                coeffs[0, i] = coeffs[0, i] * a + k0[i] * scale
                coeffs[1, i] = coeffs[1, i] * a + k1[i] * scale
                coeffs[2, i] = coeffs[2, i] * a + k2[i] * scale
            else:
                dot = k0[i] * coeffs[0, i] + k1[i] * coeffs[1, i]
                scale = dot * g
                coeffs[0, i] = coeffs[0, i] * a + k0[i] * scale
                coeffs[1, i] = coeffs[1, i] * a + k1[i] * scale
