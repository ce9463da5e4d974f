# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled detection kernel.

Keep the floating-point operation order in lockstep with _detect_np.py:
per antenna, accumulate (dr*dr + di*di) sequentially, then apply the
offset and denominator once. The build disables FP contraction so the
compiler cannot fuse these into FMAs and break backend parity.
"""

import numpy as np

from libc.math cimport INFINITY


def detect_symbols(const double complex[:, ::1] y,
                   const double complex[:, ::1] ref,
                   const double[::1] ln_sig2,
                   const double[::1] sig2):
    """Minimum-metric detection; see the NumPy twin for the contract."""
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t n_rx = y.shape[1]
    cdef Py_ssize_t m = ref.shape[0]
    out_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t i, k, r, best_k
    cdef double acc, metric, best, dr, di
    with nogil:
        for i in range(n):
            best = INFINITY
            best_k = 0
            for k in range(m):
                acc = 0.0
                for r in range(n_rx):
                    dr = y[i, r].real - ref[k, r].real
                    di = y[i, r].imag - ref[k, r].imag
                    acc = acc + (dr * dr + di * di)
                metric = ln_sig2[k] + acc / sig2[k]
                if metric < best:
                    best = metric
                    best_k = k
            out[i] = best_k
    return out_arr
