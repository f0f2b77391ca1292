# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.  Signatures mirror ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def pole_sums(const double[::1] points, const double[::1] energies):
    """Return ``(S1, S2)`` with ``S1[i] = sum_k 1/(x_i - e_k)`` and ``S2`` the squared version."""
    cdef Py_ssize_t n = points.shape[0], m = energies.shape[0], i, k
    cdef double x, d, s1, s2
    out1 = np.empty(n, dtype=np.float64)
    out2 = np.empty(n, dtype=np.float64)
    cdef double[::1] o1 = out1, o2 = out2
    with nogil:
        for i in range(n):
            x = points[i]
            s1 = 0.0
            s2 = 0.0
            for k in range(m):
                d = 1.0 / (x - energies[k])
                s1 += d
                s2 += d * d
            o1[i] = s1
            o2[i] = s2
    return out1, out2


def spectral_sum(const double[::1] weights, const double[::1] eigenvalues, const double[::1] times):
    """``A(t) = sum_mu w_mu exp(-i lambda_mu t)`` for every ``t`` in ``times``."""
    cdef Py_ssize_t nt = times.shape[0], n = eigenvalues.shape[0], j, mu
    cdef double t, ph, re, im
    out = np.empty(nt, dtype=np.complex128)
    cdef double complex[::1] o = out
    with nogil:
        for j in range(nt):
            t = times[j]
            re = 0.0
            im = 0.0
            for mu in range(n):
                ph = eigenvalues[mu] * t
                re += weights[mu] * cos(ph)
                im -= weights[mu] * sin(ph)
            o[j] = re + 1j * im
    return out
