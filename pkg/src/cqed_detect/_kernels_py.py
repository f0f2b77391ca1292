"""NumPy reference implementations of the compiled kernels."""
import numpy as np

_CHUNK = 1 << 22  # elements per temporary block


def pole_sums(points, energies):
    points = np.ascontiguousarray(points, dtype=np.float64)
    energies = np.ascontiguousarray(energies, dtype=np.float64)
    s1 = np.empty(points.size)
    s2 = np.empty(points.size)
    step = max(1, _CHUNK // max(1, energies.size))
    for lo in range(0, points.size, step):
        d = 1.0 / (points[lo:lo + step, None] - energies[None, :])
        s1[lo:lo + step] = d.sum(axis=1)
        s2[lo:lo + step] = (d * d).sum(axis=1)
    return s1, s2


def spectral_sum(weights, eigenvalues, times):
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    eigenvalues = np.ascontiguousarray(eigenvalues, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    out = np.empty(times.size, dtype=complex)
    step = max(1, _CHUNK // max(1, eigenvalues.size))
    for lo in range(0, times.size, step):
        out[lo:lo + step] = np.exp(-1j * np.outer(times[lo:lo + step], eigenvalues)) @ weights
    return out
