"""Detection-zone Hamiltonians on a uniformly discretized ionization continuum.

Basis ordering is ``(e, g, k_1, ..., k_N)``.  Couplings are per mode: the
discrete level ``a`` couples to every grid state with the same real constant,
so the golden-rule rate is ``2 pi v^2 / de`` (hbar = 1).
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import ConvergenceFailure, PoleCollision, ZeroCoupling

E, G = 0, 1  # basis indices of the discrete levels
N_DISCRETE = 2
POLE_GUARD = 1e-12  # fraction of the bandwidth


class Zone(enum.Enum):
    DE = "De"
    DG = "Dg"

    @property
    def target(self) -> int:
        """Basis index of the level this zone is built to ionize."""
        return E if self is Zone.DE else G


@dataclass(frozen=True)
class ContinuumGrid:
    n_modes: int
    e_min: float
    e_max: float

    def __post_init__(self):
        if int(self.n_modes) != self.n_modes or self.n_modes < 3:
            raise ValueError(f"n_modes must be an integer >= 3, got {self.n_modes!r}")
        if not self.e_max > self.e_min:
            raise ValueError(f"need e_max > e_min, got [{self.e_min}, {self.e_max}]")

    @classmethod
    def centered(cls, center: float, bandwidth: float, n_modes: int) -> "ContinuumGrid":
        return cls(n_modes, center - 0.5 * bandwidth, center + 0.5 * bandwidth)

    @property
    def energies(self) -> np.ndarray:
        return np.linspace(self.e_min, self.e_max, self.n_modes)

    @property
    def bandwidth(self) -> float:
        return self.e_max - self.e_min

    @property
    def spacing(self) -> float:
        return self.bandwidth / (self.n_modes - 1)

    @property
    def level_density(self) -> float:
        return 1.0 / self.spacing

    @property
    def recurrence_time(self) -> float:
        return 2.0 * np.pi / self.spacing

    @property
    def size(self) -> int:
        """Dimension of the atom + continuum space."""
        return self.n_modes + N_DISCRETE


def golden_rule_rate(coupling: float, grid: ContinuumGrid) -> float:
    return 2.0 * np.pi * coupling ** 2 * grid.level_density


def coupling_for_rate(rate: float, grid: ContinuumGrid) -> float:
    """Per-mode coupling whose golden-rule rate on ``grid`` equals ``rate``."""
    if rate < 0:
        raise ValueError("rate must be non-negative")
    return float(np.sqrt(rate * grid.spacing / (2.0 * np.pi)))


@dataclass(frozen=True)
class DetectorSpec:
    """Parameters of one detection zone.

    ``coupling_e`` and ``coupling_g`` couple ``|e>`` and ``|g>`` to the
    continuum.  The inefficient-detector model sets the non-target coupling to
    zero; the false-count model uses both.
    """

    eps_e: float
    eps_g: float
    coupling_e: float
    coupling_g: float = 0.0
    zone: Zone = Zone.DE
    interaction_time: float = 0.0

    def __post_init__(self):
        for name in ("eps_e", "eps_g", "coupling_e", "coupling_g", "interaction_time"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.interaction_time < 0:
            raise ValueError("interaction_time must be >= 0")

    @classmethod
    def inefficient(cls, zone: Zone, coupling: float, interaction_time: float,
                    eps_e: float = 1.0, eps_g: float = 0.0) -> "DetectorSpec":
        """Single-level detector: only the zone's target level sees the continuum."""
        ce, cg = (coupling, 0.0) if zone is Zone.DE else (0.0, coupling)
        return cls(eps_e, eps_g, ce, cg, zone, interaction_time)

    @property
    def couplings(self) -> tuple[float, float]:
        return (self.coupling_e, self.coupling_g)

    @property
    def target_coupling(self) -> float:
        return self.couplings[self.zone.target]

    @property
    def wrong_coupling(self) -> float:
        return self.couplings[1 - self.zone.target]

    @property
    def is_single_level(self) -> bool:
        return self.wrong_coupling == 0.0

    def with_time(self, t: float) -> "DetectorSpec":
        return replace(self, interaction_time=t)

    def hamiltonian_key(self) -> tuple:
        return (self.eps_e, self.eps_g, self.coupling_e, self.coupling_g)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Full spectral decomposition; ``components[b, mu] = <b|psi_mu>``."""

    eigenvalues: np.ndarray
    components: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    def matrix(self) -> np.ndarray:
        return (self.components * self.eigenvalues) @ self.components.T


def build_hamiltonian(grid: ContinuumGrid, spec: DetectorSpec) -> np.ndarray:
    n = grid.size
    h = np.zeros((n, n))
    h[E, E] = spec.eps_e
    h[G, G] = spec.eps_g
    idx = np.arange(N_DISCRETE, n)
    h[idx, idx] = grid.energies
    h[E, N_DISCRETE:] = h[N_DISCRETE:, E] = spec.coupling_e
    h[G, N_DISCRETE:] = h[N_DISCRETE:, G] = spec.coupling_g
    return h


def _fix_signs(vecs: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    # pivot on |g>, then |e>, then the largest entry
    pivot = np.where(np.abs(vecs[G]) > tol, vecs[G],
                     np.where(np.abs(vecs[E]) > tol, vecs[E], 0.0))
    largest = vecs[np.argmax(np.abs(vecs), axis=0), np.arange(vecs.shape[1])]
    pivot = np.where(pivot == 0.0, largest, pivot)
    return vecs * np.where(pivot < 0, -1.0, 1.0)


def diagonalize(h: np.ndarray) -> EigenSystem:
    """Dense symmetric eigendecomposition with ascending eigenvalues.

    Eigenvectors are scaled so that their ``|g>`` component is non-negative,
    or their ``|e>`` component when ``|g>`` is absent.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.allclose(h, h.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(h).max())):
        raise ValueError("matrix is not symmetric")
    try:
        lam, vecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    if h.shape[0] > N_DISCRETE:
        vecs = _fix_signs(vecs)
    lam.setflags(write=False)
    vecs.setflags(write=False)
    return EigenSystem(lam, vecs)


@functools.lru_cache(maxsize=64)
def _cached_eigensystem(grid: ContinuumGrid, key: tuple) -> EigenSystem:
    eps_e, eps_g, ce, cg = key
    return diagonalize(build_hamiltonian(grid, DetectorSpec(eps_e, eps_g, ce, cg)))


def eigensystem(grid: ContinuumGrid, spec: DetectorSpec) -> EigenSystem:
    """Memoized ``diagonalize(build_hamiltonian(grid, spec))``."""
    return _cached_eigensystem(grid, spec.hamiltonian_key())


def evolve(eig: EigenSystem, amplitudes, t: float) -> np.ndarray:
    """Apply ``exp(-iHt)`` to a vector (or to the columns of a matrix)."""
    x = np.asarray(amplitudes, dtype=complex)
    if x.shape[0] != eig.size:
        raise ValueError(f"amplitude vector has length {x.shape[0]}, expected {eig.size}")
    v = eig.components
    phase = np.exp(-1j * eig.eigenvalues * t)
    coeff = v.T @ x
    coeff = phase * coeff if x.ndim == 1 else phase[:, None] * coeff
    return v @ coeff


def propagator_columns(eig: EigenSystem, columns, t: float) -> np.ndarray:
    """Columns ``exp(-iHt)[:, columns]`` without forming the full propagator."""
    v = eig.components
    return (v * np.exp(-1j * eig.eigenvalues * t)) @ v[columns].T


def survival_amplitude(eig: EigenSystem, index: int, times) -> np.ndarray:
    """``<a|exp(-iHt)|a> = sum_mu |<psi_mu|a>|^2 exp(-i lambda_mu t)`` on a time grid."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    weights = np.ascontiguousarray(eig.components[index] ** 2)
    return kernels.spectral_sum(weights, np.ascontiguousarray(eig.eigenvalues), times)


def _check_poles(grid: ContinuumGrid, eigenvalues: np.ndarray, extra=()) -> None:
    guard = POLE_GUARD * grid.bandwidth
    poles = np.concatenate([grid.energies, np.asarray(extra, dtype=float)])
    # nearest pole via sorted search
    poles.sort()
    pos = np.clip(np.searchsorted(poles, eigenvalues), 1, poles.size - 1)
    dist = np.minimum(np.abs(eigenvalues - poles[pos - 1]), np.abs(eigenvalues - poles[pos]))
    bad = dist <= guard
    if np.any(bad):
        raise PoleCollision(f"eigenvalue {eigenvalues[bad][0]!r} is within {guard:.1e} of a pole")


def stationary_coefficients_single(grid: ContinuumGrid, spec: DetectorSpec, eigenvalue):
    """Eigenvector amplitudes of the single-level Hamiltonian at ``eigenvalue``.

    Returns ``(amp_level, amp_k)`` where ``amp_level`` is the overlap with the
    zone's coupled level and ``amp_k`` the continuum overlaps::

        amp_level = [1 + sum_k (v / (x - e_k))^2]^(-1/2)
        amp_k     = v / (x - e_k) * amp_level

    ``eigenvalue`` may be an array; the outputs then gain a leading axis.
    """
    if not spec.is_single_level:
        raise ValueError("single-level coefficients need the non-target coupling to be zero")
    x = np.atleast_1d(np.asarray(eigenvalue, dtype=float))
    _check_poles(grid, x)
    v = spec.target_coupling
    ek = grid.energies
    _, s2 = kernels.pole_sums(np.ascontiguousarray(x), ek)
    amp = 1.0 / np.sqrt(1.0 + v * v * s2)
    amp_k = v / (x[:, None] - ek[None, :]) * amp[:, None]
    if np.ndim(eigenvalue) == 0:
        return float(amp[0]), amp_k[0]
    return amp, amp_k


def stationary_coefficients_double(grid: ContinuumGrid, spec: DetectorSpec, eigenvalue):
    """Eigenvector amplitudes ``(amp_g, amp_e, amp_k)`` when both levels couple.

    Requires ``eps_g == 0``.  With ``x`` the eigenvalue::

        amp_e = x w_e / (w_g (x - eps_e)) * amp_g
        amp_k = (w_g + x w_e^2 / (w_g (x - eps_e))) / (x - e_k) * amp_g

    and ``amp_g > 0`` fixed by normalization.
    """
    if spec.eps_g != 0.0:
        raise ValueError("the closed form is written for eps_g = 0")
    we, wg = spec.coupling_e, spec.coupling_g
    if wg == 0.0:
        raise ZeroCoupling("coupling_g = 0 makes the ratio singular; use the single-level form")
    x = np.atleast_1d(np.asarray(eigenvalue, dtype=float))
    _check_poles(grid, x, extra=(spec.eps_e,))
    ek = grid.energies
    ratio_e = x * we / (wg * (x - spec.eps_e))
    strength = wg + we * ratio_e
    _, s2 = kernels.pole_sums(np.ascontiguousarray(x), ek)
    amp_g = 1.0 / np.sqrt(1.0 + ratio_e ** 2 + strength ** 2 * s2)
    amp_e = ratio_e * amp_g
    amp_k = (strength * amp_g)[:, None] / (x[:, None] - ek[None, :])
    if np.ndim(eigenvalue) == 0:
        return float(amp_g[0]), float(amp_e[0]), amp_k[0]
    return amp_g, amp_e, amp_k


def pole_equation_residual(grid: ContinuumGrid, spec: DetectorSpec, eigenvalue) -> np.ndarray:
    """``x - eps - v^2 sum_k 1/(x - e_k)`` for the single-level model.

    Zero exactly at the eigenvalues of the coupled (level + continuum) block.
    """
    x = np.atleast_1d(np.asarray(eigenvalue, dtype=float))
    eps = (spec.eps_e, spec.eps_g)[spec.zone.target]
    s1, _ = kernels.pole_sums(np.ascontiguousarray(x), grid.energies)
    return x - eps - spec.target_coupling ** 2 * s1
