"""Fidelity between cavity states left behind by different detector models."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, validate_density
from .detect_false import CROSS_TRANSITION_THRESHOLD, QCoefficientTable
from .detect_ineff import BRANCH_FLOOR
from .errors import AssumptionViolated, NotDensityOperator, ZeroProbabilityBranch
from .spectral import E, G


@dataclass(frozen=True)
class FidelityValue:
    value: float

    def __post_init__(self):
        if not -DEFAULT_TOL <= self.value <= 1.0 + DEFAULT_TOL:
            raise ValueError(f"fidelity {self.value!r} outside [0, 1]")

    def __float__(self) -> float:
        return self.value


def _bounded(x: float) -> FidelityValue:
    return FidelityValue(min(max(float(x), 0.0), 1.0))


def psd_sqrt(rho: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Square root of a PSD matrix.

    Eigenvalues in ``[-tol, 0)`` are floored at zero, and so are positive ones
    at roundoff level, whose square roots would otherwise leak ~1e-8 errors.
    """
    w, v = np.linalg.eigh(rho)
    if w.min() < -tol:
        raise NotDensityOperator(f"matrix has eigenvalue {w.min():.3e}")
    noise = len(w) * np.finfo(float).eps * max(abs(w).max(), 1.0)
    w = np.where(w > noise, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho_a, rho_b, *, tol: float = DEFAULT_TOL) -> FidelityValue:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(A) B sqrt(A)))^2``, computed as ``||sqrt(A) sqrt(B)||_1^2``."""
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    if rho_a.shape != rho_b.shape:
        raise NotDensityOperator(f"shape mismatch {rho_a.shape} vs {rho_b.shape}")
    validate_density(rho_a, tol=tol)
    validate_density(rho_b, tol=tol)
    # F = ||sqrt(A) sqrt(B)||_1^2; singular values avoid a second square root
    sv = np.linalg.svd(psd_sqrt(rho_a, tol) @ psd_sqrt(rho_b, tol), compute_uv=False)
    return _bounded(np.sum(sv) ** 2)


def fidelity_qubit(rho_a, rho_b) -> float:
    """Closed form for 2x2 states: ``Tr(AB) + 2 sqrt(det A det B)``."""
    rho_a = np.asarray(rho_a)
    rho_b = np.asarray(rho_b)
    if rho_a.shape != (2, 2) or rho_b.shape != (2, 2):
        raise ValueError("fidelity_qubit needs 2x2 matrices")
    det = max(float(np.linalg.det(rho_a).real), 0.0) * max(float(np.linalg.det(rho_b).real), 0.0)
    return float(np.trace(rho_a @ rho_b).real + 2.0 * np.sqrt(det))


def fidelity_first_zone(table_de: QCoefficientTable) -> FidelityValue:
    """Overlap of the post-click cavity states of exact and miscounting D_e.

    Valid for the entangled input ``(|e,0> + |g,1>)/sqrt(2)``: the ratio of the
    correct ionization weight to the total.
    """
    right, wrong = table_de.ionization_weights
    total = right + wrong
    if total <= BRANCH_FLOOR:
        raise ZeroProbabilityBranch("D_e never ionizes")
    return _bounded(right / total)


def _check_cross(table_de: QCoefficientTable, threshold: float, strict: bool) -> None:
    cross = table_de.cross_transition_weight
    if cross > threshold:
        msg = f"|q_ge|^2 = {cross:.3e} exceeds {threshold:g}; the closed form drops it"
        if strict:
            raise AssumptionViolated(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=3)


def fidelity_second_zone(table_de: QCoefficientTable, table_dg: QCoefficientTable, *,
                         threshold: float = CROSS_TRANSITION_THRESHOLD,
                         strict: bool = True) -> FidelityValue:
    """Second-zone fidelity assuming no continuum-mediated ``e <-> g`` transfer in D_e.

    Raises :class:`AssumptionViolated` when ``|q_ge|^2`` in D_e exceeds
    ``threshold`` (only warns with ``strict=False``).
    """
    _check_cross(table_de, threshold, strict)
    stay_g = abs(table_de.q_discrete[G, G]) ** 2
    stay_e = abs(table_de.q_discrete[E, E]) ** 2
    right_g, wrong_e = table_dg.ionization_weights[G], table_dg.ionization_weights[E]
    num = stay_g * right_g
    den = num + stay_e * wrong_e
    if den <= BRANCH_FLOOR:
        raise ZeroProbabilityBranch("D_g never ionizes")
    return _bounded(num / den)


def fidelity_second_zone_general(table_de: QCoefficientTable,
                                 table_dg: QCoefficientTable) -> FidelityValue:
    """Second-zone fidelity keeping every ``q_ge`` cross term (entangled input)."""
    q1 = table_de.q_discrete
    qe_k, qg_k = table_dg.q_ionize[E], table_dg.q_ionize[G]
    gg, ge, ee = q1[G, G], q1[G, E], q1[E, E]

    def weight(a, b):
        # sum_k |a q_gk + b q_ek|^2 expanded term by term
        terms = (abs(a) ** 2 * abs(qg_k) ** 2
                 + np.conj(a) * b * np.conj(qg_k) * qe_k
                 + a * np.conj(b) * qg_k * np.conj(qe_k)
                 + abs(b) ** 2 * abs(qe_k) ** 2)
        return float(np.sum(terms).real)

    num = weight(gg, ge)
    norm = weight(ge, ee) + num
    if norm <= BRANCH_FLOOR:
        raise ZeroProbabilityBranch("D_g never ionizes")
    return _bounded(num / norm)
