"""Detectors that miscount: both discrete levels couple to the continuum.

Everything is expressed through transition amplitudes ``q[a, b] = <b|U(t)|a>``
with ``a`` in ``{e, g}``.  A click contributes ``sum_k q[a, k] conj(q[b, k])``
to the ``rho_ab`` block; a silent detector maps the atomic block through the
2x2 discrete part of ``U``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import CLICK_DE, CLICK_DG, DOUBLE_NO_CLICK, AtomCavityState, _raw_state, trace_cavity
from .detect_ineff import BRANCH_FLOOR, ChainDistribution, ChainOutcome
from .errors import ProbabilityOutOfRange, ZeroProbabilityBranch
from .spectral import E, G, N_DISCRETE, ContinuumGrid, DetectorSpec, Zone, eigensystem, propagator_columns

CROSS_TRANSITION_THRESHOLD = 1e-4
PROBABILITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class QCoefficientTable:
    zone: Zone
    t: float
    q_discrete: np.ndarray  # [a, b] for a, b in (e, g)
    q_ionize: np.ndarray  # [a, k]

    @property
    def ionization_weights(self) -> np.ndarray:
        """``sum_k |q[a, k]|^2`` for ``a = e, g``: efficiency and wrong-count probability."""
        return np.sum(np.abs(self.q_ionize) ** 2, axis=1)

    @property
    def gram(self) -> np.ndarray:
        """``W[a, b] = sum_k q[a, k] conj(q[b, k])``, the click weight of block ``rho_ab``."""
        return self.q_ionize @ self.q_ionize.conj().T

    @property
    def overlap(self) -> complex:
        return complex(self.gram[E, G])

    @property
    def transfer(self) -> np.ndarray:
        """Discrete block of the propagator, ``M[c, a] = <c|U|a>``."""
        return self.q_discrete.T

    @property
    def cross_transition_weight(self) -> float:
        """``|q[g, e]|^2``, the continuum-mediated transfer between the two levels."""
        return float(abs(self.q_discrete[G, E]) ** 2)

    def unitarity_defect(self) -> float:
        cols = np.vstack([self.q_discrete.T, self.q_ionize.T])
        return float(np.abs(cols.conj().T @ cols - np.eye(2)).max())


def q_table(grid: ContinuumGrid, spec: DetectorSpec, t: Optional[float] = None) -> QCoefficientTable:
    """Transition amplitudes out of ``|e>`` and ``|g>`` after time ``t``.

    ``t`` defaults to ``spec.interaction_time``.
    """
    t = spec.interaction_time if t is None else float(t)
    if t < 0:
        raise ValueError("t must be >= 0")
    cols = propagator_columns(eigensystem(grid, spec), [E, G], t)  # (N+2, 2)
    q = cols.T  # q[a, b] = <b|U|a>
    return QCoefficientTable(spec.zone, t, q[:, :N_DISCRETE].copy(), q[:, N_DISCRETE:].copy())


def _checked(p: float) -> float:
    if p < -PROBABILITY_TOL or p > 1.0 + PROBABILITY_TOL:
        raise ProbabilityOutOfRange(f"probability {p!r} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def _click_weight(state: AtomCavityState, table: QCoefficientTable) -> float:
    p_ee, p_gg, c_eg = trace_cavity(state)
    w = table.gram
    return float(w[E, E].real * p_ee + w[G, G].real * p_gg + 2.0 * (w[E, G] * c_eg).real)


def interference_term(state: AtomCavityState, table: QCoefficientTable) -> float:
    """Contribution of the atomic coherence to the click probability."""
    return float(2.0 * (table.gram[E, G] * trace_cavity(state)[2]).real)


def click_probability_false(state: AtomCavityState, table: QCoefficientTable) -> float:
    if abs(state.trace - 1.0) > PROBABILITY_TOL:
        raise ValueError(f"state must be normalized (trace {state.trace!r})")
    return _checked(_click_weight(state, table))


def _click_cavity_unnormalized(state: AtomCavityState, table: QCoefficientTable) -> np.ndarray:
    w = table.gram
    return (w[E, E] * state.rho_ee + w[E, G] * state.rho_eg
            + w[G, E] * state.rho_ge + w[G, G] * state.rho_gg)


def post_click_state_false(state: AtomCavityState, table: QCoefficientTable) -> np.ndarray:
    """Cavity state conditioned on a click in the zone described by ``table``."""
    rho = _click_cavity_unnormalized(state, table)
    p = float(np.trace(rho).real)
    if p <= BRANCH_FLOOR:
        raise ZeroProbabilityBranch("the detector cannot click on this state")
    return rho / p


def _silent(state: AtomCavityState, table: QCoefficientTable) -> AtomCavityState:
    """Unnormalized atom-cavity state after the detector stays silent."""
    m = table.transfer
    blocks = [[state.rho_ee, state.rho_eg], [state.rho_ge, state.rho_gg]]

    def out(c, d):
        return sum(m[c, a] * np.conj(m[d, b]) * blocks[a][b] for a in (E, G) for b in (E, G))

    return _raw_state(out(E, E), out(E, G), out(G, G))


def nonclick_state_false(state: AtomCavityState, table: QCoefficientTable) -> ChainOutcome:
    rest = _silent(state, table)
    p = rest.trace
    if p <= BRANCH_FLOOR:
        raise ZeroProbabilityBranch("the detector clicks with certainty")
    return ChainOutcome(_checked(p), rest.scaled(1.0 / p), None)


def chain_from_tables(state: AtomCavityState, table_de: QCoefficientTable,
                      table_dg: QCoefficientTable) -> ChainDistribution:
    if abs(state.trace - 1.0) > PROBABILITY_TOL:
        raise ValueError(f"state must be normalized (trace {state.trace!r})")
    click_de = _click_cavity_unnormalized(state, table_de)
    p1 = float(np.trace(click_de).real)
    after_de = _silent(state, table_de)
    click_dg = _click_cavity_unnormalized(after_de, table_dg)
    p2 = float(np.trace(click_dg).real)
    after_dg = _silent(after_de, table_dg)
    p3 = after_dg.trace
    return ChainDistribution([
        ChainOutcome(_checked(p1), click_de / p1 if p1 > BRANCH_FLOOR else None, CLICK_DE),
        ChainOutcome(_checked(p2), click_dg / p2 if p2 > BRANCH_FLOOR else None, CLICK_DG),
        ChainOutcome(_checked(p3), after_dg.scaled(1.0 / p3) if p3 > BRANCH_FLOOR else None,
                     DOUBLE_NO_CLICK),
    ])


def chain_false(state: AtomCavityState, grid: ContinuumGrid, spec_de: DetectorSpec,
                spec_dg: DetectorSpec, *, warn_threshold: Optional[float] = CROSS_TRANSITION_THRESHOLD
                ) -> ChainDistribution:
    """Three-outcome distribution with miscounting dynamics in both zones."""
    if spec_de.zone is not Zone.DE or spec_dg.zone is not Zone.DG:
        raise ValueError("expected a D_e spec followed by a D_g spec")
    table_de = q_table(grid, spec_de)
    table_dg = q_table(grid, spec_dg)
    if warn_threshold is not None and table_de.cross_transition_weight > warn_threshold:
        warnings.warn(f"|q_ge|^2 = {table_de.cross_transition_weight:.3e} in D_e: the levels "
                      "exchange population through the continuum", RuntimeWarning, stacklevel=2)
    return chain_from_tables(state, table_de, table_dg)
