"""Intrinsically inefficient detectors: one level per zone sees the continuum.

Efficiencies enter either as plain numbers in [0, 1] or dynamically, from the
unitary evolution of the coupled level on a :class:`ContinuumGrid`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import (CLICK_DE, CLICK_DG, DOUBLE_NO_CLICK, AtomCavityState, ClickRecord,
                   _raw_state, trace_atom, trace_cavity)
from .errors import ZeroProbabilityBranch
from .spectral import (N_DISCRETE, ContinuumGrid, DetectorSpec, Zone, eigensystem, evolve,
                       golden_rule_rate)

BRANCH_FLOOR = 1e-14
_NORM_TOL = 1e-10


class EfficiencySource(enum.Enum):
    ANALYTIC = "analytic"
    NUMERIC = "numeric"
    GIVEN = "given"


@dataclass(frozen=True)
class Efficiency:
    value: float
    source: EfficiencySource = EfficiencySource.GIVEN

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"efficiency must lie in [0, 1], got {self.value!r}")

    def __float__(self) -> float:
        return self.value


EfficiencyLike = Union[Efficiency, float]


def _p(x: EfficiencyLike) -> float:
    return x.value if isinstance(x, Efficiency) else Efficiency(float(x)).value


def _populations(state: AtomCavityState) -> tuple[float, float]:
    p_ee, p_gg, _ = trace_cavity(state)
    if abs(p_ee + p_gg - 1.0) > _NORM_TOL:
        raise ValueError(f"state must be normalized (trace {p_ee + p_gg!r})")
    return p_ee, p_gg


@dataclass(frozen=True, eq=False)
class ChainOutcome:
    """One branch of the measurement chain.

    ``conditional_state`` is an :class:`AtomCavityState` for branches where the
    atom survives, a cavity density matrix after a click (or when only the
    cavity is known), and ``None`` for impossible branches.  ``record`` is
    ``None`` for the intermediate no-click-at-D_e branch.
    """

    probability: float
    conditional_state: Union[AtomCavityState, np.ndarray, None]
    record: Optional[ClickRecord]

    @property
    def cavity_state(self) -> Optional[np.ndarray]:
        s = self.conditional_state
        if isinstance(s, AtomCavityState):
            return trace_atom(s)
        return s


class ChainDistribution(tuple):
    """The three terminal outcomes, always ordered click D_e, click D_g, double no-click."""

    def __new__(cls, outcomes):
        outcomes = tuple(outcomes)
        if [o.record for o in outcomes] != [CLICK_DE, CLICK_DG, DOUBLE_NO_CLICK]:
            raise ValueError("outcomes must be the three terminal records in canonical order")
        return super().__new__(cls, outcomes)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([o.probability for o in self])

    def __getitem__(self, key):
        if isinstance(key, str):
            for o in self:
                if o.record.label == key:
                    return o
            raise KeyError(key)
        return super().__getitem__(key)


# Efficiencies -------------------------------------------------------------

def _target_evolution(grid: ContinuumGrid, spec: DetectorSpec) -> np.ndarray:
    if not spec.is_single_level:
        raise ValueError("the inefficient model couples only the zone's target level")
    eig = eigensystem(grid, spec)
    start = np.zeros(grid.size)
    start[spec.zone.target] = 1.0
    return evolve(eig, start, spec.interaction_time)


def efficiency_numeric(grid: ContinuumGrid, spec: DetectorSpec) -> Efficiency:
    """Ionized population of the target level after ``spec.interaction_time``."""
    psi = _target_evolution(grid, spec)
    p = float(np.sum(np.abs(psi[N_DISCRETE:]) ** 2))
    return Efficiency(min(max(p, 0.0), 1.0), EfficiencySource.NUMERIC)


def efficiency_analytic(grid: ContinuumGrid, spec: DetectorSpec) -> Efficiency:
    """Golden-rule efficiency ``1 - exp(-Gamma t)``."""
    rate = golden_rule_rate(spec.target_coupling, grid)
    return Efficiency(float(-np.expm1(-rate * spec.interaction_time)), EfficiencySource.ANALYTIC)


def survival_amplitude(grid: ContinuumGrid, spec: DetectorSpec) -> complex:
    """Complex amplitude ``<a|exp(-iHt)|a>`` of the zone's target level."""
    return complex(_target_evolution(grid, spec)[spec.zone.target])


# Closed-form chain --------------------------------------------------------

def click_probability_de(state: AtomCavityState, p_e: EfficiencyLike) -> float:
    p_ee, _ = _populations(state)
    return _p(p_e) * p_ee


def nonclick_state_de(state: AtomCavityState, grid: ContinuumGrid,
                      spec: DetectorSpec) -> ChainOutcome:
    """State after D_e stays silent, with the coherence factor kept exact."""
    if spec.zone is not Zone.DE:
        raise ValueError("nonclick_state_de needs a D_e detector spec")
    p_ee, _ = _populations(state)
    psi = _target_evolution(grid, spec)
    p_e = float(np.sum(np.abs(psi[N_DISCRETE:]) ** 2))
    norm = 1.0 - p_e * p_ee
    if norm <= BRANCH_FLOOR:
        raise ZeroProbabilityBranch("D_e clicks with certainty; no-click branch is empty")
    t = spec.interaction_time
    coherence = psi[spec.zone.target] * np.exp(1j * spec.eps_g * t)
    cond = _raw_state((1.0 - p_e) * state.rho_ee, coherence * state.rho_eg, state.rho_gg)
    return ChainOutcome(norm, cond.scaled(1.0 / norm), None)


def click_probability_dg(state: AtomCavityState, p_e: EfficiencyLike,
                         p_g: EfficiencyLike) -> float:
    """Probability of a D_g click given that D_e stayed silent."""
    p_ee, p_gg = _populations(state)
    denom = 1.0 - _p(p_e) * p_ee
    if denom <= BRANCH_FLOOR:
        raise ZeroProbabilityBranch("D_e clicks with certainty")
    return _p(p_g) * p_gg / denom


def nonclick_probability_dg(state: AtomCavityState, p_e: EfficiencyLike,
                            p_g: EfficiencyLike) -> float:
    p_ee, p_gg = _populations(state)
    denom = 1.0 - _p(p_e) * p_ee
    if denom <= BRANCH_FLOOR:
        raise ZeroProbabilityBranch("D_e clicks with certainty")
    return (denom - _p(p_g) * p_gg) / denom


def double_nonclick_cavity_state(state: AtomCavityState, p_e: EfficiencyLike,
                                 p_g: EfficiencyLike) -> np.ndarray:
    """Cavity state after neither detector clicks."""
    pe, pg = _p(p_e), _p(p_g)
    p_ee, p_gg = _populations(state)
    denom = 1.0 - pe * p_ee - pg * p_gg
    if denom <= BRANCH_FLOOR:
        raise ZeroProbabilityBranch("a double no-click is impossible for these detectors")
    return ((1.0 - pe) * state.rho_ee + (1.0 - pg) * state.rho_gg) / denom


def _click_cavity(block: np.ndarray, weight: float) -> Optional[np.ndarray]:
    return np.asarray(block) / weight if weight > BRANCH_FLOOR else None


def chain_from_efficiencies(state: AtomCavityState, p_e: EfficiencyLike,
                            p_g: EfficiencyLike) -> ChainDistribution:
    """Outcome distribution when only the efficiencies are known."""
    pe, pg = _p(p_e), _p(p_g)
    p_ee, p_gg = _populations(state)
    probs = (pe * p_ee, pg * p_gg, 1.0 - pe * p_ee - pg * p_gg)
    nonclick = (double_nonclick_cavity_state(state, pe, pg)
                if probs[2] > BRANCH_FLOOR else None)
    return ChainDistribution([
        ChainOutcome(probs[0], _click_cavity(state.rho_ee, p_ee) if probs[0] > BRANCH_FLOOR else None,
                     CLICK_DE),
        ChainOutcome(probs[1], _click_cavity(state.rho_gg, p_gg) if probs[1] > BRANCH_FLOOR else None,
                     CLICK_DG),
        ChainOutcome(max(probs[2], 0.0), nonclick, DOUBLE_NO_CLICK),
    ])


def run_chain(state: AtomCavityState, grid: ContinuumGrid, spec_de: DetectorSpec,
              spec_dg: DetectorSpec) -> ChainDistribution:
    """Both zones evolved on ``grid``; the surviving atom keeps its coherence."""
    if spec_de.zone is not Zone.DE or spec_dg.zone is not Zone.DG:
        raise ValueError("expected a D_e spec followed by a D_g spec")
    psi_e = _target_evolution(grid, spec_de)
    psi_g = _target_evolution(grid, spec_dg)
    pe = min(1.0, float(np.sum(np.abs(psi_e[N_DISCRETE:]) ** 2)))
    pg = min(1.0, float(np.sum(np.abs(psi_g[N_DISCRETE:]) ** 2)))
    dist = chain_from_efficiencies(state, pe, pg)
    last = dist[2]
    if last.probability > BRANCH_FLOOR:
        t1, t2 = spec_de.interaction_time, spec_dg.interaction_time
        coherence = (psi_e[0] * np.exp(1j * spec_de.eps_g * t1)
                     * np.exp(-1j * spec_dg.eps_e * t2) * np.conj(psi_g[1]))
        cond = _raw_state((1.0 - pe) * state.rho_ee, coherence * state.rho_eg,
                          (1.0 - pg) * state.rho_gg)
        last = ChainOutcome(last.probability, cond.scaled(1.0 / last.probability),
                            DOUBLE_NO_CLICK)
    return ChainDistribution([dist[0], dist[1], last])
