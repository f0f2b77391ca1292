"""Reference measurement chain on the full atom (x) continuum (x) cavity space.

Independent of :mod:`spectral`'s eigendecomposition: propagators come from
``scipy.linalg.expm`` and the joint state is evolved as ``(U (x) 1) rho (U (x) 1)^+``
before projecting onto the continuum (click) or the discrete levels (no click).
Used as a test oracle and by the harness to report closed-form deltas.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .core import AtomCavityState
from .spectral import N_DISCRETE, ContinuumGrid, DetectorSpec, build_hamiltonian


def propagator(grid: ContinuumGrid, spec: DetectorSpec, t: Optional[float] = None) -> np.ndarray:
    t = spec.interaction_time if t is None else t
    return scipy.linalg.expm(-1j * t * build_hamiltonian(grid, spec))


def efficiency(grid: ContinuumGrid, spec: DetectorSpec, level: Optional[int] = None) -> float:
    """Continuum population reached from ``level`` (default: the zone's target)."""
    level = spec.zone.target if level is None else level
    u = propagator(grid, spec)
    return float(np.sum(np.abs(u[N_DISCRETE:, level]) ** 2))


def _stage(rho_d: np.ndarray, u: np.ndarray, dim: int):
    """Evolve a discrete-sector state through one zone and split by outcome.

    ``rho_d`` is the ``2dim x 2dim`` state on span{e, g} (x) cavity.  Returns the
    unnormalized cavity operator for a click and the unnormalized discrete-sector
    state for no click.
    """
    full = np.kron(u, np.eye(dim))  # (N+2)dim square, atom index major
    x = full[:, : N_DISCRETE * dim]  # the initial state only lives here
    rho_t = x @ rho_d @ x.conj().T
    n = u.shape[0] - N_DISCRETE
    cont = rho_t[N_DISCRETE * dim:, N_DISCRETE * dim:].reshape(n, dim, n, dim)
    click = np.einsum("kikj->ij", cont)
    silent = rho_t[: N_DISCRETE * dim, : N_DISCRETE * dim]
    return click, silent


@dataclass(frozen=True, eq=False)
class ReferenceChain:
    probabilities: np.ndarray  # click D_e, click D_g, double no-click
    cavity_states: tuple  # normalized cavity operators, None for empty branches
    silent_state: Optional[AtomCavityState]  # atom + cavity after two silent zones


def reference_chain(state: AtomCavityState, grid: ContinuumGrid, spec_de: DetectorSpec,
                    spec_dg: DetectorSpec, *, propagators=None,
                    floor: float = 1e-14) -> ReferenceChain:
    """Run both zones; ``propagators`` may supply precomputed ``(U_de, U_dg)``."""
    if propagators is None:
        propagators = (propagator(grid, spec_de), propagator(grid, spec_dg))
    dim = state.dim
    rho0 = state.block()
    click1, silent1 = _stage(rho0, propagators[0], dim)
    click2, silent2 = _stage(silent1, propagators[1], dim)
    ops = (click1, click2, silent2)
    probs = np.array([np.trace(op).real for op in ops])
    cavity = []
    for op, p in zip(ops, probs):
        if p <= floor:
            cavity.append(None)
            continue
        if op is silent2:
            op = op[:dim, :dim] + op[dim:, dim:]
        cavity.append(op / p)
    silent_state = None
    if probs[2] > floor:
        s = silent2 / probs[2]
        silent_state = AtomCavityState(s[:dim, :dim], s[:dim, dim:], s[dim:, :dim], s[dim:, dim:])
    return ReferenceChain(probs, tuple(cavity), silent_state)
