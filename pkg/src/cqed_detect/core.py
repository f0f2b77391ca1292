"""Block density operators on the atom (x) cavity space.

The two-level atom has basis ``|e>, |g>`` and the cavity is a truncated Fock
space ``|0> ... |dim-1>``.  A joint state is stored as four ``dim x dim``
cavity operators::

    rho = |e><e| (x) rho_ee + |e><g| (x) rho_eg + |g><e| (x) rho_ge + |g><g| (x) rho_gg

States may be subnormalized (conditioning produces them); normalization is an
explicit step.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, NotPositive, ZeroTrace

DEFAULT_TOL = 1e-10
_ZERO_TRACE = 1e-14


@dataclass(frozen=True)
class CavitySpace:
    dim: int = 2

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"cavity dimension must be a positive integer, got {self.dim!r}")

    def ket(self, n: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[n] = 1.0
        return v

    def projector(self, n: int) -> np.ndarray:
        return self.outer(n, n)

    def outer(self, m: int, n: int) -> np.ndarray:
        """``|m><n|`` as a dense matrix."""
        op = np.zeros((self.dim, self.dim), dtype=complex)
        op[m, n] = 1.0
        return op


class Outcome(enum.Enum):
    CLICK = "click"
    NO_CLICK = "no_click"


@dataclass(frozen=True)
class ClickRecord:
    """Classical record left by one atom crossing D_e then (maybe) D_g."""

    de_outcome: Outcome
    dg_outcome: Optional[Outcome] = None

    def __post_init__(self):
        if (self.dg_outcome is None) != (self.de_outcome is Outcome.CLICK):
            raise ValueError("dg_outcome is present exactly when D_e did not click")

    @property
    def label(self) -> str:
        if self.de_outcome is Outcome.CLICK:
            return "click_de"
        if self.dg_outcome is Outcome.CLICK:
            return "click_dg"
        return "double_no_click"


CLICK_DE = ClickRecord(Outcome.CLICK)
CLICK_DG = ClickRecord(Outcome.NO_CLICK, Outcome.CLICK)
DOUBLE_NO_CLICK = ClickRecord(Outcome.NO_CLICK, Outcome.NO_CLICK)
RECORDS = (CLICK_DE, CLICK_DG, DOUBLE_NO_CLICK)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AtomCavityState:
    rho_ee: np.ndarray
    rho_eg: np.ndarray
    rho_ge: np.ndarray
    rho_gg: np.ndarray

    @property
    def dim(self) -> int:
        return self.rho_ee.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho_ee) + np.trace(self.rho_gg)))

    def block(self) -> np.ndarray:
        """The full ``2dim x 2dim`` matrix, atom index major (e block first)."""
        return np.block([[self.rho_ee, self.rho_eg], [self.rho_ge, self.rho_gg]])

    def scaled(self, factor: float) -> "AtomCavityState":
        return _raw_state(factor * self.rho_ee, factor * self.rho_eg, factor * self.rho_gg)

    def normalized(self) -> "AtomCavityState":
        tr = self.trace
        if tr < _ZERO_TRACE:
            raise ZeroTrace(f"cannot normalize a state with trace {tr:.3e}")
        return self.scaled(1.0 / tr)

    def without_coherence(self) -> "AtomCavityState":
        """Same populations with the atomic coherences ``rho_eg``, ``rho_ge`` set to zero."""
        return _raw_state(self.rho_ee, np.zeros_like(self.rho_eg), self.rho_gg)

    def allclose(self, other: "AtomCavityState", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.block(), other.block(), rtol=0.0, atol=atol))


def _raw_state(rho_ee, rho_eg, rho_gg) -> AtomCavityState:
    # internal constructor: trusted inputs, no validation
    rho_eg = np.asarray(rho_eg, dtype=complex)
    return AtomCavityState(_frozen(rho_ee), _frozen(rho_eg), _frozen(rho_eg.conj().T), _frozen(rho_gg))


def make_state(rho_ee, rho_eg, rho_gg, *, normalize: bool = False,
               tol: float = DEFAULT_TOL) -> AtomCavityState:
    """Validate the three independent blocks and assemble a joint state.

    ``rho_ge`` is always taken as the conjugate transpose of ``rho_eg``.
    Raises :class:`DimensionMismatch`, :class:`NotPositive` or
    :class:`ZeroTrace`.
    """
    blocks = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in (rho_ee, rho_eg, rho_gg)]
    dim = blocks[0].shape[0]
    for b in blocks:
        if b.shape != (dim, dim):
            raise DimensionMismatch(
                f"all blocks must be square with the same size; got {[x.shape for x in blocks]}")
    ee, eg, gg = blocks
    for name, b in (("rho_ee", ee), ("rho_gg", gg)):
        if not np.allclose(b, b.conj().T, rtol=0.0, atol=tol):
            raise NotPositive(f"{name} is not Hermitian")
    state = _raw_state(ee, eg, gg)
    lo = np.linalg.eigvalsh(state.block()).min()
    if lo < -tol:
        raise NotPositive(f"block matrix has eigenvalue {lo:.3e} < -{tol:g}")
    if state.trace < _ZERO_TRACE:
        raise ZeroTrace("state has zero trace")
    return state.normalized() if normalize else state


def validate_state(state: AtomCavityState, *, normalized: bool = True,
                   tol: float = DEFAULT_TOL) -> None:
    """Raise if ``state`` is not PSD (or not unit trace when ``normalized``)."""
    full = state.block()
    if not np.allclose(full, full.conj().T, rtol=0.0, atol=tol):
        raise NotPositive("block matrix is not Hermitian")
    lo = np.linalg.eigvalsh(full).min()
    if lo < -tol:
        raise NotPositive(f"block matrix has eigenvalue {lo:.3e}")
    if normalized and abs(state.trace - 1.0) > tol:
        raise ZeroTrace(f"state trace {state.trace!r} is not 1")


def from_block(full: np.ndarray, *, tol: float = DEFAULT_TOL) -> AtomCavityState:
    """Inverse of :meth:`AtomCavityState.block`; validates positivity."""
    full = np.asarray(full, dtype=complex)
    n = full.shape[0]
    if full.shape != (n, n) or n % 2:
        raise DimensionMismatch(f"expected an even square matrix, got {full.shape}")
    d = n // 2
    return make_state(full[:d, :d], full[:d, d:], full[d:, d:], tol=tol)


def trace_cavity(state: AtomCavityState) -> tuple[float, float, complex]:
    """Partial trace over the cavity: ``(Tr rho_ee, Tr rho_gg, Tr rho_eg)``."""
    return (float(np.real(np.trace(state.rho_ee))),
            float(np.real(np.trace(state.rho_gg))),
            complex(np.trace(state.rho_eg)))


def trace_atom(state: AtomCavityState) -> np.ndarray:
    """Partial trace over the atom: the cavity operator ``rho_ee + rho_gg``."""
    return np.asarray(state.rho_ee + state.rho_gg)


def validate_density(rho: np.ndarray, *, tol: float = DEFAULT_TOL, unit_trace: bool = True) -> None:
    from .errors import NotDensityOperator

    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise NotDensityOperator(f"not a square matrix: shape {rho.shape}")
    if not np.allclose(rho, rho.conj().T, rtol=0.0, atol=tol):
        raise NotDensityOperator("matrix is not Hermitian")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -tol:
        raise NotDensityOperator(f"matrix has eigenvalue {lo:.3e}")
    if unit_trace and abs(np.trace(rho).real - 1.0) > tol:
        raise NotDensityOperator(f"trace {np.trace(rho).real!r} is not 1")


# Named presets -----------------------------------------------------------

def entangled_state(dim: int = 2) -> AtomCavityState:
    """``(|e,0> + |g,1>)/sqrt(2)`` as a density operator."""
    if dim < 2:
        raise DimensionMismatch("the entangled preset needs at least two Fock states")
    c = CavitySpace(dim)
    return make_state(0.5 * c.projector(0), 0.5 * c.outer(0, 1), 0.5 * c.projector(1))


def excited_vacuum(dim: int = 2) -> AtomCavityState:
    c = CavitySpace(dim)
    return make_state(c.projector(0), np.zeros((dim, dim)), np.zeros((dim, dim)))


def mixed_populations(p_gg: float, dim: int = 2) -> AtomCavityState:
    """Incoherent atom with ``Tr rho_gg = p_gg`` and a maximally mixed cavity."""
    eye = np.eye(dim) / dim
    return make_state((1.0 - p_gg) * eye, np.zeros((dim, dim)), p_gg * eye)


def random_state(rng: np.random.Generator, dim: int = 2, rank: Optional[int] = None) -> AtomCavityState:
    """Random joint state from a Ginibre ensemble on the ``2dim`` space."""
    n = 2 * dim
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return from_block(rho)


PRESETS = {
    "entangled": entangled_state,
    "excited-vacuum": excited_vacuum,
}
