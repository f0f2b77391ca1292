"""Sanity checks on the expm-based reference chain used as an oracle elsewhere."""
import numpy as np
import pytest

from cqed_detect import bruteforce, core
from cqed_detect.spectral import DetectorSpec, Zone, coupling_for_rate

from conftest import SMALL_GRID, ineff_pair


def test_propagator_unitary_and_identity_at_zero():
    de, _ = ineff_pair(SMALL_GRID, 1.5, 1.5)
    u = bruteforce.propagator(SMALL_GRID, de)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-12)
    np.testing.assert_allclose(bruteforce.propagator(SMALL_GRID, de, t=0.0), np.eye(u.shape[0]))


def test_propagator_composes():
    de, _ = ineff_pair(SMALL_GRID, 0.7, 0.7)
    u1 = bruteforce.propagator(SMALL_GRID, de, t=0.7)
    u2 = bruteforce.propagator(SMALL_GRID, de, t=1.4)
    np.testing.assert_allclose(u1 @ u1, u2, atol=1e-12)


def test_uncoupled_detector_is_blind(rng):
    de, dg = ineff_pair(SMALL_GRID, 2.0, 2.0, rate=0.0)
    s = core.random_state(rng)
    ref = bruteforce.reference_chain(s, SMALL_GRID, de, dg)
    np.testing.assert_allclose(ref.probabilities, [0, 0, 1], atol=1e-14)
    # free evolution only rotates the atomic coherence
    phase = np.exp(-1j * (de.eps_e - de.eps_g) * 4.0)
    np.testing.assert_allclose(ref.silent_state.rho_eg, s.rho_eg * phase, atol=1e-12)
    np.testing.assert_allclose(ref.silent_state.rho_ee, s.rho_ee, atol=1e-12)


def test_reference_chain_normalized(rng):
    v = coupling_for_rate(1.0, SMALL_GRID)
    de = DetectorSpec(1.0, 0.0, v, 0.5 * v, Zone.DE, 1.0)
    dg = DetectorSpec(1.0, 0.0, 0.5 * v, v, Zone.DG, 1.0)
    props = (bruteforce.propagator(SMALL_GRID, de), bruteforce.propagator(SMALL_GRID, dg))
    for dim in (2, 3):
        s = core.random_state(rng, dim=dim)
        ref = bruteforce.reference_chain(s, SMALL_GRID, de, dg, propagators=props)
        assert ref.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(ref.probabilities > 0)
        for rho in ref.cavity_states:
            core.validate_density(rho, tol=1e-10)
        core.validate_state(ref.silent_state, tol=1e-10)


def test_efficiency_helper():
    de, _ = ineff_pair(SMALL_GRID, 0.9, 0.9)
    u = bruteforce.propagator(SMALL_GRID, de)
    assert bruteforce.efficiency(SMALL_GRID, de) == pytest.approx(1 - abs(u[0, 0]) ** 2, abs=1e-12)
