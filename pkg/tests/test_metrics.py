import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cqed_detect import bruteforce, metrics
from cqed_detect import detect_false as df
from cqed_detect.errors import AssumptionViolated, NotDensityOperator, ZeroProbabilityBranch
from cqed_detect.spectral import ContinuumGrid, DetectorSpec, Zone, coupling_for_rate

from conftest import SMALL_GRID

# levels well separated relative to the width: little continuum-mediated e <-> g transfer
SEPARATED = ContinuumGrid(801, -25.0, 35.0)


def separated_pair(leak_de=0.1, leak_dg=0.1, t=2.0, grid=SEPARATED):
    v = coupling_for_rate(1.0, grid)
    return (DetectorSpec(10.0, 0.0, v, leak_de * v, Zone.DE, t),
            DetectorSpec(10.0, 0.0, leak_dg * v, v, Zone.DG, t))


def random_density(rng, dim, rank=None):
    rank = dim if rank is None else rank
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


# generic fidelity ------------------------------------------------------------------

def test_fidelity_examples():
    zero, one = np.diag([1.0, 0]), np.diag([0, 1.0])
    assert metrics.fidelity(zero, zero).value == pytest.approx(1.0, abs=1e-14)
    assert metrics.fidelity(zero, one).value == pytest.approx(0.0, abs=1e-14)
    assert metrics.fidelity(zero, np.diag([0.75, 0.25])).value == pytest.approx(0.75, abs=1e-14)


def test_fidelity_symmetric_and_bounded(rng):
    for dim in (2, 3, 4):
        for _ in range(10):
            a, b = random_density(rng, dim), random_density(rng, dim, rank=1)
            fab, fba = metrics.fidelity(a, b).value, metrics.fidelity(b, a).value
            assert fab == pytest.approx(fba, abs=1e-10)
            assert 0 <= fab <= 1
            assert metrics.fidelity(a, a).value == pytest.approx(1.0, abs=1e-10)


def test_fidelity_pure_state_is_overlap(rng):
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    psi /= np.linalg.norm(psi)
    rho = random_density(rng, 3)
    expected = (psi.conj() @ rho @ psi).real
    assert metrics.fidelity(np.outer(psi, psi.conj()), rho).value == pytest.approx(expected, abs=1e-12)


def test_fidelity_unitary_invariance(rng):
    a, b = random_density(rng, 3), random_density(rng, 3)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    f1 = metrics.fidelity(a, b).value
    f2 = metrics.fidelity(q @ a @ q.conj().T, q @ b @ q.conj().T).value
    assert f1 == pytest.approx(f2, abs=1e-10)


def test_fidelity_rejects_bad_input():
    with pytest.raises(NotDensityOperator):
        metrics.fidelity(np.eye(2) / 2, np.eye(3) / 3)
    with pytest.raises(ValueError):
        metrics.fidelity(np.diag([1.5, -0.5]), np.eye(2) / 2)
    with pytest.raises(ValueError):
        metrics.FidelityValue(1.5)


qubit_params = st.tuples(st.floats(0, 1), st.floats(-1, 1), st.floats(-1, 1))


def _qubit(p, x, y):
    # a valid qubit state: off-diagonal scaled inside the Bloch ball
    r = np.sqrt(p * (1 - p))
    c = r * complex(x, y) / max(1.0, abs(complex(x, y)))
    return np.array([[p, c], [np.conj(c), 1 - p]])


@settings(max_examples=200, deadline=None)
@given(qubit_params, qubit_params)
def test_qubit_closed_form(a, b):
    ra, rb = _qubit(*a), _qubit(*b)
    assert metrics.fidelity_qubit(ra, rb) == pytest.approx(metrics.fidelity(ra, rb).value, abs=1e-7)


# zone formulas ------------------------------------------------------------------

def _ideal(spec_de, spec_dg):
    from dataclasses import replace
    return replace(spec_de, coupling_g=0.0), replace(spec_dg, coupling_e=0.0)


def test_first_zone_matches_states(entangled):
    for leak in (0.0, 0.1, 0.5, 0.9):
        de, dg = separated_pair(leak_de=leak, grid=SMALL_GRID)
        tab = df.q_table(SMALL_GRID, de)
        real = df.post_click_state_false(entangled, tab)
        ideal = df.post_click_state_false(entangled, df.q_table(SMALL_GRID, _ideal(de, dg)[0]))
        np.testing.assert_allclose(ideal, np.diag([1.0, 0]), atol=1e-12)
        closed = metrics.fidelity_first_zone(tab).value
        assert closed == pytest.approx(metrics.fidelity(ideal, real).value, abs=1e-12)
        w_e, w_g = tab.ionization_weights
        assert closed == pytest.approx(w_e / (w_e + w_g), abs=1e-14)
    assert metrics.fidelity_first_zone(df.q_table(SMALL_GRID, _ideal(de, dg)[0])).value == 1.0


def test_first_zone_never_ionizes():
    de, _ = separated_pair(grid=SMALL_GRID)
    with pytest.raises(ZeroProbabilityBranch):
        metrics.fidelity_first_zone(df.q_table(SMALL_GRID, de, t=0.0))


def test_second_zone_general_matches_bruteforce(entangled):
    de, dg = separated_pair(0.3, 0.4, t=1.5, grid=SMALL_GRID)
    ref = bruteforce.reference_chain(entangled, SMALL_GRID, de, dg)
    general = metrics.fidelity_second_zone_general(df.q_table(SMALL_GRID, de),
                                                   df.q_table(SMALL_GRID, dg)).value
    # the ideal D_g click leaves the cavity in |1>
    assert general == pytest.approx(ref.cavity_states[1][1, 1].real, abs=1e-12)


def test_second_zone_closed_form_when_levels_separated(entangled):
    de, dg = separated_pair()
    t_de, t_dg = df.q_table(SEPARATED, de), df.q_table(SEPARATED, dg)
    assert t_de.cross_transition_weight < 1e-4
    closed = metrics.fidelity_second_zone(t_de, t_dg).value
    general = metrics.fidelity_second_zone_general(t_de, t_dg).value
    real = df.chain_from_tables(entangled, t_de, t_dg)[1].cavity_state
    states = metrics.fidelity(np.diag([0, 1.0]), real).value
    assert general == pytest.approx(states, abs=1e-12)
    assert closed == pytest.approx(general, abs=1e-4)
    assert 0.5 < closed < 1.0


def test_second_zone_assumption_violated():
    de, dg = separated_pair(grid=SMALL_GRID)
    de = DetectorSpec(1.0, 0.0, de.coupling_e, 0.8 * de.coupling_e, Zone.DE, 2.0)
    t_de, t_dg = df.q_table(SMALL_GRID, de), df.q_table(SMALL_GRID, dg)
    assert t_de.cross_transition_weight > 1e-4
    with pytest.raises(AssumptionViolated):
        metrics.fidelity_second_zone(t_de, t_dg)
    with pytest.warns(RuntimeWarning):
        loose = metrics.fidelity_second_zone(t_de, t_dg, strict=False)
    assert 0 <= loose.value <= 1


def test_second_zone_ideal_detectors_are_perfect():
    de, dg = _ideal(*separated_pair(grid=SMALL_GRID))
    t_de, t_dg = df.q_table(SMALL_GRID, de), df.q_table(SMALL_GRID, dg)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert metrics.fidelity_second_zone(t_de, t_dg).value == pytest.approx(1.0, abs=1e-14)
    assert metrics.fidelity_second_zone_general(t_de, t_dg).value == pytest.approx(1.0, abs=1e-14)
