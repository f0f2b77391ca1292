import numpy as np
import pytest
from scipy.optimize import brentq

from cqed_detect import core
from cqed_detect.detect_ineff import efficiency_numeric
from cqed_detect.spectral import ContinuumGrid, DetectorSpec, Zone, coupling_for_rate

# e-level at 1, g-level at 0, band well beyond both resonances
GRID_801 = ContinuumGrid(801, -20.0, 21.0)
SMALL_GRID = ContinuumGrid(121, -12.0, 13.0)


@pytest.fixture
def grid():
    return GRID_801


@pytest.fixture
def small_grid():
    return SMALL_GRID


@pytest.fixture
def entangled():
    return core.entangled_state()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def ineff_pair(grid, t_de, t_dg, rate=1.0, eps_e=1.0):
    v = coupling_for_rate(rate, grid)
    return (DetectorSpec.inefficient(Zone.DE, v, t_de, eps_e=eps_e),
            DetectorSpec.inefficient(Zone.DG, v, t_dg, eps_e=eps_e))


def time_for_efficiency(grid, spec, target):
    """Interaction time at which the numerically evolved efficiency equals ``target``."""
    def f(t):
        return efficiency_numeric(grid, spec.with_time(t)).value - target
    return brentq(f, 0.0, 20.0, xtol=1e-14, rtol=1e-15)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
