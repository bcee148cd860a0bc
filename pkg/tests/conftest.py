import numpy as np
import pytest

from nveddy.emforward import SIGMA_ALUMINIUM, CoilDrive
from nveddy.magnetometer import MagnetometerParams, select_operating_point
from nveddy.patterns import dot_grid_pattern, ingest_pattern
from nveddy.scan import ScanConfig

DOT_DRIVE = CoilDrive(91e-6, 1e6)


@pytest.fixture(scope="session")
def params():
    return MagnetometerParams()


@pytest.fixture(scope="session")
def alpha_point(params):
    return select_operating_point("alpha", params)


@pytest.fixture(scope="session")
def dot_map():
    mask, centers = dot_grid_pattern()
    return ingest_pattern(mask, SIGMA_ALUMINIUM, 50e-6, 35e-6, 0.5e-3), centers


@pytest.fixture(scope="session")
def dot_config(dot_map, params, alpha_point):
    cmap, _ = dot_map
    return ScanConfig.covering(cmap, 50e-6, DOT_DRIVE, params=params,
                               operating_point=alpha_point)


def small_map(sigma_grid, pitch=50e-6, thickness=35e-6, standoff=0.5e-3, origin=(0.0, 0.0)):
    from nveddy.scan import ConductivityMap
    return ConductivityMap(np.asarray(sigma_grid, dtype=float), pitch, thickness, standoff,
                           origin)


ACCEPTANCE_RESULTS = {}


def record_criterion(number, title, passed, detail):
    """Store one acceptance outcome; printed in the terminal summary."""
    ACCEPTANCE_RESULTS[number] = (title, passed, detail)
    print(f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, passed, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(
            f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}")
