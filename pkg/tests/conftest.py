import numpy as np
import pytest

from scaledim import (build_microgrid, dither_offsets, entropy_scan, henon_orbit, scale_points,
                      scale_schedule, uniform_lattice)
from scaledim.entropy import POWER


@pytest.fixture(scope="session")
def henon_small():
    return henon_orbit(n_keep=10_000)


@pytest.fixture(scope="session")
def henon_grid(henon_small):
    return build_microgrid(henon_small, henon_small.box, 100_000)


@pytest.fixture(scope="session")
def henon_scan(henon_grid):
    sched = scale_schedule(henon_grid, 20, -3.0, -0.5)
    return entropy_scan(henon_grid, sched, (0, 1, 2, 3), dither_offsets(4), estimator=POWER)


@pytest.fixture(scope="session")
def lattice_scan():
    orbit = uniform_lattice(64)
    grid = build_microgrid(orbit, orbit.box, 256)
    return entropy_scan(grid, scale_points(grid, [4, 8, 16, 32, 64, 128]), (0, 1, 2), estimator=POWER)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from tests import acceptance_log
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
