import sys

import numpy as np
import pytest

from jjrough.domain import GridSpec, JunctionParams, RoughnessParams
from jjrough.ensemble import EnsembleConfig


@pytest.fixture(scope="session")
def paper_junction():
    return JunctionParams(fermi_energy=11.7, barrier_height=1.1, nominal_thickness=1.0, gap=0.2,
                          width_x=200.0, width_y=200.0)


@pytest.fixture(scope="session")
def paper_rough():
    return RoughnessParams(sigma=0.085, xi=10.0)


@pytest.fixture(scope="session")
def paper_grid(paper_junction):
    return GridSpec.for_junction(paper_junction, 512)


@pytest.fixture
def small_config(paper_junction):
    """Cheap ensemble: 128^2 pixels still resolve xi = 10 nm at L = 200 nm."""
    return EnsembleConfig(junction=paper_junction, rough=RoughnessParams(0.085, 10.0),
                          grid=GridSpec.for_junction(paper_junction, 128), n_samples=64,
                          master_seed=12345)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda text: int(text.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
