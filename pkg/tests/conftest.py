import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from occupancy_radar import RadarConfig  # noqa: E402

ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def config():
    return RadarConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    from occupancy_radar import generate
    out = tmp_path_factory.mktemp("ds_small")
    return generate(per_class=5, seed=3, out_dir=out)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
