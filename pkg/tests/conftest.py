import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parents[1]


def vectors(min_norm=0.1, bound=5.0):
    comp = st.floats(-bound, bound, allow_nan=False, allow_infinity=False)
    return st.tuples(comp, comp, comp).map(np.array).filter(
        lambda v: np.linalg.norm(v) > min_norm)


def unit_vectors():
    return vectors(min_norm=0.1).map(lambda v: v / np.linalg.norm(v))


@pytest.fixture(scope="session")
def root():
    return ROOT


@pytest.fixture(scope="session")
def sampled_norm():
    from wulff_willmore.identities import sampled_example
    return sampled_example()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(lines):
        terminalreporter.write_line(lines[k])
