import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from qsmkit.core import Distribution, Partition, running_example  # noqa: E402

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def t1():
    return running_example("p1")


@pytest.fixture(scope="session")
def t1_p2():
    return running_example("p2")


@pytest.fixture(scope="session")
def t1_p3():
    return running_example("p3")


def dists(n_min=2, n_max=6):
    """Strictly positive distributions over range(n)."""
    return st.integers(n_min, n_max).flatmap(
        lambda n: st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n)
    ).map(lambda ws: Distribution.normalized(dict(enumerate(ws))))


@st.composite
def partitions(draw, n, dq=False, strong=False):
    alphabet = [0, 1] if strong else [0, 1, 2]
    while True:
        digits = draw(st.lists(st.sampled_from(alphabet), min_size=n, max_size=n))
        sides = ([], [], [])
        for h, d in enumerate(digits):
            sides[d].append(h)
        part = Partition(*map(frozenset, sides))
        if not (dq or strong) or part.is_dq:
            return part
        # force discrimination by flipping the first two hypotheses
        digits[0], digits[1] = 0, 1
        sides = ([], [], [])
        for h, d in enumerate(digits):
            sides[d].append(h)
        return Partition(*map(frozenset, sides))


@st.composite
def dist_and_partition(draw, n_min=2, n_max=6, dq=True, strong=False):
    d = draw(dists(n_min, n_max))
    return d, draw(partitions(len(d), dq=dq, strong=strong))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
