import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from dropdtw import CostMatrix

settings.register_profile(
    "props", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("props")

unit_floats = st.floats(0.0, 1.0, allow_nan=False, allow_infinity=False)


@st.composite
def cost_instances(draw, max_k=5, max_n=5, min_drop=0.0):
    """Random CostMatrix with entries in [0, 1] and drops in [min_drop, 1]."""
    k = draw(st.integers(1, max_k))
    n = draw(st.integers(1, max_n))
    c = draw(hnp.arrays(float, (k, n), elements=unit_floats))
    drops = st.floats(min_drop, 1.0, allow_nan=False)
    dz = draw(hnp.arrays(float, (k,), elements=drops))
    dx = draw(hnp.arrays(float, (n,), elements=drops))
    return CostMatrix(c, dz, dx)


def random_costs(rng, k, n, low=0.0):
    return CostMatrix(rng.uniform(0, 1, (k, n)), rng.uniform(low, 1, k), rng.uniform(low, 1, n))


# -- acceptance report ----------------------------------------------------------

_ACCEPTANCE = []


@pytest.fixture
def report():
    """``report(n, ok, detail)`` records one acceptance line and returns ``ok``."""

    def _report(n, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
        _ACCEPTANCE.append((n, line))
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
