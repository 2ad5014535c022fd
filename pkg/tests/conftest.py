import math

import numpy as np
import pytest
from hypothesis import settings

from instanton_pvi import InstantonState, conserved_quantity

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_states(seed, n, t=0.5, lo=0.15, hi=1.5):
    """States with every |a_i| in [lo, hi] and random signs."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        a = rng.uniform(lo, hi, 3) * rng.choice([-1, 1], 3)
        out.append(InstantonState(t, *a))
    return out


def theta_of_state(s, branch=1):
    q = conserved_quantity(s)
    r = math.sqrt(abs(q))
    return branch * r if q >= 0 else complex(0.0, branch * r)


@pytest.fixture
def states10():
    return random_states(7, 10)


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split(".")[0]), k)):
        terminalreporter.write_line(f"criterion {key}: {ACCEPTANCE[key]}")
