import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spinlattice.geometry import SpinLatticeState, normalize_spins
from spinlattice.model import SleChainModel


def random_chain_state(rng, n=4, spacing=1.0, jitter=0.1, momentum=0.3):
    """Random on-leaf state of a chain with period n * spacing, coupling active."""
    q = spacing * np.arange(n) + jitter * rng.uniform(-1, 1, size=n)
    p = momentum * rng.normal(size=n)
    w = normalize_spins(rng.normal(size=(n, 3)))
    return SpinLatticeState.from_arrays(w, q, p)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_model():
    return SleChainModel(n=4, period=4.0, masses=[1.0, 2.0, 1.5, 0.7])


@pytest.fixture
def random_state(rng):
    def make(n=4, **kw):
        return random_chain_state(rng, n, **kw)

    return make


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    def report(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
