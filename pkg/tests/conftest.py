import itertools

import pytest

from quditsynth.sim import Permutation, target_map

ACCEPTANCE_LINES: list[str] = []


def tmap(family, d, **params):
    """Vectorized target action, independent of gate simulation."""
    return target_map(family, d, **params)[1]


def scalar_permutation(d, m, fn):
    """Permutation of ``[d]^m`` built state by state from a scalar function on digit tuples."""
    table = []
    for x in itertools.product(range(d), repeat=m):
        y = fn(x)
        idx = 0
        for v in y:
            idx = idx * d + v
        table.append(idx)
    return Permutation(d, m, table)


def inversion_parity(table):
    """Parity of a permutation by counting inversions; an oracle unrelated to cycle counting."""
    inv = sum(1 for i in range(len(table)) for j in range(i + 1, len(table)) if table[i] > table[j])
    return "odd" if inv % 2 else "even"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)
