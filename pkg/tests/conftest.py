import numpy as np
import pytest

from bergkf.wjet import WJet, basis


def random_jet(rng, n, D, scale=1.0, const=None):
    size = basis(n, D).size
    c = scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))
    if const is not None:
        c[0] = const
    return WJet(n, D, c)


def random_points(rng, n, count, radius=0.8):
    v = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * (radius * rng.random(count) ** (1.0 / (2 * n)))[:, None]


def random_vectors(rng, n, count):
    return rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, echoed after the run so capture does not hide it
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
