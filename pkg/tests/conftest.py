import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def circular_mismatch(a, b):
    """Largest circular distance between two phase sets, matched greedily."""
    a = np.sort(np.mod(a, 2 * np.pi))
    b = list(np.mod(b, 2 * np.pi))
    worst = 0.0
    for x in a:
        d = [abs(np.angle(np.exp(1j * (x - y)))) for y in b]
        j = int(np.argmin(d))
        worst = max(worst, d[j])
        b.pop(j)
    return worst
