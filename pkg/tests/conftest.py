import pytest
import mpmath as mp

from thetal.context import PrecisionContext


@pytest.fixture
def ctx20():
    return PrecisionContext(digits=20)


@pytest.fixture
def ctx30():
    return PrecisionContext(digits=30)


def agrees(a, b, digits):
    """True when a and b agree to `digits` significant digits."""
    with mp.workdps(mp.mp.dps + 10):
        a, b = mp.mpf(a), mp.mpf(b)
        if a == b:
            return True
        return abs(a - b) / max(abs(a), abs(b)) <= mp.mpf(10) ** (-digits)
