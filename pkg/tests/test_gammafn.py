import cmath
import math

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fkloop import gammafn


points = st.complex_numbers(
    min_magnitude=0.05, max_magnitude=12.0, allow_nan=False, allow_infinity=False
)


def _off_pole(z):
    # stay a fixed distance away from the poles at 0, -1, -2, ...
    if z.real > 0.25:
        return True
    return abs(z - round(z.real)) > 0.05


@given(points.filter(_off_pole))
def test_recurrence(z):
    lhs = gammafn.gamma(z + 1.0)
    rhs = z * gammafn.gamma(z)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs), 1.0)


@given(points.filter(lambda z: _off_pole(z) and _off_pole(1.0 - z)))
def test_reflection(z):
    s = cmath.sin(math.pi * z)
    if abs(s) < 1e-3:
        return
    lhs = gammafn.gamma(z) * gammafn.gamma(1.0 - z)
    rhs = math.pi / s
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))


def test_against_mpmath_grid():
    for x in (-2.3, -0.7, 0.31, 1.0, 2.5, 7.9):
        for y in (-3.0, -0.4, 0.0, 0.4, 3.0):
            z = complex(x, y)
            if not _off_pole(z):
                continue
            ref = complex(mp.gamma(mp.mpc(z)))
            got = gammafn.gamma(z)
            assert abs(got - ref) <= 5e-14 * abs(ref)


def test_loggamma_consistency():
    for x in (0.2, 1.7, 4.2, 11.0):
        for y in (-2.0, 0.0, 5.0):
            z = complex(x, y)
            ref = complex(mp.loggamma(mp.mpc(z)))
            got = gammafn.loggamma(z)
            assert abs(got - ref) < 1e-12 * max(1.0, abs(ref))


def test_known_values():
    assert abs(gammafn.gamma(0.5) - math.sqrt(math.pi)) < 1e-14
    assert abs(gammafn.gamma(5.0) - 24.0) < 1e-12
    assert abs(gammafn.beta(2.0, 3.0) - 1.0 / 12.0) < 1e-14


def test_pole_raises():
    with pytest.raises(ValueError):
        gammafn.gamma(0.0)
    with pytest.raises(ValueError):
        gammafn.gamma(-3.0)
