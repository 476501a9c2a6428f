import cmath

import numpy as np
import pytest

from randprod.errors import QuadratureError
from randprod.quadrature import integrate_segment


def test_polynomial_exact():
    res = integrate_segment(lambda z: 3 * z**2, 0, 2)
    assert res.value == pytest.approx(8.0, rel=1e-15)
    assert res.panels == 1


def test_oscillatory_complex_path():
    res = integrate_segment(np.exp, 1 - 2j, 1 + 30j, tol=1e-12)
    assert abs(res.value - (cmath.exp(1 + 30j) - cmath.exp(1 - 2j))) < 1e-11


def test_closed_contour_around_pole():
    corners = [1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]
    total = sum(
        integrate_segment(lambda z: 1 / z, a, b, tol=1e-12).value
        for a, b in zip(corners, corners[1:] + corners[:1])
    )
    assert abs(total / (2j * np.pi) - 1) < 1e-10


def test_reversed_segment_flips_sign():
    f = lambda z: np.sin(z) / (1 + z * z)
    a = integrate_segment(f, 0.3, 4.0).value
    b = integrate_segment(f, 4.0, 0.3).value
    assert a == pytest.approx(-b, rel=1e-12)


def test_failure_is_reported():
    with pytest.raises(QuadratureError) as info:
        integrate_segment(lambda z: 1 / (z - 0.5) ** 2, 0, 1, tol=1e-12, max_panels=200)
    assert info.value.segment == (0j, 1 + 0j)
    with pytest.raises(QuadratureError):
        integrate_segment(lambda z: np.full(z.shape, np.nan, dtype=complex), 0, 1)
