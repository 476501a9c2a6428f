import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from randprod.continuation import (
    ContinuationParams,
    SPoint,
    coefficient,
    continue_log_f,
    dirichlet_partial,
    dirichlet_tail,
    euler_product,
    f_series,
    log_derivative,
    r1_series,
    r2_series,
    winding_number,
)
from randprod.errors import DomainError, InvalidArgument
from randprod.theta import ThetaSample
from oracles import lambda_dirichlet, prime_power_list, zeta_direct

ZERO = ThetaSample.explicit(0.0)
HALF = ThetaSample.rational(1, 2)
P = ContinuationParams()


@pytest.fixture(scope="module")
def oracle_zeta():
    return {s: zeta_direct(s) for s in (1.5, 2.0, 3.0, 4.0, 6.0)}


def test_coefficients(table_small):
    th = ThetaSample.explicit(0.123)
    assert coefficient(1, th, table_small) == 1
    assert coefficient(12, th, table_small) == pytest.approx(cmath.exp(14j * math.pi * 0.123), abs=1e-15)
    for n in (2, 97, 1000, 65536):
        assert abs(coefficient(n, th, table_small)) == pytest.approx(1.0, abs=1e-15)


def test_euler_product_theta_zero(table, oracle_zeta):
    ep = euler_product(SPoint(2.0), ZERO, 10**6, table)
    assert abs(ep.value - oracle_zeta[2.0]) < 1e-6
    assert abs(ep.value - math.pi**2 / 6) < 1e-6
    ep3 = euler_product(SPoint(3.0), ZERO, 10**6, table)
    assert abs(ep3.value - oracle_zeta[3.0]) < 1e-9
    assert ep3.value.real == pytest.approx(1.202057, abs=1e-6)


def test_euler_product_theta_half(table, oracle_zeta):
    # f(s, 1/2) = (1 + 2^-s)/(1 - 2^-s) · ζ(2s)/ζ(s)
    closed = (1 + 0.25) / (1 - 0.25) * oracle_zeta[4.0] / oracle_zeta[2.0]
    ep = euler_product(SPoint(2.0), HALF, 10**6, table)
    assert abs(ep.value - closed) < 1e-6
    assert abs(ep.value - math.pi**2 / 9) < 1e-6
    closed3 = (1 + 1 / 8) / (1 - 1 / 8) * oracle_zeta[6.0] / oracle_zeta[3.0]
    assert abs(euler_product(SPoint(3.0), HALF, 10**6, table).value - closed3) < 1e-9


def test_euler_tail_is_honest(table):
    th = ThetaSample.explicit(0.42)
    s = SPoint(1.6, 2.0)
    fine = euler_product(s, th, 10**6, table)
    coarse = euler_product(s, th, 10**4, table)
    assert abs(cmath.log(coarse.value / fine.value)) <= coarse.tail


def test_dirichlet_partial(table, oracle_zeta):
    th = ThetaSample.explicit(0.37)
    assert dirichlet_partial(SPoint(1.3, 4.0), th, 1, table) == 1
    dp = dirichlet_partial(SPoint(2.0), ZERO, 10**6, table)
    assert abs(dp - math.pi**2 / 6) < 1e-5
    assert abs(dp - math.pi**2 / 6) <= dirichlet_tail(2.0, 10**6)
    s = SPoint(2.0, 1.0)
    assert abs(dirichlet_partial(s, th, 10**6, table) - euler_product(s, th, 10**6, table).value) < 1e-4


def test_f_series(table, table_big):
    assert f_series(SPoint(2.0), ZERO, 10**6, table).value == pytest.approx(0.569961, abs=2e-6)
    oracle = lambda_dirichlet(2.0, 10**7)
    assert abs(f_series(SPoint(2.0), ZERO, 10**7, table_big).value - oracle) < 1e-6
    th = ThetaSample.explicit(0.3)
    s = SPoint(1.2, -3.0)
    two = f_series(s, th, 2, table).value
    assert two == pytest.approx(math.log(2) * cmath.exp(4j * math.pi * 0.3) * 2 ** (-s.s), abs=1e-15)


def test_f_series_tail_self_consistency(table_big):
    th = ThetaSample.explicit(0.37)
    a = f_series(SPoint(0.75), th, 10**6, table_big)
    b = f_series(SPoint(0.75), th, 4 * 10**6, table_big)
    assert a.heuristic
    assert abs(a.value - b.value) < a.tail


def test_r1_series(table):
    # direct double sum over p <= 1e5, m <= 50
    pps = [p for n, p, m in prime_power_list(10**5) if m == 1]
    direct = math.fsum(math.log(p) * p ** (-2.0 * m) for p in pps for m in range(2, 51))
    r1 = r1_series(SPoint(2.0), ZERO, 10**6, table)
    assert abs(r1.value - direct) < 1e-9
    assert r1.value.real == pytest.approx(0.07687, abs=1e-5)
    th = ThetaSample.explicit(0.3)
    s = SPoint(0.8, 1.5)
    x = cmath.exp(4j * math.pi * 0.3) * 2 ** (-s.s)
    assert r1_series(s, th, 2, table).value == pytest.approx(math.log(2) * x * x / (1 - x), abs=1e-15)


def test_r1_inner_closed_form():
    th, s = 0.3, complex(0.8, 0.0)
    x = cmath.exp(2j * math.pi * th * 2) * 2 ** (-s)
    power_sum = sum(cmath.exp(2j * math.pi * m * th * 2) * 2 ** (-m * s) for m in range(2, 61))
    assert abs(x * x / (1 - x) - power_sum) < 1e-14


def test_r2_series(table, table_big):
    th = ThetaSample.explicit(0.3)
    s = SPoint(0.9, 2.0)
    assert r2_series(s, th, 4, table).value == pytest.approx(
        cmath.exp(8j * math.pi * 0.3) * math.log(2) * 4 ** (-s.s), abs=1e-15
    )
    for sp in (SPoint(2.0), SPoint(0.8, 3.0)):
        r1 = r1_series(sp, ZERO, 10**6, table)
        r2 = r2_series(sp, ZERO, 10**6, table)
        assert abs(r1.value - r2.value) <= r1.tail + r2.tail
    a = r2_series(SPoint(0.8), th, 10**6, table_big)
    b = r2_series(SPoint(0.8), th, 10**7, table_big)
    assert abs(a.value - b.value) < a.tail


def test_log_derivative(table):
    ld = log_derivative(SPoint(2.0), ZERO, P, table)
    assert ld.value.real == pytest.approx(-0.569961, abs=1e-5)
    oracle3 = lambda_dirichlet(3.0, 10**6)
    ld3 = log_derivative(SPoint(3.0), ZERO, P, table)
    assert abs(ld3.value + oracle3) < 1e-9
    assert ld3.value.real == pytest.approx(-0.164823, abs=1e-6)


@settings(max_examples=10, deadline=None)
@given(
    st.floats(0.6, 3.0),
    st.floats(-20, 20),
    st.floats(0.01, 0.99),
)
def test_log_derivative_conjugation(sigma, t, v):
    table = _table()
    th = ThetaSample.explicit(v)
    a = log_derivative(SPoint(sigma, t), th, P, table).value
    b = log_derivative(SPoint(sigma, -t), th.conjugate(), P, table).value
    assert abs(a - b.conjugate()) <= 1e-9 * max(1.0, abs(a))


def test_domain_errors(table):
    with pytest.raises(DomainError):
        euler_product(SPoint(1.0), ZERO, 100, table)
    with pytest.raises(DomainError):
        f_series(SPoint(0.5), ZERO, 100, table)
    with pytest.raises(DomainError):
        r1_series(SPoint(0.4), ZERO, 100, table)
    with pytest.raises(DomainError):
        continue_log_f(SPoint(0.52), ZERO, P, table)
    with pytest.raises(InvalidArgument):
        euler_product(SPoint(2.0), ZERO, 10**7, table)


def test_continue_examples(table):
    res = continue_log_f(SPoint(2.0), ZERO, P, table)
    assert res.log_f.real == pytest.approx(math.log(math.pi**2 / 6), abs=1e-6)
    assert res.log_f.real == pytest.approx(0.497700, abs=1e-6)
    assert res.f.real == pytest.approx(1.644934, abs=1e-6)
    assert res.flags == []

    th = ThetaSample.explicit(0.37)
    res = continue_log_f(SPoint(1.5), th, P, table)
    assert abs(res.f - euler_product(SPoint(1.5), th, 10**6, table).value) < 1e-4
    assert res.f == pytest.approx(cmath.exp(res.log_f))

    res = continue_log_f(SPoint(0.7, 5.0), th, P, table)
    assert "heuristic_tail" in res.flags
    assert res.f != 0 and res.trunc_error > 0


def test_continue_path_independence(table):
    th = ThetaSample.explicit(0.61)
    s = SPoint(0.8, 7.0)
    a = continue_log_f(s, th, P, table)
    b = continue_log_f(s, th, ContinuationParams(anchor=3.0), table)
    assert abs(a.log_f - b.log_f) < a.trunc_error + b.trunc_error


def test_winding_zero_free_rectangles(table):
    res = winding_number((1.5, 2.5, -1.0, 1.0), ZERO, 1.0, P, table)
    assert res.nearest == 0 and abs(res.raw) < 0.1
    res = winding_number((0.6, 0.9, 10.0, 20.0), ZERO, 1.0, P, table)
    assert res.nearest == 0 and abs(res.raw) < 0.1


def test_winding_rejects_bad_rectangles(table):
    with pytest.raises(InvalidArgument):
        winding_number((0.9, 0.6, 0, 1), ZERO, 1.0, P, table)
    with pytest.raises(DomainError):
        winding_number((0.5, 0.9, 0, 1), ZERO, 1.0, P, table)


_cache = {}


def _table():
    from randprod.primes import build_lambda_table

    if "t" not in _cache:
        _cache["t"] = build_lambda_table(10**6)
    return _cache["t"]
