import cmath
import math

import numpy as np
import pytest

from randprod.errors import FitError, InvalidArgument
from randprod.experiments import (
    ExperimentConfig,
    exponent_fit,
    run_campaign,
    sample_thetas,
    theta_report,
)
from randprod.expsums import SumTrace, geometric_grid, trace
from randprod.theta import ThetaSample
from oracles import prime_power_list


def _synthetic(values_of_n):
    grid = geometric_grid(10**6)
    s = values_of_n(grid.astype(float)).astype(complex)
    return SumTrace(ThetaSample.explicit(0.0), grid, s, s)


def test_sample_thetas():
    a = sample_thetas(10**4, 42)
    b = sample_thetas(10**4, 42)
    assert [x.value for x in a] == [x.value for x in b]
    v = np.array([x.value for x in a])
    assert np.all((v >= 0) & (v < 1))
    assert abs(v.mean() - 0.5) <= 4 * (1 / math.sqrt(12)) / 100
    assert a[17] == ThetaSample.seeded(42, 17)
    with pytest.raises(InvalidArgument):
        sample_thetas(0, 1)


def test_exponent_fit_synthetic():
    assert exponent_fit(_synthetic(lambda n: n)) == pytest.approx(1.0, abs=1e-12)
    assert exponent_fit(_synthetic(np.sqrt)) == pytest.approx(0.5, abs=1e-12)


def test_exponent_fit_needs_points():
    grid = np.array([100, 200, 400, 800])
    s = np.array([1.0, 2.0, 0.0, 0.0], dtype=complex)
    with pytest.raises(FitError):
        exponent_fit(SumTrace(ThetaSample.explicit(0.1), grid, s, s))


def test_exponent_fit_theta_zero(table):
    tr = trace(ThetaSample.explicit(0.0), geometric_grid(10**6), table)
    assert exponent_fit(tr) == pytest.approx(1.0, abs=0.02)


def test_third_control_magnitude(table):
    # |ψ(N;3,1)e(1/3) + ψ(N;3,2)e(2/3) + ψ(N;3,0)|, ψ split by residue class
    N = 10**6
    psi = [0.0, 0.0, 0.0]
    for n, p, _ in prime_power_list(N):
        psi[n % 3] += math.log(p)
    oracle = abs(psi[1] * cmath.exp(2j * math.pi / 3) + psi[2] * cmath.exp(4j * math.pi / 3) + psi[0])
    tr = trace(ThetaSample.rational(1, 3), [N], table)
    assert abs(tr.s_values[0]) == pytest.approx(oracle, rel=1e-9)
    assert abs(tr.s_values[0]) / N == pytest.approx(0.5, abs=0.01)
    rep = theta_report("control", ThetaSample.rational(1, 3), geometric_grid(N), table)
    assert rep.exponent_fit == pytest.approx(1.0, abs=0.05)


def test_squarefree_controls_separate(table):
    grid = geometric_grid(10**6)
    for q in (1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19):
        for a in range(q):
            if math.gcd(a, q) == 1:
                assert theta_report("control", ThetaSample.rational(a, q), grid, table).exponent_fit > 0.9


def test_sup_normalized_monotone_in_grid(table):
    th = ThetaSample.seeded(3, 0)
    small = theta_report("random", th, geometric_grid(10**4), table)
    big = theta_report("random", th, geometric_grid(10**6), table)
    assert big.sup_normalized >= small.sup_normalized


def test_campaign_deterministic_across_threads(table):
    cfg = ExperimentConfig(seed=2, theta_count=12, n_max=10**5)
    one = run_campaign(cfg, table, threads=1).to_csv()
    many = run_campaign(cfg, table, threads=4).to_csv()
    assert one == many
    assert one.startswith("# schema=1\nkind,theta,a,q,sup_normalized,exponent_fit,flags\n")


def test_campaign_rows(table):
    res = run_campaign(ExperimentConfig(seed=1, theta_count=5, n_max=10**5), table)
    assert len(res.random_reports) == 5 and len(res.control_reports) == 4
    zero = res.control_reports[0]
    assert zero.theta.value == 0.0 and "control" in zero.flags
    assert set(res.summary) == {"sup_normalized", "exponent_fit"}
    assert res.fit_window[1] == 10**5


def test_config_validation(table_small):
    with pytest.raises(InvalidArgument):
        ExperimentConfig(theta_count=0)
    with pytest.raises(InvalidArgument):
        ExperimentConfig(controls=((3, 2),))
    with pytest.raises(InvalidArgument):
        run_campaign(ExperimentConfig(n_max=10**6), table_small)
