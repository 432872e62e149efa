import math
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from lsistab.acceptance import series_oracle_ratio
from lsistab.errors import ParameterError
from lsistab.project import project_to_extremals
from lsistab.sharpness import (A_SWITCH, _DEN_SERIES, _NUM_SERIES, Branch, KappaSample,
                               empirical_kappa, modulus_probe, quadrature_cross_check,
                               ratio_scan, trial_closed_forms)
from lsistab.fields import gaussian_trial


@pytest.mark.parametrize("n", [1, 2, 3])
def test_series_coefficients_match_symbolic(n):
    a = sp.symbols("a", positive=True)
    num = 2 * n * a**2 / (2 * a + 1) - sp.Rational(n, 2) * sp.log(2 * a + 1) + n * a / (2 * a + 1)
    den = 2 - 2 * (2 * a + 1) ** sp.Rational(n, 4) / (a + 1) ** sp.Rational(n, 2)
    for expr, table in ((num, _NUM_SERIES[n]), (den, _DEN_SERIES[n])):
        poly = sp.series(expr, a, 0, 10).removeO()
        assert poly.coeff(a, 0) == 0 and poly.coeff(a, 1) == 0
        got = [sp.Rational(poly.coeff(a, k)) for k in range(2, 10)]
        assert [Fraction(int(c.p), int(c.q)) for c in got] == list(table)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("a", [1e-6, 1e-4, 1e-3, 5e-3, 9.9e-3])
def test_series_branch_against_high_precision(n, a):
    row = trial_closed_forms(a, n)
    assert row.branch is Branch.SERIES
    assert row.ratio == pytest.approx(series_oracle_ratio(a, n), rel=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_branches_agree_at_switch(n):
    s = trial_closed_forms(A_SWITCH * (1 - 1e-12), n)
    d = trial_closed_forms(A_SWITCH, n)
    assert s.branch is Branch.SERIES and d.branch is Branch.DIRECT
    assert s.ratio == pytest.approx(d.ratio, rel=1e-9)
    assert s.pi_deficit == pytest.approx(d.pi_deficit, rel=1e-9)


def test_small_a_prediction():
    a = 1e-3
    row = trial_closed_forms(a, 1)
    assert abs(row.ratio - 2 * math.pi * (1 + 2 * a / 3)) <= 1e-5
    assert abs(row.ratio - 2 * math.pi) <= 5e-3


@pytest.mark.parametrize("n", [1, 2, 3])
def test_limit_is_two_pi(n):
    assert trial_closed_forms(1e-9, n).ratio == pytest.approx(2 * math.pi, rel=1e-8)


def test_scan_strictly_decreasing():
    ratios = [r.ratio for r in ratio_scan([0.2, 0.1, 0.05, 0.02, 0.01], 1)]
    assert all(x > y for x, y in zip(ratios, ratios[1:]))


@given(a=st.floats(1e-6, 5.0), n=st.integers(1, 3))
def test_ratio_above_two_pi(a, n):
    assert trial_closed_forms(a, n).ratio > 2 * math.pi


def test_u1_values():
    row = trial_closed_forms(1.0, 1)
    assert row.pi_deficit == pytest.approx(math.pi * (1 - 0.5 * math.log(3)), abs=1e-14)
    assert row.dist_sq_to_one == pytest.approx(0.1387902818, abs=1e-10)
    assert row.ratio == pytest.approx(10.2017, abs=1e-4)


@pytest.mark.parametrize("a,n", [(0.1, 1), (2.0, 1), (0.5, 2)])
def test_quadrature_cross_check(a, n):
    for rep in quadrature_cross_check(a, n):
        assert rep.abs_err <= 1e-9, rep


def test_modulus_probe_vanishes():
    vals = [v for _, v in modulus_probe(1.5, [0.1, 0.01, 1e-3, 1e-4])]
    assert all(x > y for x, y in zip(vals, vals[1:]))
    # the probe is O(a^(2p-2)) = O(a) here
    assert vals[-1] < 1e-2 * vals[0]
    with pytest.raises(ParameterError):
        modulus_probe(1.0, [0.1])


def test_empirical_kappa_over_scan_and_projection():
    rows = ratio_scan([0.01, 0.1, 1.0], 1)
    assert empirical_kappa(rows) == pytest.approx(rows[0].ratio)
    projs = [project_to_extremals(gaussian_trial(r.a, 1), order=120) for r in rows]
    # the projection residual never exceeds the distance to 1
    assert empirical_kappa(rows, projs) >= empirical_kappa(rows) - 1e-9
    sample = KappaSample("x", 1.0, 0.5)
    assert empirical_kappa([sample]) == 2.0


def test_empirical_kappa_errors():
    with pytest.raises(ParameterError):
        empirical_kappa([])
    with pytest.raises(ParameterError):
        empirical_kappa(ratio_scan([0.1], 1), [1.0, 2.0])


def test_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        trial_closed_forms(0.0)
    with pytest.raises(ParameterError):
        trial_closed_forms(0.1, 4)
    with pytest.raises(ParameterError):
        ratio_scan([0.1, -0.1])


def test_csv_keys():
    assert list(trial_closed_forms(0.5).to_dict()) == ["a", "n", "pi_deficit", "dist_sq", "ratio",
                                                       "branch"]
