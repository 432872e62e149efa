import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsistab.errors import (DegenerateInputError, DensityError, NormalizationError,
                            PreconditionError)
from lsistab.fields import (constant, exp_tilt, gamma_mixture, gamma_tilt, gaussian_trial,
                            hermite_perturb)
from lsistab.functionals import (check_al_sj, check_alw, check_moment_bound, deficit_c,
                                 deficit_gamma, deficit_star, entropy_fisher_ratio,
                                 fisher_information, h1_distance_to_one, moment_chain_constant,
                                 relative_entropy, xlogx)
from lsistab.measures import build_rule, u_to_gamma_density, u_to_m_field
from lsistab.scalar import ScalarField
from lsistab.sharpness import REFERENCE_ORDER

LN3 = math.log(3.0)
DELTA_U1 = 1.0 - 0.5 * LN3
DIST_U1 = 2.0 - math.sqrt(2.0) * 3.0**0.25


def test_deficit_of_u1_closed_form():
    rep = deficit_star(gaussian_trial(1.0, 1))
    assert rep.deficit == pytest.approx(DELTA_U1, abs=1e-12)
    assert rep.deficit == pytest.approx(0.450694, abs=1e-6)
    assert rep.entropy_term == pytest.approx(0.5 * LN3 - 1.0 / 3.0, abs=1e-12)
    assert rep.grad_term == pytest.approx(2 * math.pi / 3, abs=1e-12)
    assert rep.variant.value == "StarMu"


@pytest.mark.parametrize("n,a", [(1, 0.1), (1, 1.0), (2, 0.5), (2, 2.0), (3, 1.0)])
def test_deficit_of_trial_matches_closed_form(n, a):
    want = n * (a - 0.5 * math.log(1 + 2 * a))
    got = deficit_star(gaussian_trial(a, n), REFERENCE_ORDER[n]).deficit
    assert got == pytest.approx(want, abs=1e-10)


@given(c=st.floats(0.2, 3.0), a=st.floats(-1.0, 1.0))
def test_extremals_have_zero_deficit(c, a):
    assert abs(deficit_star(exp_tilt(c, a, 1)).deficit) <= 1e-11 * max(c * c, 1.0)


@given(a=st.floats(-0.8, 0.8), b=st.floats(-0.8, 0.8))
def test_extremals_zero_deficit_2d(a, b):
    assert abs(deficit_star(exp_tilt(1.3, [a, b], 2)).deficit) <= 1e-11


@given(eps=st.floats(0.0, 0.2), k=st.integers(1, 5), scale=st.floats(0.5, 2.0))
def test_deficit_is_nonnegative_and_scale_invariant(eps, k, scale):
    u = hermite_perturb(k, eps, check_positive=False)
    v = ScalarField(1, lambda x: scale * u.eval(x), lambda x: scale * u.grad(x))
    du = deficit_star(u).deficit
    assert du >= -1e-13
    assert deficit_star(v).deficit == pytest.approx(scale * scale * du, rel=1e-10, abs=1e-14)


@given(a=st.floats(0.05, 1.5))
def test_m_and_mu_deficits_agree(a):
    u = gaussian_trial(a, 1)
    rule = build_rule(1, 120)
    assert deficit_c(u_to_m_field(u), rule).deficit == pytest.approx(
        deficit_star(u, rule).deficit, abs=1e-11)


@pytest.mark.parametrize("u", [gaussian_trial(0.5, 1), hermite_perturb(2, 0.1),
                               hermite_perturb(4, 0.05)], ids=str)
def test_gamma_and_mu_deficits_agree(u):
    rule = build_rule(1, 160)
    f = u_to_gamma_density(u)
    assert deficit_gamma(f, rule).deficit == pytest.approx(deficit_star(u, rule).deficit, abs=1e-10)


@given(b=st.floats(-2.0, 2.0))
def test_gamma_tilt_fisher_and_entropy(b):
    f = gamma_tilt(b)
    rule = build_rule(1, 120)
    assert fisher_information(f, rule) == pytest.approx(b * b, abs=1e-10)
    assert relative_entropy(f, rule) == pytest.approx(0.5 * b * b, abs=1e-10)
    assert abs(deficit_gamma(f, rule).deficit) <= 1e-10


@given(eps=st.floats(0.01, 0.9), b=st.floats(0.2, 3.0))
def test_entropy_fisher_ratio_at_most_half(eps, b):
    assert entropy_fisher_ratio(gamma_mixture(eps, b), 120) <= 0.5 + 1e-9


def test_entropy_fisher_ratio_degenerate():
    with pytest.raises(DegenerateInputError):
        entropy_fisher_ratio(constant(1.0, 1))


def test_deficit_gamma_rejects_bad_densities():
    with pytest.raises(NormalizationError):
        deficit_gamma(constant(2.0, 1))
    neg = ScalarField(1, lambda x: 1.0 - 0.5 * x[:, 0] ** 2, lambda x: -x)
    with pytest.raises(DensityError):
        deficit_gamma(neg)


def test_missing_gradient():
    with pytest.raises(DegenerateInputError):
        deficit_star(ScalarField(1, lambda x: np.ones(len(x))))


def test_xlogx_convention():
    assert np.array_equal(xlogx(np.array([0.0, 1.0])), [0.0, 0.0])
    assert xlogx(np.array([math.e]))[0] == pytest.approx(math.e)


def test_h1_distance_of_u1():
    want = math.sqrt(DIST_U1 + 2 * math.pi / 3)
    assert h1_distance_to_one(gaussian_trial(1.0, 1)) == pytest.approx(want, abs=1e-12)
    assert want == pytest.approx(1.4943846172, abs=1e-10)


def test_al_sj_worked_value():
    rep = check_al_sj(gaussian_trial(1.0, 1))
    assert rep.lhs == pytest.approx(1.0, abs=1e-12)
    assert rep.rhs == pytest.approx(math.sqrt(2 * DELTA_U1) + DELTA_U1, abs=1e-12)
    assert rep.rhs == pytest.approx(1.400109, abs=1e-6)
    assert rep.holds and rep.name == "al_sj"


def test_alw_worked_value():
    rep = check_alw(gaussian_trial(1.0, 1))
    assert rep.lhs == pytest.approx(LN3**2 / 4, abs=1e-12)
    assert rep.rhs == pytest.approx(DELTA_U1, abs=1e-12)
    assert rep.holds


@pytest.mark.parametrize("check", [check_al_sj, check_alw])
def test_checks_trivial_at_one(check):
    rep = check(constant(1.0, 2))
    # the al_sj right side carries sqrt of a round-off level deficit
    assert abs(rep.lhs) <= 1e-14 and abs(rep.rhs) <= 1e-7 and rep.holds


@pytest.mark.parametrize("check", [check_al_sj, check_alw])
def test_checks_require_normalized_centered(check):
    with pytest.raises(NormalizationError):
        check(constant(2.0, 1))
    with pytest.raises(NormalizationError):
        check(exp_tilt(math.exp(-0.09 / math.pi), 0.3, 1))


@pytest.mark.parametrize("n,a", [(1, 0.1), (1, 2.0), (2, 0.3), (2, 1.0), (3, 0.5)])
def test_inequalities_hold_on_trial_family(n, a):
    u = gaussian_trial(a, n)
    order = REFERENCE_ORDER[n]
    assert check_al_sj(u, order=order).holds
    assert check_alw(u, order=order).holds
    assert all(r.holds for r in check_moment_bound(u, order=order))


@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("eps", [0.01, 0.05, 0.1])
def test_al_sj_on_hermite(k, eps):
    assert check_al_sj(hermite_perturb(k, eps, check_positive=False)).slack >= -1e-9


def _alw_slack_oracle(eps, dps=30):
    with mpmath.workdps(dps):
        eps = mpmath.mpf(eps)
        s = 1 / mpmath.sqrt(1 + eps**2)
        h2 = lambda x: (4 * mpmath.pi * x**2 - 2) / mpmath.sqrt(8)
        u = lambda x: s * (1 + eps * h2(x))
        du = lambda x: s * eps * 8 * mpmath.pi * x / mpmath.sqrt(8)
        q = lambda g: mpmath.quad(lambda x: g(x) * mpmath.exp(-mpmath.pi * x**2),
                                  [-mpmath.inf, -1, 0, 1, mpmath.inf])
        ent = q(lambda x: u(x) ** 2 * mpmath.log(u(x) ** 2))
        m2 = q(lambda x: x**2 * u(x) ** 2)
        d = q(lambda x: du(x) ** 2) / mpmath.pi - ent
        lhs = (2 * ent + 2 * mpmath.pi * (1 / (2 * mpmath.pi) - m2)) ** 2 / 4
        return float(d - lhs)


@pytest.mark.parametrize("eps", [0.01, 0.05, 0.1, -0.01])
def test_alw_slack_on_second_hermite_matches_oracle(eps):
    # both sides agree to order eps^2 here; the eps^3 term makes the slack negative for eps > 0
    # (for eps <= -0.05 the field vanishes inside the bulk and the kink defeats Gauss-Hermite)
    rep = check_alw(hermite_perturb(2, eps, check_positive=False))
    assert rep.slack == pytest.approx(_alw_slack_oracle(eps), rel=1e-8, abs=1e-15)


def test_moment_chain_constant_formula():
    n, A, kappa = 2, 1.0, 2 * math.pi
    m4 = n * (n + 2) / (4 * math.pi**2)
    c = math.pi * math.sqrt(2 * (A + m4))
    want = math.sqrt(math.pi / kappa + math.pi * max(c * math.sqrt(math.pi / kappa)
                                                      + math.sqrt(2 * n), 1.0))
    assert moment_chain_constant(A, kappa, n) == pytest.approx(want, rel=1e-15)


def test_moment_link_i_worked_value():
    link1 = check_moment_bound(gaussian_trial(1.0, 1))[0]
    m4 = 3 / (4 * math.pi**2)
    want = math.pi * math.sqrt(2 * (1 + m4)) * math.sqrt(DIST_U1)
    assert link1.rhs == pytest.approx(want, abs=1e-12)
    assert link1.lhs == pytest.approx(1 / 3, abs=1e-12)


def test_moment_bound_preconditions():
    u = gaussian_trial(1.0, 1)
    with pytest.raises(PreconditionError):
        check_moment_bound(u, A=1e-4)
    with pytest.raises(PreconditionError):
        check_moment_bound(u, kappa=0.0)
