import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsistab.errors import ParameterError
from lsistab.fields import (constant, exp_tilt, finite_diff_gradient, gamma_mixture, gamma_tilt,
                            gaussian_trial, hermite_orthonormal, hermite_orthonormal_deriv,
                            hermite_perturb, shift_tilt)
from lsistab.functionals import moments, norm_sq
from lsistab.measures import MeasureKind, build_rule, integrate_values
from lsistab.scalar import ScalarField, as_points

MU1 = MeasureKind.mu(1)


def test_hermite_orthonormal_system():
    rule = build_rule(1, 60)
    gram = np.array([[integrate_values(lambda x: hermite_orthonormal(i, x[:, 0])
                                       * hermite_orthonormal(j, x[:, 0]), MU1, rule)
                      for j in range(7)] for i in range(7)])
    assert np.max(np.abs(gram - np.eye(7))) <= 1e-10


def test_hermite_derivative_matches_differences():
    x = np.linspace(-1.5, 1.5, 13)
    h = 1e-6
    for k in range(1, 6):
        fd = (hermite_orthonormal(k, x + h) - hermite_orthonormal(k, x - h)) / (2 * h)
        assert np.allclose(hermite_orthonormal_deriv(k, x), fd, rtol=1e-6, atol=1e-6)


def test_hermite_low_degrees_closed_form():
    x = np.array([0.0, 0.3, -0.7])
    assert np.allclose(hermite_orthonormal(1, x), math.sqrt(2 * math.pi) * x)
    assert np.allclose(hermite_orthonormal(2, x), (4 * math.pi * x**2 - 2) / math.sqrt(8))


@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("eps", [0.01, 0.05, 0.1])
def test_hermite_perturb_normalized_and_centered(k, eps):
    u = hermite_perturb(k, eps, check_positive=False)
    assert norm_sq(u) == pytest.approx(1.0, abs=1e-13)
    assert abs(moments(u).center[0]) <= 1e-13


def test_hermite_perturb_positivity_checked_at_nodes():
    with pytest.raises(ParameterError):
        hermite_perturb(3, 0.01)
    with pytest.raises(ParameterError):
        hermite_perturb(2, -0.5)
    hermite_perturb(2, 0.1)


def test_hermite_perturb_rejects_degree():
    with pytest.raises(ParameterError):
        hermite_perturb(0, 0.1)
    with pytest.raises(ParameterError):
        hermite_perturb(2.5, 0.1)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("a", [0.1, 0.5, 1.0])
def test_gaussian_trial_normalized(n, a):
    assert norm_sq(gaussian_trial(a, n), order=build_rule(n, 60)) == pytest.approx(1.0, abs=1e-12)


def test_gaussian_trial_rejects_nonpositive():
    with pytest.raises(ParameterError):
        gaussian_trial(0.0)


@given(c=st.floats(0.2, 3.0), a=st.floats(-1.0, 1.0))
def test_exp_tilt_norm_closed_form(c, a):
    # int exp(2 a x) dmu = exp(a^2 / pi)
    assert norm_sq(exp_tilt(c, a, 1)) == pytest.approx(c * c * math.exp(a * a / math.pi), rel=1e-12)


@given(x0=st.floats(-0.5, 0.5), a=st.floats(-0.8, 0.8), s=st.floats(0.5, 2.0))
def test_shift_tilt_of_constant_is_exp_tilt(x0, a, s):
    u = shift_tilt(constant(1.0, 1), x0, a, s)
    v = exp_tilt(s, a, 1)
    x = np.linspace(-2, 2, 9)[:, None]
    assert np.allclose(u.eval(x), v.eval(x), rtol=1e-14)
    assert np.allclose(u.grad(x), v.grad(x), rtol=1e-14)


@given(x0=st.floats(-0.5, 0.5), a=st.floats(-0.8, 0.8), s=st.floats(0.5, 2.0),
       w=st.floats(0.1, 1.0))
def test_shift_tilt_gradient_matches_finite_differences(x0, a, s, w):
    u = shift_tilt(gaussian_trial(w, 2), [x0, -x0], [a, 0.5 * a], s)
    fd = finite_diff_gradient(u, 1e-6)
    x = np.array([[0.1, -0.2], [0.4, 0.3], [-0.5, 0.0]])
    assert np.allclose(u.grad(x), fd.grad(x), rtol=1e-6, atol=1e-7)


def test_shift_tilt_rejects_scale():
    with pytest.raises(ParameterError):
        shift_tilt(constant(), 0.0, 0.0, 0.0)


def test_gamma_tilt_and_mixture_are_densities():
    rule = build_rule(1, 120)
    g = MeasureKind.gamma(1)
    for f in (gamma_tilt(1.5), gamma_mixture(0.1, 2.0)):
        assert integrate_values(f.eval, g, rule) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ParameterError):
        gamma_mixture(1.0, 2.0)


def test_finite_diff_rejects_step():
    with pytest.raises(ParameterError):
        finite_diff_gradient(constant(), 0.0)


def test_scalar_field_coercion():
    u = gaussian_trial(1.0, 2)
    assert u([0.0, 0.0]).shape == (1,)
    assert u(np.zeros((4, 2))).shape == (4,)
    assert as_points([1.0, 2.0, 3.0], 1).shape == (3, 1)
    with pytest.raises(ParameterError):
        as_points(np.zeros((2, 3)), 2)
    with pytest.raises(ParameterError):
        ScalarField(4, lambda x: x)
    with pytest.raises(ParameterError):
        ScalarField(1, lambda x: x[:, 0]).gradient(0.0)
