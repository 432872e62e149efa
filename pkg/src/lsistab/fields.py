"""Parametric trial fields and generic field transforms."""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.hermite import hermder, hermval

from .errors import ParameterError
from .measures import MeasureKind, build_rule
from .scalar import ScalarField

DEFAULT_FD_STEP = 1e-5


def _vec(a, dim: int) -> np.ndarray:
    v = np.asarray(a, dtype=float).reshape(-1)
    if v.size == 1 and dim > 1:
        v = np.full(dim, float(v[0]))
    if v.size != dim:
        raise ParameterError(f"expected a vector of length {dim}, got {np.shape(a)}")
    return v


def constant(value: float = 1.0, dim: int = 1) -> ScalarField:
    value = float(value)
    return ScalarField(
        dim,
        lambda x: np.full(len(x), value),
        lambda x: np.zeros_like(x),
        f"{value:g}",
    )


def gaussian_trial(a: float, dim: int = 1) -> ScalarField:
    """``u_a(x) = (2a+1)^(n/4) exp(-a pi |x|^2)``, unit norm in ``L^2(mu)``."""
    if not a > 0:
        raise ParameterError(f"gaussian trial width must be positive, got a={a}")
    a = float(a)
    pref = (2.0 * a + 1.0) ** (dim / 4.0)

    def ev(x):
        return pref * np.exp(-a * math.pi * np.sum(x * x, axis=1))

    def grad(x):
        return (-2.0 * a * math.pi) * x * ev(x)[:, None]

    return ScalarField(dim, ev, grad, f"u_{a:g}")


def exp_tilt(c: float, a, dim: int | None = None) -> ScalarField:
    """Extremal ``c * exp(a . x)``; a scalar ``a`` is broadcast over ``dim`` axes."""
    if dim is None:
        dim = np.asarray(a, dtype=float).size
    av = _vec(a, dim)
    c = float(c)

    def ev(x):
        return c * np.exp(x @ av)

    def grad(x):
        return ev(x)[:, None] * av

    return ScalarField(dim, ev, grad, f"{c:g}*exp({_fmt_vec(av)}.x)")


def gamma_tilt(b: float) -> ScalarField:
    """The gamma-density ``exp(b x - b^2/2)`` of ``N(b, 1)`` relative to ``N(0, 1)``."""
    b = float(b)
    f = exp_tilt(math.exp(-0.5 * b * b), b, dim=1)
    return ScalarField(1, f.eval, f.grad, f"exp({b:g}x-{b:g}^2/2)")


def hermite_coefficients(k: int) -> np.ndarray:
    c = np.zeros(k + 1)
    c[k] = 1.0
    return c


def hermite_orthonormal(k: int, x) -> np.ndarray:
    """Degree-``k`` polynomial orthonormal for ``exp(-pi x^2) dx``.

    ``h_k(x) = H_k(sqrt(pi) x) / sqrt(2^k k!)`` with ``H_k`` the physicists'
    Hermite polynomial.
    """
    if k < 0:
        raise ParameterError(f"degree must be non-negative, got {k}")
    norm = math.sqrt(2.0**k * math.factorial(k))
    return hermval(math.sqrt(math.pi) * np.asarray(x, dtype=float), hermite_coefficients(k)) / norm


def hermite_orthonormal_deriv(k: int, x) -> np.ndarray:
    if k == 0:
        return np.zeros_like(np.asarray(x, dtype=float))
    norm = math.sqrt(2.0**k * math.factorial(k))
    dc = hermder(hermite_coefficients(k))
    return math.sqrt(math.pi) * hermval(math.sqrt(math.pi) * np.asarray(x, dtype=float), dc) / norm


def hermite_perturb(k: int, eps: float, order: int | None = None,
                    check_positive: bool = True) -> ScalarField:
    """Normalized perturbation ``(1 + eps h_k) / sqrt(1 + eps^2)`` of the constant field.

    For ``k >= 1`` the norm is exact by orthonormality; for ``k >= 2`` the
    field is also centered. Positivity of ``1 + eps h_k`` is checked at the
    nodes of the one-dimensional rule of the given ``order`` (the quadrature
    support) unless ``check_positive`` is false, in which case sign-changing
    fields are allowed.
    """
    if int(k) != k or k < 1:
        raise ParameterError(f"hermite degree must be an integer >= 1, got {k}")
    k = int(k)
    eps = float(eps)
    if check_positive and eps != 0.0:
        pts = build_rule(1, order).points(MeasureKind.mu(1))[:, 0]
        vals = 1.0 + eps * hermite_orthonormal(k, pts)
        if (vals <= 0.0).any():
            i = int(np.argmin(vals))
            raise ParameterError(
                f"1 + {eps:g} h_{k} = {vals[i]:.3g} <= 0 at node x = {pts[i]:.6g}")
    scale = 1.0 / math.sqrt(1.0 + eps * eps)

    def ev(x):
        return scale * (1.0 + eps * hermite_orthonormal(k, x[:, 0]))

    def grad(x):
        return (scale * eps) * hermite_orthonormal_deriv(k, x[:, 0])[:, None]

    return ScalarField(1, ev, grad, f"hermite(k={k},eps={eps:g})")


def gamma_mixture(eps: float, b: float) -> ScalarField:
    """Gamma-density of the mixture ``(1-eps) N(0,1) + eps N(b,1)``."""
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"mixture weight must lie in (0, 1), got eps={eps}")
    eps, b = float(eps), float(b)
    shift = -0.5 * b * b

    def ev(x):
        return (1.0 - eps) + eps * np.exp(b * x[:, 0] + shift)

    def grad(x):
        return (eps * b * np.exp(b * x[:, 0] + shift))[:, None]

    return ScalarField(1, ev, grad, f"mix(eps={eps:g},b={b:g})")


def shift_tilt(u: ScalarField, x0, a, s: float) -> ScalarField:
    """``s * u(x - x0) * exp(a . x)``."""
    if not s > 0:
        raise ParameterError(f"scale must be positive, got s={s}")
    dim = u.dim
    x0v, av, s = _vec(x0, dim), _vec(a, dim), float(s)

    def ev(x):
        return s * u.eval(x - x0v) * np.exp(x @ av)

    grad = None
    if u.grad is not None:
        def grad(x):
            y = x - x0v
            e = s * np.exp(x @ av)[:, None]
            return e * (u.grad(y) + u.eval(y)[:, None] * av)

    return ScalarField(dim, ev, grad,
                       f"{s:g}*{u}(x-{_fmt_vec(x0v)})*exp({_fmt_vec(av)}.x)")


def finite_diff_gradient(u: ScalarField, h: float = DEFAULT_FD_STEP) -> ScalarField:
    """Attach a central-difference gradient with step ``h``."""
    if not h > 0:
        raise ParameterError(f"finite-difference step must be positive, got h={h}")
    h = float(h)
    eye = np.eye(u.dim) * h

    def grad(x):
        cols = [(u.eval(x + e) - u.eval(x - e)) / (2.0 * h) for e in eye]
        return np.stack(cols, axis=1)

    return ScalarField(u.dim, u.eval, grad, u.label)


def _fmt_vec(v: np.ndarray) -> str:
    if v.size == 1:
        return f"{v[0]:g}"
    return "(" + ",".join(f"{t:g}" for t in v) + ")"
