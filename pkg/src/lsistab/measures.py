"""Tensor-product Gauss-Hermite quadrature for the three Gaussian measures.

All three measures are probability measures on R^n, each a centered
isotropic Gaussian with its own per-axis variance:

==========  ===================================  ==============
kind        density                              variance/axis
==========  ===================================  ==============
``MU_PI``   ``exp(-pi|x|^2)``                    ``1/(2 pi)``
``MASS_M``  ``2^(n/2) exp(-2 pi|x|^2)``          ``1/(4 pi)``
``GAMMA``   ``(2 pi)^(-n/2) exp(-|x|^2/2)``      ``1``
==========  ===================================  ==============

A :class:`QuadratureRule` stores nodes and weights for the standard normal
law; :func:`integrate` rescales the nodes for the requested measure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from .errors import EvaluationError, ParameterError
from .scalar import ScalarField

MAX_DIM = 3
MIN_ORDER, MAX_ORDER = 2, 256
DEFAULT_ORDER = {1: 60, 2: 40, 3: 24}

SQRT_2PI = math.sqrt(2.0 * math.pi)


class Measure(enum.Enum):
    MU_PI = "MuPi"
    MASS_M = "MassM"
    GAMMA = "Gamma"


_STD = {
    Measure.MU_PI: 1.0 / math.sqrt(2.0 * math.pi),
    Measure.MASS_M: 1.0 / math.sqrt(4.0 * math.pi),
    Measure.GAMMA: 1.0,
}


@dataclass(frozen=True)
class MeasureKind:
    tag: Measure
    dim: int

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise ParameterError(f"dim must be in 1..{MAX_DIM}, got {self.dim}")

    @property
    def std(self) -> float:
        """Per-axis standard deviation of the measure."""
        return _STD[self.tag]

    def second_moment(self) -> float:
        """Exact value of the integral of |x|^2."""
        return self.dim * self.std**2

    def fourth_moment(self) -> float:
        """Exact value of the integral of |x|^4."""
        return self.dim * (self.dim + 2) * self.std**4

    @classmethod
    def mu(cls, dim: int) -> "MeasureKind":
        return cls(Measure.MU_PI, dim)

    @classmethod
    def m(cls, dim: int) -> "MeasureKind":
        return cls(Measure.MASS_M, dim)

    @classmethod
    def gamma(cls, dim: int) -> "MeasureKind":
        return cls(Measure.GAMMA, dim)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Tensor-product rule for the standard normal law on R^dim.

    ``nodes`` has shape ``(order**dim, dim)``; ``weights`` are positive and sum
    to one. Arrays are read-only.
    """

    dim: int
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)

    def points(self, kind: MeasureKind) -> np.ndarray:
        if kind.dim != self.dim:
            raise ParameterError(f"measure dim {kind.dim} != rule dim {self.dim}")
        return _scaled_nodes(self, kind.tag)


@lru_cache(maxsize=None)
def build_rule(dim: int, order: int | None = None) -> QuadratureRule:
    """Gauss-Hermite rule with ``order`` nodes per axis in dimension ``dim``.

    Exact for polynomials of degree up to ``2*order - 1`` in each variable.
    ``order=None`` selects the per-dimension default (60 / 40 / 24).
    """
    if not isinstance(dim, (int, np.integer)) or not 1 <= dim <= MAX_DIM:
        raise ParameterError(f"dim must be an integer in 1..{MAX_DIM}, got {dim!r}")
    if order is None:
        order = DEFAULT_ORDER[dim]
    if not isinstance(order, (int, np.integer)) or not MIN_ORDER <= order <= MAX_ORDER:
        raise ParameterError(
            f"order must be an integer in {MIN_ORDER}..{MAX_ORDER}, got {order!r}")
    z, w = hermegauss(int(order))
    # hermegauss is symmetric only up to rounding; enforce it exactly
    z = 0.5 * (z - z[::-1])
    w = 0.5 * (w + w[::-1]) / SQRT_2PI
    grids = np.meshgrid(*([z] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(int(dim), int(order), nodes, weights)


@lru_cache(maxsize=64)
def _scaled_nodes(rule: QuadratureRule, tag: Measure) -> np.ndarray:
    pts = rule.nodes * _STD[tag]
    pts.setflags(write=False)
    return pts


def default_rule(dim: int, order: int | None = None) -> QuadratureRule:
    return build_rule(dim, order)


def fsum_weighted(weights: np.ndarray, values: np.ndarray) -> float:
    """Correctly rounded sum of ``weights * values`` in index order."""
    return math.fsum((weights * values).tolist())


def integrate_values(fn, kind: MeasureKind, rule: QuadratureRule | None = None,
                     label: str = "integrand") -> float:
    """Integrate a vectorized callable ``fn(points) -> values`` against ``kind``."""
    if rule is None:
        rule = build_rule(kind.dim)
    pts = rule.points(kind)
    vals = np.asarray(fn(pts), dtype=float)
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        node = tuple(float(v) for v in pts[i])
        raise EvaluationError(f"{label} is not finite at node {node}: {vals[i]}", node=node)
    return fsum_weighted(rule.weights, vals)


def integrate(g: ScalarField, kind: MeasureKind, rule: QuadratureRule | None = None) -> float:
    """Quadrature of ``g`` against the measure ``kind``.

    Raises :class:`EvaluationError` (carrying the offending node) if ``g`` is
    not finite at some node.
    """
    if g.dim != kind.dim:
        raise ParameterError(f"field dim {g.dim} != measure dim {kind.dim}")
    return integrate_values(g.eval, kind, rule, label=str(g))


def u_to_gamma_density(u: ScalarField) -> ScalarField:
    """The gamma-density ``f(x) = |u(x / sqrt(2 pi))|^2`` of a field on ``mu``.

    Mass is preserved: ``int f dgamma = int |u|^2 dmu``.
    """
    s = 1.0 / SQRT_2PI

    def f(x):
        return u.eval(x * s) ** 2

    grad = None
    if u.grad is not None:
        def grad(x):
            y = x * s
            return (2.0 * s) * u.eval(y)[:, None] * u.grad(y)

    return ScalarField(u.dim, f, grad, f"|{u}|^2(x/sqrt(2pi))")


def gamma_density_to_u(f: ScalarField) -> ScalarField:
    """Inverse of :func:`u_to_gamma_density` for ``f >= 0``: ``u(x) = sqrt(f(sqrt(2 pi) x))``."""
    s = SQRT_2PI

    def u(x):
        return np.sqrt(np.maximum(f.eval(x * s), 0.0))

    grad = None
    if f.grad is not None:
        def grad(x):
            y = x * s
            root = np.sqrt(np.maximum(f.eval(y), 0.0))
            with np.errstate(divide="ignore", invalid="ignore"):
                g = (0.5 * s) * f.grad(y) / root[:, None]
            return np.where(root[:, None] > 0.0, g, 0.0)

    return ScalarField(f.dim, u, grad, f"sqrt({f}(sqrt(2pi)x))")


def u_to_m_field(u: ScalarField) -> ScalarField:
    """``w(x) = u(sqrt(2) x)``, carrying ``L^2(mu)`` onto ``L^2(m)`` isometrically."""
    s = math.sqrt(2.0)

    def w(x):
        return u.eval(x * s)

    grad = None
    if u.grad is not None:
        def grad(x):
            return s * u.grad(x * s)

    return ScalarField(u.dim, w, grad, f"{u}(sqrt(2)x)")
