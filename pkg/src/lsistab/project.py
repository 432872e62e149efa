"""Squared distance from a field to the extremal manifold ``{c exp(a.x)}``.

For fixed ``a`` the best amplitude is explicit,

    c*(a) = exp(-|a|^2/pi) int u exp(a.x) dmu,

because ``int exp(2 a.x) dmu = exp(|a|^2/pi)``. What remains is the
``n``-dimensional search ``min_a ||u||^2 - c*(a)^2 exp(|a|^2/pi)``, done by
multistart Nelder-Mead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DegenerateInputError, OptimizationError, ParameterError
from .functionals import _rule, deficit_star, norm_sq
from .measures import MeasureKind, integrate_values
from .scalar import ScalarField

DEFAULT_RESTARTS = 5
DEFAULT_SEED = 20240607
SIMPLEX_EDGE = 0.5
MAX_EVALS = 2000
CONVERGED_DIAMETER = 1e-8
TIE_TOL = 1e-12
MIN_RESIDUAL = 1e-12


@dataclass(frozen=True)
class ProjectionResult:
    a_star: np.ndarray
    c_star: float
    residual_sq: float
    evaluations: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "a_star": [float(v) for v in self.a_star],
            "c_star": self.c_star,
            "residual_sq": self.residual_sq,
            "evaluations": self.evaluations,
            "converged": self.converged,
        }


def _tilt_moment(u: ScalarField, a: np.ndarray, rule) -> float:
    return integrate_values(lambda x: u.eval(x) * np.exp(x @ a), MeasureKind.mu(u.dim), rule)


def optimal_c(u: ScalarField, a, order=None) -> float:
    """Best amplitude ``c`` in ``||u - c exp(a.x)||`` for a fixed tilt ``a``."""
    a = np.asarray(a, dtype=float).reshape(u.dim)
    return _tilt_moment(u, a, _rule(u.dim, order)) * math.exp(-float(a @ a) / math.pi)


def distance_sq(u: ScalarField, c: float, a, order=None) -> float:
    """``int |u - c exp(a.x)|^2 dmu`` evaluated directly."""
    a = np.asarray(a, dtype=float).reshape(u.dim)
    return integrate_values(lambda x: (u.eval(x) - c * np.exp(x @ a)) ** 2,
                            MeasureKind.mu(u.dim), _rule(u.dim, order))


def _simplex_diameter(simplex: np.ndarray) -> float:
    diffs = simplex[:, None, :] - simplex[None, :, :]
    return float(np.sqrt(np.max(np.sum(diffs**2, axis=-1))))


def project_to_extremals(u: ScalarField, restarts: int = DEFAULT_RESTARTS,
                         seed: int = DEFAULT_SEED, order=None) -> ProjectionResult:
    """Minimize ``||u - c exp(a.x)||^2`` over real ``c`` and ``a``.

    Starts from the origin plus ``restarts - 1`` standard-normal points drawn
    with ``seed``. Among restarts whose objectives agree to ``1e-12`` the one
    with the smallest ``|a|`` wins.
    """
    if restarts < 1:
        raise ParameterError(f"restarts must be >= 1, got {restarts}")
    rule = _rule(u.dim, order)
    n = u.dim
    nsq = norm_sq(u, MeasureKind.mu(n), rule)
    # the search only ever needs u at the nodes
    pts = rule.points(MeasureKind.mu(n))
    uw = rule.weights * u.eval(pts)

    def objective(a):
        a = np.asarray(a, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            t = float(uw @ np.exp(pts @ a))
            val = nsq - t * t * math.exp(-float(a @ a) / math.pi)
        return val if np.isfinite(val) else np.inf

    rng = np.random.default_rng(seed)
    starts = [np.zeros(n)] + [rng.standard_normal(n) for _ in range(restarts - 1)]
    runs = []
    total = 0
    for x0 in starts:
        simplex = np.vstack([x0, x0 + SIMPLEX_EDGE * np.eye(n)])
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "maxfev": MAX_EVALS,
                                "xatol": 1e-10, "fatol": 1e-15 * max(nsq, 1.0)})
        total += int(res.nfev)
        if np.isfinite(res.fun):
            runs.append((float(res.fun), np.asarray(res.x, dtype=float),
                         _simplex_diameter(res.final_simplex[0])))
    if not runs:
        raise OptimizationError(f"every restart diverged while projecting {u}")

    best_val = min(r[0] for r in runs)
    ties = [r for r in runs if r[0] <= best_val + TIE_TOL]
    _, a_star, diam = min(ties, key=lambda r: (float(np.linalg.norm(r[1])), r[0]))
    c_star = optimal_c(u, a_star, rule)
    residual = distance_sq(u, c_star, a_star, rule)
    return ProjectionResult(a_star, c_star, residual, total, diam < CONVERGED_DIAMETER)


def stability_ratio(u: ScalarField, restarts: int = DEFAULT_RESTARTS,
                    seed: int = DEFAULT_SEED, order=None) -> float:
    """``pi delta*(u) / inf_{a,c} ||u - c exp(a.x)||^2``, a lower witness for kappa."""
    proj = project_to_extremals(u, restarts, seed, order)
    if proj.residual_sq <= MIN_RESIDUAL:
        raise DegenerateInputError(
            f"{u} lies on the extremal manifold (residual {proj.residual_sq:.3g})")
    return math.pi * deficit_star(u, order).deficit / proj.residual_sq
