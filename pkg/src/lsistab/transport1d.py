"""One-dimensional optimal transport between ``f dgamma`` and ``gamma``.

In one dimension the quadratic-cost optimal map is the monotone
rearrangement ``T = G^{-1} o F``, where ``F`` is the distribution function of
``f dgamma`` and ``G`` the standard normal one. Every integral here uses
composite Gauss-Legendre panels on ``[-L, L]``; ``F`` is accumulated panel by
panel, with the mass outside ``[-L, L]`` taken from a log-linear fit of ``f``
at the endpoint, which is exact for tilted Gaussians.

The upper half of the map is computed from the survival function, so that
``T`` keeps full relative accuracy in both tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import log_ndtr, ndtr

from .errors import DensityError, NormalizationError, ParameterError
from .fields import gamma_mixture
from .functionals import InequalityReport, grad_energy, moments
from .measures import MeasureKind, build_rule, gamma_density_to_u
from .scalar import ScalarField

DEFAULT_L = 12.0
DEFAULT_GRID = 1201
MIN_GRID = 64
GL_ORDER = 12
MASS_TOL = 1e-6
DEFECT_TOL = 1e-7
W1_TOL = 1e-6
KINK_FLOOR = 1e-9
# mu-side rule for the Fisher conversion check; resolves mixtures with b <= 4
U_SIDE_ORDER = 200

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


def _phi(x):
    return np.exp(-0.5 * x * x - _LOG_SQRT_2PI)


def norm_cdf(x) -> np.ndarray:
    return ndtr(np.asarray(x, dtype=float))


def norm_ppf(p, tol: float = 1e-12, max_newton: int = 20) -> np.ndarray:
    """Standard normal quantile by bisection-seeded Newton on ``log G``.

    Bisection on ``[-40, 0]`` brings the bracket to ~1e-7; safeguarded Newton
    steps on ``log G(x) - log p`` then finish to ``tol``. Upper-half
    probabilities use the symmetry ``G^{-1}(p) = -G^{-1}(1 - p)``.
    """
    p = np.asarray(p, dtype=float)
    flat = p.reshape(-1)
    out = np.empty_like(flat)
    upper = flat > 0.5
    q = np.where(upper, 1.0 - flat, flat)
    out[q <= 0.0] = -np.inf
    ok = q > 0.0
    x = _lower_ppf(q[ok], tol, max_newton)
    out[ok] = x
    out[upper] = -out[upper]
    return out.reshape(p.shape)


def _lower_ppf(q: np.ndarray, tol: float, max_newton: int) -> np.ndarray:
    lo = np.full_like(q, -40.0)
    hi = np.zeros_like(q)
    logq = np.log(q)
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        below = log_ndtr(mid) < logq
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    x = 0.5 * (lo + hi)
    for _ in range(max_newton):
        lg = log_ndtr(x)
        # d/dx log G = phi / G
        slope = np.exp(-0.5 * x * x - _LOG_SQRT_2PI - lg)
        step = (lg - logq) / slope
        xn = x - step
        inside = (xn >= lo) & (xn <= hi)
        xn = np.where(inside, xn, 0.5 * (lo + hi))
        below = log_ndtr(xn) < logq
        lo = np.where(below, xn, lo)
        hi = np.where(below, hi, xn)
        scale = tol * np.maximum(1.0, np.abs(xn))
        # a rejected step can land back on x; only accepted steps count as converged
        done = (inside & (np.abs(xn - x) <= scale)) | (hi - lo <= scale)
        x = xn
        if done.all():
            break
    return x


class DensityCdf:
    """Distribution and survival functions of ``f dgamma`` on a panel grid."""

    def __init__(self, f: ScalarField, L: float = DEFAULT_L, panels: int = DEFAULT_GRID - 1):
        if f.dim != 1:
            raise ParameterError("transport is one-dimensional; got a field of dim "
                                 f"{f.dim}")
        if f.grad is None:
            raise ParameterError(f"density {f} needs a gradient")
        self.f = f
        self.L = float(L)
        self.edges = np.linspace(-self.L, self.L, panels + 1)
        self.h = self.edges[1] - self.edges[0]
        mids = 0.5 * (self.edges[:-1] + self.edges[1:])
        self.nodes = (mids[:, None] + 0.5 * self.h * _GL_X[None, :])
        self.node_w = 0.5 * self.h * np.broadcast_to(_GL_W, self.nodes.shape)
        fv = self._f(self.nodes.ravel()).reshape(self.nodes.shape)
        if (fv < 0.0).any():
            i = np.unravel_index(np.argmin(fv), fv.shape)
            raise DensityError(f"density {f} is negative ({fv[i]:.3g}) at x = {self.nodes[i]:.6g}")
        self.fvals = fv
        panel_mass = np.sum(self.node_w * fv * _phi(self.nodes), axis=1)
        self.tail_left = self._tail(-self.L, left=True)
        self.tail_right = self._tail(self.L, left=False)
        self.F_edges = self.tail_left + np.concatenate([[0.0], np.cumsum(panel_mass)])
        self.S_edges = self.tail_right + np.concatenate([np.cumsum(panel_mass[::-1])[::-1], [0.0]])
        self.mass = self.F_edges[-1] + self.tail_right
        if abs(self.mass - 1.0) > MASS_TOL:
            raise NormalizationError(f"density {f} has mass {float(self.mass)!r}, expected 1")

    def _f(self, x):
        return self.f.eval(np.asarray(x, dtype=float).reshape(-1, 1))

    def _df(self, x):
        return self.f.grad(np.asarray(x, dtype=float).reshape(-1, 1))[:, 0]

    def _tail_params(self, x0: float):
        f0 = float(self._f(x0)[0])
        s = float(self._df(x0)[0]) / f0 if f0 > 0 else 0.0
        return f0, s

    def _tail(self, x0: float, left: bool, x=None) -> np.ndarray | float:
        # f(x) ~ f0 exp(s (x - x0)) beyond x0; integrate against phi in closed form
        f0, s = self._tail_params(x0)
        if f0 == 0.0:
            return 0.0 if x is None else np.zeros_like(x)
        xe = x0 if x is None else x
        log_scale = math.log(f0) - s * x0 + 0.5 * s * s
        if left:
            return np.exp(log_scale + log_ndtr(np.asarray(xe) - s))
        return np.exp(log_scale + log_ndtr(s - np.asarray(xe)))

    def _partial(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # int_a^b f phi for short intervals, vectorized
        half = 0.5 * (b - a)
        pts = 0.5 * (a + b)[:, None] + half[:, None] * _GL_X[None, :]
        vals = self._f(pts.ravel()).reshape(pts.shape) * _phi(pts)
        return half * (vals @ _GL_W)

    def _locate(self, x: np.ndarray) -> np.ndarray:
        return np.clip(np.searchsorted(self.edges, x, side="right") - 1, 0,
                       len(self.edges) - 2)

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1)
        out = np.empty_like(flat)
        inside = np.abs(flat) <= self.L
        j = self._locate(flat[inside])
        out[inside] = self.F_edges[j] + self._partial(self.edges[j], flat[inside])
        left = flat < -self.L
        out[left] = self._tail(-self.L, True, flat[left])
        right = flat > self.L
        out[right] = self.mass - self._tail(self.L, False, flat[right])
        return out.reshape(x.shape)

    def sf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1)
        out = np.empty_like(flat)
        inside = np.abs(flat) <= self.L
        j = self._locate(flat[inside])
        out[inside] = self.S_edges[j + 1] + self._partial(flat[inside], self.edges[j + 1])
        left = flat < -self.L
        out[left] = self.mass - self._tail(-self.L, True, flat[left])
        right = flat > self.L
        out[right] = self._tail(self.L, False, flat[right])
        return out.reshape(x.shape)

    def transport(self, x) -> np.ndarray:
        """Monotone map ``T = G^{-1}(F(x))``, via the survival function in the upper half."""
        x = np.asarray(x, dtype=float)
        F = self.cdf(x)
        S = self.sf(x)
        lower = F <= S
        return np.where(lower, norm_ppf(np.where(lower, F, 0.5)),
                        -norm_ppf(np.where(lower, 0.5, S)))

    def integrate(self, g: Callable[[np.ndarray], np.ndarray], absolute: bool = False,
                  weight: bool = True) -> float:
        """``int g(x) [f(x) phi(x)] dx`` over ``[-L, L]``.

        With ``absolute=True`` the integrand is ``|g|``; panels where ``g``
        changes sign are split at the root so the kink does not spoil the rule.
        """
        pts = self.nodes
        gv = g(pts.ravel()).reshape(pts.shape)
        dens = self.fvals * _phi(pts) if weight else 1.0
        if not absolute:
            return math.fsum((self.node_w * gv * dens).ravel().tolist())
        ge = g(self.edges)
        sign_change = (np.min(gv, axis=1) < 0.0) & (np.max(gv, axis=1) > 0.0)
        sign_change |= np.sign(ge[:-1]) * np.sign(ge[1:]) < 0.0
        # a kink in round-off noise costs nothing; only split genuine crossings
        sign_change &= np.max(np.abs(gv), axis=1) > KINK_FLOOR
        terms = (self.node_w * np.abs(gv) * dens).copy()
        for j in np.flatnonzero(sign_change):
            terms[j] = 0.0
            terms[j, 0] = self._split_panel(g, j, weight)
        return math.fsum(terms.ravel().tolist())

    def _split_panel(self, g, j: int, weight: bool) -> float:
        a, b = self.edges[j], self.edges[j + 1]
        xs = np.linspace(a, b, 65)
        gs = g(xs)
        cuts = [a]
        for k in range(len(xs) - 1):
            if gs[k] == 0.0:
                continue
            if gs[k] * gs[k + 1] < 0.0:
                cuts.append(brentq(lambda t: float(g(np.array([t]))[0]), xs[k], xs[k + 1],
                                   xtol=1e-15))
        cuts.append(b)
        total = 0.0
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            half = 0.5 * (hi - lo)
            pts = 0.5 * (lo + hi) + half * _GL_X
            vals = np.abs(g(pts))
            if weight:
                vals = vals * self._f(pts) * _phi(pts)
            total += half * float(vals @ _GL_W)
        return total


@dataclass(frozen=True)
class TransportMap1D:
    grid: np.ndarray
    t_values: np.ndarray
    f: ScalarField = field(repr=False)


@dataclass(frozen=True)
class TransportReport1D:
    delta: float
    fisher: float
    entropy: float
    defect_l2: float
    defect_l1: float
    w1: float
    w1_map: float
    w2: float
    bounds: List[InequalityReport]

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in
             ("delta", "fisher", "entropy", "defect_l2", "defect_l1", "w1", "w1_map", "w2")}
        d["bounds"] = [b.to_dict() for b in self.bounds]
        return d


def cdf_pair(f: ScalarField, L: float = DEFAULT_L, grid_size: int = DEFAULT_GRID
             ) -> Tuple[Callable, Callable]:
    """``(F, G)``: distribution functions of ``f dgamma`` and of ``gamma``."""
    cdf = DensityCdf(f, L, grid_size - 1)
    return cdf.cdf, norm_cdf


def brenier_map_1d(f: ScalarField, grid_size: int = DEFAULT_GRID, L: float = DEFAULT_L
                   ) -> TransportMap1D:
    """Monotone rearrangement sampled on ``grid_size`` uniform points of ``[-L, L]``."""
    if grid_size < MIN_GRID:
        raise ParameterError(f"grid_size must be >= {MIN_GRID}, got {grid_size}")
    cdf = DensityCdf(f, L, grid_size - 1)
    grid = cdf.edges.copy()
    t = cdf.transport(grid)
    if np.any(np.diff(t) < 0.0):
        raise DensityError(f"transport map of {f} is not monotone")
    return TransportMap1D(grid, t, f)


def _log_deriv(cdf: DensityCdf):
    def dlog(x):
        fv = cdf._f(x)
        dv = cdf._df(x)
        if (fv <= 0.0).any():
            i = int(np.argmin(fv))
            raise DensityError(f"ln f is singular: f = {fv[i]:.3g} at x = {x[i]:.6g}")
        return dv / fv
    return dlog


def _wasserstein(cdf: DensityCdf) -> Tuple[float, float, float]:
    def cdf_gap(t):
        return cdf.cdf(t) - norm_cdf(t)

    w1 = cdf.integrate(cdf_gap, absolute=True, weight=False)

    def disp(x):
        return cdf.transport(x) - x

    w1_map = cdf.integrate(disp, absolute=True)
    w2 = math.sqrt(max(cdf.integrate(lambda x: disp(x) ** 2), 0.0))
    return w1, w1_map, w2


def wasserstein_1d(f: ScalarField, grid_size: int = DEFAULT_GRID, L: float = DEFAULT_L
                   ) -> Tuple[float, float]:
    """``(W1, W2)`` between ``f dgamma`` and ``gamma``.

    ``W1`` is the area between the distribution functions; the map-based value
    ``int |T - x| f dgamma`` is available from :func:`transport_defect`.
    """
    w1, _, w2 = _wasserstein(DensityCdf(f, L, grid_size - 1))
    return w1, w2


def transport_defect(f: ScalarField, grid_size: int = DEFAULT_GRID, L: float = DEFAULT_L
                     ) -> TransportReport1D:
    """Transport defects of ``f`` and the three bounds they obey.

    Checks ``int |T - x + (ln f)'|^2 f dgamma <= 2 delta(f)``,
    ``int |T - x + (ln f)'| f dgamma <= sqrt(2 delta(f))`` and
    ``W1 <= sqrt(2 delta(f)) + sqrt(I(f))``.
    """
    cdf = DensityCdf(f, L, grid_size - 1)
    dlog = _log_deriv(cdf)
    fisher = cdf.integrate(lambda x: dlog(x) ** 2)
    entropy = cdf.integrate(lambda x: np.log(cdf._f(x)))
    delta = 0.5 * fisher - entropy

    def resid(x):
        return cdf.transport(x) - x + dlog(x)

    d2 = cdf.integrate(lambda x: resid(x) ** 2)
    d1 = cdf.integrate(resid, absolute=True)
    w1, w1_map, w2 = _wasserstein(cdf)
    root2d = math.sqrt(max(2.0 * delta, 0.0))
    bounds = [
        InequalityReport.of(d2, 2.0 * delta, DEFECT_TOL, "defect_l2<=2delta"),
        InequalityReport.of(d1, root2d, DEFECT_TOL, "defect_l1<=sqrt(2delta)"),
        InequalityReport.of(w1, root2d + math.sqrt(max(fisher, 0.0)), W1_TOL,
                            "w1<=sqrt(2delta)+sqrt(I)"),
    ]
    return TransportReport1D(delta, fisher, entropy, d2, d1, w1, w1_map, w2, bounds)


def w1_upper_bound_check(f: ScalarField, grid_size: int = DEFAULT_GRID, L: float = DEFAULT_L,
                         tol: float = W1_TOL) -> InequalityReport:
    """``W1(f dgamma, gamma) <= sqrt(2 delta(f)) + sqrt(I(f))``."""
    rep = transport_defect(f, grid_size, L)
    b = rep.bounds[2]
    return InequalityReport.of(b.lhs, b.rhs, tol, b.name)


@dataclass(frozen=True)
class BlowupRow:
    eps: float
    b: float
    delta: float
    fisher: float
    w1: float
    grad_energy_mu: float
    m2_mu: float
    report: TransportReport1D = field(repr=False)

    FIELDS = ("eps", "b", "delta", "fisher", "w1", "grad_energy_mu", "m2_mu")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.FIELDS}

    @property
    def holds(self) -> bool:
        return all(b.holds for b in self.report.bounds)


def blowup_scan(eps_grid: Sequence[float], b_grid: Sequence[float],
                grid_size: int = DEFAULT_GRID, L: float = DEFAULT_L) -> List[BlowupRow]:
    """One row per ``(eps, b)`` for the mixture ``(1-eps) N(0,1) + eps N(b,1)``.

    ``grad_energy_mu`` and ``m2_mu`` are computed on the ``mu`` side from
    ``u(x) = sqrt(f(sqrt(2 pi) x))``; ``grad_energy_mu`` should equal
    ``(pi/2) fisher``.
    """
    rule = build_rule(1, U_SIDE_ORDER)
    rows = []
    for eps in eps_grid:
        for b in b_grid:
            f = gamma_mixture(eps, b)
            rep = transport_defect(f, grid_size, L)
            u = gamma_density_to_u(f)
            ge = grad_energy(u, MeasureKind.mu(1), rule)
            m2 = moments(u, MeasureKind.mu(1), rule).m2
            rows.append(BlowupRow(float(eps), float(b), rep.delta, rep.fisher, rep.w1,
                                  ge, m2, rep))
    return rows
