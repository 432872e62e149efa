"""Norms, moments, entropies, Fisher information, deficits and inequality checks.

Three deficit variants are provided, one per Gaussian normalization:

* ``StarMu``  on ``exp(-pi|x|^2)dx``: ``(1/pi) int |grad u|^2 - int |u|^2 ln(|u|^2/||u||^2)``
* ``CMassM``  on ``dm``:              ``(1/(2pi)) int |grad w|^2 - int |w|^2 ln(|w|^2/||w||^2)``
* ``Gamma``   on ``dgamma``:          ``I(f)/2 - H(f)`` for a density ``f``

The entropy term always divides by the numerically computed norm, so reports
stay meaningful for slightly denormalized inputs. ``0 ln 0`` is taken as 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import List

import numpy as np

from .errors import DegenerateInputError, DensityError, NormalizationError, PreconditionError
from .measures import MeasureKind, QuadratureRule, build_rule, integrate_values
from .scalar import ScalarField

DEFAULT_TOL = 1e-9
DEFAULT_KAPPA = 2.0 * math.pi
NORMALIZATION_TOL = 1e-8


class Variant(enum.Enum):
    STAR_MU = "StarMu"
    C_MASS_M = "CMassM"
    GAMMA = "Gamma"


@dataclass(frozen=True)
class DeficitReport:
    grad_term: float
    entropy_term: float
    deficit: float
    variant: Variant
    norm_sq: float
    m2: float
    m4: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        return d


@dataclass(frozen=True)
class InequalityReport:
    """``lhs <= rhs`` up to ``tol``; ``slack = rhs - lhs``."""

    lhs: float
    rhs: float
    slack: float
    holds: bool
    tol: float
    name: str = ""

    @classmethod
    def of(cls, lhs: float, rhs: float, tol: float = DEFAULT_TOL, name: str = ""):
        slack = rhs - lhs
        return cls(float(lhs), float(rhs), float(slack), bool(slack >= -tol), float(tol), name)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MomentVector:
    m2: float
    m4: float
    center: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {"m2": self.m2, "m4": self.m4, "center": [float(c) for c in self.center]}


def _rule(dim: int, order) -> QuadratureRule:
    return order if isinstance(order, QuadratureRule) else build_rule(dim, order)


def _require_grad(u: ScalarField):
    if u.grad is None:
        raise DegenerateInputError(f"field {u} carries no gradient; attach one with "
                                   "finite_diff_gradient")


def xlogx(s: np.ndarray) -> np.ndarray:
    """``s ln s`` with ``0 ln 0 = 0``."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0.0
    out[pos] = s[pos] * np.log(s[pos])
    return out


# -- basic integrals ---------------------------------------------------------

def norm_sq(u: ScalarField, kind: MeasureKind | None = None, order=None) -> float:
    kind = kind or MeasureKind.mu(u.dim)
    return integrate_values(lambda x: u.eval(x) ** 2, kind, _rule(u.dim, order), f"|{u}|^2")


def grad_energy(u: ScalarField, kind: MeasureKind | None = None, order=None) -> float:
    """``int |grad u|^2`` against ``kind`` (default ``mu``)."""
    _require_grad(u)
    kind = kind or MeasureKind.mu(u.dim)
    return integrate_values(lambda x: np.sum(u.grad(x) ** 2, axis=1), kind,
                            _rule(u.dim, order), f"|grad {u}|^2")


def entropy_term(u: ScalarField, kind: MeasureKind | None = None, order=None,
                 normalize: bool = True) -> float:
    """``int |u|^2 ln(|u|^2 / ||u||^2)``; with ``normalize=False`` the norm is dropped."""
    kind = kind or MeasureKind.mu(u.dim)
    rule = _rule(u.dim, order)
    nsq = norm_sq(u, kind, rule) if normalize else 1.0
    if nsq <= 0.0:
        raise DegenerateInputError(f"field {u} has zero norm")
    # int |u|^2 ln(|u|^2/N) = N int s ln s with s = |u|^2 / N
    val = integrate_values(lambda x: xlogx(u.eval(x) ** 2 / nsq), kind, rule,
                           f"entropy of {u}")
    return nsq * val


def moments(u: ScalarField, kind: MeasureKind | None = None, order=None) -> MomentVector:
    """Second and fourth moments and center of mass of ``|u|^2`` against ``kind``."""
    kind = kind or MeasureKind.mu(u.dim)
    rule = _rule(u.dim, order)
    pts = rule.points(kind)
    u2 = u.eval(pts) ** 2
    r2 = np.sum(pts * pts, axis=1)
    w = rule.weights
    m2 = integrate_values(lambda x: r2 * u2, kind, rule)
    m4 = integrate_values(lambda x: r2 * r2 * u2, kind, rule)
    center = np.array([math.fsum((w * pts[:, i] * u2).tolist()) for i in range(u.dim)])
    return MomentVector(m2, m4, center)


# -- deficits ----------------------------------------------------------------

def _deficit_mu_like(u: ScalarField, kind: MeasureKind, order, grad_scale: float,
                     variant: Variant) -> DeficitReport:
    _require_grad(u)
    rule = _rule(u.dim, order)
    nsq = norm_sq(u, kind, rule)
    if not nsq > 0.0:
        raise DegenerateInputError(f"field {u} has zero norm")
    g = grad_energy(u, kind, rule)
    ent = entropy_term(u, kind, rule)
    mom = moments(u, kind, rule)
    return DeficitReport(g, ent, grad_scale * g - ent, variant, nsq, mom.m2, mom.m4)


def deficit_star(u: ScalarField, order=None) -> DeficitReport:
    """Deficit on ``exp(-pi|x|^2)dx``: ``(1/pi) int |grad u|^2 - int |u|^2 ln(|u|^2/||u||^2)``."""
    return _deficit_mu_like(u, MeasureKind.mu(u.dim), order, 1.0 / math.pi, Variant.STAR_MU)


def deficit_c(w: ScalarField, order=None) -> DeficitReport:
    """Deficit on ``dm = 2^(n/2) exp(-2 pi |x|^2) dx``."""
    return _deficit_mu_like(w, MeasureKind.m(w.dim), order, 0.5 / math.pi, Variant.C_MASS_M)


def _fisher_integrand(f: ScalarField):
    def integrand(x):
        fv = f.eval(x)
        g2 = np.sum(f.grad(x) ** 2, axis=1)
        neg = fv < -1e-12
        if neg.any():
            i = int(np.flatnonzero(neg)[0])
            raise DensityError(f"density {f} is negative ({fv[i]:.3g}) at {x[i].tolist()}")
        zero = fv <= 0.0
        if (zero & (g2 > 0.0)).any():
            i = int(np.flatnonzero(zero & (g2 > 0.0))[0])
            raise DensityError(f"Fisher integrand of {f} is singular at {x[i].tolist()}")
        out = np.zeros_like(fv)
        out[~zero] = g2[~zero] / fv[~zero]
        return out
    return integrand


def fisher_information(f: ScalarField, order=None) -> float:
    """``I(f) = int |grad f|^2 / f dgamma``."""
    _require_grad(f)
    return integrate_values(_fisher_integrand(f), MeasureKind.gamma(f.dim),
                            _rule(f.dim, order), f"Fisher integrand of {f}")


def relative_entropy(f: ScalarField, order=None) -> float:
    """``H(f) = int f ln f dgamma``."""
    return integrate_values(lambda x: xlogx(np.maximum(f.eval(x), 0.0)),
                            MeasureKind.gamma(f.dim), _rule(f.dim, order), f"f ln f of {f}")


def deficit_gamma(f: ScalarField, order=None) -> DeficitReport:
    """``delta(f) = I(f)/2 - H(f)`` for a probability density ``f`` relative to ``gamma``.

    ``grad_term`` holds the Fisher information ``I(f)`` and ``entropy_term``
    holds ``H(f)``.
    """
    _require_grad(f)
    kind = MeasureKind.gamma(f.dim)
    rule = _rule(f.dim, order)
    pts = rule.points(kind)
    fv = f.eval(pts)
    if (fv < -1e-12).any():
        i = int(np.argmin(fv))
        raise DensityError(f"density {f} is negative ({fv[i]:.3g}) at {pts[i].tolist()}")
    mass = integrate_values(f.eval, kind, rule, str(f))
    if abs(mass - 1.0) > 1e-6:
        raise NormalizationError(f"density {f} has mass {mass!r}, expected 1")
    fisher = fisher_information(f, rule)
    ent = relative_entropy(f, rule)
    r2 = np.sum(pts * pts, axis=1)
    m2 = integrate_values(lambda x: r2 * f.eval(x), kind, rule)
    m4 = integrate_values(lambda x: r2 * r2 * f.eval(x), kind, rule)
    return DeficitReport(fisher, ent, 0.5 * fisher - ent, Variant.GAMMA, mass, m2, m4)


def entropy_fisher_ratio(f: ScalarField, order=None) -> float:
    """``H(f) / I(f)``; at most 1/2 by the log-Sobolev inequality."""
    rep = deficit_gamma(f, order)
    if rep.grad_term <= 1e-14:
        raise DegenerateInputError(
            f"Fisher information of {f} is {rep.grad_term:.3g}; the ratio is undefined")
    return rep.entropy_term / rep.grad_term


def h1_distance_to_one(u: ScalarField, order=None) -> float:
    """``|| |u| - 1 ||`` in ``H^1(exp(-pi|x|^2)dx)``."""
    rule = _rule(u.dim, order)
    kind = MeasureKind.mu(u.dim)
    l2 = integrate_values(lambda x: (np.abs(u.eval(x)) - 1.0) ** 2, kind, rule)
    return math.sqrt(l2 + grad_energy(u, kind, rule))


# -- inequality checks for normalized, centered fields ------------------------

def _require_normalized(u: ScalarField, rep: DeficitReport, rule, tol=NORMALIZATION_TOL):
    if abs(rep.norm_sq - 1.0) > tol:
        raise NormalizationError(f"||{u}||^2 = {rep.norm_sq!r}; a normalized field is required")
    center = moments(u, MeasureKind.mu(u.dim), rule).center
    if np.max(np.abs(center)) > tol:
        raise NormalizationError(f"{u} has center {center.tolist()}; a centered field is required")


def _sqrt0(x: float) -> float:
    return math.sqrt(max(x, 0.0))


def check_al_sj(u: ScalarField, tol: float = DEFAULT_TOL, order=None) -> InequalityReport:
    """Moment/gradient control by the deficit.

    ``pi m2(1) - pi m2(u) + (1/pi) int |grad u|^2 <= sqrt(2n) delta^(1/2) + delta``
    """
    rule = _rule(u.dim, order)
    rep = deficit_star(u, rule)
    _require_normalized(u, rep, rule)
    n = u.dim
    m2_one = MeasureKind.mu(n).second_moment()
    lhs = math.pi * m2_one - math.pi * rep.m2 + rep.grad_term / math.pi
    d = rep.deficit
    rhs = math.sqrt(2.0 * n) * _sqrt0(d) + d
    return InequalityReport.of(lhs, rhs, tol, "al_sj")


def check_alw(u: ScalarField, tol: float = DEFAULT_TOL, order=None) -> InequalityReport:
    """``(1/4n) (2 int |u|^2 ln|u|^2 + 2 pi m2(1) - 2 pi m2(u))^2 <= delta``."""
    rule = _rule(u.dim, order)
    rep = deficit_star(u, rule)
    _require_normalized(u, rep, rule)
    n = u.dim
    m2_one = MeasureKind.mu(n).second_moment()
    ent = entropy_term(u, MeasureKind.mu(n), rule, normalize=False)
    lhs = (2.0 * ent + 2.0 * math.pi * (m2_one - rep.m2)) ** 2 / (4.0 * n)
    return InequalityReport.of(lhs, rep.deficit, tol, "alw")


def moment_chain_constant(A: float, kappa: float, n: int) -> float:
    """The constant ``a`` in ``|| |u|-1 ||_{H^1} <= a (delta^(1/2) + delta)^(1/2)``.

    Assembled from the two chain links: with ``C = pi sqrt(2(A + m4(1)))``,
    ``int |grad u|^2 <= pi max(C sqrt(pi/kappa) + sqrt(2n), 1) (delta^(1/2) + delta)``
    and ``int (|u|-1)^2 <= (pi/kappa) delta``.
    """
    m4_one = MeasureKind.mu(n).fourth_moment()
    c = math.pi * math.sqrt(2.0 * (A + m4_one))
    grad_coef = math.pi * max(c * math.sqrt(math.pi / kappa) + math.sqrt(2.0 * n), 1.0)
    return math.sqrt(math.pi / kappa + grad_coef)


def check_moment_bound(u: ScalarField, A: float = 1.0, kappa: float = DEFAULT_KAPPA,
                       tol: float = DEFAULT_TOL, order=None) -> List[InequalityReport]:
    """The three links of the fourth-moment ``H^1`` bound, one report each.

    (i)   ``|pi m2(1) - pi m2(u)| <= pi sqrt(2(A + m4(1))) || 1 - |u| ||``
    (ii)  ``(1/pi) int |grad u|^2 <= (pi sqrt(2(A+m4(1))) sqrt(pi/kappa) + sqrt(2n)) delta^(1/2) + delta``
    (iii) ``|| |u| - 1 ||_{H^1} <= a (delta^(1/2) + delta)^(1/2)`` with ``a`` from
          :func:`moment_chain_constant`.
    """
    if not kappa > 0:
        raise PreconditionError(f"kappa must be positive, got {kappa}")
    rule = _rule(u.dim, order)
    kind = MeasureKind.mu(u.dim)
    rep = deficit_star(u, rule)
    _require_normalized(u, rep, rule)
    if rep.m4 > A:
        raise PreconditionError(f"m4({u}) = {rep.m4!r} exceeds the bound A = {A!r}")
    n = u.dim
    m2_one, m4_one = kind.second_moment(), kind.fourth_moment()
    c = math.pi * math.sqrt(2.0 * (A + m4_one))
    dist_sq = integrate_values(lambda x: (1.0 - np.abs(u.eval(x))) ** 2, kind, rule)
    d = rep.deficit
    link1 = InequalityReport.of(abs(math.pi * (m2_one - rep.m2)), c * _sqrt0(dist_sq), tol,
                                "moment_link_i")
    link2 = InequalityReport.of(
        rep.grad_term / math.pi,
        (c * math.sqrt(math.pi / kappa) + math.sqrt(2.0 * n)) * _sqrt0(d) + d,
        tol, "moment_link_ii")
    a_const = moment_chain_constant(A, kappa, n)
    link3 = InequalityReport.of(math.sqrt(dist_sq + rep.grad_term),
                                a_const * _sqrt0(_sqrt0(d) + d), tol, "moment_link_iii")
    return [link1, link2, link3]
