"""Closed forms for the Gaussian trial family ``u_a`` and the limit of its ratio.

For ``u_a(x) = (2a+1)^(n/4) exp(-a pi |x|^2)``:

    pi delta*(u_a)      = pi (2na^2/(2a+1) - (n/2) ln(2a+1) + na/(2a+1))
    int |u_a - 1|^2 dmu = 2 - 2 (2a+1)^(n/4) / (a+1)^(n/2)

Both vanish like ``a^2``; below ``A_SWITCH`` they are summed from their
Taylor series instead, and the ratio tends to ``2 pi`` as ``a -> 0+``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence

from .errors import ParameterError
from .fields import gaussian_trial
from .functionals import deficit_star, norm_sq
from .measures import MeasureKind, build_rule, integrate_values
from .reduce import IdentityReport

A_SWITCH = 1e-2

# Taylor coefficients of a^2 .. a^9, exact rationals from sympy.series of
#   N(a) = 2na^2/(2a+1) - (n/2) ln(2a+1) + na/(2a+1)
#   D(a) = 2 - 2 (2a+1)^(n/4) / (a+1)^(n/2)
# Regenerate with tests/test_sharpness.py::test_series_coefficients_match_symbolic;
# tests also compare the summed series against 50-digit mpmath evaluation.
_F = Fraction
_NUM_SERIES = {
    n: [n * _F((-2) ** k, 2 * k) for k in range(2, 10)] for n in (1, 2, 3)
}
_DEN_SERIES = {
    1: [_F(1, 2), _F(-1), _F(27, 16), _F(-11, 4), _F(287, 64), _F(-237, 32),
        _F(12733, 1024), _F(-2717, 128)],
    2: [_F(1), _F(-2), _F(13, 4), _F(-5), _F(61, 8), _F(-47, 4), _F(1181, 64),
        _F(-237, 8)],
    3: [_F(3, 2), _F(-3), _F(75, 16), _F(-27, 4), _F(605, 64), _F(-423, 32),
        _F(19197, 1024), _F(-3485, 128)],
}
NUM_SERIES = {n: tuple(float(c) for c in cs) for n, cs in _NUM_SERIES.items()}
DEN_SERIES = {n: tuple(float(c) for c in cs) for n, cs in _DEN_SERIES.items()}

# quadrature orders at which u_a, a <= 2, is resolved to ~1e-11
REFERENCE_ORDER = {1: 120, 2: 100, 3: 80}


class Branch(enum.Enum):
    DIRECT = "Direct"
    SERIES = "Series"


@dataclass(frozen=True)
class SharpnessRow:
    a: float
    n: int
    pi_deficit: float
    dist_sq_to_one: float
    ratio: float
    branch: Branch

    def to_dict(self) -> dict:
        return {"a": self.a, "n": self.n, "pi_deficit": self.pi_deficit,
                "dist_sq": self.dist_sq_to_one, "ratio": self.ratio,
                "branch": self.branch.value}


def _check(a: float, n: int):
    if not a > 0:
        raise ParameterError(f"trial width must be positive, got a={a}")
    if n not in (1, 2, 3):
        raise ParameterError(f"dimension must lie in 1..3, got n={n}")


def _poly(coefs: Sequence[float], a: float) -> float:
    # Horner over a^0 .. a^(k-1); callers supply the a^2 factor
    acc = 0.0
    for c in reversed(coefs):
        acc = acc * a + c
    return acc


def pi_deficit_direct(a: float, n: int) -> float:
    return math.pi * (2 * n * a * a / (2 * a + 1) - 0.5 * n * math.log(2 * a + 1)
                      + n * a / (2 * a + 1))


def dist_sq_direct(a: float, n: int) -> float:
    return 2.0 - 2.0 * (2 * a + 1) ** (n / 4) / (a + 1) ** (n / 2)


def ratio_direct(a: float, n: int) -> float:
    num = 2 * n * a * a - 0.5 * n * (2 * a + 1) * math.log(2 * a + 1) + n * a
    den = 2 * a + 1 - (2 * a + 1) ** ((n + 4) / 4) / (a + 1) ** (n / 2)
    return 0.5 * math.pi * num / den


def trial_closed_forms(a: float, n: int = 1, a_switch: float = A_SWITCH) -> SharpnessRow:
    """Deficit, squared distance to 1 and their ratio for ``u_a`` in dimension ``n``."""
    _check(a, n)
    a = float(a)
    if a < a_switch:
        num = _poly(NUM_SERIES[n], a)
        den = _poly(DEN_SERIES[n], a)
        return SharpnessRow(a, n, math.pi * num * a * a, den * a * a, math.pi * num / den,
                            Branch.SERIES)
    return SharpnessRow(a, n, pi_deficit_direct(a, n), dist_sq_direct(a, n),
                        ratio_direct(a, n), Branch.DIRECT)


def quadrature_cross_check(a: float, n: int = 1, order=None) -> List[IdentityReport]:
    """Closed-form deficit and distance against direct quadrature of ``u_a``."""
    _check(a, n)
    rule = build_rule(n, order if order is not None else REFERENCE_ORDER[n])
    row = trial_closed_forms(a, n)
    u = gaussian_trial(a, n)
    pd = math.pi * deficit_star(u, rule).deficit
    dist = integrate_values(lambda x: (u.eval(x) - 1.0) ** 2, MeasureKind.mu(n), rule)
    return [
        IdentityReport.of("pi_deficit", row.pi_deficit, pd),
        IdentityReport.of("dist_sq", row.dist_sq_to_one, dist),
        IdentityReport.of("norm_sq", 1.0, norm_sq(u, MeasureKind.mu(n), rule)),
    ]


def ratio_scan(a_grid: Sequence[float], n: int = 1) -> List[SharpnessRow]:
    for a in a_grid:
        if not a > 0:
            raise ParameterError(f"scan grid entries must be positive, got {a}")
    return [trial_closed_forms(a, n) for a in a_grid]


def modulus_probe(p: float, a_grid: Sequence[float], n: int = 1) -> List[tuple]:
    """``(a, (pi delta*(u_a))^p / ||u_a - 1||^2)`` for a power modulus ``d -> d^p``.

    For ``p > 1`` the probe tends to 0 as ``a -> 0+``, so no such modulus can
    bound the distance with a positive constant.
    """
    if not p > 1:
        raise ParameterError(f"exponent must exceed 1, got p={p}")
    out = []
    for a in a_grid:
        row = trial_closed_forms(a, n)
        out.append((row.a, row.pi_deficit**p / row.dist_sq_to_one))
    return out


@dataclass(frozen=True)
class KappaSample:
    """Deficit and distance of an arbitrary field, for use in :func:`empirical_kappa`."""

    label: str
    pi_deficit: float
    dist_sq_to_one: float

    @property
    def ratio(self) -> float:
        return self.pi_deficit / self.dist_sq_to_one


def _row_ratio(r) -> float:
    if isinstance(r, SharpnessRow) and r.branch is Branch.SERIES:
        return r.ratio
    return r.pi_deficit / r.dist_sq_to_one


def empirical_kappa(rows: Sequence, projections=None) -> float:
    """Smallest observed ``pi delta / distance`` over the rows.

    ``rows`` holds :class:`SharpnessRow` or :class:`KappaSample` values.
    ``projections``, if given, is a sequence of projection results (or bare
    residuals) aligned with ``rows``; their residuals replace the distance to 1.
    """
    if not rows:
        raise ParameterError("empirical_kappa needs at least one row")
    if projections is None:
        return min(_row_ratio(r) for r in rows)
    if len(projections) != len(rows):
        raise ParameterError("projections must align with rows")
    vals = []
    for r, p in zip(rows, projections):
        res = getattr(p, "residual_sq", p)
        vals.append(r.pi_deficit / res)
    return min(vals)
