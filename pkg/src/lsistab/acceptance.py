"""Acceptance criteria as executable checks.

Each ``criterion_*`` function returns a :class:`CriterionResult`; :func:`run_all`
evaluates them in order. Tolerances are fixed per criterion and do not follow
the command-line ``--tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import mpmath
import numpy as np

from .fields import constant, exp_tilt, gamma_tilt, gaussian_trial, hermite_perturb, shift_tilt
from .functionals import (DEFAULT_KAPPA, check_al_sj, check_alw, check_moment_bound,
                          deficit_star, norm_sq)
from .measures import DEFAULT_ORDER, MeasureKind, build_rule, integrate_values
from .project import DEFAULT_SEED, project_to_extremals
from .reduce import reduce_to_normalized, verify_reduction_identities
from .scalar import ScalarField
from .sharpness import (REFERENCE_ORDER, KappaSample, empirical_kappa, quadrature_cross_check,
                        ratio_scan, trial_closed_forms)
from .transport1d import blowup_scan, transport_defect

TRIAL_GRID = (0.1, 0.5, 1.0, 2.0)
HERMITE_GRID = tuple((k, eps) for k in (2, 3, 4) for eps in (0.01, 0.05, 0.1))
KAPPA_TRIAL_GRID = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0)
N_RANDOM_FIELDS = 50
N_EXTREMALS = 20
KAPPA_MARGIN = 1e-2


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} [{self.number:2d}] {self.title}: {self.detail}"


def hermite_field(k: int, eps: float) -> ScalarField:
    # odd degrees change sign at the outer nodes; every check uses |u|^2 and |grad u|^2
    return hermite_perturb(k, eps, check_positive=(k % 2 == 0))


def random_shift_tilts(count: int = N_RANDOM_FIELDS, seed: int = DEFAULT_SEED) -> List[ScalarField]:
    """Seeded random fields ``s u(x - x0) exp(a.x)`` over the built-in base families."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        dim = 1 if i % 3 else 2
        kind = int(rng.integers(3))
        if kind == 0:
            base = gaussian_trial(float(rng.uniform(0.1, 1.0)), dim)
        elif kind == 1 and dim == 1:
            base = hermite_perturb(int(rng.choice([2, 4])), float(rng.uniform(0.01, 0.1)))
        else:
            base = constant(1.0, dim)
        x0 = rng.uniform(-0.5, 0.5, dim)
        a = rng.uniform(-0.8, 0.8, dim)
        s = float(rng.uniform(0.5, 2.0))
        out.append(shift_tilt(base, x0, a, s))
    return out


def _worst(reports, attr="abs_err"):
    return max(getattr(r, attr) for r in reports)


def criterion_1() -> CriterionResult:
    errs = []
    ok = True
    for n in (1, 2, 3):
        kind = MeasureKind.mu(n)
        rule = build_rule(n)
        tol = 1e-12 if n <= 2 else 1e-10
        mass = integrate_values(lambda x: np.ones(len(x)), kind, rule)
        m2 = integrate_values(lambda x: np.sum(x * x, axis=1), kind, rule)
        m4 = integrate_values(lambda x: np.sum(x * x, axis=1) ** 2, kind, rule)
        err = max(abs(mass - 1.0), abs(m2 - n / (2 * math.pi)),
                  abs(m4 - n * (n + 2) / (4 * math.pi**2)))
        ok &= err <= tol
        errs.append(f"n={n} err={err:.2e}")
    return CriterionResult(1, "quadrature exactness", ok, ", ".join(errs))


def criterion_2() -> CriterionResult:
    worst = 0.0
    for n in (1, 2, 3):
        for a in TRIAL_GRID:
            reps = [r for r in quadrature_cross_check(a, n) if r.name in ("pi_deficit", "dist_sq")]
            worst = max(worst, _worst(reps))
    return CriterionResult(2, "closed forms vs quadrature", worst <= 1e-9,
                           f"max abs err {worst:.2e} (tol 1e-9)")


def series_oracle_ratio(a: float, n: int = 1, dps: int = 50) -> float:
    """High-precision direct evaluation of the trial-family ratio."""
    with mpmath.workdps(dps):
        a_ = mpmath.mpf(a)
        num = 2 * n * a_**2 / (2 * a_ + 1) - n * mpmath.log(2 * a_ + 1) / 2 + n * a_ / (2 * a_ + 1)
        den = 2 - 2 * (2 * a_ + 1) ** (mpmath.mpf(n) / 4) / (a_ + 1) ** (mpmath.mpf(n) / 2)
        return float(mpmath.pi * num / den)


def criterion_3() -> CriterionResult:
    rows = ratio_scan([0.2, 0.1, 0.05, 0.02, 0.01], 1)
    ratios = [r.ratio for r in rows]
    decreasing = all(x > y for x, y in zip(ratios, ratios[1:]))
    a = 1e-3
    row = trial_closed_forms(a, 1)
    oracle = series_oracle_ratio(a, 1)
    e_pred = abs(row.ratio - 2 * math.pi * (1 + 2 * a / 3))
    e_lim = abs(row.ratio - 2 * math.pi)
    e_oracle = abs(row.ratio - oracle)
    ok = decreasing and row.branch.value == "Series" and e_pred <= 1e-5 and e_lim <= 5e-3 \
        and e_oracle <= 1e-12
    return CriterionResult(
        3, "sharp-rate limit", ok,
        f"decreasing={decreasing}, ratio(1e-3)={row.ratio:.12f}, |-2pi(1+2a/3)|={e_pred:.2e}, "
        f"|-2pi|={e_lim:.2e}, |-oracle|={e_oracle:.2e}")


def _idempotency_error(u: ScalarField) -> float:
    rule = build_rule(u.dim)
    w1 = reduce_to_normalized(u, rule).w
    red2 = reduce_to_normalized(w1, rule)
    pts = rule.points(MeasureKind.mu(u.dim))
    err = float(np.max(np.abs(red2.w.eval(pts) - w1.eval(pts))))
    return max(err, abs(red2.norm - 1.0), float(np.max(np.abs(red2.alpha))))


def criterion_4(seed: int = DEFAULT_SEED) -> CriterionResult:
    fields = random_shift_tilts(N_RANDOM_FIELDS, seed)
    worst_id = max(_worst(verify_reduction_identities(u)) for u in fields)
    worst_idem = max(_idempotency_error(u) for u in fields)
    ok = worst_id <= 1e-7 and worst_idem <= 1e-9
    return CriterionResult(4, "reduction identities", ok,
                           f"{len(fields)} fields, identity err {worst_id:.2e} (tol 1e-7), "
                           f"idempotency err {worst_idem:.2e} (tol 1e-9)")


def grid_search_projection(u: ScalarField, lo: float = -1.0, hi: float = 1.0,
                           steps: int = 2001):
    """Dense 1-D scan of ``||u||^2 - c*(a)^2 exp(a^2/pi)``; returns ``(a, value)``."""
    rule = build_rule(1)
    pts = rule.points(MeasureKind.mu(1))
    uw = rule.weights * u.eval(pts)
    nsq = norm_sq(u, MeasureKind.mu(1), rule)
    grid = np.linspace(lo, hi, steps)
    t = np.exp(np.outer(grid, pts[:, 0])) @ uw
    vals = nsq - t * t * np.exp(-grid**2 / math.pi)
    i = int(np.argmin(vals))
    return float(grid[i]), float(vals[i])


def criterion_5(seed: int = DEFAULT_SEED) -> CriterionResult:
    rng = np.random.default_rng(seed + 5)
    worst = 0.0
    for i in range(N_EXTREMALS):
        dim = 1 + i % 2
        u = exp_tilt(float(rng.uniform(0.5, 2.0)), rng.uniform(-1.0, 1.0, dim), dim)
        worst = max(worst, project_to_extremals(u, seed=seed).residual_sq)
    u1 = gaussian_trial(1.0, 1)
    proj = project_to_extremals(u1, seed=seed)
    target = 1.0 - math.sqrt(3.0) / 2.0
    e_res = abs(proj.residual_sq - target)
    e_a = float(np.max(np.abs(proj.a_star)))
    a_grid, v_grid = grid_search_projection(u1)
    ok = worst <= 1e-9 and e_res <= 1e-8 and e_a <= 1e-6 and abs(a_grid) <= 1e-3 \
        and abs(v_grid - proj.residual_sq) <= 1e-8
    return CriterionResult(
        5, "projection", ok,
        f"extremal residual max {worst:.2e}, u_1 residual err {e_res:.2e}, |a*|={e_a:.2e}, "
        f"grid oracle a={a_grid:.3g} value err {abs(v_grid - proj.residual_sq):.2e}")


def _trial_fields():
    for n in (1, 2, 3):
        for a in TRIAL_GRID:
            yield gaussian_trial(a, n), REFERENCE_ORDER[n]


def _hermite_fields():
    for k, eps in HERMITE_GRID:
        yield hermite_field(k, eps), DEFAULT_ORDER[1]


def _reduced_fields(seed: int, count: int = 10):
    for u in random_shift_tilts(count, seed):
        rule = build_rule(u.dim)
        yield reduce_to_normalized(u, rule).w, rule


def u1_worked_values():
    """Closed forms for ``u_1`` in one dimension.

    Returns ``(al_sj lhs, al_sj rhs, alw lhs, alw rhs, link (i) rhs)``; ``delta*(u_1) =
    1 - ln(3)/2`` and ``int (1 - u_1)^2 dmu = 2 - 2^(1/2) 3^(1/4)``.
    """
    ln3 = math.log(3.0)
    d = 1.0 - 0.5 * ln3
    al_rhs = math.sqrt(2.0) * math.sqrt(d) + d
    m4_one = 3.0 / (4.0 * math.pi**2)
    dist = 2.0 - math.sqrt(2.0) * 3.0**0.25
    link1_rhs = math.pi * math.sqrt(2.0 * (1.0 + m4_one)) * math.sqrt(dist)
    return 1.0, al_rhs, ln3**2 / 4.0, d, link1_rhs


def criterion_6(seed: int = DEFAULT_SEED) -> CriterionResult:
    worst = math.inf
    count = 0
    viol = []
    for u, order in (*_trial_fields(), *_hermite_fields(), *_reduced_fields(seed)):
        for rep in (check_al_sj(u, order=order), check_alw(u, order=order)):
            worst = min(worst, rep.slack)
            count += 1
            if rep.slack < -1e-9:
                viol.append(f"{rep.name} on {u} ({rep.slack:.3g})")
    u1 = gaussian_trial(1.0, 1)
    got = check_al_sj(u1), check_alw(u1)
    want = u1_worked_values()
    e_worked = max(abs(got[0].lhs - want[0]), abs(got[0].rhs - want[1]),
                   abs(got[1].lhs - want[2]), abs(got[1].rhs - want[3]))
    ok = worst >= -1e-9 and e_worked <= 1e-6
    return CriterionResult(6, "moment and entropy inequalities", ok,
                           f"{count} checks, min slack {worst:.3g}, u_1 worked-value err "
                           f"{e_worked:.2e} (tol 1e-6); violations: "
                           f"{'; '.join(viol) if viol else 'none'}")


def criterion_7(kappa: float = DEFAULT_KAPPA) -> CriterionResult:
    worst = math.inf
    count = 0
    for u, order in (*_trial_fields(), *_hermite_fields()):
        for rep in check_moment_bound(u, A=1.0, kappa=kappa, order=order):
            worst = min(worst, rep.slack)
            count += 1
    link1 = check_moment_bound(gaussian_trial(1.0, 1), A=1.0, kappa=kappa)[0]
    e_worked = abs(link1.rhs - u1_worked_values()[4])
    ok = worst >= -1e-9 and e_worked <= 1e-5
    return CriterionResult(7, "fourth-moment chain", ok,
                           f"{count} links, min slack {worst:.3g}, u_1 link (i) rhs "
                           f"{link1.rhs:.10f} err {e_worked:.2e} (tol 1e-5)")


def criterion_8() -> CriterionResult:
    worst = {"delta": 0.0, "defect_l2": 0.0, "w": 0.0, "slack": 0.0}
    for b in (0.5, 1.0, 1.5, 2.0):
        rep = transport_defect(gamma_tilt(b))
        worst["delta"] = max(worst["delta"], abs(rep.delta))
        worst["defect_l2"] = max(worst["defect_l2"], rep.defect_l2)
        worst["w"] = max(worst["w"], abs(rep.w1 - b), abs(rep.w2 - b))
        worst["slack"] = max(worst["slack"], abs(rep.bounds[2].slack))
    ok = worst["delta"] <= 1e-7 and worst["defect_l2"] <= 1e-6 and worst["w"] <= 1e-6 \
        and worst["slack"] <= 1e-6
    return CriterionResult(8, "transport equality cases", ok,
                           ", ".join(f"{k} {v:.2e}" for k, v in worst.items()))


def criterion_9() -> CriterionResult:
    rows = blowup_scan([1e-3, 1e-2, 0.1], [1.0, 2.0, 4.0])
    bad = []
    w1_gap = 0.0
    for r in rows:
        rep = r.report
        root2d = math.sqrt(max(2.0 * rep.delta, 0.0))
        ok_row = (rep.defect_l2 <= 2.0 * rep.delta + 1e-7
                  and rep.defect_l1 <= root2d + 1e-7
                  and rep.w1 <= root2d + math.sqrt(rep.fisher) + 1e-6)
        w1_gap = max(w1_gap, abs(rep.w1 - rep.w1_map))
        if not ok_row:
            bad.append(f"(eps={r.eps:g}, b={r.b:g})")
    ok = not bad and w1_gap <= 1e-6
    return CriterionResult(9, "transport inequality chain", ok,
                           f"{len(rows)} rows, violations [{' '.join(bad)}], "
                           f"W1 formula gap {w1_gap:.2e} (tol 1e-6)")


def kappa_samples(seed: int = DEFAULT_SEED):
    """``(KappaSample, ProjectionResult)`` over the trial and Hermite families."""
    out = []
    for n in (1, 2):
        for a in KAPPA_TRIAL_GRID:
            u = gaussian_trial(a, n)
            order = REFERENCE_ORDER[n]
            pd = math.pi * deficit_star(u, order).deficit
            proj = project_to_extremals(u, seed=seed, order=order)
            out.append((KappaSample(str(u) + f"[n={n}]", pd, trial_closed_forms(a, n).dist_sq_to_one),
                        proj))
    for k, eps in HERMITE_GRID:
        u = hermite_field(k, eps)
        pd = math.pi * deficit_star(u).deficit
        dist = integrate_values(lambda x: (u.eval(x) - 1.0) ** 2, MeasureKind.mu(1))
        out.append((KappaSample(str(u), pd, dist), project_to_extremals(u, seed=seed)))
    return out


def criterion_10(seed: int = DEFAULT_SEED) -> CriterionResult:
    samples = kappa_samples(seed)
    rows = [s for s, _ in samples]
    projs = [p for _, p in samples]
    kappa = empirical_kappa(rows, projs)
    floor = 2 * math.pi - KAPPA_MARGIN
    viol = [f"{s.label} ({s.pi_deficit / p.residual_sq:.4f})" for s, p in samples
            if s.pi_deficit < floor * p.residual_sq]
    ok = kappa >= floor and not viol
    return CriterionResult(10, "empirical kappa witness", ok,
                           f"{len(rows)} fields, empirical kappa {kappa:.6f} vs floor {floor:.6f}; "
                           f"violations: {', '.join(viol) if viol else 'none'}")


def criteria(kappa: float = DEFAULT_KAPPA, seed: int = DEFAULT_SEED
             ) -> List[Callable[[], CriterionResult]]:
    return [
        criterion_1,
        criterion_2,
        criterion_3,
        lambda: criterion_4(seed),
        lambda: criterion_5(seed),
        lambda: criterion_6(seed),
        lambda: criterion_7(kappa),
        criterion_8,
        criterion_9,
        lambda: criterion_10(seed),
    ]


def run_all(kappa: float = DEFAULT_KAPPA, seed: int = DEFAULT_SEED) -> List[CriterionResult]:
    return [c() for c in criteria(kappa, seed)]
