"""Baseline concentration bounds, exact extremal tails, and sample sizes.

Matrix-level conventions: relative queries use the effective rank mu of an
SPSD spectrum with trace 1; absolute queries use the 2-norm lam and
Frobenius norm phi. The estimator with m probes has shape = rate = m/2.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, RegionRefusal
from .extremal import (CONJECTURED, PROVED, AbsFamily, RelFamily, abs_tail_region, extremal_abs_law,
                       extremal_rel_law, matrix_tail_epsilons, rel_tail_region)
from .gamma_core import gamma_cdf, gamma_sf

OUTSIDE = "outside"
CSV_HEADER = ("epsilon", "ck_bound", "exact_tail", "ratio", "region_status")


def _check(m, eps):
    if m < 1:
        raise PreconditionError("m must be at least 1")
    if not eps > 0:
        raise PreconditionError("epsilon must be positive")


def ck_abs_bound(lam2: float, phi: float, m: int, eps: float) -> float:
    """2 exp(-m eps^2 / (4 phi^2 + 4 eps lam2)); values above 1 are kept."""
    _check(m, eps)
    return 2.0 * math.exp(-m * eps * eps / (4.0 * phi * phi + 4.0 * eps * lam2))


def ck_rel_bound(mu: float, m: int, eps: float) -> float:
    """2 exp(-m eps^2 mu / (4 (1 + eps)))."""
    _check(m, eps)
    return 2.0 * math.exp(-m * eps * eps * mu / (4.0 * (1.0 + eps)))


def extremal_rel_tail(mu: float, m: int, eps: float) -> float:
    """Pr(|X - 1| >= eps) for X ~ Gamma(m mu / 2, m mu / 2)."""
    _check(m, eps)
    p = extremal_rel_law(RelFamily(mu), m)
    lower = float(gamma_cdf(p, 1.0 - eps)) if eps < 1 else 0.0
    return lower + float(gamma_sf(p, 1.0 + eps))


def extremal_abs_tail(f: AbsFamily, m: int, eps: float) -> float:
    """2 Pr(X - E[X] >= eps) for X ~ Gamma(m rho / 2, m / (2 lam))."""
    _check(m, eps)
    _, p = extremal_abs_law(f, m)
    return 2.0 * float(gamma_sf(p, f.phi ** 2 / f.lam + eps))


@dataclass(frozen=True)
class BoundQuery:
    m: int
    epsilon: float
    mode: str
    family: RelFamily | AbsFamily

    def __post_init__(self):
        _check(self.m, self.epsilon)
        if self.mode not in ("relative", "absolute"):
            raise PreconditionError("mode must be 'relative' or 'absolute'")
        want = RelFamily if self.mode == "relative" else AbsFamily
        if not isinstance(self.family, want):
            raise PreconditionError(f"{self.mode} mode needs a {want.__name__}")


def ck_bound(q: BoundQuery, m: int | None = None) -> float:
    m = q.m if m is None else m
    if q.mode == "relative":
        return ck_rel_bound(q.family.mu, m, q.epsilon)
    return ck_abs_bound(q.family.lam, q.family.phi, m, q.epsilon)


def exact_tail(q: BoundQuery, m: int | None = None) -> float:
    m = q.m if m is None else m
    if q.mode == "relative":
        return extremal_rel_tail(q.family.mu, m, q.epsilon)
    return extremal_abs_tail(q.family, m, q.epsilon)


def region_status(q: BoundQuery, m: int | None = None) -> str:
    """Whether eps is in the proved tail, only the conjectured one, or neither.

    The estimator law with m probes lives in the distribution-level family
    with alpha = m/2, so the edges are rescaled to matrix units here.
    """
    m = q.m if m is None else m
    eps, alpha = q.epsilon, m / 2.0
    if q.mode == "relative":
        regions = rel_tail_region(m * q.family.mu / 2.0, alpha)
        up = regions.proved.upper_edge - 1.0
        down = 1.0 - regions.proved.lower_edge
        if eps >= up and (eps >= 1.0 or eps >= down):
            return PROVED
    if eps >= matrix_tail_epsilons(m, q.family).epsilon:
        return CONJECTURED
    return OUTSIDE


@dataclass(frozen=True)
class SampleSize:
    m: int
    method: str
    bound: float
    status: str
    note: str


def _closed_form_m(q: BoundQuery, delta: float) -> int:
    eps = q.epsilon
    if q.mode == "relative":
        m = 4.0 * (1.0 + eps) * math.log(2.0 / delta) / (eps * eps * q.family.mu)
    else:
        f = q.family
        m = (4.0 * f.phi ** 2 + 4.0 * eps * f.lam) * math.log(2.0 / delta) / (eps * eps)
    m = max(1, math.ceil(m))
    # guard the ceiling against rounding in either direction
    while m > 1 and ck_bound(q, m - 1) <= delta:
        m -= 1
    while ck_bound(q, m) > delta:
        m += 1
    return m


def _bisect_m(fn, delta: float) -> int:
    if fn(1) <= delta:
        return 1
    hi = 2
    while fn(hi) > delta:
        hi *= 2
        if hi > 1 << 40:
            raise PreconditionError("requested probability is unattainable")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fn(mid) <= delta:
            hi = mid
        else:
            lo = mid
    return hi


def sample_size(query: BoundQuery, delta: float, method: str = "ck", *, force: bool = False) -> SampleSize:
    """Smallest m with the selected bound at most delta.

    The extremal tail is a worst case only inside the proved tail region;
    for other epsilon the answer is refused unless ``force`` is set.

    Raises:
        RegionRefusal: extremal method outside the proved region without force.
    """
    if not 0 < delta < 1:
        raise PreconditionError("delta must lie in (0, 1)")
    if method == "ck":
        m = _closed_form_m(query, delta)
        return SampleSize(m, "ck", ck_bound(query, m), PROVED, "closed-form inversion of the concentration bound")
    if method != "extremal":
        raise PreconditionError("method must be 'ck' or 'extremal'")
    m = _bisect_m(lambda k: exact_tail(query, k), delta)
    status = region_status(query, m)
    if status != PROVED and not force:
        raise RegionRefusal(
            f"epsilon={query.epsilon:g} is not in the proved tail region at m={m} (status: {status}); "
            "the extremal law is only known to be the worst case there")
    return SampleSize(m, "extremal", exact_tail(query, m), status,
                      "valid in the proved tail region only" if status == PROVED
                      else f"forced: epsilon is in the {status} region")


@dataclass(frozen=True)
class CompareRow:
    epsilon: float
    ck_bound: float
    exact_tail: float
    ratio: float
    region_status: str

    @property
    def vacuous(self) -> bool:
        return self.ck_bound > 1.0


def default_eps_grid(mode: str, family, m: int, n: int = 25) -> np.ndarray:
    """Log-spaced from 1e-3 to six standard deviations of the estimator."""
    if mode == "relative":
        sd = math.sqrt(2.0 / (m * family.mu))
    else:
        sd = family.phi * math.sqrt(2.0 / m)
    hi = max(6.0 * sd, 2e-3)
    return np.geomspace(1e-3, hi, n)


def compare_report(mode: str, family, m: int, eps_grid=None) -> list[CompareRow]:
    """One row per epsilon: CK bound, exact extremal tail, their ratio, region status."""
    grid = default_eps_grid(mode, family, m) if eps_grid is None else np.asarray(eps_grid, dtype=float)
    rows = []
    for eps in grid.tolist():
        q = BoundQuery(m, eps, mode, family)
        ck, ex = ck_bound(q), exact_tail(q)
        ratio = ck / ex if ex > 0 else math.inf
        rows.append(CompareRow(eps, ck, ex, ratio, region_status(q)))
    return rows


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def rows_to_csv(rows) -> str:
    """CSV text with the fixed header, '\\n' line endings, shortest round-trip floats."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(r.epsilon), _fmt(r.ck_bound), _fmt(r.exact_tail), _fmt(r.ratio), r.region_status])
    return buf.getvalue()
