"""Worst-case spectra and laws, family membership, and tail-region formulas.

Spectrum-level families: A_rel(mu) holds nonnegative spectra with trace 1
and 2-norm at most 1/mu; A_abs(lam, phi) holds signed spectra with 2-norm
at most lam and Frobenius norm phi. Distribution-level families are the
corresponding Gamma-mixture sets tested by :func:`in_qrel` and
:func:`in_qabs`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .gamma_core import GammaParams
from .gamma_mix import GammaMix, GeneralGammaSum, mix_mean, mix_scale, mix_variance
from .majorization import Spectrum, as_vector

MEMBER_TOL = 1e-12

PROVED = "proved"
PESSIMISTIC = "pessimistic-floor"
CONJECTURED = "conjectured"


def _snap(v: float) -> float:
    """Round ratios that are integers up to rounding (e.g. (sqrt 2)^2)."""
    r = round(v)
    return float(r) if abs(v - r) <= 1e-12 * max(1.0, abs(v)) else v


@dataclass(frozen=True)
class RelFamily:
    mu: float

    def __post_init__(self):
        if not (self.mu >= 1 and math.isfinite(self.mu)):
            raise PreconditionError("RelFamily needs mu >= 1")


@dataclass(frozen=True)
class AbsFamily:
    lam: float
    phi: float

    def __post_init__(self):
        if not (0 < self.lam <= self.phi and math.isfinite(self.phi)):
            raise PreconditionError("AbsFamily needs 0 < lam <= phi")

    @property
    def rho(self) -> float:
        return _snap(self.phi ** 2 / self.lam ** 2)


@dataclass(frozen=True)
class TailRegion:
    """Edges of a tail region; x beyond an edge is 'in the tail'.

    ``symmetric`` regions mean |x| > upper_edge (lower_edge = -upper_edge).
    """

    lower_edge: float | None
    upper_edge: float | None
    lower_status: str | None = None
    upper_status: str | None = None
    symmetric: bool = False

    def __post_init__(self):
        if self.lower_edge is not None and self.upper_edge is not None and not self.lower_edge < self.upper_edge:
            raise PreconditionError("lower edge must lie below the upper edge")

    def contains(self, x: float) -> bool:
        if self.upper_edge is not None and x >= self.upper_edge:
            return True
        return self.lower_edge is not None and x <= self.lower_edge

    def as_dict(self) -> dict:
        return {"lower_edge": self.lower_edge, "upper_edge": self.upper_edge,
                "lower_status": self.lower_status, "upper_status": self.upper_status,
                "symmetric": self.symmetric}


@dataclass(frozen=True)
class RegionSet:
    """Candidate regions with their provenance; ``proved`` may be None."""

    proved: TailRegion | None
    pessimistic: TailRegion
    conjectured: TailRegion

    def as_dict(self) -> dict:
        return {"proved": None if self.proved is None else self.proved.as_dict(),
                "pessimistic": self.pessimistic.as_dict(),
                "conjectured": self.conjectured.as_dict()}


# --------------------------------------------------------------------------
# worst-case spectra and summary statistics
# --------------------------------------------------------------------------

def worst_rel_spectrum(f: RelFamily) -> Spectrum:
    """floor(mu) entries 1/mu, then the fractional remainder (zero dropped)."""
    mu = _snap(f.mu)
    k = int(math.floor(mu))
    frac = mu - k
    entries = [1.0] * k + ([frac] if frac > 0 else [])
    return Spectrum(np.asarray(entries) / mu)


def worst_abs_spectrum(f: AbsFamily) -> Spectrum:
    """floor(rho) entries lam, then lam*sqrt(rho - floor(rho)), rho = phi^2/lam^2."""
    rho = f.rho
    k = int(math.floor(rho))
    frac = rho - k
    entries = [1.0] * k + ([math.sqrt(frac)] if frac > 0 else [])
    return Spectrum(f.lam * np.asarray(entries))


def effective_rank(s) -> float:
    v = as_vector(s)
    if np.any(v < 0):
        raise PreconditionError("effective rank needs a nonnegative spectrum")
    if not np.any(v > 0):
        raise PreconditionError("effective rank of the zero spectrum is undefined")
    return float(v.sum() / v.max())


def stable_rank(s) -> float:
    v = as_vector(s)
    sq = v * v
    if not np.any(sq > 0):
        raise PreconditionError("stable rank of the zero spectrum is undefined")
    return float(sq.sum() / sq.max())


# --------------------------------------------------------------------------
# extremal laws and membership
# --------------------------------------------------------------------------

def extremal_rel_law(f: RelFamily, m: int) -> GammaParams:
    """Gamma(m mu / 2, m mu / 2), the worst case for the relative family."""
    if m < 1:
        raise PreconditionError("m must be a positive integer")
    a = m * f.mu / 2.0
    return GammaParams(a, a)


def extremal_abs_law(f: AbsFamily, m: int, sign: int = 1) -> tuple[int, GammaParams]:
    """(sign, Gamma(m rho / 2, m / (2 lam))): the law is sign * X."""
    if m < 1:
        raise PreconditionError("m must be a positive integer")
    if sign not in (1, -1):
        raise PreconditionError("sign must be +1 or -1")
    return sign, GammaParams(m * f.rho / 2.0, m / (2.0 * f.lam))


def in_qrel(q: GammaMix, mu: float) -> bool:
    """Nonnegative weights, scale at most 1/mu and mean 1."""
    if np.any(q.weights < 0):
        return False
    return bool(mix_scale(q) <= 1.0 / mu + MEMBER_TOL and abs(mix_mean(q) - 1.0) <= MEMBER_TOL)


def in_qabs(q: GammaMix, f: AbsFamily) -> bool:
    """Scale at most lam and variance phi^2."""
    var = mix_variance(q)
    return bool(mix_scale(q) <= f.lam + MEMBER_TOL and abs(var - f.phi ** 2) <= MEMBER_TOL * f.phi ** 2)


def qrel_family(mu: float, m: int) -> float:
    """Distribution-level mu for the estimator law of an A_rel(mu) spectrum."""
    return m * mu / 2.0


def qabs_family(f: AbsFamily, m: int) -> AbsFamily:
    """Distribution-level (scale, std) for the estimator law of an A_abs spectrum."""
    return AbsFamily(2.0 * f.lam / m, f.phi * math.sqrt(2.0 / m))


# --------------------------------------------------------------------------
# tail regions
# --------------------------------------------------------------------------

def rel_tail_region(mu: float, alpha: float) -> RegionSet:
    """Proved, pessimistic-floor and conjectured edges for the relative family."""
    if not (alpha > 0 and mu >= alpha * (1 - 1e-12)):
        raise PreconditionError("rel_tail_region needs mu >= alpha > 0")
    proved = TailRegion(1.0 - 1.0 / alpha, 1.0 + 1.0 / (2.0 * alpha), PROVED, PROVED)
    c = math.ceil(_snap(mu / alpha))
    ac = alpha * c
    floor = TailRegion(1.0 - 1.0 / ac, 1.0 + 1.0 / ac, PESSIMISTIC, PESSIMISTIC)
    conj = TailRegion(1.0 - 1.0 / mu, 1.0 + 1.0 / mu, CONJECTURED, CONJECTURED)
    return RegionSet(proved, floor, conj)


def abs_pessimistic_edge(f: AbsFamily, alpha: float) -> float:
    r = math.ceil(_snap(f.phi ** 2 / (f.lam ** 2 * alpha)))
    ra = r * alpha
    return f.phi * (1.0 + math.sqrt(ra + 1.0)) / math.sqrt(ra)


def abs_conjectured_edge(f: AbsFamily) -> float:
    return f.lam + math.sqrt(f.phi ** 2 + f.lam ** 2)


def abs_tail_region(f: AbsFamily, alpha: float) -> RegionSet:
    """Floor and conjectured edge; regions are symmetric (|x| > edge)."""
    if not (alpha > 0 and f.lam <= f.phi / math.sqrt(alpha) * (1 + 1e-12)):
        raise PreconditionError("abs_tail_region needs lam <= phi / sqrt(alpha)")
    e_floor = abs_pessimistic_edge(f, alpha)
    e_conj = abs_conjectured_edge(f)
    return RegionSet(None,
                     TailRegion(-e_floor, e_floor, PESSIMISTIC, PESSIMISTIC, symmetric=True),
                     TailRegion(-e_conj, e_conj, CONJECTURED, CONJECTURED, symmetric=True))


@dataclass(frozen=True)
class MatrixEpsilons:
    kind: str
    epsilon: float
    status: str
    asymptote: float | None = None
    note: str = ""


def matrix_tail_epsilons(m: int, f) -> MatrixEpsilons:
    """Conjectured eps_rel or eps_abs for m probe vectors."""
    if m < 1:
        raise PreconditionError("m must be a positive integer")
    if isinstance(f, RelFamily):
        return MatrixEpsilons("relative", 2.0 / (m * f.mu), CONJECTURED)
    if isinstance(f, AbsFamily):
        s = 2.0 * f.lam / m
        eps = s + math.sqrt(2.0 * f.phi ** 2 / m + s * s)
        return MatrixEpsilons("absolute", eps, CONJECTURED, f.phi * math.sqrt(2.0 / m),
                              "for large m the edge approaches one standard deviation, phi*sqrt(2/m)")
    raise TypeError("family must be RelFamily or AbsFamily")


# --------------------------------------------------------------------------
# witnesses of the pessimistic floors
# --------------------------------------------------------------------------

def rel_witness(mu: float, alpha: float, beta: float = 1.0) -> tuple[GammaMix, GeneralGammaSum]:
    """Member of the relative family whose perturbed law has mode 1 + 1/(alpha c).

    c = ceil(mu / alpha) copies of weight beta / (alpha c); the perturbation
    adds two exponentials with the same weight.
    """
    c = math.ceil(_snap(mu / alpha))
    w = beta / (alpha * c)
    q = GammaMix(np.full(c, w), alpha, beta)
    pert = q.general().append(w, 1.0, beta).append(w, 1.0, beta)
    return q, pert


def abs_witness(f: AbsFamily, alpha: float, beta: float = 1.0) -> tuple[GammaMix, GeneralGammaSum, float]:
    """Member of the absolute family reaching the pessimistic inflection edge.

    Returns (Q, perturbed sum, E[Q]); the centred perturbed law is the
    perturbed sum minus E[Q].
    """
    r = math.ceil(_snap(f.phi ** 2 / (f.lam ** 2 * alpha)))
    w = beta * f.phi / math.sqrt(r * alpha)
    q = GammaMix(np.full(r, w), alpha, beta)
    pert = q.general().append(w, 1.0, beta).append(w, 1.0, beta)
    return q, pert, mix_mean(q)


# --------------------------------------------------------------------------
# random family members (seeded)
# --------------------------------------------------------------------------

def _capped_simplex(n: int, total: float, cap: float, rng) -> np.ndarray:
    """Dirichlet draw summing to ``total``, pulled toward uniform until every
    entry is at most ``cap``. Needs n * cap >= total."""
    if n * cap < total * (1 - 1e-12):
        raise PreconditionError("not enough entries to respect the cap")
    w = rng.dirichlet(np.full(n, rng.choice([0.3, 1.0, 3.0]))) * total
    top = w.max()
    if top > cap:
        flat = total / n
        theta = (top - cap) / (top - flat) if top > flat else 1.0
        w = (1.0 - theta) * w + theta * flat
        w = np.minimum(w, cap)
        w *= total / w.sum()
    return w


def random_rel_member(f: RelFamily, rng, n: int | None = None) -> Spectrum:
    """Random nonnegative spectrum with trace 1 and max entry <= 1/mu."""
    mu = _snap(f.mu)
    lo = math.ceil(mu - 1e-12)
    n = n if n is not None else lo + int(rng.integers(0, 5))
    return Spectrum(np.sort(_capped_simplex(max(n, lo), 1.0, 1.0 / mu, rng))[::-1])


def random_abs_member(f: AbsFamily, rng, n: int | None = None) -> Spectrum:
    """Random signed spectrum with max |entry| <= lam and Frobenius norm phi."""
    lo = math.ceil(f.rho - 1e-12)
    n = n if n is not None else lo + int(rng.integers(0, 5))
    sq = _capped_simplex(max(n, lo), f.phi ** 2, f.lam ** 2, rng)
    signs = np.where(rng.random(sq.size) < 0.5, -1.0, 1.0)
    return Spectrum(signs * np.sqrt(sq))


def random_rel_successor(s, f: RelFamily, rng, moves: int = 3) -> Spectrum:
    """Spectrum majorizing ``s`` inside A_rel: random smaller-to-larger transfers."""
    v = as_vector(s).copy()
    cap = 1.0 / f.mu
    for _ in range(moves):
        if v.size < 2:
            break
        i, j = rng.choice(v.size, 2, replace=False)
        big, small = (i, j) if v[i] >= v[j] else (j, i)
        room = min(v[small], cap - v[big])
        if room > 0:
            d = room * rng.uniform(0.2, 1.0)
            v[big] += d
            v[small] -= d
    return Spectrum(v)


def random_abs_successor(s, f: AbsFamily, rng, moves: int = 3) -> Spectrum:
    """Spectrum above ``s`` in the indefinite order, inside A_abs.

    Each move is one of the three two-coordinate forms: grow a nonnegative
    entry while shrinking a negative one, spread two nonnegative entries, or
    even out two negative entries.
    """
    v = np.append(as_vector(s), 0.0)
    cap2 = f.lam ** 2
    for _ in range(moves):
        kind = rng.integers(0, 3)
        pos = np.nonzero(v >= 0)[0]
        neg = np.nonzero(v < 0)[0]
        if kind == 0 and pos.size and neg.size:
            j, k = rng.choice(pos), rng.choice(neg)
            room = min(v[k] ** 2, cap2 - v[j] ** 2)
            if room > 0:
                d = room * rng.uniform(0.2, 1.0)
                v[j] = math.sqrt(v[j] ** 2 + d)
                v[k] = -math.sqrt(max(v[k] ** 2 - d, 0.0))
        elif kind == 1 and pos.size >= 2:
            i, j = rng.choice(pos, 2, replace=False)
            big, small = (i, j) if v[i] >= v[j] else (j, i)
            room = min(v[small] ** 2, cap2 - v[big] ** 2)
            if room > 0:
                d = room * rng.uniform(0.2, 1.0)
                v[big] = math.sqrt(v[big] ** 2 + d)
                v[small] = math.sqrt(max(v[small] ** 2 - d, 0.0))
        elif kind == 2 and neg.size >= 2:
            i, j = rng.choice(neg, 2, replace=False)
            far, near = (i, j) if v[i] <= v[j] else (j, i)
            gap = v[far] ** 2 - v[near] ** 2
            if gap > 0:
                d = 0.5 * gap * rng.uniform(0.2, 1.0)
                v[far] = -math.sqrt(v[far] ** 2 - d)
                v[near] = -math.sqrt(v[near] ** 2 + d)
    return Spectrum(v)
