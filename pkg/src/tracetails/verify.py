"""Numerical checks of the dominance theorems along two-coordinate paths.

A :class:`DominancePath` joins two weight vectors that differ in
coordinates j and k. Along the path, the CDF of Y(t) changes with t at a
rate proportional to a derivative of the "perturbed" density of
Y(t) + nu_j(t) psi + nu_k(t) psi' (psi, psi' ~ Gamma(1, rate)): the first
derivative for the relative kind and the second for the absolute kind.
So the tails are where those derivatives keep one sign, and the functions
here locate them (modes, inflection points) and check the resulting CDF
inequalities on grids.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DegenerateDistributionError, NumericalError, PreconditionError
from .extremal import (CONJECTURED, PESSIMISTIC, PROVED, AbsFamily, RelFamily, TailRegion, abs_conjectured_edge,
                       abs_pessimistic_edge, abs_witness, in_qabs, in_qrel, random_abs_member, random_abs_successor,
                       random_rel_member, random_rel_successor,
                       rel_witness)
from .gamma_core import gamma_inflection_points, gamma_mode
from .gamma_mix import (GammaMix, GeneralGammaSum, _reduced, _single_gamma, as_general, mix_cdf, mix_mean,
                        mix_pdf, mix_scale, mix_variance)
from .majorization import as_vector, chain_classical, chain_frobenius, step_form

SLACK = -1e-9
SCHEMA_VERSION = 1


def chebyshev_grid(n: int = 33) -> np.ndarray:
    """n Chebyshev-Lobatto points on [0, 1], endpoints exactly 0 and 1."""
    if n < 2:
        raise PreconditionError("a t grid needs at least two points")
    t = 0.5 * (1.0 - np.cos(np.pi * np.arange(n) / (n - 1)))
    t[0], t[-1] = 0.0, 1.0
    return t


@dataclass(eq=False)
class DominancePath:
    """Interpolation between weight vectors ``mu`` and ``lam`` (same length).

    ``j`` is the coordinate that grows (in value for the relative kind, in
    square for the absolute kind) and ``k`` the one that shrinks.
    """

    mu: np.ndarray
    lam: np.ndarray
    j: int
    k: int
    kind: str
    t_grid: np.ndarray = field(default_factory=chebyshev_grid)
    shape: float = 1.0
    rate: float = 1.0

    def __post_init__(self):
        self.mu, self.lam = as_vector(self.mu).copy(), as_vector(self.lam).copy()
        self.t_grid = np.asarray(self.t_grid, dtype=np.float64)
        n = self.mu.size
        if self.lam.size != n:
            raise PreconditionError("mu and lam must have the same length")
        if self.kind not in ("relative", "absolute"):
            raise PreconditionError("kind must be 'relative' or 'absolute'")
        if not (0 <= self.j < n and 0 <= self.k < n and self.j != self.k):
            raise PreconditionError("j and k must be distinct coordinates")
        others = np.ones(n, bool)
        others[[self.j, self.k]] = False
        if not np.array_equal(self.mu[others], self.lam[others]):
            raise PreconditionError("mu and lam may differ only at j and k")
        t = self.t_grid
        if t.size < 2 or t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0):
            raise PreconditionError("t grid must be increasing from 0 to 1")
        if not (self.shape > 0 and self.rate > 0):
            raise PreconditionError("shape and rate must be positive")
        if self.identical:
            return
        mj, mk, lj, lk = self.mu[self.j], self.mu[self.k], self.lam[self.j], self.lam[self.k]
        if self.kind == "relative":
            if not (0 <= lk < mk <= mj < lj):
                raise PreconditionError("relative paths need 0 <= lam_k < mu_k <= mu_j < lam_j")
        else:
            gain, loss = lj * lj - mj * mj, mk * mk - lk * lk
            # conservation holds on the scale of the total sum of squares
            scale = max(float(np.sum(self.mu ** 2)), float(np.sum(self.lam ** 2)), 1e-300)
            if not (gain > 0 and abs(gain - loss) <= 1e-11 * scale):
                raise PreconditionError("absolute paths need lam_j^2 - mu_j^2 = mu_k^2 - lam_k^2 > 0")
            if step_form(self.mu, self.lam) is None:
                raise PreconditionError("absolute path step matches none of the enumerated forms")

    @property
    def identical(self) -> bool:
        return bool(np.array_equal(self.mu, self.lam))

    @classmethod
    def between(cls, mu, lam, kind: str, shape: float = 1.0, rate: float = 1.0, t_grid=None) -> "DominancePath":
        """Path for two vectors that differ in at most two coordinates."""
        a, b = as_vector(mu), as_vector(lam)
        n = max(a.size, b.size, 2)
        a = np.concatenate([a, np.zeros(n - a.size)])
        b = np.concatenate([b, np.zeros(n - b.size)])
        # rounding residue from chain construction is not a move
        tol = 1e-12 * max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), 1e-300)
        still = np.abs(a - b) <= tol
        b = np.where(still, a, b)
        diff = np.nonzero(~still)[0]
        if diff.size == 0:
            j, k = 0, 1
        elif diff.size == 2:
            p, q = int(diff[0]), int(diff[1])
            if kind == "relative":
                grow = b[p] - a[p] > b[q] - a[q]
            else:
                grow = b[p] ** 2 - a[p] ** 2 > b[q] ** 2 - a[q] ** 2
            j, k = (p, q) if grow else (q, p)
        else:
            raise PreconditionError("endpoints must differ in exactly two coordinates")
        kw = {} if t_grid is None else {"t_grid": t_grid}
        return cls(a, b, j, k, kind, shape=shape, rate=rate, **kw)


def interpolate(path: DominancePath, t: float) -> np.ndarray:
    """nu(t): linear in the two moved coordinates (relative) or linear in
    their squares with the sign kept (absolute)."""
    if not 0.0 <= t <= 1.0:
        raise PreconditionError("t must lie in [0, 1]")
    nu = path.lam.copy()
    for i in (path.j, path.k):
        a, b = path.mu[i], path.lam[i]
        if path.kind == "relative":
            nu[i] = t * b + (1.0 - t) * a
        else:
            nu[i] = math.copysign(math.sqrt(t * b * b + (1.0 - t) * a * a), a + b)
    return nu


def _law(path: DominancePath, nu) -> tuple[GammaMix, float]:
    """Y(t) as a mixture plus the centring shift (absolute kind only)."""
    q = GammaMix(nu, path.shape, path.rate)
    shift = mix_mean(q) if path.kind == "absolute" else 0.0
    return q, shift


def perturbed_sum(path: DominancePath, t: float) -> tuple[GeneralGammaSum, float]:
    """(Y(t) + nu_j psi + nu_k psi' before centring, centring shift)."""
    nu = interpolate(path, t)
    if nu[path.j] == 0 and nu[path.k] == 0:
        raise DegenerateDistributionError("both perturbation weights vanish")
    q, shift = _law(path, nu)
    g = q.general().append(nu[path.j], 1.0, path.rate).append(nu[path.k], 1.0, path.rate)
    return g, shift


def perturbed_density(path: DominancePath, t: float, x, derivative_order: int = 0):
    """Density (or derivative) of the perturbed variable, centred for the absolute kind."""
    g, shift = perturbed_sum(path, t)
    return mix_pdf(g, np.asarray(x, dtype=np.float64) + shift, derivative_order)


# --------------------------------------------------------------------------
# modes and inflection points
# --------------------------------------------------------------------------

def _support(g: GeneralGammaSum):
    c, _ = _reduced(g)
    lo = 0.0 if np.all(c > 0) else -math.inf
    hi = 0.0 if np.all(c < 0) else math.inf
    return lo, hi


def _scan_grid(g, width_sd: float, step_sd: float):
    mean, sd = mix_mean(g), math.sqrt(mix_variance(g))
    lo, hi = _support(g)
    a, b = max(mean - width_sd * sd, lo), min(mean + width_sd * sd, hi)
    n = int(math.ceil((b - a) / (step_sd * sd))) + 1
    return np.linspace(a, b, n), sd


def mode_of(dist, *, closed_form: bool = True) -> float:
    """The unique mode, by a grid search refined on the sign change of f'.

    Raises:
        DegenerateDistributionError: all weights zero.
    """
    g = as_general(dist)
    c, a = _reduced(g)
    if c.size == 0:
        raise DegenerateDistributionError("all weights are zero")
    single = _single_gamma(c, a) if closed_form else None
    if single is not None:
        p, sign = single
        return sign * gamma_mode(p)
    x, sd = _scan_grid(g, 10.0, 1.0 / 20)
    f = mix_pdf(g, x, closed_form=closed_form)
    i = int(np.argmax(f))
    lo, hi = x[max(i - 1, 0)], x[min(i + 1, x.size - 1)]
    d = lambda z: float(mix_pdf(g, z, 1, closed_form=closed_form))
    try:
        dlo, dhi = d(lo), d(hi)
        if dlo <= 0:
            return float(lo)
        if dhi >= 0:
            return float(hi)
        return float(brentq(d, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps))
    except PreconditionError:
        # f' does not exist at a kink (total shape near 1): maximise f directly
        res = minimize_scalar(lambda z: -float(mix_pdf(g, z, closed_form=closed_form)), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-10 * sd})
        return float(res.x)


def _outer_inflections(g, closed_form: bool):
    """(leftmost, rightmost) sign changes of f'' in the original coordinates."""
    c, a = _reduced(g)
    single = _single_gamma(c, a) if closed_form else None
    if single is not None:
        p, sign = single
        lo_root, hi_root = gamma_inflection_points(p)
        if hi_root is None:
            raise NumericalError("density has no inflection point")
        if sign > 0:
            return lo_root, hi_root
        return -hi_root, (None if lo_root is None else -lo_root)
    x, sd = _scan_grid(g, 12.0, 1.0 / 20)
    f2 = mix_pdf(g, x, 2, closed_form=closed_form)
    thr = 1e-9 * float(np.max(np.abs(f2)))
    neg = np.nonzero(f2 < -thr)[0]
    if neg.size == 0:
        raise NumericalError("no sign change of the second derivative found")
    d2 = lambda z: float(mix_pdf(g, z, 2, closed_form=closed_form))
    right = left = None
    after = np.nonzero(f2[neg[-1]:] > 0)[0]
    if after.size:
        b = neg[-1] + int(after[0])
        right = brentq(d2, x[b - 1] if f2[b - 1] < 0 else x[neg[-1]], x[b], xtol=1e-9 * sd + 1e-12)
    before = np.nonzero(f2[:neg[0]] > 0)[0]
    if before.size:
        b = int(before[-1])
        left = brentq(d2, x[b], x[b + 1] if f2[b + 1] < 0 else x[neg[0]], xtol=1e-9 * sd + 1e-12)
    if left is None and right is None:
        raise NumericalError("no sign change of the second derivative found")
    return left, right


def inflection_points(dist, shift: float = 0.0, *, closed_form: bool = True):
    """Outermost inflection points of ``dist - shift`` (either may be None)."""
    left, right = _outer_inflections(as_general(dist), closed_form)
    return (None if left is None else left - shift, None if right is None else right - shift)


def inflection_extent(dist, shift: float = 0.0, *, closed_form: bool = True) -> float:
    """Largest |x| among inflection points of ``dist - shift``."""
    pts = [abs(p) for p in inflection_points(dist, shift, closed_form=closed_form) if p is not None]
    return max(pts)


def inflection_sup(path: DominancePath, *, closed_form: bool = True) -> float:
    """max over the t grid of the largest |x| where the centred perturbed
    density changes convexity.

    Raises:
        NumericalError: some t has no sign change (reported, not skipped).
    """
    if path.kind != "absolute":
        raise PreconditionError("inflection_sup applies to absolute paths")
    best = 0.0
    for t in path.t_grid:
        g, shift = perturbed_sum(path, float(t))
        best = max(best, inflection_extent(g, shift, closed_form=closed_form))
    return best


def mode_range(path: DominancePath) -> tuple[float, float]:
    """(min, max) mode of the perturbed density over the t grid (relative kind)."""
    modes = [mode_of(perturbed_sum(path, float(t))[0]) for t in path.t_grid]
    return min(modes), max(modes)


# --------------------------------------------------------------------------
# dominance and monotonicity
# --------------------------------------------------------------------------

@dataclass
class DominanceReport:
    claim: str
    region: dict
    grid: list
    margins: list
    verdict: str
    worst_margin: float
    provenance: str
    coverage: str = "finite grid of x; the theorem quantifies over all x in the region"

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "claim": self.claim, "region": self.region, "grid": self.grid,
                "margins": self.margins, "verdict": self.verdict, "worst_margin": self.worst_margin,
                "provenance": self.provenance, "coverage": self.coverage}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _check_members(path: DominancePath):
    qa, qb = GammaMix(path.mu, path.shape, path.rate), GammaMix(path.lam, path.shape, path.rate)
    if path.kind == "relative":
        if not (in_qrel(qa, path.shape) and in_qrel(qb, path.shape)):
            raise PreconditionError("relative endpoints must have mean 1 and scale at most 1/shape")
        return
    sd = math.sqrt(mix_variance(qb))
    sc = max(mix_scale(qa), mix_scale(qb))
    if sc > sd * (1 + 1e-9):
        raise PreconditionError("absolute endpoints need scale <= std")
    # a single-entry spectrum has scale == std up to rounding
    fam = AbsFamily(min(sc, sd), sd)
    if not (in_qabs(qa, fam) and in_qabs(qb, fam)):
        raise PreconditionError("absolute endpoints must share their variance")
    if fam.lam > fam.phi / math.sqrt(path.shape) * (1 + 1e-12):
        raise PreconditionError("absolute endpoints need scale <= std / sqrt(shape)")


def proved_region(path: DominancePath) -> TailRegion:
    """Relative: the family-wide edges 1 - 1/shape and 1 + 1/(2 shape).
    Absolute: |x| beyond this path's inflection sup."""
    if path.kind == "relative":
        a = path.shape
        return TailRegion(1.0 - 1.0 / a, 1.0 + 1.0 / (2.0 * a), PROVED, PROVED)
    if path.identical:
        return TailRegion(-0.0 - 1e-300, 0.0, PROVED, PROVED, symmetric=True)
    s = inflection_sup(path)
    return TailRegion(-s, s, PROVED, PROVED, symmetric=True)


def _x_grids(path: DominancePath, region: TailRegion, x_points: int):
    qa, qb = GammaMix(path.mu, path.shape, path.rate), GammaMix(path.lam, path.shape, path.rate)
    sd = math.sqrt(max(mix_variance(qa), mix_variance(qb)))
    grids = []
    if path.kind == "relative":
        mean = 1.0
        if region.upper_edge is not None:
            up = max(region.upper_edge, 1e-300)
            grids.append(("upper", np.geomspace(up, max(up, mean) + 12 * sd, x_points)))
        if region.lower_edge is not None and region.lower_edge > 0:
            lo = region.lower_edge
            grids.append(("lower", np.geomspace(lo * 1e-3, lo, x_points)))
    else:
        e = max(region.upper_edge, 0.0)
        span = np.geomspace(max(e, 1e-3 * sd), e + 12 * sd, x_points + 1)[1:] if e > 0 else \
            np.geomspace(1e-3 * sd, 12 * sd, x_points)
        grids.append(("upper", span))
        grids.append(("lower", -span))
    return grids


def dominance_check(path: DominancePath, region: TailRegion | None = None, x_points: int = 64,
                    provenance: str = PROVED) -> DominanceReport:
    """Evaluate both endpoint CDFs on log-spaced grids over the region.

    Relative kind: F_mu >= F_lam in the upper region and F_mu <= F_lam in
    the lower one. Absolute kind: F_mu >= F_lam (centred CDFs) for |x|
    beyond the edge. Passes iff every margin is at least -1e-9.

    Raises:
        PreconditionError: endpoints outside the family, or a region that
            reaches into the non-tail zone while ``provenance`` is proved.
    """
    _check_members(path)
    safe = proved_region(path)
    if region is None:
        region = safe
    elif provenance == PROVED:
        inside = (region.upper_edge is not None and region.upper_edge < safe.upper_edge - 1e-12) or \
                 (path.kind == "relative" and region.lower_edge is not None and region.lower_edge > safe.lower_edge + 1e-12)
        if inside:
            raise PreconditionError("region overlaps the non-tail zone; it cannot be reported as proved")
    qa, qb = GammaMix(path.mu, path.shape, path.rate), GammaMix(path.lam, path.shape, path.rate)
    sa = mix_mean(qa) if path.kind == "absolute" else 0.0
    sb = mix_mean(qb) if path.kind == "absolute" else 0.0
    grid, margins = [], []
    for side, xs in _x_grids(path, region, x_points):
        if path.identical:
            fa = fb = mix_cdf(qa, xs + sa) if np.any(qa.weights) else (xs >= 0).astype(float)
        else:
            fa, fb = mix_cdf(qa, xs + sa), mix_cdf(qb, xs + sb)
        marg = fb - fa if (path.kind == "relative" and side == "lower") else fa - fb
        grid += [[float(x), float(u), float(v)] for x, u, v in zip(xs, fa, fb)]
        margins += [float(m) for m in marg]
    worst = min(margins) if margins else 0.0
    claim = ("Pr(Q_mu <= x) >= Pr(Q_lam <= x) for x >= upper edge, <= for x <= lower edge"
             if path.kind == "relative" else
             "Pr(Q_mu - E Q_mu <= x) >= Pr(Q_lam - E Q_lam <= x) for |x| > edge")
    return DominanceReport(claim, region.as_dict(), grid, margins, "pass" if worst >= SLACK else "fail",
                           worst, provenance)


def monotonicity_check(path: DominancePath, x: float) -> dict:
    """F_{Y(t)}(x) over the t grid against the direction the derivative sign
    analysis predicts at x.

    The t-derivative of F has the sign of f'(x) (relative) or -f''(x)
    (absolute) of the perturbed density, so the expected direction follows
    whenever that sign is the same for every t; otherwise it is
    "undetermined".
    """
    values, signs = [], []
    order = 1 if path.kind == "relative" else 2
    for t in path.t_grid:
        nu = interpolate(path, float(t))
        q, shift = _law(path, nu)
        values.append(float(mix_cdf(q, x + shift)) if np.any(nu) else float(x >= 0))
        if path.identical:
            continue
        g, gshift = perturbed_sum(path, float(t))
        d = float(mix_pdf(g, x + gshift, order))
        signs.append(-d if order == 1 else d)
    values = np.asarray(values)
    steps = np.diff(values)
    if path.identical:
        expected = "constant"
        ok = bool(np.all(np.abs(steps) <= 1e-9))
    else:
        signs = np.asarray(signs)
        scale = float(np.max(np.abs(signs))) or 1.0
        if np.all(signs >= -1e-9 * scale):
            expected = "nonincreasing"
            ok = bool(np.all(steps <= 1e-9))
        elif np.all(signs <= 1e-9 * scale):
            expected = "nondecreasing"
            ok = bool(np.all(steps >= -1e-9))
        else:
            expected = "undetermined"
            ok = True
    return {"schema_version": SCHEMA_VERSION, "x": float(x), "kind": path.kind,
            "t_grid": path.t_grid.tolist(), "cdf": values.tolist(), "expected": expected,
            "verdict": "pass" if ok else "fail"}


# --------------------------------------------------------------------------
# pair and chain drivers
# --------------------------------------------------------------------------

def chain_paths(mu, lam, kind: str, shape: float, rate: float, t_grid=None) -> list[DominancePath]:
    """One path per step of the constructive chain from mu to lam."""
    chain = chain_classical(mu, lam) if kind == "relative" else chain_frobenius(mu, lam)
    if len(chain) == 1:
        return [DominancePath.between(chain.steps[0], chain.steps[0], kind, shape, rate, t_grid)]
    return [DominancePath.between(p, q, kind, shape, rate, t_grid) for p, q in chain.pairs()]


def spectrum_weights(s, m: int) -> tuple[np.ndarray, float, float]:
    """Estimator-law weights, shape and rate for a spectrum and m probes."""
    return as_vector(s), m / 2.0, m / 2.0


# --------------------------------------------------------------------------
# conjecture probes
# --------------------------------------------------------------------------

def conjecture_probe(kind: str, params, alpha: float, trials: int, seed: int, beta: float = 1.0) -> dict:
    """Random family members and index pairs against the conjectured edges.

    Relative: ``params`` is the distribution-level mu (>= alpha); modes of
    the perturbed densities are compared with 1 +- 1/mu. Absolute:
    ``params`` is (lam, phi) with lam <= phi / sqrt(alpha); inflection
    extents are compared with lam + sqrt(phi^2 + lam^2). The witness row
    reproduces the pessimistic floor. Nothing here asserts the conjecture.
    """
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    rows, counter = [], []
    if kind == "relative":
        mu = float(params)
        if mu < alpha * (1 - 1e-12):
            raise PreconditionError("relative probe needs mu >= alpha")
        fam = RelFamily(max(mu / alpha, 1.0))
        up_c, lo_c = 1.0 + 1.0 / mu, 1.0 - 1.0 / mu
        c = math.ceil(mu / alpha - 1e-12)
        floor_up, floor_lo = 1.0 + 1.0 / (alpha * c), 1.0 - 1.0 / (alpha * c)
        q, pert = rel_witness(mu, alpha, beta)
        w_mode = mode_of(pert, closed_form=False)
        witness = {"value": w_mode, "floor": floor_up, "error": abs(w_mode - floor_up)}
        for _ in range(trials):
            s = random_rel_member(fam, rng)
            w = np.append(beta * s.entries / alpha, [0.0, 0.0])
            j, k = rng.choice(w.size, 2, replace=False)
            g = GammaMix(w, alpha, beta).general()
            if w[j] != 0 or w[k] != 0:
                g = g.append(w[j], 1.0, beta).append(w[k], 1.0, beta)
            if sum(a for wi, a in zip(g.weights, g.shapes) if wi != 0) <= 1.25:
                continue
            md = mode_of(g)
            rows.append(md)
            if md > up_c + 1e-9 or md < lo_c - 1e-9:
                counter.append({"weights": w.tolist(), "j": int(j), "k": int(k), "mode": md})
        return {"schema_version": SCHEMA_VERSION, "kind": kind, "mu": mu, "alpha": alpha, "beta": beta,
                "trials": trials, "evaluated": len(rows),
                "empirical_max": max(rows) if rows else None, "empirical_min": min(rows) if rows else None,
                "conjectured": {"upper": up_c, "lower": lo_c, "status": CONJECTURED},
                "pessimistic": {"upper": floor_up, "lower": floor_lo, "status": PESSIMISTIC},
                "witness": witness, "counterexamples": counter, "provenance": CONJECTURED}
    if kind == "absolute":
        lam, phi = (float(v) for v in params)
        f = AbsFamily(lam, phi)
        if lam > phi / math.sqrt(alpha) * (1 + 1e-12):
            raise PreconditionError("absolute probe needs lam <= phi / sqrt(alpha)")
        edge_c, edge_f = abs_conjectured_edge(f), abs_pessimistic_edge(f, alpha)
        _, pert, mean = abs_witness(f, alpha, beta)
        w_ext = inflection_extent(pert, mean, closed_form=False)
        witness = {"value": w_ext, "floor": edge_f, "error": abs(w_ext - edge_f)}
        spec_fam = AbsFamily(min(lam * math.sqrt(alpha), phi), phi)
        for _ in range(trials):
            s = random_abs_member(spec_fam, rng)
            w = np.append(beta * s.entries / math.sqrt(alpha), 0.0)
            j, k = rng.choice(w.size, 2, replace=False)
            if w[j] == 0 and w[k] == 0:
                continue
            q = GammaMix(w, alpha, beta)
            g = q.general().append(w[j], 1.0, beta).append(w[k], 1.0, beta)
            try:
                ext = inflection_extent(g, mix_mean(q))
            except NumericalError:
                continue
            rows.append(ext)
            if ext > edge_c + 1e-9:
                counter.append({"weights": w.tolist(), "j": int(j), "k": int(k), "extent": ext})
        return {"schema_version": SCHEMA_VERSION, "kind": kind, "lam": lam, "phi": phi, "alpha": alpha,
                "beta": beta, "trials": trials, "evaluated": len(rows),
                "empirical_max": max(rows) if rows else None,
                "conjectured": {"edge": edge_c, "status": CONJECTURED},
                "pessimistic": {"edge": edge_f, "status": PESSIMISTIC},
                "witness": witness, "counterexamples": counter, "provenance": CONJECTURED}
    raise PreconditionError("kind must be 'relative' or 'absolute'")


# --------------------------------------------------------------------------
# seeded suites
# --------------------------------------------------------------------------

def random_pair(kind: str, family, rng):
    """(mu, lam) with mu below lam in the ordering of ``kind``, both in the family."""
    if kind == "relative":
        s = random_rel_member(family, rng)
        return s.entries, random_rel_successor(s, family, rng).entries
    s = random_abs_member(family, rng)
    return np.append(s.entries, 0.0), random_abs_successor(s, family, rng).entries


def dominance_suite(kind: str, family, m: int, pairs: int, seed: int, x_points: int = 64,
                    t_points: int = 33) -> dict:
    """Dominance checks on every chain step of ``pairs`` seeded random pairs.

    Weights are matrix spectra with shape = rate = m/2. The verdict is
    "pass" iff every step passes over its proved region.
    """
    if pairs < 1:
        raise PreconditionError("pairs must be at least 1")
    rng = np.random.default_rng(seed)
    alpha = m / 2.0
    t_grid = chebyshev_grid(t_points)
    steps, worst = [], math.inf
    for p in range(pairs):
        mu, lam = random_pair(kind, family, rng)
        for path in chain_paths(mu, lam, kind, alpha, alpha, t_grid):
            rep = dominance_check(path, x_points=x_points)
            worst = min(worst, rep.worst_margin)
            steps.append({"pair": p, "mu": path.mu.tolist(), "lam": path.lam.tolist(), "region": rep.region,
                          "worst_margin": rep.worst_margin, "verdict": rep.verdict})
    verdict = "pass" if all(s["verdict"] == "pass" for s in steps) else "fail"
    if kind == "relative":
        claim = "Pr(Q_mu <= x) >= Pr(Q_lam <= x) for x >= 1 + 1/(2 alpha), <= for x <= 1 - 1/alpha"
        region = proved_region(DominancePath.between([1.0], [1.0], kind, alpha, alpha)).as_dict()
        fam = {"mu": family.mu}
    else:
        claim = "Pr(Q_mu - E Q_mu <= x) >= Pr(Q_lam - E Q_lam <= x) for |x| beyond each path's inflection sup"
        region = {"kind": "per-path inflection sup", "symmetric": True}
        fam = {"lam": family.lam, "phi": family.phi}
    return {"schema_version": SCHEMA_VERSION, "claim": claim, "region": region,
            "grid": {"x_points_per_region": x_points, "t_points": t_points, "pairs": pairs,
                     "steps": len(steps), "m": m, "alpha": alpha, "seed": seed, "kind": kind, "family": fam},
            "margins": {"worst": worst, "steps": steps}, "verdict": verdict, "provenance": PROVED,
            "coverage": f"{len(steps)} chain steps from {pairs} random pairs; the theorem covers the whole family"}
