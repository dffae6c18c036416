"""Majorization orders on spectra and constructive two-coordinate chains.

Indices returned by this module are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError

REL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Real eigenvalue vector. Zero-padding and reordering are semantically neutral."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.atleast_1d(np.asarray(self.entries, dtype=np.float64)).ravel()
        if not np.all(np.isfinite(e)):
            raise PreconditionError("spectrum entries must be finite")
        object.__setattr__(self, "entries", e)

    def sorted(self) -> np.ndarray:
        return np.sort(self.entries)[::-1]

    def padded(self, n: int) -> np.ndarray:
        return _pad(self.entries, n)

    @property
    def trace(self) -> float:
        return float(self.entries.sum())

    @property
    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(self.entries ** 2)))

    @property
    def norm2(self) -> float:
        return float(np.max(np.abs(self.entries))) if self.entries.size else 0.0

    def __len__(self):
        return self.entries.size

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def as_vector(s) -> np.ndarray:
    if isinstance(s, Spectrum):
        return s.entries
    v = np.atleast_1d(np.asarray(s, dtype=np.float64)).ravel()
    if not np.all(np.isfinite(v)):
        raise PreconditionError("spectrum entries must be finite")
    return v


def _pad(v, n):
    out = np.zeros(n)
    out[: v.size] = v
    return out


def _desc(v):
    return np.sort(v)[::-1]


def _common(mu, lam):
    a, b = as_vector(mu), as_vector(lam)
    n = max(a.size, b.size)
    return _pad(a, n), _pad(b, n)


def _require_nonneg(*vs):
    for v in vs:
        if np.any(v < 0):
            raise PreconditionError("classical majorization is defined on nonnegative vectors")


def _slacks(small, big):
    """Prefix-sum gaps of sorted ``big`` over sorted ``small`` and the tolerance."""
    cs, cb = np.cumsum(_desc(small)), np.cumsum(_desc(big))
    tol = REL_TOL * max(abs(cs[-1]), abs(cb[-1])) if cs.size else 0.0
    return cb - cs, tol


def pos_neg_split(s):
    """Elementwise (min(s, 0), max(s, 0))."""
    v = as_vector(s)
    return np.minimum(v, 0.0), np.maximum(v, 0.0)


def weakly_majorizes(mu, lam) -> bool:
    """True iff mu is weakly majorized by lam (every sorted prefix sum of mu <= lam's)."""
    a, b = _common(mu, lam)
    _require_nonneg(a, b)
    if a.size == 0:
        return True
    d, tol = _slacks(a, b)
    return bool(np.all(d >= -tol))


def majorizes(mu, lam) -> bool:
    """True iff lam majorizes mu: weak majorization plus equal totals."""
    a, b = _common(mu, lam)
    _require_nonneg(a, b)
    if a.size == 0:
        return True
    d, tol = _slacks(a, b)
    return bool(np.all(d >= -tol) and abs(d[-1]) <= tol)


def leading_slack_index(mu, lam):
    """Smallest 0-based j with every prefix inequality from j onwards strict.

    Returns None (no slack) when the final prefix inequality is tight.
    """
    if not weakly_majorizes(mu, lam):
        raise PreconditionError("leading slack index needs mu weakly majorized by lam")
    a, b = _common(mu, lam)
    return _leading(*_slacks(a, b))


def _leading(d, tol):
    if d.size == 0 or d[-1] <= tol:
        return None
    tight = np.nonzero(d <= tol)[0]
    return int(tight[-1] + 1) if tight.size else 0


def _f_parts(mu, lam):
    a, b = _common(mu, lam)
    ma, mb = np.maximum(a, 0.0) ** 2, np.maximum(b, 0.0) ** 2
    na, nb = np.minimum(a, 0.0) ** 2, np.minimum(b, 0.0) ** 2
    return a, b, ma, mb, na, nb


def f_majorizes(mu, lam) -> bool:
    """The indefinite order: squared positive parts weakly majorized upward,
    squared negative parts weakly majorized downward, equal sums of squares."""
    a, b, ma, mb, na, nb = _f_parts(mu, lam)
    if a.size == 0:
        return True
    scale = max(float(np.sum(b * b)), float(np.sum(a * a)))
    tol = REL_TOL * scale
    dp = np.cumsum(_desc(mb)) - np.cumsum(_desc(ma))
    dn = np.cumsum(_desc(na)) - np.cumsum(_desc(nb))
    return bool(np.all(dp >= -tol) and np.all(dn >= -tol) and abs(np.sum(a * a) - np.sum(b * b)) <= tol)


@dataclass(eq=False)
class MajorizationChain:
    """Vectors from mu to lam, consecutive ones differing in two coordinates."""

    steps: list = field(default_factory=list)
    order_kind: str = "classical"

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def pairs(self):
        return list(zip(self.steps[:-1], self.steps[1:]))


# --------------------------------------------------------------------------
# classical chain
# --------------------------------------------------------------------------

def _mo_steps(x, y, tol):
    """Two-coordinate transfers taking sorted y down to sorted x (x majorized by y).

    Each transfer moves delta from the largest index j with x_j < y_j to the
    first k > j with x_k > y_k; the result stays sorted and one more
    coordinate matches x exactly. Returns the visited vectors, y first.
    """
    y = y.copy()
    out = [y.copy()]
    for _ in range(y.size):
        over = np.nonzero(y - x > tol)[0]
        if over.size == 0:
            break
        j = int(over[-1])
        under = np.nonzero(x[j + 1:] - y[j + 1:] > tol)[0]
        if under.size == 0:
            break
        k = j + 1 + int(under[0])
        dj, dk = y[j] - x[j], x[k] - y[k]
        if dj <= dk:
            y[j] = x[j]
            y[k] = x[k] if dj == dk else y[k] + dj
        else:
            y[k] = x[k]
            y[j] = y[j] - dk
        for i in (j, k):
            if abs(y[i] - x[i]) <= tol:
                y[i] = x[i]
        out.append(y.copy())
    out[-1] = x.copy()
    return out


def chain_classical(mu, lam) -> MajorizationChain:
    """Chain mu = eta_0, ..., eta_r = lam with every step a transfer from a
    smaller to a larger coordinate (0 <= lam_k < mu_k <= mu_j < lam_j).

    Coordinates keep mu's order (zero-padded); the final vector is lam
    sorted into the same positions. At most n - 1 steps.
    """
    if not majorizes(mu, lam):
        raise PreconditionError("chain_classical needs mu majorized by lam")
    a, b = _common(mu, lam)
    order = np.argsort(-a, kind="stable")
    x, y = a[order], _desc(b)
    tol = REL_TOL * max(abs(x.sum()), abs(y.sum()))
    path = _mo_steps(x, y, tol)[::-1]
    steps = []
    for v in path:
        w = np.empty_like(v)
        w[order] = v
        steps.append(w)
    steps[0] = a.copy()
    return MajorizationChain(steps, "classical")


# --------------------------------------------------------------------------
# Frobenius chain
# --------------------------------------------------------------------------

def _phase_slack(eta, target, tol, max_steps):
    """Mixed-sign moves: a nonnegative coordinate grows while a negative one
    shrinks toward zero (sum of squares fixed), until no slack remains.

    ``eta`` and ``target`` are lists of per-step arrays; zero coordinates
    are appended to every stored vector when a move needs one.
    """
    steps = [eta.copy()]
    for _ in range(max_steps):
        cur = steps[-1]
        pos_c, pos_t = np.maximum(cur, 0.0) ** 2, np.maximum(target, 0.0) ** 2
        dp = np.cumsum(_desc(pos_t)) - np.cumsum(_desc(pos_c))
        jp = _leading(dp, tol)
        if jp is None:
            return steps, target
        value = _desc(pos_c)[jp]
        if value == 0.0:
            zeros = np.nonzero(cur == 0.0)[0]
            if zeros.size == 0:
                steps = [np.append(s, 0.0) for s in steps]
                target = np.append(target, 0.0)
                continue
            j = int(zeros[0])
        else:
            j = int(np.nonzero((cur >= 0) & (cur * cur == value))[0][0])
        neg = np.minimum(cur, 0.0) ** 2
        order = np.argsort(-neg, kind="stable")
        nz = order[neg[order] > 0]
        if nz.size == 0:
            raise PreconditionError("slack remains but no negative coordinate is left to shrink")
        k = int(nz[-1])
        delta = min(float(np.min(dp[jp:])), float(dp[-1]), float(neg[k]))
        if neg[k] - delta <= tol:
            delta = float(neg[k])
        nxt = cur.copy()
        nxt[j] = np.sqrt(cur[j] * cur[j] + delta)
        nxt[k] = 0.0 if delta >= neg[k] else -np.sqrt(neg[k] - delta)
        steps.append(nxt)
    raise PreconditionError("slack elimination did not terminate")


def _pools(cur, target):
    """Split coordinates for the within-sign phases, appending zeros if short."""
    n_pos_t = int(np.sum(target > 0))
    n_neg_t = int(np.sum(target < 0))
    pos = list(np.nonzero(cur > 0)[0])
    neg = list(np.nonzero(cur < 0)[0])
    zeros = list(np.nonzero(cur == 0)[0])
    while len(pos) < n_pos_t and zeros:
        pos.append(zeros.pop(0))
    neg += zeros
    extra = max(0, n_pos_t - len(pos)) + max(0, n_neg_t - len(neg))
    return pos, neg, extra


def chain_frobenius(mu, lam) -> MajorizationChain:
    """Chain for the indefinite order.

    Phase 1 removes slack with mixed-sign moves (form 1). Phase 2 runs the
    classical chain on squares of the nonnegative coordinates (form 2) and
    phase 3 spreads the negative coordinates toward lam's (form 3). Vectors
    keep mu's coordinate order, zero-padded; at most 3n steps for final
    padded length n.
    """
    if not f_majorizes(mu, lam):
        raise PreconditionError("chain_frobenius needs mu below lam in the indefinite order")
    a, b = _common(mu, lam)
    n0 = max(a.size, 1)
    tol = REL_TOL * max(float(np.sum(b * b)), float(np.sum(a * a)))
    steps, target = _phase_slack(a, b, tol, 4 * n0 + 8)

    cur = steps[-1]
    pos, neg, extra = _pools(cur, target)
    if extra:
        steps = [np.append(s, np.zeros(extra)) for s in steps]
        target = np.append(target, np.zeros(extra))
        cur = steps[-1]
        pos, neg, _ = _pools(cur, target)
    final = np.zeros(cur.size)

    # phase 2: nonnegative coordinates, classical chain on squares
    if pos:
        pos = np.asarray(pos)
        pos = pos[np.argsort(-cur[pos], kind="stable")]
        tp = _desc(target[target > 0])
        tvals = _pad(tp, pos.size)
        x = cur[pos] ** 2
        y = tvals ** 2
        ptol = REL_TOL * max(x.sum(), y.sum())
        path = _mo_steps(x, y, ptol)[::-1]
        for prev, v in zip(path[:-1], path[1:]):
            nxt = steps[-1].copy()
            ch = v != prev
            nxt[pos[ch]] = np.sqrt(v[ch])
            steps.append(nxt)
        final[pos] = tvals

    # phase 3: negative coordinates, transfers from the dominating side
    if neg:
        neg = np.asarray(neg)
        neg = neg[np.argsort(cur[neg], kind="stable")]
        tn = np.sort(target[target < 0])
        tvals = _pad(tn, neg.size)
        x = tvals ** 2
        y = cur[neg] ** 2
        ntol = REL_TOL * max(x.sum(), y.sum())
        path = _mo_steps(x, y, ntol)
        for prev, v in zip(path[:-1], path[1:]):
            nxt = steps[-1].copy()
            ch = v != prev
            nxt[neg[ch]] = -np.sqrt(v[ch])
            steps.append(nxt)
        final[neg] = tvals

    # snap the endpoint to lam's exact values when the gap is rounding only;
    # larger gaps are within the order's square-scale tolerance and are kept
    if len(steps) > 1:
        etol = REL_TOL * max(float(np.max(np.abs(final))), float(np.max(np.abs(steps[-1]))), 1e-300)
        if np.all(np.abs(steps[-1] - final) <= 64 * etol):
            steps[-1] = final
    steps[0] = _pad(a, steps[-1].size)
    return MajorizationChain(steps, "frobenius")


# --------------------------------------------------------------------------
# chain validation
# --------------------------------------------------------------------------

def step_form(prev, nxt, tol: float = 0.0, *, squares: bool = False):
    """Which enumerated two-coordinate form takes ``prev`` to ``nxt``.

    Args:
        tol: changes and entries at most this large count as zero.
        squares: apply ``tol`` to squared entries, matching the tolerance of
            the indefinite order.

    Returns 1, 2 or 3, or None when the step fits none (or moves a number of
    coordinates other than two).
    """
    prev, nxt = np.asarray(prev, dtype=float), np.asarray(nxt, dtype=float)
    if squares:
        moved = np.nonzero(np.abs(nxt * nxt - prev * prev) > tol)[0]
        small_p, small_n = prev * prev <= tol, nxt * nxt <= tol
    else:
        moved = np.nonzero(np.abs(nxt - prev) > tol)[0]
        small_p, small_n = np.abs(prev) <= tol, np.abs(nxt) <= tol
    if moved.size != 2:
        return None
    # entries within tolerance of zero count as zero for the sign patterns
    prev = np.where(small_p, 0.0, prev)
    nxt = np.where(small_n, 0.0, nxt)
    for j, k in (moved, moved[::-1]):
        mj, mk, lj, lk = prev[j], prev[k], nxt[j], nxt[k]
        if mk < lk <= 0 <= mj < lj:
            return 1
        if 0 <= lk < mk <= mj < lj:
            return 2
        if mk < lk <= lj < mj <= 0:
            return 3
    return None


def chain_violations(chain: MajorizationChain, mu, lam) -> list[str]:
    """Every way ``chain`` breaks the chain invariants; empty when valid."""
    problems = []
    steps = chain.steps
    if not steps:
        return ["empty chain"]
    n = steps[0].size
    frob = chain.order_kind == "frobenius"
    a, b = as_vector(mu), as_vector(lam)
    if n < max(a.size, b.size):
        problems.append("chain shorter than inputs")
        return problems
    # rounding-level differences do not count as moved coordinates
    mtol = REL_TOL * max(float(np.max(np.abs(steps[0]))) if n else 0.0, float(np.max(np.abs(steps[-1]))) if n else 0.0)
    # the indefinite order's tolerance is on squares
    stol = REL_TOL * max(float(np.sum(steps[0] * steps[0])), float(np.sum(steps[-1] * steps[-1])), 1e-300)
    if not np.array_equal(steps[0], _pad(a, n)):
        problems.append("first step is not mu")
    # mu and lam within rounding of each other give a one-element chain
    last, want = np.sort(steps[-1]), np.sort(_pad(b, n))
    if frob:
        # the indefinite order compares squares, so tiny entries are within tolerance
        sq = lambda v: v * np.abs(v)
        etol = REL_TOL * max(float(np.sum(last * last)), float(np.sum(want * want)), 1e-300)
        end_ok = np.allclose(sq(last), sq(want), rtol=0.0, atol=etol)
    else:
        end_ok = np.allclose(last, want, rtol=0.0, atol=mtol)
    if not end_ok:
        problems.append("last step is not a permutation of lam")
    conserved = (lambda v: float(np.sum(v * v))) if frob else (lambda v: float(np.sum(v)))
    ref = conserved(steps[0])
    tol = REL_TOL * max(abs(ref), 1e-300)
    order = f_majorizes if frob else majorizes
    for i, (p, q) in enumerate(chain.pairs()):
        if q.size != n:
            problems.append(f"step {i + 1}: length changed")
            continue
        if abs(conserved(q) - ref) > tol:
            problems.append(f"step {i + 1}: conserved quantity drifted")
        moved = np.count_nonzero(np.abs(q * q - p * p) > stol if frob else np.abs(p - q) > mtol)
        if moved > 2:
            problems.append(f"step {i + 1}: more than two coordinates changed")
        if not order(p, q):
            problems.append(f"step {i + 1}: order violated")
        if moved == 0:
            continue  # a rounding-level residue move
        form = step_form(p, q, stol, squares=True) if frob else step_form(p, q, mtol)
        if frob and form is None:
            problems.append(f"step {i + 1}: not one of the enumerated forms")
        if not frob and form != 2:
            problems.append(f"step {i + 1}: not a smaller-to-larger transfer")
    return problems
