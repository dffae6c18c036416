"""Linear combinations of independent Gamma variables.

``GammaMix`` is the shared-shape form Q(w; a, b) = sum_i w_i X_i with
X_i ~ Gamma(a, b) i.i.d.; the Gaussian trace estimator of a symmetric
matrix with eigenvalues w and m probe vectors has exactly the law
Q(w; m/2, m/2). ``GeneralGammaSum`` lets every term carry its own shape and
rate, which is what the perturbed densities (a mixture plus two
exponentials) need.

Distribution functions are obtained by Fourier inversion of the
characteristic function, since weights of both signs rule out the usual
one-sided series. See :class:`_Inverter` for the quadrature scheme.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateDistributionError, PreconditionError
from .gamma_core import GammaParams, gamma_cdf, gamma_pdf_derivative, gamma_sf

# minimum total shape above the derivative order for the density integral
SHAPE_MARGIN = 0.25

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True, eq=False)
class GeneralGammaSum:
    """sum_i weights[i] * X_i with X_i ~ Gamma(shapes[i], rates[i]) independent."""

    weights: np.ndarray
    shapes: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=np.float64))
        a = np.broadcast_to(np.asarray(self.shapes, dtype=np.float64), w.shape).copy()
        b = np.broadcast_to(np.asarray(self.rates, dtype=np.float64), w.shape).copy()
        if w.size == 0:
            raise PreconditionError("a Gamma sum needs at least one term")
        if not np.all(np.isfinite(w)):
            raise PreconditionError("weights must be finite")
        if not (np.all(a > 0) and np.all(b > 0) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise PreconditionError("shapes and rates must be positive and finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "shapes", a)
        object.__setattr__(self, "rates", b)

    @classmethod
    def from_terms(cls, terms):
        """Build from an iterable of (weight, shape, rate) triples."""
        arr = np.asarray(list(terms), dtype=np.float64).reshape(-1, 3)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2])

    def terms(self):
        return list(zip(self.weights.tolist(), self.shapes.tolist(), self.rates.tolist()))

    def append(self, weight, shape, rate) -> "GeneralGammaSum":
        return GeneralGammaSum(np.append(self.weights, weight), np.append(self.shapes, shape),
                               np.append(self.rates, rate))

    def __len__(self):
        return self.weights.size


@dataclass(frozen=True, eq=False)
class GammaMix:
    """Q(weights; shape, rate): i.i.d. Gamma(shape, rate) variables, weighted."""

    weights: np.ndarray
    shape: float
    rate: float

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=np.float64))
        if w.size == 0 or not np.all(np.isfinite(w)):
            raise PreconditionError("weights must be a finite, non-empty vector")
        if not (self.shape > 0 and self.rate > 0):
            raise PreconditionError("shape and rate must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "shape", float(self.shape))
        object.__setattr__(self, "rate", float(self.rate))

    def general(self) -> GeneralGammaSum:
        return GeneralGammaSum(self.weights, self.shape, self.rate)

    def __len__(self):
        return self.weights.size


def as_general(q) -> GeneralGammaSum:
    if isinstance(q, GeneralGammaSum):
        return q
    if isinstance(q, GammaMix):
        return q.general()
    if isinstance(q, GammaParams):
        return GeneralGammaSum(np.ones(1), q.shape, q.rate)
    raise TypeError(f"expected a Gamma sum, got {type(q).__name__}")


# --------------------------------------------------------------------------
# moments and summary statistics
# --------------------------------------------------------------------------

def mix_mean(q) -> float:
    g = as_general(q)
    return float(np.sum(g.weights * g.shapes / g.rates))


def mix_variance(q) -> float:
    g = as_general(q)
    return float(np.sum(g.weights ** 2 * g.shapes / g.rates ** 2))


def mix_scale(q) -> float:
    """max_i |w_i| / rate_i, the per-sample analogue of the 2-norm."""
    g = as_general(q)
    return float(np.max(np.abs(g.weights) / g.rates))


def effective_shape(q: GammaMix) -> float:
    """shape * sum(w) / max(w) for nonnegative weights."""
    w = q.weights
    if np.any(w < 0):
        raise PreconditionError("effective shape needs nonnegative weights")
    if not np.any(w > 0):
        raise PreconditionError("effective shape of the zero mixture is undefined")
    return float(q.shape * w.sum() / w.max())


def trace_estimator_law(s, m: int) -> GammaMix:
    """Exact law of the m-sample Gaussian trace estimator for eigenvalues ``s``."""
    if m < 1:
        raise PreconditionError("m must be a positive integer")
    return GammaMix(np.asarray(s, dtype=np.float64), m / 2.0, m / 2.0)


def divide(q: GammaMix, T: int) -> GammaMix:
    """Same law written with T copies of every weight and shape / T."""
    if T < 1 or int(T) != T:
        raise PreconditionError("T must be a positive integer")
    return GammaMix(np.tile(q.weights, int(T)), q.shape / T, q.rate)


# --------------------------------------------------------------------------
# characteristic function
# --------------------------------------------------------------------------

def _reduced(q):
    """Nonzero terms as (scales c_i = w_i / b_i, shapes), equal scales merged."""
    g = as_general(q)
    c = g.weights / g.rates
    keep = c != 0
    c, a = c[keep], g.shapes[keep]
    if c.size == 0:
        return c, a
    uniq, inv = np.unique(c, return_inverse=True)
    return uniq, np.bincount(inv, weights=a)


def mix_cf(q, u):
    """E[exp(i u Q)], summing principal-branch logs before exponentiating."""
    g = as_general(q)
    c = g.weights / g.rates
    us = np.asarray(u, dtype=np.float64)
    out = np.exp(_kernels.log_cf(us.ravel(), c, g.shapes)).reshape(us.shape)
    return out[()] if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Fourier inversion
# --------------------------------------------------------------------------

class _Inverter:
    """Fourier inversion for one Gamma sum, in units of its standard deviation.

    For p = -1 the target is the Gil-Pelaez integral of phi(u)/u, for
    p = k >= 0 the k-th density derivative integral of (-iu)^k phi(u).
    Both are I(x) = int_0^inf exp(-iux) h(u) du with |h(u)| ~ u^(p - S) at
    infinity (S = total shape). The integral is split as

    * [0, U]: composite 20-point Gauss-Legendre, panel widths bounded by the
      local oscillation period and the decay scale of |phi|;
    * [U, inf): integration-by-parts expansion
      exp(-iUx) sum_j h^(j)(U) / (ix)^(j+1), with h^(j) from the complete
      Bell polynomials of the log-derivatives of h. The expansion is used
      only where U|x| is large; points closer to 0 get a longer quadrature
      range of their own.
    """

    TOL_CORE = 1e-5
    TOL_FULL = 1e-16
    TERMS = 10
    U_CORE_MAX = 1e3

    def __init__(self, c, a):
        self.sigma = math.sqrt(float(np.sum(a * c * c)))
        self.c = c / self.sigma
        self.a = a
        self.total_shape = float(a.sum())
        self.ca = np.abs(self.c) * self.a
        self.c2a = self.c * self.c * self.a
        self._lim = {}

    # |phi| is monotone in u, so thresholds are found by bisection in log u
    def _log_abs_phi(self, u):
        uc = np.abs(u * self.c)
        big = uc > 1e100
        safe = np.where(big, 1.0, uc)
        terms = np.where(big, 2.0 * np.log(np.where(big, uc, 1.0)), np.log1p(safe * safe))
        return float(-0.5 * np.sum(self.a * terms))

    def _solve(self, fn, target):
        lo, hi = math.log(1e-3), math.log(1e300)
        if fn(math.exp(lo)) <= target:
            return math.exp(lo)
        if fn(math.exp(hi)) > target:
            return math.inf
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if fn(math.exp(mid)) > target:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-10:
                break
        return math.exp(hi)

    def _limits(self, p):
        if p not in self._lim:
            self._lim[p] = self._solve_limits(p)
        return self._lim[p]

    def _solve_limits(self, p):
        sp = self.total_shape - p
        if sp > 1.0:
            u_full = self._solve(lambda u: self._log_abs_phi(u) + (p + 1) * math.log(u) - math.log(sp - 1.0),
                                 math.log(self.TOL_FULL))
        else:
            u_full = math.inf
        u_core = self._solve(lambda u: self._log_abs_phi(u) + p * math.log(u), math.log(self.TOL_CORE))
        # slowly decaying integrands (total shape near the order) would push
        # u_core out by many decades; the tail series only needs u |x| large
        u_core = max(min(u_core, u_full, self.U_CORE_MAX), 1.0)
        reach = max(60.0, 3.0 * (sp + self.TERMS))
        return u_core, u_full, reach

    def _nodes(self, u0, u1, xabs):
        pts = _kernels.quad_breaks(u0, u1, xabs, self.c, self.ca, self.c2a)
        left, width = pts[:-1], np.diff(pts)
        nodes = (left[:, None] + 0.5 * width[:, None] * (_GL_X[None, :] + 1.0)).ravel()
        weights = (0.5 * width[:, None] * _GL_W[None, :]).ravel()
        return nodes, weights

    def _h(self, u, p):
        return np.exp(_kernels.log_cf(u, self.c, self.a) + p * np.log(u))

    def _tail(self, U, x, p):
        """Asymptotic value of int_U^inf exp(-iux) h(u) du for each x."""
        U = np.asarray(U, dtype=np.float64) * np.ones_like(x)
        J = self.TERMS
        hU = self._h(U, p)
        one = 1.0 - 1j * np.multiply.outer(U, self.c)
        ic = 1j * self.c
        ell = []
        fact = 1.0
        for j in range(1, J + 1):
            term = np.sum(self.a * ic ** j / one ** j, axis=-1)
            ell.append(fact * (term + p * (-1.0) ** (j - 1) / U ** j))
            fact *= j
        bell = [np.ones_like(hU)]
        for n in range(J - 1):
            acc = np.zeros_like(hU)
            for i in range(n + 1):
                acc = acc + math.comb(n, i) * bell[n - i] * ell[i]
            bell.append(acc)
        ix = 1j * x
        s = np.zeros_like(hU)
        for j in range(J):
            s = s + bell[j] / ix ** (j + 1)
        return np.exp(-1j * U * x) * hU * s

    def integral(self, x, p):
        """I(x) for standardised x (1-d array)."""
        u_core, u_full, reach = self._limits(p)
        out = np.empty(x.shape, dtype=np.complex128)
        asym = u_core < u_full
        near = np.abs(x) * u_core < reach if asym else np.zeros(x.shape, bool)
        far = ~near
        if np.any(far):
            xf = x[far]
            nodes, weights = self._nodes(0.0, u_core, float(np.max(np.abs(xf))))
            core = _kernels.fourier_sum(xf, nodes, weights * self._h(nodes, p))
            if asym:
                core = core + self._tail(u_core, xf, p)
            out[far] = core
        if np.any(near):
            # shared head on [0, u_core]; the rest in bands of |x| within a
            # factor of two, each band sharing one extended range
            xn = x[near]
            nodes, weights = self._nodes(0.0, u_core, float(np.max(np.abs(xn))))
            head = _kernels.fourier_sum(xn, nodes, weights * self._h(nodes, p))
            ax = np.abs(xn)
            band = np.full(ax.shape, -1, dtype=np.int64)
            pos = ax > 0
            band[pos] = np.floor(np.log2(reach / (ax[pos] * u_core))).astype(np.int64)
            for b in np.unique(band):
                sel = band == b
                xb = xn[sel]
                lo, hi = float(np.min(np.abs(xb))), float(np.max(np.abs(xb)))
                u_end = reach / lo if lo > 0 else math.inf
                if u_end >= u_full:
                    if not math.isfinite(u_full):
                        raise PreconditionError(
                            "inversion integral diverges at this point; total shape too small for the requested order")
                    nodes, weights = self._nodes(u_core, u_full, hi)
                    head[sel] += _kernels.fourier_sum(xb, nodes, weights * self._h(nodes, p))
                else:
                    nodes, weights = self._nodes(u_core, u_end, hi)
                    head[sel] += _kernels.fourier_sum(xb, nodes, weights * self._h(nodes, p))
                    head[sel] += self._tail(u_end, xb, p)
            out[near] = head
        return out


@functools.lru_cache(maxsize=64)
def _cached_inverter(cb: bytes, ab: bytes) -> _Inverter:
    return _Inverter(np.frombuffer(cb), np.frombuffer(ab))


def _inverter(c, a) -> _Inverter:
    # root finders call back with one x at a time on the same law
    return _cached_inverter(np.ascontiguousarray(c, np.float64).tobytes(),
                            np.ascontiguousarray(a, np.float64).tobytes())


def _single_gamma(c, a):
    """(GammaParams, sign) when the reduced sum is one scaled Gamma."""
    if c.size == 1:
        return GammaParams(float(a[0]), 1.0 / abs(float(c[0]))), (1 if c[0] > 0 else -1)
    return None


def _prepare(q):
    c, a = _reduced(q)
    if c.size == 0:
        raise DegenerateDistributionError("all weights are zero")
    return c, a


def mix_cdf(q, x, *, closed_form: bool = True):
    """P(Q <= x) by Gil-Pelaez inversion.

    A sum that reduces to one scaled Gamma (every nonzero w_i / b_i equal) is
    evaluated in closed form unless ``closed_form=False``.
    """
    c, a = _prepare(q)
    xs = np.asarray(x, dtype=np.float64)
    flat = xs.ravel()
    out = np.empty(flat.shape)
    single = _single_gamma(c, a) if closed_form else None
    if single is not None:
        gp, sign = single
        out[:] = gamma_cdf(gp, flat) if sign > 0 else gamma_sf(gp, -flat)
        out[(sign < 0) & (flat >= 0)] = 1.0
        return out.reshape(xs.shape)[()] if xs.ndim == 0 else out.reshape(xs.shape)
    todo = np.ones(flat.shape, bool)
    if np.all(c > 0):
        out[flat <= 0] = 0.0
        todo &= flat > 0
    elif np.all(c < 0):
        out[flat >= 0] = 1.0
        todo &= flat < 0
    if np.any(todo):
        inv = _inverter(c, a)
        val = 0.5 - inv.integral(flat[todo] / inv.sigma, -1).imag / math.pi
        out[todo] = np.clip(val, 0.0, 1.0)
    return out.reshape(xs.shape)[()] if xs.ndim == 0 else out.reshape(xs.shape)


def mix_pdf(q, x, derivative_order: int = 0, *, closed_form: bool = True):
    """Density (or its first/second derivative) by Fourier inversion.

    Raises:
        PreconditionError: total shape not above ``derivative_order`` plus
            :data:`SHAPE_MARGIN`.
    """
    k = int(derivative_order)
    if k not in (0, 1, 2):
        raise PreconditionError("derivative order must be 0, 1 or 2")
    c, a = _prepare(q)
    xs = np.asarray(x, dtype=np.float64)
    flat = xs.ravel()
    out = np.zeros(flat.shape)
    single = _single_gamma(c, a) if closed_form else None
    if single is not None:
        gp, sign = single
        vals = gamma_pdf_derivative(gp, sign * flat, k)
        out[:] = vals * (sign ** k)
        return out.reshape(xs.shape)[()] if xs.ndim == 0 else out.reshape(xs.shape)
    if a.sum() <= k + SHAPE_MARGIN:
        raise PreconditionError(f"total shape {a.sum():g} too small for derivative order {k}")
    todo = np.ones(flat.shape, bool)
    if np.all(c > 0):
        todo &= flat > 0
    elif np.all(c < 0):
        todo &= flat < 0
    if np.any(todo):
        inv = _inverter(c, a)
        val = ((-1j) ** k * inv.integral(flat[todo] / inv.sigma, k)).real / math.pi
        out[todo] = val / inv.sigma ** (k + 1)
    return out.reshape(xs.shape)[()] if xs.ndim == 0 else out.reshape(xs.shape)


def mix_sample(q, n: int, seed: int) -> np.ndarray:
    """``n`` draws of sum_i w_i X_i; term i uses counter stream i + 1."""
    if n < 0:
        raise PreconditionError("n must be nonnegative")
    g = as_general(q)
    out = np.zeros(n)
    if n == 0:
        return out
    for i, (w, a, b) in enumerate(g.terms()):
        if w != 0:
            out += (w / b) * _kernels.gammas(seed, i + 1, 0, n, a)
    return out
