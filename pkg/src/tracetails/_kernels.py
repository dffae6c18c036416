"""Hot numeric kernels.

Every kernel exists as a plain-Python loop (compiled with ``njit`` when
numba is active) and as a vectorised numpy function. The public names at
the bottom of the module pick one of the two according to
:data:`tracetails._accel.USE_NUMBA`; both variants stay importable so the
benchmark and the cross-backend tests can run them side by side.
"""
import math

import numpy as np
from scipy import special

from ._accel import USE_NUMBA, njit
from .errors import NumericalError

# splitmix64 constants
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_STREAM = np.uint64(0xD1B54A32D192ED03)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TWO_M53 = 2.0 ** -53

# Gamma variates get a block of counters each; attempt a of draw i uses
# counters i*_BLOCK + 2a and i*_BLOCK + 2a + 1, the boost uniform for
# shape < 1 uses the last slot.
_BLOCK = 64
_MAX_ATTEMPTS = 31

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


# --------------------------------------------------------------------------
# counter-based uniforms
# --------------------------------------------------------------------------

@njit
def _mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit
def _stream_key(seed, stream):
    base = _mix64(np.uint64(seed) + _GOLDEN)
    return _mix64(base ^ (np.uint64(stream) * _STREAM))


@njit
def _uniform_at(key, idx):
    z = _mix64(key + (np.uint64(idx) + np.uint64(1)) * _GOLDEN)
    return (float(z >> _S11) + 0.5) * _TWO_M53


if not USE_NUMBA:
    # run as plain Python the scalar uint64 wraparound is intended, not an error
    def _quiet(fn):
        def inner(*args):
            with np.errstate(over="ignore"):
                return fn(*args)
        return inner

    _mix64, _stream_key, _uniform_at = _quiet(_mix64), _quiet(_stream_key), _quiet(_uniform_at)


def _mix64_np(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _stream_key_np(seed, stream):
    base = _mix64_np(np.array([seed], dtype=np.uint64) + _GOLDEN)
    return _mix64_np(base ^ (np.array([stream], dtype=np.uint64) * _STREAM))[0]


def uniforms_np(seed, stream, idx):
    key = _stream_key_np(seed, stream)
    idx = np.asarray(idx, dtype=np.uint64)
    z = _mix64_np(key + (idx + np.uint64(1)) * _GOLDEN)
    return ((z >> _S11).astype(np.float64) + 0.5) * _TWO_M53


@njit
def _uniforms_loop(seed, stream, idx):
    key = _stream_key(seed, stream)
    out = np.empty(idx.shape[0])
    for i in range(idx.shape[0]):
        out[i] = _uniform_at(key, idx[i])
    return out


def uniforms_nb(seed, stream, idx):
    return _uniforms_loop(np.uint64(seed), np.uint64(stream), np.asarray(idx, dtype=np.uint64))


# --------------------------------------------------------------------------
# standard normal quantile (Acklam's rational approximation + Halley step)
# --------------------------------------------------------------------------

_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)


@njit
def _ndtri_lower(p):
    """Inverse normal CDF for 0 < p <= 1/2."""
    if p < 0.02425:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
            ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    else:
        q = p - 0.5
        r = q * q
        x = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
            (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
    # one Halley step brings the 1e-9 approximation to full precision
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = e * _SQRT_2PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


@njit
def _ndtri_scalar(p):
    # 1 - p is exact above 1/2, so the upper half reuses the accurate lower tail
    if p > 0.5:
        return -_ndtri_lower(1.0 - p)
    return _ndtri_lower(p)


@njit
def _normals_loop(seed, stream, idx):
    key = _stream_key(seed, stream)
    out = np.empty(idx.shape[0])
    for i in range(idx.shape[0]):
        out[i] = _ndtri_scalar(_uniform_at(key, idx[i]))
    return out


def normals_nb(seed, stream, idx):
    return _normals_loop(np.uint64(seed), np.uint64(stream), np.asarray(idx, dtype=np.uint64))


def normals_np(seed, stream, idx):
    return special.ndtri(uniforms_np(seed, stream, idx))


# --------------------------------------------------------------------------
# Gamma(shape, 1) variates, Marsaglia-Tsang with counter-indexed attempts
# --------------------------------------------------------------------------

@njit
def _gamma_one(key, i, shape):
    boost = 1.0
    a = shape
    base = np.uint64(i) * np.uint64(_BLOCK)
    if shape < 1.0:
        a = shape + 1.0
        boost = _uniform_at(key, base + np.uint64(_BLOCK - 1)) ** (1.0 / shape)
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    v = 1.0
    for att in range(_MAX_ATTEMPTS):
        z = _ndtri_scalar(_uniform_at(key, base + np.uint64(2 * att)))
        v = 1.0 + c * z
        if v <= 0.0:
            continue
        v = v * v * v
        u = _uniform_at(key, base + np.uint64(2 * att + 1))
        if math.log(u) < 0.5 * z * z + d - d * v + d * math.log(v):
            break
    return d * v * boost


@njit
def _gammas_loop(seed, stream, start, n, shape):
    key = _stream_key(seed, stream)
    out = np.empty(n)
    for i in range(n):
        out[i] = _gamma_one(key, start + i, shape)
    return out


def gammas_nb(seed, stream, start, n, shape):
    return _gammas_loop(np.uint64(seed), np.uint64(stream), np.int64(start), np.int64(n), float(shape))


def gammas_np(seed, stream, start, n, shape):
    idx = np.arange(start, start + n, dtype=np.uint64)
    base = idx * np.uint64(_BLOCK)
    boost = np.ones(n)
    a = shape
    if shape < 1.0:
        a = shape + 1.0
        boost = uniforms_np(seed, stream, base + np.uint64(_BLOCK - 1)) ** (1.0 / shape)
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.full(n, d)
    pending = np.arange(n)
    for att in range(_MAX_ATTEMPTS):
        if pending.size == 0:
            break
        b = base[pending]
        z = normals_np(seed, stream, b + np.uint64(2 * att))
        v = 1.0 + c * z
        ok = v > 0.0
        v = np.where(ok, v, 1.0) ** 3
        u = uniforms_np(seed, stream, b + np.uint64(2 * att + 1))
        accept = ok & (np.log(u) < 0.5 * z * z + d - d * v + d * np.log(v))
        # the last attempt keeps its candidate, matching the loop kernel
        done = accept | (att == _MAX_ATTEMPTS - 1)
        out[pending[done]] = d * v[done]
        pending = pending[~done]
    return out * boost


# --------------------------------------------------------------------------
# regularised incomplete gamma
# --------------------------------------------------------------------------

@njit
def _log1pmx(t):
    """log(1 + t) - t without cancellation for small |t|."""
    if abs(t) > 0.25:
        return math.log1p(t) - t
    y = t / (2.0 + t)
    y2 = y * y
    term = y * y2
    acc = 0.0
    k = 3.0
    while True:
        add = term / k
        acc += add
        if abs(add) <= 1e-17 * abs(acc):
            break
        term *= y2
        k += 2.0
    return -t * t / (2.0 + t) + 2.0 * acc


@njit
def _stirlerr(a):
    """lgamma(a) - [(a - 1/2) log a - a + log sqrt(2 pi)]."""
    if a < 15.0:
        return math.lgamma(a) - ((a - 0.5) * math.log(a) - a + _LN_SQRT_2PI)
    r = 1.0 / a
    r2 = r * r
    return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))))


@njit
def log_gamma_kernel(a, x):
    """log of x**a * exp(-x) / Gamma(a), stable for large a."""
    if a < 15.0:
        return a * math.log(x) - x - math.lgamma(a)
    r = x / a
    t = r - 1.0
    # far from x = a, 1 + t loses digits; use the ratio itself
    lpm = math.log(r) + 1.0 - r if abs(t) > 0.25 else _log1pmx(t)
    return a * lpm + 0.5 * math.log(a) - _LN_SQRT_2PI - _stirlerr(a)


@njit
def _log_kernel_loop(a, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = log_gamma_kernel(a, x[i])
    return out


def log_kernel_nb(a, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _log_kernel_loop(float(a), x.ravel()).reshape(x.shape)


def log_kernel_np(a, x):
    x = np.asarray(x, dtype=np.float64)
    if a < 15.0:
        return a * np.log(x) - x - math.lgamma(a)
    r = x / a
    t = r - 1.0
    y = t / (2.0 + t)
    y2 = y * y
    acc = np.zeros_like(y)
    term = y * y2
    for k in range(3, 80, 2):
        acc += term / k
        term = term * y2
    small = -t * t / (2.0 + t) + 2.0 * acc
    with np.errstate(divide="ignore"):
        lpm = np.where(np.abs(t) > 0.25, np.log(r) + 1.0 - r, small)
    return a * lpm + 0.5 * math.log(a) - _LN_SQRT_2PI - _stirlerr(a)


@njit
def gammainc_pq(a, x):
    """Regularised lower and upper incomplete gamma (P, Q)."""
    if x <= 0.0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    lk = log_gamma_kernel(a, x)
    if x < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(200000):
            ap += 1.0
            term *= x / ap
            total += term
            if term < total * 1e-17:
                break
        p = math.exp(lk) * total
        if p > 1.0:
            p = 1.0
        return p, 1.0 - p
    # modified Lentz on the continued fraction for Q
    tiny = 1e-300
    b = x + 1.0 - a
    cc = 1.0 / tiny
    dd = 1.0 / b
    h = dd
    for i in range(1, 200000):
        an = -i * (i - a)
        b += 2.0
        dd = an * dd + b
        if abs(dd) < tiny:
            dd = tiny
        cc = b + an / cc
        if abs(cc) < tiny:
            cc = tiny
        dd = 1.0 / dd
        delta = dd * cc
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    q = math.exp(lk) * h
    if q > 1.0:
        q = 1.0
    return 1.0 - q, q


@njit
def _gammainc_loop(a, x, upper):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        p, q = gammainc_pq(a, x[i])
        out[i] = q if upper else p
    return out


def gammainc_nb(a, x, upper=False):
    x = np.asarray(x, dtype=np.float64)
    return _gammainc_loop(float(a), np.ascontiguousarray(x.ravel()), upper).reshape(x.shape)


def gammainc_np(a, x, upper=False):
    x = np.asarray(x, dtype=np.float64)
    k = 1 if upper else 0
    out = np.fromiter((gammainc_pq(a, float(v))[k] for v in x.ravel()), dtype=np.float64, count=x.size)
    return out.reshape(x.shape)


# --------------------------------------------------------------------------
# characteristic function and Fourier sums
# --------------------------------------------------------------------------

@njit
def _log_cf_loop(u, c, a):
    re = np.empty(u.shape[0])
    im = np.empty(u.shape[0])
    for k in range(u.shape[0]):
        sr = 0.0
        si = 0.0
        for i in range(c.shape[0]):
            uc = u[k] * c[i]
            sr -= 0.5 * a[i] * math.log1p(uc * uc)
            si += a[i] * math.atan(uc)
        re[k] = sr
        im[k] = si
    return re, im


def log_cf_nb(u, c, a):
    re, im = _log_cf_loop(np.ascontiguousarray(u, dtype=np.float64),
                          np.ascontiguousarray(c, dtype=np.float64),
                          np.ascontiguousarray(a, dtype=np.float64))
    return re + 1j * im


def log_cf_np(u, c, a):
    uc = np.multiply.outer(np.asarray(u, dtype=np.float64), c)
    return (-0.5 * np.log1p(uc * uc)) @ a + 1j * (np.arctan(uc) @ a)


@njit
def _fourier_loop(x, u, hr, hi):
    out_r = np.empty(x.shape[0])
    out_i = np.empty(x.shape[0])
    for j in range(x.shape[0]):
        sr = 0.0
        si = 0.0
        for k in range(u.shape[0]):
            ph = u[k] * x[j]
            cs = math.cos(ph)
            sn = math.sin(ph)
            # (hr + i hi) * (cos - i sin)
            sr += hr[k] * cs + hi[k] * sn
            si += hi[k] * cs - hr[k] * sn
        out_r[j] = sr
        out_i[j] = si
    return out_r, out_i


def fourier_sum_nb(x, u, hw):
    """sum_k hw[k] * exp(-1j * u[k] * x) for every x."""
    r, i = _fourier_loop(np.ascontiguousarray(x, dtype=np.float64),
                         np.ascontiguousarray(u, dtype=np.float64),
                         np.ascontiguousarray(hw.real), np.ascontiguousarray(hw.imag))
    return r + 1j * i


def fourier_sum_np(x, u, hw, chunk=256):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty(x.shape[0], dtype=np.complex128)
    for s in range(0, x.shape[0], chunk):
        ph = np.multiply.outer(x[s:s + chunk], u)
        out[s:s + chunk] = np.exp(-1j * ph) @ hw
    return out


@njit
def _breaks_step(u, u1, xabs, c, ca, c2a):
    om = xabs
    rate = 0.0
    for i in range(c.shape[0]):
        uc2 = (u * c[i]) ** 2
        om += ca[i] / (1.0 + uc2)
        rate += c2a[i] * u / (1.0 + uc2)
    w = min(2.0 * math.pi / om, max(0.5 * u, 0.5))
    if rate > 0:
        w = min(w, 3.0 / rate)
    return min(u + w, u1)


# more panels than this means a runaway integration range
MAX_PANELS = 2_000_000


@njit
def _breaks_loop(u0, u1, xabs, c, ca, c2a):
    n = 1
    u = u0
    while u < u1:
        u = _breaks_step(u, u1, xabs, c, ca, c2a)
        n += 1
        if n > MAX_PANELS:
            return np.empty(0)
    out = np.empty(n)
    out[0] = u0
    u = u0
    for i in range(1, n):
        u = _breaks_step(u, u1, xabs, c, ca, c2a)
        out[i] = u
    return out


def quad_breaks_nb(u0, u1, xabs, c, ca, c2a):
    """Panel edges on [u0, u1]: each panel spans at most one oscillation of
    exp(-iux) h(u) and a bounded change of log|h|."""
    pts = _breaks_loop(float(u0), float(u1), float(xabs), np.ascontiguousarray(c, dtype=np.float64),
                       np.ascontiguousarray(ca, dtype=np.float64), np.ascontiguousarray(c2a, dtype=np.float64))
    if pts.size == 0:
        raise NumericalError(f"quadrature on [{u0:g}, {u1:g}] needs more than {MAX_PANELS} panels")
    return pts


def quad_breaks_np(u0, u1, xabs, c, ca, c2a):
    pts = [u0]
    u = u0
    while u < u1:
        uc2 = (u * c) ** 2
        om = xabs + float(np.sum(ca / (1.0 + uc2)))
        rate = float(np.sum(c2a * u / (1.0 + uc2)))
        w = min(2.0 * math.pi / om, max(0.5 * u, 0.5))
        if rate > 0:
            w = min(w, 3.0 / rate)
        u = min(u + w, u1)
        pts.append(u)
        if len(pts) > MAX_PANELS:
            raise NumericalError(f"quadrature on [{u0:g}, {u1:g}] needs more than {MAX_PANELS} panels")
    return np.asarray(pts)


@njit
def _trace_estimates_loop(seed, s, m, reps, start):
    key = _stream_key(seed, np.uint64(0))
    n = s.shape[0]
    out = np.empty(reps)
    for r in range(reps):
        acc = 0.0
        base = (start + r) * m * n
        for j in range(m):
            for i in range(n):
                g = _ndtri_scalar(_uniform_at(key, base + j * n + i))
                acc += s[i] * g * g
        out[r] = acc / m
    return out


def trace_estimates_nb(seed, s, m, reps, start=0):
    return _trace_estimates_loop(np.uint64(seed), np.ascontiguousarray(s, dtype=np.float64),
                                 np.int64(m), np.int64(reps), np.int64(start))


def trace_estimates_np(seed, s, m, reps, start=0, chunk=1 << 20):
    s = np.asarray(s, dtype=np.float64)
    n = s.shape[0]
    out = np.empty(reps)
    per = max(1, chunk // max(1, m * n))
    for r0 in range(0, reps, per):
        r1 = min(reps, r0 + per)
        idx = np.arange((start + r0) * m * n, (start + r1) * m * n, dtype=np.uint64)
        g = normals_np(seed, 0, idx).reshape(r1 - r0, m, n)
        out[r0:r1] = np.einsum("rjn,n->r", g * g, s) / m
    return out


if USE_NUMBA:
    uniforms = uniforms_nb
    normals = normals_nb
    gammas = gammas_nb
    gammainc = gammainc_nb
    log_kernel = log_kernel_nb
    log_cf = log_cf_nb
    fourier_sum = fourier_sum_nb
    quad_breaks = quad_breaks_nb
    trace_estimates = trace_estimates_nb
else:
    uniforms = uniforms_np
    normals = normals_np
    gammas = gammas_np
    gammainc = gammainc_np
    log_kernel = log_kernel_np
    log_cf = log_cf_np
    fourier_sum = fourier_sum_np
    quad_breaks = quad_breaks_np
    trace_estimates = trace_estimates_np
