"""Monte Carlo Gaussian trace estimator on spectra and dense matrices.

Gaussian draws are counter-indexed: estimate r of a run with m probes over
an n-entry spectrum uses normals ((start + r) * m + j) * n + i on stream 0,
so results do not depend on how reps are batched.
"""
from __future__ import annotations

import contextlib
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import PreconditionError
from .majorization import as_vector

_injected: np.ndarray | None = None


@contextlib.contextmanager
def inject_gaussians(values):
    """Test hook: the next estimate_trace calls use ``values`` as the Gaussians.

    ``values`` is reshaped to (m, n). Only available while pytest is loaded.
    """
    global _injected
    if "pytest" not in sys.modules:
        raise RuntimeError("inject_gaussians is a test-only hook")
    _injected = np.asarray(values, dtype=np.float64)
    try:
        yield
    finally:
        _injected = None


@dataclass(frozen=True)
class EstimatorRun:
    spectrum: np.ndarray
    m: int
    reps: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "spectrum", as_vector(self.spectrum))
        if self.m < 1:
            raise PreconditionError("m must be at least 1")
        if self.reps < 0:
            raise PreconditionError("reps must be nonnegative")

    @property
    def trace(self) -> float:
        return float(self.spectrum.sum())


def estimate_trace(s, m: int, seed: int) -> float:
    """(1/m) sum_j sum_i s_i g_ij^2 with standard normal g (one realization)."""
    v = as_vector(s)
    if m < 1:
        raise PreconditionError("m must be at least 1")
    if _injected is not None:
        g = _injected.reshape(m, v.size)
        return float(np.sum(g * g * v) / m)
    return float(_kernels.trace_estimates(seed, v, m, 1)[0])


def run_estimates(run: EstimatorRun, start: int = 0) -> np.ndarray:
    """All ``run.reps`` estimates; rep r equals the r-th counter block."""
    if run.reps == 0:
        return np.empty(0)
    return _kernels.trace_estimates(run.seed, run.spectrum, run.m, run.reps, start)


@dataclass(frozen=True)
class TailFrequency:
    frequency: float
    half_width: float
    exceed: int
    reps: int


def empirical_tail(run: EstimatorRun, eps: float, mode: str = "absolute",
                   estimates: np.ndarray | None = None) -> TailFrequency:
    """Fraction of reps with |estimate - trace| >= eps (times |trace| if relative).

    ``half_width`` is the normal-approximation 95% binomial half-width.
    Precomputed ``estimates`` for the same run may be passed to reuse draws.
    """
    if run.reps < 1:
        raise PreconditionError("empirical_tail needs reps >= 1")
    if eps < 0:
        raise PreconditionError("epsilon must be nonnegative")
    tr = run.trace
    if mode == "relative":
        if tr == 0:
            raise PreconditionError("relative mode needs a nonzero trace")
        thr = eps * abs(tr)
    elif mode == "absolute":
        thr = eps
    else:
        raise PreconditionError("mode must be 'absolute' or 'relative'")
    est = run_estimates(run) if estimates is None else estimates
    k = int(np.count_nonzero(np.abs(est - tr) >= thr))
    p = k / run.reps
    return TailFrequency(p, 1.96 * math.sqrt(p * (1.0 - p) / run.reps), k, run.reps)


def _check_symmetric(a):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise PreconditionError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-10):
        raise PreconditionError("matrix must be symmetric within 1e-10")
    return a


def dense_estimate(matrix, m: int, seed: int) -> float:
    """(1/m) sum_j z_j^T A z_j on a dense symmetric matrix (counter stream 1)."""
    return float(dense_estimates(matrix, m, 1, seed)[0])


def dense_estimates(matrix, m: int, reps: int, seed: int, start: int = 0) -> np.ndarray:
    """``reps`` dense-matrix estimates; rep r uses the same counter layout as spectra."""
    a = _check_symmetric(matrix)
    if m < 1:
        raise PreconditionError("m must be at least 1")
    n = a.shape[0]
    out = np.empty(reps)
    per = max(1, (1 << 20) // max(1, m * n))
    for r0 in range(0, reps, per):
        r1 = min(reps, r0 + per)
        idx = np.arange((start + r0) * m * n, (start + r1) * m * n, dtype=np.uint64)
        z = _kernels.normals(seed, 1, idx).reshape(r1 - r0, m, n)
        out[r0:r1] = np.einsum("rjn,nk,rjk->r", z, a, z) / m
    return out
