"""Exponential tilting and (robust) exponentially tilted empirical likelihood.

For a matrix ``g`` whose rows are moment-function values g(x_i; theta) the
tilting vector is the minimiser of ``sum_i exp(lambda' g_i)``.  The implied
probabilities are the softmax of ``g @ lambda`` and the ETEL is their
product.  When the origin is not in the interior of the convex hull of the
rows the minimum is not attained; this is reported as ``hull_ok=False``
rather than raised, since inside an MCMC it simply means zero likelihood.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from scipy.special import softmax

from .errors import InputError

__all__ = [
    "SolverOptions",
    "TiltingSolution",
    "solve_tilting",
    "implied_weights",
    "log_el_ratio",
    "log_etel_active",
]

_CONVERGED = 0
_DIVERGED = 1
_MAXITER = 2
_STALLED = 3


@dataclass(frozen=True)
class SolverOptions:
    """Controls for the damped Newton tilting solver.

    ``gradient_tol`` is applied to the infinity norm of the normalised
    gradient ``sum_i w_i g_i`` (the moment constraint itself), relative to
    ``max(1, max|g|)``.
    """

    max_iterations: int = 100
    gradient_tol: float = 1e-10
    lambda_bound: float = 1e4
    ridge: float = 1e-10


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True)
class TiltingSolution:
    lam: np.ndarray
    weights: np.ndarray
    log_etel: float
    converged: bool
    iterations: int
    hull_ok: bool

    @property
    def m(self) -> int:
        return self.weights.shape[0]


@numba.njit(cache=True)
def _tilt_values(g, lam, z, e):
    """Fill z = g @ lam and e = exp(z - max z); return (log-sum-exp, sum e)."""
    m, d = g.shape
    zmax = -np.inf
    for i in range(m):
        acc = 0.0
        for k in range(d):
            acc += g[i, k] * lam[k]
        z[i] = acc
        if acc > zmax:
            zmax = acc
    total = 0.0
    for i in range(m):
        e[i] = np.exp(z[i] - zmax)
        total += e[i]
    return zmax + np.log(total), total


@numba.njit(cache=True)
def _moments(g, e, total, w, grad, hess):
    """Weights, weighted mean of rows and weighted covariance of rows."""
    m, d = g.shape
    for i in range(m):
        w[i] = e[i] / total
    for k in range(d):
        acc = 0.0
        for i in range(m):
            acc += w[i] * g[i, k]
        grad[k] = acc
    for k in range(d):
        for l in range(k + 1):
            acc = 0.0
            for i in range(m):
                acc += w[i] * (g[i, k] - grad[k]) * (g[i, l] - grad[l])
            hess[k, l] = acc
            hess[l, k] = acc


@numba.njit(cache=True)
def _cholesky_solve(a, b):
    """Solve a x = b for symmetric positive definite a; returns (x, ok)."""
    d = a.shape[0]
    L = np.zeros((d, d))
    for j in range(d):
        s = a[j, j]
        for k in range(j):
            s -= L[j, k] * L[j, k]
        if not s > 0.0:
            return np.zeros(d), False
        L[j, j] = np.sqrt(s)
        for i in range(j + 1, d):
            s = a[i, j]
            for k in range(j):
                s -= L[i, k] * L[j, k]
            L[i, j] = s / L[j, j]
    y = np.zeros(d)
    for i in range(d):
        s = b[i]
        for k in range(i):
            s -= L[i, k] * y[k]
        y[i] = s / L[i, i]
    x = np.zeros(d)
    for i in range(d - 1, -1, -1):
        s = y[i]
        for k in range(i + 1, d):
            s -= L[k, i] * x[k]
        x[i] = s / L[i, i]
    return x, True


@numba.njit(cache=True)
def _newton_tilt(g, max_iter, gtol, lam_bound, ridge):
    m, d = g.shape
    lam = np.zeros(d)
    trial = np.zeros(d)
    z = np.empty(m)
    e = np.empty(m)
    z_t = np.empty(m)
    e_t = np.empty(m)
    w = np.empty(m)
    grad = np.empty(d)
    hess = np.empty((d, d))
    w_t = np.empty(m)
    grad_t = np.empty(d)
    hess_t = np.empty((d, d))
    gscale = max(1.0, np.abs(g).max())
    tol = gtol * gscale
    f, total = _tilt_values(g, lam, z, e)
    _moments(g, e, total, w, grad, hess)
    it = 0
    status = _MAXITER
    while True:
        gnorm = np.abs(grad).max()
        if gnorm <= tol:
            status = _CONVERGED
            break
        if it >= max_iter:
            status = _MAXITER
            break
        tr = 0.0
        for k in range(d):
            tr += hess[k, k]
        if not tr > 1e-300:
            # all active rows coincide away from the origin
            status = _DIVERGED
            break
        for k in range(d):
            hess[k, k] += ridge * tr / d
        step, ok = _cholesky_solve(hess, grad)
        if not ok:
            status = _DIVERGED
            break
        slope = 0.0
        for k in range(d):
            step[k] = -step[k]
            slope += grad[k] * step[k]
        t = 1.0
        accepted = False
        for _ in range(60):
            for k in range(d):
                trial[k] = lam[k] + t * step[k]
            f_t, total_t = _tilt_values(g, trial, z_t, e_t)
            if f_t <= f + 1e-4 * t * slope:
                accepted = True
                _moments(g, e_t, total_t, w, grad, hess)
                break
            if abs(t * slope) <= 1e-13 * max(1.0, abs(f)):
                # decrease below round-off: accept if the gradient shrinks
                _moments(g, e_t, total_t, w_t, grad_t, hess_t)
                if np.abs(grad_t).max() < gnorm:
                    accepted = True
                    w[:] = w_t
                    grad[:] = grad_t
                    hess[:, :] = hess_t
                break
            t *= 0.5
        it += 1
        if not accepted:
            status = _STALLED
            break
        lam[:] = trial
        z[:] = z_t
        f = f_t
        if np.sqrt((lam * lam).sum()) > lam_bound:
            status = _DIVERGED
            break
    return lam, w, f, z.sum(), it, status, np.abs(grad).max() / gscale


def _as_gmatrix(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim == 1:
        g = g[:, None]
    if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
        raise InputError(f"moment matrix must be m x d_g with m, d_g >= 1, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise InputError("moment matrix contains non-finite entries")
    return np.ascontiguousarray(g)


def solve_tilting(g, opts: SolverOptions = DEFAULT_OPTIONS) -> TiltingSolution:
    """Compute the optimal tilting vector for the rows of ``g``.

    Damped Newton with Armijo backtracking, started at ``lambda = 0``.
    Newton steps use the centred (log-sum-exp) Hessian, which blows the
    iterate up quickly when the origin lies outside the convex hull of the
    rows, so hull failure is caught by ``lambda_bound``.

    Parameters
    ----------
    g : array_like, shape (m, d_g)
        Moment-function values, one row per active observation.
    opts : SolverOptions

    Returns
    -------
    TiltingSolution
        ``log_etel`` is ``sum_i log(m * w_i)`` (the log EL ratio); it is
        ``-inf`` whenever the solve did not converge.
    """
    g = _as_gmatrix(g)
    m = g.shape[0]
    lam, w, f, zsum, iters, status, grad_rel = _newton_tilt(
        g, int(opts.max_iterations), float(opts.gradient_tol),
        float(opts.lambda_bound), float(opts.ridge))
    if status == _STALLED and grad_rel <= 1e-8:
        status = _CONVERGED
    converged = status == _CONVERGED
    hull_ok = status not in (_DIVERGED, _STALLED)
    if converged:
        log_etel = zsum - m * f + m * np.log(m)
    else:
        log_etel = -np.inf
    return TiltingSolution(lam=lam, weights=w, log_etel=float(log_etel),
                           converged=converged, iterations=int(iters), hull_ok=hull_ok)


def implied_weights(g, lam) -> np.ndarray:
    """Implied probabilities ``exp(lam' g_i) / sum_j exp(lam' g_j)``."""
    g = _as_gmatrix(g)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if not np.all(np.isfinite(lam)):
        raise InputError("tilting vector contains non-finite entries")
    if lam.shape[0] != g.shape[1]:
        raise InputError(f"tilting vector has length {lam.shape[0]}, expected {g.shape[1]}")
    return softmax(g @ lam)


def log_el_ratio(weights) -> float:
    """``sum_i log(m * w_i)``; zero at uniform weights, negative otherwise."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise InputError("weights must be a non-empty vector")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise InputError("weights must be strictly positive")
    if abs(w.sum() - 1.0) > 1e-8:
        raise InputError(f"weights sum to {w.sum()!r}, not 1")
    return float(np.sum(np.log(w.size * w)))


def log_etel_active(g_full, s, opts: SolverOptions = DEFAULT_OPTIONS) -> tuple[TiltingSolution, float]:
    """Solve the tilting problem on the rows selected by the indicator ``s``.

    Returns the solution on the active rows and the robust log-ETEL
    ``sum_{i: s_i = 1} log(K * w_i)``.  Weights of inactive observations
    are not defined and not returned.
    """
    g_full = _as_gmatrix(g_full)
    s = np.asarray(s).astype(bool)
    if s.shape != (g_full.shape[0],):
        raise InputError(f"indicator length {s.shape} does not match {g_full.shape[0]} rows")
    if not s.any():
        raise InputError("at least one observation must be active")
    sol = solve_tilting(g_full[s], opts)
    return sol, sol.log_etel
