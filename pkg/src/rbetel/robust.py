"""Least squares and MM regression baselines for a single regressor."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InputError

__all__ = ["RegressionFit", "MMConfig", "ols_fit", "mm_fit", "robust_error_scale",
           "bisquare_rho", "bisquare_weights", "s_scale"]


@dataclass(frozen=True)
class RegressionFit:
    coefficients: np.ndarray
    std_errors: np.ndarray
    scale: float
    method: str

    @property
    def intercept(self) -> float:
        return float(self.coefficients[0])

    @property
    def slope(self) -> float:
        return float(self.coefficients[1])


@dataclass(frozen=True)
class MMConfig:
    """Tuning for :func:`mm_fit`.

    The defaults are the usual bisquare pair: ``c0`` gives a 50% breakdown
    S-estimate and ``c1`` 95% Gaussian efficiency for the final M-step.
    ``scale_source`` picks the exported scale: ``"s"`` for the S-scale,
    ``"m"`` for an M-scale re-solved on the final residuals.
    """

    n_subsets: int = 500
    refine_steps: int = 3
    n_best: int = 5
    c0: float = 1.5476
    breakdown: float = 0.5
    c1: float = 4.685
    tol: float = 1e-8
    max_iter: int = 500
    scale_tol: float = 1e-10
    seed: int = 0
    scale_source: str = "s"


def _design(x, y):
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise InputError(f"x and y lengths differ ({x.size} vs {y.size})")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InputError("x and y must be finite")
    if np.ptp(x) == 0:
        raise InputError("x is constant; slope is not identified")
    return x, y, np.column_stack([np.ones_like(x), x])


def ols_fit(x, y) -> RegressionFit:
    """Ordinary least squares with conventional standard errors."""
    x, y, X = _design(x, y)
    n = x.size
    if n < 3:
        raise InputError("OLS needs at least three observations")
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < 2:
        raise InputError("design matrix is rank deficient")
    resid = y - X @ coef
    sigma2 = resid @ resid / (n - 2)
    cov = sigma2 * np.linalg.inv(X.T @ X)
    return RegressionFit(coef, np.sqrt(np.diag(cov)), float(np.sqrt(sigma2)), "ols")


def bisquare_rho(u, c):
    """Tukey bisquare rho scaled to a maximum of 1."""
    t = np.minimum((np.asarray(u) / c) ** 2, 1.0)
    return 1.0 - (1.0 - t) ** 3


def bisquare_weights(u, c):
    """psi(u) / u for the bisquare (up to a constant factor)."""
    t = (np.asarray(u) / c) ** 2
    return np.where(t < 1.0, (1.0 - t) ** 2, 0.0)


def _psi(u, c):
    return u * bisquare_weights(u, c)


def _psi_prime(u, c):
    t = (u / c) ** 2
    return np.where(t < 1.0, (1.0 - t) * (1.0 - 5.0 * t), 0.0)


def s_scale(resid, c: float = 1.5476, b: float = 0.5, tol: float = 1e-10, max_iter: int = 500) -> float:
    """Solve ``mean(rho(r / sigma)) = b`` for sigma by fixed-point iteration."""
    r = np.abs(np.asarray(resid, dtype=float))
    n = r.size
    nonzero = np.count_nonzero(r)
    # rho saturates at 1, so the equation has a positive root only if
    # enough residuals are nonzero
    if nonzero <= b * n:
        return 0.0
    sigma = np.median(r) / 0.6745
    if sigma == 0.0:
        sigma = r[r > 0].min()
    for _ in range(max_iter):
        new = sigma * np.sqrt(np.mean(bisquare_rho(r / sigma, c)) / b)
        if abs(new / sigma - 1.0) < tol:
            return float(new)
        sigma = new
    return float(sigma)


def _wls(X, y, w):
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
    return coef


def _s_refine(X, y, coef, cfg, steps):
    sigma = s_scale(y - X @ coef, cfg.c0, cfg.breakdown, cfg.scale_tol)
    for _ in range(steps):
        if sigma == 0.0:
            break
        r = y - X @ coef
        w = bisquare_weights(r / sigma, cfg.c0)
        if np.count_nonzero(w) < 2:
            break
        new = _wls(X, y, w)
        new_sigma = s_scale(y - X @ new, cfg.c0, cfg.breakdown, cfg.scale_tol)
        if not new_sigma <= sigma:
            break
        delta = np.max(np.abs(new - coef))
        coef, sigma = new, new_sigma
        if delta < cfg.tol:
            break
    return coef, sigma


def _s_scale_rows(R, c, b, tol, max_iter=500):
    """Row-wise :func:`s_scale` for a (candidates x n) residual matrix."""
    A = np.abs(R)
    n = A.shape[1]
    sigma = np.median(A, axis=1) / 0.6745
    degenerate = np.count_nonzero(A, axis=1) <= b * n
    fallback = np.where(A > 0, A, np.inf).min(axis=1)
    sigma = np.where(sigma > 0, sigma, fallback)
    sigma = np.where(degenerate | ~np.isfinite(sigma), 1.0, sigma)
    active = ~degenerate
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        s_old = sigma[idx]
        s_new = s_old * np.sqrt(bisquare_rho(A[idx] / s_old[:, None], c).mean(axis=1) / b)
        sigma[idx] = s_new
        active[idx] = np.abs(s_new / s_old - 1.0) >= tol
    return np.where(degenerate, 0.0, sigma)


def _wls_rows(x, y, W):
    """Weighted simple-regression fits, one per row of W."""
    sw = W.sum(axis=1)
    sx = W @ x
    sy = W @ y
    sxx = W @ (x * x)
    sxy = W @ (x * y)
    det = sw * sxx - sx * sx
    ok = det > 1e-12 * np.maximum(sw * sxx, 1e-300)
    det = np.where(ok, det, 1.0)
    slope = (sw * sxy - sx * sy) / det
    intercept = (sy - slope * sx) / np.where(sw > 0, sw, 1.0)
    return np.column_stack([intercept, slope]), ok


def _s_estimate(X, y, cfg, rng):
    n = X.shape[0]
    x = X[:, 1]
    i = rng.integers(0, n, cfg.n_subsets)
    j = (i + rng.integers(1, n, cfg.n_subsets)) % n
    dx = x[j] - x[i]
    keep = dx != 0
    if not keep.any():
        raise InputError("no non-degenerate elemental subset found")
    i, j, dx = i[keep], j[keep], dx[keep]
    slope = (y[j] - y[i]) / dx
    C = np.column_stack([y[i] - slope * x[i], slope])
    R = y[None, :] - C[:, :1] - C[:, 1:] * x[None, :]
    sigma = _s_scale_rows(R, cfg.c0, cfg.breakdown, 1e-8)
    for _ in range(cfg.refine_steps):
        pos = sigma > 0
        if not pos.any():
            break
        W = bisquare_weights(R / np.where(pos, sigma, 1.0)[:, None], cfg.c0)
        C_new, ok = _wls_rows(x, y, W)
        R_new = y[None, :] - C_new[:, :1] - C_new[:, 1:] * x[None, :]
        s_new = _s_scale_rows(R_new, cfg.c0, cfg.breakdown, 1e-8)
        better = pos & ok & (s_new <= sigma)
        C[better], R[better], sigma[better] = C_new[better], R_new[better], s_new[better]
    order = np.argsort(sigma, kind="stable")
    best_sigma, best_coef = np.inf, None
    for k in order[: cfg.n_best]:
        coef, sig = _s_refine(X, y, C[k], cfg, cfg.max_iter)
        if sig < best_sigma:
            best_sigma, best_coef = sig, coef
    return best_coef, best_sigma


def mm_fit(x, y, config: MMConfig = MMConfig()) -> RegressionFit:
    """MM regression: bisquare S-estimate start, then a bisquare M-step.

    The S-estimate is searched over random two-point elemental fits, each
    polished by a few IRLS steps; the best few are iterated to convergence.
    The M-step keeps the S-scale fixed.  Reproducible for a fixed
    ``config.seed``.
    """
    x, y, X = _design(x, y)
    if config.scale_source not in ("s", "m"):
        raise ConfigurationError("scale_source must be 's' or 'm'")
    rng = np.random.default_rng(config.seed)
    coef, sigma = _s_estimate(X, y, config, rng)
    if sigma > 0:
        for _ in range(config.max_iter):
            w = bisquare_weights((y - X @ coef) / sigma, config.c1)
            new = _wls(X, y, w)
            delta = np.max(np.abs(new - coef))
            coef = new
            if delta < config.tol:
                break
    resid = y - X @ coef
    if sigma > 0:
        u = resid / sigma
        a = np.mean(_psi(u, config.c1) ** 2)
        bprime = np.mean(_psi_prime(u, config.c1))
        cov = sigma ** 2 * a / bprime ** 2 * np.linalg.inv(X.T @ X)
        se = np.sqrt(np.diag(cov))
    else:
        se = np.zeros(2)
    scale = sigma
    if config.scale_source == "m":
        scale = s_scale(resid, config.c0, config.breakdown, config.scale_tol)
    return RegressionFit(coef, se, float(scale), "mm")


def robust_error_scale(x, y, config: MMConfig = MMConfig()) -> float:
    """Squared robust residual scale, the variance-like anchor T."""
    return mm_fit(x, y, config).scale ** 2
