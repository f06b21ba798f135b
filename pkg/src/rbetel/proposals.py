"""Proposals for the indicator vector: a truncated binomial for the number
of active observations, then a conditional-Bernoulli draw of which ones.

Both pieces return normalised log masses because the MH ratio needs the
forward and reverse proposal probabilities exactly.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp, xlog1py, xlogy

from .errors import InputError

__all__ = [
    "k_support",
    "q1_logpmf_table",
    "q1_logpmf",
    "q1_sample",
    "q2_log_normalizer",
    "q2_logpmf",
    "q2_sample",
    "IndicatorProposal",
]


def k_support(n: int) -> np.ndarray:
    """Admissible active counts ``floor(n/2)+1, ..., n``."""
    return np.arange(n // 2 + 1, n + 1)


@lru_cache(maxsize=64)
def _log_factorials(n: int) -> np.ndarray:
    return gammaln(np.arange(n + 2) + 1.0)


def _log_comb(n, k, lf):
    return lf[n] - lf[k] - lf[n - k]


@lru_cache(maxsize=64)
def q1_logpmf_table(n: int, c: float) -> np.ndarray:
    """Normalised log masses, rows indexed by K_prev and columns by K_dagger.

    Row ``K_prev - (n // 2 + 1)`` holds the truncated
    Binomial(n, c K_prev / n) restricted to the support ``k_support(n)``.
    """
    if not 0 < c <= 1:
        raise InputError("c must lie in (0, 1]")
    lf = _log_factorials(n)
    ks = k_support(n)
    p = c * ks / n
    comb = _log_comb(n, ks, lf)
    # xlogy / xlog1py give 0 log 0 = 0, so c = 1 and K_prev = n puts all mass on K = n
    table = (comb[None, :] + xlogy(ks[None, :], p[:, None])
             + xlog1py(n - ks[None, :], -p[:, None]))
    table -= logsumexp(table, axis=1, keepdims=True)
    table.setflags(write=False)
    return table


def _check_k(k, n):
    if not (n // 2 < k <= n):
        raise InputError(f"active count {k} outside ({n / 2}, {n}]")


def q1_logpmf(k_dagger: int, k_prev: int, n: int, c: float = 0.99) -> float:
    _check_k(k_prev, n)
    if not (n // 2 < k_dagger <= n):
        return -np.inf
    lo = n // 2 + 1
    return float(q1_logpmf_table(n, float(c))[k_prev - lo, k_dagger - lo])


def q1_sample(k_prev: int, n: int, c: float, rng: np.random.Generator) -> int:
    """Inverse-CDF draw from the truncated binomial."""
    _check_k(k_prev, n)
    lo = n // 2 + 1
    cdf = np.cumsum(np.exp(q1_logpmf_table(n, float(c))[k_prev - lo]))
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return lo + min(idx, cdf.size - 1)


def _j_log_masses(a, n, k_dagger, tau, lf):
    """Log mass of each feasible j = number of previously active kept active."""
    j = np.arange(max(0, k_dagger - (n - a)), min(a, k_dagger) + 1)
    stay = n - a - k_dagger + 2 * j
    switch = a + k_dagger - 2 * j
    logm = (_log_comb(a, j, lf) + _log_comb(n - a, k_dagger - j, lf)
            + stay * np.log(tau) + switch * np.log1p(-tau))
    return j, logm


def q2_log_normalizer(a: int, n: int, k_dagger: int, tau: float) -> float:
    """log Z for the conditional-Bernoulli proposal from a state with a active."""
    _, logm = _j_log_masses(a, n, k_dagger, tau, _log_factorials(n))
    return float(logsumexp(logm))


def q2_logpmf(s_dagger, k_dagger: int, s_prev, tau: float) -> float:
    """Normalised log probability of proposing ``s_dagger`` from ``s_prev``."""
    s_dagger = np.asarray(s_dagger).astype(bool)
    s_prev = np.asarray(s_prev).astype(bool)
    if s_dagger.shape != s_prev.shape:
        raise InputError("indicator vectors differ in length")
    if int(s_dagger.sum()) != k_dagger:
        raise InputError(f"s_dagger has {int(s_dagger.sum())} active entries, expected {k_dagger}")
    if not 0 < tau < 1:
        raise InputError("tau must lie in (0, 1)")
    n = s_prev.size
    stay = int(np.count_nonzero(s_dagger == s_prev))
    switch = n - stay
    return stay * np.log(tau) + switch * np.log1p(-tau) - q2_log_normalizer(int(s_prev.sum()), n, k_dagger, tau)


def q2_sample(k_dagger: int, s_prev, tau: float, rng: np.random.Generator) -> np.ndarray:
    """Exact conditional-Bernoulli draw with ``sum(s) == k_dagger``.

    First the number j of previously active observations that stay active
    is drawn from its marginal law; then the observations to drop and to add
    are chosen uniformly.
    """
    s_prev = np.asarray(s_prev).astype(bool)
    n = s_prev.size
    a = int(s_prev.sum())
    if not 0 <= k_dagger <= n:
        raise InputError(f"k_dagger={k_dagger} outside [0, {n}]")
    j_vals, logm = _j_log_masses(a, n, k_dagger, tau, _log_factorials(n))
    prob = np.exp(logm - logm.max())
    cdf = np.cumsum(prob)
    idx = min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), j_vals.size - 1)
    j = int(j_vals[idx])
    active = np.flatnonzero(s_prev)
    inactive = np.flatnonzero(~s_prev)
    out = s_prev.copy()
    if a - j:
        out[rng.choice(active, a - j, replace=False)] = False
    if k_dagger - j:
        out[rng.choice(inactive, k_dagger - j, replace=False)] = True
    return out


class IndicatorProposal:
    """Joint (K, s) proposal with cached tables for a fixed n, tau and c."""

    def __init__(self, n: int, tau: float, c: float = 0.99):
        if not 0 < tau < 1:
            raise InputError("tau must lie in (0, 1)")
        self.n = n
        self.tau = float(tau)
        self.c = float(c)
        self._lo = n // 2 + 1
        self._q1 = q1_logpmf_table(n, self.c)
        self._q1_cdf = np.cumsum(np.exp(self._q1), axis=1)
        self._lf = _log_factorials(n)
        self._log_tau = np.log(self.tau)
        self._log_1mtau = np.log1p(-self.tau)
        self._logz = {}

    def _log_z(self, a, k):
        key = (a, k)
        val = self._logz.get(key)
        if val is None:
            _, logm = _j_log_masses(a, self.n, k, self.tau, self._lf)
            val = self._logz[key] = float(logsumexp(logm))
        return val

    def propose(self, s_prev: np.ndarray, rng: np.random.Generator):
        """Draw (s_dagger, K_dagger); also return log q(rev) - log q(fwd)."""
        n = self.n
        k_prev = int(s_prev.sum())
        row = self._q1_cdf[k_prev - self._lo]
        idx = int(np.searchsorted(row, rng.random() * row[-1], side="right"))
        k_new = self._lo + min(idx, row.size - 1)
        s_new = q2_sample(k_new, s_prev, self.tau, rng)
        stay = int(np.count_nonzero(s_new == s_prev))
        pair = stay * self._log_tau + (n - stay) * self._log_1mtau
        log_fwd = self._q1[k_prev - self._lo, k_new - self._lo] + pair - self._log_z(k_prev, k_new)
        log_rev = self._q1[k_new - self._lo, k_prev - self._lo] + pair - self._log_z(k_new, k_prev)
        return s_new, k_new, log_rev - log_fwd
