"""MCMC for the robust ETEL posterior over (theta, s, v), plus a plain
BETEL chain over theta alone.

One sweep updates theta by random-walk Metropolis, then (s, K) by a
Metropolis move with the truncated-binomial / conditional-Bernoulli
proposal, then v by an exact truncated-Beta Gibbs draw.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.special import betainc, betaincinv, betaln

from .errors import ChainError, ConfigurationError, InputError
from .etel import DEFAULT_OPTIONS, SolverOptions, TiltingSolution, solve_tilting
from .moments import Dataset, MomentModel, scaled_mad
from .proposals import IndicatorProposal
from .robust import mm_fit

__all__ = [
    "Priors",
    "IndicatorState",
    "ChainState",
    "ChainConfig",
    "ChainOutput",
    "log_posterior_kernel",
    "betel_log_kernel",
    "initial_state",
    "theta_step",
    "v_step",
    "indicator_step",
    "run_chain",
    "default_start",
    "default_tau",
]

V_LOWER = 0.5


@dataclass(frozen=True)
class Priors:
    """Independent normal prior on theta and a Beta(alpha0, beta0) prior on v
    truncated to (0.5, 1]."""

    theta_mean: np.ndarray = field(default_factory=lambda: np.zeros(1))
    theta_var: np.ndarray = field(default_factory=lambda: np.full(1, 100.0))
    alpha0: float = 50.0
    beta0: float = 5.0

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.theta_mean, dtype=float))
        var = np.atleast_1d(np.asarray(self.theta_var, dtype=float))
        mean, var = np.broadcast_arrays(mean, var)
        if np.any(var <= 0):
            raise ConfigurationError("prior variances must be positive")
        if not (self.alpha0 > 0 and self.beta0 > 0):
            raise ConfigurationError("alpha0 and beta0 must be positive")
        object.__setattr__(self, "theta_mean", mean.copy())
        object.__setattr__(self, "theta_var", var.copy())
        # log of the prior mass of (0.5, 1]; P(V > 0.5) = I_{0.5}(beta0, alpha0)
        object.__setattr__(self, "_log_v_norm",
                           float(betaln(self.alpha0, self.beta0) + np.log(betainc(self.beta0, self.alpha0, V_LOWER))))

    @classmethod
    def default(cls, p: int, alpha0: float = 50.0, beta0: float = 5.0, mean: float = 0.0, var: float = 100.0):
        return cls(np.full(p, mean), np.full(p, var), alpha0, beta0)

    def for_dim(self, p: int) -> "Priors":
        if self.theta_mean.size == p:
            return self
        if self.theta_mean.size == 1:
            return Priors(np.full(p, self.theta_mean[0]), np.full(p, self.theta_var[0]), self.alpha0, self.beta0)
        raise ConfigurationError(f"prior has {self.theta_mean.size} coordinates, model has {p}")

    def log_prior_theta(self, theta) -> float:
        d = np.atleast_1d(theta) - self.theta_mean
        return float(-0.5 * np.sum(d * d / self.theta_var + np.log(2 * np.pi * self.theta_var)))

    def log_prior_v(self, v: float) -> float:
        if not V_LOWER < v <= 1.0:
            return -np.inf
        with np.errstate(divide="ignore"):
            return float((self.alpha0 - 1) * np.log(v) + (self.beta0 - 1) * np.log1p(-v) - self._log_v_norm)

    def v_mean(self) -> float:
        a, b = self.alpha0, self.beta0
        return float(a / (a + b) * betainc(b, a + 1, V_LOWER) / betainc(b, a, V_LOWER))


@dataclass(frozen=True)
class IndicatorState:
    s: np.ndarray
    K: int

    @classmethod
    def from_vector(cls, s) -> "IndicatorState":
        s = np.asarray(s).astype(bool)
        K = int(s.sum())
        if not K > s.size / 2:
            raise InputError(f"{K} active observations out of {s.size}; need more than half")
        return cls(s, K)

    @classmethod
    def all_active(cls, n: int) -> "IndicatorState":
        return cls(np.ones(n, dtype=bool), n)

    @property
    def n(self) -> int:
        return self.s.size

    @property
    def active(self) -> np.ndarray:
        return np.flatnonzero(self.s)


@dataclass(frozen=True)
class ChainState:
    theta: np.ndarray
    indicators: IndicatorState
    v: Optional[float]
    log_kernel: float
    tilt: TiltingSolution
    log_prior_theta: float
    g_full: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ChainConfig:
    """Run-length and tuning settings.

    ``rw_scale`` and ``tau`` default to data-dependent values (see
    :func:`default_start` and :func:`default_tau`).  Random-walk scales
    are adapted only during burn-in when ``adapt`` is set.
    """

    n_burnin: int = 4000
    n_keep: int = 8000
    rw_scale: Optional[tuple] = None
    tau: Optional[float] = None
    c: float = 0.99
    adapt: bool = True
    seed: int = 0
    thin: int = 1
    target_accept: float = 0.3

    def __post_init__(self):
        if self.n_keep < 1 or self.thin < 1 or self.n_burnin < 0:
            raise ConfigurationError("n_keep and thin must be >= 1 and n_burnin >= 0")
        if self.tau is not None and not 0 < self.tau < 1:
            raise ConfigurationError("tau must lie in (0, 1)")
        if not 0 < self.c <= 1:
            raise ConfigurationError("c must lie in (0, 1]")


@dataclass(frozen=True)
class ChainOutput:
    method: str
    param_names: list
    theta: np.ndarray
    v: Optional[np.ndarray]
    K: np.ndarray
    s: Optional[np.ndarray]
    accept_theta: float
    accept_indicator: Optional[float]
    rw_scale: np.ndarray
    adapt_trace: np.ndarray
    tau: Optional[float]

    @property
    def n_draws(self) -> int:
        return self.theta.shape[0]


def _kernel_extras(priors, K, n, v):
    with np.errstate(divide="ignore", invalid="ignore"):
        mix = K * np.log(v) + (n - K) * np.log1p(-v) if K < n else K * np.log(v)
    return priors.log_prior_v(v) + mix


def _evaluate(theta, ind, v, model, priors, data, opts, betel):
    """Kernel, tilting solution, moment rows and log prior of theta."""
    g_full = model.rows(data.x, data.y, theta)
    lp = priors.log_prior_theta(theta)
    if betel:
        sol = solve_tilting(g_full, opts)
        return lp + sol.log_etel, sol, g_full, lp
    n = ind.n
    if not ind.K > n / 2:
        return -np.inf, None, g_full, lp
    sol = solve_tilting(g_full if ind.K == n else g_full[ind.s], opts)
    if not sol.converged:
        return -np.inf, sol, g_full, lp
    return lp + _kernel_extras(priors, ind.K, n, v) + sol.log_etel, sol, g_full, lp


def log_posterior_kernel(theta, s, v, model: MomentModel, priors: Priors, data: Dataset,
                         opts: SolverOptions = DEFAULT_OPTIONS) -> float:
    """Unnormalised log joint density of (theta, s, v).

    ``log pi(theta) + log pi(v) + K log v + (n - K) log(1 - v)`` plus the
    log EL ratio on the active observations; ``-inf`` when
    ``K <= n/2`` or the tilting problem has no solution.
    """
    s = np.asarray(s).astype(bool)
    ind = IndicatorState(s, int(s.sum()))
    if not ind.K > ind.n / 2:
        return -np.inf
    priors = priors.for_dim(model.theta_dim)
    return float(_evaluate(np.atleast_1d(np.asarray(theta, dtype=float)), ind, float(v),
                           model, priors, data, opts, False)[0])


def betel_log_kernel(theta, model: MomentModel, priors: Priors, data: Dataset,
                     opts: SolverOptions = DEFAULT_OPTIONS) -> float:
    """``log pi(theta)`` plus the full-sample log EL ratio."""
    priors = priors.for_dim(model.theta_dim)
    return float(_evaluate(np.atleast_1d(np.asarray(theta, dtype=float)), None, None,
                           model, priors, data, opts, True)[0])


def initial_state(theta, model, priors, data, v=None, s=None, opts=DEFAULT_OPTIONS, betel=False) -> ChainState:
    theta = np.atleast_1d(np.asarray(theta, dtype=float)).copy()
    ind = IndicatorState.all_active(data.n) if s is None else IndicatorState.from_vector(s)
    if betel:
        v = None
    elif v is None:
        v = priors.v_mean()
    kern, sol, g_full, lp = _evaluate(theta, ind, v, model, priors, data, opts, betel)
    return ChainState(theta, ind, v, float(kern), sol, lp, g_full)


def theta_step(state: ChainState, model: MomentModel, priors: Priors, data: Dataset, rw_scale,
               rng: np.random.Generator, opts: SolverOptions = DEFAULT_OPTIONS, betel: bool = False):
    """Random-walk Metropolis update of theta given (s, v).

    Returns ``(new_state, accepted, accept_prob)``.
    """
    prop = state.theta + rng.standard_normal(state.theta.size) * rw_scale
    kern, sol, g_full, lp = _evaluate(prop, state.indicators, state.v, model, priors, data, opts, betel)
    log_u = np.log(rng.random())
    if not np.isfinite(kern):
        return state, False, 0.0
    log_ratio = kern - state.log_kernel
    prob = 1.0 if log_ratio >= 0 else float(np.exp(log_ratio))
    if log_u < log_ratio:
        return ChainState(prop, state.indicators, state.v, float(kern), sol, lp, g_full), True, prob
    return state, False, prob


def _truncated_beta_upper(a: float, b: float, rng: np.random.Generator) -> float:
    """Draw V ~ Beta(a, b) restricted to (0.5, 1] by inverting the CDF of 1 - V."""
    mass = betainc(b, a, V_LOWER)
    u = rng.random()
    target = u * mass
    w = float(betaincinv(b, a, target)) if mass > 0 else np.nan
    if not (np.isfinite(w) and 0.0 <= w <= V_LOWER):
        # bisection on the CDF of 1 - V over [0, 0.5]
        lo, hi = 0.0, V_LOWER
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if betainc(b, a, mid) < target:
                lo = mid
            else:
                hi = mid
        w = 0.5 * (lo + hi)
    v = 1.0 - w
    return v if v > V_LOWER else np.nextafter(V_LOWER, 1.0)


def v_step(state: ChainState, priors: Priors, rng: np.random.Generator) -> ChainState:
    """Gibbs draw of v from Beta(K + alpha0, n - K + beta0) truncated to (0.5, 1]."""
    n, K = state.indicators.n, state.indicators.K
    v = _truncated_beta_upper(K + priors.alpha0, n - K + priors.beta0, rng)
    kern = state.log_prior_theta + _kernel_extras(priors, K, n, v) + state.tilt.log_etel
    return replace(state, v=v, log_kernel=float(kern))


def indicator_step(state: ChainState, model: MomentModel, priors: Priors, data: Dataset, tau: float, c: float,
                   rng: np.random.Generator, opts: SolverOptions = DEFAULT_OPTIONS,
                   proposal: Optional[IndicatorProposal] = None):
    """Metropolis update of s through a joint (K, s) proposal.

    Returns ``(new_state, accepted)``.  A proposal identical to the current
    vector is a self-move and counts as accepted.
    """
    n = state.indicators.n
    if proposal is None:
        proposal = IndicatorProposal(n, tau, c)
    s_old = state.indicators.s
    s_new, k_new, log_q_ratio = proposal.propose(s_old, rng)
    log_u = np.log(rng.random())
    if np.array_equal(s_new, s_old):
        return state, True
    sol = solve_tilting(state.g_full if k_new == n else state.g_full[s_new], opts)
    if not sol.converged:
        return state, False
    kern = state.log_prior_theta + _kernel_extras(priors, k_new, n, state.v) + sol.log_etel
    if log_u < kern - state.log_kernel + log_q_ratio:
        return replace(state, indicators=IndicatorState(s_new, k_new), log_kernel=float(kern), tilt=sol), True
    return state, False


def default_tau(n: int) -> float:
    """Proposal stickiness giving about two expected switches per move."""
    return max(0.8, 1.0 - 2.0 / n)


def default_start(model: MomentModel, data: Dataset):
    """Robust starting point and random-walk scale for the built-in families."""
    if model.family == "location":
        mad = scaled_mad(data.x) or 1.0
        return np.array([np.median(data.x)]), np.array([2.4 * mad / np.sqrt(data.n)])
    if model.family == "linear_regression":
        fit = mm_fit(data.x, data.y)
        se = np.where(fit.std_errors > 0, fit.std_errors, 1e-3)
        return fit.coefficients.copy(), 2.4 / np.sqrt(2.0) * se
    raise ConfigurationError("custom models need an explicit theta0 and rw_scale")


def run_chain(model: MomentModel, priors: Priors, data: Dataset, config: ChainConfig = ChainConfig(),
              rng: Optional[np.random.Generator] = None, method: str = "rbetel", theta0=None,
              opts: SolverOptions = DEFAULT_OPTIONS, progress: bool = False) -> ChainOutput:
    """Run one chain and return the kept draws.

    Parameters
    ----------
    method : {"rbetel", "betel"}
        ``"betel"`` freezes every observation as active, skips v and uses
        the full-sample ETEL as likelihood.
    theta0 : array_like, optional
        Starting value; defaults to the median (location) or the MM fit
        (regression).
    rng : numpy Generator, optional
        Defaults to ``np.random.default_rng(config.seed)``.
    """
    if method not in ("rbetel", "betel"):
        raise ConfigurationError(f"unknown method {method!r}")
    betel = method == "betel"
    if betel and model.key_conditions:
        model = model.base_only()
    p = model.theta_dim
    priors = priors.for_dim(p)
    rng = np.random.default_rng(config.seed) if rng is None else rng
    n = data.n

    start, scale0 = (None, None)
    if theta0 is None or config.rw_scale is None:
        if model.family == "custom" and (theta0 is None or config.rw_scale is None):
            raise ConfigurationError("custom models need an explicit theta0 and rw_scale")
        start, scale0 = default_start(model, data)
    theta0 = start if theta0 is None else np.atleast_1d(np.asarray(theta0, dtype=float))
    base_scale = scale0 if config.rw_scale is None else np.broadcast_to(
        np.asarray(config.rw_scale, dtype=float), (p,)).copy()

    state = initial_state(theta0, model, priors, data, opts=opts, betel=betel)
    attempt = 0
    while not np.isfinite(state.log_kernel):
        attempt += 1
        if attempt > 100:
            raise ChainError("no starting value with finite posterior kernel found after 100 attempts")
        jitter = rng.standard_normal(p) * base_scale * (1.0 + attempt / 10.0)
        state = initial_state(theta0 + jitter, model, priors, data, opts=opts, betel=betel)

    tau = None
    proposal = None
    if not betel:
        tau = default_tau(n) if config.tau is None else config.tau
        proposal = IndicatorProposal(n, tau, config.c)

    n_total = config.n_burnin + config.n_keep * config.thin
    theta_out = np.empty((config.n_keep, p))
    k_out = np.empty(config.n_keep, dtype=np.int64)
    v_out = None if betel else np.empty(config.n_keep)
    s_out = None if betel else np.empty((config.n_keep, n), dtype=np.uint8)
    trace = np.empty((config.n_burnin, p))
    log_mult = 0.0
    acc_theta = acc_ind = 0
    kept = 0
    for t in range(n_total):
        scale = base_scale * np.exp(log_mult)
        state, accepted, prob = theta_step(state, model, priors, data, scale, rng, opts, betel)
        burning = t < config.n_burnin
        if burning:
            if config.adapt:
                log_mult += (prob - config.target_accept) / (t + 1.0) ** 0.6
            trace[t] = scale
        else:
            acc_theta += accepted
        if not betel:
            state, accepted = indicator_step(state, model, priors, data, tau, config.c, rng, opts, proposal)
            if not burning:
                acc_ind += accepted
            state = v_step(state, priors, rng)
        if not burning and (t - config.n_burnin) % config.thin == config.thin - 1:
            theta_out[kept] = state.theta
            k_out[kept] = state.indicators.K
            if not betel:
                v_out[kept] = state.v
                s_out[kept] = state.indicators.s
            kept += 1
        if progress and (t + 1) % 1000 == 0:
            print(f"\r{method}: sweep {t + 1}/{n_total}", end="", file=sys.stderr, flush=True)
    if progress:
        print(file=sys.stderr)
    n_post = n_total - config.n_burnin
    return ChainOutput(
        method=method,
        param_names=model.param_names,
        theta=theta_out,
        v=v_out,
        K=k_out,
        s=s_out,
        accept_theta=acc_theta / n_post,
        accept_indicator=None if betel else acc_ind / n_post,
        rw_scale=base_scale * np.exp(log_mult),
        adapt_trace=trace,
        tau=tau,
    )
