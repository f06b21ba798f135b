"""Posterior summaries from chain draws."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InputError

__all__ = [
    "ParameterSummary",
    "PosteriorSummary",
    "DensityGrid",
    "summarize",
    "summarize_chain",
    "batch_means_se",
    "inclusion_probs",
    "density_grid",
]

MIN_DRAWS = 100


@dataclass(frozen=True)
class ParameterSummary:
    name: str
    post_mean: float
    post_sd: float
    ts_se: float
    ci_low: float
    ci_high: float


@dataclass
class PosteriorSummary:
    method: str
    parameters: list
    inclusion: Optional[np.ndarray] = None
    acceptance: dict = field(default_factory=dict)
    seed: Optional[int] = None
    config_hash: Optional[str] = None

    def param(self, name: str) -> ParameterSummary:
        for p in self.parameters:
            if p.name == name:
                return p
        raise KeyError(name)

    def to_dict(self) -> dict:
        inc = [] if self.inclusion is None else [
            {"index": int(i), "prob": float(p)} for i, p in enumerate(self.inclusion)]
        return {
            "method": self.method,
            "parameters": [asdict(p) for p in self.parameters],
            "inclusion": inc,
            "acceptance": dict(self.acceptance),
            "seed": self.seed,
            "config_hash": self.config_hash,
        }

    def to_json(self, **kw) -> str:
        # repr of a Python float round-trips exactly
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "PosteriorSummary":
        params = [ParameterSummary(**{k: (v if k == "name" else float(v)) for k, v in p.items()})
                  for p in d["parameters"]]
        inc = d.get("inclusion") or []
        inclusion = None
        if inc:
            inclusion = np.empty(len(inc))
            for item in inc:
                inclusion[int(item["index"])] = float(item["prob"])
        return cls(d["method"], params, inclusion, dict(d.get("acceptance", {})),
                   d.get("seed"), d.get("config_hash"))

    @classmethod
    def from_json(cls, text: str) -> "PosteriorSummary":
        return cls.from_dict(json.loads(text))


def batch_means_se(x) -> float:
    """Monte Carlo standard error of the mean from floor(sqrt(M)) equal batches."""
    x = np.asarray(x, dtype=float)
    m = x.size
    n_batches = int(np.sqrt(m))
    size = m // n_batches
    if n_batches < 2 or size < 1:
        raise InputError("too few draws for batch means")
    means = x[: n_batches * size].reshape(n_batches, size).mean(axis=1)
    return float(np.sqrt(size * means.var(ddof=1) / m))


def summarize(draws, level: float = 0.95, names: Optional[Sequence[str]] = None) -> list:
    """Posterior mean, SD, batch-means standard error and equal-tail interval.

    Parameters
    ----------
    draws : array_like, shape (M,) or (M, p)
    level : float
        Credible level of the equal-tail interval.
    names : sequence of str, optional

    Returns
    -------
    list of ParameterSummary
    """
    d = np.asarray(draws, dtype=float)
    if d.ndim == 1:
        d = d[:, None]
    if d.ndim != 2:
        raise InputError("draws must be a vector or an M x p matrix")
    if d.shape[0] < MIN_DRAWS:
        raise InputError(f"need at least {MIN_DRAWS} draws, got {d.shape[0]}")
    if not np.all(np.isfinite(d)):
        raise InputError("draws contain non-finite values")
    if not 0 < level < 1:
        raise InputError("level must lie in (0, 1)")
    if names is None:
        names = [f"theta{j}" for j in range(d.shape[1])]
    if len(names) != d.shape[1]:
        raise InputError("one name per parameter column is required")
    tail = (1.0 - level) / 2.0
    out = []
    for j, name in enumerate(names):
        col = d[:, j]
        lo, hi = np.quantile(col, [tail, 1.0 - tail])  # type-7 interpolation
        if np.ptp(col) == 0:
            sd = se = 0.0
        else:
            sd = float(col.std(ddof=1))
            se = batch_means_se(col)
        out.append(ParameterSummary(str(name), float(col.mean()), sd, se, float(lo), float(hi)))
    return out


def inclusion_probs(s_draws) -> np.ndarray:
    """Per-observation fraction of draws in which the observation was active."""
    s = np.asarray(s_draws)
    if s.ndim != 2 or s.shape[0] == 0:
        raise InputError("indicator draws must be a non-empty M x n matrix")
    return s.mean(axis=0, dtype=float)


def summarize_chain(chain, level: float = 0.95, seed=None, config_hash=None) -> PosteriorSummary:
    """Build a :class:`PosteriorSummary` from a :class:`~rbetel.sampler.ChainOutput`."""
    params = summarize(chain.theta, level, chain.param_names)
    if chain.v is not None:
        params.append(summarize(chain.v, level, ["v"])[0])
    inc = inclusion_probs(chain.s) if chain.s is not None else np.ones(0)
    acc = {"theta": float(chain.accept_theta),
           "indicator": None if chain.accept_indicator is None else float(chain.accept_indicator)}
    return PosteriorSummary(chain.method, params, inc if inc.size else None, acc, seed, config_hash)


@dataclass(frozen=True)
class DensityGrid:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float
    spike: bool = False


def density_grid(draws, n_points: int = 512, bandwidth_rule: str = "silverman") -> DensityGrid:
    """Gaussian kernel density estimate on a regular grid.

    The grid spans ``mean +- 4 sd`` widened, if needed, to cover
    ``[min - 4h, max + 4h]`` so that essentially all kernel mass lies
    on it.  Constant draws return a single-point grid flagged as a spike.
    """
    x = np.asarray(draws, dtype=float).ravel()
    if x.size < 2:
        raise InputError("need at least two draws for a density estimate")
    if n_points < 2:
        raise InputError("n_points must be at least 2")
    if np.ptp(x) == 0:
        return DensityGrid(np.array([x[0]]), np.array([np.inf]), 0.0, spike=True)
    sd = x.std(ddof=1)
    if bandwidth_rule == "silverman":
        iqr = np.subtract(*np.percentile(x, [75, 25]))
        spread = min(sd, iqr / 1.349) if iqr > 0 else sd
        h = 0.9 * spread * x.size ** -0.2
    elif bandwidth_rule == "scott":
        h = 1.06 * sd * x.size ** -0.2
    else:
        raise InputError(f"unknown bandwidth rule {bandwidth_rule!r}")
    mean = x.mean()
    lo = min(mean - 4 * sd, x.min() - 4 * h)
    hi = max(mean + 4 * sd, x.max() + 4 * h)
    grid = np.linspace(lo, hi, n_points)
    dens = np.zeros(n_points)
    for start in range(0, x.size, 4096):
        z = (grid[:, None] - x[None, start:start + 4096]) / h
        dens += np.exp(-0.5 * z * z).sum(axis=1)
    dens /= x.size * h * np.sqrt(2 * np.pi)
    return DensityGrid(grid, dens, float(h))
