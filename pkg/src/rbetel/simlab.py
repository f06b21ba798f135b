"""Simulation designs and replication studies comparing BETEL and RBETEL."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import ChainError, ConfigurationError, InputError
from .moments import Dataset, MomentModel, mad_anchor
from .posterior import summarize_chain
from .robust import robust_error_scale
from .sampler import ChainConfig, Priors, run_chain

__all__ = [
    "LocationDesign",
    "RegressionDesign",
    "SimulatedData",
    "MethodReport",
    "ReplicationReport",
    "gen_location_data",
    "gen_regression_data",
    "model_for_data",
    "replicate",
    "coverage",
    "replicate_seed",
]


@dataclass(frozen=True)
class LocationDesign:
    """Normal data around ``mu0`` with a ``p_out`` share shifted to ``xi0``."""

    n: int = 500
    mu0: float = 1.0
    xi0: float = 6.0
    p_out: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.n < 10:
            raise ConfigurationError("location design needs n >= 10")
        if not 0 <= self.p_out < 0.5:
            raise ConfigurationError("p_out must lie in [0, 0.5)")

    @property
    def truth(self) -> np.ndarray:
        return np.array([self.mu0])


@dataclass(frozen=True)
class RegressionDesign:
    """Sorted normal regressor, occasional 3x error inflation, and the
    largest-x points shifted down to act as leverage points.

    With ``leverage_when_clean=False`` the shift is skipped at ``v_star = 1``,
    so that grid point is a fully outlier-free baseline.
    """

    n: int = 500
    delta0_star: float = 2.0
    delta1_star: float = 1.0
    v_star: float = 0.95
    x_variance: float = 5.0
    inflation: float = 3.0
    leverage_shift: float = -10.0
    n_leverage: int = 3
    leverage_when_clean: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n < 10 + self.n_leverage:
            raise ConfigurationError("regression design needs n >= 10 + n_leverage")
        if not 0.5 < self.v_star <= 1.0:
            raise ConfigurationError("v_star must lie in (0.5, 1]")

    @property
    def truth(self) -> np.ndarray:
        return np.array([self.delta0_star, self.delta1_star])


@dataclass(frozen=True)
class SimulatedData:
    data: Dataset
    flags: np.ndarray  # True where an observation did not come from the good model

    @property
    def x(self) -> np.ndarray:
        return self.data.x

    @property
    def y(self):
        return self.data.y


def gen_location_data(design: LocationDesign, rng: np.random.Generator) -> SimulatedData:
    flags = rng.random(design.n) < design.p_out
    e = rng.standard_normal(design.n)
    x = np.where(flags, design.xi0, design.mu0) + e
    return SimulatedData(Dataset(x), flags)


def gen_regression_data(design: RegressionDesign, rng: np.random.Generator) -> SimulatedData:
    n = design.n
    x = np.sort(rng.normal(0.0, np.sqrt(design.x_variance), n))
    inflated = rng.random(n) >= design.v_star
    e = rng.standard_normal(n)
    y = design.delta0_star + design.delta1_star * x + np.where(inflated, design.inflation * e, e)
    lev = np.zeros(n, dtype=bool)
    shift = design.leverage_shift
    if design.v_star == 1.0 and not design.leverage_when_clean:
        shift = 0.0
    if design.n_leverage:
        lev[n - design.n_leverage:] = True
        y[lev] += shift
    flags = inflated | (lev & (shift != 0))
    return SimulatedData(Dataset(x, y), flags)


def model_for_data(template: MomentModel, data: Dataset) -> MomentModel:
    """Fill the data-dependent anchors (MAD or robust T) of a model template."""
    keys = template.key_conditions
    mad, T = template.mad, template.robust_scale_T
    if "mad_scale" in keys:
        mad = mad_anchor(data.x, template.mad_rule)
    if "robust_scale" in keys:
        T = robust_error_scale(data.x, data.y)
    return replace(template, mad=mad, robust_scale_T=T)


def coverage(ci_list, truth: float) -> float:
    """Share of intervals ``[lo, hi]`` containing ``truth`` (endpoints count)."""
    ci = np.asarray(list(ci_list), dtype=float)
    if ci.size == 0:
        raise InputError("coverage of an empty interval list is undefined")
    ci = ci.reshape(-1, 2)
    return float(np.mean((ci[:, 0] <= truth) & (truth <= ci[:, 1])))


def replicate_seed(seed: int, rep: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(rep,))


@dataclass
class MethodReport:
    method: str
    param_names: list
    av_post_mean: np.ndarray
    av_post_sd: np.ndarray
    av_ts_se: np.ndarray
    poc: np.ndarray
    n_ok: int
    n_failed: int
    post_means: np.ndarray = field(repr=False)  # replicates x parameters

    def rows(self):
        for j, name in enumerate(self.param_names):
            yield {
                "method": self.method,
                "parameter": name,
                "Av.Post.Mean": float(self.av_post_mean[j]),
                "Av.Post.SD": float(self.av_post_sd[j]),
                "Av.TS.SE": float(self.av_ts_se[j]),
                "P.O.C": float(self.poc[j]),
            }


@dataclass
class ReplicationReport:
    design: dict
    methods: dict
    failures: list

    def __getitem__(self, method: str) -> MethodReport:
        return self.methods[method]

    def rows(self):
        label = {k: v for k, v in self.design.items() if k != "seed"}
        for rep in self.methods.values():
            for row in rep.rows():
                yield {**label, **row}

    def to_csv(self, path):
        rows = list(self.rows())
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)

    def to_json(self) -> str:
        return json.dumps({"design": self.design, "rows": list(self.rows()), "failures": self.failures})


def _one_replicate(args):
    design, template, priors, config, rep, methods = args
    ss = replicate_seed(design.seed, rep)
    data_ss, *chain_ss = ss.spawn(1 + len(methods))
    data_rng = np.random.default_rng(data_ss)
    if isinstance(design, LocationDesign):
        sim = gen_location_data(design, data_rng)
    else:
        sim = gen_regression_data(design, data_rng)
    model = model_for_data(template, sim.data)
    out = {}
    for method, css in zip(methods, chain_ss):
        try:
            chain = run_chain(model, priors, sim.data, config, np.random.default_rng(css), method=method)
        except ChainError as exc:
            out[method] = str(exc)
            continue
        summary = summarize_chain(chain)
        out[method] = [(p.post_mean, p.post_sd, p.ts_se, p.ci_low, p.ci_high)
                       for p in summary.parameters[: model.theta_dim]]
    return rep, out


def replicate(design, model: MomentModel, priors: Priors, chain_config: ChainConfig, n_reps: int,
              truth: Optional[Sequence[float]] = None, workers: int = 1,
              methods: Sequence[str] = ("betel", "rbetel")) -> ReplicationReport:
    """Run every method on ``n_reps`` simulated datasets and aggregate.

    Replicate ``r`` draws its data and chains from
    ``SeedSequence(design.seed, spawn_key=(r,))``, so results do not depend
    on ``workers``.  ``model`` is a template: MAD or T anchors are
    recomputed on each dataset.  Failed chains are dropped from the
    averages; more than 10% failures for a method raises ChainError.
    """
    if n_reps < 2:
        raise ConfigurationError("replicate needs n_reps >= 2")
    if workers < 1:
        raise ConfigurationError("workers must be >= 1")
    truth = design.truth if truth is None else np.asarray(truth, dtype=float)
    if truth.size != model.theta_dim:
        raise ConfigurationError("truth must have one value per parameter")
    methods = tuple(methods)
    priors = priors.for_dim(model.theta_dim)
    jobs = [(design, model, priors, chain_config, r, methods) for r in range(n_reps)]
    if workers == 1:
        results = [_one_replicate(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_replicate, jobs))
    results.sort(key=lambda r: r[0])

    reports, failures = {}, []
    for method in methods:
        ok = [(rep, res[method]) for rep, res in results if not isinstance(res[method], str)]
        failed = [(rep, res[method]) for rep, res in results if isinstance(res[method], str)]
        failures += [{"method": method, "replicate": rep, "error": msg} for rep, msg in failed]
        if len(failed) > 0.1 * n_reps:
            raise ChainError(f"{method}: {len(failed)} of {n_reps} replicates failed")
        arr = np.array([vals for _, vals in ok])  # reps x params x 5
        poc = np.array([coverage(arr[:, j, 3:5], truth[j]) for j in range(arr.shape[1])])
        reports[method] = MethodReport(method, list(model.param_names), arr[:, :, 0].mean(0),
                                       arr[:, :, 1].mean(0), arr[:, :, 2].mean(0), poc,
                                       len(ok), len(failed), arr[:, :, 0])
    return ReplicationReport(asdict(design), reports, failures)
