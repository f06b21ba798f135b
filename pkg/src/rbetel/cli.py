"""Command-line interface: ``rbetel fit|simulate|replicate|summarize``.

Settings come from built-in defaults, then an optional INI file (or the
``manifest.json`` of an earlier run), then command-line flags.  Every run
writes ``manifest.json`` with the fully resolved settings, which is enough
to rerun it bit for bit.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import animals_path, transform_values
from .errors import ChainError, ConfigurationError, InputError
from .moments import KEY_CONDITIONS, Dataset, MomentModel, parse_keys
from .posterior import PosteriorSummary, density_grid, inclusion_probs, summarize, summarize_chain
from .robust import mm_fit, ols_fit
from .sampler import ChainConfig, Priors, run_chain
from .simlab import (LocationDesign, RegressionDesign, gen_location_data, gen_regression_data,
                     model_for_data, replicate)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

METHOD_INDEX = {"betel": 0, "rbetel": 1}


class StageError(Exception):
    def __init__(self, stage, exc, code):
        super().__init__(f"[{stage}] {exc}")
        self.code = code


def _floats(text):
    return [float(t) for t in str(text).split(",") if t.strip()]


def _bool(text):
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {text!r}")


def _optional_float(text):
    if text is None or str(text).strip().lower() in ("auto", "none", ""):
        return None
    return float(text)


def _optional_str(text):
    if text is None or str(text).strip().lower() in ("none", ""):
        return None
    return str(text)


# key -> parser; the INI file may place these under any section
KNOWN = {
    "path": _optional_str, "x": str, "y": _optional_str, "transform": str, "label": _optional_str,
    "family": str, "keys": str, "eps0": float, "mad_rule": str,
    "theta_mean": str, "theta_var": str, "alpha0": float, "beta0": float,
    "burnin": int, "keep": int, "thin": int, "tau": _optional_float, "c": float, "seed": int,
    "adapt": _bool, "method": str,
    "design": str, "experiment": str, "reps": int, "n": int, "grid": str,
    "mu0": float, "xi0": float, "p_out": float, "v_star": float,
    "leverage_when_clean": _bool,
    "draws": _optional_str, "inclusion": _optional_str,
}
# settings that cannot change results
NOT_HASHED = {"out", "workers", "progress"}

DESIGNS = {
    "sim41": dict(design="sim41", n=100, mu0=1.0, xi0=6.0, p_out=0.05, alpha0=50.0, beta0=5.0,
                  burnin=10000, keep=20000, keys="all", mad_rule="raw"),
    "location": dict(design="location", n=500, mu0=1.0, xi0=6.0, p_out=0.05, alpha0=500.0, beta0=50.0,
                     burnin=4000, keep=8000, keys="C1,C2,C3", mad_rule="raw"),
    "regression": dict(design="regression", n=500, v_star=0.95, alpha0=500.0, beta0=50.0,
                       burnin=4000, keep=8000, keys="C1,C2,C3", leverage_when_clean=False),
}
EXPERIMENTS = {
    "location": dict(DESIGNS["location"], experiment="location", grid="2,4,6", reps=20),
    "regression": dict(DESIGNS["regression"], experiment="regression", grid="1,0.98,0.95,0.92", reps=20),
}
CHAIN_DEFAULTS = dict(thin=1, tau=None, c=0.99, seed=0, adapt=True, method="both", eps0=1.5,
                      mad_rule="normal",
                      theta_mean="0", theta_var="100")
FIT_DEFAULTS = dict(CHAIN_DEFAULTS, path=None, x="body_kg", y="brain_g", transform="ln", label="species",
                    family=None, keys="C1,C2,C3", alpha0=30.0, beta0=15.0, burnin=20000, keep=30000)
FIT_FILE_DEFAULTS = dict(x="x", y=None, transform="none", label=None)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI settings file, or manifest.json of a previous run")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--method", choices=["betel", "rbetel", "both"])
    common.add_argument("--burnin", type=int)
    common.add_argument("--keep", type=int)
    common.add_argument("--thin", type=int)
    common.add_argument("--tau", help="indicator proposal stickiness, or 'auto'")
    common.add_argument("--alpha0", type=float)
    common.add_argument("--beta0", type=float)
    common.add_argument("--eps0", type=float)
    common.add_argument("--mad-rule", dest="mad_rule", choices=["normal", "raw"],
                        help="MAD anchor for C3 in location models: normal-consistent or plain")
    common.add_argument("--keys", help="comma list of key conditions (C1,C2,C3 or names), 'none' or 'all'")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--progress", action="store_true", help="print a sweep counter on stderr")

    parser = argparse.ArgumentParser(prog="rbetel", description="Bayesian (robust) ETEL for moment models")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", parents=[common], help="fit a CSV data set (default: bundled animals data)")
    fit.add_argument("--data", dest="path", help="CSV file with a header row")
    fit.add_argument("--x", help="regressor or location column")
    fit.add_argument("--y", help="response column (regression)")
    fit.add_argument("--transform", choices=["none", "ln", "log10"])
    fit.add_argument("--family", choices=["location", "linear_regression"])

    simu = sub.add_parser("simulate", parents=[common], help="fit one simulated data set")
    simu.add_argument("--design", help=f"one of {sorted(DESIGNS)}")
    simu.add_argument("--n", type=int)
    simu.add_argument("--xi0", type=float)
    simu.add_argument("--v-star", dest="v_star", type=float)
    simu.add_argument("--leverage-when-clean", dest="leverage_when_clean", type=_bool,
                      help="keep the leverage shift at v*=1 (yes/no)")

    rep = sub.add_parser("replicate", parents=[common], help="run a replication grid")
    rep.add_argument("--experiment", help=f"one of {sorted(EXPERIMENTS)}")
    rep.add_argument("--reps", type=int)
    rep.add_argument("--n", type=int)
    rep.add_argument("--grid", help="comma list of outlier means or good-data probabilities")
    rep.add_argument("--leverage-when-clean", dest="leverage_when_clean", type=_bool,
                     help="keep the leverage shift at v*=1 (yes/no)")

    summ = sub.add_parser("summarize", parents=[common], help="summarize an existing draws.csv")
    summ.add_argument("--draws", help="draws.csv written by fit or simulate")
    summ.add_argument("--inclusion", help="optional inclusion.csv")
    return parser


def _read_config_file(path, command):
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"config file {path} not found")
    if p.suffix == ".json":
        manifest = json.loads(p.read_text())
        if manifest.get("command") != command:
            raise ConfigurationError(f"manifest is for {manifest.get('command')!r}, not {command!r}")
        return dict(manifest["config"])
    parser = configparser.ConfigParser()
    parser.read(p)
    values = {}
    for section in parser.sections():
        for key, val in parser.items(section):
            values[key] = val
    return values


def _coerce(values):
    out = {}
    for key, val in values.items():
        if key not in KNOWN:
            raise ConfigurationError(f"unknown setting {key!r}")
        try:
            out[key] = val if val is None else KNOWN[key](val)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad value for {key!r}: {val!r}") from exc
    return out


def resolve_config(args) -> dict:
    """Merge defaults, config file and flags into one flat settings dict."""
    command = args.command
    from_file = _coerce(_read_config_file(args.config, command)) if args.config else {}
    flags = {k: v for k, v in vars(args).items()
             if v is not None and k not in ("command", "config", "out", "workers", "progress")}
    if "tau" in flags:
        flags["tau"] = _optional_float(flags["tau"])
    layered = {**from_file, **flags}
    if command == "fit":
        base = dict(FIT_DEFAULTS)
        if layered.get("path"):
            base.update(FIT_FILE_DEFAULTS)
    elif command == "simulate":
        name = layered.get("design", "sim41")
        if name not in DESIGNS:
            raise ConfigurationError(f"unknown design {name!r}; choose from {sorted(DESIGNS)}")
        base = dict(CHAIN_DEFAULTS, **DESIGNS[name])
    elif command == "replicate":
        name = layered.get("experiment", "location")
        if name not in EXPERIMENTS:
            raise ConfigurationError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
        base = dict(CHAIN_DEFAULTS, **EXPERIMENTS[name])
    else:
        base = dict(method=None, draws=None, inclusion=None)
    config = {**base, **layered}
    if command == "fit" and not config.get("family"):
        config["family"] = "linear_regression" if config.get("y") else "location"
    return config


def config_hash(config: dict) -> str:
    core = {k: v for k, v in config.items() if k not in NOT_HASHED}
    return hashlib.sha256(json.dumps(core, sort_keys=True).encode()).hexdigest()[:16]


def _methods(config):
    m = config.get("method") or "both"
    return ["betel", "rbetel"] if m == "both" else [m]


def _key_sets(spec, family):
    if str(spec).strip().lower() == "all":
        base = ["third_moment", "huber", "mad_scale" if family == "location" else "robust_scale"]
        return [frozenset(c) for r in (1, 2, 3) for c in itertools.combinations(base, r)]
    return [parse_keys(spec, family)]


def _key_label(keys, family):
    short = {"third_moment": "C1", "huber": "C2", "mad_scale": "C3", "robust_scale": "C3"}
    return "+".join(short[k] for k in KEY_CONDITIONS if k in keys) or "none"


def _template(family, keys, eps0, mad_rule="normal"):
    # anchors are placeholders until model_for_data fills them from the data
    return MomentModel(family, keys, eps0, mad=0.0 if family == "location" else None,
                       robust_scale_T=0.0 if family == "linear_regression" else None, mad_rule=mad_rule)


def _priors(config, p):
    mean = np.array(_floats(config["theta_mean"]))
    var = np.array(_floats(config["theta_var"]))
    if mean.size not in (1, p) or var.size not in (1, p):
        raise ConfigurationError(f"prior mean/variance need 1 or {p} values")
    return Priors(np.broadcast_to(mean, (p,)), np.broadcast_to(var, (p,)), config["alpha0"], config["beta0"])


def _chain_config(config):
    return ChainConfig(n_burnin=config["burnin"], n_keep=config["keep"], tau=config["tau"], c=config["c"],
                       adapt=config["adapt"], seed=config["seed"], thin=config["thin"])


def _fmt(v):
    return repr(float(v))


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_run(outdir: Path, chain, summary: PosteriorSummary, labels=None):
    """Write summary.json, draws.csv, inclusion.csv and density_<param>.csv."""
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "summary.json").write_text(summary.to_json(indent=1) + "\n")
    cols = [chain.theta[:, j] for j in range(chain.theta.shape[1])]
    header = list(chain.param_names)
    if chain.v is not None:
        cols.append(chain.v)
        header.append("v")
    rows = [[_fmt(c[i]) for c in cols] + [str(int(chain.K[i]))] for i in range(chain.n_draws)]
    _write_csv(outdir / "draws.csv", header + ["K"], rows)
    if summary.inclusion is not None:
        inc_rows = []
        for i, p in enumerate(summary.inclusion):
            row = [str(i), _fmt(p)]
            if labels is not None:
                row.append(labels[i])
            inc_rows.append(row)
        _write_csv(outdir / "inclusion.csv", ["index", "prob"] + (["label"] if labels is not None else []), inc_rows)
    for j, name in enumerate(header):
        dg = density_grid(cols[j])
        _write_csv(outdir / f"density_{name}.csv", ["grid", "density"],
                   [[_fmt(g), _fmt(d)] for g, d in zip(dg.grid, dg.density)])


def format_table(summary: PosteriorSummary) -> str:
    lines = [f"{summary.method.upper()}",
             f"{'Parameter':<10} {'Post.Mean':>10} {'95% C.I.':>22} {'Post.SD':>9} {'TS.SE':>9}"]
    for p in summary.parameters:
        ci = f"({p.ci_low:.4f}, {p.ci_high:.4f})"
        lines.append(f"{p.name:<10} {p.post_mean:>10.4f} {ci:>22} {p.post_sd:>9.4f} {p.ts_se:>9.4f}")
    acc = summary.acceptance
    if acc.get("theta") is not None:
        line = f"acceptance: theta {acc['theta']:.3f}"
        if acc.get("indicator") is not None:
            line += f", indicator {acc['indicator']:.3f}"
        lines.append(line)
    return "\n".join(lines)


def _run_job(job):
    model, priors, data, cfg, seed, key, method, progress = job
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))
    chain = run_chain(model, priors, data, cfg, rng, method=method, progress=progress)
    return chain


def _map(fn, jobs, workers):
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def _load_csv(config):
    if config.get("path"):
        path = Path(config["path"])
        if not path.is_file():
            raise InputError(f"data file {path} not found")
        fh = open(path, newline="", encoding="utf-8")
    else:
        fh = animals_path().open(newline="", encoding="utf-8")
    with fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        fields = reader.fieldnames or []
    wanted = [config["x"]] + ([config["y"]] if config["family"] == "linear_regression" else [])
    for col in wanted:
        if col not in fields:
            raise InputError(f"column {col!r} not found; available: {fields}")
    if config["family"] == "linear_regression" and not config.get("y"):
        raise InputError("regression needs a y column")
    try:
        x = [float(r[config["x"]]) for r in rows]
        y = [float(r[config["y"]]) for r in rows] if config["family"] == "linear_regression" else None
    except ValueError as exc:
        raise InputError(f"non-numeric value in data: {exc}") from exc
    x = transform_values(x, config["transform"])
    y = None if y is None else transform_values(y, config["transform"])
    label = config.get("label")
    labels = [r[label] for r in rows] if label and label in fields else None
    return Dataset(x, y), labels


def _stage(stage, fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except (ConfigurationError, InputError) as exc:
        raise StageError(stage, exc, EXIT_CONFIG) from exc
    except ChainError as exc:
        raise StageError(stage, exc, EXIT_RUNTIME) from exc


def _write_manifest(outdir: Path, command, config):
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {"command": command, "config": config, "seed": config.get("seed"),
                "config_hash": config_hash(config), "version": __version__}
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")


def cmd_fit(config, out, workers=1, progress=False) -> int:
    data, labels = _stage("load data", _load_csv, config)
    family = config["family"]
    template = _stage("model", _template, family, parse_keys(config["keys"], family), config["eps0"],
                      config["mad_rule"])
    model = _stage("model", model_for_data, template, data)
    priors = _stage("priors", _priors, config, model.theta_dim)
    cfg = _stage("chain settings", _chain_config, config)
    methods = _methods(config)
    if family == "linear_regression":
        ols, mm = ols_fit(data.x, data.y), mm_fit(data.x, data.y)
        print(f"OLS: intercept {ols.intercept:.4f} slope {ols.slope:.4f}   "
              f"MM: intercept {mm.intercept:.4f} slope {mm.slope:.4f}")
    jobs = [(model, priors, data, cfg, config["seed"], (METHOD_INDEX[m],), m, progress) for m in methods]
    chains = _stage("sampling", _map, _run_job, jobs, workers)
    h = config_hash(config)
    for method, chain in zip(methods, chains):
        summary = summarize_chain(chain, seed=config["seed"], config_hash=h)
        write_run(out / method, chain, summary, labels)
        print(format_table(summary))
        if summary.inclusion is not None:
            low = np.argsort(summary.inclusion)[:5]
            names = [labels[i] if labels else str(i) for i in low]
            print("lowest inclusion: " + ", ".join(f"{nm} {summary.inclusion[i]:.3f}" for nm, i in zip(names, low)))
    return EXIT_OK


def _design_from(config):
    if config["design"] in ("sim41", "location"):
        return LocationDesign(config["n"], config["mu0"], config["xi0"], config["p_out"], config["seed"])
    return RegressionDesign(n=config["n"], v_star=config["v_star"], seed=config["seed"],
                            leverage_when_clean=config["leverage_when_clean"])


def cmd_simulate(config, out, workers=1, progress=False) -> int:
    design = _stage("design", _design_from, config)
    family = "location" if isinstance(design, LocationDesign) else "linear_regression"
    key_sets = _stage("key conditions", _key_sets, config["keys"], family)
    rng = np.random.default_rng(np.random.SeedSequence(config["seed"], spawn_key=(0,)))
    sim = gen_location_data(design, rng) if family == "location" else gen_regression_data(design, rng)
    priors = _stage("priors", _priors, config, 1 if family == "location" else 2)
    cfg = _stage("chain settings", _chain_config, config)
    out.mkdir(parents=True, exist_ok=True)
    cols = [sim.x] + ([sim.y] if sim.y is not None else [])
    _write_csv(out / "data.csv", ["x"] + (["y"] if sim.y is not None else []) + ["flag"],
               [[_fmt(c[i]) for c in cols] + [str(int(sim.flags[i]))] for i in range(sim.data.n)])
    jobs, tags = [], []
    for method in _methods(config):
        sets = key_sets if method == "rbetel" else [frozenset()]
        for k, keys in enumerate(sets):
            model = _stage("model", model_for_data,
                           _template(family, keys if method == "rbetel" else frozenset(), config["eps0"], config["mad_rule"]),
                           sim.data)
            jobs.append((model, priors, sim.data, cfg, config["seed"], (1, METHOD_INDEX[method], k), method, progress))
            tags.append((method, _key_label(keys, family) if method == "rbetel" else "base"))
    chains = _stage("sampling", _map, _run_job, jobs, workers)
    h = config_hash(config)
    rows = []
    flagged = np.flatnonzero(sim.flags)
    for (method, label), chain in zip(tags, chains):
        summary = summarize_chain(chain, seed=config["seed"], config_hash=h)
        write_run(out / f"{method}_{label}", chain, summary)
        print(f"[{label}] " + format_table(summary))
        out_inc = float(np.mean(summary.inclusion[flagged])) if summary.inclusion is not None and flagged.size else None
        good_inc = float(np.mean(np.delete(summary.inclusion, flagged))) if summary.inclusion is not None else None
        for p in summary.parameters:
            rows.append([method, label, p.name, _fmt(p.post_mean), _fmt(p.post_sd), _fmt(p.ts_se),
                         _fmt(p.ci_low), _fmt(p.ci_high),
                         "" if out_inc is None else _fmt(out_inc), "" if good_inc is None else _fmt(good_inc)])
    _write_csv(out / "summary.csv", ["method", "keys", "parameter", "post_mean", "post_sd", "ts_se",
                                     "ci_low", "ci_high", "outlier_inclusion", "good_inclusion"], rows)
    return EXIT_OK


def cmd_replicate(config, out, workers=1, progress=False) -> int:
    grid = _stage("grid", _floats, config["grid"])
    family = "location" if config["experiment"] == "location" else "linear_regression"
    template = _stage("model", _template, family, parse_keys(config["keys"], family), config["eps0"],
                      config["mad_rule"])
    priors = _stage("priors", _priors, config, template.theta_dim)
    cfg = _stage("chain settings", _chain_config, config)
    out.mkdir(parents=True, exist_ok=True)
    all_rows, reports = [], []
    for value in grid:
        if family == "location":
            design = _stage("design", LocationDesign, config["n"], config["mu0"], value, config["p_out"], config["seed"])
        else:
            design = _stage("design", RegressionDesign, n=config["n"], v_star=value, seed=config["seed"],
                            leverage_when_clean=config["leverage_when_clean"])
        report = _stage("replication", replicate, design, template, priors, cfg, config["reps"],
                        workers=workers or 1, methods=_methods(config))
        reports.append(json.loads(report.to_json()))
        for row in report.rows():
            all_rows.append(row)
            print(f"{('xi0=' + str(value)) if family == 'location' else ('v*=' + str(value)):<10} "
                  f"{row['method']:<7} {row['parameter']:<7} mean {row['Av.Post.Mean']:.4f} "
                  f"sd {row['Av.Post.SD']:.4f} tsse {row['Av.TS.SE']:.5f} poc {row['P.O.C']:.2f}")
    header = list(all_rows[0])
    _write_csv(out / "replication.csv", header, [[_fmt(r[k]) if isinstance(r[k], float) else str(r[k])
                                                   for k in header] for r in all_rows])
    (out / "replication.json").write_text(json.dumps(reports, indent=1) + "\n")
    return EXIT_OK


def _read_draws(path, columns=None):
    """Numeric columns of a CSV file; ``columns`` defaults to all of them."""
    p = Path(path)
    if not p.is_file():
        raise InputError(f"file {path} not found")
    with open(p, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        header = list(reader.fieldnames or [])
    columns = header if columns is None else columns
    missing = [c for c in columns if c not in header]
    if missing:
        raise InputError(f"{path}: column(s) {missing} not found")
    try:
        values = np.array([[float(r[c]) for c in columns] for r in rows])
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric value: {exc}") from exc
    return columns, values.reshape(len(rows), len(columns))


def cmd_summarize(config, out, workers=1, progress=False) -> int:
    if not config.get("draws"):
        raise StageError("arguments", "summarize needs --draws", EXIT_CONFIG)
    header, values = _stage("load draws", _read_draws, config["draws"])
    keep = [j for j, h in enumerate(header) if h != "K"]
    params = _stage("summary", summarize, values[:, keep], 0.95, [header[j] for j in keep])
    inc = None
    if config.get("inclusion"):
        _, v2 = _stage("load inclusion", _read_draws, config["inclusion"], ["prob"])
        inc = v2[:, 0]
    method = config.get("method") or ("rbetel" if "v" in header else "betel")
    summary = PosteriorSummary(method, params, inc, {}, config.get("seed"), config_hash(config))
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.json").write_text(summary.to_json(indent=1) + "\n")
    print(format_table(summary))
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "simulate": cmd_simulate, "replicate": cmd_replicate, "summarize": cmd_summarize}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
    except ConfigurationError as exc:
        print(f"rbetel: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or f"rbetel_{args.command}")
    try:
        out.mkdir(parents=True, exist_ok=True)
        if not os.access(out, os.W_OK):
            raise PermissionError(f"{out} is not writable")
    except OSError as exc:
        print(f"rbetel: error [output directory]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        _write_manifest(out, args.command, config)
        return COMMANDS[args.command](config, out, args.workers or 1, args.progress)
    except StageError as exc:
        print(f"rbetel: error {exc}", file=sys.stderr)
        return exc.code
    except (ConfigurationError, InputError) as exc:
        print(f"rbetel: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ChainError, OSError) as exc:
        print(f"rbetel: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
