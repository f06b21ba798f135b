import json

import numpy as np
import pytest

from rbetel.errors import ConfigurationError, InputError
from rbetel.moments import MomentModel
from rbetel.robust import mm_fit, ols_fit
from rbetel.sampler import ChainConfig, Priors
from rbetel.simlab import (LocationDesign, RegressionDesign, coverage, gen_location_data,
                           gen_regression_data, model_for_data, replicate)


def test_location_without_contamination():
    sim = gen_location_data(LocationDesign(n=20000, p_out=0.0), np.random.default_rng(0))
    assert not sim.flags.any()
    assert abs(sim.x.mean() - 1.0) < 4 / np.sqrt(20000)


def test_location_mixture_mean_and_flags():
    n = 40000
    sim = gen_location_data(LocationDesign(n=n, xi0=6.0, p_out=0.05), np.random.default_rng(1))
    assert abs(sim.flags.mean() - 0.05) < 3 * np.sqrt(0.05 * 0.95 / n)
    assert sim.x.mean() == pytest.approx(1.25, abs=0.03)
    # flagged points are the ones centred on the outlier mean
    assert sim.x[sim.flags].mean() == pytest.approx(6.0, abs=0.1)
    assert sim.x[~sim.flags].mean() == pytest.approx(1.0, abs=0.02)


def test_location_outlier_mean_equal_to_centre():
    sim = gen_location_data(LocationDesign(n=20000, xi0=1.0), np.random.default_rng(2))
    assert abs(sim.x.mean() - 1.0) < 4 / np.sqrt(20000)
    assert sim.x.std() == pytest.approx(1.0, abs=0.03)


def test_regression_sorting_and_leverage():
    design = RegressionDesign(n=300)
    sim = gen_regression_data(design, np.random.default_rng(3))
    assert np.all(np.diff(sim.x) >= 0)
    assert sim.flags[-3:].all()
    top = np.argsort(sim.x)[-3:]
    assert sorted(top) == [297, 298, 299]
    # the shifted points sit about 10 below the line
    resid = sim.y - 2 - sim.x
    assert np.all(resid[-3:] < -5)


def test_regression_clean_design_recovers_line():
    design = RegressionDesign(n=5000, v_star=1.0, leverage_shift=0.0)
    sim = gen_regression_data(design, np.random.default_rng(4))
    assert not sim.flags.any()
    fit = ols_fit(sim.x, sim.y)
    np.testing.assert_allclose(fit.coefficients, [2.0, 1.0], atol=4 * fit.std_errors.max())


def test_leverage_shift_at_full_good_probability_is_optional():
    rng = lambda: np.random.default_rng(6)
    kept = gen_regression_data(RegressionDesign(n=200, v_star=1.0), rng())
    dropped = gen_regression_data(RegressionDesign(n=200, v_star=1.0, leverage_when_clean=False), rng())
    np.testing.assert_allclose(kept.y[-3:], dropped.y[-3:] - 10.0)
    np.testing.assert_array_equal(kept.y[:-3], dropped.y[:-3])
    assert kept.flags.sum() == 3 and not dropped.flags.any()
    # below v* = 1 the shift always applies
    contaminated = gen_regression_data(RegressionDesign(n=200, v_star=0.95, leverage_when_clean=False), rng())
    assert contaminated.flags[-3:].all()


def test_regression_contaminated_design_pulls_ols_slope_down():
    design = RegressionDesign(n=1000, v_star=0.95)
    rng = np.random.default_rng(5)
    ols, mm = [], []
    for _ in range(20):
        sim = gen_regression_data(design, rng)
        ols.append(ols_fit(sim.x, sim.y).slope)
        mm.append(mm_fit(sim.x, sim.y).slope)
    assert np.mean(ols) < 1 - 0.005
    assert np.mean(mm) == pytest.approx(1.0, abs=0.03)


def test_design_validation():
    with pytest.raises(ConfigurationError):
        LocationDesign(p_out=0.6)
    with pytest.raises(ConfigurationError):
        RegressionDesign(v_star=0.4)
    with pytest.raises(ConfigurationError):
        LocationDesign(n=3)


def test_model_for_data_fills_anchors():
    sim = gen_regression_data(RegressionDesign(n=200), np.random.default_rng(6))
    template = MomentModel("linear_regression", {"robust_scale"}, robust_scale_T=0.0)
    model = model_for_data(template, sim.data)
    assert model.robust_scale_T > 0
    loc = model_for_data(MomentModel("location", {"mad_scale"}, mad=0.0), gen_location_data(
        LocationDesign(n=200), np.random.default_rng(7)).data)
    assert 0.8 < loc.mad < 1.3
    raw = model_for_data(MomentModel("location", {"mad_scale"}, mad=0.0, mad_rule="raw"), gen_location_data(
        LocationDesign(n=200), np.random.default_rng(7)).data)
    assert raw.mad == pytest.approx(loc.mad / 1.4826)


def test_coverage_cases():
    assert coverage([(-1, 1)] * 5, 0.0) == 1.0
    assert coverage([(-1, 1), (2, 3)] * 3, 0.0) == 0.5
    assert coverage([(0.0, 1.0)], 0.0) == 1.0
    assert coverage([(-1.0, 0.0)], 0.0) == 1.0
    with pytest.raises(InputError):
        coverage([], 0.0)


def _small_run(workers):
    design = LocationDesign(n=40, xi0=6.0, seed=9)
    template = MomentModel("location", {"third_moment", "huber"})
    return replicate(design, template, Priors.default(1, 50, 5), ChainConfig(n_burnin=100, n_keep=200),
                     n_reps=3, workers=workers)


def test_replicate_is_independent_of_worker_count():
    a, b = _small_run(1), _small_run(2)
    for m in ("betel", "rbetel"):
        np.testing.assert_array_equal(a[m].post_means, b[m].post_means)
        np.testing.assert_array_equal(a[m].poc, b[m].poc)
    assert a.to_json() == b.to_json()


def test_replicate_report_shapes(tmp_path):
    rep = _small_run(1)
    assert set(rep.methods) == {"betel", "rbetel"}
    assert rep["rbetel"].post_means.shape == (3, 1)
    assert rep["betel"].n_ok == 3 and rep.failures == []
    rep.to_csv(tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0].startswith("n,mu0,xi0,p_out,method,parameter,Av.Post.Mean")
    assert len(lines) == 3
    payload = json.loads(rep.to_json())
    assert payload["design"]["seed"] == 9 and len(payload["rows"]) == 2


def test_replicate_validation():
    design = LocationDesign(n=40)
    model = MomentModel("location")
    with pytest.raises(ConfigurationError):
        replicate(design, model, Priors(), ChainConfig(n_keep=10), n_reps=1)
    with pytest.raises(ConfigurationError):
        replicate(design, model, Priors(), ChainConfig(n_keep=10), n_reps=2, truth=[1.0, 2.0])
    with pytest.raises(ConfigurationError):
        replicate(design, model, Priors(), ChainConfig(n_keep=10), n_reps=2, workers=0)
