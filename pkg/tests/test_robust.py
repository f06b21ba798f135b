import numpy as np
import pytest

from rbetel.datasets import load_animals
from rbetel.errors import ConfigurationError, InputError
from rbetel.robust import (MMConfig, bisquare_rho, mm_fit, ols_fit, robust_error_scale, s_scale)


@pytest.fixture(scope="module")
def animals():
    return load_animals()[1]


def test_ols_matches_published_least_squares_fit(animals):
    fit = ols_fit(animals.x, animals.y)
    assert fit.intercept == pytest.approx(2.1717, abs=1e-3)
    assert fit.slope == pytest.approx(0.5915, abs=1e-3)
    np.testing.assert_allclose(fit.std_errors, [0.1620, 0.0411], atol=1e-3)


def test_ols_residuals_are_orthogonal_to_design():
    rng = np.random.default_rng(1)
    x = rng.normal(size=50)
    y = 1 + 2 * x + rng.normal(size=50)
    fit = ols_fit(x, y)
    r = y - fit.intercept - fit.slope * x
    assert abs(r.sum()) < 1e-10
    assert abs(r @ x) < 1e-10


def test_mm_close_to_published_robust_fit(animals):
    fit = mm_fit(animals.x, animals.y)
    assert fit.intercept == pytest.approx(2.1175, abs=0.03)
    assert fit.slope == pytest.approx(0.7460, abs=0.03)


def test_mm_is_deterministic_for_a_seed(animals):
    a = mm_fit(animals.x, animals.y, MMConfig(seed=4))
    b = mm_fit(animals.x, animals.y, MMConfig(seed=4))
    np.testing.assert_array_equal(a.coefficients, b.coefficients)
    assert a.scale == b.scale


def test_mm_survives_heavy_contamination():
    rng = np.random.default_rng(7)
    n = 200
    x = rng.normal(size=n)
    y = 1 + 2 * x + 0.5 * rng.normal(size=n)
    bad = rng.choice(n, 60, replace=False)  # 30% gross outliers
    x[bad] = rng.normal(5, 0.5, 60)
    y[bad] = rng.normal(-20, 1, 60)
    ols = ols_fit(x, y)
    mm = mm_fit(x, y)
    assert abs(ols.slope - 2) > 1.0
    assert mm.slope == pytest.approx(2, abs=0.15)
    assert mm.intercept == pytest.approx(1, abs=0.15)


def test_s_scale_of_normal_residuals_is_consistent():
    r = np.random.default_rng(0).standard_normal(20000)
    assert s_scale(r) == pytest.approx(1.0, abs=0.03)
    assert s_scale(np.zeros(10)) == 0.0


def test_bisquare_rho_is_bounded():
    u = np.linspace(-10, 10, 101)
    rho = bisquare_rho(u, 1.5476)
    assert rho.max() == 1.0 and rho.min() == 0.0


def test_robust_scale_is_squared_scale(animals):
    assert robust_error_scale(animals.x, animals.y) == pytest.approx(mm_fit(animals.x, animals.y).scale ** 2)


def test_input_validation():
    with pytest.raises(InputError):
        ols_fit([1, 2], [1, 2])
    with pytest.raises(InputError):
        ols_fit([1, 1, 1], [1, 2, 3])
    with pytest.raises(InputError):
        mm_fit([1, 2, 3], [1, 2])
    with pytest.raises(ConfigurationError):
        mm_fit([1, 2, 3, 4], [1, 2, 3, 5], MMConfig(scale_source="q"))
