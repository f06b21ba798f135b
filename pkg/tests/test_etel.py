import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import three_point_closed_form, tilt_oracle
from rbetel.errors import InputError
from rbetel.etel import (SolverOptions, implied_weights, log_el_ratio, log_etel_active,
                         solve_tilting)


def test_symmetric_pair_gives_uniform_weights():
    sol = solve_tilting([[-1.0], [1.0]])
    assert sol.converged and sol.hull_ok
    assert abs(sol.lam[0]) < 1e-12
    np.testing.assert_allclose(sol.weights, [0.5, 0.5], atol=1e-12)
    assert abs(sol.log_etel) < 1e-12


def test_three_point_matches_closed_form():
    lam, w, log_ratio = three_point_closed_form()
    sol = solve_tilting(np.array([[-1.0], [0.0], [2.0]]))
    assert abs(sol.lam[0] - lam) < 1e-10
    np.testing.assert_allclose(sol.weights, w, atol=1e-10)
    assert abs(sol.log_etel - log_ratio) < 1e-10


@pytest.mark.parametrize("g", [[[1.0], [2.0], [3.0]], [[99.0]], [[0.5, 1.0], [1.0, 2.0], [2.0, 0.1]]])
def test_origin_outside_hull_is_reported_not_raised(g):
    sol = solve_tilting(g)
    assert not sol.hull_ok
    assert not sol.converged
    assert sol.log_etel == -np.inf


def test_origin_on_hull_edge_has_negligible_likelihood():
    # origin sits on the segment between the first two rows: the infimum is
    # approached as the third weight goes to zero, so the solver either gives
    # up or stops inside tolerance with a vanishing likelihood
    sol = solve_tilting([[-1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert (not sol.converged) or sol.log_etel < -15


def test_rejects_non_finite_rows():
    with pytest.raises(InputError):
        solve_tilting([[np.nan], [1.0]])
    with pytest.raises(InputError):
        solve_tilting(np.zeros((0, 2)))


def test_implied_weights_reproduce_solver_weights():
    rng = np.random.default_rng(3)
    g = rng.standard_normal((40, 3))
    g -= g.mean(0) * 0.8
    sol = solve_tilting(g)
    np.testing.assert_allclose(implied_weights(g, sol.lam), sol.weights, atol=1e-14)


def test_log_el_ratio_by_hand():
    w = np.array([0.43528, 0.34548, 0.21924])
    expected = np.log(3 * 0.43528) + np.log(3 * 0.34548) + np.log(3 * 0.21924)
    assert abs(log_el_ratio(w) - expected) < 1e-12
    assert log_el_ratio(np.full(7, 1 / 7)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("w", [[0.5, 0.6], [1.0, 0.0], [-0.1, 1.1], []])
def test_log_el_ratio_rejects_bad_weights(w):
    with pytest.raises(InputError):
        log_el_ratio(w)


def test_active_subset_matches_direct_solve():
    rng = np.random.default_rng(8)
    g = rng.standard_normal((12, 2))
    s = np.array([1, 1, 0, 1, 1, 1, 0, 1, 1, 1, 1, 0], dtype=bool)
    sol, val = log_etel_active(g, s)
    direct = solve_tilting(g[s])
    assert val == direct.log_etel
    assert sol.m == s.sum()
    with pytest.raises(InputError):
        log_etel_active(g, np.zeros(12))
    with pytest.raises(InputError):
        log_etel_active(g, np.ones(5))


def test_divergence_bound_is_respected():
    opts = SolverOptions(lambda_bound=5.0)
    sol = solve_tilting([[1.0], [2.0]], opts)
    assert not sol.hull_ok
    assert sol.iterations < 100


def test_agrees_with_derivative_free_oracle_on_a_few_instances():
    rng = np.random.default_rng(11)
    for _ in range(10):
        g = rng.standard_normal((5, 2))
        g -= rng.dirichlet(np.ones(5)) @ g
        lam, w = tilt_oracle(g)
        sol = solve_tilting(g)
        assert np.max(np.abs(sol.lam - lam)) < 1e-5


def _centred_rows(draw_rows):
    g, weights = draw_rows
    # subtracting a strictly positive convex combination puts the origin inside the hull
    return g - weights @ g


rows = st.tuples(
    arrays(np.float64, st.tuples(st.integers(3, 30), st.integers(1, 3)),
           elements=st.floats(-5, 5, allow_nan=False, width=64)),
    st.integers(0, 2**32 - 1),
).map(lambda t: (t[0], np.random.default_rng(t[1]).dirichlet(np.ones(t[0].shape[0]))))


@settings(max_examples=150, deadline=None)
@given(rows)
def test_solution_satisfies_moment_constraint(data):
    g = _centred_rows(data)
    sol = solve_tilting(g)
    if not sol.converged:
        # only acceptable when the rows are (numerically) degenerate
        assert np.linalg.matrix_rank(g - g.mean(0), tol=1e-8) < g.shape[1] or np.ptp(g) < 1e-6
        return
    assert abs(sol.weights.sum() - 1) < 1e-12
    assert np.all(sol.weights > 0)
    scale = max(1.0, np.abs(g).max())
    assert np.max(np.abs(sol.weights @ g)) <= 1e-8 * scale
    assert sol.log_etel <= 1e-9


@settings(max_examples=60, deadline=None)
@given(rows, st.integers(0, 10**6))
def test_row_permutation_permutes_weights(data, seed):
    g = _centred_rows(data)
    perm = np.random.default_rng(seed).permutation(g.shape[0])
    a, b = solve_tilting(g), solve_tilting(g[perm])
    assert a.converged == b.converged
    if a.converged:
        np.testing.assert_allclose(b.weights, a.weights[perm], atol=1e-9)
        assert b.log_etel == pytest.approx(a.log_etel, abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(rows, st.floats(0.1, 10))
def test_rescaling_rows_rescales_lambda(data, c):
    g = _centred_rows(data)
    a, b = solve_tilting(g), solve_tilting(c * g)
    if a.converged and b.converged:
        np.testing.assert_allclose(b.lam * c, a.lam, rtol=1e-6, atol=1e-6)
        assert b.log_etel == pytest.approx(a.log_etel, abs=1e-7)
