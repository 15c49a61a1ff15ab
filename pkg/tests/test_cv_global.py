import numpy as np
import pytest
from numpy.testing import assert_allclose

from tvband.cv_global import (
    CvConfig,
    WeightFunction,
    alpha_sweep,
    cv_objective,
    cv_objective_composition,
    cv_objective_functional,
    find_local_minima,
    pilot_plugin_curve,
    select_cv,
    select_cv_composition,
    uniform_grid,
)
from tvband.errors import InfeasibleBandwidthError
from tvband.moments import (
    EstimateCurve,
    char_cos,
    covariance_lag,
    identity_composition,
    lagged_square,
    mean_functional,
    ratio_composition,
    stack,
)
from tvband.processes import simulate_tvar, sin_full, true_correlation, true_covariance


def small_config(**kw):
    defaults = dict(grid=uniform_grid(25), alpha_cutoff=0.12)
    defaults.update(kw)
    return CvConfig(**defaults)


def test_weight_function():
    w = WeightFunction(0.05)
    assert w(0.0) == 0.0 and w(1.0) == 0.0
    assert w(0.05) == 1.0 and w(0.5) == 1.0 and w(0.95) == 1.0
    assert set(np.unique(w(np.linspace(0, 1, 101)))) <= {0.0, 1.0}
    with pytest.raises(ValueError):
        WeightFunction(0.0)
    with pytest.raises(ValueError):
        WeightFunction(0.5)


def test_config_validation():
    with pytest.raises(ValueError):
        CvConfig(grid=np.array([0.0, 0.5]))
    with pytest.raises(ValueError):
        CvConfig(grid=np.array([0.5, 0.2]))
    with pytest.raises(ValueError):
        CvConfig(alpha_cutoff=1.2)
    with pytest.raises(ValueError):
        CvConfig(minimum_strategy="median")


def test_objective_zero_on_constant_path():
    x = np.full(400, 2.5)
    cfg = small_config()
    for h in (0.12, 0.4, 1.0):
        assert cv_objective(x, mean_functional(), h, cfg) == pytest.approx(0.0, abs=1e-22)


def test_objective_iid_large_h_near_variance():
    rng = np.random.default_rng(8)
    x = rng.standard_normal(2000)
    cfg = small_config()
    val = cv_objective(x, mean_functional(), 1.0, cfg)
    w = cfg.weight(np.arange(1, 2001) / 2000)
    expected = np.sum((x - x.mean()) ** 2 * w) / 2000
    assert abs(val - expected) / expected < 0.05


def test_objective_nonnegative_and_zero_iff_perfect():
    rng = np.random.default_rng(9)
    x = rng.standard_normal(300)
    cfg = small_config()
    vals = [cv_objective(x, mean_functional(), h, cfg) for h in cfg.grid[2:]]
    assert all(v > 0 for v in vals)


def test_find_local_minima():
    h = np.array([0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
    assert find_local_minima(h, np.array([3.0, 1.0, 2.0, 1.5, 2.5, 2.0])) == [0.2, 0.4]
    # Plateau resolves to the largest h of the run.
    assert find_local_minima(h, np.array([3.0, 1.0, 1.0, 2.0, 3.0, 4.0])) == [0.3]
    # Monotone decreasing: no interior minimum.
    assert find_local_minima(h, np.array([6.0, 5.0, 4.0, 3.0, 2.0, 1.0])) == []
    # NaN entries (infeasible h) are skipped.
    assert find_local_minima(h, np.array([np.nan, 3.0, 1.0, 2.0, np.nan, 3.0])) == [0.3]


def test_select_cv_strategies_on_synthetic_objective(monkeypatch):
    cfg = small_config(minimum_strategy="largest_local_min")
    shaped = {0.2: 1.0, 0.4: 0.8, 0.8: 0.9}

    def fake_objective(path, g, h, config):
        base = 2.0 + h
        return shaped.get(round(h, 2), base)

    monkeypatch.setattr("tvband.cv_global.cv_objective", fake_objective)
    res = select_cv(np.ones(50), mean_functional(), cfg)
    assert res.local_minima == [0.2, 0.4, 0.8]
    assert res.h_hat == 0.8
    assert not res.fallback
    res2 = select_cv(np.ones(50), mean_functional(), small_config(minimum_strategy="smallest_local_min"))
    assert res2.h_hat == 0.2
    res3 = select_cv(np.ones(50), mean_functional(), small_config(minimum_strategy="global_min"))
    assert res3.h_hat == 0.4


def test_select_cv_fallback_on_monotone_objective(monkeypatch):
    monkeypatch.setattr("tvband.cv_global.cv_objective", lambda p, g, h, c: -h)
    res = select_cv(np.ones(50), mean_functional(), small_config())
    assert res.fallback
    assert res.strategy_used == "global_min"
    assert res.h_hat == 1.0


def test_selection_scale_invariance_for_covariance():
    # Scaling the path by a > 0 scales every objective value by a^4 and
    # leaves the minima structure unchanged.
    path = simulate_tvar(sin_full(), 400, seed=31)
    cfg = small_config()
    g = covariance_lag(1)
    scale = 1.7
    r1 = select_cv(path.values, g, cfg)
    r2 = select_cv(scale * path.values, g, cfg)
    ok = np.isfinite(r1.objective)
    assert_allclose(r2.objective[ok], scale**4 * r1.objective[ok], rtol=1e-10)
    assert r1.h_hat == r2.h_hat
    assert r1.local_minima == r2.local_minima


def test_composition_identity_reduces_to_plain():
    path = simulate_tvar(sin_full(), 400, seed=32)
    cfg = small_config()
    g = covariance_lag(1)
    plugin, _ = pilot_plugin_curve(path.values, g, cfg)
    for h in (0.2, 0.5):
        plain = cv_objective(path.values, g, h, cfg)
        comp = cv_objective_composition(path.values, g, identity_composition(1), plugin, h, cfg)
        assert abs(plain - comp) < 1e-12


def test_composition_matches_displayed_formula_with_true_plugin():
    # With the true (c(u,0), c(u,1)) plugged in, the ratio-composition
    # objective equals (1/n) sum X_{t-1}^2 / c0^2 (X_t - gamma X_{t-1})^2 w.
    n = 500
    path = simulate_tvar(sin_full(), n, seed=33)
    x = path.values
    cfg = small_config(alpha_cutoff=0.08)
    g = stack(lagged_square(1), covariance_lag(1))
    t_grid = np.arange(1, n + 1) / n
    safe = np.minimum(np.abs(t_grid - 0.25), np.abs(t_grid - 0.75)) > 1e-6
    c0 = np.where(safe, true_covariance(sin_full(), np.where(safe, t_grid, 0.0), 0), np.inf)
    c1 = np.where(safe, true_covariance(sin_full(), np.where(safe, t_grid, 0.0), 1), 0.0)
    plugin = EstimateCurve(
        u_grid=t_grid,
        values=np.column_stack([c0, c1]),
        h=0.1,
        variant="normalized",
        feasible=np.isfinite(c0),
    )
    h = 0.2
    # Manual evaluation of the displayed objective with the same leave-out fit.
    from tvband.moments import evaluate_series, leaveout_curve_at_observations

    z = evaluate_series(x, g)
    est, feas = leaveout_curve_at_observations(x, z, cfg.truncated_kernel(), h)
    w = cfg.weight(t_grid)
    gamma = c1 / c0
    xlag = np.concatenate([[0.0], x[:-1]])
    resid = (x * xlag - est[:, 1]) - gamma * (xlag**2 - est[:, 0])
    manual = np.sum((resid[feas] ** 2) * (w[feas] / c0[feas] ** 2)) / n
    val = cv_objective_composition(x, g, ratio_composition(), plugin, h, cfg)
    assert_allclose(val, manual, rtol=1e-10)


def test_composition_constant_path_zero():
    x = np.full(300, 2.0)
    cfg = small_config()
    g = stack(lagged_square(1), covariance_lag(1))
    plugin, _ = pilot_plugin_curve(x, g, cfg)
    val = cv_objective_composition(x, g, ratio_composition(), plugin, 0.4, cfg)
    assert val == pytest.approx(0.0, abs=1e-20)


def test_functional_single_theta_matches_plain():
    path = simulate_tvar(sin_full(), 300, seed=34)
    cfg = small_config()
    theta = 1.5
    plain = cv_objective(path.values, char_cos(theta), 0.3, cfg)
    fun = cv_objective_functional(path.values, char_cos, [theta], 0.3, cfg)
    assert_allclose(fun, plain, rtol=1e-12)


def test_functional_symmetric_theta_contributions():
    path = simulate_tvar(sin_full(), 300, seed=35)
    cfg = small_config()
    a = cv_objective_functional(path.values, char_cos, [-2.0], 0.3, cfg)
    b = cv_objective_functional(path.values, char_cos, [2.0], 0.3, cfg)
    assert_allclose(a, b, rtol=1e-12)


def test_functional_grid_refinement_stability():
    path = simulate_tvar(sin_full(), 500, seed=36)
    cfg = small_config(alpha_cutoff=0.10)
    coarse = cv_objective_functional(path.values, char_cos, np.linspace(-10, 10, 41), 0.2, cfg)
    fine = cv_objective_functional(path.values, char_cos, np.linspace(-10, 10, 81), 0.2, cfg)
    assert abs(coarse - fine) / fine < 0.01


def test_alpha_sweep_single_and_dead():
    path = simulate_tvar(sin_full(), 300, seed=37)
    cfg = small_config()
    g = covariance_lag(1)
    single = alpha_sweep(path.values, g, [0.12], cfg)
    direct = select_cv(path.values, g, cfg)
    assert_allclose(single[0.12].objective, direct.objective, rtol=0, atol=0, equal_nan=True)
    # A cutoff of at least 1/2 kills the whole kernel support for every h.
    dead = alpha_sweep(path.values, g, [0.6], cfg)
    assert dead[0.6].infeasible.all()
    assert np.isnan(dead[0.6].h_hat)


def test_all_infeasible_raises():
    cfg = small_config(alpha_cutoff=0.6)
    with pytest.raises(InfeasibleBandwidthError):
        select_cv(np.ones(200), mean_functional(), cfg)


def test_composition_flags_nonfinite_jacobian():
    x = np.full(300, 1.0)
    cfg = small_config()
    g = stack(lagged_square(1), covariance_lag(1))
    n = len(x)
    t_grid = np.arange(1, n + 1) / n
    values = np.column_stack([np.zeros(n), np.ones(n)])  # 1/x blows up at x = 0
    plugin = EstimateCurve(t_grid, values, 0.1, "normalized", np.ones(n, dtype=bool))
    with pytest.raises(InfeasibleBandwidthError):
        cv_objective_composition(x, g, ratio_composition(), plugin, 0.4, cfg)
