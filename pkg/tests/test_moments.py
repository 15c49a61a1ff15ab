import numpy as np
import pytest
from numpy.testing import assert_allclose

from tvband.errors import ZeroMassError
from tvband.kernels import TruncatedKernel, constants, epanechnikov
from tvband.moments import (
    CurveFamily,
    char_cos,
    check_jacobian,
    covariance_lag,
    estimate_curve,
    estimate_leaveout,
    estimate_normalized,
    estimate_raw,
    evaluate_series,
    identity_composition,
    indicator_le,
    lagged_eval,
    lagged_square,
    leaveout_curve_at_observations,
    mean_functional,
    ratio_composition,
    stack,
)
from tvband.processes import (
    covariance_curvature,
    lrv_covariance,
    simulate_tvar,
    sin_scaled,
    true_covariance,
)


def test_lagged_eval_examples():
    x = np.array([2.0, 3.0, 5.0, 7.0, 11.0])
    assert lagged_eval(x, covariance_lag(1), 1) == 0.0  # zero padding below t = 1
    assert lagged_eval(x, covariance_lag(0), 5) == 121.0
    assert lagged_eval(x, char_cos(0.0), 3) == 1.0
    assert lagged_eval(x, covariance_lag(1), 3) == 15.0
    assert lagged_eval(x, lagged_square(1), 3) == 9.0
    assert lagged_eval(x, indicator_le(4.0), 2) == 1.0
    with pytest.raises(ValueError):
        lagged_eval(x, mean_functional(), 0)
    with pytest.raises(ValueError):
        lagged_eval(x, mean_functional(), 6)


def test_evaluate_series_matches_lagged_eval():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(40)
    g = stack(covariance_lag(0), covariance_lag(2), char_cos(1.5))
    z = evaluate_series(x, g)
    assert z.shape == (40, 3)
    for t in (1, 2, 17, 40):
        assert_allclose(z[t - 1], lagged_eval(x, g, t))


def test_estimate_raw_constant_path():
    x = np.full(400, 3.0)
    val = estimate_raw(x, mean_functional(), 0.5, 0.2)
    # Riemann sum of the kernel is 1 up to O(1/(nh)).
    assert abs(val[0] - 3.0) < 3.0 * 0.05
    val2 = estimate_normalized(x, mean_functional(), 0.5, 0.2)
    assert_allclose(val2[0], 3.0, rtol=1e-12)


def test_estimate_raw_empty_window_is_zero():
    x = np.ones(10)
    # h so small that no t/n lies inside the kernel support around u.
    val = estimate_raw(x, mean_functional(), 0.55, 0.01)
    assert val[0] == 0.0
    with pytest.raises(ZeroMassError):
        estimate_normalized(x, mean_functional(), 0.55, 0.01)


def test_estimate_rejects_bad_h():
    x = np.ones(10)
    for h in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            estimate_raw(x, mean_functional(), 0.5, h)


def test_normalized_flat_window_equals_sample_mean():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(500)
    g = covariance_lag(1)
    z = evaluate_series(x, g)[:, 0]
    # h = 2 would be rejected; h = 1 at u = 0.5 already covers every point
    # with equal weights only for the flat part of the kernel, so build the
    # flat case explicitly with a wide uniform kernel through the identity:
    # all weights equal when K((t/n-u)/h) is constant over t.  With the
    # Epanechnikov kernel this requires the window to degenerate, so instead
    # assert the exact self-normalization identity on a constant path and the
    # weighted-average property on data.
    val = estimate_normalized(x, g, 0.5, 1.0)
    w = epanechnikov((np.arange(1, 501) / 500 - 0.5) / 1.0)
    assert_allclose(val[0], (w @ z) / w.sum(), rtol=1e-12)


def test_affine_equivariance_of_mean():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(300)
    a, b = 2.5, -1.25
    v1 = estimate_normalized(x, mean_functional(), 0.4, 0.3)
    v2 = estimate_normalized(a * x + b, mean_functional(), 0.4, 0.3)
    assert_allclose(v2, a * v1 + b, rtol=1e-12)


def test_leaveout_without_truncation_matches_normalized():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(200)
    g = covariance_lag(1)
    tk = TruncatedKernel(base=epanechnikov, cutoff=0.0, epsilon=0.0)
    v1 = estimate_leaveout(x, g, 0.5, 0.2, tk)
    v2 = estimate_normalized(x, g, 0.5, 0.2)
    assert_allclose(v1, v2, rtol=1e-12)


def test_leaveout_constant_path():
    x = np.full(500, 2.0)
    tk = TruncatedKernel(base=epanechnikov, cutoff=0.12, epsilon=0.0)
    val = estimate_leaveout(x, mean_functional(), 0.5, 0.1, tk)
    assert_allclose(val[0], 2.0, rtol=1e-12)


def test_leaveout_dead_zone_error():
    x = np.ones(500)
    tk = TruncatedKernel(base=epanechnikov, cutoff=0.6, epsilon=0.0)
    with pytest.raises(ZeroMassError):
        estimate_leaveout(x, mean_functional(), 0.5, 0.1, tk)


def test_leaveout_curve_matches_pointwise():
    rng = np.random.default_rng(4)
    x = rng.standard_normal(250)
    g = covariance_lag(1)
    z = evaluate_series(x, g)
    # cutoff chosen off the observation grid so no weight sits exactly on the
    # hard-truncation jump (grid alignment there is float-order dependent)
    tk = TruncatedKernel(base=epanechnikov, cutoff=0.13, epsilon=0.0)
    est, feasible = leaveout_curve_at_observations(x, z, tk, 0.1)
    assert feasible.all()
    for t in (1, 40, 125, 250):
        u = t / 250
        assert_allclose(est[t - 1], estimate_leaveout(x, g, u, 0.1, tk), rtol=1e-10)


def test_estimate_curve_variants_and_flags():
    x = np.full(300, 1.5)
    curve = estimate_curve(x, mean_functional(), [0.3, 0.5, 0.7], 0.2, variant="normalized")
    assert curve.feasible.all()
    assert_allclose(curve.values[:, 0], 1.5, rtol=1e-12)
    single = estimate_curve(x, mean_functional(), [0.5], 0.2, variant="normalized")
    assert_allclose(single.values[0], estimate_normalized(x, mean_functional(), 0.5, 0.2))
    # Zero-mass points become NaN with a cleared flag instead of raising.
    sparse = estimate_curve(np.ones(10), mean_functional(), [0.5, 0.55], 0.01, variant="normalized")
    assert not sparse.feasible[1]
    assert np.isnan(sparse.values[1, 0])
    assert sparse.feasible[0]


def test_estimate_curve_lipschitz_in_u():
    rng = np.random.default_rng(5)
    x = rng.standard_normal(2000)
    g = mean_functional()
    h = 0.2
    u0, u1 = 0.5, 0.5 + h / 10
    c = estimate_curve(x, g, [u0, u1], h, variant="raw")
    # |Ghat(u0) - Ghat(u1)| <= L_K |u1-u0| / h^2 * mean|z|.
    bound = epanechnikov.lipschitz_const * (u1 - u0) / h**2 * np.mean(np.abs(x))
    assert abs(c.values[0, 0] - c.values[1, 0]) <= bound


def test_curve_family_matches_direct_ops():
    rng = np.random.default_rng(6)
    x = rng.standard_normal(400)
    g = covariance_lag(1)
    z = evaluate_series(x, g)
    u_grid = np.linspace(0.1, 0.9, 17)
    h_grid = np.array([0.1, 0.3, 1.0])
    fam = CurveFamily(epanechnikov, 400, u_grid, h_grid)
    raw = fam.raw(z)
    norm = fam.normalized(z)
    for hi, h in enumerate(h_grid):
        for ui in (0, 8, 16):
            assert_allclose(raw[hi, ui], estimate_raw(x, g, u_grid[ui], h), rtol=1e-12)
            assert_allclose(norm[hi, ui], estimate_normalized(x, g, u_grid[ui], h), rtol=1e-12)


def test_compositions():
    F = ratio_composition()
    check_jacobian(F, np.array([[1.3, 0.4], [2.0, -0.7], [0.5, 0.1]]))
    ident = identity_composition(2)
    check_jacobian(ident, np.array([[1.0, 2.0]]))
    v = np.array([[2.0, 1.0]])
    assert_allclose(F.fn(v), [[0.5]])


def test_leaveout_decorrelation_on_iid_data():
    # On white noise the leave-out estimate at t/n is built from observations
    # other than t, so corr(z_t, Ghat^-(t/n)) should vanish.
    rng = np.random.default_rng(7)
    reps, n = 60, 300
    tk = TruncatedKernel(base=epanechnikov, cutoff=0.12, epsilon=0.0)
    g = mean_functional()
    corrs = []
    for _ in range(reps):
        x = rng.standard_normal(n)
        z = evaluate_series(x, g)
        est, feas = leaveout_curve_at_observations(x, z, tk, 0.2)
        sel = feas.copy()
        corrs.append(np.corrcoef(z[sel, 0], est[sel, 0])[0, 1])
    corrs = np.asarray(corrs)
    se = corrs.std(ddof=1) / np.sqrt(reps)
    assert abs(corrs.mean()) < 3 * se + 0.01


def test_mse_decomposition_invariant(sin_scaled_ensemble):
    # Empirical MSE at u = 0.5 matches sigma_K^2 tr Sigma / (nh) + h^4/4 mu_K^2 |G''|^2
    # within 25 percent relative, for h in {0.1, 0.2} on 5000 replications.
    n = 2000
    curve = sin_scaled()
    kc = constants(epanechnikov)
    truth = true_covariance(curve, 0.5, 1)
    curv = covariance_curvature(curve, 0.5, 1)
    tr_sigma = lrv_covariance(curve.a(0.5), 1)
    for h in (0.1, 0.2):
        est = sin_scaled_ensemble[(0.5, h)]
        mse = np.mean((est - truth) ** 2)
        formula = kc.sigma_k_sq * tr_sigma / (n * h) + h**4 / 4.0 * kc.mu_k**2 * curv**2
        assert abs(mse - formula) <= 0.25 * formula, (h, mse, formula)
