import numpy as np
import pytest
from numpy.testing import assert_allclose

from tvband.cv_global import WeightFunction, uniform_grid
from tvband.evaluation import (
    DistanceReport,
    default_u_grid,
    distance_dM,
    distance_dM_comp,
    distance_dM_fun,
    h_opt_global,
    oracle_bandwidth,
)
from tvband.kernels import epanechnikov
from tvband.moments import (
    EstimateCurve,
    covariance_lag,
    estimate_curve,
    identity_composition,
    ratio_composition,
)
from tvband.processes import GroundTruth, closed_form_ground_truth, simulate_tvar, sin_scaled


def make_truth(u_grid, values, sigma_trace=None, curvature=None, excluded=None):
    values = np.atleast_2d(np.asarray(values, float))
    if values.shape[0] != len(u_grid):
        values = values.T
    m = len(u_grid)
    return GroundTruth(
        u_grid=np.asarray(u_grid, float),
        values=values,
        curvature=None if curvature is None else np.atleast_2d(np.asarray(curvature, float)).reshape(m, -1),
        sigma_trace=None if sigma_trace is None else np.asarray(sigma_trace, float),
        excluded=np.zeros(m, dtype=bool) if excluded is None else excluded,
    )


def curve_on(u_grid, values, h=0.1):
    values = np.atleast_2d(np.asarray(values, float))
    if values.shape[0] != len(u_grid):
        values = values.T
    return EstimateCurve(u_grid, values, h, "raw", np.ones(len(u_grid), dtype=bool))


def test_distance_zero_when_equal():
    u = default_u_grid(201)
    vals = np.sin(u)
    truth = make_truth(u, vals)
    est = curve_on(u, vals)
    assert distance_dM(est, truth, WeightFunction(0.05)) == 0.0


def test_distance_constant_offset():
    u = default_u_grid(1000)
    truth = make_truth(u, np.zeros_like(u))
    c = 0.7
    est = curve_on(u, np.full_like(u, c))
    val = distance_dM(est, truth, WeightFunction(0.05))
    assert_allclose(val, 0.9 * c**2, rtol=2e-3)


def test_distance_grid_refinement():
    w = WeightFunction(0.05)
    vals = []
    for m in (400, 800):
        u = default_u_grid(m)
        truth = make_truth(u, np.zeros_like(u))
        est = curve_on(u, np.sin(2 * np.pi * u))
        vals.append(distance_dM(est, truth, w))
    assert abs(vals[0] - vals[1]) / vals[1] < 0.005


def test_distance_is_symmetric_squared_distance():
    u = default_u_grid(201)
    a = np.sin(2 * np.pi * u)
    b = np.cos(2 * np.pi * u)
    w = WeightFunction(0.05)
    d1 = distance_dM(curve_on(u, a), make_truth(u, b), w)
    d2 = distance_dM(curve_on(u, b), make_truth(u, a), w)
    assert_allclose(d1, d2, rtol=1e-12)
    assert d1 > 0


def test_distance_errors_on_missing_values():
    u = default_u_grid(101)
    vals = np.zeros_like(u)
    vals[50] = np.nan
    truth = make_truth(u, np.zeros_like(u))
    est = EstimateCurve(u, vals[:, None], 0.1, "normalized", np.isfinite(vals))
    with pytest.raises(ValueError):
        distance_dM(est, truth, WeightFunction(0.05))


def test_distance_comp_identity_and_ratio():
    u = default_u_grid(201)
    vals = np.column_stack([1.5 + 0.2 * u, 0.5 * u])
    truth = make_truth(u, vals + 0.1)
    est = curve_on(u, vals)
    w = WeightFunction(0.05)
    ident = distance_dM_comp(est, truth, identity_composition(2), w)
    assert abs(ident - distance_dM(est, truth, w)) < 1e-12
    # Exactly equal curves give zero under any composition.
    same = distance_dM_comp(curve_on(u, vals), make_truth(u, vals), ratio_composition(), w)
    assert same == 0.0


def test_distance_fun_single_theta_and_zero():
    u = default_u_grid(101)
    w = WeightFunction(0.05)
    truth = make_truth(u, np.zeros_like(u))
    est = curve_on(u, np.ones_like(u))
    single = distance_dM_fun([est], [truth], w, [2.0])
    assert_allclose(single, distance_dM(est, truth, w))
    thetas = np.array([-1.0, 0.0, 1.0])
    zero = distance_dM_fun([curve_on(u, np.zeros_like(u))] * 3, [truth] * 3, w, thetas)
    assert zero == 0.0


def test_oracle_bandwidth_basics():
    curve = sin_scaled()
    u = default_u_grid(201)
    g = covariance_lag(1)
    truth = closed_form_ground_truth(curve, g, u)
    path = simulate_tvar(curve, 500, seed=40)
    w = WeightFunction(0.05)
    h_star, dists = oracle_bandwidth(path.values, g, uniform_grid(25), truth, w)
    assert h_star in uniform_grid(25)
    assert dists.shape == (25,)
    assert np.isfinite(dists).all()
    single, _ = oracle_bandwidth(path.values, g, [0.3], truth, w)
    assert single == 0.3


def test_oracle_argmin_ties_and_invariance():
    u = default_u_grid(101)
    w = WeightFunction(0.05)
    g = covariance_lag(1)
    curve = sin_scaled()
    truth = closed_form_ground_truth(curve, g, u)
    path = simulate_tvar(curve, 400, seed=41)
    h_star, d1 = oracle_bandwidth(path.values, g, uniform_grid(20), truth, w)
    # Scaling estimate family and truth by the same factor keeps the argmin.
    scaled_truth = make_truth(u, 4.0 * truth.values, excluded=truth.excluded)
    h_star2, d2 = oracle_bandwidth(2.0 * path.values, g, uniform_grid(20), scaled_truth, w)
    assert h_star2 == h_star
    assert_allclose(d2, 16.0 * d1, rtol=1e-10)


def test_h_opt_global_arithmetic():
    u = default_u_grid(400)
    truth = make_truth(
        u,
        np.zeros_like(u),
        sigma_trace=np.ones_like(u),
        curvature=np.ones_like(u),
    )
    w = WeightFunction(0.25)  # integrates to 0.5 on both top and bottom
    val = h_opt_global(truth, epanechnikov, 500, w)
    expected = (4 * 1.2 / 0.05**2) ** 0.2 * 500 ** (-0.2)
    assert_allclose(val, expected, rtol=1e-9)
    # Fifth-root scaling laws.
    truth32 = make_truth(u, np.zeros_like(u), sigma_trace=32 * np.ones_like(u), curvature=np.ones_like(u))
    assert_allclose(h_opt_global(truth32, epanechnikov, 500, w), 2 * val, rtol=1e-9)
    assert_allclose(h_opt_global(truth, epanechnikov, 32 * 500, w), val / 2, rtol=1e-9)


def test_h_opt_global_full_weight_example():
    # With tr Sigma = curvature = 1 and unit weight the value is
    # (4 * 1.2 / 0.0025)^(1/5) * 500^(-1/5) = 1920^(1/5) * 500^(-1/5).
    u = default_u_grid(500)
    truth = make_truth(u, np.zeros_like(u), sigma_trace=np.ones_like(u), curvature=np.ones_like(u))

    class FullWeight:
        def __call__(self, x):
            return np.ones_like(np.asarray(x, float))

    val = h_opt_global(truth, epanechnikov, 500, FullWeight())
    assert_allclose(val, 1920.0**0.2 * 500 ** (-0.2), rtol=1e-9)
    assert_allclose(val, 1.3086, atol=2e-4)


def test_h_opt_global_zero_curvature_errors():
    u = default_u_grid(100)
    truth = make_truth(u, np.zeros_like(u), sigma_trace=np.ones_like(u), curvature=np.zeros_like(u))
    with pytest.raises(ValueError):
        h_opt_global(truth, epanechnikov, 500, WeightFunction(0.05))


def test_distance_report_csv(tmp_path):
    rep = DistanceReport(h_grid=np.array([0.1, 0.2]), d_M=np.array([1.0, 2.0]), h_star=0.1, h_opt=0.15)
    out = tmp_path / "report.csv"
    rep.to_csv(out)
    text = out.read_text().splitlines()
    assert text[0] == "h,d_M"
    assert text[-2].startswith("h_star")
    assert text[-1].startswith("h_opt")
