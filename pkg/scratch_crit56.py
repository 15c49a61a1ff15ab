"""Pilot criteria 5 and 6: oracle ratios for plain, composition, functional CV (dev only)."""
import time

import numpy as np

from tvband.cv_global import (
    CvConfig,
    WeightFunction,
    select_cv,
    select_cv_composition,
    select_cv_functional,
    uniform_grid,
)
from tvband.evaluation import default_u_grid, distance_dM_comp, distance_dM_fun, oracle_bandwidth
from tvband.kernels import epanechnikov
from tvband.moments import (
    CurveFamily,
    EstimateCurve,
    char_cos,
    covariance_lag,
    evaluate_series,
    lagged_square,
    ratio_composition,
    stack,
)
from tvband.processes import closed_form_ground_truth, simulate_tvar, sin_full, true_char_function

n, seed = 500, 20260809
curve = sin_full()
u_grid = default_u_grid(201)
grid = uniform_grid(50)
w = WeightFunction(0.05)
fam = CurveFamily(epanechnikov, n, u_grid, grid)

# --- criterion 5: plain CV oracle-ratio medians at n = 500 and n = 1000
g = covariance_lag(1)
for nn, N in ((500, 120), (1000, 120)):
    t0 = time.time()
    famn = CurveFamily(epanechnikov, nn, u_grid, grid)
    truth = closed_form_ground_truth(curve, g, u_grid)
    cfg = CvConfig(grid=grid, alpha_cutoff=0.12)
    ratios = []
    for r in range(N):
        path = simulate_tvar(curve, nn, seed=seed, rep=r)
        res = select_cv(path.values, g, cfg)
        h_star, dists = oracle_bandwidth(path.values, g, grid, truth, w, family=famn)
        ratios.append(dists[int(np.argmin(np.abs(grid - res.h_hat)))] / dists.min())
    print(f"n={nn}: median oracle ratio {np.median(ratios):.3f}   ({time.time()-t0:.0f}s)")

# --- criterion 6a: gamma composition, cutoff 0.08
F = ratio_composition()
g2 = stack(lagged_square(1), covariance_lag(1))
truth2 = closed_form_ground_truth(curve, g2, u_grid)
N = 100
for strategy in ("largest_local_min", "smallest_local_min"):
    t0 = time.time()
    cfg = CvConfig(grid=grid, alpha_cutoff=0.08, minimum_strategy=strategy)
    ratios, hsel = [], []
    for r in range(N):
        path = simulate_tvar(curve, n, seed=seed, rep=r)
        res = select_cv_composition(path.values, g2, F, cfg)
        z = evaluate_series(path.values, g2)
        raw = fam.raw(z)
        dists = []
        for i, h in enumerate(grid):
            est = EstimateCurve(u_grid, raw[i], float(h), "raw", np.ones(len(u_grid), bool))
            dists.append(distance_dM_comp(est, truth2, F, w))
        dists = np.array(dists)
        ратio = dists[int(np.argmin(np.abs(grid - res.h_hat)))] / dists.min()
        ratios.append(ратio)
        hsel.append(res.h_hat)
    print(
        f"comp {strategy}: ratio_med={np.median(ratios):.2f} h_med={np.median(hsel):.2f}"
        f" h_q=[{np.quantile(hsel,0.1):.2f},{np.quantile(hsel,0.9):.2f}] ({time.time()-t0:.0f}s)"
    )

# --- criterion 6b: characteristic function, cutoff 0.10, Theta = [-10, 10]
theta_grid = np.linspace(-10, 10, 41)
truths = [closed_form_ground_truth(curve, char_cos(t), u_grid) for t in theta_grid]
N = 60
for strategy in ("largest_local_min", "smallest_local_min"):
    t0 = time.time()
    cfg = CvConfig(grid=grid, alpha_cutoff=0.10, minimum_strategy=strategy)
    ratios, hsel = [], []
    for r in range(N):
        path = simulate_tvar(curve, n, seed=seed, rep=r)
        res = select_cv_functional(path.values, char_cos, theta_grid, cfg)
        dists = np.zeros(len(grid))
        zz = np.concatenate([evaluate_series(path.values, char_cos(t)) for t in theta_grid], axis=1)
        raw = fam.raw(zz)  # (n_h, m, n_theta)
        wt = w(u_grid) * (~truths[0].excluded)
        du = 1.0 / len(u_grid)
        tv = np.stack([tr.values[:, 0] for tr in truths], axis=1)  # (m, n_theta)
        per_theta = ((raw - tv[None]) ** 2 * wt[None, :, None]).sum(axis=1) * du  # (n_h, n_theta)
        dists = np.trapezoid(per_theta, theta_grid, axis=1)
        ratios.append(dists[int(np.argmin(np.abs(grid - res.h_hat)))] / dists.min())
        hsel.append(res.h_hat)
    print(
        f"fun  {strategy}: ratio_med={np.median(ratios):.2f} h_med={np.median(hsel):.2f}"
        f" h_q=[{np.quantile(hsel,0.1):.2f},{np.quantile(hsel,0.9):.2f}] ({time.time()-t0:.0f}s)"
    )
