"""Pilot run for the CV concentration criterion (dev only, not shipped)."""
import time

import numpy as np

from tvband.cv_global import CvConfig, WeightFunction, select_cv, uniform_grid
from tvband.evaluation import default_u_grid, distance_dM, h_opt_global, oracle_bandwidth
from tvband.kernels import epanechnikov
from tvband.moments import CurveFamily, covariance_lag, evaluate_series
from tvband.processes import closed_form_ground_truth, mc_ground_truth, simulate_tvar, sin_full

t0 = time.time()
n, N, seed = 500, 200, 20260809
curve = sin_full()
g = covariance_lag(1)
u_grid = default_u_grid(201)
grid = uniform_grid(50)
cfg = CvConfig(grid=grid, alpha_cutoff=0.12)
w = WeightFunction(0.05)

truth_cf = closed_form_ground_truth(curve, g, u_grid)
print("excluded points:", truth_cf.excluded.sum())
h_opt_cf = h_opt_global(truth_cf, epanechnikov, n, w)
print(f"h_opt closed form: {h_opt_cf:.4f}")

t1 = time.time()
truth_mc = mc_ground_truth(curve, g, u_grid, reps=6, path_len=100_000, seed=1234, curvature="closed_form")
print(f"mc truth time: {time.time()-t1:.1f}s; infilled: {truth_mc.flags['sigma_infilled'].sum()}, disagree: {truth_mc.flags['sigma_disagree'].sum()}")
h_opt_mc = h_opt_global(truth_mc, epanechnikov, n, w)
print(f"h_opt MC truth:    {h_opt_mc:.4f}")

fam = CurveFamily(epanechnikov, n, u_grid, grid)
h_hats, ratios, dm_mean = [], [], np.zeros(len(grid))
fallbacks = 0
t2 = time.time()
for r in range(N):
    path = simulate_tvar(curve, n, seed=seed, rep=r)
    res = select_cv(path.values, g, cfg)
    fallbacks += res.fallback
    h_star, dists = oracle_bandwidth(path.values, g, grid, truth_cf, w, family=fam)
    dm_mean += dists / N
    i_hat = int(np.argmin(np.abs(grid - res.h_hat)))
    h_hats.append(res.h_hat)
    ratios.append(dists[i_hat] / dists.min())
print(f"cv loop: {time.time()-t2:.1f}s")

h_hats = np.array(h_hats)
ratios = np.array(ratios)
h_emp = grid[np.argmin(dm_mean)]
print(f"empirical argmin of mean d_M: {h_emp:.3f}")
print(f"h_hat quantiles: {np.quantile(h_hats, [0.05, 0.25, 0.5, 0.75, 0.95])}")
print(f"fallbacks: {fallbacks}")
vals, counts = np.unique(h_hats, return_counts=True)
print("hist:", dict(zip(np.round(vals, 2).tolist(), counts.tolist())))
for target, name in ((h_opt_cf, "cf"), (h_opt_mc, "mc")):
    frac = np.mean(np.abs(h_hats - target) <= 2.0 / 50 + 1e-9)
    print(f"within +-2 grid steps of h_opt_{name} ({target:.3f}): {frac:.2%}")
print(f"median oracle ratio: {np.median(ratios):.3f}")
print(f"total time: {time.time()-t0:.1f}s")
