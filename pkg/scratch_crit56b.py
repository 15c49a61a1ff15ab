"""Re-pilot criterion 5 strategies and functional CV with correct masking (dev only)."""
import time

import numpy as np

from tvband.cv_global import CvConfig, WeightFunction, select_cv, select_cv_functional, uniform_grid
from tvband.evaluation import default_u_grid, oracle_bandwidth
from tvband.kernels import epanechnikov
from tvband.moments import CurveFamily, char_cos, covariance_lag, evaluate_series
from tvband.processes import closed_form_ground_truth, simulate_tvar, sin_full

seed = 20260809
curve = sin_full()
u_grid = default_u_grid(201)
grid = uniform_grid(50)
w = WeightFunction(0.05)
g = covariance_lag(1)
truth = closed_form_ground_truth(curve, g, u_grid)

# criterion 5 under both strategies
for strategy in ("largest_local_min", "smallest_local_min"):
    meds = {}
    for nn, N in ((500, 200), (1000, 200)):
        famn = CurveFamily(epanechnikov, nn, u_grid, grid)
        cfg = CvConfig(grid=grid, alpha_cutoff=0.12, minimum_strategy=strategy)
        ratios = []
        for r in range(N):
            path = simulate_tvar(curve, nn, seed=seed, rep=r)
            res = select_cv(path.values, g, cfg)
            h_star, dists = oracle_bandwidth(path.values, g, grid, truth, w, family=famn)
            ratios.append(dists[int(np.argmin(np.abs(grid - res.h_hat)))] / dists.min())
        meds[nn] = np.median(ratios)
    print(f"{strategy}: med500={meds[500]:.3f} med1000={meds[1000]:.3f} direction_ok={meds[1000] <= meds[500]}")

# functional CV, both strategies, masked distances
theta_grid = np.linspace(-10, 10, 41)
truths = [closed_form_ground_truth(curve, char_cos(t), u_grid) for t in theta_grid]
wt = w(u_grid) * (~truths[0].excluded)
on = wt > 0
du = 1.0 / len(u_grid)
tv = np.stack([tr.values[:, 0] for tr in truths], axis=1)
fam = CurveFamily(epanechnikov, 500, u_grid, grid)
N = 80
for strategy in ("largest_local_min", "smallest_local_min"):
    t0 = time.time()
    cfg = CvConfig(grid=grid, alpha_cutoff=0.10, minimum_strategy=strategy)
    ratios, hsel = [], []
    for r in range(N):
        path = simulate_tvar(curve, 500, seed=seed, rep=r)
        res = select_cv_functional(path.values, char_cos, theta_grid, cfg)
        zz = np.concatenate([evaluate_series(path.values, char_cos(t)) for t in theta_grid], axis=1)
        raw = fam.raw(zz)
        per_theta = ((raw[:, on, :] - tv[None, on, :]) ** 2 * wt[None, on, None]).sum(axis=1) * du
        dists = np.trapezoid(per_theta, theta_grid, axis=1)
        ratios.append(dists[int(np.argmin(np.abs(grid - res.h_hat)))] / dists.min())
        hsel.append(res.h_hat)
    print(
        f"fun {strategy}: ratio_med={np.median(ratios):.2f} h_med={np.median(hsel):.2f}"
        f" h_q=[{np.quantile(hsel,0.1):.2f},{np.quantile(hsel,0.9):.2f}] ({time.time()-t0:.0f}s)"
    )
