"""Does a smoothed truncation ramp remove spurious local minima? (dev only)"""
import numpy as np

from tvband.cv_global import CvConfig, cv_objective, find_local_minima, uniform_grid
from tvband.errors import InfeasibleBandwidthError
from tvband.evaluation import default_u_grid, h_opt_global
from tvband.kernels import epanechnikov
from tvband.moments import CurveFamily, covariance_lag, evaluate_series
from tvband.processes import closed_form_ground_truth, simulate_tvar, sin_full

n, N, seed = 500, 200, 20260809
curve = sin_full()
g = covariance_lag(1)
u_grid = default_u_grid(201)
grid = uniform_grid(50)
truth = closed_form_ground_truth(curve, g, u_grid)
fam = CurveFamily(epanechnikov, n, u_grid, grid)
from tvband.cv_global import WeightFunction

w = WeightFunction(0.05)
h_opt_cf = h_opt_global(truth, epanechnikov, n, w)
wt = w(u_grid) * (~truth.excluded)
du = 1.0 / len(u_grid)

for eps in (0.0, 0.5, 0.9):
    hh_largest, hh_smallest, ratios_l, ratios_s, fb = [], [], [], [], 0
    for r in range(N):
        path = simulate_tvar(curve, n, seed=seed, rep=r)
        cfg = CvConfig(grid=grid, alpha_cutoff=0.12, epsilon=eps)
        vals = np.full(len(grid), np.nan)
        for i, h in enumerate(grid):
            try:
                vals[i] = cv_objective(path.values, g, float(h), cfg)
            except InfeasibleBandwidthError:
                pass
        minima = find_local_minima(grid, vals)
        z = evaluate_series(path.values, g)
        est = fam.raw(z)[:, :, 0]
        dists = ((est - truth.values[None, :, 0]) ** 2 * wt).sum(axis=1) * du
        if minima:
            for arr, rat, hsel in ((hh_largest, ratios_l, max(minima)), (hh_smallest, ratios_s, min(minima))):
                arr.append(hsel)
                rat.append(dists[int(np.argmin(np.abs(grid - hsel)))] / dists.min())
        else:
            fb += 1
    for name, arr, rat in (("largest", hh_largest, ratios_l), ("smallest", hh_smallest, ratios_s)):
        arr = np.array(arr)
        frac = np.mean(np.abs(arr - h_opt_cf) <= 2.0 / 50 + 1e-9)
        print(
            f"eps={eps} {name:8} median={np.median(arr):5.2f} q=[{np.quantile(arr,0.1):.2f},{np.quantile(arr,0.9):.2f}]"
            f" within2(cf {h_opt_cf:.3f})={frac:5.1%} ratio_med={np.median(rat):.2f} fb={fb}"
        )
