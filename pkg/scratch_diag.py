"""Diagnose d_M(h) and H(h) shapes for the full-sine model (dev only)."""
import numpy as np

from tvband.cv_global import CvConfig, WeightFunction, cv_objective, uniform_grid
from tvband.evaluation import default_u_grid, h_opt_global
from tvband.kernels import epanechnikov
from tvband.moments import CurveFamily, covariance_lag, evaluate_series
from tvband.processes import closed_form_ground_truth, simulate_tvar, sin_full

n, N, seed = 500, 100, 20260809
curve = sin_full()
g = covariance_lag(1)
u_grid = default_u_grid(201)
grid = uniform_grid(50)
cfg = CvConfig(grid=grid, alpha_cutoff=0.12)
w = WeightFunction(0.05)
truth = closed_form_ground_truth(curve, g, u_grid)
fam = CurveFamily(epanechnikov, n, u_grid, grid)

wt = w(u_grid) * (~truth.excluded)
on = wt > 0
du = 1.0 / len(u_grid)

# Where does the integrand live? Split into near-boundary vs interior points.
near = np.zeros(len(u_grid), dtype=bool)
for p in (0.25, 0.75):
    near |= np.abs(u_grid - p) <= 0.06
dm_all = np.zeros(len(grid))
dm_near = np.zeros(len(grid))
obj_mean = np.zeros(len(grid))
z_local_means = []
for r in range(N):
    path = simulate_tvar(curve, n, seed=seed, rep=r)
    z = evaluate_series(path.values, g)
    est = fam.raw(z)
    diff2 = (est[:, :, 0] - truth.values[None, :, 0]) ** 2
    dm_all += (diff2[:, on] * wt[on]).sum(axis=1) * du / N
    dm_near += (diff2[:, on & near] * wt[on & near]).sum(axis=1) * du / N
    for i, h in enumerate(grid):
        obj_mean[i] += cv_objective(path.values, g, float(h), cfg) / N
    t = np.arange(1, n + 1) / n
    z_local_means.append([z[np.abs(t - u0) < 0.02, 0].mean() for u0 in (0.23, 0.25, 0.27, 0.5)])

z_local_means = np.array(z_local_means).mean(axis=0)
print("mean z near 0.23/0.25/0.27/0.5:", np.round(z_local_means, 2))
print("truth G at nearest kept points:", truth.values[on & near][:4, 0].round(1))
print("h grid:", np.round(grid[::5], 2))
print("mean d_M(h):      ", np.round(dm_all[::5], 2))
print("mean d_M near excl:", np.round(dm_near[::5], 2))
print("mean H(h):        ", np.round(obj_mean[::5], 3))
print("argmin mean d_M:", grid[np.argmin(dm_all)], " argmin interior-only:", grid[np.argmin(dm_all - dm_near)])
print("mean d_M interior:", np.round((dm_all - dm_near)[::5], 3))
print("h_opt formula:", h_opt_global(truth, epanechnikov, n, w))
