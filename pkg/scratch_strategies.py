"""Compare selection strategies / cutoffs for CV on the full-sine model (dev only)."""
import numpy as np

from tvband.cv_global import CvConfig, WeightFunction, find_local_minima, uniform_grid
from tvband.cv_global import cv_objective
from tvband.errors import InfeasibleBandwidthError
from tvband.evaluation import default_u_grid, h_opt_global, oracle_bandwidth
from tvband.kernels import epanechnikov
from tvband.moments import CurveFamily, covariance_lag, evaluate_series
from tvband.processes import closed_form_ground_truth, simulate_tvar, sin_full

n, N, seed = 500, 200, 20260809
curve = sin_full()
g = covariance_lag(1)
u_grid = default_u_grid(201)
grid = uniform_grid(50)
w = WeightFunction(0.05)
truth = closed_form_ground_truth(curve, g, u_grid)
fam = CurveFamily(epanechnikov, n, u_grid, grid)
h_opt_cf = h_opt_global(truth, epanechnikov, n, w)

# Finite-n truth: mean over replications of z_t, smoothed onto the u-grid by
# nearest observation (t spacing 1/500 vs grid 1/201 -> kernel h tiny).
G_n = np.zeros(n)
for r in range(2000):
    path = simulate_tvar(curve, n, seed=999, rep=r)
    G_n += evaluate_series(path.values, g)[:, 0] / 2000
t_axis = np.arange(1, n + 1) / n
finite_vals = np.interp(u_grid, t_axis, G_n)

cutoffs = [0.08, 0.12, 0.2, 0.3]
objs = {c: np.zeros((N, len(grid))) for c in cutoffs}
dists = np.zeros((N, len(grid)))
dists_fin = np.zeros((N, len(grid)))
for r in range(N):
    path = simulate_tvar(curve, n, seed=seed, rep=r)
    z = evaluate_series(path.values, g)
    est = fam.raw(z)[:, :, 0]
    wt = w(u_grid) * (~truth.excluded)
    du = 1.0 / len(u_grid)
    dists[r] = ((est - truth.values[None, :, 0]) ** 2 * wt).sum(axis=1) * du
    dists_fin[r] = ((est - finite_vals[None, :]) ** 2 * w(u_grid)).sum(axis=1) * du
    for c in cutoffs:
        cfg = CvConfig(grid=grid, alpha_cutoff=c)
        for i, h in enumerate(grid):
            try:
                objs[c][r, i] = cv_objective(path.values, g, float(h), cfg)
            except InfeasibleBandwidthError:
                objs[c][r, i] = np.nan

emp_cf = grid[np.argmin(dists.mean(axis=0))]
emp_fin = grid[np.argmin(dists_fin.mean(axis=0))]
print(f"h_opt formula (stationary cf): {h_opt_cf:.4f}; empirical argmin E d_M: cf={emp_cf}, finite-n={emp_fin}")
print("mean d_M finite-n truth:", np.round(dists_fin.mean(axis=0)[::5], 3))

def pick(vals, strategy):
    minima = find_local_minima(grid, vals)
    if not minima:
        finite = np.where(np.isfinite(vals), vals, np.inf)
        return float(grid[len(grid) - 1 - int(np.argmin(finite[::-1]))]), True
    if strategy == "largest":
        return max(minima), False
    if strategy == "smallest":
        return min(minima), False
    idx = int(np.argmin([vals[np.argmin(np.abs(grid - m))] for m in minima]))
    return minima[idx], False

for c in cutoffs:
    for strategy in ("largest", "smallest", "deepest"):
        hh = np.array([pick(objs[c][r], strategy)[0] for r in range(N)])
        fb = sum(pick(objs[c][r], strategy)[1] for r in range(N))
        ratios = []
        for r in range(N):
            i_hat = int(np.argmin(np.abs(grid - hh[r])))
            ratios.append(dists[r, i_hat] / dists[r].min())
        med = np.median(hh)
        for target_name, target in (("cf", h_opt_cf), ("fin", emp_fin)):
            frac = np.mean(np.abs(hh - target) <= 2.0 / 50 + 1e-9)
            if target_name == "cf":
                line = f"cutoff={c:4} {strategy:8} median_h={med:5.2f} fb={fb:3d} within2(cf {target:.2f})={frac:5.1%}"
            else:
                line += f" within2(fin {target:.2f})={frac:5.1%}"
        line += f" ratio_med={np.median(ratios):.2f}"
        print(line)
