"""First-minimum locations at the paper's cutoff 0.3 (dev only)."""
import numpy as np

from tvband.cv_global import CvConfig, cv_objective, find_local_minima, uniform_grid
from tvband.moments import covariance_lag
from tvband.processes import simulate_tvar, sin_full

grid = uniform_grid(50)
g = covariance_lag(1)
firsts = []
for r in range(30):
    path = simulate_tvar(sin_full(), 500, seed=20260809, rep=r)
    cfg = CvConfig(grid=grid, alpha_cutoff=0.3)
    vals = np.array([cv_objective(path.values, g, float(h), cfg) for h in grid])
    minima = find_local_minima(grid, vals)
    firsts.append(minima[0] if minima else np.nan)
    if r < 6:
        print(f"rep {r}: minima={minima[:6]}  H[0:10]={np.round(vals[:10], 2)}")
firsts = np.array(firsts)
print("first-minimum quantiles:", np.nanquantile(firsts, [0.1, 0.25, 0.5, 0.75, 0.9]))
print("share of first minima in [0.04, 0.16]:", np.nanmean((firsts >= 0.04) & (firsts <= 0.16)))
