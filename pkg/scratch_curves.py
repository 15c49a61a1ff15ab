"""Inspect individual CV objective curves (dev only)."""
import numpy as np

from tvband.cv_global import CvConfig, cv_objective, find_local_minima, uniform_grid
from tvband.moments import covariance_lag
from tvband.processes import simulate_tvar, sin_full, sin_scaled

grid = uniform_grid(50)
for model, name, n in ((sin_full(), "sin_full", 500), (sin_scaled(), "sin_scaled", 500)):
    print(f"== {name}")
    for r in range(3):
        path = simulate_tvar(model, n, seed=20260809, rep=r)
        cfg = CvConfig(grid=grid, alpha_cutoff=0.12)
        vals = np.array([cv_objective(path.values, covariance_lag(1), float(h), cfg) for h in grid])
        print("H:", " ".join(f"{v:7.1f}" for v in vals[::2]))
        print("   minima:", find_local_minima(grid, vals))
