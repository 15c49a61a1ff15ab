"""Criterion 5 under alpha-fixed cutoff scaling, and composition-ratio stability (dev only)."""
import numpy as np

from tvband.cv_global import CvConfig, WeightFunction, select_cv, select_cv_composition, uniform_grid
from tvband.evaluation import default_u_grid, distance_dM_comp, oracle_bandwidth
from tvband.kernels import epanechnikov
from tvband.moments import (
    CurveFamily,
    EstimateCurve,
    covariance_lag,
    evaluate_series,
    lagged_square,
    ratio_composition,
    stack,
)
from tvband.processes import closed_form_ground_truth, simulate_tvar, sin_full

seed = 20260809
curve = sin_full()
u_grid = default_u_grid(201)
grid = uniform_grid(50)
w = WeightFunction(0.05)
g = covariance_lag(1)
truth = closed_form_ground_truth(curve, g, u_grid)

alpha = np.log(0.12) / np.log(1.0 / 500.0)
print(f"alpha = {alpha:.4f}; cutoffs: 500 -> 0.12, 1000 -> {1000.0**-alpha:.4f}, 2000 -> {2000.0**-alpha:.4f}")

for strategy in ("largest_local_min", "smallest_local_min"):
    meds = {}
    for nn, N in ((500, 200), (1000, 200), (2000, 100)):
        famn = CurveFamily(epanechnikov, nn, u_grid, grid)
        cfg = CvConfig(grid=grid, alpha_cutoff=float(nn**-alpha), minimum_strategy=strategy)
        ratios = []
        for r in range(N):
            path = simulate_tvar(curve, nn, seed=seed, rep=r)
            res = select_cv(path.values, g, cfg)
            h_star, dists = oracle_bandwidth(path.values, g, grid, truth, w, family=famn)
            ratios.append(dists[int(np.argmin(np.abs(grid - res.h_hat)))] / dists.min())
        meds[nn] = np.median(ratios)
    print(
        f"alpha-fixed {strategy}: med500={meds[500]:.3f} med1000={meds[1000]:.3f} med2000={meds[2000]:.3f}"
        f" ok(1000<=500)={meds[1000] <= meds[500]}"
    )

# composition ratio stability at N = 200
F = ratio_composition()
g2 = stack(lagged_square(1), covariance_lag(1))
truth2 = closed_form_ground_truth(curve, g2, u_grid)
fam = CurveFamily(epanechnikov, 500, u_grid, grid)
cfg = CvConfig(grid=grid, alpha_cutoff=0.08, minimum_strategy="smallest_local_min")
ratios = []
for r in range(200):
    path = simulate_tvar(curve, 500, seed=seed, rep=r)
    res = select_cv_composition(path.values, g2, F, cfg)
    z = evaluate_series(path.values, g2)
    raw = fam.raw(z)
    dists = np.array(
        [
            distance_dM_comp(
                EstimateCurve(u_grid, raw[i], float(h), "raw", np.ones(len(u_grid), bool)), truth2, F, w
            )
            for i, h in enumerate(grid)
        ]
    )
    ratios.append(dists[int(np.argmin(np.abs(grid - res.h_hat)))] / dists.min())
ratios = np.array(ratios)
print(f"comp smallest N=200: median={np.median(ratios):.3f} "
      f"q25/75=[{np.quantile(ratios,0.25):.2f},{np.quantile(ratios,0.75):.2f}] "
      f"first100={np.median(ratios[:100]):.3f} last100={np.median(ratios[100:]):.3f}")
