"""Distance measures and optimal-bandwidth formulas for scoring selectors.

Distances integrate the squared deviation between an estimate curve and the
ground truth over a weighted u-grid by the midpoint rule.  Grid points marked
as excluded in the ground truth (unit-root neighbourhoods) are skipped by
every oracle evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cv_global import WeightFunction
from .kernels import Kernel, constants, epanechnikov
from .moments import Composition, CurveFamily, EstimateCurve, MomentFunctional, evaluate_series
from .processes import GroundTruth

__all__ = [
    "default_u_grid",
    "distance_dM",
    "distance_dM_comp",
    "distance_dM_fun",
    "oracle_bandwidth",
    "h_opt_global",
    "DistanceReport",
]


def default_u_grid(count: int = 201) -> np.ndarray:
    """Midpoint grid of ``count`` cells covering [0, 1]."""
    return (np.arange(count) + 0.5) / count


def _grid_spacing(u_grid: np.ndarray) -> float:
    du = np.diff(u_grid)
    if len(du) == 0:
        return 1.0
    if not np.allclose(du, du[0], rtol=1e-9, atol=1e-12):
        raise ValueError("u_grid must be uniform for the midpoint rule")
    return float(du[0])


def _effective_weight(truth: GroundTruth, weight: WeightFunction) -> np.ndarray:
    return weight(truth.u_grid) * (~truth.excluded)


def _check_alignment(estimate: EstimateCurve, truth: GroundTruth) -> None:
    if len(estimate.u_grid) != len(truth.u_grid) or not np.allclose(
        estimate.u_grid, truth.u_grid, atol=1e-12
    ):
        raise ValueError("estimate and truth must share the same u-grid")


def distance_dM(estimate: EstimateCurve, truth: GroundTruth, weight: WeightFunction) -> float:
    """Integrated squared deviation of the estimate from the truth.

    Midpoint rule on the estimate's u-grid; missing estimate values inside
    the weight support are an error.
    """
    _check_alignment(estimate, truth)
    w = _effective_weight(truth, weight)
    on = w > 0
    diff = estimate.values[on] - truth.values[on]
    if not np.isfinite(diff).all():
        raise ValueError("estimate or truth has missing values inside the weight support")
    du = _grid_spacing(estimate.u_grid)
    return float(np.sum(np.sum(diff**2, axis=1) * w[on]) * du)


def distance_dM_comp(
    estimate: EstimateCurve, truth: GroundTruth, F: Composition, weight: WeightFunction
) -> float:
    """Distance between F(estimate) and F(truth) over the weighted grid."""
    _check_alignment(estimate, truth)
    w = _effective_weight(truth, weight)
    on = w > 0
    fe = F.fn(estimate.values[on])
    ft = F.fn(truth.values[on])
    if not (np.isfinite(fe).all() and np.isfinite(ft).all()):
        raise ValueError("composition produced non-finite values inside the weight support")
    du = _grid_spacing(estimate.u_grid)
    return float(np.sum(np.sum((fe - ft) ** 2, axis=1) * w[on]) * du)


def distance_dM_fun(estimates, truths, weight: WeightFunction, theta_grid) -> float:
    """Trapezoid integral over theta of the per-theta distances."""
    theta_grid = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    if len(estimates) != len(theta_grid) or len(truths) != len(theta_grid):
        raise ValueError("need one estimate and one truth per theta")
    vals = np.array([distance_dM(e, t, weight) for e, t in zip(estimates, truths)])
    if len(theta_grid) == 1:
        return float(vals[0])
    return float(np.trapezoid(vals, theta_grid))


def _argmin_tie_larger(values: np.ndarray) -> int:
    finite = np.where(np.isfinite(values), values, np.inf)
    return len(finite) - 1 - int(np.argmin(finite[::-1]))


def oracle_bandwidth(
    path,
    g: MomentFunctional,
    grid,
    truth: GroundTruth,
    weight: WeightFunction,
    kernel: Kernel = epanechnikov,
    variant: str = "raw",
    family: CurveFamily | None = None,
):
    """Realization-specific best bandwidth: argmin over the grid of the distance.

    Returns (h_star, distances).  Ties are broken toward larger bandwidths.
    A precomputed CurveFamily over (kernel, n, truth.u_grid, grid) can be
    passed to amortize the kernel weights across replications.
    """
    grid = np.asarray(grid, dtype=float)
    x = np.asarray(getattr(path, "values", path), dtype=float)
    z = evaluate_series(x, g)
    if family is None:
        family = CurveFamily(kernel, len(x), truth.u_grid, grid)
    est = family.raw(z) if variant == "raw" else family.normalized(z)
    w = _effective_weight(truth, weight)
    on = w > 0
    du = _grid_spacing(truth.u_grid)
    diff = est[:, on, :] - truth.values[None, on, :]
    distances = np.sum(np.sum(diff**2, axis=2) * w[on], axis=1) * du
    return float(grid[_argmin_tie_larger(distances)]), distances


def h_opt_global(truth: GroundTruth, kernel: Kernel, n: int, weight: WeightFunction) -> float:
    """Bandwidth minimizing the integrated mean squared error formula.

    (4 sigma_K^2 int tr Sigma w / (mu_K^2 int |G''|^2 w))^(1/5) * n^(-1/5),
    with both integrals over the weighted, non-excluded grid.
    """
    if truth.sigma_trace is None or truth.curvature is None:
        raise ValueError("ground truth must carry sigma_trace and curvature")
    w = _effective_weight(truth, weight)
    on = w > 0
    du = _grid_spacing(truth.u_grid)
    num = float(np.sum(truth.sigma_trace[on] * w[on]) * du)
    den = float(np.sum(np.sum(truth.curvature[on] ** 2, axis=1) * w[on]) * du)
    if den <= 0:
        raise ValueError("curvature integral vanishes; the optimal bandwidth is undefined")
    kc = constants(kernel)
    return float((4.0 * kc.sigma_k_sq * num / (kc.mu_k**2 * den)) ** 0.2 * n ** (-0.2))


@dataclass
class DistanceReport:
    """Distances per bandwidth with the oracle argmin and the formula value."""

    h_grid: np.ndarray
    d_M: np.ndarray
    h_star: float
    h_opt: float | None = None

    def to_csv(self, target) -> None:
        rows = ["h,d_M"]
        rows.extend(f"{h:.17g},{d:.17g}" for h, d in zip(self.h_grid, self.d_M))
        rows.append(f"h_star,{self.h_star:.17g}")
        if self.h_opt is not None:
            rows.append(f"h_opt,{self.h_opt:.17g}")
        text = "\n".join(rows) + "\n"
        if hasattr(target, "write"):
            target.write(text)
        else:
            with open(target, "w") as fh:
                fh.write(text)
