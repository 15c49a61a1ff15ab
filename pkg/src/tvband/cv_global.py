"""Global bandwidth selection by cross validation.

The objective compares each observation g(Y_t) against the leave-out kernel
estimate at t/n and averages the squared residuals over a boundary-trimmed
weight.  Variants cover compositions F(G(u)) via a Jacobian-weighted norm and
theta-families integrated over the parameter set.  A sweep over truncation
levels reproduces the stability diagnostic used to pick the dead-zone size.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.ndimage import correlate1d

from .errors import InfeasibleBandwidthError
from .kernels import Kernel, TruncatedKernel, epanechnikov
from .moments import (
    Composition,
    EstimateCurve,
    MomentFunctional,
    conv_weights,
    evaluate_series,
    leaveout_curve_at_observations,
)

__all__ = [
    "WeightFunction",
    "CvConfig",
    "CvResult",
    "uniform_grid",
    "cv_objective",
    "cv_objective_composition",
    "cv_objective_functional",
    "select_cv",
    "select_cv_composition",
    "select_cv_functional",
    "alpha_sweep",
    "find_local_minima",
    "pilot_plugin_curve",
]

_STRATEGIES = ("largest_local_min", "smallest_local_min", "global_min")


@dataclass(frozen=True)
class WeightFunction:
    """Boundary trim w(u) = 1 on [gamma, 1 - gamma], 0 outside."""

    gamma: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.gamma < 0.5:
            raise ValueError(f"gamma must be in (0, 1/2), got {self.gamma}")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return ((u >= self.gamma) & (u <= 1.0 - self.gamma)).astype(float)


def uniform_grid(count: int = 50) -> np.ndarray:
    """The bandwidth grid {k / count : k = 1..count}."""
    return np.arange(1, count + 1) / count


@dataclass(frozen=True)
class CvConfig:
    """Tuning of the cross-validation selector.

    ``alpha_cutoff`` is the truncation level of the leave-out kernel (the
    dead zone removes |t/n - u| < (1 - epsilon) * alpha_cutoff * h).
    Bandwidths where more than ``max_infeasible_frac`` of the weighted
    observations have an empty leave-out window are flagged infeasible.
    """

    grid: np.ndarray = field(default_factory=uniform_grid)
    alpha_cutoff: float = 0.12
    epsilon: float = 0.0
    weight: WeightFunction = WeightFunction(0.05)
    minimum_strategy: str = "largest_local_min"
    kernel: Kernel = epanechnikov
    max_infeasible_frac: float = 0.01

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or len(grid) == 0:
            raise ValueError("grid must be a nonempty 1d array")
        if np.any(grid <= 0) or np.any(grid > 1):
            raise ValueError("grid must lie in (0, 1]")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        if not 0.0 < self.alpha_cutoff < 1.0:
            raise ValueError(f"alpha_cutoff must be in (0, 1), got {self.alpha_cutoff}")
        if self.minimum_strategy not in _STRATEGIES:
            raise ValueError(f"minimum_strategy must be one of {_STRATEGIES}")

    def truncated_kernel(self) -> TruncatedKernel:
        return TruncatedKernel(base=self.kernel, cutoff=self.alpha_cutoff, epsilon=self.epsilon)


@dataclass
class CvResult:
    """Objective values over the grid and the selected bandwidth."""

    h_hat: float
    h_grid: np.ndarray
    objective: np.ndarray  # NaN at infeasible bandwidths
    local_minima: list
    strategy_used: str
    alpha_used: float
    fallback: bool
    infeasible: np.ndarray
    excluded_counts: np.ndarray

    def objective_map(self) -> dict:
        return dict(zip(self.h_grid.tolist(), self.objective.tolist()))


def _weights_on_observations(weight: WeightFunction, n: int) -> np.ndarray:
    return weight(np.arange(1, n + 1) / n)


def _leaveout_residual_terms(x, g, h, config):
    """Per-observation squared residual pieces shared by the objective variants.

    Returns (z, est, usable, w, n_excluded) where usable marks weighted
    observations with a feasible leave-out estimate.
    """
    x = np.asarray(getattr(x, "values", x), dtype=float)
    n = len(x)
    z = evaluate_series(x, g)
    est, feasible = leaveout_curve_at_observations(x, z, config.truncated_kernel(), h)
    w = _weights_on_observations(config.weight, n)
    weighted = w > 0
    usable = weighted & feasible
    n_excluded = int(np.sum(weighted & ~feasible))
    if n_excluded > config.max_infeasible_frac * weighted.sum():
        raise InfeasibleBandwidthError(
            f"h={h}: {n_excluded} of {int(weighted.sum())} weighted points have empty leave-out windows"
        )
    return z, est, usable, w, n_excluded


def cv_objective(path, g: MomentFunctional, h: float, config: CvConfig) -> float:
    """H(Ghat_h^-) = (1/n) sum_t |g(Y_t) - Ghat_h^-(t/n)|_2^2 w(t/n)."""
    z, est, usable, w, _ = _leaveout_residual_terms(path, g, h, config)
    resid = z[usable] - est[usable]
    return float(np.sum(np.sum(resid**2, axis=1) * w[usable]) / len(w))


def cv_objective_composition(
    path,
    g: MomentFunctional,
    F: Composition,
    G_plugin: EstimateCurve,
    h: float,
    config: CvConfig,
) -> float:
    """Jacobian-weighted objective (1/n) sum_t |dF(G(t/n)) (g(Y_t) - Ghat_h^-(t/n))|_2^2 w(t/n).

    ``G_plugin`` supplies the plug-in values G(t/n) entering the Jacobian; it
    must be evaluated on the observation grid t/n.  Non-finite Jacobian rows
    are excluded and counted against the infeasibility budget.
    """
    z, est, usable, w, n_excluded = _leaveout_residual_terms(path, g, h, config)
    n = len(w)
    if len(G_plugin.u_grid) != n or not np.allclose(G_plugin.u_grid, np.arange(1, n + 1) / n, atol=1e-9):
        raise ValueError("G_plugin must be evaluated on the observation grid t/n")
    jac = F.jacobian(G_plugin.values)
    jac_ok = np.isfinite(jac).all(axis=(1, 2)) & G_plugin.feasible
    bad = usable & ~jac_ok
    if bad.any() or n_excluded:
        weighted = w > 0
        if bad.sum() + n_excluded > config.max_infeasible_frac * weighted.sum():
            raise InfeasibleBandwidthError(
                f"h={h}: non-finite Jacobian or empty window at {bad.sum() + n_excluded} weighted points"
            )
        usable = usable & jac_ok
    resid = z[usable] - est[usable]
    weighted_resid = np.einsum("tij,tj->ti", jac[usable], resid)
    return float(np.sum(np.sum(weighted_resid**2, axis=1) * w[usable]) / n)


def _trapezoid_weights(theta_grid: np.ndarray) -> np.ndarray:
    theta_grid = np.asarray(theta_grid, dtype=float)
    if len(theta_grid) == 1:
        # Degenerate one-point parameter set: treated as unit weight.
        return np.ones(1)
    w = np.zeros(len(theta_grid))
    dt = np.diff(theta_grid)
    w[:-1] += dt / 2.0
    w[1:] += dt / 2.0
    return w


def cv_objective_functional(path, g_family, theta_grid, h: float, config: CvConfig) -> float:
    """Integral over theta (trapezoid rule) of the plain objective for g_theta."""
    x = np.asarray(getattr(path, "values", path), dtype=float)
    n = len(x)
    theta_grid = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    funcs = [g_family(t) for t in theta_grid]
    z = np.concatenate([evaluate_series(x, f) for f in funcs], axis=1)
    kappa = conv_weights(config.truncated_kernel(), h, n)
    num = correlate1d(z, kappa, axis=0, mode="constant", cval=0.0) / n
    mass = correlate1d(np.ones(n), kappa, mode="constant", cval=0.0) / n
    feasible = mass > 0
    w = _weights_on_observations(config.weight, n)
    weighted = w > 0
    usable = weighted & feasible
    n_excluded = int(np.sum(weighted & ~feasible))
    if n_excluded > config.max_infeasible_frac * weighted.sum():
        raise InfeasibleBandwidthError(f"h={h}: {n_excluded} weighted points have empty windows")
    est = num[usable] / mass[usable, None]
    resid2 = (z[usable] - est) ** 2
    # Split columns back into theta blocks and integrate.
    dims = [f.output_dim for f in funcs]
    splits = np.cumsum(dims)[:-1]
    per_theta = np.array(
        [np.sum(np.sum(block, axis=1) * w[usable]) / n for block in np.split(resid2, splits, axis=1)]
    )
    return float(per_theta @ _trapezoid_weights(theta_grid))


def find_local_minima(h_grid: np.ndarray, values: np.ndarray) -> list[float]:
    """Interior strict local minima of a gridded objective.

    Infeasible (NaN) entries are dropped before the scan.  Plateaus count as
    one minimum, resolved to the largest bandwidth of the plateau; a plateau
    touching the boundary of the (feasible) grid is not interior.
    """
    keep = np.isfinite(values)
    h = np.asarray(h_grid, dtype=float)[keep]
    v = np.asarray(values, dtype=float)[keep]
    minima = []
    i, m = 0, len(v)
    while i < m:
        j = i
        while j + 1 < m and v[j + 1] == v[i]:
            j += 1
        if i > 0 and j < m - 1 and v[i - 1] > v[i] < v[j + 1]:
            minima.append(float(h[j]))
        i = j + 1
    return minima


def _objective_sweep(objective_fn, config: CvConfig):
    values = np.full(len(config.grid), np.nan)
    excluded = np.zeros(len(config.grid), dtype=int)
    infeasible = np.zeros(len(config.grid), dtype=bool)
    for i, h in enumerate(config.grid):
        try:
            values[i] = objective_fn(float(h))
        except InfeasibleBandwidthError:
            infeasible[i] = True
    return values, infeasible, excluded


def _select_from_sweep(values, infeasible, config: CvConfig, alpha_used: float) -> CvResult:
    if not np.isfinite(values).any():
        raise InfeasibleBandwidthError("every bandwidth on the grid is infeasible")
    minima = find_local_minima(config.grid, values)
    strategy = config.minimum_strategy
    fallback = False
    if strategy == "global_min" or not minima:
        fallback = not minima and strategy != "global_min"
        finite = np.where(np.isfinite(values), values, np.inf)
        # Ties broken toward larger h.
        best = len(finite) - 1 - int(np.argmin(finite[::-1]))
        h_hat = float(config.grid[best])
        strategy_used = "global_min"
    elif strategy == "largest_local_min":
        h_hat = max(minima)
        strategy_used = strategy
    else:
        h_hat = min(minima)
        strategy_used = strategy
    return CvResult(
        h_hat=h_hat,
        h_grid=config.grid.copy(),
        objective=values,
        local_minima=minima,
        strategy_used=strategy_used,
        alpha_used=alpha_used,
        fallback=fallback,
        infeasible=infeasible,
        excluded_counts=np.zeros(len(config.grid), dtype=int),
    )


def select_cv(path, g: MomentFunctional, config: CvConfig) -> CvResult:
    """Minimize the cross-validation objective over the bandwidth grid.

    Local minima are searched first; when none exists the global minimum is
    used and the result carries a fallback flag.
    """
    values, infeasible, _ = _objective_sweep(lambda h: cv_objective(path, g, h, config), config)
    return _select_from_sweep(values, infeasible, config, config.alpha_cutoff)


def pilot_plugin_curve(path, g: MomentFunctional, config: CvConfig):
    """Plug-in estimates of G(t/n) for compositions.

    Runs a plain cross-validation pass per component of g and evaluates the
    self-normalized estimator at the selected pilot bandwidth on the
    observation grid.  Returns (curve, pilot bandwidths).
    """
    from .moments import estimate_curve

    x = np.asarray(getattr(path, "values", path), dtype=float)
    n = len(x)
    parts = g.components if g.components is not None else (g,)
    t_grid = np.arange(1, n + 1) / n
    cols, pilots = [], []
    for part in parts:
        res = select_cv(path, part, config)
        pilots.append(res.h_hat)
        curve = estimate_curve(x, part, t_grid, res.h_hat, variant="normalized", kernel=config.kernel)
        cols.append(curve.values)
    values = np.concatenate(cols, axis=1)
    feasible = np.isfinite(values).all(axis=1)
    plugin = EstimateCurve(u_grid=t_grid, values=values, h=float(np.mean(pilots)), variant="normalized", feasible=feasible)
    return plugin, pilots


def select_cv_composition(
    path,
    g: MomentFunctional,
    F: Composition,
    config: CvConfig,
    G_plugin: EstimateCurve | None = None,
) -> CvResult:
    """Cross validation for a composition F(G(u)); pilots the plug-in curve if absent."""
    if G_plugin is None:
        G_plugin, _ = pilot_plugin_curve(path, g, config)
    values, infeasible, _ = _objective_sweep(
        lambda h: cv_objective_composition(path, g, F, G_plugin, h, config), config
    )
    return _select_from_sweep(values, infeasible, config, config.alpha_cutoff)


def select_cv_functional(path, g_family, theta_grid, config: CvConfig) -> CvResult:
    """Cross validation for a theta-family, integrating the objective over theta."""
    values, infeasible, _ = _objective_sweep(
        lambda h: cv_objective_functional(path, g_family, theta_grid, h, config), config
    )
    return _select_from_sweep(values, infeasible, config, config.alpha_cutoff)


def alpha_sweep(path, g: MomentFunctional, alpha_cutoffs, config: CvConfig) -> dict:
    """Objective curves for a range of truncation levels.

    Returns {cutoff: CvResult}.  Cutoffs for which no local minimum exists
    are visible through the per-result fallback flag, supporting the
    recommended stability heuristic of scanning the truncation level.
    """
    out = {}
    for cutoff in np.atleast_1d(np.asarray(alpha_cutoffs, dtype=float)):
        if not 0.0 < cutoff < 1.0:
            raise ValueError(f"cutoffs must lie in (0, 1), got {cutoff}")
        cfg = replace(config, alpha_cutoff=float(cutoff))
        try:
            out[float(cutoff)] = select_cv(path, g, cfg)
        except InfeasibleBandwidthError:
            out[float(cutoff)] = CvResult(
                h_hat=float("nan"),
                h_grid=cfg.grid.copy(),
                objective=np.full(len(cfg.grid), np.nan),
                local_minima=[],
                strategy_used="none",
                alpha_used=float(cutoff),
                fallback=True,
                infeasible=np.ones(len(cfg.grid), dtype=bool),
                excluded_counts=np.zeros(len(cfg.grid), dtype=int),
            )
    return out
