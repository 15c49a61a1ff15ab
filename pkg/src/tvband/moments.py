"""Moment functionals and the kernel moment estimators evaluated at (u, h).

Three estimator variants are provided: the raw localized average, the
self-normalized version that corrects the kernel Riemann sum, and the
self-normalized leave-out version whose truncated kernel removes a dead zone
around the evaluation point (used by cross validation).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.ndimage import correlate1d

from .errors import ZeroMassError
from .kernels import Kernel, TruncatedKernel, epanechnikov

__all__ = [
    "MomentFunctional",
    "Composition",
    "EstimateCurve",
    "mean_functional",
    "covariance_lag",
    "lagged_square",
    "char_cos",
    "indicator_le",
    "custom_functional",
    "stack",
    "ratio_composition",
    "identity_composition",
    "lagged_eval",
    "evaluate_series",
    "estimate_raw",
    "estimate_normalized",
    "estimate_leaveout",
    "estimate_curve",
    "CurveFamily",
]

_MASS_EPS = 1e-300


# ---------------------------------------------------------------------------
# moment functionals


@dataclass(frozen=True)
class MomentFunctional:
    """A map g from the lagged observation vector to R^d.

    ``fn`` receives a lag matrix of shape (m, lag_depth + 1) whose column j
    holds X_{t-j} (zero-padded before the start of the sample) and returns an
    (m, output_dim) array.  ``kind``/``param`` identify the built-in families
    for closed-form ground truths; stacks keep their parts in ``components``.
    """

    name: str
    kind: str
    lag_depth: int
    output_dim: int
    fn: Callable[[np.ndarray], np.ndarray]
    param: float | int | None = None
    components: tuple["MomentFunctional", ...] | None = None


def mean_functional() -> MomentFunctional:
    """g(x) = x, targeting the time-varying mean."""
    return MomentFunctional("mean", "mean", 0, 1, lambda L: L[:, :1].copy())


def covariance_lag(k: int) -> MomentFunctional:
    """g(x_0, ..., x_k) = x_0 x_k, targeting c(u, k)."""
    if k < 0:
        raise ValueError(f"lag must be >= 0, got {k}")
    return MomentFunctional(
        f"cov_lag{k}", "covariance_lag", k, 1, lambda L: (L[:, :1] * L[:, k : k + 1]), param=k
    )


def lagged_square(k: int) -> MomentFunctional:
    """g(x_0, ..., x_k) = x_k^2, targeting c(u, 0) through the k-lagged observation."""
    if k < 0:
        raise ValueError(f"lag must be >= 0, got {k}")
    return MomentFunctional(
        f"sq_lag{k}", "lagged_square", k, 1, lambda L: L[:, k : k + 1] ** 2, param=k
    )


def char_cos(theta: float) -> MomentFunctional:
    """g(x) = cos(theta x), the real part of the characteristic function."""
    return MomentFunctional(
        f"char_cos({theta:g})", "char_cos", 0, 1, lambda L: np.cos(theta * L[:, :1]), param=theta
    )


def indicator_le(y: float) -> MomentFunctional:
    """g(x) = 1{x <= y}, targeting the time-varying distribution function."""
    return MomentFunctional(
        f"indicator_le({y:g})", "indicator_le", 0, 1,
        lambda L: (L[:, :1] <= y).astype(float), param=y,
    )


def custom_functional(name: str, lag_depth: int, fn: Callable, output_dim: int = 1) -> MomentFunctional:
    """Wrap an arbitrary map of the lag matrix into a MomentFunctional."""
    return MomentFunctional(name, "custom", lag_depth, output_dim, fn)


def stack(*parts: MomentFunctional) -> MomentFunctional:
    """Concatenate scalar or vector functionals into one vector-valued functional."""
    if not parts:
        raise ValueError("stack requires at least one functional")
    depth = max(p.lag_depth for p in parts)

    def fn(L):
        return np.concatenate([p.fn(L[:, : p.lag_depth + 1]) for p in parts], axis=1)

    return MomentFunctional(
        "+".join(p.name for p in parts),
        "stack",
        depth,
        sum(p.output_dim for p in parts),
        fn,
        components=tuple(parts),
    )


def _lag_matrix(values: np.ndarray, lag_depth: int) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    n = len(values)
    L = np.zeros((n, lag_depth + 1))
    L[:, 0] = values
    for j in range(1, lag_depth + 1):
        L[j:, j] = values[:-j]
    return L


def evaluate_series(values, g: MomentFunctional) -> np.ndarray:
    """g(Y_t) for t = 1..n as an (n, d) array, zero-padding lags before t = 1."""
    values = getattr(values, "values", values)
    out = g.fn(_lag_matrix(values, g.lag_depth))
    return np.asarray(out, dtype=float).reshape(len(out), g.output_dim)


def lagged_eval(path, g: MomentFunctional, t: int) -> np.ndarray:
    """Evaluate g on (X_t, X_{t-1}, ...) for a single time index t in 1..n."""
    values = getattr(path, "values", path)
    n = len(values)
    if not 1 <= t <= n:
        raise ValueError(f"t must be in 1..{n}, got {t}")
    row = np.zeros(g.lag_depth + 1)
    for j in range(g.lag_depth + 1):
        if t - j >= 1:
            row[j] = values[t - j - 1]
    return np.asarray(g.fn(row[None, :]), dtype=float).reshape(g.output_dim)


# ---------------------------------------------------------------------------
# compositions


@dataclass(frozen=True)
class Composition:
    """A post-composition F with its Jacobian, both vectorized over rows."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]        # (m, d) -> (m, d_out)
    jacobian: Callable[[np.ndarray], np.ndarray]  # (m, d) -> (m, d_out, d)
    d_in: int
    d_out: int


def ratio_composition() -> Composition:
    """F(x, y) = y / x with Jacobian [-y/x^2, 1/x]; used for correlations."""

    def fn(v):
        return (v[:, 1] / v[:, 0])[:, None]

    def jac(v):
        x, y = v[:, 0], v[:, 1]
        out = np.empty((len(v), 1, 2))
        # Non-finite rows near x = 0 are flagged by the consumers.
        with np.errstate(divide="ignore", invalid="ignore"):
            out[:, 0, 0] = -y / x**2
            out[:, 0, 1] = 1.0 / x
        return out

    return Composition("ratio", fn, jac, d_in=2, d_out=1)


def identity_composition(d: int) -> Composition:
    """The identity map on R^d."""
    eye = np.eye(d)

    def jac(v):
        return np.broadcast_to(eye, (len(v), d, d)).copy()

    return Composition("identity", lambda v: np.asarray(v, float).copy(), jac, d_in=d, d_out=d)


def check_jacobian(F: Composition, points: np.ndarray, rtol: float = 1e-6, step: float = 1e-6) -> None:
    """Verify the Jacobian against central finite differences of F."""
    points = np.atleast_2d(np.asarray(points, float))
    J = F.jacobian(points)
    for j in range(F.d_in):
        shift = np.zeros_like(points)
        shift[:, j] = step
        fd = (F.fn(points + shift) - F.fn(points - shift)) / (2 * step)
        scale = np.maximum(np.abs(J[:, :, j]), 1.0)
        if not np.allclose(fd, J[:, :, j], atol=rtol, rtol=rtol):
            gap = np.max(np.abs(fd - J[:, :, j]) / scale)
            raise ValueError(f"Jacobian of {F.name} disagrees with finite differences ({gap:.2e})")


# ---------------------------------------------------------------------------
# estimate curves


@dataclass
class EstimateCurve:
    """Estimates of G on a u-grid at one bandwidth; NaN rows mark zero-mass points."""

    u_grid: np.ndarray
    values: np.ndarray
    h: float
    variant: str
    feasible: np.ndarray

    def __post_init__(self):
        self.u_grid = np.asarray(self.u_grid, dtype=float)
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.values.shape[0] != len(self.u_grid):
            raise ValueError("values and u_grid lengths differ")
        if len(self.u_grid) > 1 and not np.all(np.diff(self.u_grid) > 0):
            raise ValueError("u_grid must be strictly increasing")
        if np.any(self.u_grid < 0) or np.any(self.u_grid > 1):
            raise ValueError("u_grid must lie within [0, 1]")

    def to_csv(self, target) -> None:
        d = self.values.shape[1]
        header = "u," + ",".join(f"value_{i+1}" for i in range(d)) + ",h,variant"
        rows = [header]
        for u, row in zip(self.u_grid, self.values):
            vals = ",".join(f"{v:.17g}" for v in row)
            rows.append(f"{u:.17g},{vals},{self.h:.17g},{self.variant}")
        text = "\n".join(rows) + "\n"
        if hasattr(target, "write"):
            target.write(text)
        else:
            with open(target, "w") as fh:
                fh.write(text)


# ---------------------------------------------------------------------------
# kernel weights and the pointwise estimators


def _path_values(path) -> np.ndarray:
    return np.asarray(getattr(path, "values", path), dtype=float)


def _check_h(h: float) -> None:
    if not 0.0 < h <= 1.0:
        raise ValueError(f"bandwidth must lie in (0, 1], got {h}")


def kernel_weights(kernel_fn, h: float, u: float, n: int) -> np.ndarray:
    """K_h(t/n - u) for t = 1..n, where kernel_fn is a Kernel or TruncatedKernel."""
    t = np.arange(1, n + 1) / n
    return kernel_fn((t - u) / h) / h


def weight_matrix(kernel_fn, h: float, u_grid: np.ndarray, n: int) -> np.ndarray:
    """Stacked kernel weights, one row per grid point."""
    t = np.arange(1, n + 1) / n
    return kernel_fn((t[None, :] - np.asarray(u_grid, float)[:, None]) / h) / h


def conv_weights(kernel_fn, h: float, n: int) -> np.ndarray:
    """Kernel weights on the integer offset grid j/n, j = -J..J, for convolution."""
    half = int(np.floor(n * h / 2.0))
    j = np.arange(-half, half + 1)
    return kernel_fn(j / (n * h)) / h


def estimate_raw(path, g: MomentFunctional, u: float, h: float, kernel: Kernel = epanechnikov) -> np.ndarray:
    """Raw localized moment estimate (1/n) sum_t K_h(t/n - u) g(Y_t)."""
    _check_h(h)
    x = _path_values(path)
    z = evaluate_series(x, g)
    w = kernel_weights(kernel, h, u, len(x))
    return (w @ z) / len(x)


def estimate_normalized(path, g: MomentFunctional, u: float, h: float, kernel: Kernel = epanechnikov) -> np.ndarray:
    """Self-normalized estimate: raw estimate divided by the kernel Riemann sum."""
    _check_h(h)
    x = _path_values(path)
    z = evaluate_series(x, g)
    w = kernel_weights(kernel, h, u, len(x))
    mass = w.sum()
    if mass <= _MASS_EPS:
        raise ZeroMassError(f"no observations in the kernel window at u={u}, h={h}")
    return (w @ z) / mass


def estimate_leaveout(path, g: MomentFunctional, u: float, h: float, tk: TruncatedKernel) -> np.ndarray:
    """Self-normalized estimate with the truncated kernel's dead zone around u.

    Observations with |t/n - u| < (1 - epsilon) * cutoff * h receive zero
    weight, decorrelating the estimate from the held-out observation.
    """
    _check_h(h)
    x = _path_values(path)
    z = evaluate_series(x, g)
    w = kernel_weights(tk, h, u, len(x))
    mass = w.sum()
    if mass <= _MASS_EPS:
        raise ZeroMassError(f"dead zone swallows the window at u={u}, h={h}")
    return (w @ z) / mass


def estimate_curve(
    path,
    g: MomentFunctional,
    u_grid,
    h: float,
    variant: str = "normalized",
    kernel: Kernel = epanechnikov,
    truncated: TruncatedKernel | None = None,
) -> EstimateCurve:
    """Apply the chosen estimator at every grid point; zero-mass points become NaN."""
    _check_h(h)
    if variant not in ("raw", "normalized", "leaveout"):
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "leaveout":
        if truncated is None:
            raise ValueError("leaveout variant needs a TruncatedKernel")
        kfn = truncated
    else:
        kfn = kernel
    x = _path_values(path)
    n = len(x)
    z = evaluate_series(x, g)
    u_grid = np.atleast_1d(np.asarray(u_grid, dtype=float))
    W = weight_matrix(kfn, h, u_grid, n)
    num = (W @ z) / n
    if variant == "raw":
        feasible = np.ones(len(u_grid), dtype=bool)
        values = num
    else:
        mass = W.sum(axis=1) / n
        feasible = mass > _MASS_EPS
        values = np.full_like(num, np.nan)
        values[feasible] = num[feasible] / mass[feasible, None]
    return EstimateCurve(u_grid=u_grid, values=values, h=h, variant=variant, feasible=feasible)


def leaveout_curve_at_observations(values: np.ndarray, z: np.ndarray, tk: TruncatedKernel, h: float):
    """Leave-out estimates at every u = t/n via discrete correlation.

    Returns (estimates (n, d), feasible (n,)).  Much faster than the matrix
    route when estimates are needed at all observation times, as in the cross
    validation objective.
    """
    n = len(values)
    kappa = conv_weights(tk, h, n)
    num = correlate1d(z, kappa, axis=0, mode="constant", cval=0.0) / n
    mass = correlate1d(np.ones(n), kappa, mode="constant", cval=0.0) / n
    feasible = mass > _MASS_EPS
    est = np.full_like(num, np.nan)
    est[feasible] = num[feasible] / mass[feasible, None]
    return est, feasible


class CurveFamily:
    """Precomputed kernel weight matrices for a fixed (n, u-grid, h-grid).

    Replication loops evaluate many paths against identical designs; the
    kernel matrices only depend on (kernel, n, u_grid, h) and are reused.
    """

    def __init__(self, kernel: Kernel, n: int, u_grid: np.ndarray, h_grid: np.ndarray):
        self.kernel = kernel
        self.n = n
        self.u_grid = np.asarray(u_grid, dtype=float)
        self.h_grid = np.asarray(h_grid, dtype=float)
        self.weights = [weight_matrix(kernel, h, self.u_grid, n) for h in self.h_grid]
        self.masses = np.stack([W.sum(axis=1) / n for W in self.weights])

    def raw(self, z: np.ndarray) -> np.ndarray:
        """Raw estimates for all (h, u): array of shape (n_h, n_u, d)."""
        return np.stack([(W @ z) / self.n for W in self.weights])

    def normalized(self, z: np.ndarray) -> np.ndarray:
        """Self-normalized estimates for all (h, u); NaN where the mass vanishes."""
        raw = self.raw(z)
        mass = self.masses[:, :, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(mass > _MASS_EPS, raw / mass, np.nan)
        return out
