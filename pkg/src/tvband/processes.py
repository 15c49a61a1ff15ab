"""Simulation of time-varying AR(1) paths and the ground truths used by oracles.

The observed process follows X_{t} = a(t/n) X_{t-1} + e_t with standard
normal innovations; near rescaled time u it is approximated by the
stationary AR(1) with frozen coefficient a(u).  For this model the target
curves (covariances, correlations, the real part of the characteristic
function), their second derivatives in u and the long-run variances of the
plugged-in moment series all have closed forms, which this module exposes
next to a Monte Carlo estimator of the same quantities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numba import njit
from scipy.stats import norm

from .errors import StationarityError

__all__ = [
    "CoefficientCurve",
    "TimeSeriesPath",
    "StationaryPath",
    "GroundTruth",
    "sin_full",
    "sin_scaled",
    "step",
    "custom_curve",
    "innovation_rng",
    "simulate_tvar",
    "simulate_stationary",
    "true_covariance",
    "true_correlation",
    "true_char_function",
    "covariance_curvature",
    "closed_form_ground_truth",
    "mc_ground_truth",
]

# Oracle evaluations skip this neighbourhood of points where |a(u)| = 1 and
# the stationary approximation does not exist.
UNIT_ROOT_EXCLUSION = 0.02

_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# coefficient curves


@dataclass(frozen=True)
class CoefficientCurve:
    """A coefficient curve u -> a(u) on [0, 1] with its first two derivatives."""

    name: str
    a: Callable[[np.ndarray], np.ndarray]
    da: Callable[[np.ndarray], np.ndarray]
    d2a: Callable[[np.ndarray], np.ndarray]
    unit_root_points: tuple[float, ...] = ()


def sin_full() -> CoefficientCurve:
    """a(u) = sin(2 pi u); hits |a| = 1 at u = 0.25 and u = 0.75."""
    two_pi = 2.0 * np.pi
    return CoefficientCurve(
        name="sin_full",
        a=lambda u: np.sin(two_pi * np.asarray(u, float)),
        da=lambda u: two_pi * np.cos(two_pi * np.asarray(u, float)),
        d2a=lambda u: -(two_pi**2) * np.sin(two_pi * np.asarray(u, float)),
        unit_root_points=(0.25, 0.75),
    )


def sin_scaled(scale: float = 0.6) -> CoefficientCurve:
    """a(u) = scale * sin(2 pi u), bounded away from the unit root for scale < 1."""
    two_pi = 2.0 * np.pi
    return CoefficientCurve(
        name=f"sin_scaled" if scale == 0.6 else f"sin_scaled_{scale:g}",
        a=lambda u: scale * np.sin(two_pi * np.asarray(u, float)),
        da=lambda u: scale * two_pi * np.cos(two_pi * np.asarray(u, float)),
        d2a=lambda u: -scale * two_pi**2 * np.sin(two_pi * np.asarray(u, float)),
        unit_root_points=(0.25, 0.75) if abs(scale) >= 1.0 else (),
    )


def step(level: float = 0.5) -> CoefficientCurve:
    """a(u) = level for u < 0.5 and -level for u >= 0.5 (jump at u = 0.5)."""
    zeros = lambda u: np.zeros_like(np.asarray(u, float))
    return CoefficientCurve(
        name="step",
        a=lambda u: level * (1.0 - 2.0 * (np.asarray(u, float) >= 0.5)),
        da=zeros,
        d2a=zeros,
    )


def custom_curve(
    name: str,
    fn: Callable,
    dfn: Callable | None = None,
    d2fn: Callable | None = None,
    unit_root_points: tuple[float, ...] = (),
    fd_step: float = 1e-5,
) -> CoefficientCurve:
    """Wrap an arbitrary coefficient function; missing derivatives use central differences."""

    def _fd1(u):
        u = np.asarray(u, float)
        return (fn(u + fd_step) - fn(u - fd_step)) / (2.0 * fd_step)

    def _fd2(u):
        u = np.asarray(u, float)
        return (fn(u + fd_step) - 2.0 * fn(u) + fn(u - fd_step)) / fd_step**2

    return CoefficientCurve(
        name=name,
        a=lambda u: np.asarray(fn(np.asarray(u, float)), float),
        da=dfn or _fd1,
        d2a=d2fn or _fd2,
        unit_root_points=unit_root_points,
    )


_CURVE_FACTORIES = {
    "sin_full": sin_full,
    "sin_scaled": sin_scaled,
    "step": step,
}


def get_curve(name: str, **params) -> CoefficientCurve:
    """Build a named coefficient curve ('sin_full', 'sin_scaled', 'step')."""
    try:
        factory = _CURVE_FACTORIES[name]
    except KeyError:
        raise KeyError(f"unknown curve {name!r}; known: {sorted(_CURVE_FACTORIES)}") from None
    return factory(**params)


# ---------------------------------------------------------------------------
# simulation


@dataclass(frozen=True)
class TimeSeriesPath:
    """One realization X_1, ..., X_n of the time-varying AR model."""

    values: np.ndarray
    n: int
    seed: int
    rep: int
    curve: CoefficientCurve
    burn_in: int


@dataclass(frozen=True)
class StationaryPath:
    """A path of the stationary approximation at frozen rescaled time u."""

    values: np.ndarray
    u: float
    seed: int
    rep: int
    curve: CoefficientCurve
    burn_in: int


def innovation_rng(seed: int, rep: int = 0) -> np.random.Generator:
    """Counter-based innovation stream; distinct reps give independent substreams.

    The replication index is folded into the upper words of the Philox key so
    that changing the number of replications never perturbs earlier streams.
    """
    key = (int(seed) & _MASK64) | (int(rep) << 64)
    return np.random.Generator(np.random.Philox(key=key))


@njit(cache=True)
def _ar_recursion(coef: np.ndarray, z: np.ndarray, x0: float) -> np.ndarray:
    out = np.empty(z.shape[0])
    prev = x0
    for i in range(z.shape[0]):
        prev = coef[i] * prev + z[i]
        out[i] = prev
    return out


def simulate_tvar(
    curve: CoefficientCurve,
    n: int,
    seed: int,
    burn_in: int = 1000,
    rep: int = 0,
) -> TimeSeriesPath:
    """Simulate X_t = a(t/n) X_{t-1} + e_t for t = 1..n.

    The recursion is started at zero and run through ``burn_in`` steps with
    the frozen coefficient a(0) before the observed stretch begins.  The
    recursion is well defined even where |a(u)| = 1.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = innovation_rng(seed, rep)
    z = rng.standard_normal(burn_in + n)
    a0 = float(curve.a(0.0))
    coef = np.empty(burn_in + n)
    coef[:burn_in] = a0
    coef[burn_in:] = curve.a(np.arange(1, n + 1) / n)
    x = _ar_recursion(coef, z, 0.0)
    return TimeSeriesPath(values=x[burn_in:], n=n, seed=seed, rep=rep, curve=curve, burn_in=burn_in)


def simulate_stationary(
    curve: CoefficientCurve,
    u: float,
    n: int,
    seed: int,
    burn_in: int = 1000,
    rep: int = 0,
) -> StationaryPath:
    """Simulate the stationary AR(1) approximation with constant coefficient a(u).

    Raises StationarityError when |a(u)| >= 1, e.g. for the full sine curve
    at u = 0.25 or u = 0.75.  Driven by the same innovation stream as
    :func:`simulate_tvar` for equal (seed, rep), enabling common-random-number
    couplings.
    """
    a = float(curve.a(u))
    if abs(a) >= 1.0:
        raise StationarityError(f"|a({u})| = {abs(a)} >= 1: no stationary approximation")
    rng = innovation_rng(seed, rep)
    z = rng.standard_normal(burn_in + n)
    coef = np.full(burn_in + n, a)
    x = _ar_recursion(coef, z, 0.0)
    return StationaryPath(values=x[burn_in:], u=u, seed=seed, rep=rep, curve=curve, burn_in=burn_in)


# ---------------------------------------------------------------------------
# closed-form targets for the Gaussian AR(1) approximation


def _admissible_a(curve: CoefficientCurve, u) -> np.ndarray:
    a = np.asarray(curve.a(u), dtype=float)
    if np.any(np.abs(a) >= 1.0):
        raise StationarityError(f"|a(u)| >= 1 at some of u = {u}")
    return a


def true_covariance(curve: CoefficientCurve, u, k: int):
    """c(u, k) = a(u)^k / (1 - a(u)^2) for lag k >= 0."""
    if k < 0:
        raise ValueError(f"lag must be >= 0, got {k}")
    a = _admissible_a(curve, u)
    out = a**k / (1.0 - a**2)
    return float(out) if out.ndim == 0 else out


def true_correlation(curve: CoefficientCurve, u):
    """gamma(u) = c(u,1) / c(u,0), which equals a(u) for the AR(1) model."""
    a = _admissible_a(curve, u)
    return float(a) if a.ndim == 0 else a


def true_char_function(curve: CoefficientCurve, u, theta: float):
    """Real part of the characteristic function: exp(-theta^2 c(u,0) / 2)."""
    c0 = true_covariance(curve, u, 0)
    out = np.exp(-(theta**2) * np.asarray(c0) / 2.0)
    return float(out) if out.ndim == 0 else out


def true_cdf(curve: CoefficientCurve, u, y: float):
    """P(X(u) <= y) for the Gaussian stationary approximation."""
    c0 = np.asarray(true_covariance(curve, u, 0))
    out = norm.cdf(y / np.sqrt(c0))
    return float(out) if out.ndim == 0 else out


def _cov_derivs_in_a(a: np.ndarray, k: int):
    """First and second derivative of f(a) = a^k / (1 - a^2) with respect to a."""
    d = 1.0 / (1.0 - a**2)
    f1 = 2.0 * a ** (k + 1) * d**2
    if k >= 1:
        f1 = f1 + k * a ** (k - 1) * d
    f2 = (4 * k + 2) * a**k * d**2 + 8.0 * a ** (k + 2) * d**3
    if k >= 2:
        f2 = f2 + k * (k - 1) * a ** (k - 2) * d
    return f1, f2


def covariance_curvature(curve: CoefficientCurve, u, k: int):
    """Second derivative in u of c(u, k), by the chain rule through a(u)."""
    if k < 0:
        raise ValueError(f"lag must be >= 0, got {k}")
    a = _admissible_a(curve, u)
    f1, f2 = _cov_derivs_in_a(a, k)
    da = np.asarray(curve.da(u), float)
    d2a = np.asarray(curve.d2a(u), float)
    out = f2 * da**2 + f1 * d2a
    return float(out) if out.ndim == 0 else out


def char_curvature(curve: CoefficientCurve, u, theta: float):
    """Second derivative in u of exp(-theta^2 c(u,0) / 2)."""
    a = _admissible_a(curve, u)
    da = np.asarray(curve.da(u), float)
    d2a = np.asarray(curve.d2a(u), float)
    d = 1.0 / (1.0 - a**2)
    c0 = d
    c0_u = 2.0 * a * d**2 * da
    c0_uu = (2.0 * d**2 + 8.0 * a**2 * d**3) * da**2 + 2.0 * a * d**2 * d2a
    g = np.exp(-(theta**2) * c0 / 2.0)
    out = g * ((theta**2 * c0_u / 2.0) ** 2 - theta**2 * c0_uu / 2.0)
    return float(out) if out.ndim == 0 else out


def indicator_curvature(curve: CoefficientCurve, u, y: float):
    """Second derivative in u of P(X(u) <= y)."""
    a = _admissible_a(curve, u)
    da = np.asarray(curve.da(u), float)
    d2a = np.asarray(curve.d2a(u), float)
    d = 1.0 / (1.0 - a**2)
    s = d
    s_u = 2.0 * a * d**2 * da
    s_uu = (2.0 * d**2 + 8.0 * a**2 * d**3) * da**2 + 2.0 * a * d**2 * d2a
    x = y / np.sqrt(s)
    pdf = norm.pdf(x)
    psi1 = pdf * y * (-0.5) * s ** (-1.5)
    psi2 = (-x * pdf) * (y * (-0.5) * s ** (-1.5)) ** 2 + pdf * y * 0.75 * s ** (-2.5)
    out = psi2 * s_u**2 + psi1 * s_uu
    return float(out) if out.ndim == 0 else out


def lrv_covariance(a, k: int):
    """Long-run variance of the product series X_t X_{t+k} of a Gaussian AR(1).

    By Isserlis' theorem Cov(X_0 X_k, X_j X_{j+k}) = c_j^2 + c_{j+k} c_{j-k},
    and the two lag sums have geometric closed forms.
    """
    a = np.asarray(a, dtype=float)
    c0 = 1.0 / (1.0 - a**2)
    sum_sq = c0**2 * (1.0 + a**2) / (1.0 - a**2)
    if k == 0:
        out = 2.0 * sum_sq
    else:
        cross = c0**2 * ((2 * k - 1) * a ** (2 * k) + 2.0 * a ** (2 * k) / (1.0 - a**2))
        out = sum_sq + cross
    return float(out) if out.ndim == 0 else out


def lrv_char(a, theta: float, n_terms: int = 400):
    """Long-run variance of cos(theta X_t) for a Gaussian AR(1) (series sum).

    Each lag contributes exp(-theta^2 c0) (cosh(theta^2 c_j) - 1), evaluated
    in the overflow-safe form (exp(theta^2 (c_j - c0)) + exp(-theta^2 (c_j + c0))) / 2
    - exp(-theta^2 c0), all exponents being nonpositive since |c_j| <= c0.
    """
    a = np.asarray(a, dtype=float)
    c0 = 1.0 / (1.0 - a**2)
    t2 = theta**2
    j = np.arange(0, n_terms + 1)
    cj = c0[..., None] * a[..., None] ** j
    terms = 0.5 * (np.exp(t2 * (cj - c0[..., None])) + np.exp(-t2 * (cj + c0[..., None]))) - np.exp(
        -t2 * c0[..., None]
    )
    out = terms[..., 0] + 2.0 * terms[..., 1:].sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def lrv_mean(a):
    """Long-run variance of X_t itself for a Gaussian AR(1): 1 / (1 - a)^2."""
    a = np.asarray(a, dtype=float)
    out = 1.0 / (1.0 - a) ** 2
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# ground truth container


@dataclass
class GroundTruth:
    """Target curves on a u-grid: G(u), its second derivative and tr Sigma(u).

    ``excluded`` marks grid points that oracle evaluations must skip, e.g.
    neighbourhoods of unit roots of the coefficient curve.  ``provenance``
    records per field whether values are closed form, Monte Carlo or finite
    differences.
    """

    u_grid: np.ndarray
    values: np.ndarray
    curvature: np.ndarray | None
    sigma_trace: np.ndarray | None
    excluded: np.ndarray
    provenance: dict = field(default_factory=dict)
    se_values: np.ndarray | None = None
    se_sigma: np.ndarray | None = None
    flags: dict = field(default_factory=dict)


def exclusion_mask(curve: CoefficientCurve, u_grid: np.ndarray, radius: float = UNIT_ROOT_EXCLUSION) -> np.ndarray:
    """Points within ``radius`` of a unit root of the curve (or with |a| >= 1)."""
    u_grid = np.asarray(u_grid, float)
    mask = np.abs(np.asarray(curve.a(u_grid), float)) >= 1.0 - 1e-9
    for p in curve.unit_root_points:
        mask |= np.abs(u_grid - p) <= radius
    return mask


def closed_form_ground_truth(curve: CoefficientCurve, g, u_grid) -> GroundTruth:
    """Exact target curves for the Gaussian tvAR(1) model.

    Supports the built-in moment functionals (mean, covariance lags, lagged
    squares, cos(theta x), indicator) and stacks of them.  Values at excluded
    grid points are still evaluated where finite but must not enter oracle
    integrals.
    """
    u_grid = np.asarray(u_grid, dtype=float)
    excluded = exclusion_mask(curve, u_grid)
    ok = ~excluded
    u_ok = u_grid[ok]
    a_ok = np.asarray(curve.a(u_ok), float)

    parts = g.components if g.components is not None else (g,)
    m = len(u_grid)
    values = np.full((m, g.output_dim), np.nan)
    curvature = np.full((m, g.output_dim), np.nan)
    sigma_trace = np.full(m, np.nan)
    tr_ok = np.zeros(len(u_ok))
    col = 0
    for part in parts:
        kind, param = part.kind, part.param
        if kind == "mean":
            v = np.zeros_like(u_ok)
            cvt = np.zeros_like(u_ok)
            lrv = lrv_mean(a_ok)
        elif kind == "covariance_lag":
            v = true_covariance(curve, u_ok, param)
            cvt = covariance_curvature(curve, u_ok, param)
            lrv = lrv_covariance(a_ok, param)
        elif kind == "lagged_square":
            v = true_covariance(curve, u_ok, 0)
            cvt = covariance_curvature(curve, u_ok, 0)
            lrv = lrv_covariance(a_ok, 0)
        elif kind == "char_cos":
            v = true_char_function(curve, u_ok, param)
            cvt = char_curvature(curve, u_ok, param)
            lrv = lrv_char(a_ok, param)
        elif kind == "indicator_le":
            v = true_cdf(curve, u_ok, param)
            cvt = indicator_curvature(curve, u_ok, param)
            lrv = None
        else:
            raise ValueError(f"no closed-form ground truth for functional kind {kind!r}")
        values[ok, col] = v
        curvature[ok, col] = cvt
        if lrv is None:
            tr_ok = None
        elif tr_ok is not None:
            tr_ok = tr_ok + np.asarray(lrv)
        col += 1
    if tr_ok is not None:
        sigma_trace[ok] = tr_ok
    else:
        sigma_trace = None
    return GroundTruth(
        u_grid=u_grid,
        values=values,
        curvature=curvature,
        sigma_trace=sigma_trace,
        excluded=excluded,
        provenance={"values": "closed_form", "curvature": "closed_form", "sigma": "closed_form"},
    )


# ---------------------------------------------------------------------------
# Monte Carlo ground truth


def _series_on_stationary(values: np.ndarray, g) -> np.ndarray:
    """Evaluate the moment series on a stationary stretch, dropping the padded start."""
    from .moments import evaluate_series

    z = evaluate_series(values, g)
    return z[g.lag_depth :]


def _batch_means_lrv(z: np.ndarray) -> np.ndarray:
    """Batch-means long-run covariance with batch length ceil(len^(1/3))."""
    n, d = z.shape
    b = int(np.ceil(n ** (1.0 / 3.0)))
    nb = n // b
    means = z[: nb * b].reshape(nb, b, d).mean(axis=1)
    return b * np.atleast_2d(np.cov(means, rowvar=False, ddof=1))


def _truncated_autocov_lrv(z: np.ndarray, max_lag: int = 50) -> np.ndarray:
    """Long-run covariance via a truncated sum of sample autocovariances."""
    n, d = z.shape
    zc = z - z.mean(axis=0)
    out = (zc.T @ zc) / n
    for k in range(1, min(max_lag, n - 1) + 1):
        ck = (zc[:-k].T @ zc[k:]) / n
        out = out + ck + ck.T
    return out


def mc_ground_truth(
    curve: CoefficientCurve,
    g,
    u_grid,
    reps: int = 8,
    path_len: int = 200_000,
    seed: int = 0,
    curvature: str | None = "fd",
    delta_u: float = 0.01,
    burn_in: int = 1000,
    closed_form_infill: bool = True,
) -> GroundTruth:
    """Monte Carlo ground truth on a u-grid from long stationary paths.

    G(u) is the sample mean of the moment series; tr Sigma(u) is estimated
    twice (batch means and truncated autocovariance sum) and the two methods
    must agree within Monte Carlo error, else the point is flagged.  The
    curvature uses central differences of G with step ``delta_u`` and a
    Richardson check at half the step; all evaluations for one replication
    share the innovation stream, so the finite differences operate on a
    smooth pathwise function of u.

    Near-unit-root points are excluded up front.  When ``closed_form_infill``
    is set and a closed form exists, flagged long-run variances are replaced
    by their exact values (recorded in ``flags['sigma_infilled']``).
    """
    u_grid = np.asarray(u_grid, dtype=float)
    excluded = exclusion_mask(curve, u_grid)
    m, d = len(u_grid), g.output_dim
    ok_idx = np.flatnonzero(~excluded)

    if curvature == "fd":
        offsets = [0.0, delta_u, -delta_u, delta_u / 2.0, -delta_u / 2.0]
    else:
        offsets = [0.0]

    g_evals = np.zeros((reps, len(offsets), len(ok_idx), d))
    tr_batch = np.zeros((reps, len(ok_idx)))
    tr_trunc = np.zeros((reps, len(ok_idx)))
    for r in range(reps):
        for j, i in enumerate(ok_idx):
            for o, off in enumerate(offsets):
                u_eval = float(np.clip(u_grid[i] + off, 0.0, 1.0))
                path = simulate_stationary(curve, u_eval, path_len, seed, burn_in=burn_in, rep=r)
                z = _series_on_stationary(path.values, g)
                g_evals[r, o, j] = z.mean(axis=0)
                if o == 0:
                    tr_batch[r, j] = np.trace(_batch_means_lrv(z))
                    tr_trunc[r, j] = np.trace(_truncated_autocov_lrv(z))

    values = np.full((m, d), np.nan)
    se_values = np.full((m, d), np.nan)
    values[ok_idx] = g_evals[:, 0].mean(axis=0)
    se_values[ok_idx] = g_evals[:, 0].std(axis=0, ddof=1) / np.sqrt(reps)

    tr_b, tr_t = tr_batch.mean(axis=0), tr_trunc.mean(axis=0)
    se_b = tr_batch.std(axis=0, ddof=1) / np.sqrt(reps)
    se_t = tr_trunc.std(axis=0, ddof=1) / np.sqrt(reps)
    disagree = np.abs(tr_b - tr_t) > 3.0 * np.sqrt(se_b**2 + se_t**2) + 1e-12
    sigma_trace = np.full(m, np.nan)
    se_sigma = np.full(m, np.nan)
    sigma_trace[ok_idx] = 0.5 * (tr_b + tr_t)
    se_sigma[ok_idx] = 0.5 * np.sqrt(se_b**2 + se_t**2)

    flags: dict = {"sigma_disagree": np.zeros(m, dtype=bool)}
    flags["sigma_disagree"][ok_idx] = disagree

    infilled = np.zeros(m, dtype=bool)
    if closed_form_infill and np.any(disagree):
        try:
            cf = closed_form_ground_truth(curve, g, u_grid)
        except (ValueError, StationarityError):
            cf = None
        if cf is not None and cf.sigma_trace is not None:
            bad = ok_idx[disagree]
            sigma_trace[bad] = cf.sigma_trace[bad]
            se_sigma[bad] = 0.0
            infilled[bad] = True
    flags["sigma_infilled"] = infilled

    curv = None
    if curvature == "fd":
        # Central differences per replication (the streams cancel), then averaged.
        d2_big = (g_evals[:, 1] - 2.0 * g_evals[:, 0] + g_evals[:, 2]) / delta_u**2
        d2_small = (g_evals[:, 3] - 2.0 * g_evals[:, 0] + g_evals[:, 4]) / (delta_u / 2.0) ** 2
        d2 = (4.0 * d2_small - d2_big) / 3.0
        curv = np.full((m, d), np.nan)
        curv[ok_idx] = d2.mean(axis=0)
        rich_gap = np.abs(d2_big.mean(axis=0) - d2_small.mean(axis=0))
        scale = np.maximum(np.abs(d2_small.mean(axis=0)), 1e-8)
        curv_flag = np.zeros(m, dtype=bool)
        curv_flag[ok_idx] = np.any(rich_gap > 0.1 * scale, axis=-1)
        flags["curvature_flagged"] = curv_flag
    elif curvature == "closed_form":
        curv = closed_form_ground_truth(curve, g, u_grid).curvature

    return GroundTruth(
        u_grid=u_grid,
        values=values,
        curvature=curv,
        sigma_trace=sigma_trace,
        excluded=excluded,
        provenance={
            "values": "monte_carlo",
            "curvature": {"fd": "finite_difference", "closed_form": "closed_form", None: "none"}[curvature],
            "sigma": "monte_carlo" + ("+closed_form_infill" if np.any(infilled) else ""),
        },
        se_values=se_values,
        se_sigma=se_sigma,
        flags=flags,
    )


def path_to_csv(path: TimeSeriesPath | StationaryPath, target) -> None:
    """Write a path as single-column CSV with metadata header comments."""
    lines = [
        f"# curve={path.curve.name}",
        f"# seed={path.seed} rep={path.rep} burn_in={path.burn_in}",
    ]
    if isinstance(path, StationaryPath):
        lines.append(f"# stationary u={path.u:.17g}")
    else:
        lines.append(f"# n={path.n}")
    lines.append("x")
    lines.extend(f"{v:.17g}" for v in path.values)
    text = "\n".join(lines) + "\n"
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w") as fh:
            fh.write(text)
