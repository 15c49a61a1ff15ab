"""Pointwise bandwidth selection by contrast minimization.

For each location u the selector takes the largest bandwidth h on a geometric
grid whose self-normalized estimate stays within a noise tube of every
smaller-bandwidth estimate:

    |Ghat_h(u) - Ghat_h'(u)|_2 <= C# * vhat(h', u) * lambda(h')   for all h' < h,

where vhat^2(h, u) = sigma_K^2 tr(Sigmahat_n(u)) / (n h) plugs in a kernel
estimate of the long-run variance and lambda(h) = max(1, sqrt(log(1/h))).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroMassError
from .kernels import Kernel, constants, epanechnikov
from .moments import (
    MomentFunctional,
    evaluate_series,
    kernel_weights,
    weight_matrix,
)

__all__ = [
    "lambda_factor",
    "GeometricGrid",
    "geometric_grid",
    "LongRunVarianceEstimate",
    "estimate_longrun_variance",
    "v_hat",
    "LocalSelection",
    "LocalSelectionCurve",
    "select_local",
    "select_local_curve",
    "h_opt_local",
]


def lambda_factor(h: float) -> float:
    """max(1, sqrt(log(1/h))) for h in (0, 1]."""
    if not 0.0 < h <= 1.0:
        raise ValueError(f"h must lie in (0, 1], got {h}")
    return max(1.0, float(np.sqrt(np.log(1.0 / h))))


@dataclass(frozen=True)
class GeometricGrid:
    """Bandwidths {ratio^k} intersected with [h_lower, 1], sorted descending."""

    ratio: float
    h_lower: float
    elements: np.ndarray

    def __len__(self):
        return len(self.elements)


def geometric_grid(a: float, h_lower: float) -> GeometricGrid:
    """Grid {a^k : k = 0..K} with a^K >= h_lower > a^(K+1)."""
    if not 0.0 < a < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {a}")
    if not 0.0 < h_lower <= 1.0:
        raise ValueError(f"h_lower must be in (0, 1], got {h_lower}")
    k_max = int(np.floor(np.log(h_lower) / np.log(a) + 1e-9))
    elements = a ** np.arange(k_max + 1)
    return GeometricGrid(ratio=a, h_lower=h_lower, elements=elements)


@dataclass
class LongRunVarianceEstimate:
    """Kernel estimate of the long-run covariance of the moment series at u."""

    sigma_hat: np.ndarray  # (d, d), symmetrized
    u: float
    eta: float
    r_n: int
    centered: bool
    flags: dict = field(default_factory=dict)

    @property
    def trace(self) -> float:
        return float(np.trace(self.sigma_hat))


def estimate_longrun_variance(
    path,
    g: MomentFunctional,
    u: float,
    eta: float,
    r_n: int,
    centered: bool = True,
    kernel: Kernel = epanechnikov,
) -> LongRunVarianceEstimate:
    """Sum over lags |k| <= r_n of kernel-weighted product moments at u.

    chat(u, k) = (1/n) sum_t K_eta(t/n - u) g(Y_t) g(Y_{t+k})', with terms
    whose t + k leaves 1..n dropped.  With ``centered`` the products use
    g(Y) - m, m being the self-normalized local mean at (u, eta); this
    matches the covariance-based definition of the estimand for functionals
    that are not mean-zero.  The result is symmetrized; if the trace of a
    centered estimate is negative it is projected onto the positive
    semidefinite cone (flagged).
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    x = np.asarray(getattr(path, "values", path), dtype=float)
    n = len(x)
    if not 0 <= r_n < n:
        raise ValueError(f"r_n must lie in [0, n), got {r_n}")
    z = evaluate_series(x, g)
    w = kernel_weights(kernel, eta, u, n)
    mass = w.sum()
    if mass <= 0:
        raise ZeroMassError(f"no observations in the window at u={u}, eta={eta}")
    if centered:
        z = z - (w @ z) / mass
    d = z.shape[1]
    sigma = np.zeros((d, d))
    for k in range(-r_n, r_n + 1):
        if k >= 0:
            t = slice(0, n - k)
            tk = slice(k, n)
        else:
            t = slice(-k, n)
            tk = slice(0, n + k)
        sigma += (z[t] * w[t, None]).T @ z[tk] / n
    sigma = 0.5 * (sigma + sigma.T)
    flags = {}
    if centered and np.trace(sigma) < 0:
        vals, vecs = np.linalg.eigh(sigma)
        sigma = (vecs * np.clip(vals, 0.0, None)) @ vecs.T
        flags["projected_psd"] = True
    return LongRunVarianceEstimate(sigma_hat=sigma, u=u, eta=eta, r_n=r_n, centered=centered, flags=flags)


def v_hat(h: float, sigma: LongRunVarianceEstimate | float, kernel: Kernel, n: int) -> float:
    """Noise scale sqrt(sigma_K^2 tr(Sigmahat(u)) / (n h)); negative traces clamp to 0."""
    if h <= 0 or n <= 0:
        raise ValueError("h and n must be positive")
    tr = sigma.trace if isinstance(sigma, LongRunVarianceEstimate) else float(sigma)
    tr = max(tr, 0.0)
    return float(np.sqrt(constants(kernel).sigma_k_sq * tr / (n * h)))


@dataclass
class LocalSelection:
    """Outcome of the pointwise selection at one location."""

    u: float
    h_hat: float
    c_sharp: float
    estimate: np.ndarray
    grid: np.ndarray
    estimates: np.ndarray   # (n_h, d) self-normalized estimates per bandwidth
    tube: np.ndarray        # (n_h,) C# * vhat(h) * lambda(h)
    accepted_pairs: list    # (h, h') comparisons passed by the selected h
    rejected_pairs: list    # (h, h') first failure per rejected candidate
    sigma_trace: float
    flags: dict = field(default_factory=dict)


def _selection_scan(est: np.ndarray, tube: np.ndarray, grid: np.ndarray, feasible: np.ndarray):
    """Scan candidates from the largest bandwidth down; return index and diagnostics."""
    n_h = len(grid)
    accepted, rejected = [], []
    for i in range(n_h):
        if not feasible[i]:
            continue
        ok = True
        pairs = []
        for j in range(i + 1, n_h):
            if not feasible[j]:
                continue
            gap = float(np.linalg.norm(est[i] - est[j]))
            if gap <= tube[j]:
                pairs.append((float(grid[i]), float(grid[j])))
            else:
                rejected.append((float(grid[i]), float(grid[j])))
                ok = False
                break
        if ok:
            accepted.extend(pairs)
            return i, accepted, rejected
    raise ZeroMassError("no feasible bandwidth on the grid")


def select_local(
    path,
    g: MomentFunctional,
    u: float,
    grid: GeometricGrid,
    c_sharp: float,
    sigma: LongRunVarianceEstimate,
    kernel: Kernel = epanechnikov,
) -> LocalSelection:
    """Largest bandwidth whose estimate stays inside the tube of all smaller ones.

    Grid bandwidths with empty kernel windows are excluded both as candidates
    and from the h' quantifier (flagged).  The smallest feasible bandwidth is
    vacuously acceptable, so a selection always exists.
    """
    if c_sharp <= 0:
        raise ValueError(f"c_sharp must be positive, got {c_sharp}")
    x = np.asarray(getattr(path, "values", path), dtype=float)
    n = len(x)
    z = evaluate_series(x, g)
    hs = grid.elements
    est = np.full((len(hs), z.shape[1]), np.nan)
    feasible = np.zeros(len(hs), dtype=bool)
    for i, h in enumerate(hs):
        w = kernel_weights(kernel, float(h), u, n)
        mass = w.sum()
        if mass > 0:
            est[i] = (w @ z) / mass
            feasible[i] = True
    tube = np.array([c_sharp * v_hat(float(h), sigma, kernel, n) * lambda_factor(float(h)) for h in hs])
    idx, accepted, rejected = _selection_scan(est, tube, hs, feasible)
    flags = {"infeasible_h": hs[~feasible].tolist()} if not feasible.all() else {}
    return LocalSelection(
        u=u,
        h_hat=float(hs[idx]),
        c_sharp=c_sharp,
        estimate=est[idx].copy(),
        grid=hs.copy(),
        estimates=est,
        tube=tube,
        accepted_pairs=accepted,
        rejected_pairs=rejected,
        sigma_trace=sigma.trace,
        flags=flags,
    )


@dataclass
class LocalSelectionCurve:
    """Pointwise selections over a u-grid, sharing one variance estimate per u."""

    u_grid: np.ndarray
    h_hat: np.ndarray          # (m,)
    estimates: np.ndarray      # (m, d) Ghat at the selected bandwidth
    sigma_trace: np.ndarray    # (m,)
    grid: np.ndarray
    c_sharp: float
    n_collapsed: int           # points where the smallest grid element was chosen
    flags: dict = field(default_factory=dict)


class LepskiDesign:
    """Precomputed kernel weights for repeated local selection on one design.

    Holds the (h, u) weight matrices for the estimate grid and the weights of
    the variance window, so replication loops reduce to matrix products.
    """

    def __init__(
        self,
        kernel: Kernel,
        n: int,
        u_grid,
        grid: GeometricGrid,
        lrv_eta: float,
        lrv_rn: int,
    ):
        self.kernel = kernel
        self.n = n
        self.u_grid = np.atleast_1d(np.asarray(u_grid, dtype=float))
        self.grid = grid
        self.lrv_eta = lrv_eta
        self.lrv_rn = lrv_rn
        hs = grid.elements
        self.weights = np.stack([weight_matrix(kernel, float(h), self.u_grid, n) for h in hs])
        self.masses = self.weights.sum(axis=2) / n  # (n_h, m)
        self.w_eta = weight_matrix(kernel, lrv_eta, self.u_grid, n)  # (m, n)
        self.eta_mass = self.w_eta.sum(axis=1)
        self.lam = np.array([lambda_factor(float(h)) for h in hs])
        self.sigma_k_sq = constants(kernel).sigma_k_sq

    def normalized_estimates(self, z: np.ndarray) -> np.ndarray:
        """(n_h, m, d) self-normalized estimates; NaN where the mass vanishes."""
        num = np.einsum("hmn,nd->hmd", self.weights, z) / self.n
        mass = self.masses[:, :, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(mass > 0, num / mass, np.nan)

    def lrv_trace(self, z: np.ndarray, centered: bool = True) -> np.ndarray:
        """tr Sigmahat(u) for every u of the design, vectorized over lags."""
        n, d = z.shape
        m = len(self.u_grid)
        tr = np.zeros(m)
        mean = (self.w_eta @ z) / np.where(self.eta_mass > 0, self.eta_mass, np.nan)[:, None]
        for k in range(-self.lrv_rn, self.lrv_rn + 1):
            if k >= 0:
                t, tk = slice(0, n - k), slice(k, n)
            else:
                t, tk = slice(-k, n), slice(0, n + k)
            prod = z[t] * z[tk]                       # (nk, d)
            a = self.w_eta[:, t] @ prod               # (m, d)
            if centered:
                b = self.w_eta[:, t] @ z[tk]
                c = self.w_eta[:, t] @ z[t]
                m0 = self.w_eta[:, t].sum(axis=1)
                a = a - mean * b - mean * c + mean**2 * m0[:, None]
            tr += a.sum(axis=1)
        return tr / n


def select_local_curve(
    path,
    g: MomentFunctional,
    u_grid,
    grid: GeometricGrid,
    c_sharp: float,
    kernel: Kernel = epanechnikov,
    lrv_eta: float = 0.35,
    lrv_rn: int = 18,
    centered: bool = True,
    design: LepskiDesign | None = None,
) -> LocalSelectionCurve:
    """Run the pointwise selector on a u-grid, one variance estimate per point.

    Reports the number of points collapsing to the smallest grid element,
    the diagnostic for a too-small lower bandwidth bound.
    """
    if c_sharp <= 0:
        raise ValueError(f"c_sharp must be positive, got {c_sharp}")
    x = np.asarray(getattr(path, "values", path), dtype=float)
    n = len(x)
    if design is None:
        design = LepskiDesign(kernel, n, u_grid, grid, lrv_eta, lrv_rn)
    z = evaluate_series(x, g)
    est = design.normalized_estimates(z)              # (n_h, m, d)
    tr = np.clip(design.lrv_trace(z, centered=centered), 0.0, None)  # (m,)
    hs = grid.elements
    m = len(design.u_grid)
    # tube[h', u] = C# * vhat(h', u) * lambda(h')
    tube = c_sharp * np.sqrt(design.sigma_k_sq * tr[None, :] / (n * hs[:, None])) * design.lam[:, None]
    # gaps[i, j, u] = |est_i(u) - est_j(u)|_2
    diff = est[:, None, :, :] - est[None, :, :, :]
    gaps = np.sqrt(np.nansum(diff**2, axis=3))
    feasible = design.masses > 0                      # (n_h, m)
    n_h = len(hs)
    smaller = np.tril(np.ones((n_h, n_h), dtype=bool), -1).T  # pairs j > i
    ok_pair = (gaps <= tube[None, :, :]) | ~smaller[:, :, None] | ~feasible[None, :, :]
    candidate_ok = ok_pair.all(axis=1) & feasible     # (n_h, m)
    if not candidate_ok.any(axis=0).all():
        raise ZeroMassError("some u has no feasible bandwidth on the grid")
    idx = np.argmax(candidate_ok, axis=0)             # first (largest-h) acceptable candidate
    sel_est = est[idx, np.arange(m)]
    h_hat = hs[idx]
    n_collapsed = int(np.sum(idx == n_h - 1))
    return LocalSelectionCurve(
        u_grid=design.u_grid,
        h_hat=h_hat,
        estimates=sel_est,
        sigma_trace=tr,
        grid=hs.copy(),
        c_sharp=c_sharp,
        n_collapsed=n_collapsed,
        flags={"any_infeasible": bool(~feasible.all())},
    )


def h_opt_local(
    sigma_trace: float,
    curvature_sq: float,
    kernel: Kernel,
    n: int,
    log_factor: bool = False,
) -> float:
    """Pointwise optimal bandwidth (4 sigma_K^2 tr Sigma / (mu_K^2 |G''|^2))^(1/5) n^(-1/5).

    With ``log_factor`` the rate carries (log n / n)^(1/5) instead, matching
    the benchmark bandwidth of the adaptive-rate analysis.
    """
    if curvature_sq <= 0:
        raise ValueError("curvature_sq must be positive; the formula needs |G''(u)| != 0")
    kc = constants(kernel)
    rate = (np.log(n) / n) ** 0.2 if log_factor else n ** (-0.2)
    return float((4.0 * kc.sigma_k_sq * sigma_trace / (kc.mu_k**2 * curvature_sq)) ** 0.2 * rate)
