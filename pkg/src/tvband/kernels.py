"""Kernel functions on [-1/2, 1/2], their rescaled and truncated variants.

All smoothing in this package uses kernels that are nonnegative, Lipschitz
continuous, supported on [-1/2, 1/2] and integrate to one.  The rescaled
version is K_h(x) = K(x/h) / h, so that (1/n) * sum_t K_h(t/n - u) is a
Riemann sum of the unit integral.  The truncated variant zeroes out a small
neighbourhood of the origin and is used by the leave-out estimator of the
cross-validation objective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

__all__ = [
    "Kernel",
    "KernelConstants",
    "TruncatedKernel",
    "epanechnikov",
    "get_kernel",
    "register_kernel",
    "scaled_eval",
    "truncated_eval",
    "constants",
]


@dataclass(frozen=True)
class KernelConstants:
    """Constants of a kernel entering the bias/variance formulas.

    sigma_k_sq is the integral of K(x)^2, mu_k the integral of K(x) x^2 and
    sup_norm the maximum of K.  For any density on [-1/2, 1/2] one has
    sigma_k_sq >= 1 (Cauchy-Schwarz) and mu_k <= 1/4.
    """

    sigma_k_sq: float
    mu_k: float
    sup_norm: float

    def __post_init__(self):
        if not self.sigma_k_sq >= 1.0 - 1e-12:
            raise ValueError(f"sigma_k_sq must be >= 1, got {self.sigma_k_sq}")
        if not 0.0 < self.mu_k <= 0.25 + 1e-12:
            raise ValueError(f"mu_k must be in (0, 1/4], got {self.mu_k}")


@dataclass(frozen=True)
class Kernel:
    """A kernel of the admissible class, immutable after construction.

    Parameters
    ----------
    name : str
        Registry name, also used in configs and CLI flags.
    fn : callable
        Vectorized evaluation, must return 0 outside [-1/2, 1/2].
    lipschitz_const : float
        A Lipschitz constant of ``fn``; used for diagnostics only.
    closed_constants : KernelConstants, optional
        Closed-form constants.  When absent they are computed by adaptive
        quadrature on first use.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    lipschitz_const: float
    closed_constants: KernelConstants | None = field(default=None, repr=False)

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))


def _epanechnikov_fn(x: np.ndarray) -> np.ndarray:
    inside = np.abs(x) <= 0.5
    return np.where(inside, 1.5 * (1.0 - (2.0 * x) ** 2), 0.0)


# sigma_k_sq = integral of (3/2)^2 (1-4x^2)^2 = 6/5, mu_k = integral of
# (3/2) x^2 (1-4x^2) = 1/20, max at x = 0.
epanechnikov = Kernel(
    name="epanechnikov",
    fn=_epanechnikov_fn,
    lipschitz_const=6.0,
    closed_constants=KernelConstants(sigma_k_sq=1.2, mu_k=0.05, sup_norm=1.5),
)

_REGISTRY: dict[str, Kernel] = {"epanechnikov": epanechnikov}


def get_kernel(name: str) -> Kernel:
    """Look up a registered kernel by name."""
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown kernel {name!r}; registered: {sorted(_REGISTRY)}"
        ) from None


def validate_kernel(kernel: Kernel, n_check: int = 20001) -> None:
    """Check the class invariants: support, nonnegativity, symmetry, unit mass."""
    x = np.linspace(-0.5, 0.5, n_check)
    vals = kernel(x)
    if np.any(vals < 0):
        raise ValueError(f"kernel {kernel.name} takes negative values")
    if not np.allclose(vals, kernel(-x), atol=1e-12):
        raise ValueError(f"kernel {kernel.name} is not symmetric")
    outside = np.array([-10.0, -0.51, 0.51, 3.0])
    if np.any(kernel(outside) != 0.0):
        raise ValueError(f"kernel {kernel.name} has support beyond [-1/2, 1/2]")
    mass, _ = integrate.quad(lambda t: float(kernel(t)), -0.5, 0.5, epsabs=1e-12, limit=200)
    if abs(mass - 1.0) > 1e-10:
        raise ValueError(f"kernel {kernel.name} has mass {mass}, expected 1")


def register_kernel(kernel: Kernel, validate: bool = True) -> Kernel:
    """Add a kernel to the registry (validating its invariants by default)."""
    if validate:
        validate_kernel(kernel)
    _REGISTRY[kernel.name] = kernel
    return kernel


def constants(kernel: Kernel) -> KernelConstants:
    """Return (sigma_K^2, mu_K, |K|_inf) for a kernel.

    Closed forms are used when the kernel carries them, otherwise adaptive
    quadrature to 1e-12 absolute tolerance.
    """
    if kernel.closed_constants is not None:
        return kernel.closed_constants
    sig, _ = integrate.quad(lambda t: float(kernel(t)) ** 2, -0.5, 0.5, epsabs=1e-12, limit=200)
    mu, _ = integrate.quad(lambda t: float(kernel(t)) * t * t, -0.5, 0.5, epsabs=1e-12, limit=200)
    sup = float(np.max(kernel(np.linspace(-0.5, 0.5, 200001))))
    return KernelConstants(sigma_k_sq=sig, mu_k=mu, sup_norm=sup)


def scaled_eval(kernel: Kernel, h: float, x) -> np.ndarray | float:
    """Evaluate K_h(x) = K(x/h) / h for bandwidth h > 0."""
    if h <= 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    out = kernel(x / h) / h
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TruncatedKernel:
    """Kernel with a dead zone around the origin.

    Equals the base kernel for |x| >= cutoff and vanishes for
    |x| <= (1 - epsilon) * cutoff; in between the base kernel is damped by a
    linear ramp so the result stays Lipschitz for epsilon > 0.  With
    epsilon = 0 the truncation is hard: zero strictly inside the cutoff, the
    base kernel value at and beyond it.  cutoff = 0 disables the truncation
    entirely.
    """

    base: Kernel
    cutoff: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.cutoff < 1.0:
            raise ValueError(f"cutoff must be in [0, 1), got {self.cutoff}")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in [0, 1), got {self.epsilon}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        y = np.abs(x)
        base = self.base(x)
        if self.cutoff == 0.0:
            return base
        if self.epsilon == 0.0:
            return np.where(y >= self.cutoff, base, 0.0)
        lo = (1.0 - self.epsilon) * self.cutoff
        ramp = np.clip((y - lo) / (self.cutoff - lo), 0.0, 1.0)
        return base * ramp


def truncated_eval(tk: TruncatedKernel, h: float, x) -> np.ndarray | float:
    """Evaluate the rescaled truncated kernel (1/h) K^trunc(x/h)."""
    if h <= 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    out = tk(x / h) / h
    return float(out) if out.ndim == 0 else out
