"""State-dependent diffusion coefficient and the drift that keeps Gibbs invariant.

The diffusion matrix is a scalar multiple of the identity, a(x) = h(x) I, with

    h(x) = f((F(x) - c)^+) + 1,    f(u) = lam * (1 - exp(-theta * u^2)),

and the drift is b(x) = -h(x) grad F(x) + grad h(x) / beta. Because a is a scalar
times the identity, its row divergence equals grad h = f'((F - c)^+) grad F.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import DomainError
from .objective import ObjectiveFunction

__all__ = [
    "ActivationParams",
    "DiffusionCoefficients",
    "activation",
    "activation_derivative",
    "scalar_coefficient",
    "coefficient_gradient",
    "drift",
    "coefficients",
    "detailed_balance_residual",
    "gibbs_on_grid",
]

# e^{-beta F} at the grid ends must be below this fraction of its peak
BOUNDARY_MASS_TOL = 1e-12


@dataclass(frozen=True)
class ActivationParams:
    """Gain ``lam``, sharpness ``theta`` and threshold ``c`` of the activation.

    ``lam = 0`` or ``theta = 0`` makes h identically 1 (plain Langevin).
    """

    lam: float = 0.0
    theta: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam!r}")
        if not self.theta >= 0:
            raise ValueError(f"theta must be >= 0, got {self.theta!r}")
        if not np.isfinite(self.c):
            raise ValueError("c must be finite")

    def with_threshold(self, c: float) -> "ActivationParams":
        return ActivationParams(self.lam, self.theta, float(c))


@dataclass(frozen=True)
class DiffusionCoefficients:
    h: np.ndarray
    grad_h: np.ndarray
    drift: np.ndarray
    noise_scale: np.ndarray


def _nonnegative(u):
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("activation argument must be >= 0; clamp with max(., 0) first")
    return u


def activation(p: ActivationParams, u):
    """f(u) = lam (1 - exp(-theta u^2)), bounded in [0, lam)."""
    u = _nonnegative(u)
    return p.lam * -np.expm1(-p.theta * u * u)


def activation_derivative(p: ActivationParams, u):
    """f'(u) = 2 lam theta u exp(-theta u^2), maximal at u = 1/sqrt(2 theta)."""
    u = _nonnegative(u)
    with np.errstate(invalid="ignore"):
        out = 2.0 * p.lam * p.theta * u * np.exp(-p.theta * u * u)
    # inf * 0 at u = inf; the derivative vanishes there
    return np.where(np.isinf(u), 0.0, out)[()]


def _excess(p, fval):
    return np.maximum(np.asarray(fval, dtype=float) - p.c, 0.0)


def scalar_coefficient(p: ActivationParams, fval):
    """h = f((fval - c)^+) + 1."""
    return activation(p, _excess(p, fval)) + 1.0


def coefficient_gradient(p: ActivationParams, fval, grad_f):
    """grad_x h = f'((F - c)^+) grad F, zero on the sublevel set {F <= c}.

    ``fval`` has shape ``(m,)`` with ``grad_f`` of shape ``(m, n)``, or a scalar
    with a single ``(n,)`` gradient.
    """
    fp = np.asarray(activation_derivative(p, _excess(p, fval)))
    return fp[..., None] * np.asarray(grad_f, dtype=float)


def drift(p: ActivationParams, beta: float, fval, grad_f):
    """b = -h grad F + grad h / beta."""
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta!r}")
    h = np.asarray(scalar_coefficient(p, fval))
    grad_f = np.asarray(grad_f, dtype=float)
    return -h[..., None] * grad_f + coefficient_gradient(p, fval, grad_f) / beta


def coefficients(p: ActivationParams, beta: float, eta: float, fval, grad_f) -> DiffusionCoefficients:
    """All per-point quantities one Euler-Maruyama step needs."""
    h = np.asarray(scalar_coefficient(p, fval))
    return DiffusionCoefficients(
        h=h,
        grad_h=coefficient_gradient(p, fval, grad_f),
        drift=drift(p, beta, fval, grad_f),
        noise_scale=np.sqrt(2.0 * eta / beta * h),
    )


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3:
        raise ValueError("grid must be a 1-D array with at least 3 points")
    steps = np.diff(grid)
    if np.any(steps <= 0):
        raise ValueError("grid must be strictly increasing")
    if not np.allclose(steps, steps[0], rtol=1e-6, atol=0):
        raise ValueError("grid must be uniformly spaced")
    return grid


def gibbs_on_grid(f: ObjectiveFunction, beta: float, grid):
    """Normalised density e^{-beta F}/Z on a uniform 1-D grid (trapezoid Z).

    Raises :class:`DomainError` when the density at either end of the grid is
    not negligible, since the truncated normalisation would then be biased.
    """
    if f.dimension != 1:
        raise ValueError("Gibbs densities on grids require a one-dimensional objective")
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta!r}")
    grid = _check_grid(grid)
    energy = beta * f.value(grid[:, None])
    unnorm = np.exp(-(energy - energy.min()))
    if max(unnorm[0], unnorm[-1]) >= BOUNDARY_MASS_TOL:
        raise DomainError(
            f"Gibbs density at the grid boundary is {max(unnorm[0], unnorm[-1]):.3g} of its peak; "
            f"widen the grid [{grid[0]}, {grid[-1]}]")
    return unnorm / trapezoid(unnorm, grid)


def detailed_balance_residual(p: ActivationParams, f: ObjectiveFunction, beta: float, grid):
    """Pointwise b nu - (1/beta) d/dx (h nu) on a uniform grid.

    The outer derivative uses central differences (second-order one-sided at
    the two ends), so for a smooth integrand the residual is O(spacing^2).
    """
    grid = _check_grid(grid)
    nu = gibbs_on_grid(f, beta, grid)
    pts = grid[:, None]
    fval = f.value(pts)
    b = drift(p, beta, fval, f.gradient(pts))[:, 0]
    flux = scalar_coefficient(p, fval) * nu
    return b * nu - np.gradient(flux, grid, edge_order=2) / beta
