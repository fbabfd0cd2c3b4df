"""Objective functions with analytic gradients and a finite-difference fallback.

Every objective evaluates either a single point of shape ``(n,)`` or a batch of
points of shape ``(m, n)``; batches are what the ensemble samplers feed in.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

__all__ = [
    "ObjectiveFunction",
    "FunctionObjective",
    "Quadratic",
    "ShiftedRastrigin",
    "DoubleWell",
    "CountingObjective",
    "eval_objective",
    "eval_gradient",
    "finite_difference_gradient",
    "DEFAULT_FD_STEP",
]

DEFAULT_FD_STEP = 1e-5


class ObjectiveFunction:
    """Base class for a scalar field F on R^n.

    Subclasses implement ``_value`` and optionally ``_gradient`` on 2-D batches.
    Without an analytic ``_gradient`` the central-difference fallback is used.

    Attributes
    ----------
    dimension : int
        Input dimension n.
    known_optimum : float or None
        The optimal value F(x*), when known.
    smoothness_L : float or None
        A constant L with -L I <= Hessian <= L I everywhere, when known.
    """

    name = "objective"

    def __init__(self, dimension: int, known_optimum: Optional[float] = None,
                 smoothness_L: Optional[float] = None):
        if int(dimension) != dimension or dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {dimension!r}")
        if smoothness_L is not None and not smoothness_L > 0:
            raise ValueError("smoothness_L must be > 0")
        self.dimension = int(dimension)
        self.known_optimum = known_optimum
        self.smoothness_L = smoothness_L

    def _as_batch(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.dimension or x.ndim > 2:
            raise ValueError(
                f"{self.name}: expected shape ({self.dimension},) or (m, {self.dimension}), "
                f"got {x.shape}")
        return x.reshape(-1, self.dimension), x.ndim == 1

    def value(self, x):
        """F at a point (returns float) or at each row of a batch (returns array)."""
        batch, single = self._as_batch(x)
        out = self._value(batch)
        return float(out[0]) if single else out

    def gradient(self, x):
        """Gradient of F, same batching convention as :meth:`value`."""
        batch, single = self._as_batch(x)
        out = self._gradient(batch)
        return out[0] if single else out

    __call__ = value

    def _value(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _gradient(self, x: np.ndarray) -> np.ndarray:
        return _central_differences(self._value, x, DEFAULT_FD_STEP)

    def __repr__(self):
        return f"{type(self).__name__}(dimension={self.dimension})"


class FunctionObjective(ObjectiveFunction):
    """Wrap plain callables acting on a single point.

    ``grad=None`` selects central finite differences with step ``fd_step``.
    """

    def __init__(self, fun: Callable, dimension: int, grad: Optional[Callable] = None, *,
                 known_optimum=None, smoothness_L=None, name="function",
                 fd_step: float = DEFAULT_FD_STEP):
        super().__init__(dimension, known_optimum, smoothness_L)
        if not fd_step > 0:
            raise ValueError("fd_step must be > 0")
        self.fun = fun
        self.grad = grad
        self.name = name
        self.fd_step = fd_step

    def _value(self, x):
        return np.array([float(self.fun(row)) for row in x])

    def _gradient(self, x):
        if self.grad is None:
            return _central_differences(self._value, x, self.fd_step)
        return np.array([np.asarray(self.grad(row), dtype=float) for row in x])


class Quadratic(ObjectiveFunction):
    """F(x) = (L/2) ||x||^2, minimised at the origin with value 0."""

    name = "quadratic"

    def __init__(self, dimension: int = 1, L: float = 1.0):
        if not L > 0:
            raise ValueError("L must be > 0")
        super().__init__(dimension, known_optimum=0.0, smoothness_L=float(L))
        self.L = float(L)

    def _value(self, x):
        return 0.5 * self.L * np.einsum("ij,ij->i", x, x)

    def _gradient(self, x):
        return self.L * x

    def __repr__(self):
        return f"Quadratic(dimension={self.dimension}, L={self.L})"


class ShiftedRastrigin(ObjectiveFunction):
    """Rastrigin function with its global minimum moved to ``shift * ones``.

    F(x) = A n + sum (x_k - s)^2 - A sum cos(2 pi (x_k - s)), with amplitude A.
    The Hessian is diagonal with entries 2 + 4 pi^2 A cos(.), so the function is
    L-smooth with L = 2 + 4 pi^2 A (= 2 + 20 pi^2 for A = 5).
    """

    name = "rastrigin"

    def __init__(self, dimension: int = 2, shift: float = 2.0, amplitude: float = 5.0):
        if amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        L = 2.0 + 4.0 * np.pi ** 2 * amplitude
        super().__init__(dimension, known_optimum=0.0, smoothness_L=L)
        self.shift = float(shift)
        self.amplitude = float(amplitude)

    def _value(self, x):
        d = x - self.shift
        A = self.amplitude
        return A * self.dimension + np.sum(d * d - A * np.cos(2 * np.pi * d), axis=1)

    def _gradient(self, x):
        d = x - self.shift
        return 2.0 * d + 2.0 * np.pi * self.amplitude * np.sin(2 * np.pi * d)

    def hessian_diagonal(self, x):
        d = np.asarray(x, dtype=float) - self.shift
        return 2.0 + 4.0 * np.pi ** 2 * self.amplitude * np.cos(2 * np.pi * d)

    def __repr__(self):
        return (f"ShiftedRastrigin(dimension={self.dimension}, shift={self.shift}, "
                f"amplitude={self.amplitude})")


class DoubleWell(ObjectiveFunction):
    """One-dimensional double well F(x) = x^4/4 - x^2/2 + tilt * x.

    ``tilt=0`` gives the symmetric well with minima at +-1. A positive tilt
    makes the left basin the deeper one. Not globally L-smooth.
    """

    name = "double_well"

    def __init__(self, tilt: float = 0.0):
        self.tilt = float(tilt)
        super().__init__(1, known_optimum=self._global_min())

    def _global_min(self):
        roots = np.roots([1.0, 0.0, -1.0, self.tilt])
        real = roots[np.abs(roots.imag) < 1e-9].real
        vals = real ** 4 / 4 - real ** 2 / 2 + self.tilt * real
        return float(vals.min())

    def minimizers(self) -> np.ndarray:
        """Sorted real critical points of F (local minima and the barrier top)."""
        roots = np.roots([1.0, 0.0, -1.0, self.tilt])
        return np.sort(roots[np.abs(roots.imag) < 1e-9].real)

    def _value(self, x):
        x = x[:, 0]
        return x ** 4 / 4 - x ** 2 / 2 + self.tilt * x

    def _gradient(self, x):
        return x ** 3 - x + self.tilt

    def __repr__(self):
        return f"DoubleWell(tilt={self.tilt})"


class CountingObjective(ObjectiveFunction):
    """Delegate to another objective while counting evaluated points."""

    def __init__(self, inner: ObjectiveFunction):
        super().__init__(inner.dimension, inner.known_optimum, inner.smoothness_L)
        self.inner = inner
        self.name = inner.name
        self.value_calls = 0
        self.gradient_calls = 0

    def _value(self, x):
        self.value_calls += x.shape[0]
        return self.inner._value(x)

    def _gradient(self, x):
        self.gradient_calls += x.shape[0]
        return self.inner._gradient(x)


def _central_differences(fun, x, h):
    # fun maps an (m, n) batch to (m,)
    m, n = x.shape
    grad = np.empty_like(x)
    for i in range(n):
        step = np.zeros(n)
        step[i] = h
        grad[:, i] = (fun(x + step) - fun(x - step)) / (2.0 * h)
    return grad


def eval_objective(f: ObjectiveFunction, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (f.dimension,):
        raise ValueError(f"x must have shape ({f.dimension},), got {x.shape}")
    return f.value(x)


def eval_gradient(f: ObjectiveFunction, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (f.dimension,):
        raise ValueError(f"x must have shape ({f.dimension},), got {x.shape}")
    return f.gradient(x)


def finite_difference_gradient(f: ObjectiveFunction, x, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central-difference gradient (F(x + h e_i) - F(x - h e_i)) / 2h."""
    if not h > 0:
        raise ValueError(f"h must be > 0, got {h!r}")
    x = np.asarray(x, dtype=float)
    if x.shape != (f.dimension,):
        raise ValueError(f"x must have shape ({f.dimension},), got {x.shape}")
    return _central_differences(f._value, x[None, :], h)[0]
