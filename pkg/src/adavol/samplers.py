"""Euler-Maruyama ensemble samplers: AdaVol and its comparators.

All methods share one update, applied to every chain at once,

    x_{j+1} = x_j + eta * drift(x_j) + sqrt(2 eta / beta * a(x_j)) * z_j,

and differ only in the drift and the diffusion scalar ``a``:

==============  ==================================  ================================
method          drift                               a
==============  ==================================  ================================
adavol          -h grad F + grad h / beta            h = f((F - c_j)^+) + 1
adavol_fixed_c  same, c held at ``activation.c``     same
langevin        -grad F                              1
landscape_mod   -grad F                              f((F - c_j)^+) + epsilon
driftless       0 (no gradient evaluations)          see below
==============  ==================================  ================================

``driftless`` ignores beta: its noise variance is 2 eta (((F - c*)^+)^gamma + epsilon),
with c* the known optimum when the objective declares one. The adaptive threshold c_j is the smallest
objective value seen so far; every chain in step j uses the same c_j and the
new minimum is taken only after all chains have moved.

Each chain draws its Gaussian increments from its own Philox stream keyed by
``(seed, chain index)``, so a chain's noise does not depend on how many other
chains run or how the ensemble is partitioned.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional

import numpy as np

from . import diffusion
from .diffusion import ActivationParams
from .errors import ConfigError, DivergenceError
from .objective import ObjectiveFunction

__all__ = [
    "METHODS",
    "SamplerConfig",
    "NoiseStream",
    "ChainEnsemble",
    "TrajectoryRecord",
    "RunResult",
    "init_ensemble",
    "adavol_step",
    "langevin_step",
    "landscape_mod_step",
    "driftless_step",
    "step",
    "diffusion_scalar",
    "run",
]

log = logging.getLogger(__name__)

METHODS = ("adavol", "adavol_fixed_c", "langevin", "landscape_mod", "driftless")


@dataclass
class SamplerConfig:
    """Parameters of one sampler run.

    ``init_mean`` fixes the dimension; the initial law is
    N(init_mean, init_cov_scale * I). ``gamma_exponent`` defaults to n/2.
    """

    eta: float
    beta: float
    iterations: int
    chains: int
    seed: int = 0
    method: str = "adavol"
    activation: ActivationParams = field(default_factory=ActivationParams)
    epsilon: float = 1.0
    gamma_exponent: Optional[float] = None
    init_mean: tuple = (0.0,)
    init_cov_scale: float = 1.0

    def __post_init__(self):
        self.init_mean = tuple(float(v) for v in np.atleast_1d(self.init_mean))
        if self.gamma_exponent is None:
            self.gamma_exponent = self.dimension / 2
        self.validate()

    @property
    def dimension(self) -> int:
        return len(self.init_mean)

    def validate(self, dimension: Optional[int] = None):
        for name in ("eta", "beta", "epsilon", "init_cov_scale"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and np.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be > 0, got {value!r}")
        for name in ("iterations", "chains"):
            value = getattr(self, name)
            low = 0 if name == "iterations" else 1
            if isinstance(value, bool) or int(value) != value or value < low:
                raise ConfigError(f"{name} must be an integer >= {low}, got {value!r}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {', '.join(METHODS)}, got {self.method!r}")
        if not isinstance(self.activation, ActivationParams):
            raise ConfigError("activation must be an ActivationParams")
        if not np.all(np.isfinite(self.init_mean)):
            raise ConfigError("init_mean must be finite")
        n = self.dimension if dimension is None else dimension
        if dimension is not None and dimension != self.dimension:
            raise ConfigError(
                f"init_mean has length {self.dimension} but the objective has dimension {dimension}")
        if self.method == "driftless" and not self.gamma_exponent >= n / 2:
            raise ConfigError(
                f"gamma_exponent must be >= n/2 = {n / 2} for driftless, got {self.gamma_exponent!r}")
        self.iterations = int(self.iterations)
        self.chains = int(self.chains)
        self.seed = int(self.seed)

    def replace(self, **changes) -> "SamplerConfig":
        return dataclasses.replace(self, **changes)


class NoiseStream:
    """Per-chain standard normal increments, buffered ``block`` steps at a time.

    Chain i owns ``Generator(Philox(SeedSequence(seed, spawn_key=(i,))))``.
    Drawing a block at once consumes the stream exactly like drawing one step
    at a time, so the increments are independent of ``block``.
    """

    def __init__(self, seed: int, chains: int, dimension: int, block: int = 256):
        self.seed = seed
        self.dimension = dimension
        self.block = block
        self._gens = [
            np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(i,))))
            for i in range(chains)
        ]
        self._buf = np.empty((chains, 0, dimension))
        self._pos = 0

    @property
    def chains(self) -> int:
        return len(self._gens)

    def gaussian_matrix(self, rows: int) -> np.ndarray:
        """One ``(rows, dimension)`` draw per chain; used for initial positions."""
        return np.stack([g.standard_normal((rows, self.dimension)) for g in self._gens])

    def next(self) -> np.ndarray:
        """The next ``(chains, dimension)`` increment."""
        if self._pos == self._buf.shape[1]:
            self._buf = np.stack([g.standard_normal((self.block, self.dimension)) for g in self._gens])
            self._pos = 0
        z = self._buf[:, self._pos, :]
        self._pos += 1
        return z


@dataclass
class ChainEnsemble:
    """Positions of the M chains plus the shared threshold.

    ``values`` caches F at ``positions``. ``noise`` advances in place, so an
    ensemble should not be stepped again once a successor exists.
    """

    positions: np.ndarray
    values: np.ndarray
    threshold: float
    iteration: int
    noise: NoiseStream

    @property
    def mean_position(self) -> np.ndarray:
        return self.positions.mean(axis=0)


@dataclass(frozen=True)
class TrajectoryRecord:
    iteration: int
    min_objective: float
    mean_objective: float
    threshold: float
    delta_hat: float
    mean_position: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, TrajectoryRecord):
            return NotImplemented
        return (self.iteration == other.iteration
                and self.min_objective == other.min_objective
                and self.mean_objective == other.mean_objective
                and self.threshold == other.threshold
                and self.delta_hat == other.delta_hat
                and np.array_equal(self.mean_position, other.mean_position))


class RunResult(NamedTuple):
    records: List[TrajectoryRecord]
    ensemble: ChainEnsemble

    @property
    def estimate(self) -> np.ndarray:
        """Across-chain mean of the final positions."""
        return self.ensemble.mean_position


def init_ensemble(cfg: SamplerConfig, f: ObjectiveFunction) -> ChainEnsemble:
    """Draw M chains from N(init_mean, init_cov_scale I); c_0 = min F."""
    cfg.validate(f.dimension)
    noise = NoiseStream(cfg.seed, cfg.chains, f.dimension)
    z = noise.gaussian_matrix(1)[:, 0, :]
    positions = np.asarray(cfg.init_mean) + np.sqrt(cfg.init_cov_scale) * z
    values = f.value(positions)
    _check_finite(positions, values, 0)
    if cfg.method == "adavol_fixed_c":
        threshold = cfg.activation.c
    else:
        threshold = float(values.min())
    return ChainEnsemble(positions, values, threshold, 0, noise)


def _check_finite(positions, values, iteration):
    # fast path; a sum overflowing to inf falls through to the exact check
    if math.isfinite(positions.sum()) and math.isfinite(values.sum()):
        return
    bad = ~np.all(np.isfinite(positions), axis=1)
    if bad.any():
        raise DivergenceError(int(np.argmax(bad)), iteration, "position")
    bad = ~np.isfinite(values)
    if bad.any():
        raise DivergenceError(int(np.argmax(bad)), iteration, "objective value")


def _advance(ens, cfg, f, drift, noise_var, adaptive=True):
    # shared Euler-Maruyama kernel; noise_var = 2 eta / beta * a
    z = ens.noise.next()
    positions = ens.positions + cfg.eta * drift + np.sqrt(noise_var)[:, None] * z
    iteration = ens.iteration + 1
    values = f.value(positions)
    _check_finite(positions, values, iteration)
    threshold = min(ens.threshold, float(values.min())) if adaptive else ens.threshold
    return ChainEnsemble(positions, values, threshold, iteration, ens.noise)


def _require(cfg, *methods):
    if cfg.method not in methods:
        raise ConfigError(f"step expects method in {methods}, config has {cfg.method!r}")


def adavol_step(ens: ChainEnsemble, cfg: SamplerConfig, f: ObjectiveFunction) -> ChainEnsemble:
    """One AdaVol iteration (adaptive or fixed threshold)."""
    _require(cfg, "adavol", "adavol_fixed_c")
    p = cfg.activation.with_threshold(ens.threshold)
    grad = f.gradient(ens.positions)
    b = diffusion.drift(p, cfg.beta, ens.values, grad)
    h = diffusion.scalar_coefficient(p, ens.values)
    return _advance(ens, cfg, f, b, 2.0 * cfg.eta / cfg.beta * h,
                    adaptive=cfg.method == "adavol")


def langevin_step(ens: ChainEnsemble, cfg: SamplerConfig, f: ObjectiveFunction) -> ChainEnsemble:
    """One unadjusted Langevin iteration; the threshold is only tracked."""
    _require(cfg, "langevin")
    grad = f.gradient(ens.positions)
    ones = np.ones(len(ens.values))
    return _advance(ens, cfg, f, -grad, 2.0 * cfg.eta / cfg.beta * ones)


def landscape_mod_step(ens: ChainEnsemble, cfg: SamplerConfig, f: ObjectiveFunction) -> ChainEnsemble:
    """Landscape modification: Langevin drift, noise boosted above the threshold."""
    _require(cfg, "landscape_mod")
    grad = f.gradient(ens.positions)
    a = _landscape_scalar(ens, cfg)
    return _advance(ens, cfg, f, -grad, 2.0 * cfg.eta / cfg.beta * a)


def driftless_step(ens: ChainEnsemble, cfg: SamplerConfig, f: ObjectiveFunction) -> ChainEnsemble:
    """Pure diffusion with variance 2 eta (((F - c*)^+)^gamma + epsilon); no gradients."""
    _require(cfg, "driftless")
    a = _driftless_scalar(ens, cfg, f)
    return _advance(ens, cfg, f, np.zeros_like(ens.positions), 2.0 * cfg.eta * a)


def _landscape_scalar(ens, cfg):
    p = cfg.activation.with_threshold(ens.threshold)
    excess = np.maximum(ens.values - ens.threshold, 0.0)
    return diffusion.activation(p, excess) + cfg.epsilon


def _driftless_scalar(ens, cfg, f):
    target = f.known_optimum if f.known_optimum is not None else ens.threshold
    return np.maximum(ens.values - target, 0.0) ** cfg.gamma_exponent + cfg.epsilon


_STEPS = {
    "adavol": adavol_step,
    "adavol_fixed_c": adavol_step,
    "langevin": langevin_step,
    "landscape_mod": landscape_mod_step,
    "driftless": driftless_step,
}


def step(ens: ChainEnsemble, cfg: SamplerConfig, f: ObjectiveFunction) -> ChainEnsemble:
    """Dispatch to the step function of ``cfg.method``."""
    return _STEPS[cfg.method](ens, cfg, f)


def diffusion_scalar(ens: ChainEnsemble, cfg: SamplerConfig, f: ObjectiveFunction) -> np.ndarray:
    """The per-chain diffusion scalar a(x) at the ensemble's current state."""
    if cfg.method in ("adavol", "adavol_fixed_c"):
        return diffusion.scalar_coefficient(cfg.activation.with_threshold(ens.threshold), ens.values)
    if cfg.method == "langevin":
        return np.ones(len(ens.values))
    if cfg.method == "landscape_mod":
        return _landscape_scalar(ens, cfg)
    return _driftless_scalar(ens, cfg, f)


def _record(ens, cfg, f):
    a = diffusion_scalar(ens, cfg, f)
    return TrajectoryRecord(
        iteration=ens.iteration,
        min_objective=float(ens.values.min()),
        mean_objective=float(ens.values.mean()),
        threshold=float(ens.threshold),
        delta_hat=float(np.mean(a * a)),
        mean_position=ens.mean_position,
    )


def run(cfg: SamplerConfig, f: ObjectiveFunction, stride: int = 1,
        callback: Optional[Callable[[ChainEnsemble], None]] = None) -> RunResult:
    """Run ``cfg.iterations`` steps and record every ``stride``-th state.

    The final iteration is always recorded. ``callback`` sees every ensemble
    after it is produced and must not keep references to the noise stream.
    On a :class:`DivergenceError` the records gathered so far are attached to
    the exception.
    """
    if int(stride) != stride or stride < 1:
        raise ConfigError(f"stride must be a positive integer, got {stride!r}")
    ens = init_ensemble(cfg, f)
    if cfg.method == "adavol" and cfg.activation.theta > 0 and cfg.activation.lam > 0:
        _warn_step_size(cfg, f)
    step_fn = _STEPS[cfg.method]
    records = []
    for j in range(1, cfg.iterations + 1):
        try:
            ens = step_fn(ens, cfg, f)
        except DivergenceError as err:
            err.records = records
            err.ensemble = ens
            raise
        if callback is not None:
            callback(ens)
        if j % stride == 0 or j == cfg.iterations:
            records.append(_record(ens, cfg, f))
    return RunResult(records, ens)


def _warn_step_size(cfg, f):
    L = f.smoothness_L
    if L is None:
        return
    lam = cfg.activation.lam
    # smoothness branch of the admissible step, with delta_k at its floor of 1
    ceiling = 1.0 / ((lam + 2) ** 2 * L)
    if cfg.eta > ceiling:
        log.warning("eta=%g exceeds the provable step ceiling %.3g for lambda=%g, L=%g",
                    cfg.eta, ceiling, lam, L)
