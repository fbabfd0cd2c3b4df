"""Numerical checks of the convergence theory on small, closed-form cases.

Most checks are one-dimensional. Gibbs densities live on uniform grids wide
enough that e^{-beta F} is negligible at both ends. Sampled laws are compared
through histograms. The Gaussian channel (ULA on a quadratic) is handled in
closed form, because its iterates stay exactly Gaussian.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .diffusion import BOUNDARY_MASS_TOL, detailed_balance_residual, drift, gibbs_on_grid
from .errors import DomainError, UnsupportedObjectiveError
from .objective import ObjectiveFunction, Quadratic
from .samplers import SamplerConfig, TrajectoryRecord, init_ensemble, run

__all__ = [
    "TheoryConstants",
    "HistogramDensity",
    "TheoremProbe",
    "DeltaSummary",
    "gibbs_grid",
    "gibbs_density_1d",
    "gibbs_bin_masses",
    "kl_vs_gibbs",
    "total_variation",
    "basin_mass",
    "gaussian_kl",
    "ula_gaussian_law",
    "ou_stationary_variance",
    "step_size_bound",
    "step_size_bound_branches",
    "theorem_step_inequality_check",
    "corollary_error_band",
    "lemma_a1_check",
    "delta_series",
    "ula_snapshots",
    "ula_tail_moments",
    "balance_refinement",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TheoryConstants:
    """LSI constant ``alpha``, smoothness ``L``, inverse temperature and gain."""

    alpha: float
    L: float
    beta: float
    lam: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "L", "beta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not self.lam >= 0:
            raise ValueError("lam must be >= 0")

    @classmethod
    def for_quadratic(cls, L: float, beta: float, lam: float = 0.0) -> "TheoryConstants":
        """Exact constants for F = (L/2)|x|^2, whose Gibbs law N(0, I/(beta L)) has alpha = beta L."""
        return cls(alpha=beta * L, L=L, beta=beta, lam=lam)


@dataclass(frozen=True)
class HistogramDensity:
    """Bin masses on ``bins`` equal-width bins covering [lo, hi]."""

    lo: float
    hi: float
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        object.__setattr__(self, "mass", mass)
        if not self.hi > self.lo:
            raise ValueError("hi must exceed lo")
        if mass.ndim != 1 or mass.size < 1:
            raise ValueError("mass must be a non-empty 1-D array")
        if np.any(mass < 0) or abs(mass.sum() - 1.0) > 1e-12:
            raise ValueError("mass entries must be >= 0 and sum to 1")

    @property
    def bins(self) -> int:
        return self.mass.size

    @property
    def bin_width(self) -> float:
        return (self.hi - self.lo) / self.bins

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.bins + 1)

    @classmethod
    def from_samples(cls, samples, bins: int = 200, lo: Optional[float] = None,
                     hi: Optional[float] = None) -> "HistogramDensity":
        """Histogram of 1-D samples; the range defaults to the sample range."""
        samples = np.asarray(samples, dtype=float).ravel()
        if samples.size == 0:
            raise ValueError("need at least one sample")
        lo = samples.min() if lo is None else lo
        hi = samples.max() if hi is None else hi
        if hi <= lo:
            hi = lo + 1e-9 * max(1.0, abs(lo))
        counts, _ = np.histogram(samples, bins=bins, range=(lo, hi))
        if counts.sum() != samples.size:
            raise DomainError("samples fall outside the requested histogram range")
        mass = counts / counts.sum()
        return cls(float(lo), float(hi), mass / mass.sum())


@dataclass(frozen=True)
class TheoremProbe:
    k: int
    lhs: float
    rhs: float
    passed: bool


@dataclass(frozen=True)
class DeltaSummary:
    values: np.ndarray
    minimum: Optional[float]
    all_at_least_one: bool
    head_mean: Optional[float]
    tail_mean: Optional[float]

    @property
    def count(self) -> int:
        return self.values.size


def _minimiser_1d(f, lo=-50.0, hi=50.0):
    xs = np.linspace(lo, hi, 20001)
    return float(xs[np.argmin(f.value(xs[:, None]))])


def gibbs_grid(f: ObjectiveFunction, beta: float, spacing: float = 1e-3,
               anchor: Optional[float] = None, lo: Optional[float] = None,
               hi: Optional[float] = None) -> np.ndarray:
    """A uniform grid around the Gibbs mass whose ends carry negligible density.

    The grid is widened outward from a coarse minimiser until
    e^{-beta (F - F_min)} < 1e-12 at both ends, and always contains [lo, hi]
    when given. Grid points sit on ``anchor + spacing * k`` (anchor defaults
    to the minimiser).
    """
    if f.dimension != 1:
        raise ValueError("gibbs_grid needs a one-dimensional objective")
    if not spacing > 0:
        raise ValueError("spacing must be > 0")
    center = _minimiser_1d(f)
    anchor = center if anchor is None else anchor
    fmin = f.value([center])
    half = 1.0
    for _ in range(60):
        left, right = center - half, center + half
        ends = beta * (f.value(np.array([[left], [right]])) - fmin)
        if np.all(ends > -math.log(BOUNDARY_MASS_TOL) + 2.0):
            break
        half *= 1.5
    else:
        raise DomainError("could not find a grid with negligible boundary density")
    left = min(left, lo) if lo is not None else left
    right = max(right, hi) if hi is not None else right
    k_left = math.floor((left - anchor) / spacing)
    k_right = math.ceil((right - anchor) / spacing)
    return anchor + spacing * np.arange(k_left, k_right + 1)


def gibbs_density_1d(f: ObjectiveFunction, beta: float, grid) -> np.ndarray:
    """e^{-beta F} normalised by trapezoid quadrature on ``grid``."""
    return gibbs_on_grid(f, beta, grid)


def gibbs_bin_masses(f: ObjectiveFunction, beta: float, edges, subdivisions: int = 50):
    """Gibbs probability of each bin [edges[i], edges[i+1]] by quadrature.

    Returns ``(masses, outside)`` where ``outside`` is the Gibbs mass not
    covered by the bins.
    """
    edges = np.asarray(edges, dtype=float)
    width = edges[1] - edges[0]
    if not np.allclose(np.diff(edges), width, rtol=1e-9, atol=0):
        raise ValueError("bins must have equal width")
    spacing = width / subdivisions
    half = spacing / 2
    grid = gibbs_grid(f, beta, half, anchor=edges[0], lo=edges[0], hi=edges[-1])
    # Simpson panels of width ``spacing`` must start on edges[0]
    if int(round((edges[0] - grid[0]) / half)) % 2:
        grid = grid[1:]
    if (grid.size - 1) % 2:
        grid = grid[:-1]
    nu = gibbs_on_grid(f, beta, grid)
    # per-panel areas; differencing a CDF would cancel in the tails
    panels = spacing / 6 * (nu[:-2:2] + 4 * nu[1::2] + nu[2::2])
    panels /= panels.sum()
    idx = np.rint((edges - grid[0]) / spacing).astype(int)
    masses = np.add.reduceat(panels, idx[:-1])
    # reduceat runs the last group to the end of the array; trim the upper tail
    masses[-1] = panels[idx[-2]:idx[-1]].sum()
    outside = max(0.0, panels[:idx[0]].sum() + panels[idx[-1]:].sum())
    return masses, outside


def kl_vs_gibbs(hist: HistogramDensity, f: ObjectiveFunction, beta: float) -> float:
    """KL(histogram || Gibbs) = sum_b p_b log(p_b / q_b), q_b the Gibbs bin mass."""
    q, _ = gibbs_bin_masses(f, beta, hist.edges)
    p = hist.mass
    occupied = p > 0
    if np.any(q[occupied] <= 0):
        raise DomainError("histogram has mass where the Gibbs density underflows")
    value = float(np.sum(p[occupied] * np.log(p[occupied] / q[occupied])))
    if value < 0:
        if value > -1e-9:
            log.warning("clamping slightly negative KL estimate %.3g to 0", value)
            return 0.0
        raise DomainError(f"KL estimate {value:.3g} is negative beyond rounding")
    return value


def total_variation(hist: HistogramDensity, f: ObjectiveFunction, beta: float) -> float:
    """Total variation between bin masses and Gibbs masses, counting Gibbs mass off the bins."""
    q, outside = gibbs_bin_masses(f, beta, hist.edges)
    return 0.5 * (float(np.abs(hist.mass - q).sum()) + outside)


def basin_mass(f: ObjectiveFunction, beta: float, grid, split: float) -> float:
    """Gibbs probability of {x < split}."""
    grid = np.asarray(grid, dtype=float)
    nu = gibbs_on_grid(f, beta, grid)
    cdf = cumulative_trapezoid(nu, grid, initial=0.0)
    return float(np.interp(split, grid, cdf))


def gaussian_kl(mean, var, target_var, target_mean=0.0):
    """KL(N(mean, var) || N(target_mean, target_var)) in one dimension."""
    mean, var = np.asarray(mean, dtype=float), np.asarray(var, dtype=float)
    r = var / target_var
    return 0.5 * (r + (mean - target_mean) ** 2 / target_var - 1.0 - np.log(r))


def ula_gaussian_law(mean0: float, var0: float, eta: float, beta: float, L: float, steps: int):
    """Exact means and variances of ULA on F = (L/2) x^2 for iterations 0..steps.

    Each step is the AR(1) map x -> (1 - eta L) x + sqrt(2 eta / beta) z.
    """
    means = np.empty(steps + 1)
    variances = np.empty(steps + 1)
    means[0], variances[0] = mean0, var0
    rho = 1.0 - eta * L
    for k in range(steps):
        means[k + 1] = rho * means[k]
        variances[k + 1] = rho * rho * variances[k] + 2.0 * eta / beta
    return means, variances


def ou_stationary_variance(eta: float, beta: float, L: float) -> float:
    """Fixed point of v = (1 - eta L)^2 v + 2 eta / beta."""
    return (2.0 * eta / beta) / (1.0 - (1.0 - eta * L) ** 2)


def step_size_bound_branches(tc: TheoryConstants, gamma_k: float = 1.0,
                             delta_k: float = 1.0) -> Tuple[float, float]:
    """The smoothness branch delta/((lam+2)^2 L) and the LSI branch
    alpha sqrt(gamma) / (4 beta (lam+2)^{3/2} L^2)."""
    if not (gamma_k >= 1 and delta_k >= 1):
        raise ValueError("gamma_k and delta_k are bounded below by 1")
    lam2 = tc.lam + 2.0
    smooth = delta_k / (lam2 ** 2 * tc.L)
    lsi = tc.alpha * math.sqrt(gamma_k) / (4.0 * tc.beta * lam2 ** 1.5 * tc.L ** 2)
    return smooth, lsi


def step_size_bound(tc: TheoryConstants, gamma_k: float = 1.0, delta_k: float = 1.0) -> float:
    """Admissible step ceiling: the larger of the two branches."""
    return max(step_size_bound_branches(tc, gamma_k, delta_k))


def _quadratic_1d(f):
    if not isinstance(f, Quadratic) or f.dimension != 1:
        raise UnsupportedObjectiveError("the closed-form channel needs a 1-D Quadratic objective")
    return f.L


def theorem_step_inequality_check(f: ObjectiveFunction, cfg: SamplerConfig,
                                  probes: Iterable[int]) -> List[TheoremProbe]:
    """One-step KL contraction H(rho_{k+1}) <= e^{-alpha eta/beta} H(rho_k) + 8 eta^2 n L^2.

    Evaluated exactly on the Gaussian law of ULA for a 1-D quadratic started from
    N(init_mean, init_cov_scale), with gamma_k = delta_k = 1 and alpha = beta L.
    Informational: outside the step-size hypothesis failures are expected.
    """
    L = _quadratic_1d(f)
    if cfg.method != "langevin":
        raise UnsupportedObjectiveError("the closed-form channel models the langevin method only")
    probes = sorted(int(k) for k in probes)
    if not probes:
        return []
    if probes[0] < 0:
        raise ValueError("probe iterations must be >= 0")
    tc = TheoryConstants.for_quadratic(L, cfg.beta)
    target = 1.0 / (cfg.beta * L)
    means, variances = ula_gaussian_law(cfg.init_mean[0], cfg.init_cov_scale, cfg.eta, cfg.beta, L,
                                        probes[-1] + 1)
    kl = gaussian_kl(means, variances, target)
    contraction = math.exp(-tc.alpha * cfg.eta / cfg.beta)
    slack = 8.0 * cfg.eta ** 2 * f.dimension * L ** 2
    out = []
    for k in probes:
        lhs = float(kl[k + 1])
        rhs = contraction * float(kl[k]) + slack
        out.append(TheoremProbe(k, lhs, rhs, lhs <= rhs))
    return out


def corollary_error_band(tc: TheoryConstants, eta: float, n: int = 1, delta: float = 1.0) -> float:
    """Asymptotic KL floor 8 delta eta^2 n L^2 / (1 - e^{-alpha eta / beta})."""
    return 8.0 * delta * eta ** 2 * n * tc.L ** 2 / (1.0 - math.exp(-tc.alpha * eta / tc.beta))


def lemma_a1_check(f: ObjectiveFunction, beta: float, L: float, grid) -> Tuple[float, float]:
    """Quadrature value of E_nu |F'|^2 and the bound L n / beta."""
    if f.dimension != 1:
        raise ValueError("lemma_a1_check needs a one-dimensional objective")
    if not L > 0:
        raise ValueError("L must be > 0")
    grid = np.asarray(grid, dtype=float)
    nu = gibbs_on_grid(f, beta, grid)
    g = f.gradient(grid[:, None])[:, 0]
    return float(trapezoid(g * g * nu, grid)), L * f.dimension / beta


def delta_series(records: Sequence[TrajectoryRecord], fraction: float = 0.1) -> DeltaSummary:
    """The delta-hat series with its minimum and head/tail averages."""
    values = np.array([r.delta_hat for r in records], dtype=float)
    if values.size == 0:
        return DeltaSummary(values, None, True, None, None)
    width = max(1, int(round(fraction * values.size)))
    return DeltaSummary(
        values=values,
        minimum=float(values.min()),
        all_at_least_one=bool(np.all(values >= 1.0)),
        head_mean=float(values[:width].mean()),
        tail_mean=float(values[-width:].mean()),
    )


def ula_snapshots(cfg: SamplerConfig, f: ObjectiveFunction, probes: Iterable[int]) -> Dict[int, np.ndarray]:
    """Chain positions at the requested iterations (iteration 0 is the initial draw)."""
    wanted = set(int(k) for k in probes)
    if not wanted:
        return {}
    cfg = cfg.replace(iterations=max(wanted))
    snaps = {}
    if 0 in wanted:
        snaps[0] = init_ensemble(cfg, f).positions.copy()

    def grab(ens):
        if ens.iteration in wanted:
            snaps[ens.iteration] = ens.positions.copy()

    run(cfg, f, stride=max(1, cfg.iterations), callback=grab)
    return snaps


def ula_tail_moments(cfg: SamplerConfig, f: ObjectiveFunction, burn_in: int,
                     thin: int = 1) -> Tuple[np.ndarray, np.ndarray, int]:
    """Mean and variance of positions pooled over chains and iterations after ``burn_in``."""
    if not 0 <= burn_in < cfg.iterations:
        raise ValueError("burn_in must lie in [0, iterations)")
    n = f.dimension
    acc = {"s1": np.zeros(n), "s2": np.zeros(n), "count": 0}

    def accumulate(ens):
        if ens.iteration > burn_in and ens.iteration % thin == 0:
            acc["s1"] += ens.positions.sum(axis=0)
            acc["s2"] += (ens.positions ** 2).sum(axis=0)
            acc["count"] += ens.positions.shape[0]

    run(cfg, f, stride=cfg.iterations, callback=accumulate)
    count = acc["count"]
    mean = acc["s1"] / count
    var = acc["s2"] / count - mean ** 2
    return mean, var, count


def balance_refinement(p, f: ObjectiveFunction, beta: float, spacing: float = 1e-3) -> dict:
    """Detailed-balance residual at ``spacing`` and at twice that spacing.

    Both grids share their end points. ``ratio`` is the coarse-to-fine ratio of
    sup-norms (4 for second-order convergence). ``ratio_off_threshold`` repeats
    the ratio after discarding points within a few coarse cells of the level
    set {F = c}, where h has a jump in its second derivative whenever
    lam * theta > 0.
    """
    coarse = gibbs_grid(f, beta, 2 * spacing)
    lo, hi = coarse[0], coarse[-1]
    cells = int(round((hi - lo) / (2 * spacing)))
    grids = [np.linspace(lo, hi, cells + 1), np.linspace(lo, hi, 2 * cells + 1)]
    sup, sup_off, rel = [], [], None
    for grid in grids:
        r = detailed_balance_residual(p, f, beta, grid)
        pts = grid[:, None]
        fval = f.value(pts)
        grad = f.gradient(pts)
        flux = np.abs(drift(p, beta, fval, grad)[:, 0] * gibbs_on_grid(f, beta, grid))
        # a point is near the kink if F could cross c within ~4 coarse cells
        near = np.abs(fval - p.c) <= 8 * spacing * np.abs(grad[:, 0]) + 1e-300
        sup.append(float(np.abs(r).max()))
        sup_off.append(float(np.abs(r[~near]).max()) if np.any(~near) else 0.0)
        rel = float(np.abs(r).max() / flux.max())
    return {
        "relative_residual": rel,
        "sup_coarse": sup[0],
        "sup_fine": sup[1],
        "ratio": sup[0] / sup[1] if sup[1] > 0 else math.inf,
        "ratio_off_threshold": sup_off[0] / sup_off[1] if sup_off[1] > 0 else math.inf,
    }
