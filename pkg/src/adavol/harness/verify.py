"""Diagnostic suites with a machine-readable pass/fail report.

Each suite returns a list of :class:`Check` rows carrying the measured value,
the tolerance it was held to and the verdict. ``run_suites`` collects them
into a JSON-serialisable report whose ``passed`` flag is true only when every
check passes.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List

import numpy as np

from ..diagnostics import (
    HistogramDensity,
    TheoryConstants,
    balance_refinement,
    basin_mass,
    gaussian_kl,
    gibbs_grid,
    kl_vs_gibbs,
    lemma_a1_check,
    step_size_bound,
    theorem_step_inequality_check,
    total_variation,
    ula_gaussian_law,
    ula_snapshots,
)
from ..diffusion import ActivationParams
from ..objective import DoubleWell, FunctionObjective, Quadratic, ShiftedRastrigin
from ..samplers import SamplerConfig

__all__ = ["Check", "SUITES", "run_suites", "balance_cases", "lemma_corpus", "sanitize"]

BALANCE_RATIO = 3.5
BALANCE_RELATIVE = 1e-3
LEMMA_EQUALITY_TOL = 1e-8


@dataclass
class Check:
    suite: str
    name: str
    measured: float
    tolerance: float
    comparison: str
    passed: bool
    details: Dict[str, float] = field(default_factory=dict)


def _check(suite, name, measured, tolerance, comparison, details=None) -> Check:
    ops = {"<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
           ">": lambda a, b: a > b, ">=": lambda a, b: a >= b}
    ok = bool(np.isfinite(measured) and ops[comparison](measured, tolerance))
    return Check(suite, name, float(measured), float(tolerance), comparison, ok, details or {})


def balance_cases():
    """(label, objective, activation, beta) for the detailed-balance matrix."""
    cases = []
    for fname, f in (("quadratic", Quadratic(1)), ("double_well", DoubleWell())):
        for lam in (0.0, 1.0, 10.0):
            for beta in (1.0, 5.0):
                p = ActivationParams(lam=lam, theta=1.0, c=0.5)
                cases.append((f"{fname} lam={lam:g} beta={beta:g}", f, p, beta))
    return cases


def suite_balance() -> List[Check]:
    out = []
    for label, f, p, beta in balance_cases():
        r = balance_refinement(p, f, beta, spacing=1e-3)
        details = {"sup_coarse": r["sup_coarse"], "sup_fine": r["sup_fine"],
                   "ratio_off_threshold": r["ratio_off_threshold"]}
        out.append(_check("balance", f"{label} refinement ratio", r["ratio"], BALANCE_RATIO, ">=", details))
        out.append(_check("balance", f"{label} relative residual", r["relative_residual"],
                          BALANCE_RELATIVE, "<"))
    return out


def lemma_corpus():
    """(label, objective, L) for every corpus function with a global smoothness constant."""
    wavy = FunctionObjective(
        lambda x: 0.5 * x[..., 0] ** 2 + 0.1 * np.cos(x[..., 0]),
        1,
        grad=lambda x: (x[..., 0] - 0.1 * np.sin(x[..., 0]))[..., None],
        smoothness_L=1.1,
        name="wavy_quadratic",
    )
    rastrigin = ShiftedRastrigin(dimension=1)
    return [
        ("quadratic L=1", Quadratic(1, L=1.0), 1.0),
        ("quadratic L=2.5", Quadratic(1, L=2.5), 2.5),
        ("wavy quadratic", wavy, 1.1),
        ("rastrigin 1-D", rastrigin, rastrigin.smoothness_L),
    ]


def suite_lemma() -> List[Check]:
    out = []
    for label, f, L in lemma_corpus():
        for beta in (1.0, 5.0):
            lhs, bound = lemma_a1_check(f, beta, L, gibbs_grid(f, beta, 1e-3))
            if isinstance(f, Quadratic):
                out.append(_check("lemma", f"{label} beta={beta:g} equality", abs(lhs - bound) / bound,
                                  LEMMA_EQUALITY_TOL, "<=", {"lhs": lhs, "bound": bound}))
            else:
                out.append(_check("lemma", f"{label} beta={beta:g} bound", lhs - bound, 0.0, "<=",
                                  {"lhs": lhs, "bound": bound}))
    return out


def suite_theorem() -> List[Check]:
    tc = TheoryConstants(alpha=1.0, L=1.0, beta=1.0)
    eta = step_size_bound(tc) / 10
    cfg = SamplerConfig(eta=eta, beta=1.0, iterations=0, chains=1, method="langevin",
                        init_mean=(3.0,), init_cov_scale=1.0)
    probes = theorem_step_inequality_check(Quadratic(1), cfg, range(1, 501))
    failures = [p.k for p in probes if not p.passed]
    worst = max(p.lhs - p.rhs for p in probes)
    return [_check("theorem", "one-step KL inequality, k=1..500", worst, 0.0, "<=",
                   {"eta": eta, "failures": len(failures)})]


def suite_kl(chains: int = 10_000, seeds=(1, 2, 3)) -> List[Check]:
    f = Quadratic(1)
    probes = (20, 200, 2000)
    monotone = 0
    details = {}
    for seed in seeds:
        cfg = SamplerConfig(eta=1e-3, beta=1.0, iterations=max(probes), chains=chains, seed=seed,
                            method="langevin", init_mean=(5.0,), init_cov_scale=1.0)
        snaps = ula_snapshots(cfg, f, probes)
        kls = [kl_vs_gibbs(HistogramDensity.from_samples(snaps[k], bins=200), f, 1.0) for k in probes]
        monotone += all(a > b for a, b in zip(kls, kls[1:]))
        for k, v in zip(probes, kls):
            details[f"seed{seed}_k{k}"] = v
    means, variances = ula_gaussian_law(5.0, 1.0, 1e-3, 1.0, 1.0, max(probes))
    for k in probes:
        details[f"exact_k{k}"] = float(gaussian_kl(means[k], variances[k], 1.0))
    return [_check("kl", "histogram KL strictly decreasing (runs)", monotone, len(seeds) / 2, ">",
                   details)]


def suite_gibbs(chains: int = 1000, steps: int = 20_000, burn_in: int = 5000,
                thin: int = 500) -> List[Check]:
    f = DoubleWell(tilt=0.05)
    left, barrier, _ = f.minimizers()
    out = []
    for beta, target in ((50.0, 0.9), (100.0, 0.99)):
        mass = basin_mass(f, beta, gibbs_grid(f, beta, 1e-4), barrier)
        out.append(_check("gibbs", f"deeper-basin mass beta={beta:g}", mass, target, ">"))
    cfg = SamplerConfig(eta=1e-3, beta=50.0, iterations=steps, chains=chains, seed=11,
                        method="langevin", init_mean=(float(left),), init_cov_scale=0.01)
    # pool snapshots about one in-well relaxation time apart
    snaps = ula_snapshots(cfg, f, range(burn_in, steps + 1, thin))
    samples = np.concatenate([v.ravel() for v in snaps.values()])
    hist = HistogramDensity.from_samples(samples, bins=60)
    out.append(_check("gibbs", "ULA histogram total variation beta=50",
                      total_variation(hist, f, 50.0), 0.05, "<"))
    return out


SUITES: Dict[str, Callable[[], List[Check]]] = {
    "balance": suite_balance,
    "lemma": suite_lemma,
    "theorem": suite_theorem,
    "kl": suite_kl,
    "gibbs": suite_gibbs,
}


def run_suites(selector: str) -> dict:
    """Run one suite or ``all`` and return the report."""
    if selector != "all" and selector not in SUITES:
        raise KeyError(selector)
    names = list(SUITES) if selector == "all" else [selector]
    checks, timings = [], {}
    for name in names:
        start = time.perf_counter()
        checks += SUITES[name]()
        timings[name] = time.perf_counter() - start
    return {
        "suite": selector,
        "passed": all(c.passed for c in checks),
        "checks": [asdict(c) for c in checks],
        "seconds": timings,
    }


def sanitize(obj):
    """Replace non-finite floats so the report is strict JSON."""
    if isinstance(obj, dict):
        return {k: sanitize(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [sanitize(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj
