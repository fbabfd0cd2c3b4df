"""
The admissible step and the one-step KL contraction
===================================================

The step ceiling is the larger of delta/((lam+2)^2 L) and
alpha sqrt(gamma) / (4 beta (lam+2)^{3/2} L^2). With the step at a tenth of
it, the exact Gaussian law of ULA on x^2/2 satisfies
H(rho_{k+1}) <= exp(-alpha eta / beta) H(rho_k) + 8 eta^2 n L^2 at every k.
Far outside the ceiling the inequality breaks.
"""

from adavol.diagnostics import (
    TheoryConstants,
    corollary_error_band,
    step_size_bound,
    step_size_bound_branches,
    theorem_step_inequality_check,
)
from adavol.objective import Quadratic
from adavol.samplers import SamplerConfig

for lam, beta in ((0, 1), (0, 1e4), (1e4, 1e4)):
    tc = TheoryConstants(alpha=1.0, L=1.0, beta=beta, lam=lam)
    smooth, lsi = step_size_bound_branches(tc)
    print(f"lam={lam:g} beta={beta:g}: smoothness {smooth:.3g}, lsi {lsi:.3g}, bound {step_size_bound(tc):.3g}")

tc = TheoryConstants.for_quadratic(L=1.0, beta=1.0)
for scale in (0.1, 1.0, 10.0):
    eta = scale * step_size_bound(tc)
    cfg = SamplerConfig(eta=eta, beta=1.0, iterations=0, chains=1, method="langevin", init_mean=(3.0,))
    probes = theorem_step_inequality_check(Quadratic(1), cfg, range(1, 501))
    held = sum(p.passed for p in probes)
    print(f"eta = {scale:g} x bound = {eta:.4g}: inequality holds at {held}/500 steps; "
          f"KL floor {corollary_error_band(tc, eta):.3g}")
