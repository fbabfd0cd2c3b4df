"""
What a known bound on the optimum buys
======================================

With the optimum value known to lie below c, the threshold can be fixed
instead of tracked. A fixed c = 10 keeps the volatility switched on until the
chains are within F < 10, so the early descent is at least as fast as the
adaptive run. A fixed c = 1 lets them settle lower.
"""

import sys

from adavol.harness import load_config, run_experiment

out = sys.argv[1] if len(sys.argv) > 1 else "figure2_out"
result = run_experiment(load_config("figure2", ["emit_svg=true", "record_stride=1"]), out)

print("iteration  " + "  ".join(f"{k:>12s}" for k in result.records))
for j in (1, 5, 10, 20, 23, 24, 25, 50, 100, 1000, 20000):
    row = [result.records[k][j - 1].mean_objective for k in result.records]
    print(f"{j:9d}  " + "  ".join(f"{v:12.4g}" for v in row))
