"""Self-convergence study.

Compares the state at t = 1 for a ladder of step sizes against a run with a
much smaller step. Halving h should cut the error by four.
"""

import math

from spinlattice.experiment import ExperimentConfig, converge

config = ExperimentConfig(t_end=1.0)
res = converge(config, [2.0**-k for k in range(4, 11)], 2.0**-12)

prev = None
for h, err in zip(res.h, res.err):
    ratio = f"{prev / err:6.2f}" if prev else "      "
    print(f"h = 2^{round(math.log2(h)):>3}  err = {err:.3e}  ratio {ratio}")
    prev = err
print(f"log-log slope: {res.slope:.3f}")
