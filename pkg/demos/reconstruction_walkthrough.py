"""Reconstruct a qubit channel from one, two and three measured states.

Run with ``python3 demos/reconstruction_walkthrough.py``.
"""

import numpy as np

from qubitrecon import AffineChannel, estimate, hierarchy_check

np.set_printoptions(precision=5, suppress=True)

# the unknown channel we pretend to probe
truth = AffineChannel((0.5, 0.0, 0.0), [[0.2, -0.1, 0.1], [0.2, 0.0, -0.3], [0.0, 0.3, 0.3]])
inputs = [(0.6, 0.0, 0.0), (0.4, 0.1, 0.8), (0.4, 0.3, 0.6)]
records = [(v, truth(v)) for v in inputs]

estimates = []
for n in range(len(records) + 1):
    rep = estimate(records[:n])
    estimates.append(rep.estimate)
    print(f"--- {n} record(s), branch {rep.strategy_branch.value}")
    print("t =", rep.estimate.t)
    print("E =\n", rep.estimate.E)
    print(f"fit residual {rep.fit_residual:.1e}, min Choi eigenvalue {rep.cp_certificate.min_choi_eigenvalue:.1e}")
    if rep.variables is not None:
        print("optimizer variables:", rep.variables.to_dict())

# each extra record should bring the estimate closer to the truth
res = hierarchy_check(estimates, truth, samples=200_000, seed=0)
for n, d in enumerate(res.distances):
    print(f"d(E_{n}, truth) = {d.mean:.4f} +- {d.std_error:.1e}")
print("strictly decreasing:", res.strictly_decreasing())
