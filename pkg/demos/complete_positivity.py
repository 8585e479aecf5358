"""Complete positivity, Kraus operators and capacity for a few familiar channels.

Run with ``python3 demos/complete_positivity.py``.
"""

import numpy as np

from qubitrecon import AffineChannel, certify_cp, kraus_from_affine, min_choi_eigenvalue, unital_capacity

channels = {
    "identity": AffineChannel.identity(),
    "depolarizing p=-1/3": AffineChannel(np.zeros(3), -np.eye(3) / 3),
    "depolarizing p=-0.34": AffineChannel(np.zeros(3), -0.34 * np.eye(3)),
    "transpose": AffineChannel(np.zeros(3), np.diag([1.0, -1.0, 1.0])),
    "amplitude damping g=0.3": AffineChannel((0, 0, 0.3), np.diag([np.sqrt(0.7), np.sqrt(0.7), 0.7])),
}

for name, ch in channels.items():
    cert = certify_cp(ch)
    print(f"{name:26s} CP={cert.is_cp!s:5s} min eig {min_choi_eigenvalue(ch):+.6f}")
    if cert.is_cp:
        ops = kraus_from_affine(ch)
        print(f"{'':26s} {len(ops)} Kraus operator(s)")
    if ch.is_unital and cert.is_cp:
        print(f"{'':26s} capacity {unital_capacity(ch):.6f} bits")
