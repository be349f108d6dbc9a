"""Thresholds and characteristic roots across the three frequency zones.

Run: python demos/01_frequency_zones.py
"""

import numpy as np

from logdamp.model import ModelParams, char_roots, compute_thresholds

for theta in (0.1, 0.25, 0.4):
    p = ModelParams(1, theta)
    th = compute_thresholds(p)
    print(f"theta={theta}: beta={th.beta:.3e} eta^3={th.eta_cubed:.3e} eta={th.eta:.4f} delta={th.delta:.4f}")

# below delta both roots are real; the slow one behaves like -r^(2-2θ)
p = ModelParams(1, 0.25)
d = compute_thresholds(p).delta
print("\n      r      zone        lambda+          lambda-")
for r in np.geomspace(1e-6, 10.0, 8):
    cr = char_roots(float(r), p)
    if cr.lambda_plus is not None:
        print(f"{r:9.2e}  {cr.zone.value:10s} {cr.lambda_plus:14.6e} {cr.lambda_minus:14.6e}")
    else:
        print(f"{r:9.2e}  {cr.zone.value:10s} {-cr.a:14.6e} ± {cr.b:.6e} i")
cr = char_roots(d, p)
print(f"at delta: double root {cr.lambda_plus:.6e}")
