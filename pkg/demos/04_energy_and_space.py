"""Energy balance and the solution in physical space (n=1).

Run: python demos/04_energy_and_space.py
"""

import numpy as np

from logdamp.analysis import energy_balance, reconstruct_1d
from logdamp.spectral import make_state

state = make_state(1, 0.2)
for T in (1.0, 10.0, 100.0):
    bal = energy_balance(state, T)
    print(f"T={T:6.1f}: E(T)={bal.energy_T:.6f} dissipated={bal.dissipated:.6f} "
          f"E(0)={bal.energy_0:.6f} residual={bal.residual:+.1e}")

xs = np.linspace(0.0, 40.0, 9)
for t in (1.0, 10.0, 100.0):
    u = reconstruct_1d(state, t, xs)
    print(f"t={t:6.1f}: u(t, x) at x=0,5,..,40:", np.array2string(u, precision=4))
