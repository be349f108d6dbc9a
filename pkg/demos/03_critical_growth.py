"""One-dimensional growth: power law above θ = 1/4, √log t at θ = 1/4.

Run: python demos/03_critical_growth.py
"""

import numpy as np

from logdamp.analysis import NormKind, fit_power_law, fit_sqrt_log, norm_series, time_grid
from logdamp.spectral import make_state

times = time_grid(1e4, 1e8)

grow = norm_series(make_state(1, 0.3), NormKind.SOLUTION, times)
print(f"theta=0.3: power exponent {fit_power_law(grow).exponent:+.4f} (predicted {1 / 6:+.4f})")

crit = norm_series(make_state(1, 0.25), NormKind.SOLUTION, times)
logfit = fit_sqrt_log(crit)
print(f"theta=0.25: |u|^2 / log t = {logfit.details['ratio_first']:.4f} at 1e4, "
      f"{logfit.details['ratio_last']:.4f} at 1e8")
print(f"            power fit exponent {fit_power_law(crit).exponent:+.4f}")
# a constant offset c in |u|^2 = A log t + c also reads as a small positive power
print("            |u|^2 by decade:", np.array2string(crit.values[::4], precision=3))
