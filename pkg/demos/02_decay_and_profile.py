"""Decay of the solution and of its distance to the two-part profile.

Fits power laws to squared L² norms over t in [1e2, 1e6] for n=2, θ=0.2.

Run: python demos/02_decay_and_profile.py
"""

from logdamp.analysis import (
    NormKind,
    fit_power_law,
    norm_series,
    predicted_rho,
    solution_exponent,
    time_grid,
)
from logdamp.spectral import make_state

state = make_state(2, 0.2)
times = time_grid(1e2, 1e6)

fits = {}
for kind in (NormKind.SOLUTION, NormKind.PROFILE, NormKind.PROFILE_ERROR, NormKind.PHI1, NormKind.PHI2):
    fits[kind] = fit_power_law(norm_series(state, kind, times))
    print(f"{kind.value:14s} norm exponent {fits[kind].exponent:+.4f}")

print(f"\npredicted solution exponent {solution_exponent(2, 0.2):+.4f}")
print(f"remainder bound: error exponent <= {-predicted_rho(2, 0.2):+.4f}")
# the error decays much faster than the profile, so the profile is the leading term
