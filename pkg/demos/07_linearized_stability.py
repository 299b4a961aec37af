"""Bosonized-spin dynamics and the stability boundary.

At weak coupling the linearized 4N x 4N system has a purely imaginary
spectrum and tracks the exact magnetization closely; past the instability
threshold some eigenvalues acquire positive real parts and the
approximation collapses while the exact dynamics merely gets strongly
correlated.  The same classification separates the two regimes measured on
the sixteen-ion chain.
"""

import numpy as np

from rhlab import (BasisSpec, all_up_vacuum, build_A, build_hamiltonian,
                   evolve, sigma_z, sigma_z_hp_trajectory, stability,
                   suggest_cutoffs)
from rhlab.commands import dynamics_model
from rhlab.units import khz

t_grid = np.linspace(0.0, 400e-6, 41)
model4 = dynamics_model(4)

for g_khz in (1.0, 6.0):
    model = model4.with_coupling(khz(g_khz))
    report = stability(build_A(model))
    cutoffs = tuple(int(c) for c in
                    np.maximum(suggest_cutoffs(model, 1e-4).cutoffs, 2))
    basis = BasisSpec(4, "collective", cutoffs, "even")
    result = evolve(all_up_vacuum(basis), build_hamiltonian(model, basis),
                    t_grid, observables={"sz0": lambda s: sigma_z(s, 0)})
    hp = sigma_z_hp_trajectory(build_A(model), t_grid)
    dev = np.abs(np.asarray(result["sz0"]) - hp[:, 0]).max()
    print(f"N=4, g = 2pi x {g_khz} kHz: stable = {report.stable}, "
          f"max Re(lambda) = {report.max_real_part:9.3g} /s, "
          f"max |HP - exact| = {dev:.3g}")

print()
model16 = dynamics_model(16)
for g_khz in (1.0, 6.0):
    report = stability(build_A(model16.with_coupling(khz(g_khz))))
    print(f"N=16, g = 2pi x {g_khz} kHz: "
          f"{'stable oscillation' if report.stable else 'exponential growth'}")

# bracket the threshold for the four-ion chain
lo, hi = khz(1.0), khz(6.0)
for _ in range(30):
    mid = 0.5 * (lo + hi)
    if stability(build_A(model4.with_coupling(mid))).stable:
        lo = mid
    else:
        hi = mid
print(f"\nN=4 instability threshold: g = 2pi x "
      f"{0.5 * (lo + hi) / (2 * np.pi * 1e3):.3f} kHz")
