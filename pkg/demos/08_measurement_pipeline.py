"""Extracting spin correlations the way the camera does.

The sigma_x basis is unreachable directly: the analyzer rotates
sigma_phi = sigma_x cos(phi) + sigma_y sin(phi) onto the measurement axis,
scans phi, and fits C0 cos^2(phi + phi0) + C.  Readout crosstalk rescales
the amplitude by (1 - eps_c) and adds a constant eps_c; independent flips
rescale by (1 - 4 eps_0) without a shift.  Finite shot counts just add
noise around the same curve.
"""

import math

import numpy as np

from rhlab import (BasisSpec, DetectionErrorModel, PhaseScan,
                   all_up_vacuum, apply_detection_errors, build_hamiltonian,
                   evolve, fit_correlation, phase_scan,
                   spin_outcome_probabilities)
from rhlab.commands import dynamics_model
from rhlab.units import khz

# prepare a correlated state by evolving the two-ion chain
model = dynamics_model(2).with_coupling(khz(7.0))
basis = BasisSpec(2, "local", 10, "even")
result = evolve(all_up_vacuum(basis), build_hamiltonian(model, basis),
                np.linspace(0.0, 250e-6, 2))
state = result.final_state

phases = np.linspace(0.0, math.pi, 12)
scan = phase_scan(state, 0, 1, phases)
fit = fit_correlation(scan)
print(f"ideal scan:    amplitude {fit.amplitude:.4f}, "
      f"offset {fit.phase_offset:+.3f} rad, constant {fit.constant:+.4f}")

errors = DetectionErrorModel(crosstalk=0.05, flip=0.02)
rng = np.random.default_rng(1)
for shots in (0, 500):
    measured = []
    for phi in phases:
        p = spin_outcome_probabilities(state, 0, 1, phi)
        p = apply_detection_errors(p, errors)
        if shots:
            p = rng.multinomial(shots, p) / shots
        measured.append(p[0] + p[3] - p[1] - p[2])
    noisy = fit_correlation(PhaseScan(phases, np.clip(measured, -1, 1),
                                      (0, 1)))
    label = f"{shots} shots" if shots else "exact probabilities"
    print(f"with errors ({label}): amplitude {noisy.amplitude:.4f}, "
          f"constant {noisy.constant:+.4f}")

print(f"\nexpected amplitude reduction: "
      f"(1 - eps_c)(1 - 4 eps_0) = "
      f"{(1 - errors.crosstalk) * (1 - 4 * errors.flip):.3f}")
