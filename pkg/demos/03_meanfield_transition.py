"""Mean-field bifurcation of the soft collective mode.

Below g_c = sqrt(w0 d0)/2 the only self-consistent solution has zero mode
amplitude; above it the amplitude grows like sqrt(g - g_c) and the spins
tilt toward the x axis.
"""

import numpy as np

from rhlab import (critical_coupling, other_mode_amplitudes,
                   phase_transition_model, rh_mode_spectrum, solve_b0)
from rhlab.units import from_angular, khz

model = phase_transition_model(4, khz(2.0))
spectrum = rh_mode_spectrum(model)
d0 = spectrum.freqs[0]
gc = critical_coupling(model.spin_freq, d0)
print(f"soft mode 2pi x {from_angular(d0):.3f} kHz, spin frequency "
      f"2pi x {from_angular(model.spin_freq):.2f} kHz")
print(f"mean-field critical coupling: 2pi x {from_angular(gc):.3f} kHz\n")

print("   g/gc      <b0>    <sigma_x> per site")
for x in (0.5, 0.9, 1.0, 1.05, 1.2, 1.5, 2.0):
    sol = solve_b0(x * gc, model.spin_freq, d0, spectrum.vectors[:, 0])
    print(f"  {x:5.2f}  {sol.b0_amplitude:8.4f}   "
          f"{np.round(sol.spin_x, 3)}  [{sol.branch}]")

sol = solve_b0(1.5 * gc, model.spin_freq, d0, spectrum.vectors[:, 0])
amps = other_mode_amplitudes(sol, sol.coupling, model.spin_freq, spectrum)
print("\nat 1.5 gc the higher modes acquire amplitudes too:")
print(" ", np.round(amps, 4), "(soft-mode entry reproduces <b0>)")
