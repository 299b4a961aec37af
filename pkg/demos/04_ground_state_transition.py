"""Exact small-chain ground states across the transition.

Lanczos ground states in the even parity sector show the nearest-neighbour
correlation turning on at the coupling where the rescaled N=2 and N=4
curves cross, close to the mean-field critical point (the large-system
numerics put it at 1.03 g_c^mf).
"""

import numpy as np

from rhlab import (BasisSpec, build_hamiltonian, correlation,
                   critical_coupling, ground_state, phase_transition_model,
                   rescale_for_crossing, rh_mode_spectrum)
from rhlab.units import from_angular, khz

xs = np.array([0.8, 0.95, 1.0, 1.05, 1.1, 1.2, 1.4])
curves = {}
for n in (2, 4):
    model = phase_transition_model(n, khz(2.0))
    gc = critical_coupling(model.spin_freq, rh_mode_spectrum(model).freqs[0])
    ham = build_hamiltonian(model, BasisSpec(n, "local", 10, "even"))
    cs = []
    for x in xs:
        gs = ground_state(ham, g=x * gc)
        cs.append(abs(correlation(gs.state, n // 2 - 1, n // 2)))
    _, y = rescale_for_crossing(np.array(cs), n, xs * gc, gc)
    curves[n] = y
    print(f"N={n}: g_c^mf = 2pi x {from_angular(gc):.3f} kHz")

print("\n  g/gc    N^(1/4)|C|, N=2    N=4")
for i, x in enumerate(xs):
    print(f"  {x:4.2f}      {curves[2][i]:8.4f}     {curves[4][i]:8.4f}")

diff = curves[4] - curves[2]
for i in range(len(xs) - 1):
    if diff[i] * diff[i + 1] < 0:
        xc = xs[i] - diff[i] * (xs[i + 1] - xs[i]) / (diff[i + 1] - diff[i])
        print(f"\nrescaled curves cross at g = {xc:.3f} g_c^mf")
