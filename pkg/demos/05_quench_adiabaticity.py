"""Slow ramp across the critical point and back.

The coupling follows (1 - exp(-t/tau)) g_max up to 5 tau and is then
mirrored back to zero.  If the evolution were perfectly adiabatic the
average magnetization would retrace itself and end at -1; the residual
offset measures the excitation created near the gap closing, and it grows
when the ramp is made faster.
"""

from rhlab import (BasisSpec, QuenchSchedule, adiabaticity_report,
                   critical_coupling, phase_transition_model,
                   rh_mode_spectrum, run_quench)
from rhlab.units import khz

model = phase_transition_model(2, khz(2.0))
gc = critical_coupling(model.spin_freq, rh_mode_spectrum(model).freqs[0])
basis = BasisSpec(2, "local", 12, "even")

for tau_ms in (1.0, 0.5):
    schedule = QuenchSchedule("reverse_appended", tau=tau_ms * 1e-3,
                              g_max=1.3 * gc)
    result = run_quench(model, schedule, basis)
    sz = result.mean_sigma_z
    print(f"tau = {tau_ms} ms: peak <sigma_z> = {sz.max():.3f}, "
          f"final = {sz[-1]:.6f} (ideal -1)")

# how closely does the state track the instantaneous ground state?
schedule = QuenchSchedule("exponential_ramp", tau=0.5e-3, g_max=1.3 * gc)
report = adiabaticity_report(model, schedule, basis, n_samples=11)
print("\n   t (ms)   g/gc    fidelity to instantaneous ground state")
for t, g, f in zip(report.times, report.couplings, report.fidelities):
    print(f"   {t * 1e3:5.2f}   {g / gc:5.2f}    {f:.6f}")
