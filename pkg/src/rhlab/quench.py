"""Slow coupling ramps across the transition and adiabaticity diagnostics."""

import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec
from .chain import RHModel, rh_mode_spectrum
from .dynamics import EvolutionResult, evolve
from .errors import NonEquilibriumModelError
from .ground import ground_state
from .operators import build_hamiltonian
from .states import all_down_vacuum, correlation, fidelity, mean_sigma_z

__all__ = [
    "QuenchSchedule",
    "g_at",
    "run_quench",
    "QuenchResult",
    "adiabaticity_report",
    "AdiabaticityReport",
    "magnetization_asymmetry",
    "rescale_for_crossing",
    "unscale_crossing",
]

EXPONENTIAL_RAMP = "exponential_ramp"
REVERSE_APPENDED = "reverse_appended"
CONSTANT = "constant"

#: forward ramp duration in units of tau when not given (g reaches 99.3%)
DEFAULT_RAMP_TAUS = 5.0
#: observable samples per ramp
DEFAULT_SAMPLES_PER_RAMP = 50
#: instantaneous-ground-state diagnostics are limited to this many ions
FIDELITY_ION_LIMIT = 4


@dataclass(frozen=True)
class QuenchSchedule:
    """Coupling schedule g(t).

    ``exponential_ramp``: g(t) = (1 - exp(-t/tau)) g_max on [0, t_total].
    ``reverse_appended``: the same ramp up to t_total/2, then mirrored so
    that g(t) = g(t_total - t) and the coupling returns to zero.
    ``constant``: g_max throughout.
    """

    shape: str
    tau: float
    g_max: float
    t_total: float | None = None

    def __post_init__(self):
        if self.shape not in (EXPONENTIAL_RAMP, REVERSE_APPENDED, CONSTANT):
            raise ValueError(f"unknown schedule shape {self.shape!r}")
        if self.shape != CONSTANT and self.tau <= 0:
            raise ValueError("ramp time constant must be positive")
        if self.g_max < 0:
            raise ValueError("g_max must be nonnegative")
        if self.t_total is None:
            ramp = DEFAULT_RAMP_TAUS * self.tau if self.shape != CONSTANT else 0.0
            total = 2 * ramp if self.shape == REVERSE_APPENDED else ramp
            object.__setattr__(self, "t_total", total)
        if self.shape != CONSTANT and self.t_total <= 0:
            raise ValueError("t_total must be positive")

    @property
    def time_constant(self):
        """Characteristic time used by the integrator's step control."""
        return self.tau if self.shape != CONSTANT else None

    def __call__(self, t):
        return g_at(self, t)


def g_at(schedule: QuenchSchedule, t):
    """Coupling strength at time t (clamped to the schedule's domain)."""
    if schedule.shape == CONSTANT:
        return schedule.g_max
    t = min(max(float(t), 0.0), schedule.t_total)
    if schedule.shape == REVERSE_APPENDED and t > 0.5 * schedule.t_total:
        t = schedule.t_total - t
    return (1.0 - math.exp(-t / schedule.tau)) * schedule.g_max


@dataclass
class QuenchResult:
    """Trajectory of the quench plus final-state correlations."""

    times: np.ndarray
    mean_sigma_z: np.ndarray
    correlations: np.ndarray           # C_ij grid at the final time
    evolution: EvolutionResult
    schedule: QuenchSchedule


def run_quench(model: RHModel, schedule: QuenchSchedule, basis: BasisSpec,
               samples_per_ramp=DEFAULT_SAMPLES_PER_RAMP,
               extra_observables=None, store_states=False,
               max_step=None) -> QuenchResult:
    """Drive the chain from the g=0 ground state through the schedule.

    The initial state is |down, 0>^N, which is the exact ground state at
    zero coupling; models whose collective mode frequencies are not all
    positive are refused, since the equilibrium transition is only defined
    there.
    """
    spectrum = rh_mode_spectrum(model)
    if np.any(spectrum.freqs <= 0):
        raise NonEquilibriumModelError(
            "quench studies require positive collective mode frequencies; "
            f"lowest is {spectrum.freqs[0]:.4g} rad/s")
    hamiltonian = build_hamiltonian(model, basis)
    psi0 = all_down_vacuum(basis)
    n_ramps = 2 if schedule.shape == REVERSE_APPENDED else 1
    t_grid = np.linspace(0.0, schedule.t_total,
                         n_ramps * samples_per_ramp + 1)
    observables = {"mean_sigma_z": mean_sigma_z}
    observables.update(extra_observables or {})
    result = evolve(psi0, hamiltonian, t_grid, g_schedule=schedule,
                    observables=observables, store_states=store_states,
                    max_step=max_step)
    n = model.n_ions
    c = np.zeros((n, n))
    final = result.final_state
    for i in range(n):
        for j in range(i + 1, n):
            c[i, j] = c[j, i] = correlation(final, i, j)
    return QuenchResult(times=result.times,
                        mean_sigma_z=result["mean_sigma_z"],
                        correlations=c, evolution=result, schedule=schedule)


@dataclass
class AdiabaticityReport:
    """Overlap with, and excitation energy above, the instantaneous ground
    state along a quench."""

    times: np.ndarray
    couplings: np.ndarray
    fidelities: np.ndarray
    excitation_energies: np.ndarray


def adiabaticity_report(model: RHModel, schedule: QuenchSchedule,
                        basis: BasisSpec, n_samples=21,
                        max_step=None) -> AdiabaticityReport:
    """Track how well the evolving state follows the instantaneous ground
    state.  Cost-guarded to small chains: each sample point solves a
    ground-state problem at the instantaneous coupling.
    """
    if model.n_ions > FIDELITY_ION_LIMIT:
        raise NonEquilibriumModelError(
            f"instantaneous-ground-state diagnostics are limited to "
            f"{FIDELITY_ION_LIMIT} ions; use magnetization_asymmetry on a "
            f"reverse_appended quench as the proxy for larger chains")
    spectrum = rh_mode_spectrum(model)
    if np.any(spectrum.freqs <= 0):
        raise NonEquilibriumModelError(
            "adiabaticity diagnostics require an equilibrium-mode model")
    hamiltonian = build_hamiltonian(model, basis)
    psi0 = all_down_vacuum(basis)
    t_grid = np.linspace(0.0, schedule.t_total, n_samples)

    ground_cache = {}

    def instantaneous_ground(t):
        g = schedule(t)
        if g not in ground_cache:
            ground_cache[g] = ground_state(hamiltonian, g=g)
        return ground_cache[g]

    fidelities = []
    excitations = []

    def track(state):
        gs = instantaneous_ground(state.time)
        fidelities.append(fidelity(gs.state, state))
        h = hamiltonian.matrix(schedule(state.time))
        energy = float(np.real(np.vdot(state.amplitudes,
                                       h @ state.amplitudes)))
        excitations.append(energy - gs.energy)
        return fidelities[-1]

    evolve(psi0, hamiltonian, t_grid, g_schedule=schedule,
           observables={"fidelity": track}, max_step=max_step)
    return AdiabaticityReport(
        times=t_grid, couplings=np.array([schedule(t) for t in t_grid]),
        fidelities=np.asarray(fidelities),
        excitation_energies=np.asarray(excitations),
    )


def magnetization_asymmetry(result: QuenchResult) -> float:
    """Forward/reverse asymmetry of the magnetization on a mirrored ramp.

    An adiabatic evolution retraces itself, so sigma_z(t) matches
    sigma_z(t_total - t); the maximum mismatch is the excitation proxy used
    for chains too large for explicit ground-state fidelities.
    """
    if result.schedule.shape != REVERSE_APPENDED:
        raise ValueError("asymmetry is defined for reverse_appended ramps")
    sz = result.mean_sigma_z
    return float(np.max(np.abs(sz - sz[::-1])))


def rescale_for_crossing(c_values, n_ions, g_values, g_c, g_c_mf=None,
                         beta=0.125, nu=1.0):
    """Finite-size rescaling that makes correlation curves of different
    chain lengths cross at the transition.

    Returns (x, y) with y = N^(2 beta/nu) C and
    x = N^(1/nu) (g - g_c)/g_c_mf.
    """
    if g_c_mf is None:
        g_c_mf = g_c
    c_values = np.asarray(c_values, dtype=float)
    g_values = np.asarray(g_values, dtype=float)
    y = n_ions ** (2.0 * beta / nu) * c_values
    x = n_ions ** (1.0 / nu) * (g_values - g_c) / g_c_mf
    return x, y


def unscale_crossing(x, y, n_ions, g_c, g_c_mf=None, beta=0.125, nu=1.0):
    """Inverse of :func:`rescale_for_crossing`."""
    if g_c_mf is None:
        g_c_mf = g_c
    c_values = np.asarray(y, dtype=float) / n_ions ** (2.0 * beta / nu)
    g_values = np.asarray(x, dtype=float) * g_c_mf / n_ions ** (1.0 / nu) + g_c
    return c_values, g_values
