"""Mean-field ground state of the spin-boson lattice.

With the phonons rotated into collective modes, the transition is carried by
the lowest mode: below the critical coupling the only self-consistent
solution has zero mode amplitude and unpolarized spins; above it the mode
amplitude bifurcates and each spin tilts toward the x axis by an angle set by
its overlap with the soft mode.
"""

import math
from dataclasses import dataclass

import numpy as np

from .chain import ModeSpectrum
from .errors import SingularModeError

__all__ = [
    "MeanFieldSolution",
    "critical_coupling",
    "solve_b0",
    "other_mode_amplitudes",
]

_BISECTION_RTOL = 1e-12


@dataclass(frozen=True)
class MeanFieldSolution:
    """Self-consistent mean-field configuration.

    ``branch`` is "trivial" (zero mode amplitude) or "broken" (the positive
    representative of the Z2 pair; the sign-flipped partner with reversed
    spin projections solves the same equations).
    """

    b0_amplitude: float
    spin_x: np.ndarray
    spin_angles: np.ndarray
    branch: str
    coupling: float

    def __post_init__(self):
        object.__setattr__(self, "spin_x", np.asarray(self.spin_x, dtype=float))
        object.__setattr__(self, "spin_angles",
                           np.asarray(self.spin_angles, dtype=float))


def critical_coupling(spin_freq, soft_mode_freq):
    """Mean-field critical coupling sqrt(spin_freq * soft_mode_freq) / 2."""
    if spin_freq <= 0 or soft_mode_freq <= 0:
        raise ValueError("spin and soft-mode frequencies must be positive")
    return 0.5 * math.sqrt(spin_freq * soft_mode_freq)


def _consistency_rhs(b0, g, spin_freq, soft_mode_freq, v0):
    """RHS of the soft-mode self-consistency equation at amplitude b0."""
    denom = np.sqrt(spin_freq**2 + 16.0 * g**2 * v0**2 * b0**2)
    return float(np.sum(4.0 * g**2 * v0**2 / soft_mode_freq / denom))


def solve_b0(g, spin_freq, soft_mode_freq, mode_vector) -> MeanFieldSolution:
    """Solve the soft-mode self-consistency equation.

    The right-hand side decreases monotonically in |b0|, so a positive root
    exists iff it exceeds one at b0=0, i.e. for 4 g^2 > spin_freq *
    soft_mode_freq; the root is then unique and bisection cannot fail.
    """
    if soft_mode_freq <= 0:
        raise ValueError("soft-mode frequency must be positive")
    v0 = np.asarray(mode_vector, dtype=float)
    n = len(v0)

    if spin_freq > 0 and 4.0 * g**2 <= soft_mode_freq * spin_freq:
        return MeanFieldSolution(
            b0_amplitude=0.0, spin_x=np.zeros(n),
            spin_angles=np.full(n, 0.5 * math.pi), branch="trivial",
            coupling=float(g),
        )

    hi = 1.0
    while _consistency_rhs(hi, g, spin_freq, soft_mode_freq, v0) > 1.0:
        hi *= 2.0
    lo = 0.0
    while hi - lo > _BISECTION_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if _consistency_rhs(mid, g, spin_freq, soft_mode_freq, v0) > 1.0:
            lo = mid
        else:
            hi = mid
    b0 = 0.5 * (lo + hi)

    angles = np.arctan2(spin_freq, 4.0 * v0 * g * b0)
    spin_x = -np.cos(angles)
    return MeanFieldSolution(b0_amplitude=b0, spin_x=spin_x,
                             spin_angles=angles, branch="broken",
                             coupling=float(g))


def other_mode_amplitudes(solution: MeanFieldSolution, g, spin_freq,
                          spectrum: ModeSpectrum) -> np.ndarray:
    """Amplitudes driven into the remaining modes by the tilted spins.

    One-shot evaluation of the fixed-point expression with the converged
    spin configuration substituted; by construction the soft-mode entry
    reproduces ``solution.b0_amplitude``.
    """
    if np.any(spectrum.freqs == 0):
        raise SingularModeError("zero-frequency collective mode has no "
                                "finite static displacement")
    if solution.branch == "trivial":
        return np.zeros(spectrum.n_modes)
    # <b_k> = -g sum_i v_ik <sigma_x^i> / delta_k
    proj = spectrum.vectors.T @ solution.spin_x
    return -g * proj / spectrum.freqs
