"""Linearized (bosonized-spin) dynamics and stability analysis.

For weak excitation out of the all-up vacuum each spin is replaced by a
bosonic mode s_i (sigma_z^i = 1 - 2 s_i^dag s_i), making the Hamiltonian
quadratic.  The 4N Heisenberg operators (s_i, s_i^dag, a_i, a_i^dag per
site, in that order) then close under dv/dt = A v, so a matrix exponential
propagates them exactly.  Whether all eigenvalues of A stay on the imaginary
axis or acquire positive real parts separates bounded oscillation from
exponential excitation growth, which is the qualitative boundary between
the weak- and strong-coupling dynamical regimes.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .chain import RHModel

__all__ = [
    "LinearizedSystem",
    "build_A",
    "propagate",
    "sigma_z_hp",
    "sigma_z_hp_trajectory",
    "stability",
    "stability_map",
    "StabilityReport",
    "validity_window",
]

#: tolerance on Re(lambda), scaled by ||A||, below which a mode counts as
#: marginally stable rather than growing
STABILITY_RTOL = 1e-9


def _slot(i, kind):
    # operator order per site: s, s^dag, a, a^dag
    return 4 * i + {"s": 0, "sd": 1, "a": 2, "ad": 3}[kind]


@dataclass(frozen=True)
class LinearizedSystem:
    """dv/dt = A v for the 4N-vector of ladder operators."""

    matrix: np.ndarray
    model: RHModel

    @property
    def n_ions(self):
        return self.model.n_ions

    def slot(self, i, kind):
        """Row/column of operator ``kind`` in {'s','sd','a','ad'} at site i."""
        return _slot(i, kind)


def build_A(model: RHModel) -> LinearizedSystem:
    """Assemble the linearized equations of motion.

    Works for equilibrium and dynamics-mode models alike; the hopping enters
    only the bosonic rows.
    """
    if model.coupling is None:
        raise ValueError("model has no coupling set")
    n = model.n_ions
    g = model.coupling
    w0 = model.spin_freq
    a = np.zeros((4 * n, 4 * n), dtype=complex)
    for i in range(n):
        s, sd, ai, ad = (_slot(i, k) for k in ("s", "sd", "a", "ad"))
        a[s, s] = 1j * w0
        a[s, ai] = a[s, ad] = -1j * g
        a[sd, sd] = -1j * w0
        a[sd, ai] = a[sd, ad] = 1j * g
        a[ai, ai] = -1j * model.site_freqs[i]
        a[ai, s] = a[ai, sd] = -1j * g
        a[ad, ad] = 1j * model.site_freqs[i]
        a[ad, s] = a[ad, sd] = 1j * g
        for j in range(n):
            if j == i:
                continue
            t = model.hoppings[i, j]
            a[ai, _slot(j, "a")] = -1j * t
            a[ad, _slot(j, "ad")] = 1j * t
    return LinearizedSystem(matrix=a, model=model)


def propagate(sys: LinearizedSystem, t) -> np.ndarray:
    """B(t) = exp(A t) by scaling-and-squaring.

    In the unstable regime at large t the entries overflow; the propagator
    is still returned (with infs) together with a warning quoting the
    growth exponent.
    """
    if t < 0:
        raise ValueError("propagation time must be nonnegative")
    with warnings.catch_warnings(), np.errstate(over="ignore",
                                                invalid="ignore"):
        # overflow inside the squaring stage is reported below in terms of
        # the growth exponent instead of raw matmul warnings
        warnings.simplefilter("ignore", RuntimeWarning)
        b = sla.expm(sys.matrix * t)
    if not np.all(np.isfinite(b)):
        rate = float(np.max(np.linalg.eigvals(sys.matrix).real))
        warnings.warn(
            f"propagator overflow: growth exponent ~ {rate * t:.1f} "
            f"(max Re(lambda) = {rate:.3e} rad/s at t = {t:.3e} s)",
            RuntimeWarning, stacklevel=2)
    return b


def _sigma_z_from_b(sys: LinearizedSystem, b: np.ndarray, i) -> float:
    n = sys.n_ions
    s, sd = _slot(i, "s"), _slot(i, "sd")
    total = 0.0 + 0.0j
    for j in range(n):
        total += b[sd, _slot(j, "s")] * b[s, _slot(j, "sd")]
        total += b[sd, _slot(j, "a")] * b[s, _slot(j, "ad")]
    return float(1.0 - 2.0 * np.real(total))


def sigma_z_hp(sys: LinearizedSystem, i, t) -> float:
    """<sigma_z^i>(t) for the all-up vacuum initial state.

    The vacuum kills every contraction except annihilator-creator pairs, so
    the expectation reduces to products of propagator entries.
    """
    return _sigma_z_from_b(sys, propagate(sys, t), i)


def sigma_z_hp_trajectory(sys: LinearizedSystem, t_grid) -> np.ndarray:
    """<sigma_z^i>(t) for all sites over a time grid, shape (nt, n_ions).

    Uses one eigendecomposition of A instead of an exponential per point;
    falls back to per-point exponentials when the eigenvector basis is too
    ill-conditioned (near a stability threshold, where modes coalesce).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    vals, vecs = np.linalg.eig(sys.matrix)
    well_conditioned = np.linalg.cond(vecs) < 1e9
    if well_conditioned:
        inv = np.linalg.inv(vecs)
    out = np.empty((len(t_grid), sys.n_ions))
    for row, t in enumerate(t_grid):
        if well_conditioned:
            b = (vecs * np.exp(vals * t)) @ inv
        else:
            b = sla.expm(sys.matrix * t)
        for i in range(sys.n_ions):
            out[row, i] = _sigma_z_from_b(sys, b, i)
    return out


def validity_window(sigma_z_traj, threshold=0.2):
    """Mask of trajectory points where the linearization trusts itself.

    The bosonization assumes weak excitation; the window closes the first
    time any site's 1 - <sigma_z> exceeds ``threshold`` and stays closed.
    Within the window the linearized magnetization tracks the exact one;
    outside it only the stable/unstable classification is meaningful.
    """
    traj = np.atleast_2d(np.asarray(sigma_z_traj, dtype=float))
    excited = 1.0 - traj.min(axis=1) >= threshold
    mask = np.ones(traj.shape[0], dtype=bool)
    if excited.any():
        mask[np.argmax(excited):] = False
    return mask


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    max_real_part: float
    eigenvalues: np.ndarray
    tolerance: float


def stability(sys: LinearizedSystem) -> StabilityReport:
    """Classify A by its spectrum: stable iff no eigenvalue has a real part
    above a tolerance scaled to ||A|| (numerically-zero real parts must not
    flip the verdict)."""
    vals = np.linalg.eigvals(sys.matrix)
    tol = STABILITY_RTOL * np.linalg.norm(sys.matrix, 2)
    max_real = float(vals.real.max())
    return StabilityReport(stable=bool(max_real <= tol),
                           max_real_part=max_real,
                           eigenvalues=vals, tolerance=float(tol))


def stability_map(model: RHModel, couplings, detuning_shifts=(0.0,)):
    """Stability classification over a coupling grid x detuning-shift grid.

    Each shift is added uniformly to every site frequency (the knob the
    sideband detunings control); entry [a, b] classifies coupling a with
    shift b.  Returns a boolean matrix (True = stable).
    """
    couplings = np.atleast_1d(np.asarray(couplings, dtype=float))
    detuning_shifts = np.atleast_1d(np.asarray(detuning_shifts, dtype=float))
    out = np.zeros((len(couplings), len(detuning_shifts)), dtype=bool)
    for bcol, shift in enumerate(detuning_shifts):
        shifted = RHModel(model.spin_freq, model.site_freqs + shift,
                          model.hoppings, model.coupling)
        for arow, g in enumerate(couplings):
            out[arow, bcol] = stability(build_A(shifted.with_coupling(g))).stable
    return out
