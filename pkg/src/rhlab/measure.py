"""Phase-scan extraction of spin correlations and the detection-error model.

The lab cannot measure sigma_x directly; it rotates sigma_phi = sigma_x
cos(phi) + sigma_y sin(phi) into the measurement basis, scans the global
rotation phase phi, and fits the resulting correlation curve with
C0 cos^2(phi + phi0) + C.  The amplitude C0 recovers |C_xx| independently of
the unknown frame phase phi0 and of constant offsets caused by readout
crosstalk.
"""

import math
from dataclasses import dataclass

import numpy as np

from .states import QuantumState, _apply_spin
from .operators import SIGMA_X, SIGMA_Y

__all__ = [
    "PhaseScan",
    "CorrelationFit",
    "DetectionErrorModel",
    "phase_scan",
    "fit_correlation",
    "apply_detection_errors",
    "sample_shots",
    "spin_outcome_probabilities",
]


@dataclass(frozen=True)
class PhaseScan:
    """Rotated-basis correlations C(phi) for one ion pair."""

    phases: np.ndarray
    correlations: np.ndarray
    pair: tuple

    def __post_init__(self):
        object.__setattr__(self, "phases", np.asarray(self.phases, dtype=float))
        object.__setattr__(self, "correlations",
                           np.asarray(self.correlations, dtype=float))
        if self.phases.shape != self.correlations.shape:
            raise ValueError("phases and correlations must align")
        if np.any(np.abs(self.correlations) > 1 + 1e-9):
            raise ValueError("a spin-spin correlation cannot exceed 1 in magnitude")


@dataclass(frozen=True)
class CorrelationFit:
    """Parameters of C0 cos^2(phi + phi0) + C with C0 >= 0."""

    amplitude: float
    phase_offset: float
    constant: float
    residual: float
    degenerate: bool = False


@dataclass(frozen=True)
class DetectionErrorModel:
    """Readout error channel: nearest-neighbour bright-spill plus
    independent single-qubit flips."""

    crosstalk: float = 0.05
    flip: float = 0.0

    def __post_init__(self):
        if not (0 <= self.crosstalk <= 0.5 and 0 <= self.flip <= 0.5):
            raise ValueError("error probabilities must lie in [0, 0.5]")


def _sigma_phi(phi):
    return math.cos(phi) * SIGMA_X + math.sin(phi) * SIGMA_Y


def phase_scan(psi: QuantumState, i, j, phases) -> PhaseScan:
    """C(phi) = <s_phi^i s_phi^j> - <s_phi^i><s_phi^j> over a phase grid."""
    phases = np.asarray(phases, dtype=float)
    full = psi.full_vector()
    basis = psi.basis
    values = np.empty_like(phases)
    for idx, phi in enumerate(phases):
        op = _sigma_phi(phi)
        vi = _apply_spin(full, basis, op, i)
        vj = _apply_spin(full, basis, op, j)
        mean_i = np.real(np.vdot(full, vi))
        mean_j = np.real(np.vdot(full, vj))
        joint = np.real(np.vdot(vi, vj))
        values[idx] = joint - mean_i * mean_j
    return PhaseScan(phases=phases, correlations=values, pair=(i, j))


def fit_correlation(scan: PhaseScan) -> CorrelationFit:
    """Closed-form least-squares fit of C0 cos^2(phi + phi0) + C.

    The model is linear in (a, b, c) via C(phi) = a + b cos(2 phi)
    + c sin(2 phi); the amplitude of the second harmonic maps back to
    C0 = 2 sqrt(b^2 + c^2) >= 0 by construction.
    """
    phi = scan.phases
    y = scan.correlations
    if len(phi) < 5 or np.ptp(phi) < math.pi - 1e-12:
        raise ValueError("need at least 5 phases spanning at least pi")
    design = np.column_stack([np.ones_like(phi), np.cos(2 * phi), np.sin(2 * phi)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    a, b, c = coef
    amplitude = 2.0 * math.hypot(b, c)
    resid = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    if amplitude < 1e-14 * max(1.0, np.abs(y).max()):
        return CorrelationFit(amplitude=0.0, phase_offset=float("nan"),
                              constant=float(a), residual=resid,
                              degenerate=True)
    # b + i(-c) = (C0/2) exp(2 i phi0)
    phase_offset = 0.5 * math.atan2(-c, b)
    constant = float(a - 0.5 * amplitude)
    return CorrelationFit(amplitude=float(amplitude),
                          phase_offset=float(phase_offset),
                          constant=constant, residual=resid)


# -- detection errors ------------------------------------------------------

# two-qubit outcome order: uu, ud, du, dd  (u = bright/up)
_UU, _UD, _DU, _DD = 0, 1, 2, 3


def apply_detection_errors(probabilities, model: DetectionErrorModel) -> np.ndarray:
    """Push a two-qubit outcome distribution through the readout channel.

    Crosstalk first: each mixed outcome (ud, du) is misread as uu with
    probability ``crosstalk`` (a bright ion spills light onto its dark
    neighbour).  Then independent flips with probability ``flip`` act on
    each qubit.  Total probability is preserved exactly.
    """
    p = np.asarray(probabilities, dtype=float)
    if p.shape != (4,):
        raise ValueError("need a length-4 outcome distribution (uu, ud, du, dd)")
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("probabilities must be nonnegative and sum to 1")

    ec = model.crosstalk
    out = p.copy()
    out[_UU] += ec * (p[_UD] + p[_DU])
    out[_UD] *= 1.0 - ec
    out[_DU] *= 1.0 - ec

    e0 = model.flip
    if e0 > 0:
        keep = 1.0 - e0
        flip1 = np.array([[keep, e0], [e0, keep]])  # per-qubit confusion
        channel = np.kron(flip1, flip1)
        out = channel @ out
    return out


def spin_outcome_probabilities(psi: QuantumState, i, j, phi=0.0) -> np.ndarray:
    """Joint outcome distribution (uu, ud, du, dd) for measuring the rotated
    operator sigma_phi on ions i and j."""
    full = psi.full_vector()
    basis = psi.basis
    # projectors onto the +/-1 eigenstates of sigma_phi
    op = _sigma_phi(phi)
    proj_up = 0.5 * (np.eye(2) + op)
    proj_dn = 0.5 * (np.eye(2) - op)
    out = np.empty(4)
    for idx, (pi, pj) in enumerate([(proj_up, proj_up), (proj_up, proj_dn),
                                    (proj_dn, proj_up), (proj_dn, proj_dn)]):
        v = _apply_spin(full, basis, pi, i)
        v = _apply_spin(v, basis, pj, j)
        out[idx] = max(np.real(np.vdot(full, v)), 0.0)
    return out / out.sum()


def sample_shots(psi: QuantumState, phi, n_shots, seed) -> dict:
    """Finite-statistics simulation of camera shots in the rotated basis.

    Returns bitstring ('u'/'d' per ion) -> count, multinomially sampled
    from the Born probabilities of the state rotated so that sigma_phi maps
    onto the measurement axis.  Deterministic under a fixed seed.
    """
    basis = psi.basis
    n = basis.n_ions
    full = psi.full_vector()
    # rotate each spin so that sigma_phi eigenstates become the z basis:
    # rows of U are the (bra) eigenvectors of sigma_phi
    for site in range(n):
        phase = np.exp(-1j * phi)
        u = np.array([[1.0, phase], [1.0, -phase]]) / math.sqrt(2.0)
        full = _apply_spin(full, basis, u, site)
    dims = [int(d) for d in basis.slot_dims]
    shaped = np.abs(full.reshape(dims)) ** 2
    spin_axes = tuple(basis.spin_slot(s) for s in range(n))
    other_axes = tuple(ax for ax in range(len(dims)) if ax not in spin_axes)
    # spin slots ascend with the site index in both representations, so the
    # surviving axes already read (site 0, site 1, ...)
    marginal = shaped.sum(axis=other_axes)
    probs = marginal.reshape(-1)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(n_shots, probs)
    out = {}
    for config, count in enumerate(counts):
        if count == 0:
            continue
        bits = format(config, f"0{n}b").replace("0", "u").replace("1", "d")
        out[bits] = int(count)
    return out
