"""State vectors on truncated bases and the observables used in the study.

Observable evaluation scatters the (possibly sector-restricted) amplitude
vector into the full product space and applies small per-slot operators
there; sector restriction never gets in the way of operators that change
parity (e.g. a single annihilation operator inside <a_i^dag a_j>).
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .basis import LOCAL, BasisSpec
from .chain import ModeSpectrum
from .operators import SIGMA_X

__all__ = [
    "QuantumState",
    "product_state",
    "all_up_vacuum",
    "all_down_vacuum",
    "sigma_z",
    "mean_sigma_z",
    "sigma_x",
    "correlation",
    "parity_expectation",
    "phonon_numbers",
    "PhononNumbers",
    "top_level_population",
    "check_truncation",
    "entanglement_entropy",
    "fidelity",
]

#: per-mode population in the top Fock level above which the hard cutoff
#: is considered to be clipping the state
LEAKAGE_THRESHOLD = 1e-3

NORM_TOL = 1e-8


@dataclass(frozen=True)
class QuantumState:
    """Normalized amplitude vector over a :class:`BasisSpec`."""

    amplitudes: np.ndarray
    basis: BasisSpec
    time: float = 0.0

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amp)
        if amp.shape != (self.basis.size,):
            raise ValueError(
                f"amplitude vector has length {amp.shape}, basis has size "
                f"{self.basis.size}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {NORM_TOL}")

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def full_vector(self):
        """Amplitudes scattered into the unrestricted product space."""
        if self.basis.size == self.basis.full_dimension:
            return self.amplitudes
        full = np.zeros(self.basis.full_dimension, dtype=complex)
        full[self.basis.members] = self.amplitudes
        return full

    def overlap(self, other):
        if other.basis != self.basis:
            raise ValueError("states live on different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def product_state(basis: BasisSpec, spins, phonons=None, time=0.0) -> QuantumState:
    """|spins> (x) |phonons> as a basis state.

    ``spins`` is a string of 'u'/'d' characters or a digit sequence
    (0 = up, 1 = down); phonon numbers default to vacuum.
    """
    if isinstance(spins, str):
        table = {"u": 0, "d": 1}
        spins = [table[c] for c in spins]
    if phonons is None:
        phonons = np.zeros(basis.n_ions, dtype=int)
    pos = basis.index_of(spins, phonons)
    amp = np.zeros(basis.size, dtype=complex)
    amp[pos] = 1.0
    return QuantumState(amp, basis, time)


def all_up_vacuum(basis):
    """|up, 0>^(x)N, the initial state of the dynamics studies."""
    return product_state(basis, "u" * basis.n_ions)


def all_down_vacuum(basis):
    """|down, 0>^(x)N, the g=0 ground state of equilibrium models."""
    return product_state(basis, "d" * basis.n_ions)


# -- spin observables ----------------------------------------------------


def _spin_digits(basis, site):
    return basis.slot_digits(basis.spin_slot(site), basis.members)


def sigma_z(psi: QuantumState, site) -> float:
    """<sigma_z^site>; diagonal, evaluated from the spin digits."""
    signs = 1.0 - 2.0 * _spin_digits(psi.basis, site)
    return float(np.sum(np.abs(psi.amplitudes) ** 2 * signs))


def mean_sigma_z(psi: QuantumState) -> float:
    """Chain-averaged magnetization."""
    return float(np.mean([sigma_z(psi, i) for i in range(psi.basis.n_ions)]))


def _apply_spin(full_vec, basis, matrix, site):
    """Apply a 2x2 spin operator to a full-space vector, in place-ish."""
    dims = basis.slot_dims
    slot = basis.spin_slot(site)
    shaped = full_vec.reshape([int(d) for d in dims])
    moved = np.moveaxis(shaped, slot, 0)
    out = np.tensordot(matrix, moved, axes=([1], [0]))
    return np.moveaxis(out, 0, slot).reshape(-1)


def sigma_x(psi: QuantumState, site) -> float:
    full = psi.full_vector()
    return float(np.real(np.vdot(full, _apply_spin(full, psi.basis, SIGMA_X, site))))


def correlation(psi: QuantumState, i, j) -> float:
    """C_ij = <sigma_x^i sigma_x^j> - <sigma_x^i><sigma_x^j>."""
    full = psi.full_vector()
    xi = _apply_spin(full, psi.basis, SIGMA_X, i)
    xj = _apply_spin(full, psi.basis, SIGMA_X, j)
    mean_i = np.real(np.vdot(full, xi))
    mean_j = np.real(np.vdot(full, xj))
    joint = np.real(np.vdot(xi, xj))
    return float(joint - mean_i * mean_j)


def parity_expectation(psi: QuantumState) -> float:
    signs = psi.basis.parity_signs()
    return float(np.sum(np.abs(psi.amplitudes) ** 2 * signs))


# -- phonon observables ----------------------------------------------------


@dataclass(frozen=True)
class PhononNumbers:
    """Mean phonon numbers per site mode and per collective mode."""

    local: np.ndarray
    collective: np.ndarray | None


def _mode_matrix(psi: QuantumState) -> np.ndarray:
    """G_kl = <b_k^dag b_l> over the representation's own modes."""
    basis = psi.basis
    n = basis.n_ions
    full = psi.full_vector()
    dims = [int(d) for d in basis.slot_dims]
    lowered = []
    for k in range(n):
        slot = basis.mode_slot(k)
        a = np.zeros((dims[slot], dims[slot]))
        ladder = np.sqrt(np.arange(1, dims[slot]))
        a[np.arange(dims[slot] - 1), np.arange(1, dims[slot])] = ladder
        shaped = np.moveaxis(full.reshape(dims), slot, 0)
        out = np.tensordot(a, shaped, axes=([1], [0]))
        lowered.append(np.moveaxis(out, 0, slot).reshape(-1))
    g = np.empty((n, n), dtype=complex)
    for k in range(n):
        for l in range(k, n):
            g[k, l] = np.vdot(lowered[k], lowered[l])
            g[l, k] = np.conj(g[k, l])
    return g


def phonon_numbers(psi: QuantumState, spectrum: ModeSpectrum | None = None) -> PhononNumbers:
    """Mean occupation of each site mode and each collective mode.

    In the local representation the collective numbers are obtained by
    rotating <a_i^dag a_j> with the mode vectors (and vice versa in the
    collective representation); they require ``spectrum``.
    """
    g = _mode_matrix(psi)
    own = np.real(np.diag(g))
    if spectrum is None:
        other = None
    else:
        v = spectrum.vectors
        if psi.basis.representation == LOCAL:
            other = np.real(np.einsum("ik,ij,jk->k", v, g, v))
        else:
            other = np.real(np.einsum("ik,kl,il->i", v, g, v))
    if psi.basis.representation == LOCAL:
        return PhononNumbers(local=own, collective=other)
    return PhononNumbers(local=other, collective=own)


def top_level_population(psi: QuantumState) -> np.ndarray:
    """Population sitting in the highest retained Fock level of each mode.

    This is the leakage monitor for the hard truncation: a sizable top-level
    population means the cutoff is clipping the state.
    """
    basis = psi.basis
    members = basis.members
    weights = np.abs(psi.amplitudes) ** 2
    out = np.empty(basis.n_ions)
    for k in range(basis.n_ions):
        slot = basis.mode_slot(k)
        digits = basis.slot_digits(slot, members)
        out[k] = float(weights[digits == basis.slot_dims[slot] - 1].sum())
    return out


def check_truncation(psi: QuantumState, threshold=LEAKAGE_THRESHOLD) -> np.ndarray:
    """Warn when any mode's top-Fock-level population exceeds ``threshold``
    (default 0.1%); returns the per-mode populations either way."""
    pops = top_level_population(psi)
    bad = np.flatnonzero(pops > threshold)
    if bad.size:
        worst = ", ".join(f"mode {k}: {pops[k]:.2e}" for k in bad)
        warnings.warn(
            f"phonon truncation is clipping the state ({worst}); raise the "
            f"cutoff", stacklevel=2)
    return pops


# -- entanglement ----------------------------------------------------------


def entanglement_entropy(psi: QuantumState, cut_site) -> float:
    """Von Neumann entropy (base 2) of sites 1..cut_site, spins and phonons.

    Only meaningful in the local representation, where the tensor factors
    are site-local.
    """
    basis = psi.basis
    if basis.representation != LOCAL:
        raise ValueError("bipartite site entropy requires the local "
                         "representation")
    if not 1 <= cut_site < basis.n_ions:
        raise ValueError("cut must leave at least one site on each side")
    dims = [int(d) for d in basis.slot_dims]
    left = int(np.prod(dims[: 2 * cut_site]))
    right = int(np.prod(dims[2 * cut_site:]))
    matrix = psi.full_vector().reshape(left, right)
    schmidt = np.linalg.svd(matrix, compute_uv=False)
    p = schmidt**2
    p = p[p > 1e-300]
    return float(-np.sum(p * np.log2(p)))


def fidelity(psi: QuantumState, phi: QuantumState) -> float:
    """|<psi|phi>|^2 for states on the same basis."""
    return float(np.abs(psi.overlap(phi)) ** 2)
