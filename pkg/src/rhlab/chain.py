"""From chain geometry to the interaction-picture spin-boson model.

The pipeline implemented here follows the standard transverse-mode treatment
of a linear ion chain.  Coulomb repulsion softens each ion's local transverse
frequency and couples neighbouring local oscillators; dropping the
counter-rotating pieces of that coupling (with their second-order frequency
and hopping corrections retained) leaves a hopping Hamiltonian for local
phonons.  A bichromatic drive near the red and blue sidebands then turns the
chain into a lattice of two-level systems coupled to those phonons, with the
spin splitting and the site frequencies set by the two sideband detunings.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import COULOMB_CONSTANT, ELEMENTARY_CHARGE, YB171_MASS
from .errors import ChainUnstableError

__all__ = [
    "ChainGeometry",
    "MotionalModel",
    "ModeSpectrum",
    "RHModel",
    "motional_model",
    "collective_modes",
    "mode_spectrum",
    "interaction_picture",
    "coupling_from_laser",
    "rabi_from_coupling",
    "rh_mode_spectrum",
    "phase_transition_model",
]


def _frozen_array(x, dtype=float):
    arr = np.array(x, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ChainGeometry:
    """A linear chain of identical ions in a transverse harmonic trap.

    Parameters
    ----------
    spacings : array_like
        The n_ions-1 gaps between neighbouring equilibrium positions, in
        meters.  An empty list describes a single ion.
    trap_freq : float
        Bare transverse trap frequency, rad/s.
    mass, charge : float
        Ion mass (kg) and charge (C); default to 171Yb+.
    """

    spacings: np.ndarray
    trap_freq: float
    mass: float = YB171_MASS
    charge: float = ELEMENTARY_CHARGE

    def __post_init__(self):
        spac = _frozen_array(np.atleast_1d(self.spacings) if np.size(self.spacings) else [])
        object.__setattr__(self, "spacings", spac)
        if spac.ndim != 1:
            raise ValueError("spacings must be a one-dimensional sequence")
        if np.any(spac <= 0):
            raise ValueError("all inter-ion spacings must be positive")
        if self.trap_freq <= 0:
            raise ValueError("trap frequency must be positive")
        if self.mass <= 0 or self.charge == 0:
            raise ValueError("mass must be positive and charge nonzero")

    @classmethod
    def uniform(cls, n_ions, spacing, trap_freq, mass=YB171_MASS,
                charge=ELEMENTARY_CHARGE):
        """Equidistant chain of ``n_ions`` ions."""
        if n_ions < 1:
            raise ValueError("need at least one ion")
        return cls(np.full(n_ions - 1, float(spacing)), trap_freq, mass, charge)

    @property
    def n_ions(self):
        return len(self.spacings) + 1

    @property
    def positions(self):
        """Equilibrium positions along the chain axis (first ion at 0)."""
        return np.concatenate(([0.0], np.cumsum(self.spacings)))

    def pair_distances(self):
        """Matrix of |z_i - z_j| with zeros on the diagonal."""
        z = self.positions
        return np.abs(z[:, None] - z[None, :])

    def coulomb_coupling(self):
        """e^2/(4 pi eps0 m), the Coulomb scale entering every softening term."""
        return self.charge**2 / ELEMENTARY_CHARGE**2 * COULOMB_CONSTANT / self.mass


@dataclass(frozen=True)
class MotionalModel:
    """Local transverse frequencies and phonon hoppings of a chain.

    ``local_freqs``/``hoppings`` are the bare quantities; the ``corrected_``
    fields carry the second-order corrections generated when the
    counter-rotating phonon terms are dropped.  All entries in rad/s.
    """

    local_freqs: np.ndarray
    corrected_freqs: np.ndarray
    hoppings: np.ndarray
    corrected_hoppings: np.ndarray
    trap_freq: float

    def __post_init__(self):
        for name in ("local_freqs", "corrected_freqs", "hoppings",
                     "corrected_hoppings"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))

    @property
    def n_ions(self):
        return len(self.local_freqs)

    def coupling_matrix(self):
        """Symmetric matrix with corrected frequencies on the diagonal and
        corrected hoppings off it; its eigensystem is the collective modes."""
        return np.diag(self.corrected_freqs) + self.corrected_hoppings


@dataclass(frozen=True)
class ModeSpectrum:
    """Collective transverse modes: ascending frequencies and an orthonormal
    matrix whose columns are the mode vectors."""

    freqs: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "freqs", _frozen_array(self.freqs))
        object.__setattr__(self, "vectors", _frozen_array(self.vectors))

    @property
    def n_modes(self):
        return len(self.freqs)


@dataclass(frozen=True)
class RHModel:
    """Interaction-picture Rabi-Hubbard parameters.

    H = sum_i [ spin_freq/2 sigma_z^i + site_freqs_i a_i^dag a_i
                + coupling sigma_x^i (a_i + a_i^dag) ]
        + sum_{i<j} hoppings_ij (a_i^dag a_j + a_j^dag a_i)

    Site frequencies may be negative in dynamics studies; ground-state work
    additionally requires every collective mode frequency to be positive
    (see :attr:`equilibrium_mode`).
    """

    spin_freq: float
    site_freqs: np.ndarray
    hoppings: np.ndarray
    coupling: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "site_freqs", _frozen_array(self.site_freqs))
        object.__setattr__(self, "hoppings", _frozen_array(self.hoppings))
        t = self.hoppings
        if t.shape != (self.n_ions, self.n_ions):
            raise ValueError("hoppings must be a square matrix matching site_freqs")
        if not np.allclose(t, t.T, rtol=0, atol=1e-12 * max(1.0, np.abs(t).max())):
            raise ValueError("hoppings must be symmetric")
        if np.any(np.diag(t) != 0):
            raise ValueError("hoppings must have a zero diagonal")

    @property
    def n_ions(self):
        return len(self.site_freqs)

    @property
    def equilibrium_mode(self):
        """True when all collective mode frequencies are positive, i.e. the
        g=0 phonon Hamiltonian is bounded below and has a ground state."""
        return bool(np.all(rh_mode_spectrum(self).freqs > 0))

    def with_coupling(self, g):
        """Copy of the model with the spin-phonon coupling set to ``g``."""
        return RHModel(self.spin_freq, self.site_freqs, self.hoppings, float(g))


def motional_model(geom: ChainGeometry) -> MotionalModel:
    """Derive local frequencies and hoppings from the chain geometry.

    Raises :class:`ChainUnstableError` if the Coulomb softening exceeds the
    transverse confinement for any ion.
    """
    n = geom.n_ions
    wx = geom.trap_freq
    if n == 1:
        z = np.zeros((1, 1))
        return MotionalModel(
            local_freqs=[wx], corrected_freqs=[wx],
            hoppings=z, corrected_hoppings=z, trap_freq=wx,
        )

    c = geom.coulomb_coupling()
    z = geom.pair_distances()
    inv_z3 = np.zeros_like(z)
    off = ~np.eye(n, dtype=bool)
    inv_z3[off] = 1.0 / z[off] ** 3

    radicand = wx**2 - c * inv_z3.sum(axis=1)
    bad = np.flatnonzero(radicand <= 0)
    if bad.size:
        raise ChainUnstableError(int(bad[0]), float(radicand[bad[0]]))
    local = np.sqrt(radicand)

    # t_ij = e^2 / (8 pi eps0 m sqrt(w_i w_j) z_ij^3), with the exact local
    # frequencies inside the square root.
    t = 0.5 * c * inv_z3 / np.sqrt(np.outer(local, local))
    np.fill_diagonal(t, 0.0)

    # Second-order corrections from folding the counter-rotating terms into a
    # frame rotating at the bare trap frequency.
    t_sq = t @ t
    corrected_local = local - np.diag(t_sq) / (2.0 * wx)
    corrected_t = t - t_sq / (2.0 * wx)
    np.fill_diagonal(corrected_t, 0.0)

    return MotionalModel(
        local_freqs=local, corrected_freqs=corrected_local,
        hoppings=t, corrected_hoppings=corrected_t, trap_freq=wx,
    )


def mode_spectrum(site_freqs, hoppings) -> ModeSpectrum:
    """Eigensystem of the symmetric frequency/hopping matrix.

    Frequencies come out ascending; each eigenvector is flipped so that its
    largest-magnitude entry is positive, making the output deterministic.
    """
    m = np.diag(np.asarray(site_freqs, dtype=float)) + np.asarray(hoppings, dtype=float)
    freqs, vecs = np.linalg.eigh(m)
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        if col[np.argmax(np.abs(col))] < 0:
            vecs[:, k] = -col
    return ModeSpectrum(freqs=freqs, vectors=vecs)


def collective_modes(m: MotionalModel) -> ModeSpectrum:
    """Collective modes of the corrected frequency/hopping matrix."""
    return mode_spectrum(m.corrected_freqs, m.corrected_hoppings)


def rh_mode_spectrum(model: RHModel) -> ModeSpectrum:
    """Collective modes of an interaction-picture model (site frequencies and
    hoppings as built by :func:`interaction_picture`)."""
    return mode_spectrum(model.site_freqs, model.hoppings)


def interaction_picture(m: MotionalModel, delta_blue, delta_red) -> RHModel:
    """Map motional parameters and sideband detunings to model parameters.

    ``delta_blue``/``delta_red`` are the detunings of the blue/red drive
    tones from the first upper/lower sidebands.  The spin frequency is their
    half-sum; the site frequencies pick up their half-difference on top of
    the corrected local frequencies measured from the bare trap frequency.
    The spin-phonon coupling is left unset.
    """
    spin_freq = 0.5 * (delta_blue + delta_red)
    site = m.corrected_freqs - m.trap_freq + 0.5 * (delta_blue - delta_red)
    return RHModel(spin_freq=spin_freq, site_freqs=site,
                   hoppings=m.corrected_hoppings, coupling=None)


def coupling_from_laser(lamb_dicke, rabi_freq):
    """Spin-phonon coupling from the Lamb-Dicke parameter and the sideband
    Rabi frequency: g = eta * Omega / 2."""
    if lamb_dicke <= 0:
        raise ValueError("Lamb-Dicke parameter must be positive")
    if rabi_freq < 0:
        raise ValueError("Rabi frequency must be nonnegative")
    return 0.5 * lamb_dicke * rabi_freq


def rabi_from_coupling(coupling, lamb_dicke):
    """Inverse of :func:`coupling_from_laser`."""
    if lamb_dicke <= 0:
        raise ValueError("Lamb-Dicke parameter must be positive")
    return 2.0 * coupling / lamb_dicke


def phase_transition_model(n_ions, soft_mode_freq, spacing=5.4e-6,
                           trap_freq=2 * math.pi * 2.5e6, mass=YB171_MASS,
                           coupling=None, spin_freq=None):
    """Equilibrium-study model on a uniform chain.

    Builds the motional model for a uniform chain and chooses the sideband
    detuning offset so that the lowest collective mode of the
    interaction-picture model sits at ``soft_mode_freq``.  Unless given
    explicitly, the spin frequency is set equal to the site frequency of the
    central ion (ion N//2, counting from one), the choice that makes the
    transition signal strongest.
    """
    geom = ChainGeometry.uniform(n_ions, spacing, trap_freq, mass=mass)
    motional = motional_model(geom)
    base = motional.corrected_freqs - trap_freq
    lowest = mode_spectrum(base, motional.corrected_hoppings).freqs[0]
    shift = soft_mode_freq - lowest
    site = base + shift
    if spin_freq is None:
        spin_freq = site[max(n_ions // 2 - 1, 0)]
    return RHModel(spin_freq=spin_freq, site_freqs=site,
                   hoppings=motional.corrected_hoppings, coupling=coupling)
