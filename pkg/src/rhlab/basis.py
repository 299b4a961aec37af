"""Truncated spin (x) Fock product bases.

Two phonon representations are supported: ``local`` keeps one Fock ladder per
ion (slots interleaved site by site, which makes left/right bipartitions
contiguous), ``collective`` keeps one ladder per collective mode (all spins
first, then all modes).  A basis can be restricted to one eigenspace of the
conserved parity (product of sigma_z times phonon-number parity) and,
optionally, to states below a total phonon number, which is useful because
that subspace is invariant under the local/collective mode rotation.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import stats

from .chain import RHModel, rh_mode_spectrum

__all__ = [
    "BasisSpec",
    "estimate_dimension",
    "suggest_cutoffs",
    "CutoffSuggestion",
]

LOCAL = "local"
COLLECTIVE = "collective"

#: hard ceiling on the enumerated product space
_ENUMERATION_LIMIT = 1 << 26


@dataclass(frozen=True)
class BasisSpec:
    """Description of a truncated spin (x) Fock basis.

    Parameters
    ----------
    n_ions : int
    representation : {"local", "collective"}
    cutoffs : int or sequence of int
        Maximum phonon number per mode (a single int applies to all modes).
    parity_sector : {"even", "odd", "full"}
        Eigenspace of P = prod_i sigma_z^i * (-1)^(total phonon number).
    total_cutoff : int, optional
        Additionally drop states whose total phonon number exceeds this.
    """

    n_ions: int
    representation: str = LOCAL
    cutoffs: tuple = 6
    parity_sector: str = "full"
    total_cutoff: int | None = None

    def __post_init__(self):
        if self.n_ions < 1:
            raise ValueError("need at least one ion")
        if self.representation not in (LOCAL, COLLECTIVE):
            raise ValueError("representation must be 'local' or 'collective'")
        if self.parity_sector not in ("even", "odd", "full"):
            raise ValueError("parity_sector must be 'even', 'odd' or 'full'")
        cut = self.cutoffs
        if np.isscalar(cut):
            cut = (int(cut),) * self.n_ions
        else:
            cut = tuple(int(c) for c in cut)
        if len(cut) != self.n_ions:
            raise ValueError("need one phonon cutoff per mode")
        if any(c < 0 for c in cut):
            raise ValueError("cutoffs must be nonnegative")
        object.__setattr__(self, "cutoffs", cut)

    # -- slot layout -----------------------------------------------------

    @cached_property
    def slot_dims(self):
        """Dimension of each tensor factor, in storage order."""
        n = self.n_ions
        if self.representation == LOCAL:
            dims = []
            for i in range(n):
                dims.extend((2, self.cutoffs[i] + 1))
        else:
            dims = [2] * n + [c + 1 for c in self.cutoffs]
        return tuple(dims)

    def spin_slot(self, i):
        return 2 * i if self.representation == LOCAL else i

    def mode_slot(self, k):
        return 2 * k + 1 if self.representation == LOCAL else self.n_ions + k

    @cached_property
    def full_dimension(self):
        """Dimension of the unrestricted product space."""
        return int(np.prod([int(d) for d in self.slot_dims], dtype=object))

    @cached_property
    def _strides(self):
        dims = self.slot_dims
        strides = np.ones(len(dims), dtype=np.int64)
        for s in range(len(dims) - 2, -1, -1):
            strides[s] = strides[s + 1] * dims[s + 1]
        return strides

    def slot_digits(self, slot, indices=None):
        """Occupation digit of ``slot`` for the given full-space indices."""
        if indices is None:
            indices = np.arange(self.full_dimension, dtype=np.int64)
        return (indices // self._strides[slot]) % self.slot_dims[slot]

    # -- restriction -----------------------------------------------------

    @cached_property
    def members(self):
        """Full-space indices belonging to this basis, ascending."""
        if self.full_dimension > _ENUMERATION_LIMIT:
            raise MemoryError(
                f"refusing to enumerate a product space of dimension "
                f"{self.full_dimension}")
        idx = np.arange(self.full_dimension, dtype=np.int64)
        keep = np.ones(self.full_dimension, dtype=bool)
        if self.parity_sector != "full" or self.total_cutoff is not None:
            phonons = np.zeros(self.full_dimension, dtype=np.int64)
            for k in range(self.n_ions):
                phonons += self.slot_digits(self.mode_slot(k), idx)
            if self.total_cutoff is not None:
                keep &= phonons <= self.total_cutoff
            if self.parity_sector != "full":
                downs = np.zeros(self.full_dimension, dtype=np.int64)
                for i in range(self.n_ions):
                    downs += self.slot_digits(self.spin_slot(i), idx)
                want = 0 if self.parity_sector == "even" else 1
                keep &= (downs + phonons) % 2 == want
        return idx[keep]

    @cached_property
    def size(self):
        """Number of basis states after all restrictions."""
        return len(self.members)

    def parity_signs(self):
        """Parity eigenvalue (+/-1) of every member state."""
        idx = self.members
        tot = np.zeros(len(idx), dtype=np.int64)
        for i in range(self.n_ions):
            tot += self.slot_digits(self.spin_slot(i), idx)
        for k in range(self.n_ions):
            tot += self.slot_digits(self.mode_slot(k), idx)
        return 1 - 2 * (tot % 2)

    def index_of(self, spins, phonons):
        """Position in this basis of the product state with the given spin
        digits (0 = up, 1 = down) and phonon numbers."""
        spins = np.asarray(spins, dtype=np.int64)
        phonons = np.asarray(phonons, dtype=np.int64)
        if spins.shape != (self.n_ions,) or phonons.shape != (self.n_ions,):
            raise ValueError("need one spin digit and one phonon number per site")
        full = 0
        for i in range(self.n_ions):
            full += spins[i] * self._strides[self.spin_slot(i)]
            full += phonons[i] * self._strides[self.mode_slot(i)]
        pos = int(np.searchsorted(self.members, full))
        if pos >= self.size or self.members[pos] != full:
            raise ValueError("state not contained in this basis "
                             "(check parity sector and cutoffs)")
        return pos

    def with_sector(self, sector):
        return BasisSpec(self.n_ions, self.representation, self.cutoffs,
                         sector, self.total_cutoff)


def estimate_dimension(n_ions, cutoffs):
    """Hilbert-space size 2^N * prod(cutoff+1) and its base-2 logarithm.

    This is the plain product estimate used for cost accounting; it ignores
    parity restriction.
    """
    if np.isscalar(cutoffs):
        cutoffs = (int(cutoffs),) * n_ions
    elif len(cutoffs) != n_ions:
        raise ValueError(f"need one cutoff per mode ({n_ions}), "
                         f"got {len(cutoffs)}")
    dim = 2**n_ions
    for c in cutoffs:
        dim *= int(c) + 1
    return dim, math.log2(dim)


@dataclass(frozen=True)
class CutoffSuggestion:
    """Per-collective-mode occupancy estimates and matching Fock cutoffs.

    A cutoff of -1 marks a resonant (zero-frequency) mode whose occupancy
    estimate diverges; its cutoff must be set manually.
    """

    mean_phonons: np.ndarray
    cutoffs: np.ndarray
    target_error: float

    @property
    def resonant(self):
        return self.cutoffs < 0


def _poisson_cutoff(mean, target_error):
    """Smallest n with P(X > n) <= target_error for X ~ Poisson(mean)."""
    n = max(0, int(mean))
    while stats.poisson.sf(n, mean) > target_error:
        n += 1
    return n


def suggest_cutoffs(model: RHModel, target_error=1e-3) -> CutoffSuggestion:
    """Estimate collective-mode occupancies and pick Fock cutoffs.

    The driven occupancy of collective mode k is estimated as
    (sqrt(N) g / delta_k)^2 -- the collective enhancement of the coupling by
    sqrt(N) matters here -- and the cutoff is the smallest Fock level whose
    Poisson tail stays below ``target_error``.
    """
    if model.coupling is None:
        raise ValueError("model has no coupling set")
    if not 0 < target_error < 1:
        raise ValueError("target_error must be in (0, 1)")
    freqs = rh_mode_spectrum(model).freqs
    g = model.coupling
    n = model.n_ions
    nbar = np.full(n, np.inf)
    nonzero = freqs != 0
    nbar[nonzero] = (math.sqrt(n) * g / freqs[nonzero]) ** 2
    cutoffs = np.full(n, -1, dtype=int)
    for k in range(n):
        if nonzero[k]:
            cutoffs[k] = _poisson_cutoff(nbar[k], target_error)
    return CutoffSuggestion(mean_phonons=nbar, cutoffs=cutoffs,
                            target_error=float(target_error))
