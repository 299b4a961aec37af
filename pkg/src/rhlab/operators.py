"""Sparse operators on truncated spin (x) Fock bases.

Operators are assembled as Kronecker chains in the full product space and
then restricted to the basis members (parity sector / total-phonon cap).
The Hamiltonian is kept as two real-symmetric pieces, a coupling-free part
and the spin-phonon coupling operator, so that a time-dependent coupling
only rescales the second piece.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .basis import LOCAL, BasisSpec, estimate_dimension
from .chain import RHModel, rh_mode_spectrum
from .errors import DimensionBudgetError

__all__ = [
    "HamiltonianOperator",
    "build_hamiltonian",
    "embedded_operator",
    "spin_operator",
    "mode_operator",
    "parity_operator",
    "DEFAULT_DIMENSION_BUDGET",
    "MAX_EXACT_IONS",
]

DEFAULT_DIMENSION_BUDGET = 1 << 23
MAX_EXACT_IONS = 8

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


def ladder_down(dim):
    """Annihilation operator on a Fock ladder truncated at dim-1 phonons."""
    return sp.diags(np.sqrt(np.arange(1, dim)), offsets=1, format="csr")


def number_op(dim):
    return sp.diags(np.arange(dim, dtype=float), format="csr")


def embedded_operator(basis: BasisSpec, slot_ops: dict) -> sp.csr_matrix:
    """Kronecker-embed single-slot operators into the restricted basis.

    ``slot_ops`` maps slot index to a small matrix; all other slots get the
    identity.  The result is restricted to ``basis.members``.
    """
    mats = []
    for s, d in enumerate(basis.slot_dims):
        op = slot_ops.get(s)
        mats.append(sp.identity(d, format="csr") if op is None else sp.csr_matrix(op))
    full = reduce(lambda a, b: sp.kron(a, b, format="csr"), mats)
    m = basis.members
    if len(m) == basis.full_dimension:
        return full.tocsr()
    return full[m][:, m].tocsr()


def spin_operator(basis: BasisSpec, matrix, site) -> sp.csr_matrix:
    """A single-qubit operator acting on the spin of ``site``."""
    return embedded_operator(basis, {basis.spin_slot(site): matrix})


def mode_operator(basis: BasisSpec, matrix, mode) -> sp.csr_matrix:
    """An operator acting on one Fock ladder (site mode or collective mode)."""
    return embedded_operator(basis, {basis.mode_slot(mode): matrix})


def parity_operator(basis: BasisSpec) -> sp.csr_matrix:
    """P = prod_i sigma_z^i * (-1)^(total phonon number), diagonal here."""
    return sp.diags(basis.parity_signs().astype(float), format="csr")


@dataclass
class HamiltonianOperator:
    """H(g) = static + g * coupling_op on a fixed basis.

    Both pieces are real symmetric CSR matrices.  ``coupling`` is the model's
    coupling if it carries one; time-dependent couplings are handled by the
    evolution driver through the same split.
    """

    basis: BasisSpec
    model: RHModel
    static: sp.csr_matrix
    coupling_op: sp.csr_matrix
    coupling: float | None = None

    @property
    def dimension(self):
        return self.static.shape[0]

    def matrix(self, g=None) -> sp.csr_matrix:
        """Assembled Hamiltonian at coupling ``g`` (default: the model's)."""
        if g is None:
            g = self.coupling
        if g is None:
            raise ValueError("no coupling set; pass g explicitly")
        return (self.static + g * self.coupling_op).tocsr()

    def norm_bound(self, g=None):
        """Cheap upper bound on ||H(g)|| (max absolute row sum)."""
        if g is None:
            g = self.coupling if self.coupling is not None else 0.0
        h = self.static + g * self.coupling_op
        return float(np.max(np.abs(h).sum(axis=1)))


def build_hamiltonian(model: RHModel, basis: BasisSpec,
                      budget=DEFAULT_DIMENSION_BUDGET) -> HamiltonianOperator:
    """Assemble the model Hamiltonian on the given basis.

    In the local representation the phonon part keeps the site frequencies
    and the hopping matrix; in the collective representation the hopping is
    absorbed into the diagonal mode frequencies and the coupling fans out
    over the mode vectors.  Refuses bases beyond the dimension budget or
    with more than 8 ions.
    """
    n = model.n_ions
    if basis.n_ions != n:
        raise ValueError("basis and model disagree on the ion count")
    if n > MAX_EXACT_IONS:
        dim, log2 = estimate_dimension(n, basis.cutoffs)
        raise DimensionBudgetError(
            dim, budget,
            note=f"exact methods are limited to {MAX_EXACT_IONS} ions; "
                 f"requested {n} ions (~2^{log2:.1f} states)")
    if basis.full_dimension > budget:
        dim, log2 = estimate_dimension(n, basis.cutoffs)
        raise DimensionBudgetError(
            dim, budget, note=f"estimated 2^{log2:.1f} states")

    half_sz = 0.5 * SIGMA_Z
    static = None

    def add(term):
        nonlocal static
        static = term if static is None else static + term

    for i in range(n):
        add(model.spin_freq * spin_operator(basis, half_sz, i))

    if basis.representation == LOCAL:
        for i in range(n):
            dim_i = basis.slot_dims[basis.mode_slot(i)]
            add(model.site_freqs[i] * mode_operator(basis, number_op(dim_i), i))
        for i in range(n):
            for j in range(i + 1, n):
                t = model.hoppings[i, j]
                if t == 0.0:
                    continue
                di = basis.slot_dims[basis.mode_slot(i)]
                dj = basis.slot_dims[basis.mode_slot(j)]
                hop = embedded_operator(basis, {
                    basis.mode_slot(i): ladder_down(di).T,
                    basis.mode_slot(j): ladder_down(dj),
                })
                add(t * (hop + hop.T))
        coupling = None
        for i in range(n):
            dim_i = basis.slot_dims[basis.mode_slot(i)]
            x = ladder_down(dim_i)
            x = x + x.T
            term = embedded_operator(basis, {
                basis.spin_slot(i): SIGMA_X,
                basis.mode_slot(i): x,
            })
            coupling = term if coupling is None else coupling + term
    else:
        spectrum = rh_mode_spectrum(model)
        for k in range(n):
            dim_k = basis.slot_dims[basis.mode_slot(k)]
            add(spectrum.freqs[k] * mode_operator(basis, number_op(dim_k), k))
        coupling = None
        for k in range(n):
            dim_k = basis.slot_dims[basis.mode_slot(k)]
            x = ladder_down(dim_k)
            x = x + x.T
            for i in range(n):
                v = spectrum.vectors[i, k]
                if v == 0.0:
                    continue
                term = v * embedded_operator(basis, {
                    basis.spin_slot(i): SIGMA_X,
                    basis.mode_slot(k): x,
                })
                coupling = term if coupling is None else coupling + term

    return HamiltonianOperator(
        basis=basis, model=model, static=static.tocsr(),
        coupling_op=coupling.tocsr(), coupling=model.coupling,
    )
