"""Iterative (Lanczos) ground states in a parity sector."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .errors import NonEquilibriumModelError
from .operators import HamiltonianOperator
from .states import QuantumState

__all__ = ["GroundStateResult", "ground_state"]

#: relative energy convergence demanded of the eigensolver
ENERGY_RTOL = 1e-9
_DENSE_LIMIT = 1200


@dataclass(frozen=True)
class GroundStateResult:
    """Two lowest eigenpairs in the requested sector and their gap.

    In the symmetry-broken phase the true ground doublet is split across the
    two parity sectors; within one sector the gap below is a genuine
    excitation gap, which keeps the Lanczos iteration well conditioned.
    """

    energy: float
    state: QuantumState
    excited_energy: float
    excited_state: QuantumState
    gap: float


def _sign_fixed(vec):
    """Flip the global sign so the largest-magnitude entry is positive."""
    pivot = np.argmax(np.abs(vec))
    return -vec if np.real(vec[pivot]) < 0 else vec


def ground_state(hamiltonian: HamiltonianOperator, g=None, seed=0,
                 maxiter=None) -> GroundStateResult:
    """Two lowest eigenpairs of H(g) on the operator's basis.

    Refuses models without an equilibrium regime (a non-positive collective
    mode frequency makes the g=0 phonon energy unbounded below, so "ground
    state" is meaningless).  Uses dense diagonalization below a small size,
    otherwise ARPACK's implicitly restarted Lanczos with a seeded random
    start vector (deterministic by default).
    """
    if not hamiltonian.model.equilibrium_mode:
        raise NonEquilibriumModelError(
            "model has a non-positive collective mode frequency; ground "
            "states are only defined in the equilibrium regime")
    h = hamiltonian.matrix(g)
    dim = h.shape[0]
    if dim < 2:
        raise ValueError("basis too small for a ground-state search")

    if dim <= _DENSE_LIMIT:
        vals, vecs = np.linalg.eigh(h.toarray())
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(dim)
        scale = max(hamiltonian.norm_bound(g), 1e-300)
        vals, vecs = spla.eigsh(
            h, k=2, which="SA", v0=v0,
            tol=ENERGY_RTOL * 1e-2, maxiter=maxiter,
        )
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        residual = np.linalg.norm(h @ vecs[:, 0] - vals[0] * vecs[:, 0])
        if residual > 1e-6 * scale:
            raise ArithmeticError(
                f"Lanczos residual {residual:.3e} too large for energy "
                f"tolerance (scale {scale:.3e})")

    e0, e1 = float(vals[0]), float(vals[1])
    basis = hamiltonian.basis
    state = QuantumState(_sign_fixed(vecs[:, 0]).astype(complex), basis)
    excited = QuantumState(_sign_fixed(vecs[:, 1]).astype(complex), basis)
    return GroundStateResult(energy=e0, state=state, excited_energy=e1,
                             excited_state=excited, gap=e1 - e0)
