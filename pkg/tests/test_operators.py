"""Sparse Hamiltonian assembly against dense oracles."""

import numpy as np
import pytest

from rhlab import (BasisSpec, DimensionBudgetError, RHModel,
                   build_hamiltonian, parity_operator)
from rhlab.units import khz


def two_site_model(g=1.2):
    return RHModel(spin_freq=khz(2.0), site_freqs=[khz(1.0), khz(1.5)],
                   hoppings=khz(3.0) * (1 - np.eye(2)), coupling=khz(g))


def test_single_ion_rabi_spectrum_against_dense_oracle():
    w0, w, g = khz(5.0), khz(3.0), khz(2.0)
    model = RHModel(w0, [w], np.zeros((1, 1)), coupling=g)
    ham = build_hamiltonian(model, BasisSpec(1, "local", 40))
    vals = np.linalg.eigvalsh(ham.matrix().toarray())

    # oracle: build the quantum Rabi matrix by hand with explicit krons
    dim = 41
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    x = a + a.T
    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    manual = (0.5 * w0 * np.kron(sz, np.eye(dim))
              + w * np.kron(np.eye(2), np.diag(np.arange(dim)))
              + g * np.kron(sx, x))
    oracle = np.linalg.eigvalsh(manual)
    assert np.max(np.abs(vals - oracle)) < 1e-10 * np.max(np.abs(oracle))


def test_zero_coupling_ground_energy():
    model = RHModel(khz(4.0), [khz(1.0)] * 3,
                    khz(0.5) * (1 - np.eye(3)), coupling=0.0)
    ham = build_hamiltonian(model, BasisSpec(3, "local", 3))
    vals = np.linalg.eigvalsh(ham.matrix().toarray())
    # |down, 0>^3 at -N w0 / 2... requires positive mode freqs; here the
    # phonon vacuum is the phonon ground state, so E0 = -N w0/2
    assert vals[0] == pytest.approx(-1.5 * khz(4.0), rel=1e-12)


def test_local_and_collective_spectra_match_at_total_cutoff():
    model = two_site_model()
    for sector in ("full", "even", "odd"):
        local = BasisSpec(2, "local", 6, sector, total_cutoff=6)
        coll = BasisSpec(2, "collective", 6, sector, total_cutoff=6)
        v1 = np.linalg.eigvalsh(build_hamiltonian(model, local).matrix().toarray())
        v2 = np.linalg.eigvalsh(build_hamiltonian(model, coll).matrix().toarray())
        assert np.max(np.abs(v1 - v2)) < 1e-8


def test_hermiticity_and_parity_commutation():
    model = two_site_model()
    for rep in ("local", "collective"):
        basis = BasisSpec(2, rep, 5)
        h = build_hamiltonian(model, basis).matrix()
        assert (abs(h - h.T.conj())).max() < 1e-12 * abs(h).max()
        p = parity_operator(basis)
        comm = h @ p - p @ h
        assert abs(comm).max() < 1e-12 * abs(h).max()


def test_coupling_split_matches_assembled_matrix():
    model = two_site_model(g=2.5)
    basis = BasisSpec(2, "local", 4, "even")
    ham = build_hamiltonian(model, basis)
    h_direct = ham.matrix().toarray()
    h_split = (ham.static + khz(2.5) * ham.coupling_op).toarray()
    assert np.allclose(h_direct, h_split)
    # and at another coupling
    assert np.allclose(ham.matrix(g=0.0).toarray(), ham.static.toarray())


def test_dimension_budget_guard():
    model = RHModel(khz(2.0), [khz(1.0)] * 4, np.zeros((4, 4)), coupling=0.0)
    with pytest.raises(DimensionBudgetError):
        build_hamiltonian(model, BasisSpec(4, "local", 40), budget=10000)


def test_more_than_eight_ions_refused():
    n = 9
    model = RHModel(khz(2.0), [khz(1.0)] * n, np.zeros((n, n)), coupling=0.0)
    with pytest.raises(DimensionBudgetError, match="8 ions"):
        build_hamiltonian(model, BasisSpec(n, "local", 1))


def test_basis_model_ion_count_mismatch():
    with pytest.raises(ValueError):
        build_hamiltonian(two_site_model(), BasisSpec(3, "local", 3))
