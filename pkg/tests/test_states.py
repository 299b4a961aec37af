"""States and observables against dense linear-algebra oracles."""

import math

import numpy as np
import pytest

from rhlab import (BasisSpec, QuantumState, all_down_vacuum, all_up_vacuum,
                   correlation, entanglement_entropy, mean_sigma_z,
                   mode_spectrum, parity_expectation, phonon_numbers,
                   product_state, sigma_x, sigma_z)


def random_state(basis, seed=0):
    rng = np.random.default_rng(seed)
    amp = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
    return QuantumState(amp / np.linalg.norm(amp), basis)


def test_product_state_magnetization():
    basis = BasisSpec(3, "local", 2)
    up = all_up_vacuum(basis)
    down = all_down_vacuum(basis)
    for i in range(3):
        assert sigma_z(up, i) == pytest.approx(1.0)
        assert sigma_z(down, i) == pytest.approx(-1.0)
    assert mean_sigma_z(up) == pytest.approx(1.0)
    mixed = product_state(basis, "udu")
    assert [sigma_z(mixed, i) for i in range(3)] == pytest.approx([1, -1, 1])


def test_norm_validation():
    basis = BasisSpec(2, "local", 1)
    amp = np.zeros(basis.size, dtype=complex)
    amp[0] = 0.7
    with pytest.raises(ValueError):
        QuantumState(amp, basis)


def test_correlation_product_and_bell():
    basis = BasisSpec(2, "local", 0)
    up = all_up_vacuum(basis)
    assert correlation(up, 0, 1) == pytest.approx(0.0, abs=1e-14)

    # (|uu> + |dd>)/sqrt(2): <sx sx> = 1, <sx> = 0
    amp = np.zeros(basis.size, dtype=complex)
    amp[basis.index_of([0, 0], [0, 0])] = 1 / math.sqrt(2)
    amp[basis.index_of([1, 1], [0, 0])] = 1 / math.sqrt(2)
    bell = QuantumState(amp, basis)
    assert correlation(bell, 0, 1) == pytest.approx(1.0)


def test_spin_observables_against_dense_oracle():
    basis = BasisSpec(2, "local", 2, "full")
    psi = random_state(basis, seed=5)
    # oracle: dense kron operators on the full product space
    dims = [2, 3, 2, 3]
    sx = np.array([[0, 1], [1, 0]], dtype=float)
    sz = np.diag([1.0, -1.0])

    def dense_embed(op, slot):
        mats = [np.eye(d) for d in dims]
        mats[slot] = op
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    vec = psi.amplitudes
    sx0, sx1 = dense_embed(sx, 0), dense_embed(sx, 2)
    sz1 = dense_embed(sz, 2)
    assert sigma_x(psi, 0) == pytest.approx(np.vdot(vec, sx0 @ vec).real)
    assert sigma_z(psi, 1) == pytest.approx(np.vdot(vec, sz1 @ vec).real)
    want = (np.vdot(vec, sx0 @ sx1 @ vec).real
            - np.vdot(vec, sx0 @ vec).real * np.vdot(vec, sx1 @ vec).real)
    assert correlation(psi, 0, 1) == pytest.approx(want)


def test_parity_expectation():
    basis = BasisSpec(2, "local", 2, "full")
    up = all_up_vacuum(basis)
    assert parity_expectation(up) == pytest.approx(1.0)
    one_phonon = product_state(basis, "uu", [1, 0])
    assert parity_expectation(one_phonon) == pytest.approx(-1.0)


def test_phonon_numbers_vacuum_and_single_excitation():
    basis = BasisSpec(3, "local", 2, "full")
    spectrum = mode_spectrum([khz_(1.0), khz_(1.2), khz_(1.0)],
                             khz_(0.3) * (1 - np.eye(3)))
    vac = all_up_vacuum(basis)
    numbers = phonon_numbers(vac, spectrum)
    assert np.allclose(numbers.local, 0.0)
    assert np.allclose(numbers.collective, 0.0)

    single = product_state(basis, "uuu", [0, 1, 0])
    numbers = phonon_numbers(single, spectrum)
    assert numbers.local == pytest.approx([0, 1, 0])
    # a single local quantum spreads over the modes with total weight one
    assert np.sum(numbers.collective) == pytest.approx(1.0)
    assert numbers.collective == pytest.approx(spectrum.vectors[1, :] ** 2)


def khz_(x):
    return 2 * math.pi * 1e3 * x


def test_collective_representation_phonon_numbers_invert():
    spectrum = mode_spectrum([khz_(1.0), khz_(1.5)], khz_(0.4) * (1 - np.eye(2)))
    basis = BasisSpec(2, "collective", 3, "full")
    one_mode = product_state(basis, "uu", [1, 0])
    numbers = phonon_numbers(one_mode, spectrum)
    assert numbers.collective == pytest.approx([1, 0])
    assert np.sum(numbers.local) == pytest.approx(1.0)
    assert numbers.local == pytest.approx(spectrum.vectors[:, 0] ** 2)


def test_entropy_product_and_bell():
    basis = BasisSpec(2, "local", 1, "full")
    assert entanglement_entropy(all_up_vacuum(basis), 1) == pytest.approx(0.0, abs=1e-12)
    amp = np.zeros(basis.size, dtype=complex)
    amp[basis.index_of([0, 0], [0, 0])] = 1 / math.sqrt(2)
    amp[basis.index_of([1, 1], [0, 0])] = 1 / math.sqrt(2)
    assert entanglement_entropy(QuantumState(amp, basis), 1) == pytest.approx(1.0)


def test_entropy_against_reduced_density_matrix_oracle():
    basis = BasisSpec(2, "local", 2, "full")
    psi = random_state(basis, seed=9)
    # oracle: eigenvalues of the reduced density matrix of the left site
    m = psi.amplitudes.reshape(6, 6)
    rho = m @ m.conj().T
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-14]
    want = float(-np.sum(evals * np.log2(evals)))
    assert entanglement_entropy(psi, 1) == pytest.approx(want, abs=1e-8)


def test_entropy_requires_local_representation():
    basis = BasisSpec(2, "collective", 1)
    with pytest.raises(ValueError):
        entanglement_entropy(all_up_vacuum(basis), 1)


def test_entropy_in_parity_sector():
    # sector restriction must not change the value: compare against the
    # same state embedded in the full space
    basis_even = BasisSpec(2, "local", 2, "even")
    basis_full = BasisSpec(2, "local", 2, "full")
    psi = random_state(basis_even, seed=3)
    full_vec = psi.full_vector()
    psi_full = QuantumState(full_vec, basis_full)
    assert entanglement_entropy(psi, 1) == pytest.approx(
        entanglement_entropy(psi_full, 1), abs=1e-12)


def test_top_level_population_and_truncation_warning():
    from rhlab import check_truncation, top_level_population

    basis = BasisSpec(2, "local", (2, 3), "full")
    vac = all_up_vacuum(basis)
    assert np.allclose(top_level_population(vac), 0.0)
    clipped = product_state(basis, "uu", [2, 0])  # mode 0 at its cutoff
    pops = top_level_population(clipped)
    assert pops == pytest.approx([1.0, 0.0])
    with pytest.warns(UserWarning, match="truncation"):
        check_truncation(clipped)
    assert np.allclose(check_truncation(vac), 0.0)
