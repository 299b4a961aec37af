"""Spacing calibration from measured mode spectra."""

import math

import numpy as np
import pytest

from rhlab import (ChainGeometry, SpectrumMeasurement, collective_modes,
                   fit_jacobian, fit_spacings, motional_model)
from rhlab.constants import COULOMB_CONSTANT, YB171_MASS
from rhlab.units import khz, mhz


def spectrum_of(spacings, trap):
    geom = ChainGeometry(spacings, trap)
    return collective_modes(motional_model(geom)).freqs


def test_measurement_validation():
    with pytest.raises(ValueError):
        SpectrumMeasurement(mhz(np.array([2.4, 2.3])), trap_freq=mhz(2.4))
    with pytest.raises(ValueError):
        SpectrumMeasurement(mhz(np.array([2.3, 2.4])), trap_freq=mhz(2.4),
                            weights=[1.0])


def test_two_ion_fit_matches_closed_form_inversion():
    trap = mhz(2.46)
    d_true = 5.31e-6
    freqs = spectrum_of([d_true], trap)
    meas = SpectrumMeasurement(freqs, trap_freq=trap)
    fit = fit_spacings(meas, ChainGeometry.uniform(2, 5.4e-6, trap))
    assert fit.converged
    # oracle: invert the 2x2 eigenproblem by hand.  The mode splitting is
    # 2 t(u) with t = u / (2 sqrt(wx^2 - u)), so
    # u = 2t (sqrt(t^2 + wx^2) - t) with t = half the splitting.
    t_half = 0.5 * (freqs[1] - freqs[0])
    u = 2.0 * t_half * (math.sqrt(t_half**2 + trap**2) - t_half)
    d_inv = (COULOMB_CONSTANT / YB171_MASS / u) ** (1.0 / 3.0)
    assert fit.spacings[0] == pytest.approx(d_inv, rel=1e-10)
    assert fit.spacings[0] == pytest.approx(d_true, rel=1e-10)


def test_round_trip_recovers_random_symmetric_geometries():
    # mirror-symmetric chains (what the trap is tuned for) are recovered
    # uniquely; without that constraint distinct spacing sets can share a
    # spectrum to solver precision (mirror images are the obvious case)
    rng = np.random.default_rng(11)
    trap = mhz(2.47)
    for _ in range(4):
        half = 5.4 + rng.uniform(-0.4, 0.4, size=3)
        spac = np.array([half[0], half[1], half[2], half[1], half[0]]) * 1e-6
        freqs = spectrum_of(spac, trap)
        meas = SpectrumMeasurement(freqs, trap_freq=trap)
        fit = fit_spacings(meas, ChainGeometry.uniform(6, 5.4e-6, trap))
        assert fit.converged
        assert np.max(np.abs(fit.spacings - spac)) < 0.01e-6
        assert fit.residual < khz(0.01)


def test_asymmetric_fit_reproduces_the_spectrum():
    # an asymmetric 6-ion geometry is not uniquely pinned by its 6 mode
    # frequencies (isospectral twins sit ~0.01 um away), but the fit must
    # land on a geometry reproducing the measured spectrum essentially
    # exactly
    trap = mhz(2.47)
    spac = np.array([5.55, 5.28, 5.42, 5.31, 5.50]) * 1e-6
    freqs = spectrum_of(spac, trap)
    meas = SpectrumMeasurement(freqs, trap_freq=trap)
    fit = fit_spacings(meas, ChainGeometry.uniform(6, 5.4e-6, trap),
                       symmetric=False)
    assert fit.converged
    assert fit.residual < 2 * np.pi * 0.1  # 0.1 Hz
    assert np.max(np.abs(fit.spacings - spac)) < 0.05e-6


def test_symmetric_fit_folds_parameters():
    trap = mhz(2.47)
    spac = np.array([5.9, 5.15, 4.98, 5.15, 5.9]) * 1e-6
    freqs = spectrum_of(spac, trap)
    meas = SpectrumMeasurement(freqs, trap_freq=trap)
    fit = fit_spacings(meas, ChainGeometry.uniform(6, 5.4e-6, trap),
                       symmetric=True)
    assert fit.spacings == pytest.approx(fit.spacings[::-1], rel=1e-14)
    assert np.max(np.abs(fit.spacings - spac)) < 0.01e-6


def test_paper_six_ion_spectrum():
    # measured spectrum -> spacings within 1% of the quoted fit
    measured = mhz(np.array([2.3527, 2.386, 2.415, 2.439, 2.459, 2.4732]))
    meas = SpectrumMeasurement(measured, trap_freq=mhz(2.4732))
    fit = fit_spacings(meas, ChainGeometry.uniform(6, 5.4e-6, mhz(2.4732)))
    quoted = np.array([5.847, 5.164, 4.990, 5.164, 5.847]) * 1e-6
    assert fit.converged
    assert np.max(np.abs(fit.spacings / quoted - 1.0)) < 0.01


def test_jacobian_against_central_differences():
    trap = mhz(2.5)
    spac = np.array([5.6, 5.1, 5.3]) * 1e-6
    geom = ChainGeometry(spac, trap)
    jac = fit_jacobian(geom)
    step = 1e-9
    for s in range(3):
        up = spac.copy()
        up[s] += step
        down = spac.copy()
        down[s] -= step
        fd = (spectrum_of(up, trap) - spectrum_of(down, trap)) / (2 * step)
        scale = np.max(np.abs(fd))
        assert np.max(np.abs(jac[:, s] - fd)) < 1e-6 * scale


def test_jacobian_symmetry_and_com_row():
    geom = ChainGeometry.uniform(5, 5.4e-6, mhz(2.5))
    jac = fit_jacobian(geom)
    # uniform chain: mirror-symmetric sensitivities
    assert np.allclose(jac, jac[:, ::-1], atol=1e-6 * np.abs(jac).max())
    # the top (center-of-mass) mode barely depends on the spacings
    com_row = np.abs(jac[-1])
    assert com_row.max() < 1e-3 * np.abs(jac).max()


def test_lowest_mode_softens_when_a_spacing_shrinks():
    trap = mhz(2.5)
    spac = np.array([5.4, 5.4, 5.4, 5.4]) * 1e-6
    base = spectrum_of(spac, trap)[0]
    for s in range(4):
        tighter = spac.copy()
        tighter[s] -= 0.05e-6
        assert spectrum_of(tighter, trap)[0] < base


def test_fit_never_worse_than_initial_guess():
    trap = mhz(2.47)
    spac = np.array([6.3, 5.0, 5.5, 4.9, 6.1]) * 1e-6
    freqs = spectrum_of(spac, trap)
    meas = SpectrumMeasurement(freqs, trap_freq=trap)
    init = np.full(5, 5.4e-6)
    init_res = math.sqrt(np.mean((spectrum_of(init, trap) - freqs) ** 2))
    fit = fit_spacings(meas, ChainGeometry.uniform(6, 5.4e-6, trap),
                       symmetric=False, initial_spacings=init)
    assert fit.residual <= init_res


def test_mode_count_must_match_ion_count():
    meas = SpectrumMeasurement(mhz(np.array([2.4, 2.45])), trap_freq=mhz(2.45))
    with pytest.raises(ValueError):
        fit_spacings(meas, ChainGeometry.uniform(3, 5.4e-6, mhz(2.45)))


def test_warns_when_top_mode_misses_trap_frequency():
    trap = mhz(2.47)
    freqs = spectrum_of([5.3e-6], trap)
    meas = SpectrumMeasurement(freqs, trap_freq=trap + khz(20.0))
    with pytest.warns(UserWarning, match="center-of-mass"):
        fit_spacings(meas, ChainGeometry.uniform(2, 5.4e-6, trap))
