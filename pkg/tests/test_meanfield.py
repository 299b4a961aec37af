"""Mean-field transition point and self-consistent solutions."""

import math

import numpy as np
import pytest

from rhlab import (critical_coupling, mode_spectrum, other_mode_amplitudes,
                   solve_b0)
from rhlab.errors import SingularModeError
from rhlab.units import khz


def uniform_mode(n):
    return np.full(n, 1.0 / math.sqrt(n))


def test_critical_coupling_arithmetic():
    assert critical_coupling(4.0, 4.0) == 2.0
    with pytest.raises(ValueError):
        critical_coupling(-1.0, 2.0)
    with pytest.raises(ValueError):
        critical_coupling(1.0, 0.0)


def test_critical_coupling_paper_value():
    # delta0 = 2 pi x 2 kHz, omega0 = 2 pi x 42.3 kHz -> 2 pi x 4.6 kHz
    gc = critical_coupling(khz(42.3), khz(2.0))
    assert gc == pytest.approx(khz(4.6), rel=5e-3)


def test_critical_coupling_matches_threshold_bisection():
    # oracle: bisect the threshold condition 4 g^2/(delta0 omega0) = 1
    w0, d0 = khz(37.0), khz(2.2)
    lo, hi = 0.0, khz(100.0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 4.0 * mid**2 / (d0 * w0) < 1.0:
            lo = mid
        else:
            hi = mid
    assert critical_coupling(w0, d0) == pytest.approx(0.5 * (lo + hi),
                                                      rel=1e-12)


def test_trivial_branch_below_threshold():
    w0, d0 = khz(30.0), khz(2.0)
    gc = critical_coupling(w0, d0)
    sol = solve_b0(0.8 * gc, w0, d0, uniform_mode(4))
    assert sol.branch == "trivial"
    assert sol.b0_amplitude == 0.0
    assert np.all(sol.spin_x == 0.0)


def test_uniform_closed_form():
    # oracle: solving the uniform self-consistency equation by hand gives
    # <b0>^2 = N (16 g^4/d0^2 - w0^2) / (16 g^2)
    n, w0, d0 = 6, khz(28.0), khz(2.0)
    g = 1.4 * critical_coupling(w0, d0)
    sol = solve_b0(g, w0, d0, uniform_mode(n))
    closed = math.sqrt(n * (16 * g**4 / d0**2 - w0**2) / (16 * g**2))
    assert sol.branch == "broken"
    assert sol.b0_amplitude == pytest.approx(closed, rel=1e-10)


def test_strong_coupling_spins_align():
    w0, d0 = khz(28.0), khz(2.0)
    sol = solve_b0(khz(400.0), w0, d0, uniform_mode(2))
    assert np.all(sol.spin_x < -0.999)
    assert np.all(sol.spin_angles < 0.05)


def test_bifurcation_is_continuous():
    w0, d0 = khz(30.0), khz(2.0)
    gc = critical_coupling(w0, d0)
    just_above = solve_b0(gc * (1 + 1e-8), w0, d0, uniform_mode(3))
    assert just_above.branch == "broken"
    assert just_above.b0_amplitude < 0.05


def test_square_root_growth_near_threshold():
    w0, d0 = khz(30.0), khz(2.0)
    gc = critical_coupling(w0, d0)
    eps = 1e-5
    b1 = solve_b0(gc * (1 + eps), w0, d0, uniform_mode(4)).b0_amplitude
    b2 = solve_b0(gc * (1 + 4 * eps), w0, d0, uniform_mode(4)).b0_amplitude
    assert b2 / b1 == pytest.approx(2.0, rel=1e-2)


def test_sign_flip_partner_solves_too():
    # Z2: if <b0> solves with spins s_i, then -<b0> with -s_i does; the
    # solver returns the positive representative
    w0, d0 = khz(25.0), khz(2.0)
    v = uniform_mode(3)
    g = 2.0 * critical_coupling(w0, d0)
    sol = solve_b0(g, w0, d0, v)
    assert sol.b0_amplitude > 0

    def rhs(b0, spins):
        return -g * float(v @ spins) / d0

    assert rhs(sol.b0_amplitude, sol.spin_x) == pytest.approx(
        sol.b0_amplitude, rel=1e-9)
    assert rhs(-sol.b0_amplitude, -sol.spin_x) == pytest.approx(
        -sol.b0_amplitude, rel=1e-9)


def test_other_modes_trivial_branch():
    w0, d0 = khz(30.0), khz(2.0)
    spectrum = mode_spectrum([khz(28.0), khz(28.0)],
                             khz(26.0) * (1 - np.eye(2)))
    sol = solve_b0(0.5 * critical_coupling(w0, spectrum.freqs[0]), w0,
                   spectrum.freqs[0], spectrum.vectors[:, 0])
    amps = other_mode_amplitudes(sol, sol.coupling, w0, spectrum)
    assert np.all(amps == 0.0)


def test_other_modes_two_ion_uniform():
    # uniform soft mode (1,1)/sqrt(2): the antisymmetric mode picks up
    # nothing, and the soft-mode entry reproduces <b0>
    w0 = khz(28.0)
    spectrum = mode_spectrum([khz(30.0), khz(30.0)],
                             khz(28.0) * (1 - np.eye(2)))
    d0 = spectrum.freqs[0]
    g = 1.6 * critical_coupling(w0, d0)
    sol = solve_b0(g, w0, d0, spectrum.vectors[:, 0])
    amps = other_mode_amplitudes(sol, g, w0, spectrum)
    assert amps[0] == pytest.approx(sol.b0_amplitude, rel=1e-9)
    # hand evaluation: -g (v_1 . spins) / delta_1 with uniform spins
    hand = -g * float(spectrum.vectors[:, 1] @ sol.spin_x) / spectrum.freqs[1]
    assert amps[1] == pytest.approx(hand, abs=1e-12)
    assert abs(amps[1]) < 1e-10


def test_other_modes_near_critical_stay_small():
    w0 = khz(28.0)
    spectrum = mode_spectrum([khz(10.0), khz(11.0), khz(10.0)],
                             khz(4.0) * (1 - np.eye(3)))
    d0 = spectrum.freqs[0]
    g = 1.02 * critical_coupling(w0, d0)
    sol = solve_b0(g, w0, d0, spectrum.vectors[:, 0])
    amps = other_mode_amplitudes(sol, g, w0, spectrum)
    assert abs(amps[0]) == pytest.approx(sol.b0_amplitude, rel=1e-9)
    assert np.all(np.abs(amps[1:]) < 0.2 * abs(sol.b0_amplitude))


def test_singular_mode_rejected():
    w0 = khz(28.0)
    spectrum = mode_spectrum([khz(1.0), -khz(1.0)], np.zeros((2, 2)))
    bad = mode_spectrum([0.0, khz(1.0)], np.zeros((2, 2)))
    sol = solve_b0(khz(10.0), w0, khz(1.0), uniform_mode(2))
    with pytest.raises(SingularModeError):
        other_mode_amplitudes(sol, khz(10.0), w0, bad)
