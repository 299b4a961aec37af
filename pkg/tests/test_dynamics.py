"""Time evolution: conservation laws and integrator accuracy."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from rhlab import (BasisSpec, QuenchSchedule, RHModel, all_up_vacuum,
                   build_hamiltonian, evolve, mean_sigma_z,
                   parity_expectation, sigma_z)
from rhlab.units import khz


def small_model(g=1.5):
    return RHModel(khz(2.0), [khz(1.0), khz(-0.5)],
                   khz(3.0) * (1 - np.eye(2)), coupling=khz(g))


def test_zero_coupling_keeps_magnetization():
    model = small_model(g=0.0)
    basis = BasisSpec(2, "local", 3)
    ham = build_hamiltonian(model, basis)
    t_grid = np.linspace(0, 200e-6, 21)
    res = evolve(all_up_vacuum(basis), ham, t_grid,
                 observables={"sz": mean_sigma_z})
    assert np.allclose(res["sz"], 1.0, atol=1e-12)


def test_constant_hamiltonian_conservation():
    model = small_model(g=4.0)
    basis = BasisSpec(2, "local", 8, "even")
    ham = build_hamiltonian(model, basis)
    h = ham.matrix()
    t_grid = np.linspace(0, 1e-3, 51)  # 1 ms

    def energy(s):
        return float(np.real(np.vdot(s.amplitudes, h @ s.amplitudes)))

    res = evolve(all_up_vacuum(basis), ham, t_grid,
                 observables={"E": energy, "P": parity_expectation})
    assert res.max_norm_drift < 1e-9
    e = res["E"]
    assert np.max(np.abs(e - e[0])) < 1e-8 * max(abs(e[0]), khz(1.0))
    assert np.max(np.abs(res["P"] - res["P"][0])) < 1e-8


def test_constant_hamiltonian_matches_dense_expm():
    model = small_model(g=3.0)
    basis = BasisSpec(2, "local", 4)
    ham = build_hamiltonian(model, basis)
    psi0 = all_up_vacuum(basis)
    t = 150e-6
    res = evolve(psi0, ham, np.array([0.0, t]))
    oracle = expm(-1j * ham.matrix().toarray() * t) @ psi0.amplitudes
    assert np.linalg.norm(res.final_state.amplitudes - oracle) < 1e-10


def test_time_dependent_matches_ode_oracle():
    model = small_model()
    basis = BasisSpec(2, "local", 4)
    ham = build_hamiltonian(model, basis)
    psi0 = all_up_vacuum(basis)
    g_max, tau = khz(5.0), 80e-6

    def sched(t):
        return g_max * (1 - np.exp(-t / tau))

    hs = ham.static.toarray()
    hc = ham.coupling_op.toarray()
    sol = solve_ivp(lambda t, y: -1j * ((hs + sched(t) * hc) @ y),
                    (0, 250e-6), psi0.amplitudes.astype(complex),
                    rtol=1e-12, atol=1e-14, method="DOP853")
    res = evolve(psi0, ham, np.array([0.0, 250e-6]), g_schedule=sched,
                 max_step=2e-6)
    assert np.linalg.norm(res.final_state.amplitudes - sol.y[:, -1]) < 1e-7


def test_integrator_fourth_order_convergence():
    model = small_model()
    basis = BasisSpec(2, "local", 3)
    ham = build_hamiltonian(model, basis)
    psi0 = all_up_vacuum(basis)
    sched = lambda t: khz(6.0) * (1 - np.exp(-t / 60e-6))
    ref = evolve(psi0, ham, np.array([0.0, 200e-6]), g_schedule=sched,
                 max_step=0.25e-6).final_state.amplitudes
    errs = []
    for step in (8e-6, 4e-6, 2e-6):
        out = evolve(psi0, ham, np.array([0.0, 200e-6]), g_schedule=sched,
                     max_step=step).final_state.amplitudes
        errs.append(np.linalg.norm(out - ref))
    assert errs[0] / errs[1] > 8
    assert errs[1] / errs[2] > 8


def test_schedule_object_is_accepted():
    model = small_model()
    basis = BasisSpec(2, "local", 3)
    ham = build_hamiltonian(model, basis)
    sched = QuenchSchedule("exponential_ramp", tau=100e-6, g_max=khz(3.0))
    res = evolve(all_up_vacuum(basis), ham, np.linspace(0, 300e-6, 4),
                 g_schedule=sched, observables={"sz": mean_sigma_z})
    assert res.max_norm_drift < 1e-9
    assert len(res["sz"]) == 4


def test_grid_validation():
    model = small_model()
    basis = BasisSpec(2, "local", 2)
    ham = build_hamiltonian(model, basis)
    psi0 = all_up_vacuum(basis)
    with pytest.raises(ValueError):
        evolve(psi0, ham, np.array([0.0, -1e-6]))
    with pytest.raises(ValueError):
        evolve(psi0, ham, np.array([1e-6, 1e-6]))
    with pytest.raises(ValueError):
        evolve(psi0, ham, np.array([]))


def test_missing_coupling_rejected():
    model = RHModel(khz(2.0), [khz(1.0)], np.zeros((1, 1)))
    basis = BasisSpec(1, "local", 2)
    ham = build_hamiltonian(model, basis)
    with pytest.raises(ValueError, match="coupling"):
        evolve(all_up_vacuum(basis), ham, np.array([0.0, 1e-6]))


def test_representation_equivalence_for_spin_observables():
    # local and collective evolutions agree on spin observables within the
    # (tiny) truncation mismatch at matched generous cutoffs
    model = small_model(g=2.0)
    t_grid = np.linspace(0, 200e-6, 9)
    records = {}
    for rep in ("local", "collective"):
        basis = BasisSpec(2, rep, 8, "even", total_cutoff=8)
        ham = build_hamiltonian(model, basis)
        res = evolve(all_up_vacuum(basis), ham, t_grid,
                     observables={"sz0": lambda s: sigma_z(s, 0)})
        records[rep] = res["sz0"]
    assert np.max(np.abs(records["local"] - records["collective"])) < 1e-8


def test_mirror_symmetric_dynamics_exactly_symmetric():
    # mirror-symmetric model + mirror-symmetric initial state: the two ends
    # of the chain stay exchange-symmetric along the whole trajectory
    model = RHModel(khz(2.0), [khz(1.0), khz(-0.3), khz(-0.3), khz(1.0)],
                    khz(np.array([[0.0, 3.0, 0.4, 0.1],
                                  [3.0, 0.0, 3.0, 0.4],
                                  [0.4, 3.0, 0.0, 3.0],
                                  [0.1, 0.4, 3.0, 0.0]])),
                    coupling=khz(2.0))
    basis = BasisSpec(4, "local", 4, "even")
    ham = build_hamiltonian(model, basis)
    t_grid = np.linspace(0, 200e-6, 11)
    obs = {f"sz{i}": (lambda i: lambda s: sigma_z(s, i))(i) for i in range(4)}
    res = evolve(all_up_vacuum(basis), ham, t_grid, observables=obs)
    assert np.max(np.abs(res["sz0"] - res["sz3"])) < 1e-10
    assert np.max(np.abs(res["sz1"] - res["sz2"])) < 1e-10
