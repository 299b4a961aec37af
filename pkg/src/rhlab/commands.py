"""Command implementations behind the CLI: each takes a validated config
dict, runs the corresponding pipeline, and writes a reproducible bundle."""

import json
import math
from pathlib import Path

import numpy as np

from .basis import BasisSpec, estimate_dimension, suggest_cutoffs
from .calibrate import SpectrumMeasurement, fit_spacings
from .chain import (ChainGeometry, RHModel, collective_modes,
                    interaction_picture, motional_model,
                    phase_transition_model, rh_mode_spectrum)
from .dynamics import evolve
from .errors import ConfigError
from .ground import ground_state
from .hp import build_A, sigma_z_hp_trajectory, stability
from .meanfield import critical_coupling, solve_b0
from .measure import (DetectionErrorModel, PhaseScan, apply_detection_errors,
                      fit_correlation, phase_scan,
                      spin_outcome_probabilities)
from .operators import build_hamiltonian
from .quench import QuenchSchedule, run_quench
from .runio import (RunBundle, config_hash, load_chain_spec, load_model,
                    model_to_config)
from .states import (QuantumState, all_up_vacuum, correlation,
                     entanglement_entropy, mean_sigma_z, phonon_numbers,
                     sigma_z, top_level_population)
from .units import from_angular, khz, to_angular

__all__ = ["run", "reproduce", "FIGURE_RECIPES"]

_KHZ = lambda x: from_angular(x, "kHz")


def _parse_scan(text):
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except (ValueError, AttributeError) as exc:
        raise ConfigError(f"bad scan spec {text!r}; want start:stop:step") from exc
    if step <= 0:
        raise ConfigError(f"bad scan spec {text!r}")
    # stop < start is an empty scan, not an error: outputs keep their header
    n = max(0, int(math.floor((stop - start) / step + 1e-9)) + 1)
    return start + step * np.arange(n)


def _basis_from_config(config, n_ions, default_parity="even"):
    cutoffs = config.get("cutoffs")
    if cutoffs is None:
        cutoffs = config.get("cutoff", 6)
    if isinstance(cutoffs, str):
        parsed = [int(c) for c in cutoffs.split(",")]
        cutoffs = parsed[0] if len(parsed) == 1 else parsed
    rep = config.get("representation", "local")
    parity = config.get("parity", default_parity)
    return BasisSpec(n_ions, rep, cutoffs, parity)


def _save_state(bundle, name, state, model):
    path = bundle.path(name)
    basis = state.basis
    np.savez(
        path, amplitudes=state.amplitudes, time=state.time,
        n_ions=basis.n_ions, representation=basis.representation,
        cutoffs=np.asarray(basis.cutoffs), parity_sector=basis.parity_sector,
        model_json=json.dumps(model_to_config(model)),
    )
    bundle.outputs.append(path)
    return path


def load_state(path):
    """Load a state saved by the dynamics/quench commands.

    Returns (QuantumState, RHModel).
    """
    data = np.load(path, allow_pickle=False)
    basis = BasisSpec(
        int(data["n_ions"]), str(data["representation"]),
        tuple(int(c) for c in data["cutoffs"]), str(data["parity_sector"]))
    state = QuantumState(data["amplitudes"], basis, float(data["time"]))
    model = load_model(json.loads(str(data["model_json"])))
    return state, model


# -- individual commands -----------------------------------------------------


def _cmd_chain(config, bundle):
    geom, detunings = load_chain_spec(config.get("chain") or config)
    motional = motional_model(geom)
    spectrum = collective_modes(motional)
    unit = "2pi_kHz"
    bundle.write_csv("local_frequencies.csv", ["index", "value", "unit"],
                     [(i, _KHZ(motional.local_freqs[i]), unit)
                      for i in range(geom.n_ions)])
    bundle.write_csv("corrected_frequencies.csv", ["index", "value", "unit"],
                     [(i, _KHZ(motional.corrected_freqs[i]), unit)
                      for i in range(geom.n_ions)])
    bundle.write_csv("hoppings.csv", ["index", "value", "unit"],
                     [(f"{i}-{j}", _KHZ(motional.corrected_hoppings[i, j]), unit)
                      for i in range(geom.n_ions)
                      for j in range(i + 1, geom.n_ions)])
    bundle.write_csv("mode_frequencies.csv", ["index", "value", "unit"],
                     [(k, _KHZ(spectrum.freqs[k]), unit)
                      for k in range(geom.n_ions)])
    summary = {
        "n_ions": geom.n_ions,
        "trap_freq_mhz": from_angular(geom.trap_freq, "MHz"),
        "spacings_um": (geom.spacings * 1e6).tolist(),
    }
    if detunings is not None:
        model = interaction_picture(motional, *detunings)
        bundle.write_json("model.json", model_to_config(model))
        mode = rh_mode_spectrum(model)
        bundle.write_csv("interaction_mode_frequencies.csv",
                         ["index", "value", "unit"],
                         [(k, _KHZ(mode.freqs[k]), unit)
                          for k in range(geom.n_ions)])
        summary["spin_freq_khz"] = _KHZ(model.spin_freq)
        summary["site_freqs_khz"] = [_KHZ(w) for w in model.site_freqs]
    bundle.write_json("summary.json", summary)


def _read_column(path):
    values = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        values.append(float(line.split(",")[0]))
    return np.asarray(values)


def _cmd_calibrate(config, bundle):
    if "spectrum_csv" in config:
        freqs_mhz = _read_column(config["spectrum_csv"])
    else:
        freqs_mhz = np.asarray(_require_list(config, "spectrum_mhz"))
    trap_mhz = config.get("trap_freq_mhz")
    trap = to_angular(float(trap_mhz), "MHz") if trap_mhz else to_angular(
        freqs_mhz[-1], "MHz")
    meas = SpectrumMeasurement(to_angular(freqs_mhz, "MHz"), trap_freq=trap,
                               weights=config.get("weights"))
    template = ChainGeometry.uniform(len(freqs_mhz), 5.4e-6, trap)
    init = config.get("init_spacings_um")
    init = np.asarray(init, dtype=float) * 1e-6 if init is not None else None
    fit = fit_spacings(meas, template, symmetric=config.get("symmetric"),
                       initial_spacings=init)
    bundle.log(f"fit converged={fit.converged} after {fit.iterations} iterations")
    bundle.write_json("report.json", {
        "spacings_um": (fit.spacings * 1e6).tolist(),
        "residual_hz": fit.residual / (2 * math.pi),
        "converged": fit.converged,
        "iterations": fit.iterations,
    })


def _require_list(config, key):
    value = config.get(key)
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"missing or invalid {key!r}")
    return value


def _cmd_meanfield(config, bundle):
    model = load_model(config["model"])
    spectrum = rh_mode_spectrum(model)
    soft = spectrum.freqs[0]
    if soft <= 0:
        raise ConfigError("mean-field analysis needs an equilibrium-mode model")
    g_values = khz(_parse_scan(config.get("g_scan", "0:8:0.25")))
    rows = []
    for g in g_values:
        sol = solve_b0(g, model.spin_freq, soft, spectrum.vectors[:, 0])
        rows.append((_KHZ(g), sol.b0_amplitude, float(np.mean(sol.spin_x)),
                     sol.branch))
    bundle.write_csv("meanfield_scan.csv",
                     ["g_khz", "b0", "mean_sigma_x", "branch"], rows)
    bundle.write_json("summary.json", {
        "critical_coupling_khz": _KHZ(
            critical_coupling(model.spin_freq, soft)),
        "soft_mode_khz": _KHZ(soft),
    })


def _cmd_ground(config, bundle):
    model = load_model(config["model"])
    g = config.get("g_khz")
    g = khz(float(g)) if g is not None else None
    basis = _basis_from_config(config, model.n_ions, default_parity="even")
    hamiltonian = build_hamiltonian(model, basis,
                                    budget=config.get("budget", 1 << 23))
    result = ground_state(hamiltonian, g=g, seed=bundle.seed)
    n = model.n_ions
    corr = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            corr[i, j] = corr[j, i] = correlation(result.state, i, j)
    bundle.write_csv("correlations.csv", ["i", "j", "value"],
                     [(i, j, corr[i, j]) for i in range(n)
                      for j in range(i + 1, n)])
    bundle.write_json("report.json", {
        "energy": result.energy,
        "excited_energy": result.excited_energy,
        "gap": result.gap,
        "mean_sigma_z": mean_sigma_z(result.state),
        "dimension": basis.size,
    })


def _dynamics_observables(model, basis, want):
    spectrum = rh_mode_spectrum(model)
    obs = {}
    n = basis.n_ions
    if "sz" in want:
        for i in range(n):
            obs[f"sz_{i}"] = (lambda i: lambda s: sigma_z(s, i))(i)
    if "entropy" in want and basis.representation == "local" and n > 1:
        obs["entropy_half"] = lambda s: entanglement_entropy(s, n // 2)
    if "phonons" in want:
        def phonons(s):
            numbers = phonon_numbers(s, spectrum)
            return np.concatenate([numbers.local, numbers.collective])
        obs["phonons"] = phonons
    return obs


def _cmd_dynamics(config, bundle):
    model = load_model(config["model"])
    g = config.get("g_khz")
    if g is not None:
        model = model.with_coupling(khz(float(g)))
    if model.coupling is None:
        raise ConfigError("no coupling: set it in the model or pass g_khz")
    basis = _basis_from_config(config, model.n_ions, default_parity="even")
    hamiltonian = build_hamiltonian(model, basis,
                                    budget=config.get("budget", 1 << 23))
    t_max = float(config.get("t_max_us", 400.0)) * 1e-6
    samples = int(config.get("samples", 81))
    t_grid = np.linspace(0.0, t_max, samples)
    want = set(config.get("observables", ["sz", "entropy", "phonons"]))
    obs = _dynamics_observables(model, basis, want)
    result = evolve(all_up_vacuum(basis), hamiltonian, t_grid,
                    observables=obs)
    rows = []
    n = basis.n_ions
    for ti, t in enumerate(result.times):
        t_us = t * 1e6
        for i in range(n):
            if f"sz_{i}" in result.records:
                rows.append((t_us, i, "sigma_z", result[f"sz_{i}"][ti]))
        if "entropy_half" in result.records:
            rows.append((t_us, n // 2, "entropy", result["entropy_half"][ti]))
        if "phonons" in result.records:
            vals = result["phonons"][ti]
            for i in range(n):
                rows.append((t_us, i, "n_local", vals[i]))
            for k in range(n):
                rows.append((t_us, k, "n_collective", vals[n + k]))
    bundle.write_csv("trajectory.csv",
                     ["t_us", "site_or_mode", "observable", "value"], rows)
    leakage = top_level_population(result.final_state)
    if leakage.max() > 1e-3:
        bundle.log(f"warning: top-Fock-level population up to "
                   f"{leakage.max():.2e}; cutoff may be clipping the state")
    bundle.write_json("metadata.json", {
        "model_hash": config_hash(model_to_config(model)),
        "cutoffs": list(basis.cutoffs),
        "representation": basis.representation,
        "parity_sector": basis.parity_sector,
        "dimension": basis.size,
        "max_norm_drift": result.max_norm_drift,
        "norm_tolerance": 1e-9,
        "final_top_level_population": leakage.tolist(),
    })
    if config.get("save_state", True):
        _save_state(bundle, "final_state.npz", result.final_state, model)


def _cmd_quench(config, bundle):
    model = load_model(config["model"])
    g_max = khz(float(config["g_max_khz"]))
    tau = float(config.get("tau_ms", 1.0)) * 1e-3
    shape = "reverse_appended" if config.get("reverse", False) else "exponential_ramp"
    t_total = config.get("t_total_ms")
    schedule = QuenchSchedule(shape, tau=tau, g_max=g_max,
                              t_total=float(t_total) * 1e-3 if t_total else None)
    basis = _basis_from_config(config, model.n_ions, default_parity="even")
    result = run_quench(model, schedule, basis,
                        samples_per_ramp=int(config.get("samples", 50)))
    bundle.write_csv("trajectory.csv", ["t_us", "g_khz", "mean_sigma_z"],
                     [(t * 1e6, _KHZ(schedule(t)), sz)
                      for t, sz in zip(result.times, result.mean_sigma_z)])
    n = model.n_ions
    bundle.write_csv("correlations.csv", ["i", "j", "value"],
                     [(i, j, result.correlations[i, j])
                      for i in range(n) for j in range(i + 1, n)])
    bundle.write_json("summary.json", {
        "final_mean_sigma_z": float(result.mean_sigma_z[-1]),
        "peak_mean_sigma_z": float(result.mean_sigma_z.max()),
        "g_max_khz": _KHZ(g_max),
        "tau_ms": tau * 1e3,
        "t_total_ms": schedule.t_total * 1e3,
        "shape": shape,
    })
    if config.get("save_state", True):
        _save_state(bundle, "final_state.npz", result.evolution.final_state,
                    model)


def _cmd_hp(config, bundle):
    model = load_model(config["model"])
    g = config.get("g_khz")
    if g is not None:
        model = model.with_coupling(khz(float(g)))
    if model.coupling is None:
        raise ConfigError("no coupling: set it in the model or pass g_khz")
    system = build_A(model)
    report = stability(system)
    t_max = float(config.get("t_max_us", 400.0)) * 1e-6
    samples = int(config.get("samples", 81))
    t_grid = np.linspace(0.0, t_max, samples)
    traj = sigma_z_hp_trajectory(system, t_grid)
    rows = [(t * 1e6, i, traj[ti, i])
            for ti, t in enumerate(t_grid) for i in range(model.n_ions)]
    bundle.write_csv("sigma_z_hp.csv", ["t_us", "site", "value"], rows)
    bundle.write_json("eigenvalues.json", {
        "stable": report.stable,
        "max_real_part": report.max_real_part,
        "tolerance": report.tolerance,
        "real": report.eigenvalues.real.tolist(),
        "imag": report.eigenvalues.imag.tolist(),
    })
    scan = config.get("stability_scan")
    if scan:
        g_values = khz(_parse_scan(scan))
        rows = []
        for gv in g_values:
            rep = stability(build_A(model.with_coupling(gv)))
            rows.append((_KHZ(gv), int(rep.stable), rep.max_real_part))
        bundle.write_csv("stability_scan.csv",
                         ["g_khz", "stable", "max_real_part"], rows)


def _cmd_measure(config, bundle):
    source = config.get("trajectory") or config.get("state")
    if source is None:
        raise ConfigError("measure needs 'trajectory' (run dir or .npz state)")
    source = Path(source)
    if source.is_dir():
        source = source / "final_state.npz"
    if not source.exists():
        raise ConfigError(f"no saved state found at {source}")
    state, model = load_state(source)
    pair = config.get("pair", "0,1")
    if isinstance(pair, str):
        pair = tuple(int(p) for p in pair.split(","))
    i, j = pair
    n_phases = int(config.get("phases", 12))
    phases = np.linspace(0.0, math.pi, max(n_phases, 5))
    scan = phase_scan(state, i, j, phases)
    error_model = DetectionErrorModel(
        crosstalk=float(config.get("eps_c", 0.0)),
        flip=float(config.get("eps_0", 0.0)))
    n_shots = int(config.get("shots", 0))
    rng = np.random.default_rng(bundle.seed)
    measured = []
    for phi in phases:
        probs = spin_outcome_probabilities(state, i, j, phi)
        probs = apply_detection_errors(probs, error_model)
        if n_shots > 0:
            counts = rng.multinomial(n_shots, probs)
            probs = counts / n_shots
        measured.append(probs[0] + probs[3] - probs[1] - probs[2])
    measured = np.asarray(measured)
    rows = [(phi, scan.correlations[k], measured[k])
            for k, phi in enumerate(phases)]
    bundle.write_csv("phase_scan.csv", ["phi", "c_exact", "c_measured"], rows)
    fit_exact = fit_correlation(scan)
    # the measured curve is sigma_phi sigma_phi minus the product of means
    # only when means vanish; report the raw parity-correlation fit
    fit_meas = fit_correlation(PhaseScan(phases, np.clip(measured, -1, 1),
                                         (i, j)))
    bundle.write_json("fit.json", {
        "pair": [i, j],
        "exact": _fit_payload(fit_exact),
        "measured": _fit_payload(fit_meas),
        "eps_c": error_model.crosstalk,
        "eps_0": error_model.flip,
        "shots": n_shots,
    })


def _fit_payload(fit):
    return {
        "amplitude": fit.amplitude,
        "phase_offset": None if math.isnan(fit.phase_offset) else fit.phase_offset,
        "constant": fit.constant,
        "residual": fit.residual,
        "degenerate": fit.degenerate,
    }


def _cmd_estimate(config, bundle):
    payload = {}
    if "model" in config:
        model = load_model(config["model"])
        g = config.get("g_khz")
        if g is not None:
            model = model.with_coupling(khz(float(g)))
        suggestion = suggest_cutoffs(model,
                                     float(config.get("target_error", 1e-3)))
        payload["mean_phonons"] = [
            None if not np.isfinite(x) else x for x in suggestion.mean_phonons]
        payload["cutoffs"] = suggestion.cutoffs.tolist()
        payload["resonant_modes"] = np.flatnonzero(suggestion.resonant).tolist()
        usable = suggestion.cutoffs[suggestion.cutoffs >= 0]
        if len(usable) == suggestion.cutoffs.size:
            dim, log2 = estimate_dimension(model.n_ions, usable)
            payload["dimension"] = dim
            payload["log2_dimension"] = log2
    else:
        n_ions = int(config.get("n_ions", 0))
        if n_ions < 1:
            raise ConfigError("estimate needs 'model' or 'n_ions'")
        cutoffs = config.get("cutoffs", config.get("cutoff", 6))
        if isinstance(cutoffs, str):
            parsed = [int(c) for c in cutoffs.split(",")]
            cutoffs = parsed[0] if len(parsed) == 1 else parsed
        dim, log2 = estimate_dimension(n_ions, cutoffs)
        payload["dimension"] = dim
        payload["log2_dimension"] = log2
    bundle.write_json("report.json", payload)


_COMMANDS = {
    "chain": _cmd_chain,
    "calibrate": _cmd_calibrate,
    "meanfield": _cmd_meanfield,
    "ground": _cmd_ground,
    "dynamics": _cmd_dynamics,
    "quench": _cmd_quench,
    "hp": _cmd_hp,
    "measure": _cmd_measure,
    "estimate": _cmd_estimate,
}


def run(config: dict) -> RunBundle:
    """Validate and execute a run configuration; returns the output bundle."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a mapping")
    command = config.get("command")
    if command == "reproduce":
        return reproduce(config.get("figure", ""), config.get("out"),
                         seed=config.get("seed", 0))
    if command not in _COMMANDS:
        raise ConfigError(
            f"unknown command {command!r}; valid: {sorted(_COMMANDS)} + "
            f"['reproduce']")
    config = dict(config)
    config.setdefault("seed", 0)
    out = config.get("out") or f"rhlab-out/{command}-{config_hash(config)}"
    bundle = RunBundle(config=config, out_dir=out)
    _COMMANDS[command](config, bundle)
    return bundle.finalize()


# -- figure recipes ----------------------------------------------------------


def _paper_chain(n_ions, modes_mhz, blue_khz, red_khz):
    """Measured-spectrum -> fitted-geometry -> interaction-picture model."""
    meas = SpectrumMeasurement(to_angular(np.asarray(modes_mhz), "MHz"),
                               trap_freq=to_angular(modes_mhz[-1], "MHz"))
    template = ChainGeometry.uniform(n_ions, 5.4e-6, meas.trap_freq)
    fit = fit_spacings(meas, template)
    geom = ChainGeometry(fit.spacings, meas.trap_freq)
    return interaction_picture(motional_model(geom), khz(blue_khz),
                               khz(red_khz))


DYNAMICS_SETS = {
    2: dict(modes_mhz=[2.3837, 2.4422], blue_khz=31.25, red_khz=-27.25),
    4: dict(modes_mhz=[2.4021, 2.4264, 2.4460, 2.4607], blue_khz=31.28,
            red_khz=-27.28),
    16: dict(modes_mhz=[2.3442, 2.357, 2.370, 2.381, 2.393, 2.403, 2.413,
                        2.422, 2.431, 2.439, 2.446, 2.452, 2.458, 2.463,
                        2.467, 2.4700], blue_khz=65.0, red_khz=-61.0),
}


def dynamics_model(n_ions) -> RHModel:
    """The calibrated dynamics-study chain for N in {2, 4, 16}."""
    try:
        params = DYNAMICS_SETS[n_ions]
    except KeyError:
        raise ConfigError(f"no dynamics parameter set for N={n_ions}; "
                          f"have {sorted(DYNAMICS_SETS)}") from None
    return _paper_chain(n_ions, **params)


def _recipe_fig2f(bundle):
    """Rescaled nearest-neighbour correlation vs coupling for N=2 and 4."""
    xs = np.array([0.5, 0.8, 0.9, 1.0, 1.05, 1.1, 1.2, 1.3, 1.5])
    rows = []
    for n in (2, 4):
        model = phase_transition_model(n, khz(2.0))
        gc = critical_coupling(model.spin_freq, rh_mode_spectrum(model).freqs[0])
        basis = BasisSpec(n, "local", 10, "even")
        hamiltonian = build_hamiltonian(model, basis)
        for x in xs:
            gs = ground_state(hamiltonian, g=x * gc, seed=bundle.seed)
            c = abs(correlation(gs.state, n // 2 - 1, n // 2))
            rows.append((n, x, c, n**0.25 * c))
        bundle.log(f"N={n}: g_c_mf = {_KHZ(gc):.4f} kHz")
    bundle.write_csv("rescaled_correlation.csv",
                     ["n_ions", "g_over_gc_mf", "c_nn_abs", "rescaled"], rows)


def _recipe_fig3(bundle):
    """Small-N dynamics: magnetization, entropy and phonon numbers."""
    t_grid = np.linspace(0.0, 400e-6, 81)
    runs = [(2, 2.0, 8), (2, 7.0, 8), (4, 1.0, 5), (4, 6.0, 10)]
    rows = []
    for n, g_khz_val, cutoff in runs:
        model = dynamics_model(n).with_coupling(khz(g_khz_val))
        basis = BasisSpec(n, "local", cutoff, "even")
        hamiltonian = build_hamiltonian(model, basis)
        obs = _dynamics_observables(model, basis, {"sz", "entropy", "phonons"})
        result = evolve(all_up_vacuum(basis), hamiltonian, t_grid,
                        observables=obs)
        for ti, t in enumerate(result.times):
            for i in range(n):
                rows.append((n, g_khz_val, t * 1e6, i, "sigma_z",
                             result[f"sz_{i}"][ti]))
                rows.append((n, g_khz_val, t * 1e6, i, "n_local",
                             result["phonons"][ti][i]))
            rows.append((n, g_khz_val, t * 1e6, n // 2, "entropy",
                         result["entropy_half"][ti]))
        bundle.log(f"N={n} g={g_khz_val} kHz done (dim {basis.size})")
    bundle.write_csv("dynamics.csv",
                     ["n_ions", "g_khz", "t_us", "site", "observable", "value"],
                     rows)


def _recipe_figS5(bundle):
    """Forward+reverse quench of the two-ion chain."""
    model = phase_transition_model(2, khz(2.0))
    gc = critical_coupling(model.spin_freq, rh_mode_spectrum(model).freqs[0])
    rows = []
    for tau_ms in (1.0, 0.5):
        schedule = QuenchSchedule("reverse_appended", tau=tau_ms * 1e-3,
                                  g_max=1.3 * gc)
        result = run_quench(model, schedule, BasisSpec(2, "local", 12, "even"))
        rows.extend((tau_ms, t * 1e6, _KHZ(schedule(t)), sz)
                    for t, sz in zip(result.times, result.mean_sigma_z))
        bundle.log(f"tau={tau_ms} ms: final <sigma_z> = "
                   f"{result.mean_sigma_z[-1]:.6f}")
    bundle.write_csv("quench_magnetization.csv",
                     ["tau_ms", "t_us", "g_khz", "mean_sigma_z"], rows)


def _recipe_figS6(bundle):
    """Cutoff comparison for the four-ion strong-coupling dynamics."""
    model = dynamics_model(4).with_coupling(khz(6.0))
    t_grid = np.linspace(0.0, 400e-6, 81)
    rows = []
    for cutoff in (6, 8, 10):
        basis = BasisSpec(4, "local", cutoff, "even")
        hamiltonian = build_hamiltonian(model, basis)
        obs = {f"sz_{i}": (lambda i: lambda s: sigma_z(s, i))(i)
               for i in range(4)}
        result = evolve(all_up_vacuum(basis), hamiltonian, t_grid,
                        observables=obs)
        rows.extend((cutoff, t * 1e6, i, result[f"sz_{i}"][ti])
                    for ti, t in enumerate(result.times) for i in range(4))
        bundle.log(f"cutoff {cutoff}: dim {basis.size}")
    bundle.write_csv("cutoff_comparison.csv",
                     ["cutoff", "t_us", "site", "sigma_z"], rows)


def _recipe_figS7(bundle):
    """Collective-mode phonon numbers for the four-ion strong coupling."""
    model = dynamics_model(4).with_coupling(khz(6.0))
    suggestion = suggest_cutoffs(model, 1e-4)
    cutoffs = tuple(int(c) for c in np.maximum(suggestion.cutoffs, 2))
    basis = BasisSpec(4, "collective", cutoffs, "even")
    hamiltonian = build_hamiltonian(model, basis)
    spectrum = rh_mode_spectrum(model)
    t_grid = np.linspace(0.0, 400e-6, 81)
    result = evolve(
        all_up_vacuum(basis), hamiltonian, t_grid,
        observables={"nk": lambda s: phonon_numbers(s, spectrum).collective})
    rows = [(t * 1e6, k, _KHZ(spectrum.freqs[k]), result["nk"][ti][k])
            for ti, t in enumerate(result.times) for k in range(4)]
    bundle.write_csv("collective_numbers.csv",
                     ["t_us", "mode", "delta_k_khz", "n_k"], rows)
    bundle.write_json("occupancy_estimates.json", {
        "mean_phonons_estimate": suggestion.mean_phonons.tolist(),
        "cutoffs": list(cutoffs),
    })


def _recipe_figS8(bundle):
    """Exact vs linearized spin dynamics at weak and strong coupling."""
    t_grid = np.linspace(0.0, 400e-6, 81)
    rows = []
    for g_khz_val in (1.0, 6.0):
        model = dynamics_model(4).with_coupling(khz(g_khz_val))
        suggestion = suggest_cutoffs(model, 1e-4)
        cutoffs = tuple(int(c) for c in np.maximum(suggestion.cutoffs, 2))
        basis = BasisSpec(4, "collective", cutoffs, "even")
        hamiltonian = build_hamiltonian(model, basis)
        obs = {f"sz_{i}": (lambda i: lambda s: sigma_z(s, i))(i)
               for i in range(4)}
        result = evolve(all_up_vacuum(basis), hamiltonian, t_grid,
                        observables=obs)
        hp_traj = sigma_z_hp_trajectory(build_A(model), t_grid)
        for ti, t in enumerate(t_grid):
            for i in range(4):
                rows.append((g_khz_val, t * 1e6, i,
                             result[f"sz_{i}"][ti], hp_traj[ti, i]))
        bundle.log(f"g={g_khz_val} kHz: collective cutoffs {cutoffs}")
    bundle.write_csv("exact_vs_hp.csv",
                     ["g_khz", "t_us", "site", "sz_exact", "sz_hp"], rows)


FIGURE_RECIPES = {
    "fig2f-smallN": _recipe_fig2f,
    "fig3-smallN": _recipe_fig3,
    "figS5": _recipe_figS5,
    "figS6": _recipe_figS6,
    "figS7": _recipe_figS7,
    "figS8": _recipe_figS8,
}


def reproduce(figure: str, out=None, seed=0) -> RunBundle:
    """Run the desk-scale analogue of one of the paper-style figures."""
    if figure not in FIGURE_RECIPES:
        raise ConfigError(
            f"unknown figure id {figure!r}; valid ids: "
            f"{sorted(FIGURE_RECIPES)}")
    config = {"command": "reproduce", "figure": figure, "seed": seed}
    out = out or f"rhlab-out/reproduce-{figure}-{config_hash(config)}"
    bundle = RunBundle(config=config, out_dir=out)
    FIGURE_RECIPES[figure](bundle)
    return bundle.finalize()
