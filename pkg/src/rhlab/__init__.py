"""rhlab: a numerical laboratory for the trapped-ion Rabi-Hubbard model.

The package derives the spin-boson lattice model realized by a laser-driven
ion chain, calibrates chain spacings from measured mode spectra, solves
mean-field and exact (truncated Fock space) ground states, simulates quenches
across the quantum phase transition and generic dynamics, runs the linearized
(Holstein-Primakoff) dynamics with stability analysis, and models the
phase-scan correlation measurement with its detection-error channel.
"""

__version__ = "0.1.0"

from .chain import (
    ChainGeometry,
    ModeSpectrum,
    MotionalModel,
    RHModel,
    collective_modes,
    coupling_from_laser,
    interaction_picture,
    mode_spectrum,
    motional_model,
    phase_transition_model,
    rabi_from_coupling,
    rh_mode_spectrum,
)
from .basis import BasisSpec, CutoffSuggestion, estimate_dimension, suggest_cutoffs
from .calibrate import SpacingFit, SpectrumMeasurement, fit_jacobian, fit_spacings
from .dynamics import EvolutionResult, evolve
from .errors import (
    ChainUnstableError,
    ConfigError,
    DimensionBudgetError,
    NonEquilibriumModelError,
    RhlabError,
    SingularModeError,
)
from .ground import GroundStateResult, ground_state
from .hp import (
    LinearizedSystem,
    StabilityReport,
    build_A,
    propagate,
    sigma_z_hp,
    sigma_z_hp_trajectory,
    stability,
    stability_map,
    validity_window,
)
from .meanfield import (
    MeanFieldSolution,
    critical_coupling,
    other_mode_amplitudes,
    solve_b0,
)
from .measure import (
    CorrelationFit,
    DetectionErrorModel,
    PhaseScan,
    apply_detection_errors,
    fit_correlation,
    phase_scan,
    sample_shots,
    spin_outcome_probabilities,
)
from .operators import HamiltonianOperator, build_hamiltonian, parity_operator
from .quench import (
    AdiabaticityReport,
    QuenchResult,
    QuenchSchedule,
    adiabaticity_report,
    g_at,
    magnetization_asymmetry,
    rescale_for_crossing,
    run_quench,
    unscale_crossing,
)
from .states import (
    PhononNumbers,
    QuantumState,
    all_down_vacuum,
    all_up_vacuum,
    check_truncation,
    correlation,
    entanglement_entropy,
    fidelity,
    mean_sigma_z,
    parity_expectation,
    phonon_numbers,
    product_state,
    sigma_x,
    sigma_z,
    top_level_population,
)
from .units import from_angular, khz, mhz, to_angular
