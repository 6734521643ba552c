//! Design of narrowband composite pulse sequences and simulation of the
//! uniform trapped-ion C^n-NOT construction they enable.
//!
//! The crate covers the full pipeline: exact SU(2) pulse algebra
//! ([`su2`]), derivation and cataloguing of narrowband phase sets
//! ([`design`]), Lamb-Dicke sideband couplings ([`coupling`]), joint-space
//! gate simulation with Haar-average fidelities ([`engine`]), and fidelity
//! landscape scanning plus gate-level phase optimization ([`landscape`]).

pub mod coupling;
pub mod design;
pub mod engine;
pub mod error;
pub mod landscape;
pub mod su2;

pub use coupling::{area_ratio_curve, laguerre, sideband_coupling, CouplingRatioCurve, LambDicke};
pub use design::{
    bottom_probability, catalog, catalog_entry, catalog_names, flat_bottom_width,
    flat_top_width, nb_residuals, residual_norm,
    solve_nb_phases, u11_area_derivative, CatalogEntry, ConditionResidual, SequenceFamily,
    CATALOG, NB_RESIDUAL_TOL,
};
pub use engine::{
    analytic_reference_phases, apply_sideband_pulse, average_fidelity, conditional_step,
    dressing_step, fidelity_report, gate_fidelity, monte_carlo_average_fidelity, random_unitary,
    reference_gate, simulate_gate, ChainSpec, FidelityReport, GateMatrix, JointState,
};
pub use error::{Error, Result};
pub use landscape::{
    addressing_selectivity, best_region, optimize_phases, scan_fidelity, Axis, FidelityGrid,
    GridPoint, PhaseOptimization, RegionSummary, Window, DEFAULT_OPTIMIZER_BUDGET,
};
pub use su2::{
    excitation_profile, pulse_propagator, sequence_propagator, target_phase,
    transition_probability, CompositeSequence, Su2Matrix, TransitionProfile,
};
