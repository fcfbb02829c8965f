//! Scenario orchestration: the time loop with adaptive refinement,
//! convergence and ε studies, rescaled diagnostics, the scenario catalogue
//! and CSV output.

pub mod adaptive;
pub mod analysis;
pub mod config;
pub mod output;
pub mod run;
pub mod scenarios;

pub use adaptive::{adapt_if_needed, AdaptDecision, AdaptiveController, RefinementEvent};
pub use analysis::{
    convergence_order, convergence_table, equilibrium_distance, fit_order, l1_distance, overlay_l1,
    self_similar_profile, stationary_diagnostics, ConvergenceRow, FieldSnapshot, SelfSimilarSeries,
    StationaryProfile,
};
pub use config::{ExperimentConfig, ModelKind};
pub use run::{
    blowup_histories, converge, converge_at, eps_convergence, run_level, run_scenario, sweep_mass, DiagnosticsRecord,
    EpsSweep, LevelRun, MassRow, RunStatus, RunSummary, Simulation,
};
pub use scenarios::{scenario, scenario_names};
