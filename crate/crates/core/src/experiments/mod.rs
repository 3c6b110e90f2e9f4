//! Scenario configuration, named presets, the ensemble runner and trajectory analysis.

pub mod analysis;
pub mod bundle;
pub mod config;
pub mod presets;
pub mod report;
pub mod runner;

pub use analysis::{
    center_of_mass, detuning_table, estimate_period, fit_power_law, index_width, participation_ratio,
    population_fidelity, total_variation, Detuning, PeriodEstimate, PowerLawFit,
};
pub use bundle::{write_bundle, METADATA_FILE, OBSERVABLES_FILE, POPULATIONS_FILE, REPORT_FILE};
pub use config::{PopulationBasis, ScenarioConfig, Series};
pub use presets::{preset, PRESET_NAMES};
pub use report::{AnalysisReport, ObservableRow};
pub use runner::{run_scenario, RunOptions, RunOutput};
