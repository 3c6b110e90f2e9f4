use serde::{Deserialize, Serialize};

use crate::experiments::analysis::{Detuning, PeriodEstimate, PowerLawFit};
use crate::experiments::config::Series;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Revival {
    pub t: f64,
    pub fidelity: f64,
    /// `(sum sqrt(P_n(t0) P_n(t)))^2`; absent once a comoving window has moved.
    pub population_fidelity: Option<f64>,
    pub total_variation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub series: Series,
    pub estimate: Option<PeriodEstimate>,
    pub expected: Option<f64>,
    pub relative_error: Option<f64>,
    /// Why no estimate was produced.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawReport {
    pub series: Series,
    pub fit: Option<PowerLawFit>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    /// Time since the plan start.
    pub elapsed: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthSummary {
    pub max_sigma_idx: f64,
    pub t_max_sigma_idx: f64,
    /// `max - min` of the centre of mass in index units.
    pub com_excursion: f64,
    pub level_spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameCheck {
    pub frames_per_period: usize,
    pub n_frames: usize,
    /// Largest `1 - |<direct|framed>|` over the probes.
    pub worst_deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub scenario: String,
    pub scenario_hash: String,
    pub dt: f64,
    pub probe_interval: f64,
    pub seeds: Vec<u64>,
    pub n_realizations: usize,
    pub revivals: Vec<Revival>,
    pub period: Option<PeriodReport>,
    pub power_law: Option<PowerLawReport>,
    pub participation_minimum: Option<Extremum>,
    pub width: WidthSummary,
    pub detuning: Option<Vec<Detuning>>,
    pub frame_check: Option<FrameCheck>,
    /// Largest weight dropped at comoving-window edges over the realizations.
    pub window_loss: f64,
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableRow {
    pub t: f64,
    pub fidelity: f64,
    pub sigma_idx: f64,
    pub delta_e: f64,
    pub participation: f64,
}

impl ObservableRow {
    pub fn get(&self, s: Series) -> f64 {
        match s {
            Series::Fidelity => self.fidelity,
            Series::SigmaIdx => self.sigma_idx,
            Series::DeltaE => self.delta_e,
            Series::Participation => self.participation,
        }
    }
}
