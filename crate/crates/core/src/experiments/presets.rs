use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::experiments::config::{
    AnalysisConfig, EnsembleConfig, FrameConfig, OutputConfig, PeriodConfig, PlanConfig, PopulationBasis,
    PowerLawConfig, ScenarioConfig, Series,
};
use crate::models::{DisorderSpec, DrivenHoSpec, InitialStateSpec, LzGridSpec, ModelSpec, SingleBandSpec};
use crate::propagator::{ExpBackend, Method, WindowMode};

pub const PRESET_NAMES: [&str; 7] = ["fig1a", "fig1b", "fig2a", "fig2b", "fig2c", "fig4a", "fig4b"];

/// Sites in the single-band presets.
pub const LATTICE_SITES: usize = 401;
/// Fock levels in the oscillator presets.
pub const FOCK_LEVELS: usize = 400;
/// Diabatic levels per branch in the grid presets.
pub const GRID_LEVELS: usize = 201;
/// Disorder realizations in the disordered oscillator preset.
pub const DISORDER_REALIZATIONS: usize = 10;

fn plan(t0: f64, t1: f64, window: WindowMode) -> PlanConfig {
    PlanConfig {
        t0,
        t1,
        dt: None,
        probe_interval: None,
        method: Method::MidpointExponential,
        backend: ExpBackend::Taylor,
        window,
    }
}

fn scenario(name: &str, model: ModelSpec, initial: InitialStateSpec, plan: PlanConfig, analysis: AnalysisConfig) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        model,
        initial,
        plan,
        frames: FrameConfig::default(),
        ensemble: EnsembleConfig::default(),
        analysis,
        output: OutputConfig::default(),
    }
}

fn lattice(name: &str, initial: InitialStateSpec) -> ScenarioConfig {
    let model = ModelSpec::SingleBand(SingleBandSpec {
        hopping: 10.0,
        tilt: 1.0,
        n_sites: LATTICE_SITES,
        disorder: None,
    });
    let analysis = AnalysisConfig {
        revival_probes: vec![2.0 * PI, 4.0 * PI],
        ..Default::default()
    };
    scenario(name, model, initial, plan(0.0, 6.0 * PI, WindowMode::Lab), analysis)
}

fn oscillator(name: &str, initial: InitialStateSpec, disorder: Option<DisorderSpec>) -> ScenarioConfig {
    let model = ModelSpec::DrivenHo(DrivenHoSpec {
        omega: 1.0,
        drive_frequency: 1.2,
        drive_amplitude: 0.5,
        n_fock: FOCK_LEVELS,
        disorder,
    });
    let analysis = AnalysisConfig {
        populations: PopulationBasis::Adiabatic,
        revival_probes: vec![10.0 * PI, 20.0 * PI, 30.0 * PI],
        period: Some(PeriodConfig {
            series: Series::SigmaIdx,
            expected: Some(10.0 * PI),
        }),
        detuning: Some(3),
        ..Default::default()
    };
    scenario(name, model, initial, plan(0.0, 30.0 * PI, WindowMode::Lab), analysis)
}

fn grid(name: &str, omega: f64, coupling: f64, periods: usize, analysis: AnalysisConfig) -> ScenarioConfig {
    let spec = LzGridSpec {
        omega,
        lambda: 1.0,
        coupling,
        n_levels: GRID_LEVELS,
    };
    let tau = spec.sweep_period();
    let t0 = -0.25 * tau;
    let initial = InitialStateSpec::AdiabaticIndex { index: None, t0: None };
    let analysis = AnalysisConfig {
        populations: PopulationBasis::Adiabatic,
        ..analysis
    };
    scenario(
        name,
        ModelSpec::LzGrid(spec),
        initial,
        plan(t0, t0 + periods as f64 * tau, WindowMode::Comoving),
        analysis,
    )
}

/// The named scenario, or a config error listing the known names.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    Ok(match name {
        "fig1a" => lattice(name, InitialStateSpec::SiteDelta { site: 0 }),
        "fig1b" => lattice(name, InitialStateSpec::GaussianSites { center: 0.0, sigma: 10.0 }),
        "fig2a" => oscillator(name, InitialStateSpec::Fock { n: 200 }, None),
        "fig2b" => oscillator(
            name,
            InitialStateSpec::Coherent {
                alpha_re: 200f64.sqrt(),
                alpha_im: 0.0,
            },
            None,
        ),
        "fig2c" => {
            let mut c = oscillator(
                name,
                InitialStateSpec::Coherent {
                    alpha_re: 200f64.sqrt(),
                    alpha_im: 0.0,
                },
                Some(DisorderSpec {
                    std_dev: (PI / 50.0).sqrt(),
                    seed: 0,
                }),
            );
            c.ensemble.n_realizations = DISORDER_REALIZATIONS;
            c.analysis.power_law = Some(PowerLawConfig {
                series: Series::SigmaIdx,
                window: [10.0 * PI, 30.0 * PI],
            });
            c
        }
        "fig4a" => {
            let t_bloch = 4.0 * PI / 0.5;
            grid(
                name,
                0.5,
                0.2,
                151,
                AnalysisConfig {
                    participation_minimum: Some([0.5 * t_bloch, 1.5 * t_bloch]),
                    power_law: Some(PowerLawConfig {
                        series: Series::DeltaE,
                        window: [0.025, 1.5],
                    }),
                    ..Default::default()
                },
            )
        }
        "fig4b" => {
            let mut c = grid(
                name,
                5.0,
                0.5,
                230,
                AnalysisConfig {
                    period: Some(PeriodConfig {
                        series: Series::SigmaIdx,
                        expected: Some(2300.0 / 5.0),
                    }),
                    ..Default::default()
                },
            );
            c.output.population_stride = 10;
            c
        }
        other => {
            return Err(Error::config(
                "preset",
                format!("unknown preset `{other}`; known: {}", PRESET_NAMES.join(", ")),
            ))
        }
    })
}
