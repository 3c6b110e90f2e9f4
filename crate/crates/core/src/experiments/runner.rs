use std::collections::hash_map::Entry;
use std::collections::HashMap;

use ndarray::Array1;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::adiabatic::{adiabatic_populations, instantaneous_frame, propagate_in_frame, AdiabaticFrame, CouplingMode};
use crate::error::{Error, Result};
use crate::experiments::analysis::{
    argmin_in, center_of_mass, detuning_table, estimate_period, fit_power_law, index_width, participation_ratio,
    population_fidelity, total_variation,
};
use crate::experiments::config::{PopulationBasis, ScenarioConfig};
use crate::experiments::report::{
    AnalysisReport, Extremum, FrameCheck, ObservableRow, PeriodReport, PowerLawReport, Revival, WidthSummary,
};
use crate::linalg::{energy_uncertainty, inner, StateVector};
use crate::models::{initial_state, AtTime, Hamiltonian, Model, ModelSpec};
use crate::propagator::plan::steps_per;
use crate::propagator::{propagate_with, PropagationPlan, WindowMode};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads for the ensemble loop; `None` uses every available core.
    pub threads: Option<usize>,
}

/// Ensemble-averaged series and the analysis of one scenario run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// The configuration with every default filled in.
    pub config: ScenarioConfig,
    pub report: AnalysisReport,
    pub times: Vec<f64>,
    pub populations: Vec<Array1<f64>>,
    pub observables: Vec<ObservableRow>,
}

struct Realization {
    times: Vec<f64>,
    shifts: Vec<i64>,
    fidelity: Vec<f64>,
    delta_e: Vec<f64>,
    populations: Vec<Array1<f64>>,
    window_loss: f64,
    max_drift: f64,
    frame_check: Option<FrameCheck>,
}

/// Steps after which the instantaneous frame repeats, if any.
fn frame_key<H: Hamiltonian + ?Sized>(model: &H, plan: &PropagationPlan) -> impl Fn(usize) -> usize {
    let is_static = model.dh_dt(plan.t0).entries.is_empty();
    let cycle = if is_static {
        Some(1)
    } else if let Some(p) = model.period() {
        steps_per(p, plan.dt, "plan.dt").ok()
    } else if plan.window == WindowMode::Comoving {
        model.relabel_period().and_then(|p| steps_per(p, plan.dt, "plan.dt").ok())
    } else {
        None
    };
    move |step| cycle.map_or(step, |c| step % c)
}

fn check_analysis(cfg: &ScenarioConfig, model: &Model) -> Result<()> {
    if cfg.analysis.detuning.is_some() && !matches!(model, Model::DrivenHo(_)) {
        return Err(Error::config("analysis.detuning", format!("needs a driven oscillator, got {}", model.kind())));
    }
    if cfg.analysis.frame_check {
        if model.period().is_none() {
            return Err(Error::config("analysis.frame_check", format!("model {} has no drive period", model.kind())));
        }
        if cfg.plan.window != WindowMode::Lab {
            return Err(Error::config("analysis.frame_check", "needs the lab window"));
        }
    }
    Ok(())
}

fn run_realization(cfg: &ScenarioConfig, spec: &ModelSpec, with_frame_check: bool) -> Result<Realization> {
    let model = spec.build()?;
    check_analysis(cfg, &model)?;
    let plan = cfg.plan(&model)?;
    let psi0 = initial_state(&cfg.initial, &model, plan.t0)?;
    let basis = psi0.basis();
    let key = frame_key(&model, &plan);
    let mut frames: HashMap<usize, AdiabaticFrame> = HashMap::new();
    let n = plan.output_steps.len();
    let mut r = Realization {
        times: Vec::with_capacity(n),
        shifts: Vec::with_capacity(n),
        fidelity: Vec::with_capacity(n),
        delta_e: Vec::with_capacity(n),
        populations: Vec::with_capacity(n),
        window_loss: 0.0,
        max_drift: 0.0,
        frame_check: None,
    };
    let mut kept: Vec<Array1<C64>> = Vec::new();
    r.max_drift = propagate_with(&model, &psi0, &plan, |s| {
        let psi = StateVector::new(s.amplitudes.clone(), basis)?;
        let reference = model.relabel(psi0.view(), s.shift);
        r.times.push(s.t);
        r.shifts.push(s.shift);
        r.fidelity.push(inner(reference.view(), psi.view()).norm_sqr().min(1.0));
        r.delta_e.push(energy_uncertainty(&psi, &AtTime { model: &model, t: s.local_t })?);
        let p = match cfg.analysis.populations {
            PopulationBasis::Basis => psi.populations(),
            PopulationBasis::Adiabatic => {
                let frame = match frames.entry(key(s.step)) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => e.insert(instantaneous_frame(&model.matrix(s.local_t), s.local_t, None)?),
                };
                adiabatic_populations(&psi, frame)?
            }
        };
        r.populations.push(p);
        r.window_loss = s.window_loss;
        if with_frame_check {
            kept.push(s.amplitudes.clone());
        }
        Ok(())
    })?;
    if with_frame_check {
        r.frame_check = Some(frame_check(cfg, &model, &psi0, &plan, &r.times, &kept)?);
    }
    Ok(r)
}

fn frame_check(
    cfg: &ScenarioConfig,
    model: &Model,
    psi0: &StateVector,
    plan: &PropagationPlan,
    times: &[f64],
    direct: &[Array1<C64>],
) -> Result<FrameCheck> {
    let period = model.period().expect("checked periodic");
    let per = cfg.frames.per_period;
    let probe = cfg.plan.probe_interval.expect("resolved config");
    let fplan = PropagationPlan::uniform(plan.t0, plan.t1(), period / per as f64, probe)
        .map_err(|e| Error::config("frames.per_period", format!("frame grid must contain the probes: {e}")))?;
    let framed = propagate_in_frame(model, psi0, &fplan, CouplingMode::Full)?;
    let mut worst = 0.0_f64;
    for (t, state) in framed.times.iter().zip(&framed.states) {
        let i = times
            .iter()
            .position(|s| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
            .ok_or(Error::ProbeTimeAbsent { t: *t })?;
        worst = worst.max(1.0 - inner(direct[i].view(), state.view()).norm());
    }
    Ok(FrameCheck {
        frames_per_period: per,
        n_frames: framed.n_frames,
        worst_deficit: worst,
    })
}

/// `m += (x - m) / (k + 1)`, which leaves `m` bit-identical when `x == m`.
fn accumulate(mean: &mut [f64], x: &[f64], k: usize) {
    for (m, v) in mean.iter_mut().zip(x) {
        *m += (v - *m) / (k + 1) as f64;
    }
}

/// Runs every realization, averages in realization order and analyses the averages.
pub fn run_scenario(config: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutput> {
    let cfg = config.resolved()?;
    let hash = cfg.hash()?;
    let n_real = cfg.ensemble.n_realizations;
    let disordered = cfg.model.disorder().is_some();
    let seeds: Vec<u64> = (0..n_real as u64).map(|i| cfg.ensemble.master_seed.wrapping_add(i)).collect();
    let specs: Vec<ModelSpec> = seeds
        .iter()
        .map(|&s| if disordered { cfg.model.with_disorder_seed(s) } else { cfg.model.clone() })
        .collect();
    let work = || -> Result<Vec<Realization>> {
        specs
            .par_iter()
            .enumerate()
            .map(|(i, spec)| run_realization(&cfg, spec, i == 0 && cfg.analysis.frame_check))
            .collect()
    };
    let results = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))?
            .install(work)?,
        None => work()?,
    };

    let mut it = results.into_iter();
    let mut acc = it.next().expect("n_realizations >= 1");
    let mut window_loss = acc.window_loss;
    let mut max_drift = acc.max_drift;
    for (k, r) in it.enumerate() {
        let k = k + 1;
        accumulate(&mut acc.fidelity, &r.fidelity, k);
        accumulate(&mut acc.delta_e, &r.delta_e, k);
        for (m, x) in acc.populations.iter_mut().zip(&r.populations) {
            accumulate(m.as_slice_mut().expect("contiguous"), x.as_slice().expect("contiguous"), k);
        }
        window_loss = window_loss.max(r.window_loss);
        max_drift = max_drift.max(r.max_drift);
    }

    let model = cfg.model.build()?;
    let t0 = cfg.plan.t0;
    let times = acc.times.clone();
    let elapsed: Vec<f64> = times.iter().map(|t| t - t0).collect();
    let rows: Vec<ObservableRow> = (0..times.len())
        .map(|i| {
            let p = acc.populations[i].as_slice().expect("contiguous");
            ObservableRow {
                t: times[i],
                fidelity: acc.fidelity[i],
                sigma_idx: index_width(p),
                delta_e: acc.delta_e[i],
                participation: participation_ratio(p),
            }
        })
        .collect();

    let dt = cfg.plan.dt.expect("resolved");
    let mut revivals = Vec::with_capacity(cfg.analysis.revival_probes.len());
    for &t in &cfg.analysis.revival_probes {
        let i = times
            .iter()
            .position(|s| (s - t).abs() <= 0.1 * dt)
            .ok_or(Error::ProbeTimeAbsent { t })?;
        let (p0, pt) = (acc.populations[0].as_slice().unwrap(), acc.populations[i].as_slice().unwrap());
        let same_window = acc.shifts[i] == acc.shifts[0];
        revivals.push(Revival {
            t,
            fidelity: acc.fidelity[i],
            population_fidelity: same_window.then(|| population_fidelity(p0, pt).min(1.0)),
            total_variation: same_window.then(|| total_variation(p0, pt)),
        });
    }

    let series = |s| rows.iter().map(|r| r.get(s)).collect::<Vec<f64>>();
    let period = cfg.analysis.period.as_ref().map(|pc| {
        let est = estimate_period(&elapsed, &series(pc.series));
        let relative_error = match (&est, pc.expected) {
            (Ok(e), Some(x)) => Some((e.period - x).abs() / x),
            _ => None,
        };
        PeriodReport {
            series: pc.series,
            estimate: est.as_ref().ok().copied(),
            expected: pc.expected,
            relative_error,
            failure: est.err().map(|e| e.to_string()),
        }
    });
    let power_law = cfg.analysis.power_law.as_ref().map(|pl| {
        let fit = fit_power_law(&elapsed, &series(pl.series), pl.window);
        PowerLawReport {
            series: pl.series,
            fit: fit.as_ref().ok().copied(),
            failure: fit.err().map(|e| e.to_string()),
        }
    });
    let participation_minimum = cfg.analysis.participation_minimum.and_then(|w| {
        let pr = series(crate::experiments::config::Series::Participation);
        argmin_in(&elapsed, &pr, w).map(|i| Extremum {
            elapsed: elapsed[i],
            value: pr[i],
        })
    });
    let (imax, max_sigma) = rows
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, r)| if r.sigma_idx > b.1 { (i, r.sigma_idx) } else { b });
    let com: Vec<f64> = acc.populations.iter().map(|p| center_of_mass(p.as_slice().unwrap())).collect();
    let com_excursion = com.iter().copied().fold(f64::NEG_INFINITY, f64::max) - com.iter().copied().fold(f64::INFINITY, f64::min);
    let detuning = match (&cfg.model, cfg.analysis.detuning) {
        (ModelSpec::DrivenHo(s), Some(n)) => Some(detuning_table(s.drive_frequency, s.omega, n)?),
        _ => None,
    };

    let report = AnalysisReport {
        scenario: cfg.name.clone(),
        scenario_hash: hash,
        dt,
        probe_interval: cfg.plan.probe_interval.expect("resolved"),
        seeds,
        n_realizations: n_real,
        revivals,
        period,
        power_law,
        participation_minimum,
        width: WidthSummary {
            max_sigma_idx: max_sigma,
            t_max_sigma_idx: times[imax],
            com_excursion,
            level_spacing: model.level_spacing(),
        },
        detuning,
        frame_check: acc.frame_check,
        window_loss,
        max_norm_drift: max_drift,
    };
    Ok(RunOutput {
        config: cfg,
        report,
        times,
        populations: acc.populations,
        observables: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::ScenarioConfig;

    fn small_ho(std_dev: f64, n: usize) -> ScenarioConfig {
        ScenarioConfig::from_json_str(&format!(
            r#"{{
                "name": "small",
                "model": {{"kind": "driven_ho", "omega": 1.0, "Omega": 1.2, "J": 0.5, "n_fock": 60,
                           "disorder": {{"std_dev": {std_dev}, "seed": 0}}}},
                "initial": {{"kind": "coherent", "alpha_re": 3.0}},
                "plan": {{"t1": 10.471975511965978, "dt": 0.005235987755982988}},
                "ensemble": {{"n_realizations": {n}, "master_seed": 4}},
                "analysis": {{"populations": "adiabatic", "revival_probes": [5.235987755982989]}}
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn clean_ensemble_equals_single_run() {
        let one = run_scenario(&small_ho(0.0, 1), &RunOptions::default()).unwrap();
        let many = run_scenario(&small_ho(0.0, 3), &RunOptions { threads: Some(2) }).unwrap();
        assert_eq!(one.populations, many.populations);
        assert_eq!(one.observables, many.observables);
    }

    #[test]
    fn ensemble_average_stays_normalized() {
        let out = run_scenario(&small_ho(0.3, 3), &RunOptions::default()).unwrap();
        for p in &out.populations {
            assert!((p.sum() - 1.0).abs() < 1e-9);
        }
        assert_eq!(out.report.seeds, vec![4, 5, 6]);
        let r = &out.report.revivals[0];
        assert!(r.fidelity <= 1.0 && r.population_fidelity.unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn disorder_seeds_change_the_average_deterministically() {
        let a = run_scenario(&small_ho(0.3, 2), &RunOptions::default()).unwrap();
        let b = run_scenario(&small_ho(0.3, 2), &RunOptions { threads: Some(1) }).unwrap();
        assert_eq!(a.observables, b.observables);
        let c = run_scenario(&small_ho(0.3, 2).with_overrides(&["ensemble.master_seed=9".into()]).unwrap(), &RunOptions::default()).unwrap();
        assert_ne!(a.observables, c.observables);
    }

    #[test]
    fn missing_probe_is_an_error() {
        let c = small_ho(0.0, 1).with_overrides(&["analysis.revival_probes=[1.0]".into()]).unwrap();
        assert!(matches!(run_scenario(&c, &RunOptions::default()), Err(Error::ProbeTimeAbsent { .. })));
    }
}
