use std::collections::BTreeMap;

use ndarray::Array1;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::adiabatic::coupling::{numeric_theta, CouplingMatrix};
use crate::adiabatic::frame::{instantaneous_frame_ranks, AdiabaticFrame};
use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, StateVector};
use crate::models::Hamiltonian;
use crate::propagator::expm::{taylor_apply, Workspace};
use crate::propagator::plan::{steps_per, PropagationPlan, WindowMode};

/// Coupling entries below this fraction of the largest one are not stored.
pub const COUPLING_DROP_TOL: f64 = 1e-12;
/// Frames diagonalised together before the sequential gauge sweep.
const FRAME_CHUNK: usize = 64;
/// Overlap a column must keep with itself one period later.
const PERIODIC_GAUGE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingMode {
    /// All couplings.
    #[default]
    Full,
    /// Only couplings between neighbouring ranks.
    NearestNeighbour,
}

/// `G = D - Theta` in the frame basis at one time.
#[derive(Debug, Clone)]
pub struct Generator {
    pub t: f64,
    pub matrix: SparseMatrix,
    bounds: (f64, f64),
}

impl Generator {
    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }
}

pub fn adiabatic_generator(frame: &AdiabaticFrame, coupling: &CouplingMatrix, mode: CouplingMode) -> Result<Generator> {
    let n = frame.len();
    if coupling.len() != n || coupling.offset != frame.offset {
        return Err(Error::Contract("coupling matrix does not belong to the frame".into()));
    }
    let cut = COUPLING_DROP_TOL * coupling.max_abs();
    let ratio = coupling.ratio_form();
    let mut g = SparseMatrix::new(n);
    for m in 0..n {
        g.push(m, m, C64::new(frame.energies[m], 0.0));
        let cols: Box<dyn Iterator<Item = usize>> = match mode {
            CouplingMode::Full => Box::new(0..n),
            CouplingMode::NearestNeighbour => Box::new(m.saturating_sub(1)..(m + 2).min(n)),
        };
        for k in cols {
            let r = ratio[[m, k]];
            if k != m && r.norm() > cut {
                // -Theta_mk = i * ratio_mk
                g.push(m, k, C64::new(-r.im, r.re));
            }
        }
    }
    let bounds = g.gershgorin_bounds();
    Ok(Generator {
        t: frame.t,
        matrix: g,
        bounds,
    })
}

/// Propagation in the adiabatic frame, rotated back to the model basis at every output.
#[derive(Debug, Clone)]
pub struct FrameTrajectory {
    pub times: Vec<f64>,
    /// States in the model basis.
    pub states: Vec<StateVector>,
    /// Amplitudes on the adiabatic states.
    pub adiabatic: Vec<Array1<C64>>,
    /// Number of distinct generator evaluations.
    pub n_frames: usize,
}

impl FrameTrajectory {
    pub fn populations(&self, index: usize) -> Array1<f64> {
        self.adiabatic[index].mapv(|z| z.norm_sqr())
    }
}

/// Integrates `i d/dt c = G(t) c` with the midpoint exponential, frames on the plan's grid.
///
/// Frames at grid points and midpoints form one continuity-gauged chain. For models
/// with a drive period that is a whole number of steps the generators of one period
/// are reused, after checking that the gauge closes on itself.
pub fn propagate_in_frame<H: Hamiltonian + ?Sized>(
    model: &H,
    psi0: &StateVector,
    plan: &PropagationPlan,
    mode: CouplingMode,
) -> Result<FrameTrajectory> {
    if plan.window != WindowMode::Lab {
        return Err(Error::config("plan.window", "adiabatic-frame propagation needs the lab window"));
    }
    if psi0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: psi0.dim(),
        });
    }
    let dt = plan.dt;
    let period_steps = model
        .period()
        .and_then(|tp| steps_per(tp, dt, "plan.dt").ok())
        .filter(|&p| p < plan.n_steps);
    let cycle = period_steps.unwrap_or(plan.n_steps);
    let local = |s: usize| match period_steps {
        Some(p) => s % p,
        None => s,
    };
    let mut wanted: BTreeMap<usize, Option<AdiabaticFrame>> =
        plan.output_steps.iter().map(|&s| (local(s), None)).collect();
    let dim = model.dim();
    let ranks = 0..dim;
    let grid_frame = |s: usize| instantaneous_frame_ranks(&model.matrix(plan.time_of_step(s)), plan.time_of_step(s), ranks.clone(), None);

    let root = grid_frame(0)?;
    let mut generators = Vec::with_capacity(cycle);
    let mut prev = root.clone();
    let mut first_mid: Option<AdiabaticFrame> = None;
    wanted.insert(0, Some(root));
    let n_mid = if period_steps.is_some() { cycle + 1 } else { cycle };
    let mut k0 = 0;
    while k0 < n_mid {
        let k1 = (k0 + FRAME_CHUNK).min(n_mid);
        let mut mids = (k0..k1)
            .into_par_iter()
            .map(|k| {
                let t = plan.time_of_step(k) + 0.5 * dt;
                instantaneous_frame_ranks(&model.matrix(t), t, ranks.clone(), None)
            })
            .collect::<Result<Vec<_>>>()?;
        for (k, mid) in (k0..k1).zip(mids.iter_mut()) {
            mid.align_to(&prev)?;
            if k == cycle {
                let first = first_mid.as_ref().expect("first midpoint frame");
                for c in 0..dim {
                    let o = mid.vectors.column_overlap(&first.vectors, c);
                    if !(o.re > 1.0 - PERIODIC_GAUGE_TOL) {
                        return Err(Error::GaugeInconsistent {
                            column: c,
                            step: 0,
                            next: cycle,
                        });
                    }
                }
                break;
            }
            let theta = numeric_theta(model, mid)?;
            generators.push(adiabatic_generator(mid, &theta, mode)?);
            if k == 0 {
                first_mid = Some(mid.clone());
            }
            if let Some(slot) = wanted.get_mut(&local(k + 1)) {
                if slot.is_none() {
                    let mut f = grid_frame(k + 1)?;
                    f.align_to(mid)?;
                    *slot = Some(f);
                }
            }
            prev = mid.clone();
        }
        k0 = k1;
    }

    let mut traj = FrameTrajectory {
        times: Vec::with_capacity(plan.output_steps.len()),
        states: Vec::with_capacity(plan.output_steps.len()),
        adiabatic: Vec::with_capacity(plan.output_steps.len()),
        n_frames: generators.len(),
    };
    let frame_at = |s: usize| -> &AdiabaticFrame {
        wanted[&local(s)].as_ref().expect("output frame computed")
    };
    let mut c = frame_at(0).vectors.project(psi0.view());
    let mut ws = Workspace::new(dim);
    let mut outputs = plan.output_steps.iter().copied().peekable();
    for step in 0..=plan.n_steps {
        if step > 0 {
            let g = &generators[(step - 1) % cycle];
            taylor_apply(&g.matrix, g.bounds, dt, &mut c, &mut ws)?;
            if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite {
                    t: plan.time_of_step(step),
                });
            }
        }
        while outputs.peek() == Some(&step) {
            outputs.next();
            let psi = frame_at(step).vectors.expand(c.view());
            traj.times.push(plan.time_of_step(step));
            traj.states.push(StateVector::new(psi, psi0.basis())?);
            traj.adiabatic.push(c.clone());
        }
    }
    Ok(traj)
}
