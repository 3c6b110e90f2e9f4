use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{inner, StateVector};
use crate::models::Hamiltonian;
use crate::propagator::expm::{eigen_step, rk4_step, taylor_step, Workspace};
use crate::propagator::plan::{steps_per, ExpBackend, Method, PropagationPlan, WindowMode};

/// Allowed norm drift per unit time.
pub const MIDPOINT_DRIFT_RATE: f64 = 1e-9;
pub const RK4_DRIFT_RATE: f64 = 1e-6;

/// One reported point of a propagation.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub index: usize,
    pub step: usize,
    pub t: f64,
    /// Time at which the model is evaluated for this state; differs from `t` only in a comoving window.
    pub local_t: f64,
    /// Number of window relabelings applied so far.
    pub shift: i64,
    pub amplitudes: &'a Array1<C64>,
    /// Cumulative weight discarded at the window edges.
    pub window_loss: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub local_times: Vec<f64>,
    pub shifts: Vec<i64>,
    pub states: Vec<StateVector>,
    pub window_loss: Vec<f64>,
    pub max_norm_drift: f64,
    pub plan: PropagationPlan,
    pub model_kind: String,
}

impl Trajectory {
    /// Index of the output sample at `t` (within a tenth of a step).
    pub fn index_of(&self, t: f64) -> Result<usize> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 0.1 * self.plan.dt)
            .ok_or(Error::ProbeTimeAbsent { t })
    }

    /// `|<psi(t0)|psi(t)>|^2` with window relabelings undone.
    pub fn revival_fidelity<H: Hamiltonian + ?Sized>(&self, model: &H, t: f64) -> Result<f64> {
        let i = self.index_of(t)?;
        let reference = model.relabel(self.states[0].view(), self.shifts[i]);
        Ok(inner(reference.view(), self.states[i].view()).norm_sqr())
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory has at least one sample")
    }
}

/// Output times tell the propagator when to call `sink`; states are not retained.
pub fn propagate_with<H, F>(model: &H, psi0: &StateVector, plan: &PropagationPlan, mut sink: F) -> Result<f64>
where
    H: Hamiltonian + ?Sized,
    F: FnMut(Sample<'_>) -> Result<()>,
{
    if psi0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: psi0.dim(),
        });
    }
    if (psi0.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Contract(format!(
            "initial state must be normalized, norm = {}",
            psi0.norm()
        )));
    }
    let period_steps = match plan.window {
        WindowMode::Lab => None,
        WindowMode::Comoving => {
            let tau = model.relabel_period().ok_or_else(|| {
                Error::config("plan.window", format!("model {} has no relabeling period", model.kind()))
            })?;
            Some(steps_per(tau, plan.dt, "plan.dt")?)
        }
    };
    let rate = match plan.method {
        Method::MidpointExponential => MIDPOINT_DRIFT_RATE,
        Method::Rk4 => RK4_DRIFT_RATE,
    };
    let mut psi = psi0.amplitudes().clone();
    let mut ws = Workspace::new(model.dim());
    let mut lost = 0.0;
    let mut shift = 0i64;
    let mut max_drift = 0.0_f64;
    let mut outputs = plan.output_steps.iter().copied().enumerate().peekable();
    let local_start = |step: usize| -> f64 {
        match period_steps {
            Some(p) => plan.time_of_step(step % p),
            None => plan.time_of_step(step),
        }
    };
    for step in 0..=plan.n_steps {
        if step > 0 {
            let s = step - 1;
            let t_local = local_start(s);
            let dt = plan.dt;
            match plan.method {
                Method::MidpointExponential => match plan.backend {
                    ExpBackend::Taylor => taylor_step(model, t_local + 0.5 * dt, dt, &mut psi, &mut ws)?,
                    ExpBackend::Eigen => eigen_step(model, t_local + 0.5 * dt, dt, &mut psi)?,
                },
                Method::Rk4 => rk4_step(model, t_local, dt, &mut psi)?,
            }
            let t = plan.time_of_step(step);
            if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite { t });
            }
            let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            let drift = (norm_sqr + lost - 1.0).abs();
            max_drift = max_drift.max(drift);
            let allowed = rate * (t - plan.t0).max(1.0);
            if drift > allowed {
                return Err(Error::NormDrift {
                    t,
                    drift,
                    allowed,
                    dt,
                });
            }
            if let Some(p) = period_steps {
                if step % p == 0 {
                    psi = model.relabel(psi.view(), 1);
                    let after: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
                    lost += norm_sqr - after;
                    shift += 1;
                }
            }
        }
        while let Some(&(index, out_step)) = outputs.peek() {
            if out_step != step {
                break;
            }
            outputs.next();
            sink(Sample {
                index,
                step,
                t: plan.time_of_step(step),
                local_t: local_start(step),
                shift,
                amplitudes: &psi,
                window_loss: lost,
            })?;
        }
    }
    Ok(max_drift)
}

/// Integrates `i d/dt psi = H(t) psi` and stores the state at every output time.
pub fn propagate<H: Hamiltonian + ?Sized>(model: &H, psi0: &StateVector, plan: &PropagationPlan) -> Result<Trajectory> {
    let n = plan.output_steps.len();
    let mut traj = Trajectory {
        times: Vec::with_capacity(n),
        local_times: Vec::with_capacity(n),
        shifts: Vec::with_capacity(n),
        states: Vec::with_capacity(n),
        window_loss: Vec::with_capacity(n),
        max_norm_drift: 0.0,
        plan: plan.clone(),
        model_kind: model.kind().to_string(),
    };
    let basis = psi0.basis();
    traj.max_norm_drift = propagate_with(model, psi0, plan, |s| {
        traj.times.push(s.t);
        traj.local_times.push(s.local_t);
        traj.shifts.push(s.shift);
        traj.states.push(StateVector::new(s.amplitudes.clone(), basis)?);
        traj.window_loss.push(s.window_loss);
        Ok(())
    })?;
    Ok(traj)
}
