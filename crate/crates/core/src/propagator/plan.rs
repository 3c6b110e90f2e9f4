use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// `psi <- exp(-i H(t + dt/2) dt) psi`.
    #[default]
    MidpointExponential,
    /// Classical Runge-Kutta in the interaction picture of the diagonal of `H`.
    Rk4,
}

/// How the midpoint exponential is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ExpBackend {
    /// Truncated Taylor series on structured matrix-vector products.
    #[default]
    Taylor,
    /// Dense eigendecomposition of `H(t + dt/2)` at every step.
    Eigen,
}

/// Basis bookkeeping for models whose Hamiltonian repeats up to a relabeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WindowMode {
    /// Fixed basis for the whole run.
    #[default]
    Lab,
    /// Shift the basis window by one relabeling every period so the state stays centred.
    Comoving,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationPlan {
    pub t0: f64,
    pub dt: f64,
    pub n_steps: usize,
    /// Step counts (from `t0`) at which the state is reported; sorted, unique.
    pub output_steps: Vec<usize>,
    pub method: Method,
    pub backend: ExpBackend,
    pub window: WindowMode,
}

fn check_grid(t0: f64, t1: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::config("plan.dt", format!("must be finite and > 0, got {dt}")));
    }
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::config("plan.t1", format!("must exceed t0 = {t0}, got {t1}")));
    }
    let n = ((t1 - t0) / dt).round();
    if n < 1.0 {
        return Err(Error::config("plan.dt", "larger than the integration interval"));
    }
    Ok(n as usize)
}

impl PropagationPlan {
    /// Output times are snapped to the nearest grid point `t0 + k dt`.
    pub fn new(t0: f64, t1: f64, dt: f64, output_times: &[f64]) -> Result<Self> {
        let n_steps = check_grid(t0, t1, dt)?;
        let mut output_steps = Vec::with_capacity(output_times.len());
        for &t in output_times {
            let k = ((t - t0) / dt).round();
            if !(t.is_finite() && k >= 0.0 && k as usize <= n_steps) {
                return Err(Error::config(
                    "plan.output_times",
                    format!("{t} lies outside [{t0}, {t1}]"),
                ));
            }
            output_steps.push(k as usize);
        }
        output_steps.sort_unstable();
        output_steps.dedup();
        Ok(Self {
            t0,
            dt,
            n_steps,
            output_steps,
            method: Method::default(),
            backend: ExpBackend::default(),
            window: WindowMode::default(),
        })
    }

    /// Outputs every `probe_interval`, which must be a whole number of steps.
    pub fn uniform(t0: f64, t1: f64, dt: f64, probe_interval: f64) -> Result<Self> {
        let n_steps = check_grid(t0, t1, dt)?;
        let stride = steps_per(probe_interval, dt, "plan.probe_interval")?;
        let output_steps = (0..=n_steps).step_by(stride).collect();
        Ok(Self {
            t0,
            dt,
            n_steps,
            output_steps,
            method: Method::default(),
            backend: ExpBackend::default(),
            window: WindowMode::default(),
        })
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_backend(mut self, backend: ExpBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_window(mut self, window: WindowMode) -> Self {
        self.window = window;
        self
    }

    pub fn time_of_step(&self, step: usize) -> f64 {
        self.t0 + step as f64 * self.dt
    }

    pub fn t1(&self) -> f64 {
        self.time_of_step(self.n_steps)
    }

    pub fn output_times(&self) -> Vec<f64> {
        self.output_steps.iter().map(|&s| self.time_of_step(s)).collect()
    }
}

/// Number of steps of size `dt` in `interval`, which must be a whole multiple of `dt`.
pub fn steps_per(interval: f64, dt: f64, field: &str) -> Result<usize> {
    let k = (interval / dt).round();
    if !(k >= 1.0) || (k * dt - interval).abs() > 1e-9 * interval.abs() {
        return Err(Error::config(
            field,
            format!("{interval} is not a whole multiple of dt = {dt}"),
        ));
    }
    Ok(k as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping() {
        let p = PropagationPlan::new(0.0, 1.0, 0.1, &[0.0, 0.31, 0.29, 1.0]).unwrap();
        assert_eq!(p.n_steps, 10);
        assert_eq!(p.output_steps, vec![0, 3, 10]);
        assert!((p.t1() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_requires_commensurate_probe() {
        assert!(PropagationPlan::uniform(0.0, 1.0, 0.1, 0.25).is_err());
        let p = PropagationPlan::uniform(0.0, 1.0, 0.05, 0.25).unwrap();
        assert_eq!(p.output_steps, vec![0, 5, 10, 15, 20]);
    }

    #[test]
    fn invalid_ranges() {
        assert!(PropagationPlan::new(1.0, 0.0, 0.1, &[]).is_err());
        assert!(PropagationPlan::new(0.0, 1.0, -0.1, &[]).is_err());
        assert!(PropagationPlan::new(0.0, 1.0, 0.1, &[1.5]).is_err());
    }
}
