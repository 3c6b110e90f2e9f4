use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use ndarray::{Array1, ArrayView1, ArrayViewMut1};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Basis, HermitianOperator, SparseMatrix, StateVector};
use crate::models::displacement::{edge_mass, Displacement};
use crate::models::{
    finite, positive, tridiagonal_apply, tridiagonal_bounds, tridiagonal_matrix, DisorderSpec,
    Hamiltonian,
};

/// `omega a^dagger a + sum xi_n |n><n| + J sin(Omega t) (a + a^dagger)/sqrt(2)` in a truncated Fock basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrivenHoSpec {
    pub omega: f64,
    #[serde(rename = "Omega")]
    pub drive_frequency: f64,
    #[serde(rename = "J")]
    pub drive_amplitude: f64,
    pub n_fock: usize,
    #[serde(default)]
    pub disorder: Option<DisorderSpec>,
}

impl DrivenHoSpec {
    pub fn validate(&self) -> Result<()> {
        positive("model.omega", self.omega)?;
        positive("model.Omega", self.drive_frequency)?;
        finite("model.J", self.drive_amplitude)?;
        if self.n_fock < 2 {
            return Err(Error::config(
                "model.n_fock",
                format!("must be >= 2, got {}", self.n_fock),
            ));
        }
        if let Some(d) = &self.disorder {
            d.validate()?;
        }
        Ok(())
    }

    pub fn drive_period(&self) -> f64 {
        2.0 * PI / self.drive_frequency
    }
}

#[derive(Debug, Clone)]
pub struct DrivenHo {
    spec: DrivenHoSpec,
    diag: Vec<f64>,
    /// `J sqrt(n+1)/sqrt(2)`; multiplied by `sin(Omega t)` at evaluation.
    coupling: Vec<f64>,
    displacement: OnceLock<Displacement>,
}

impl DrivenHo {
    pub fn new(spec: DrivenHoSpec) -> Result<Self> {
        spec.validate()?;
        let xi = spec
            .disorder
            .map(|d| d.sample(spec.n_fock))
            .unwrap_or_else(|| vec![0.0; spec.n_fock]);
        let diag = (0..spec.n_fock)
            .map(|n| spec.omega * n as f64 + xi[n])
            .collect();
        let coupling = (0..spec.n_fock - 1)
            .map(|n| spec.drive_amplitude * ((n + 1) as f64).sqrt() / SQRT_2)
            .collect();
        Ok(Self {
            spec,
            diag,
            coupling,
            displacement: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &DrivenHoSpec {
        &self.spec
    }

    /// Drive phase `Omega (t mod T)`, so that `H(t)` and `H(t + T)` share one code path.
    fn phase(&self, t: f64) -> f64 {
        self.spec.drive_frequency * t.rem_euclid(self.spec.drive_period())
    }

    fn off(&self, t: f64) -> Vec<f64> {
        let s = self.phase(t).sin();
        self.coupling.iter().map(|c| c * s).collect()
    }

    pub fn build(&self, t: f64) -> HermitianOperator {
        tridiagonal_matrix(&self.diag, &self.off(t))
    }

    pub fn bare_energies(&self) -> &[f64] {
        &self.diag
    }

    pub fn displacement(&self) -> Result<&Displacement> {
        if let Some(d) = self.displacement.get() {
            return Ok(d);
        }
        let d = Displacement::new(self.spec.n_fock)?;
        Ok(self.displacement.get_or_init(|| d))
    }

    /// `omega n - J^2 sin^2(Omega t) / (2 omega)`.
    pub fn adiabatic_energy(&self, n: usize, t: f64) -> f64 {
        let s = self.phase(t).sin();
        self.spec.omega * n as f64
            - self.spec.drive_amplitude.powi(2) * s * s / (2.0 * self.spec.omega)
    }

    /// Coherent amplitude of the instantaneous displacement, `-J sin(Omega t)/(sqrt(2) omega)`.
    pub fn adiabatic_displacement(&self, t: f64) -> f64 {
        -self.spec.drive_amplitude * self.phase(t).sin() / (SQRT_2 * self.spec.omega)
    }

    /// Instantaneous eigenstate `n`: the Fock state `|n>` displaced to the drive-shifted origin.
    pub fn adiabatic_state(&self, n: usize, t: f64) -> Result<StateVector> {
        let alpha = C64::new(self.adiabatic_displacement(t), 0.0);
        let v = self.displacement()?.displaced_fock(alpha, n)?;
        let tail = edge_mass(v.view());
        if tail > 1e-10 {
            return Err(Error::Truncation {
                tail_mass: tail,
                dim: self.spec.n_fock,
            });
        }
        StateVector::normalized(v, Basis::Fock)
    }

    /// `<m|dH/dt|n> / (E_m - E_n)` between instantaneous eigenstates, in closed form.
    pub fn theta(&self, m: usize, n: usize, t: f64) -> Result<f64> {
        if m == n {
            return Err(Error::Contract(
                "diagonal couplings are fixed to zero by the gauge".into(),
            ));
        }
        let pref = self.spec.drive_amplitude
            * self.spec.drive_frequency
            * self.phase(t).cos()
            / ((m as f64 - n as f64) * self.spec.omega);
        let elem = if m + 1 == n {
            (n as f64).sqrt()
        } else if m == n + 1 {
            ((n + 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(pref * elem / SQRT_2)
    }
}

impl Hamiltonian for DrivenHo {
    fn dim(&self) -> usize {
        self.spec.n_fock
    }
    fn basis(&self) -> Basis {
        Basis::Fock
    }
    fn apply(&self, t: f64, x: ArrayView1<C64>, y: ArrayViewMut1<C64>) {
        tridiagonal_apply(&self.diag, &self.off(t), x, y);
    }
    fn matrix(&self, t: f64) -> HermitianOperator {
        self.build(t)
    }
    fn dh_dt(&self, t: f64) -> SparseMatrix {
        let c = self.spec.drive_frequency * self.phase(t).cos();
        let mut m = SparseMatrix::new(self.spec.n_fock);
        for (n, g) in self.coupling.iter().enumerate() {
            m.push(n + 1, n, C64::new(g * c, 0.0));
            m.push(n, n + 1, C64::new(g * c, 0.0));
        }
        m
    }
    fn diagonal(&self, _t: f64) -> Array1<f64> {
        Array1::from(self.diag.clone())
    }
    fn diagonal_integral(&self, t0: f64, t1: f64) -> Array1<f64> {
        Array1::from(self.diag.clone()) * (t1 - t0)
    }
    fn spectral_bounds(&self, t: f64) -> (f64, f64) {
        tridiagonal_bounds(&self.diag, &self.off(t))
    }
    fn shortest_period(&self) -> f64 {
        self.spec.drive_period().min(2.0 * PI / self.spec.omega)
    }
    fn period(&self) -> Option<f64> {
        Some(self.spec.drive_period())
    }
    fn analytic_adiabatic_energies(&self, t: f64) -> Option<Array1<f64>> {
        if !DisorderSpec::is_clean(&self.spec.disorder) {
            return None;
        }
        Some((0..self.spec.n_fock).map(|n| self.adiabatic_energy(n, t)).collect())
    }
    fn level_spacing(&self) -> f64 {
        self.spec.omega
    }
    fn kind(&self) -> &'static str {
        "driven_ho"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> DrivenHo {
        DrivenHo::new(DrivenHoSpec {
            omega: 1.0,
            drive_frequency: 1.2,
            drive_amplitude: 0.5,
            n_fock: 60,
            disorder: None,
        })
        .unwrap()
    }

    #[test]
    fn diagonal_at_t_zero() {
        let h = fig2().build(0.0);
        assert!(h.tridiagonal_parts().unwrap().1.iter().all(|&e| e == 0.0));
        assert_eq!(h.matrix()[[7, 7]].re, 7.0);
    }

    #[test]
    fn quarter_period_coupling() {
        let m = fig2();
        let h = m.build(PI / (2.0 * 1.2));
        assert!((h.matrix()[[1, 0]].re - 0.5 / SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn theta_closed_form() {
        let m = fig2();
        assert_eq!(m.theta(5, 2, 0.3).unwrap(), 0.0);
        let v = m.theta(4, 3, 0.0).unwrap();
        assert!((v - 0.5 * 1.2 * 2.0 / SQRT_2).abs() < 1e-15);
        assert!(m.theta(4, 3, PI / 2.4).unwrap().abs() < 1e-15);
        assert!(m.theta(3, 3, 0.0).is_err());
    }

    #[test]
    fn disorder_is_reproducible() {
        let spec = DrivenHoSpec {
            disorder: Some(DisorderSpec { std_dev: 0.25, seed: 42 }),
            ..fig2().spec.clone()
        };
        let a = DrivenHo::new(spec.clone()).unwrap();
        let b = DrivenHo::new(spec).unwrap();
        assert_eq!(a.bare_energies(), b.bare_energies());
        assert_ne!(a.bare_energies()[3], 3.0);
    }
}
