use std::f64::consts::PI;

use ndarray::{Array1, ArrayView1, ArrayViewMut1};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Basis, HermitianOperator, SparseMatrix, StateVector};
use crate::models::bessel::bessel_j;
use crate::models::{
    positive, tridiagonal_apply, tridiagonal_bounds, tridiagonal_matrix, DisorderSpec,
    Hamiltonian,
};

/// Tilted tight-binding chain `-J sum (|n><n+1| + h.c.) + sum (n omega + xi_n) |n><n|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleBandSpec {
    #[serde(rename = "J")]
    pub hopping: f64,
    #[serde(rename = "omega")]
    pub tilt: f64,
    pub n_sites: usize,
    #[serde(default)]
    pub disorder: Option<DisorderSpec>,
}

impl SingleBandSpec {
    pub fn validate(&self) -> Result<()> {
        positive("model.J", self.hopping)?;
        positive("model.omega", self.tilt)?;
        if self.n_sites < 3 || self.n_sites.is_multiple_of(2) {
            return Err(Error::config(
                "model.n_sites",
                format!("must be odd and >= 3, got {}", self.n_sites),
            ));
        }
        if let Some(d) = &self.disorder {
            d.validate()?;
        }
        Ok(())
    }

    pub fn half_width(&self) -> i64 {
        (self.n_sites as i64 - 1) / 2
    }
}

#[derive(Debug, Clone)]
pub struct SingleBand {
    spec: SingleBandSpec,
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SingleBand {
    pub fn new(spec: SingleBandSpec) -> Result<Self> {
        spec.validate()?;
        let l = spec.half_width();
        let xi = spec
            .disorder
            .map(|d| d.sample(spec.n_sites))
            .unwrap_or_else(|| vec![0.0; spec.n_sites]);
        let diag = (0..spec.n_sites)
            .map(|i| (i as i64 - l) as f64 * spec.tilt + xi[i])
            .collect();
        let off = vec![-spec.hopping; spec.n_sites - 1];
        Ok(Self { spec, diag, off })
    }

    pub fn spec(&self) -> &SingleBandSpec {
        &self.spec
    }

    /// Basis index of site `n` (sites run `-L..=L`).
    pub fn index_of_site(&self, n: i64) -> Result<usize> {
        let l = self.spec.half_width();
        if n.abs() > l {
            return Err(Error::Contract(format!("site {n} outside -{l}..={l}")));
        }
        Ok((n + l) as usize)
    }

    pub fn site_of_index(&self, i: usize) -> i64 {
        i as i64 - self.spec.half_width()
    }

    /// Time-independent Hamiltonian matrix.
    pub fn build(&self) -> HermitianOperator {
        tridiagonal_matrix(&self.diag, &self.off)
    }

    /// `<n|psi_m> = J_{n-m}(2J/omega)` for the infinite clean lattice.
    pub fn eigenstate_oracle(&self, m: i64, n: i64) -> Result<f64> {
        if !DisorderSpec::is_clean(&self.spec.disorder) {
            return Err(Error::Contract("Bessel eigenstates require a clean lattice".into()));
        }
        Ok(bessel_j(n - m, 2.0 * self.spec.hopping / self.spec.tilt))
    }

    /// Infinite-lattice ladder energy `m omega`.
    pub fn ladder_energy(&self, m: i64) -> f64 {
        m as f64 * self.spec.tilt
    }

    /// Wannier-Stark state centred at `m` on the truncated lattice, normalised.
    pub fn wannier_stark_state(&self, m: i64) -> Result<StateVector> {
        let amps: Array1<C64> = (0..self.spec.n_sites)
            .map(|i| {
                self.eigenstate_oracle(m, self.site_of_index(i))
                    .map(|a| C64::new(a, 0.0))
            })
            .collect::<Result<_>>()?;
        StateVector::normalized(amps, Basis::Site)
    }

    pub fn bloch_period(&self) -> f64 {
        2.0 * PI / self.spec.tilt
    }
}

impl Hamiltonian for SingleBand {
    fn dim(&self) -> usize {
        self.spec.n_sites
    }
    fn basis(&self) -> Basis {
        Basis::Site
    }
    fn apply(&self, _t: f64, x: ArrayView1<C64>, y: ArrayViewMut1<C64>) {
        tridiagonal_apply(&self.diag, &self.off, x, y);
    }
    fn matrix(&self, _t: f64) -> HermitianOperator {
        self.build()
    }
    fn dh_dt(&self, _t: f64) -> SparseMatrix {
        SparseMatrix::new(self.spec.n_sites)
    }
    fn diagonal(&self, _t: f64) -> Array1<f64> {
        Array1::from(self.diag.clone())
    }
    fn diagonal_integral(&self, t0: f64, t1: f64) -> Array1<f64> {
        Array1::from(self.diag.clone()) * (t1 - t0)
    }
    fn spectral_bounds(&self, _t: f64) -> (f64, f64) {
        tridiagonal_bounds(&self.diag, &self.off)
    }
    fn shortest_period(&self) -> f64 {
        self.bloch_period()
    }
    fn analytic_adiabatic_energies(&self, _t: f64) -> Option<Array1<f64>> {
        if !DisorderSpec::is_clean(&self.spec.disorder) {
            return None;
        }
        let l = self.spec.half_width();
        Some((-l..=l).map(|m| self.ladder_energy(m)).collect())
    }
    fn level_spacing(&self) -> f64 {
        self.spec.tilt
    }
    fn kind(&self) -> &'static str {
        "single_band"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize) -> SingleBandSpec {
        SingleBandSpec {
            hopping: 10.0,
            tilt: 1.0,
            n_sites: n,
            disorder: None,
        }
    }

    #[test]
    fn matrix_layout() {
        let m = SingleBand::new(spec(401)).unwrap();
        let h = m.build();
        let c = m.index_of_site(0).unwrap();
        assert_eq!(h.matrix()[[c, c]].re, 0.0);
        assert_eq!(h.matrix()[[c, c + 1]].re, -10.0);
        assert_eq!(h.matrix()[[c, c - 1]].re, -10.0);
        assert_eq!(h.matrix()[[c + 3, c + 3]].re, 3.0);
    }

    #[test]
    fn zero_disorder_matches_clean() {
        let mut s = spec(21);
        let clean = SingleBand::new(s.clone()).unwrap().build();
        s.disorder = Some(DisorderSpec { std_dev: 0.0, seed: 5 });
        let dis = SingleBand::new(s).unwrap().build();
        assert_eq!(clean.matrix(), dis.matrix());
    }

    #[test]
    fn rejects_even_size() {
        assert!(SingleBand::new(spec(20)).is_err());
    }

    #[test]
    fn wannier_stark_state_is_eigenvector() {
        let m = SingleBand::new(spec(201)).unwrap();
        let psi = m.wannier_stark_state(3).unwrap();
        let h = m.build();
        let hpsi = h.matrix().dot(psi.amplitudes());
        let resid: f64 = hpsi
            .iter()
            .zip(psi.amplitudes().iter())
            .map(|(a, b)| (a - 3.0 * b).norm_sqr())
            .sum();
        assert!(resid.sqrt() < 1e-10);
    }
}
