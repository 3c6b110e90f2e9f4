//! The three Hamiltonian families and their analytic companions.

pub mod bessel;
pub mod displacement;
pub mod driven_ho;
pub mod initial;
pub mod lz_grid;
pub mod single_band;

use ndarray::{Array1, ArrayView1, ArrayViewMut1};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Basis, HermitianOperator, LinearOperator, SparseMatrix};

pub use driven_ho::{DrivenHo, DrivenHoSpec};
pub use initial::{initial_state, InitialStateSpec};
pub use lz_grid::{Branch, LzGrid, LzGridSpec};
pub use single_band::{SingleBand, SingleBandSpec};

/// Quenched Gaussian level shifts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSpec {
    pub std_dev: f64,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.std_dev >= 0.0 && self.std_dev.is_finite()) {
            return Err(Error::config(
                "model.disorder.std_dev",
                format!("must be finite and >= 0, got {}", self.std_dev),
            ));
        }
        Ok(())
    }

    /// `n` shifts drawn in index order from `N(0, std_dev^2)` with a ChaCha8 stream.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        if self.std_dev == 0.0 {
            return vec![0.0; n];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let normal = Normal::new(0.0, self.std_dev).expect("validated std_dev");
        (0..n).map(|_| normal.sample(&mut rng)).collect()
    }

    pub fn is_clean(spec: &Option<DisorderSpec>) -> bool {
        spec.is_none_or(|d| d.std_dev == 0.0)
    }
}

/// A Hermitian `H(t)` with the structure the propagator and frame code rely on.
pub trait Hamiltonian: Send + Sync {
    fn dim(&self) -> usize;
    fn basis(&self) -> Basis;
    /// `y = H(t) x`.
    fn apply(&self, t: f64, x: ArrayView1<C64>, y: ArrayViewMut1<C64>);
    fn matrix(&self, t: f64) -> HermitianOperator;
    /// `dH/dt` at `t`.
    fn dh_dt(&self, t: f64) -> SparseMatrix;
    fn diagonal(&self, t: f64) -> Array1<f64>;
    /// `int_{t0}^{t1} diag H(s) ds`, evaluated in closed form.
    fn diagonal_integral(&self, t0: f64, t1: f64) -> Array1<f64>;
    /// Gershgorin bounds on the spectrum at `t`.
    fn spectral_bounds(&self, t: f64) -> (f64, f64);
    /// Shortest intrinsic time scale; sets the default step.
    fn shortest_period(&self) -> f64;
    /// `T` with `H(t + T) = H(t)`.
    fn period(&self) -> Option<f64> {
        None
    }
    /// `tau` with `H(t + tau) = S H(t) S^dagger` for a basis relabeling `S`.
    fn relabel_period(&self) -> Option<f64> {
        None
    }
    /// `S^{-k} psi` with amplitudes shifted past the basis edge discarded.
    fn relabel(&self, psi: ArrayView1<C64>, k: i64) -> Array1<C64> {
        let _ = k;
        psi.to_owned()
    }
    /// Closed-form instantaneous adiabatic energies (ascending), where known.
    fn analytic_adiabatic_energies(&self, _t: f64) -> Option<Array1<f64>> {
        None
    }
    /// Energy-to-index conversion for widths (level spacing).
    fn level_spacing(&self) -> f64;
    fn kind(&self) -> &'static str;
}

/// `H(t)` frozen at one time, usable wherever a [`LinearOperator`] is expected.
pub struct AtTime<'a, H: ?Sized> {
    pub model: &'a H,
    pub t: f64,
}

impl<H: Hamiltonian + ?Sized> LinearOperator for AtTime<'_, H> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn apply_into(&self, x: ArrayView1<C64>, y: ArrayViewMut1<C64>) {
        self.model.apply(self.t, x, y);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    SingleBand(SingleBandSpec),
    DrivenHo(DrivenHoSpec),
    LzGrid(LzGridSpec),
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::SingleBand(s) => s.validate(),
            ModelSpec::DrivenHo(s) => s.validate(),
            ModelSpec::LzGrid(s) => s.validate(),
        }
    }

    pub fn build(&self) -> Result<Model> {
        Ok(match self {
            ModelSpec::SingleBand(s) => Model::SingleBand(SingleBand::new(s.clone())?),
            ModelSpec::DrivenHo(s) => Model::DrivenHo(DrivenHo::new(s.clone())?),
            ModelSpec::LzGrid(s) => Model::LzGrid(LzGrid::new(s.clone())?),
        })
    }

    pub fn disorder(&self) -> Option<DisorderSpec> {
        match self {
            ModelSpec::SingleBand(s) => s.disorder,
            ModelSpec::DrivenHo(s) => s.disorder,
            ModelSpec::LzGrid(_) => None,
        }
    }

    pub fn with_disorder_seed(&self, seed: u64) -> ModelSpec {
        let mut out = self.clone();
        match &mut out {
            ModelSpec::SingleBand(s) => {
                if let Some(d) = &mut s.disorder {
                    d.seed = seed;
                }
            }
            ModelSpec::DrivenHo(s) => {
                if let Some(d) = &mut s.disorder {
                    d.seed = seed;
                }
            }
            ModelSpec::LzGrid(_) => {}
        }
        out
    }
}

/// Concrete model selected by a [`ModelSpec`].
#[derive(Debug, Clone)]
pub enum Model {
    SingleBand(SingleBand),
    DrivenHo(DrivenHo),
    LzGrid(LzGrid),
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            Model::SingleBand($m) => $e,
            Model::DrivenHo($m) => $e,
            Model::LzGrid($m) => $e,
        }
    };
}

impl Hamiltonian for Model {
    fn dim(&self) -> usize {
        dispatch!(self, m => m.dim())
    }
    fn basis(&self) -> Basis {
        dispatch!(self, m => m.basis())
    }
    fn apply(&self, t: f64, x: ArrayView1<C64>, y: ArrayViewMut1<C64>) {
        dispatch!(self, m => m.apply(t, x, y))
    }
    fn matrix(&self, t: f64) -> HermitianOperator {
        dispatch!(self, m => m.matrix(t))
    }
    fn dh_dt(&self, t: f64) -> SparseMatrix {
        dispatch!(self, m => m.dh_dt(t))
    }
    fn diagonal(&self, t: f64) -> Array1<f64> {
        dispatch!(self, m => m.diagonal(t))
    }
    fn diagonal_integral(&self, t0: f64, t1: f64) -> Array1<f64> {
        dispatch!(self, m => m.diagonal_integral(t0, t1))
    }
    fn spectral_bounds(&self, t: f64) -> (f64, f64) {
        dispatch!(self, m => m.spectral_bounds(t))
    }
    fn shortest_period(&self) -> f64 {
        dispatch!(self, m => m.shortest_period())
    }
    fn period(&self) -> Option<f64> {
        dispatch!(self, m => m.period())
    }
    fn relabel_period(&self) -> Option<f64> {
        dispatch!(self, m => m.relabel_period())
    }
    fn relabel(&self, psi: ArrayView1<C64>, k: i64) -> Array1<C64> {
        dispatch!(self, m => m.relabel(psi, k))
    }
    fn analytic_adiabatic_energies(&self, t: f64) -> Option<Array1<f64>> {
        dispatch!(self, m => m.analytic_adiabatic_energies(t))
    }
    fn level_spacing(&self) -> f64 {
        dispatch!(self, m => m.level_spacing())
    }
    fn kind(&self) -> &'static str {
        dispatch!(self, m => m.kind())
    }
}

/// `y = diag * x + off-diagonal hops` for a real symmetric tridiagonal matrix.
pub(crate) fn tridiagonal_apply(
    d: &[f64],
    e: &[f64],
    x: ArrayView1<C64>,
    mut y: ArrayViewMut1<C64>,
) {
    let n = d.len();
    for i in 0..n {
        let mut acc = x[i] * d[i];
        if i > 0 {
            acc += x[i - 1] * e[i - 1];
        }
        if i + 1 < n {
            acc += x[i + 1] * e[i];
        }
        y[i] = acc;
    }
}

pub(crate) fn tridiagonal_bounds(d: &[f64], e: &[f64]) -> (f64, f64) {
    let n = d.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (lo, hi)
}

pub(crate) fn tridiagonal_matrix(d: &[f64], e: &[f64]) -> HermitianOperator {
    let n = d.len();
    let mut m = ndarray::Array2::<f64>::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = d[i];
        if i + 1 < n {
            m[[i, i + 1]] = e[i];
            m[[i + 1, i]] = e[i];
        }
    }
    HermitianOperator::from_real(m).expect("symmetric by construction")
}

pub(crate) fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be finite and > 0, got {v}")))
    }
}

pub(crate) fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be finite, got {v}")))
    }
}
