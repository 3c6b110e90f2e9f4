//! Truncated displacement operator `D(alpha) = exp(alpha a^dagger - alpha^* a)` in the Fock basis.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::tridiag::eigh_tridiagonal;

/// Number of top Fock levels treated as the truncation edge.
pub const EDGE_LEVELS: usize = 50;

/// Exponentials of the truncated displacement generator, evaluated through one
/// eigendecomposition of the position quadrature `X = (a + a^dagger)/sqrt(2)`.
///
/// With `P = S X S^dagger`, `S = diag(i^n)` and `R(theta) = diag(e^{i theta n})`,
/// `D(r e^{i theta}) = R(theta) S exp(-i sqrt(2) r X) S^dagger R(theta)^dagger`.
#[derive(Debug, Clone)]
pub struct Displacement {
    values: Vec<f64>,
    vectors: Array2<f64>,
}

impl Displacement {
    pub fn new(n_fock: usize) -> Result<Self> {
        if n_fock < 2 {
            return Err(Error::Contract("displacement needs at least two Fock levels".into()));
        }
        let d = vec![0.0; n_fock];
        let e: Vec<f64> = (0..n_fock - 1)
            .map(|n| ((n + 1) as f64 / 2.0).sqrt())
            .collect();
        let (values, vectors) = eigh_tridiagonal(&d, &e, None)?;
        Ok(Self { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `D(alpha) phi`.
    pub fn apply(&self, alpha: C64, phi: ArrayView1<C64>) -> Result<Array1<C64>> {
        let n = self.dim();
        if phi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: phi.len(),
            });
        }
        let r = alpha.norm();
        let theta = if r == 0.0 { 0.0 } else { alpha.arg() };
        let phase = |k: usize, sign: f64| -> C64 {
            let quarter = match (k % 4, sign > 0.0) {
                (0, _) => C64::new(1.0, 0.0),
                (2, _) => C64::new(-1.0, 0.0),
                (1, true) | (3, false) => C64::new(0.0, 1.0),
                _ => C64::new(0.0, -1.0),
            };
            if theta == 0.0 {
                quarter
            } else {
                quarter * C64::from_polar(1.0, sign * theta * k as f64)
            }
        };
        let x: Array1<C64> = phi
            .iter()
            .enumerate()
            .map(|(k, z)| z * phase(k, -1.0))
            .collect();
        let xr = self.vectors.t().dot(&x.mapv(|z| z.re));
        let xi = self.vectors.t().dot(&x.mapv(|z| z.im));
        let scale = -std::f64::consts::SQRT_2 * r;
        let y: Array1<C64> = (0..n)
            .map(|k| C64::new(xr[k], xi[k]) * C64::from_polar(1.0, scale * self.values[k]))
            .collect();
        let zr = self.vectors.dot(&y.mapv(|z| z.re));
        let zi = self.vectors.dot(&y.mapv(|z| z.im));
        Ok((0..n).map(|k| C64::new(zr[k], zi[k]) * phase(k, 1.0)).collect())
    }

    /// `D(alpha)|n>`.
    pub fn displaced_fock(&self, alpha: C64, n: usize) -> Result<Array1<C64>> {
        if n >= self.dim() {
            return Err(Error::Contract(format!(
                "Fock level {n} outside truncation {}",
                self.dim()
            )));
        }
        let mut e = Array1::zeros(self.dim());
        e[n] = C64::new(1.0, 0.0);
        self.apply(alpha, e.view())
    }
}

/// Population in the top `EDGE_LEVELS` levels (or top quarter for small bases).
pub fn edge_mass(amplitudes: ArrayView1<C64>) -> f64 {
    let n = amplitudes.len();
    let edge = EDGE_LEVELS.min(n / 4).max(1);
    amplitudes
        .iter()
        .skip(n - edge)
        .map(|z| z.norm_sqr())
        .sum()
}
