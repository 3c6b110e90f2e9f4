use ndarray::{Array1, ArrayView1};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label of the basis a state vector is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Site,
    Fock,
    DiabaticLz,
    AdiabaticIndexed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Array1<C64>,
    basis: Basis,
}

impl StateVector {
    pub fn new(amplitudes: Array1<C64>, basis: Basis) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Contract("state vector must have dimension >= 1".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { t: f64::NAN });
        }
        Ok(Self { amplitudes, basis })
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(amplitudes: Array1<C64>, basis: Basis) -> Result<Self> {
        let mut s = Self::new(amplitudes, basis)?;
        let n = s.norm();
        if n == 0.0 {
            return Err(Error::Contract("cannot normalize the zero vector".into()));
        }
        s.amplitudes.mapv_inplace(|z| z / n);
        Ok(s)
    }

    pub fn basis_state(dim: usize, index: usize, basis: Basis) -> Result<Self> {
        if index >= dim {
            return Err(Error::Contract(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut a = Array1::zeros(dim);
        a[index] = C64::new(1.0, 0.0);
        Self::new(a, basis)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn view(&self) -> ArrayView1<'_, C64> {
        self.amplitudes.view()
    }

    pub fn into_amplitudes(self) -> Array1<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(inner(self.view(), other.view()))
    }

    pub fn populations(&self) -> Array1<f64> {
        self.amplitudes.mapv(|z| z.norm_sqr())
    }
}

/// `<a|b>` for raw amplitude arrays.
pub fn inner(a: ArrayView1<C64>, b: ArrayView1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `1 - |<a|b>|^2` for unit vectors, evaluated as `|b - <a|b> a|^2` so that
/// deficits far below machine epsilon survive.
pub fn overlap_deficit(a: ArrayView1<C64>, b: ArrayView1<C64>) -> f64 {
    let c = inner(a, b);
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (y - c * x).norm_sqr())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn normalization_and_inner_product() {
        let s = StateVector::normalized(
            array![C64::new(3.0, 0.0), C64::new(0.0, 4.0)],
            Basis::Site,
        )
        .unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        let ip = s.inner(&s).unwrap();
        assert!((ip.re - 1.0).abs() < 1e-15 && ip.im.abs() < 1e-15);
        let p = s.populations();
        assert!((p[0] - 0.36).abs() < 1e-15 && (p[1] - 0.64).abs() < 1e-15);
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert!(StateVector::normalized(Array1::zeros(3), Basis::Fock).is_err());
        assert!(StateVector::new(Array1::zeros(0), Basis::Fock).is_err());
    }

    #[test]
    fn deficit_of_tiny_rotation() {
        let eps = 1e-9_f64;
        let a = array![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let b = array![C64::new(eps.cos(), 0.0), C64::new(eps.sin(), 0.0)];
        let d = overlap_deficit(a.view(), b.view());
        assert!((d - eps * eps).abs() < 1e-30);
    }
}
