use ndarray::{Array1, Array2, ArrayView1, ArrayViewMut1};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::state::StateVector;

/// Relative tolerance on `|H - H^dagger|` accepted by [`HermitianOperator::new`].
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Largest imaginary part tolerated in an expectation value.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;
/// Negative variances down to this value are treated as rounding and clamped to zero.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Anything that can act linearly on a complex vector.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// `y = A x`; `y` is overwritten.
    fn apply_into(&self, x: ArrayView1<C64>, y: ArrayViewMut1<C64>);

    fn apply(&self, x: ArrayView1<C64>) -> Array1<C64> {
        let mut y = Array1::zeros(self.dim());
        self.apply_into(x, y.view_mut());
        y
    }
}

#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: Array2<C64>,
    real: bool,
}

impl HermitianOperator {
    pub fn new(matrix: Array2<C64>) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != c {
            return Err(Error::DimensionMismatch { expected: r, found: c });
        }
        if r == 0 {
            return Err(Error::Contract("operator must have dimension >= 1".into()));
        }
        let scale = matrix.iter().fold(0.0_f64, |m, z| m.max(z.norm())).max(1.0);
        let tolerance = HERMITICITY_TOL * scale;
        let mut worst = (0.0, 0, 0);
        for i in 0..r {
            for j in i..r {
                let d = (matrix[[i, j]] - matrix[[j, i]].conj()).norm();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        if worst.0 > tolerance {
            return Err(Error::NotHermitian {
                asymmetry: worst.0,
                row: worst.1,
                col: worst.2,
                tolerance,
            });
        }
        let real = matrix.iter().all(|z| z.im == 0.0);
        Ok(Self { matrix, real })
    }

    pub fn from_real(matrix: Array2<f64>) -> Result<Self> {
        Self::new(matrix.mapv(|x| C64::new(x, 0.0)))
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// True when every entry has an exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn real_part(&self) -> Array2<f64> {
        self.matrix.mapv(|z| z.re)
    }

    /// Diagonal and first off-diagonal if the matrix is exactly tridiagonal.
    pub fn tridiagonal_parts(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if !self.real {
            return None;
        }
        let n = self.matrix.nrows();
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) > 1 && self.matrix[[i, j]].re != 0.0 {
                    return None;
                }
            }
        }
        let d = (0..n).map(|i| self.matrix[[i, i]].re).collect();
        let e = (0..n.saturating_sub(1))
            .map(|i| self.matrix[[i + 1, i]].re)
            .collect();
        Some((d, e))
    }
}

impl LinearOperator for HermitianOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply_into(&self, x: ArrayView1<C64>, mut y: ArrayViewMut1<C64>) {
        y.assign(&self.matrix.dot(&x));
    }
}

/// Coordinate-list sparse matrix.
#[derive(Debug, Clone, Default)]
pub struct SparseMatrix {
    pub dim: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl SparseMatrix {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: C64) {
        if value != C64::new(0.0, 0.0) {
            self.entries.push((row, col, value));
        }
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut m = Array2::zeros((self.dim, self.dim));
        for &(i, j, v) in &self.entries {
            m[[i, j]] += v;
        }
        m
    }

    /// Gershgorin interval of a Hermitian sparse matrix.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut centre = vec![0.0; self.dim];
        let mut radius = vec![0.0; self.dim];
        for &(i, j, v) in &self.entries {
            if i == j {
                centre[i] += v.re;
            } else {
                radius[i] += v.norm();
            }
        }
        if self.dim == 0 {
            return (0.0, 0.0);
        }
        (0..self.dim).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            (lo.min(centre[i] - radius[i]), hi.max(centre[i] + radius[i]))
        })
    }

    /// `A V` for a dense `V` with `dim` rows.
    pub fn dot_dense(&self, v: &Array2<C64>) -> Array2<C64> {
        let mut out = Array2::zeros((self.dim, v.ncols()));
        for &(i, j, a) in &self.entries {
            let src = v.row(j);
            let mut dst = out.row_mut(i);
            dst.zip_mut_with(&src, |d, s| *d += a * s);
        }
        out
    }
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, x: ArrayView1<C64>, mut y: ArrayViewMut1<C64>) {
        y.fill(C64::new(0.0, 0.0));
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
    }
}

fn check_dims(op: &impl LinearOperator, psi: &StateVector) -> Result<()> {
    if op.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: psi.dim(),
        });
    }
    Ok(())
}

/// `<psi|H|psi>` for a normalized state.
pub fn expectation(psi: &StateVector, op: &impl LinearOperator) -> Result<f64> {
    check_dims(op, psi)?;
    let hpsi = op.apply(psi.view());
    let v: C64 = psi
        .amplitudes()
        .iter()
        .zip(hpsi.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    if v.im.abs() > EXPECTATION_IMAG_TOL * v.re.abs().max(1.0) {
        return Err(Error::NumericalConsistency(format!(
            "expectation value has imaginary part {:.3e}",
            v.im
        )));
    }
    Ok(v.re)
}

/// `sqrt(<H^2> - <H>^2)`, evaluated as `|(H - <H>) psi|` with a single operator application.
pub fn energy_uncertainty(psi: &StateVector, op: &impl LinearOperator) -> Result<f64> {
    check_dims(op, psi)?;
    let hpsi = op.apply(psi.view());
    let mean: C64 = psi
        .amplitudes()
        .iter()
        .zip(hpsi.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    if mean.im.abs() > EXPECTATION_IMAG_TOL * mean.re.abs().max(1.0) {
        return Err(Error::NumericalConsistency(format!(
            "expectation value has imaginary part {:.3e}",
            mean.im
        )));
    }
    let variance: f64 = psi
        .amplitudes()
        .iter()
        .zip(hpsi.iter())
        .map(|(a, b)| (b - mean.re * a).norm_sqr())
        .sum();
    if variance < -VARIANCE_FLOOR {
        return Err(Error::NumericalConsistency(format!(
            "negative variance {variance:.3e}"
        )));
    }
    Ok(variance.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::state::Basis;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = array![[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, 1.0), c(2.0, 0.0)]];
        match HermitianOperator::new(m) {
            Err(Error::NotHermitian { row, col, .. }) => assert_eq!((row, col), (0, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn accepts_complex_hermitian() {
        let m = array![[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(2.0, 0.0)]];
        let h = HermitianOperator::new(m).unwrap();
        assert!(!h.is_real());
        assert!(h.tridiagonal_parts().is_none());
    }

    #[test]
    fn expectation_and_uncertainty_of_pauli_x() {
        let x = HermitianOperator::from_real(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let up = StateVector::basis_state(2, 0, Basis::Site).unwrap();
        assert_eq!(expectation(&up, &x).unwrap(), 0.0);
        assert!((energy_uncertainty(&up, &x).unwrap() - 1.0).abs() < 1e-15);
        let plus =
            StateVector::normalized(array![c(1.0, 0.0), c(1.0, 0.0)], Basis::Site).unwrap();
        assert!((expectation(&plus, &x).unwrap() - 1.0).abs() < 1e-15);
        assert!(energy_uncertainty(&plus, &x).unwrap() < 1e-7);
    }

    #[test]
    fn sparse_matches_dense() {
        let mut s = SparseMatrix::new(3);
        s.push(0, 1, c(2.0, 0.0));
        s.push(2, 2, c(0.0, 1.0));
        let x = array![c(1.0, 0.0), c(0.5, 0.5), c(-1.0, 0.0)];
        let d = s.to_dense().dot(&x);
        let y = s.apply(x.view());
        for i in 0..3 {
            assert!((d[i] - y[i]).norm() < 1e-15);
        }
    }
}
