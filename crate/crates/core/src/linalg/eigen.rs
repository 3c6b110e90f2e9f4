use std::cmp::Ordering;
use std::ops::Range;

use ndarray::{s, Array1, Array2, ArrayView1, ShapeBuilder};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::operator::{HermitianOperator, SparseMatrix};
use crate::linalg::tridiag::eigh_tridiagonal;

/// Gaps below this (relative to `max(1, |H|_max)`) mark a degenerate pair.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Column-stacked eigenvectors; real matrices keep real storage.
#[derive(Debug, Clone, PartialEq)]
pub enum Vectors {
    Real(Array2<f64>),
    Complex(Array2<C64>),
}

impl Vectors {
    pub fn nrows(&self) -> usize {
        match self {
            Vectors::Real(v) => v.nrows(),
            Vectors::Complex(v) => v.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Vectors::Real(v) => v.ncols(),
            Vectors::Complex(v) => v.ncols(),
        }
    }

    pub fn column(&self, k: usize) -> Array1<C64> {
        match self {
            Vectors::Real(v) => v.column(k).mapv(|x| C64::new(x, 0.0)),
            Vectors::Complex(v) => v.column(k).to_owned(),
        }
    }

    pub fn to_complex(&self) -> Array2<C64> {
        match self {
            Vectors::Real(v) => v.mapv(|x| C64::new(x, 0.0)),
            Vectors::Complex(v) => v.clone(),
        }
    }

    /// `V^dagger x`.
    pub fn project(&self, x: ArrayView1<C64>) -> Array1<C64> {
        match self {
            Vectors::Real(v) => {
                let re = v.t().dot(&x.mapv(|z| z.re));
                let im = v.t().dot(&x.mapv(|z| z.im));
                re.iter()
                    .zip(im.iter())
                    .map(|(&a, &b)| C64::new(a, b))
                    .collect()
            }
            Vectors::Complex(v) => v.t().mapv(|z| z.conj()).dot(&x),
        }
    }

    /// `V c`.
    pub fn expand(&self, c: ArrayView1<C64>) -> Array1<C64> {
        match self {
            Vectors::Real(v) => {
                let re = v.dot(&c.mapv(|z| z.re));
                let im = v.dot(&c.mapv(|z| z.im));
                re.iter()
                    .zip(im.iter())
                    .map(|(&a, &b)| C64::new(a, b))
                    .collect()
            }
            Vectors::Complex(v) => v.dot(&c),
        }
    }

    /// `<other_k|self_k>`.
    pub fn column_overlap(&self, other: &Vectors, k: usize) -> C64 {
        match (self, other) {
            (Vectors::Real(a), Vectors::Real(b)) => C64::new(a.column(k).dot(&b.column(k)), 0.0),
            _ => {
                let a = self.column(k);
                let b = other.column(k);
                b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum()
            }
        }
    }

    /// Multiplies column `k` by the unit-modulus `phase`, promoting to complex
    /// storage only when the phase is not real.
    pub fn rotate_column(&mut self, k: usize, phase: C64) {
        if let Vectors::Real(v) = self {
            if phase.im == 0.0 && (phase.re == 1.0 || phase.re == -1.0) {
                if phase.re < 0.0 {
                    v.column_mut(k).mapv_inplace(|x| -x);
                }
                return;
            }
            *self = Vectors::Complex(v.mapv(|x| C64::new(x, 0.0)));
        }
        if let Vectors::Complex(v) = self {
            v.column_mut(k).mapv_inplace(|z| z * phase);
        }
    }

    /// `V^dagger A V` for a sparse `A`.
    pub fn sandwich(&self, a: &SparseMatrix) -> Array2<C64> {
        let all_real = a.entries.iter().all(|e| e.2.im == 0.0);
        match self {
            Vectors::Real(v) if all_real => {
                let mut av = Array2::<f64>::zeros(v.dim());
                for &(i, j, x) in &a.entries {
                    let src = v.row(j);
                    let mut dst = av.row_mut(i);
                    dst.scaled_add(x.re, &src);
                }
                v.t().dot(&av).mapv(|x| C64::new(x, 0.0))
            }
            _ => {
                let v = self.to_complex();
                let av = a.dot_dense(&v);
                v.t().mapv(|z| z.conj()).dot(&av)
            }
        }
    }

    pub fn select_columns(&self, range: Range<usize>) -> Vectors {
        match self {
            Vectors::Real(v) => Vectors::Real(v.slice(s![.., range]).to_owned()),
            Vectors::Complex(v) => Vectors::Complex(v.slice(s![.., range]).to_owned()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending eigenvalues.
    pub values: Array1<f64>,
    /// Column `k` belongs to `values[k]`.
    pub vectors: Vectors,
    /// Rank of the first computed eigenpair within the full spectrum.
    pub offset: usize,
    /// Pairs `(k, k + 1)` whose gap is below the degeneracy threshold.
    pub degenerate: Vec<(usize, usize)>,
}

impl EigenDecomposition {
    /// `max_k |H v_k - E_k v_k|`.
    pub fn max_residual(&self, h: &HermitianOperator) -> f64 {
        let v = self.vectors.to_complex();
        let hv = h.matrix().dot(&v);
        let mut worst = 0.0_f64;
        for k in 0..v.ncols() {
            let r: f64 = hv
                .column(k)
                .iter()
                .zip(v.column(k).iter())
                .map(|(a, b)| (a - self.values[k] * b).norm_sqr())
                .sum();
            worst = worst.max(r.sqrt());
        }
        worst
    }
}

/// Full eigendecomposition with ascending eigenvalues and the canonical phase
/// convention: the largest-magnitude component of each eigenvector is real and
/// positive. Within a degenerate block the vectors are ordered
/// lexicographically.
pub fn eig_hermitian(h: &HermitianOperator) -> Result<EigenDecomposition> {
    eig_hermitian_range(h, 0..h.matrix().nrows())
}

/// Like [`eig_hermitian`] but returns only the eigenpairs with ranks in `range`.
/// Exactly tridiagonal real matrices only compute the requested pairs.
pub fn eig_hermitian_range(h: &HermitianOperator, range: Range<usize>) -> Result<EigenDecomposition> {
    let n = h.matrix().nrows();
    if range.start >= range.end || range.end > n {
        return Err(Error::Contract(format!(
            "eigenvalue rank range {range:?} invalid for dimension {n}"
        )));
    }
    let (values, vectors) = if let Some((d, e)) = h.tridiagonal_parts() {
        let r = if range.start == 0 && range.end == n {
            None
        } else {
            Some(range.clone())
        };
        let (w, v) = eigh_tridiagonal(&d, &e, r)?;
        (Array1::from(w), Vectors::Real(v))
    } else if h.is_real() {
        let (w, v) = h
            .real_part()
            .eigh(UPLO::Lower)
            .map_err(|e| Error::Eigensolver(e.to_string()))?;
        (
            w.slice(s![range.clone()]).to_owned(),
            Vectors::Real(v.slice(s![.., range.clone()]).to_owned()),
        )
    } else {
        // Column-major input: the row-major path hands LAPACK the conjugate matrix.
        let mut a = Array2::<C64>::zeros(h.matrix().dim().f());
        a.assign(h.matrix());
        let (w, v) = a
            .eigh(UPLO::Lower)
            .map_err(|e| Error::Eigensolver(e.to_string()))?;
        (
            w.slice(s![range.clone()]).to_owned(),
            Vectors::Complex(v.slice(s![.., range.clone()]).to_owned()),
        )
    };
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    let scale = h.matrix().iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    finish(values, vectors, range.start, DEGENERACY_GAP * scale)
}

fn finish(
    values: Array1<f64>,
    mut vectors: Vectors,
    offset: usize,
    gap_tol: f64,
) -> Result<EigenDecomposition> {
    for k in 0..vectors.ncols() {
        canonicalize_column(&mut vectors, k);
    }
    let degenerate: Vec<(usize, usize)> = (0..values.len().saturating_sub(1))
        .filter(|&k| values[k + 1] - values[k] < gap_tol)
        .map(|k| (k, k + 1))
        .collect();
    if !degenerate.is_empty() {
        order_degenerate_blocks(&mut vectors, &degenerate);
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        offset,
        degenerate,
    })
}

fn canonicalize_column(vectors: &mut Vectors, k: usize) {
    let col = vectors.column(k);
    let max = col.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if max == 0.0 {
        return;
    }
    let pivot = col
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-10))
        .unwrap_or(0);
    let z = col[pivot];
    let phase = z.conj() / z.norm();
    if let Vectors::Real(_) = vectors {
        let sign = if z.re < 0.0 { -1.0 } else { 1.0 };
        vectors.rotate_column(k, C64::new(sign, 0.0));
    } else {
        vectors.rotate_column(k, phase);
        if let Vectors::Complex(v) = vectors {
            v[[pivot, k]] = C64::new(v[[pivot, k]].norm(), 0.0);
        }
    }
}

fn lexicographic(a: ArrayView1<C64>, b: ArrayView1<C64>) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = y
            .re
            .partial_cmp(&x.re)
            .unwrap_or(Ordering::Equal)
            .then(y.im.partial_cmp(&x.im).unwrap_or(Ordering::Equal));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn order_degenerate_blocks(vectors: &mut Vectors, pairs: &[(usize, usize)]) {
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in pairs {
        match blocks.last_mut() {
            Some(last) if last.1 == a => last.1 = b,
            _ => blocks.push((a, b)),
        }
    }
    let mut v = vectors.to_complex();
    for (start, end) in blocks {
        let mut idx: Vec<usize> = (start..=end).collect();
        idx.sort_by(|&i, &j| lexicographic(v.column(i), v.column(j)));
        let cols: Vec<Array1<C64>> = idx.iter().map(|&i| v.column(i).to_owned()).collect();
        for (offset, c) in cols.into_iter().enumerate() {
            v.column_mut(start + offset).assign(&c);
        }
    }
    *vectors = match vectors {
        Vectors::Real(_) => Vectors::Real(v.mapv(|z| z.re)),
        Vectors::Complex(_) => Vectors::Complex(v),
    };
}

/// Ascending eigenvalues only.
pub fn eigvals_hermitian(h: &HermitianOperator) -> Result<Array1<f64>> {
    Ok(eig_hermitian(h)?.values)
}

/// Gram matrix `V^dagger V`, used by orthonormality checks.
pub fn gram(vectors: &Vectors) -> Array2<C64> {
    let v = vectors.to_complex();
    v.t().mapv(|z| z.conj()).dot(&v)
}

pub fn max_abs_offdiag_identity(g: &Array2<C64>) -> f64 {
    let mut worst = 0.0_f64;
    for ((i, j), z) in g.indexed_iter() {
        let target = if i == j { 1.0 } else { 0.0 };
        worst = worst.max((z - C64::new(target, 0.0)).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn complex_two_level() {
        let h = HermitianOperator::new(array![[c(1.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(-1.0, 0.0)]])
            .unwrap();
        let e = eig_hermitian(&h).unwrap();
        let r = 2f64.sqrt();
        assert!((e.values[0] + r).abs() < 1e-14 && (e.values[1] - r).abs() < 1e-14);
        assert!(e.max_residual(&h) < 1e-13);
        for k in 0..2 {
            let col = e.vectors.column(k);
            let pivot = if col[0].norm() >= col[1].norm() * (1.0 - 1e-10) { 0 } else { 1 };
            assert!(col[pivot].im.abs() < 1e-15 && col[pivot].re > 0.0);
        }
    }

    #[test]
    fn dense_real_path_and_degeneracy() {
        let h = HermitianOperator::from_real(array![
            [1.0, 0.0, 0.5],
            [0.0, 1.0, 0.0],
            [0.5, 0.0, 1.0]
        ])
        .unwrap();
        assert!(h.tridiagonal_parts().is_none());
        let e = eig_hermitian(&h).unwrap();
        assert!(matches!(e.vectors, Vectors::Real(_)));
        assert!((e.values[0] - 0.5).abs() < 1e-14);
        assert!(e.degenerate.is_empty());
        let d = HermitianOperator::from_real(array![[2.0, 0.0], [0.0, 2.0]]).unwrap();
        let ed = eig_hermitian(&d).unwrap();
        assert_eq!(ed.degenerate, vec![(0, 1)]);
        assert!(max_abs_offdiag_identity(&gram(&ed.vectors)) < 1e-14);
    }

    #[test]
    fn rotate_promotes_to_complex() {
        let mut v = Vectors::Real(array![[1.0, 0.0], [0.0, 1.0]]);
        v.rotate_column(0, c(-1.0, 0.0));
        assert!(matches!(v, Vectors::Real(_)));
        v.rotate_column(1, c(0.0, 1.0));
        assert!(matches!(v, Vectors::Complex(_)));
        assert_eq!(v.column(1)[1], c(0.0, 1.0));
        assert_eq!(v.column(0)[0], c(-1.0, 0.0));
    }
}
