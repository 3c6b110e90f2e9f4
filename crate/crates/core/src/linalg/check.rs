use ndarray::Array2;

use crate::error::{Error, Result};

const CHECK_DIM: usize = 192;

/// Compares a BLAS-backed matrix product with a direct sum on integer-valued matrices,
/// where both must agree exactly. Some OpenBLAS kernels miscompute on virtualised CPUs.
pub fn blas_self_check() -> Result<()> {
    let n = CHECK_DIM;
    let a = Array2::from_shape_fn((n, n), |(i, j)| ((i * 7 + j * 13) % 17) as f64 - 8.0);
    let b = Array2::from_shape_fn((n, n), |(i, j)| ((i * 3 + j * 5) % 11) as f64 - 5.0);
    let c = a.dot(&b);
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n).map(|k| a[[i, k]] * b[[k, j]]).sum();
            if c[[i, j]] != s {
                return Err(Error::NumericalConsistency(format!(
                    "BLAS matrix product is wrong at ({i}, {j}): {} vs {s}; \
                     try OPENBLAS_CORETYPE=Haswell",
                    c[[i, j]]
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    #[test]
    fn blas_is_sound() {
        super::blas_self_check().unwrap();
    }
}
