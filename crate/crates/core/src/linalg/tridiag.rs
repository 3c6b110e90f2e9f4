//! Real symmetric tridiagonal eigensolver backed by LAPACK `dstemr`.

use std::ops::Range;

use ndarray::{Array2, ShapeBuilder};

use crate::error::{Error, Result};

/// Eigenpairs of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e.len() == d.len() - 1`), ascending. With `range`
/// only the eigenpairs with those (0-based) ranks are computed.
pub fn eigh_tridiagonal(
    d: &[f64],
    e: &[f64],
    range: Option<Range<usize>>,
) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = d.len();
    if n == 0 || e.len() + 1 != n {
        return Err(Error::Contract(format!(
            "tridiagonal shape mismatch: diagonal {n}, off-diagonal {}",
            e.len()
        )));
    }
    let (range_char, il, iu, want) = match range {
        Some(r) => {
            if r.start >= r.end || r.end > n {
                return Err(Error::Contract(format!(
                    "eigenvalue rank range {r:?} invalid for dimension {n}"
                )));
            }
            (b'I', r.start as i32 + 1, r.end as i32, r.end - r.start)
        }
        None => (b'A', 1, n as i32, n),
    };
    let mut dd = d.to_vec();
    let mut ee = e.to_vec();
    ee.push(0.0);
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n * want.max(1)];
    let mut isuppz = vec![0i32; 2 * want.max(1)];
    let mut tryrac = 1i32;
    let lwork = (18 * n).max(1) as i32;
    let liwork = (10 * n).max(1) as i32;
    let mut work = vec![0.0; lwork as usize];
    let mut iwork = vec![0i32; liwork as usize];
    let mut m = 0i32;
    let mut info = 0i32;
    let jobz = b'V' as std::os::raw::c_char;
    let rc = range_char as std::os::raw::c_char;
    let nn = n as i32;
    let ldz = n as i32;
    let nzc = want as i32;
    let (vl, vu) = (0.0, 0.0);
    // SAFETY: every buffer is sized per the LAPACK documentation for JOBZ = 'V'.
    unsafe {
        lapack_sys::dstemr_(
            &jobz,
            &rc,
            &nn,
            dd.as_mut_ptr(),
            ee.as_mut_ptr(),
            &vl,
            &vu,
            &il,
            &iu,
            &mut m,
            w.as_mut_ptr(),
            z.as_mut_ptr(),
            &ldz,
            &nzc,
            isuppz.as_mut_ptr(),
            &mut tryrac,
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolver(format!("dstemr returned info = {info}")));
    }
    if m as usize != want {
        return Err(Error::Eigensolver(format!(
            "dstemr found {m} eigenvalues, expected {want}"
        )));
    }
    w.truncate(want);
    z.truncate(n * want);
    let vectors = Array2::from_shape_vec((n, want).f(), z)
        .map_err(|e| Error::Eigensolver(e.to_string()))?;
    Ok((w, vectors))
}
