use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::adiabatic::frame::AdiabaticFrame;
use crate::error::{Error, Result};
use crate::models::Hamiltonian;

/// Gaps below this make the coupling ill-defined.
pub const MIN_GAP: f64 = 1e-8;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Non-adiabatic couplings between the columns of one frame.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    pub t: f64,
    /// Spectral rank of row/column 0.
    pub offset: usize,
    /// `<m|dH/dt|n> / (E_m - E_n)`, zero diagonal.
    ratio: Array2<C64>,
}

impl CouplingMatrix {
    /// `<m|dH/dt|n> / (E_m - E_n)` with a zero diagonal.
    pub fn ratio_form(&self) -> &Array2<C64> {
        &self.ratio
    }

    /// `Theta_mn = i <m|d_t n>`, which equals `-i` times the ratio form; Hermitian.
    pub fn theta(&self) -> Array2<C64> {
        self.ratio.mapv(|z| -I * z)
    }

    pub fn len(&self) -> usize {
        self.ratio.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.ratio.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.ratio.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// `max |Theta - Theta^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let th = self.theta();
        let mut worst = 0.0_f64;
        for ((i, j), z) in th.indexed_iter() {
            worst = worst.max((z - th[[j, i]].conj()).norm());
        }
        worst
    }
}

/// Couplings from the Hellmann-Feynman ratio `<m|dH/dt|n> / (E_m - E_n)` in the
/// frame's gauge; the model supplies `dH/dt` analytically.
pub fn numeric_theta<H: Hamiltonian + ?Sized>(model: &H, frame: &AdiabaticFrame) -> Result<CouplingMatrix> {
    if frame.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: frame.dim(),
        });
    }
    if let Some((k, gap)) = frame.min_gap() {
        if gap < MIN_GAP {
            return Err(Error::DegenerateCrossing {
                t: frame.t,
                gap,
                level: frame.offset + k,
                next: frame.offset + k + 1,
            });
        }
    }
    let a = frame.vectors.sandwich(&model.dh_dt(frame.t));
    let e = &frame.energies;
    let n = frame.len();
    let mut ratio = Array2::zeros((n, n));
    for m in 0..n {
        for k in 0..n {
            if m != k {
                ratio[[m, k]] = a[[m, k]] / (e[m] - e[k]);
            }
        }
    }
    Ok(CouplingMatrix {
        t: frame.t,
        offset: frame.offset,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adiabatic::frame::{frame_series, instantaneous_frame};
    use crate::models::{DrivenHo, DrivenHoSpec, SingleBand, SingleBandSpec};

    #[test]
    fn static_lattice_has_no_coupling() {
        let m = SingleBand::new(SingleBandSpec {
            hopping: 1.0,
            tilt: 0.5,
            n_sites: 21,
            disorder: None,
        })
        .unwrap();
        let f = instantaneous_frame(&m.matrix(0.0), 0.0, None).unwrap();
        assert_eq!(numeric_theta(&m, &f).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn oscillator_matches_closed_form_in_continuity_gauge() {
        let m = DrivenHo::new(DrivenHoSpec {
            omega: 1.0,
            drive_frequency: 1.2,
            drive_amplitude: 0.5,
            n_fock: 80,
            disorder: None,
        })
        .unwrap();
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.05).collect();
        let frames = frame_series(&m, &times, None).unwrap();
        for f in frames.iter().step_by(10) {
            let c = numeric_theta(&m, f).unwrap();
            assert!(c.hermiticity_defect() < 1e-12);
            for a in 0..30 {
                for b in 0..30 {
                    if a == b {
                        continue;
                    }
                    let want = m.theta(a, b, f.t).unwrap();
                    let got = c.ratio_form()[[a, b]];
                    assert!((got.re - want).abs() < 1e-9 && got.im.abs() < 1e-12, "{a} {b} {got} {want}");
                }
            }
        }
    }
}
