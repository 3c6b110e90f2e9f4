use ndarray::Array1;

use crate::error::{Error, Result};
use crate::linalg::eig_hermitian;
use crate::models::Hamiltonian;

/// Where instantaneous energies come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergySource {
    /// Closed-form energies of the model.
    Analytic,
    /// Diagonalisation of the truncated matrix.
    Numeric,
}

/// `eps_n = (1/T) int_0^T E_n(t) dt` by the trapezoid rule on `n_quad` intervals, with `T`
/// the drive period or, failing that, the relabeling period.
pub fn time_averaged_energies<H: Hamiltonian + ?Sized>(
    model: &H,
    n_quad: usize,
    source: EnergySource,
) -> Result<Array1<f64>> {
    if n_quad < 8 {
        return Err(Error::config("n_quad", format!("must be >= 8, got {n_quad}")));
    }
    let period = model
        .period()
        .or_else(|| model.relabel_period())
        .ok_or_else(|| Error::Contract(format!("model {} is not periodic", model.kind())))?;
    let energies = |t: f64| -> Result<Array1<f64>> {
        match source {
            EnergySource::Analytic => model.analytic_adiabatic_energies(t).ok_or_else(|| {
                Error::Contract(format!("model {} has no closed-form energies", model.kind()))
            }),
            EnergySource::Numeric => Ok(eig_hermitian(&model.matrix(t))?.values),
        }
    };
    let h = period / n_quad as f64;
    let mut acc = (energies(0.0)? + energies(period)?) * 0.5;
    for k in 1..n_quad {
        acc += &energies(k as f64 * h)?;
    }
    Ok(acc / n_quad as f64)
}
