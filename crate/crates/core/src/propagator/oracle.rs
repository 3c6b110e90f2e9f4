//! Closed-form evolution of a coherent state in the clean driven oscillator.

use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{Basis, StateVector};
use crate::models::displacement::edge_mass;
use crate::models::{DisorderSpec, DrivenHo};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `int_a^b exp(i x s) ds`.
fn exp_integral(x: f64, a: f64, b: f64) -> C64 {
    let h = b - a;
    if (x * h).abs() < 1e-4 {
        // series of (e^{ixh} - 1)/(ix) about x = 0
        let z = I * x * h;
        let s = C64::new(h, 0.0) * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0);
        return C64::from_polar(1.0, x * a) * s;
    }
    (C64::from_polar(1.0, x * b) - C64::from_polar(1.0, x * a)) / (I * x)
}

/// Coherent amplitude at `t` for a state that is `|alpha0>` at `t0`:
/// `alpha(t) = e^{-i omega (t - t0)} [alpha0 - i J/sqrt(2) int_{t0}^t e^{i omega (s - t0)} sin(Omega s) ds]`.
pub fn coherent_amplitude(model: &DrivenHo, alpha0: C64, t0: f64, t: f64) -> C64 {
    let s = model.spec();
    let (w, big) = (s.omega, s.drive_frequency);
    let integral = (exp_integral(w + big, t0, t) - exp_integral(w - big, t0, t)) / (2.0 * I)
        * C64::from_polar(1.0, -w * t0);
    C64::from_polar(1.0, -w * (t - t0)) * (alpha0 - I * s.drive_amplitude / SQRT_2 * integral)
}

/// `|alpha(t)>` in the truncated Fock basis, up to a global phase.
pub fn coherent_state(model: &DrivenHo, alpha0: C64, t0: f64, t: f64) -> Result<StateVector> {
    if !DisorderSpec::is_clean(&model.spec().disorder) {
        return Err(Error::Contract("coherent-state oracle requires a clean oscillator".into()));
    }
    let alpha = coherent_amplitude(model, alpha0, t0, t);
    let v = model.displacement()?.displaced_fock(alpha, 0)?;
    let tail = edge_mass(v.view());
    if tail > 1e-10 {
        return Err(Error::Truncation {
            tail_mass: tail,
            dim: model.spec().n_fock,
        });
    }
    StateVector::normalized(v, Basis::Fock)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::DrivenHoSpec;

    fn model(omega: f64, big: f64) -> DrivenHo {
        DrivenHo::new(DrivenHoSpec {
            omega,
            drive_frequency: big,
            drive_amplitude: 0.5,
            n_fock: 120,
            disorder: None,
        })
        .unwrap()
    }

    #[test]
    fn amplitude_solves_equation_of_motion() {
        // i d(alpha)/dt = omega alpha + J sin(Omega t)/sqrt(2)
        let m = model(1.0, 1.2);
        let a0 = C64::new(2.0, -0.5);
        let h = 1e-5;
        for &t in &[0.3, 2.0, 7.7] {
            let d = (coherent_amplitude(&m, a0, 0.1, t + h) - coherent_amplitude(&m, a0, 0.1, t - h)) / (2.0 * h);
            let rhs = coherent_amplitude(&m, a0, 0.1, t) * 1.0 + 0.5 * (1.2 * t).sin() / SQRT_2;
            assert!((I * d - rhs).norm() < 1e-8);
        }
        assert!((coherent_amplitude(&m, a0, 0.1, 0.1) - a0).norm() < 1e-15);
    }

    #[test]
    fn resonant_limit_is_continuous() {
        let a0 = C64::new(1.0, 0.0);
        let exact = coherent_amplitude(&model(1.0, 1.0), a0, 0.0, 5.0);
        let near = coherent_amplitude(&model(1.0, 1.0 + 1e-9), a0, 0.0, 5.0);
        assert!((exact - near).norm() < 1e-7);
    }
}
