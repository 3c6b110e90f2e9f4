//! Single-step propagators.

use ndarray::{Array1, Zip};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, LinearOperator};
use crate::models::{AtTime, Hamiltonian};

const I: C64 = C64 { re: 0.0, im: 1.0 };
/// Largest `|H - c| h` per Taylor sub-step.
const SUBSTEP_NORM: f64 = 2.0;
const MAX_TERMS: usize = 60;

fn norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Scratch buffers for [`taylor_step`].
#[derive(Debug, Clone)]
pub struct Workspace {
    term: Array1<C64>,
    next: Array1<C64>,
    acc: Array1<C64>,
}

impl Workspace {
    pub fn new(dim: usize) -> Self {
        Self {
            term: Array1::zeros(dim),
            next: Array1::zeros(dim),
            acc: Array1::zeros(dim),
        }
    }
}

/// `psi <- exp(-i H(t) dt) psi` by a Taylor series of `H - c`, with `c` the centre of the
/// Gershgorin interval, split into equal sub-steps so that each has `|H - c| h <= 2`.
pub fn taylor_step<H: Hamiltonian + ?Sized>(
    model: &H,
    t: f64,
    dt: f64,
    psi: &mut Array1<C64>,
    ws: &mut Workspace,
) -> Result<()> {
    taylor_apply(&AtTime { model, t }, model.spectral_bounds(t), dt, psi, ws)
}

/// `psi <- exp(-i A dt) psi` for a Hermitian operator `A` with spectrum inside `bounds`.
pub fn taylor_apply<A: LinearOperator + ?Sized>(
    op: &A,
    bounds: (f64, f64),
    dt: f64,
    psi: &mut Array1<C64>,
    ws: &mut Workspace,
) -> Result<()> {
    let (lo, hi) = bounds;
    let c = 0.5 * (lo + hi);
    let radius = 0.5 * (hi - lo);
    let n_sub = ((radius * dt.abs()) / SUBSTEP_NORM).ceil().max(1.0) as usize;
    let h = dt / n_sub as f64;
    let shift = C64::from_polar(1.0, -c * h);
    for _ in 0..n_sub {
        ws.term.assign(psi);
        ws.acc.assign(psi);
        let mut converged = false;
        for k in 1..=MAX_TERMS {
            op.apply_into(ws.term.view(), ws.next.view_mut());
            let f = -I * h / k as f64;
            Zip::from(&mut ws.next).and(&ws.term).for_each(|n, &x| *n = (*n - x * c) * f);
            std::mem::swap(&mut ws.term, &mut ws.next);
            ws.acc += &ws.term;
            if norm(&ws.term) <= 1e-16 * norm(&ws.acc) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NumericalConsistency(
                "Taylor series for the step exponential did not converge".into(),
            ));
        }
        Zip::from(&mut *psi).and(&ws.acc).for_each(|p, &a| *p = a * shift);
    }
    Ok(())
}

/// `psi <- exp(-i H(t) dt) psi` through a dense eigendecomposition of `H(t)`.
pub fn eigen_step<H: Hamiltonian + ?Sized>(model: &H, t: f64, dt: f64, psi: &mut Array1<C64>) -> Result<()> {
    let e = eig_hermitian(&model.matrix(t))?;
    let mut c = e.vectors.project(psi.view());
    for (k, z) in c.iter_mut().enumerate() {
        *z *= C64::from_polar(1.0, -e.values[k] * dt);
    }
    psi.assign(&e.vectors.expand(c.view()));
    Ok(())
}

/// One RK4 step of `i d/dt psi = H psi` in the interaction picture of `diag H`, anchored at `t`.
pub fn rk4_step<H: Hamiltonian + ?Sized>(model: &H, t: f64, dt: f64, psi: &mut Array1<C64>) -> Result<()> {
    let dim = model.dim();
    let half = t + 0.5 * dt;
    let end = t + dt;
    let phase_half = model.diagonal_integral(t, half);
    let phase_end = model.diagonal_integral(t, end);
    let zero = Array1::<f64>::zeros(dim);
    let mut y = Array1::zeros(dim);
    // k = -i e^{i Phi} (H - D) e^{-i Phi} phi
    let mut rhs = |s: f64, phase: &Array1<f64>, phi: &Array1<C64>, out: &mut Array1<C64>| {
        let lab: Array1<C64> = phi
            .iter()
            .zip(phase.iter())
            .map(|(z, p)| z * C64::from_polar(1.0, -p))
            .collect();
        model.apply(s, lab.view(), y.view_mut());
        let d = model.diagonal(s);
        for i in 0..dim {
            out[i] = -I * (y[i] - d[i] * lab[i]) * C64::from_polar(1.0, phase[i]);
        }
    };
    let phi0 = psi.clone();
    let mut k1 = Array1::zeros(dim);
    let mut k2 = Array1::zeros(dim);
    let mut k3 = Array1::zeros(dim);
    let mut k4 = Array1::zeros(dim);
    rhs(t, &zero, &phi0, &mut k1);
    let tmp = &phi0 + &(&k1 * C64::new(0.5 * dt, 0.0));
    rhs(half, &phase_half, &tmp, &mut k2);
    let tmp = &phi0 + &(&k2 * C64::new(0.5 * dt, 0.0));
    rhs(half, &phase_half, &tmp, &mut k3);
    let tmp = &phi0 + &(&k3 * C64::new(dt, 0.0));
    rhs(end, &phase_end, &tmp, &mut k4);
    let w = C64::new(dt / 6.0, 0.0);
    for i in 0..dim {
        let phi = phi0[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        psi[i] = phi * C64::from_polar(1.0, -phase_end[i]);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{LzGrid, LzGridSpec};

    fn grid() -> LzGrid {
        LzGrid::new(LzGridSpec {
            omega: 0.5,
            lambda: 1.0,
            coupling: 0.2,
            n_levels: 11,
        })
        .unwrap()
    }

    fn start(dim: usize) -> Array1<C64> {
        let v: Array1<C64> = (0..dim).map(|i| C64::new(1.0 + i as f64, 0.5 * i as f64)).collect();
        let n = norm(&v);
        v / C64::new(n, 0.0)
    }

    #[test]
    fn taylor_matches_eigen() {
        let g = grid();
        let mut a = start(22);
        let mut b = a.clone();
        let mut ws = Workspace::new(22);
        taylor_step(&g, 0.3, 1.7, &mut a, &mut ws).unwrap();
        eigen_step(&g, 0.3, 1.7, &mut b).unwrap();
        let d: f64 = (&a - &b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(d < 1e-12, "{d}");
        assert!((norm(&a) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rk4_is_fourth_order_close_to_exact_for_static_h() {
        use crate::models::{SingleBand, SingleBandSpec};
        let m = SingleBand::new(SingleBandSpec {
            hopping: 1.0,
            tilt: 0.3,
            n_sites: 15,
            disorder: None,
        })
        .unwrap();
        let mut a = start(15);
        let mut b = a.clone();
        for _ in 0..100 {
            rk4_step(&m, 0.0, 0.01, &mut a).unwrap();
        }
        eigen_step(&m, 0.0, 1.0, &mut b).unwrap();
        let d: f64 = (&a - &b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(d < 1e-9, "{d}");
    }
}
