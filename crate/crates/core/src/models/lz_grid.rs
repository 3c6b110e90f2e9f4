use std::f64::consts::PI;
use std::ops::Range;

use ndarray::{Array1, Array2, ArrayView1, ArrayViewMut1};
use ndarray_linalg::{EighInto, UPLO};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};
use crate::linalg::{Basis, HermitianOperator, SparseMatrix};
use crate::models::{finite, positive, Hamiltonian};

/// Two counter-swept ladders `m omega +- lambda t`, `m = -L..=L`, coupled with
/// amplitude `J` between every pair of levels on opposite branches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LzGridSpec {
    pub omega: f64,
    pub lambda: f64,
    #[serde(rename = "J")]
    pub coupling: f64,
    pub n_levels: usize,
}

impl LzGridSpec {
    pub fn validate(&self) -> Result<()> {
        positive("model.omega", self.omega)?;
        positive("model.lambda", self.lambda)?;
        finite("model.J", self.coupling)?;
        if self.n_levels == 0 || self.n_levels.is_multiple_of(2) {
            return Err(Error::config(
                "model.n_levels",
                format!("must be odd and >= 1, got {}", self.n_levels),
            ));
        }
        Ok(())
    }

    pub fn half_width(&self) -> i64 {
        (self.n_levels as i64 - 1) / 2
    }

    /// `tau = omega / lambda`.
    pub fn sweep_period(&self) -> f64 {
        self.omega / self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LzGrid {
    spec: LzGridSpec,
}

impl LzGrid {
    pub fn new(spec: LzGridSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec })
    }

    pub fn spec(&self) -> &LzGridSpec {
        &self.spec
    }

    /// Basis index of `|m, branch>`: `+` block first, each block in descending `m`.
    pub fn index(&self, m: i64, branch: Branch) -> Result<usize> {
        let l = self.spec.half_width();
        if m.abs() > l {
            return Err(Error::Contract(format!("level {m} outside -{l}..={l}")));
        }
        let i = (l - m) as usize;
        Ok(match branch {
            Branch::Plus => i,
            Branch::Minus => self.spec.n_levels + i,
        })
    }

    pub fn label(&self, index: usize) -> (i64, Branch) {
        let n = self.spec.n_levels;
        let l = self.spec.half_width();
        if index < n {
            (l - index as i64, Branch::Plus)
        } else {
            (l - (index - n) as i64, Branch::Minus)
        }
    }

    pub fn diabatic_energy(&self, m: i64, branch: Branch, t: f64) -> f64 {
        m as f64 * self.spec.omega + branch.sign() * self.spec.lambda * t
    }

    pub fn build(&self, t: f64) -> HermitianOperator {
        let n = self.spec.n_levels;
        let d = self.diagonal(t);
        let mut h = Array2::<f64>::zeros((2 * n, 2 * n));
        for i in 0..2 * n {
            h[[i, i]] = d[i];
        }
        for i in 0..n {
            for j in 0..n {
                h[[i, n + j]] = self.spec.coupling;
                h[[n + j, i]] = self.spec.coupling;
            }
        }
        HermitianOperator::from_real(h).expect("symmetric by construction")
    }

    /// `exp(-pi J^2 / lambda)`, the probability of staying diabatic through one isolated crossing.
    pub fn transition_probability(&self) -> f64 {
        (-PI * self.spec.coupling.powi(2) / self.spec.lambda).exp()
    }

    /// Closed-form adiabatic energy of the infinite grid,
    /// `m omega +- (omega / 2 pi) arccos(r cos(2 pi lambda t / omega))`
    /// with `r = (omega^2 - pi^2 J^2) / (omega^2 + pi^2 J^2)`.
    pub fn adiabatic_energy(&self, m: i64, branch: Branch, t: f64) -> f64 {
        let w = self.spec.omega;
        let pj2 = (PI * self.spec.coupling).powi(2);
        let r = (w * w - pj2) / (w * w + pj2);
        let arg = (r * (2.0 * PI * self.spec.lambda * t / w).cos()).clamp(-1.0, 1.0);
        branch.sign() * w / (2.0 * PI) * arg.acos() + m as f64 * w
    }

    /// Adiabatic energies of the infinite grid restricted to the window, from the exact
    /// elimination of all levels with `|m| > L`. `ranks` selects ascending-rank positions
    /// of the truncated spectrum used as starting points; they should stay away from the
    /// window edges.
    pub fn folded_energies(&self, t: f64, ranks: Range<usize>) -> Result<Vec<f64>> {
        let dim = 2 * self.spec.n_levels;
        if ranks.start >= ranks.end || ranks.end > dim {
            return Err(Error::Contract(format!("rank range {ranks:?} invalid for {dim} levels")));
        }
        let start = eigvalsh(self.build(t).real_part())?;
        ranks
            .map(|k| {
                let mut e = start[k];
                for _ in 0..100 {
                    let vals = eigvalsh(self.folded_matrix(e, t))?;
                    let next = vals
                        .iter()
                        .copied()
                        .min_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs()))
                        .expect("non-empty spectrum");
                    let done = (next - e).abs() <= 1e-14 * e.abs().max(1.0);
                    e = next;
                    if done {
                        return Ok(e);
                    }
                }
                Err(Error::NumericalConsistency(format!(
                    "folded eigenvalue iteration did not converge at rank {k}"
                )))
            })
            .collect()
    }

    /// `sum_{|m| > L} 1 / (x - m omega)`.
    fn tail_sum(&self, x: f64) -> f64 {
        let w = self.spec.omega;
        let l1 = (self.spec.half_width() + 1) as f64;
        (digamma(l1 - x / w) - digamma(l1 + x / w)) / w
    }

    /// Energy-dependent window Hamiltonian with the out-of-window levels eliminated.
    fn folded_matrix(&self, e: f64, t: f64) -> Array2<f64> {
        let n = self.spec.n_levels;
        let j = self.spec.coupling;
        let lt = self.spec.lambda * t;
        let tp = self.tail_sum(e - lt);
        let tm = self.tail_sum(e + lt);
        let kappa = 1.0 - j * j * tp * tm;
        let d = self.diagonal(t);
        let mut h = Array2::<f64>::zeros((2 * n, 2 * n));
        for a in 0..n {
            for b in 0..n {
                h[[a, b]] = j * j * tm / kappa;
                h[[n + a, n + b]] = j * j * tp / kappa;
                h[[a, n + b]] = j / kappa;
                h[[n + b, a]] = j / kappa;
            }
        }
        for i in 0..2 * n {
            h[[i, i]] += d[i];
        }
        h
    }
}

fn eigvalsh(m: Array2<f64>) -> Result<Vec<f64>> {
    let (w, _) = m
        .eigh_into(UPLO::Lower)
        .map_err(|e| Error::Eigensolver(e.to_string()))?;
    Ok(w.to_vec())
}

impl Hamiltonian for LzGrid {
    fn dim(&self) -> usize {
        2 * self.spec.n_levels
    }
    fn basis(&self) -> Basis {
        Basis::DiabaticLz
    }
    fn apply(&self, t: f64, x: ArrayView1<C64>, mut y: ArrayViewMut1<C64>) {
        let n = self.spec.n_levels;
        let j = self.spec.coupling;
        let sum_p: C64 = x.iter().take(n).sum();
        let sum_m: C64 = x.iter().skip(n).sum();
        let w = self.spec.omega;
        let l = self.spec.half_width();
        let lt = self.spec.lambda * t;
        for i in 0..n {
            let m = (l - i as i64) as f64 * w;
            y[i] = x[i] * (m + lt) + sum_m * j;
            y[n + i] = x[n + i] * (m - lt) + sum_p * j;
        }
    }
    fn matrix(&self, t: f64) -> HermitianOperator {
        self.build(t)
    }
    fn dh_dt(&self, _t: f64) -> SparseMatrix {
        let n = self.spec.n_levels;
        let mut s = SparseMatrix::new(2 * n);
        for i in 0..n {
            s.push(i, i, C64::new(self.spec.lambda, 0.0));
            s.push(n + i, n + i, C64::new(-self.spec.lambda, 0.0));
        }
        s
    }
    fn diagonal(&self, t: f64) -> Array1<f64> {
        (0..2 * self.spec.n_levels)
            .map(|i| {
                let (m, b) = self.label(i);
                self.diabatic_energy(m, b, t)
            })
            .collect()
    }
    fn diagonal_integral(&self, t0: f64, t1: f64) -> Array1<f64> {
        let half_sq = 0.5 * (t1 * t1 - t0 * t0);
        (0..2 * self.spec.n_levels)
            .map(|i| {
                let (m, b) = self.label(i);
                m as f64 * self.spec.omega * (t1 - t0) + b.sign() * self.spec.lambda * half_sq
            })
            .collect()
    }
    fn spectral_bounds(&self, t: f64) -> (f64, f64) {
        let d = self.diagonal(t);
        let r = self.spec.coupling.abs() * self.spec.n_levels as f64;
        let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo - r, hi + r)
    }
    fn shortest_period(&self) -> f64 {
        self.spec.sweep_period()
    }
    fn relabel_period(&self) -> Option<f64> {
        Some(self.spec.sweep_period())
    }
    /// `+` amplitudes move `k` places towards the top of their block, `-` amplitudes `k`
    /// places towards the bottom; this is the relabeling under which `H(t + tau)` equals `H(t)`.
    fn relabel(&self, psi: ArrayView1<C64>, k: i64) -> Array1<C64> {
        let n = self.spec.n_levels as i64;
        let mut out = Array1::zeros(psi.len());
        for i in 0..n {
            let p = i - k;
            if (0..n).contains(&p) {
                out[p as usize] = psi[i as usize];
            }
            let q = i + k;
            if (0..n).contains(&q) {
                out[(n + q) as usize] = psi[(n + i) as usize];
            }
        }
        out
    }
    fn analytic_adiabatic_energies(&self, t: f64) -> Option<Array1<f64>> {
        let l = self.spec.half_width();
        let mut v: Vec<f64> = (-l..=l)
            .flat_map(|m| {
                [
                    self.adiabatic_energy(m, Branch::Plus, t),
                    self.adiabatic_energy(m, Branch::Minus, t),
                ]
            })
            .collect();
        v.sort_by(f64::total_cmp);
        Some(Array1::from(v))
    }
    fn level_spacing(&self) -> f64 {
        self.spec.omega / 2.0
    }
    fn kind(&self) -> &'static str {
        "lz_grid"
    }
}
