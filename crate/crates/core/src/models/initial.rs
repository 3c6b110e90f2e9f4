use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian_range, Basis, StateVector};
use crate::models::displacement::{edge_mass, EDGE_LEVELS};
use crate::models::{Hamiltonian, Model};

/// Largest population tolerated near a truncation edge.
pub const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateSpec {
    SiteDelta {
        site: i64,
    },
    /// `c_n ~ exp(-(n - center)^2 / (4 sigma^2))`, so `|c_n|^2` has standard deviation `sigma`.
    GaussianSites {
        center: f64,
        sigma: f64,
    },
    Fock {
        n: usize,
    },
    Coherent {
        alpha_re: f64,
        #[serde(default)]
        alpha_im: f64,
    },
    /// Instantaneous eigenstate of rank `index` at `t0`; `index: null` picks the middle rank
    /// `dim / 2` and `t0: null` the plan start.
    AdiabaticIndex {
        #[serde(default)]
        index: Option<usize>,
        #[serde(default)]
        t0: Option<f64>,
    },
}

fn wrong_model(kind: &str, model: &Model) -> Error {
    Error::config(
        "initial.kind",
        format!("{kind} is not available for model {}", model.kind()),
    )
}

/// Builds the normalised initial state; `t_start` is the plan start time.
pub fn initial_state(spec: &InitialStateSpec, model: &Model, t_start: f64) -> Result<StateVector> {
    match spec {
        InitialStateSpec::SiteDelta { site } => {
            let Model::SingleBand(m) = model else {
                return Err(wrong_model("site_delta", model));
            };
            let i = m
                .index_of_site(*site)
                .map_err(|e| Error::config("initial.site", e.to_string()))?;
            StateVector::basis_state(m.dim(), i, Basis::Site)
        }
        InitialStateSpec::GaussianSites { center, sigma } => {
            let Model::SingleBand(m) = model else {
                return Err(wrong_model("gaussian_sites", model));
            };
            if !(*sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::config("initial.sigma", "must be finite and > 0"));
            }
            let amps: Array1<C64> = (0..m.dim())
                .map(|i| {
                    let x = m.site_of_index(i) as f64 - center;
                    C64::new((-x * x / (4.0 * sigma * sigma)).exp(), 0.0)
                })
                .collect();
            let s = StateVector::normalized(amps, Basis::Site)?;
            let edge = (m.dim() / 10).max(1);
            let p = s.populations();
            let tail: f64 = p.iter().take(edge).sum::<f64>() + p.iter().rev().take(edge).sum::<f64>();
            if tail > TAIL_TOLERANCE {
                return Err(Error::Truncation {
                    tail_mass: tail,
                    dim: m.dim(),
                });
            }
            Ok(s)
        }
        InitialStateSpec::Fock { n } => {
            let Model::DrivenHo(m) = model else {
                return Err(wrong_model("fock", model));
            };
            let dim = m.dim();
            if *n + EDGE_LEVELS.min(dim / 4).max(1) >= dim {
                return Err(Error::Truncation { tail_mass: 1.0, dim });
            }
            StateVector::basis_state(dim, *n, Basis::Fock)
        }
        InitialStateSpec::Coherent { alpha_re, alpha_im } => {
            let Model::DrivenHo(m) = model else {
                return Err(wrong_model("coherent", model));
            };
            let alpha = C64::new(*alpha_re, *alpha_im);
            let v = m.displacement()?.displaced_fock(alpha, 0)?;
            let tail = edge_mass(v.view());
            if tail > TAIL_TOLERANCE {
                return Err(Error::Truncation {
                    tail_mass: tail,
                    dim: m.dim(),
                });
            }
            StateVector::normalized(v, Basis::Fock)
        }
        InitialStateSpec::AdiabaticIndex { index, t0 } => {
            let dim = model.dim();
            let q = index.unwrap_or(dim / 2);
            if q >= dim {
                return Err(Error::config(
                    "initial.index",
                    format!("rank {q} outside dimension {dim}"),
                ));
            }
            let t = t0.unwrap_or(t_start);
            let e = eig_hermitian_range(&model.matrix(t), q..q + 1)?;
            StateVector::new(e.vectors.column(0), model.basis())
        }
    }
}
