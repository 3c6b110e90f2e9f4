use std::ops::Range;

use ndarray::Array1;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian_range, HermitianOperator, StateVector, Vectors};
use crate::models::Hamiltonian;

/// Smallest `|<prev_k|v_k>|` accepted when tracking columns between frames.
pub const CONTINUITY_OVERLAP: f64 = 0.9;

/// Phase bookkeeping of a continuity-gauged frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Gauge {
    /// Time of the frame this one was aligned to; `None` for the canonical phase.
    pub reference_t: Option<f64>,
    /// Unit phase applied to each column on top of the canonical phase.
    pub phases: Vec<C64>,
}

/// Instantaneous eigenpairs of `H(t)` with ascending energies.
#[derive(Debug, Clone)]
pub struct AdiabaticFrame {
    pub t: f64,
    pub energies: Array1<f64>,
    pub vectors: Vectors,
    /// Spectral rank of column 0.
    pub offset: usize,
    pub gauge: Gauge,
    pub degenerate: Vec<(usize, usize)>,
}

impl AdiabaticFrame {
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn ranks(&self) -> Range<usize> {
        self.offset..self.offset + self.len()
    }

    /// Smallest gap between consecutive energies, with its position.
    pub fn min_gap(&self) -> Option<(usize, f64)> {
        self.energies
            .windows(2)
            .into_iter()
            .enumerate()
            .map(|(k, w)| (k, w[1] - w[0]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Rotates every column so that `<prev_k|v_k>` is real and positive.
    pub fn align_to(&mut self, prev: &AdiabaticFrame) -> Result<()> {
        if prev.dim() != self.dim() || prev.ranks() != self.ranks() {
            return Err(Error::Contract(format!(
                "frame at t = {} does not match the ranks of the frame at t = {}",
                self.t, prev.t
            )));
        }
        let mut phases = Vec::with_capacity(self.len());
        for k in 0..self.len() {
            let o = self.vectors.column_overlap(&prev.vectors, k);
            let mag = o.norm();
            if mag <= CONTINUITY_OVERLAP {
                return Err(Error::FrameStepTooLarge {
                    t: self.t,
                    column: self.offset + k,
                    overlap: mag,
                });
            }
            let phase = o.conj() / mag;
            self.vectors.rotate_column(k, phase);
            phases.push(phase);
        }
        self.gauge = Gauge {
            reference_t: Some(prev.t),
            phases,
        };
        Ok(())
    }
}

/// Eigenpairs of `h` at time `t`; aligned to `prev` when given, else in canonical phase.
pub fn instantaneous_frame(
    h: &HermitianOperator,
    t: f64,
    prev: Option<&AdiabaticFrame>,
) -> Result<AdiabaticFrame> {
    let n = h.matrix().nrows();
    let ranks = prev.map(|p| p.ranks()).unwrap_or(0..n);
    instantaneous_frame_ranks(h, t, ranks, prev)
}

/// Like [`instantaneous_frame`] for the eigenpairs with spectral ranks in `ranks` only.
pub fn instantaneous_frame_ranks(
    h: &HermitianOperator,
    t: f64,
    ranks: Range<usize>,
    prev: Option<&AdiabaticFrame>,
) -> Result<AdiabaticFrame> {
    if let Some(p) = prev {
        if !(t > p.t) {
            return Err(Error::Contract(format!(
                "frame time {t} must follow the previous frame time {}",
                p.t
            )));
        }
    }
    let e = eig_hermitian_range(h, ranks)?;
    let mut frame = AdiabaticFrame {
        t,
        energies: e.values,
        vectors: e.vectors,
        offset: e.offset,
        gauge: Gauge::default(),
        degenerate: e.degenerate,
    };
    if let Some(p) = prev {
        frame.align_to(p)?;
    }
    Ok(frame)
}

/// Frames at increasing `times`: diagonalised in parallel, then aligned in one
/// sequential sweep so that each frame is continuous with its predecessor.
pub fn frame_series<H: Hamiltonian + ?Sized>(
    model: &H,
    times: &[f64],
    ranks: Option<Range<usize>>,
) -> Result<Vec<AdiabaticFrame>> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Contract("frame times must increase strictly".into()));
    }
    let ranks = ranks.unwrap_or(0..model.dim());
    let mut frames = times
        .par_iter()
        .map(|&t| instantaneous_frame_ranks(&model.matrix(t), t, ranks.clone(), None))
        .collect::<Result<Vec<_>>>()?;
    for k in 1..frames.len() {
        let (done, rest) = frames.split_at_mut(k);
        rest[0].align_to(&done[k - 1])?;
    }
    Ok(frames)
}

/// `P_n = |<v_n|psi>|^2` over the frame's columns.
pub fn adiabatic_populations(psi: &StateVector, frame: &AdiabaticFrame) -> Result<Array1<f64>> {
    if psi.dim() != frame.dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.dim(),
            found: psi.dim(),
        });
    }
    let p = frame.vectors.project(psi.view()).mapv(|z| z.norm_sqr());
    if frame.len() == frame.dim() {
        let total = p.sum();
        if (total - psi.norm_sqr()).abs() > 1e-9 {
            return Err(Error::NumericalConsistency(format!(
                "adiabatic populations sum to {total}, state norm^2 is {}",
                psi.norm_sqr()
            )));
        }
    }
    Ok(p)
}
