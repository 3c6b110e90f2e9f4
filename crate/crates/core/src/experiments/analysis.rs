use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fewest points accepted by [`fit_power_law`].
pub const MIN_FIT_POINTS: usize = 8;
/// A period candidate must reach this fraction of the tallest later autocorrelation peak.
const PEAK_FRACTION: f64 = 0.7;
const PEAK_REGION_END: f64 = 0.5;

/// `sum n P_n`.
pub fn center_of_mass(p: &[f64]) -> f64 {
    p.iter().enumerate().map(|(n, x)| n as f64 * x).sum()
}

/// `sqrt(sum n^2 P_n - (sum n P_n)^2)` in index units.
pub fn index_width(p: &[f64]) -> f64 {
    let mean = center_of_mass(p);
    let var: f64 = p.iter().enumerate().map(|(n, x)| (n as f64 - mean).powi(2) * x).sum();
    var.max(0.0).sqrt()
}

/// `1 / sum P_n^2`.
pub fn participation_ratio(p: &[f64]) -> f64 {
    let s: f64 = p.iter().map(|x| x * x).sum();
    if s > 0.0 {
        1.0 / s
    } else {
        0.0
    }
}

/// `(sum sqrt(P_n Q_n))^2`; equals 1 only for identical distributions.
pub fn population_fidelity(p: &[f64], q: &[f64]) -> f64 {
    let s: f64 = p.iter().zip(q).map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt()).sum();
    s * s
}

/// `sum |P_n - Q_n| / 2`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodEstimate {
    pub period: f64,
    pub uncertainty: f64,
    /// Normalised autocorrelation at the chosen lag.
    pub peak: f64,
}

fn uniform_step(t: &[f64]) -> Result<f64> {
    if t.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            found: t.len(),
        });
    }
    let h = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if !(h > 0.0) || t.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-6 * h) {
        return Err(Error::Contract("series must be uniformly sampled in increasing time".into()));
    }
    Ok(h)
}

/// Correlation coefficient of two equally long slices.
fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let m = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / m, b.iter().sum::<f64>() / m);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x - ma, y - mb);
        sab += x * y;
        saa += x * x;
        sbb += y * y;
    }
    if saa > 0.0 && sbb > 0.0 {
        sab / (saa * sbb).sqrt()
    } else {
        0.0
    }
}

/// Period from the first dominant non-zero-lag maximum of the autocorrelation.
///
/// Lags run up to two thirds of the record. The search starts after the first zero
/// crossing; the first lag reaching 70% of the tallest later peak opens a region that
/// ends when the autocorrelation drops below half that peak, and the region's maximum is
/// refined by a parabola through its neighbours.
pub fn estimate_period(t: &[f64], y: &[f64]) -> Result<PeriodEstimate> {
    if t.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: t.len(),
            found: y.len(),
        });
    }
    let h = uniform_step(t)?;
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let d: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let c0: f64 = d.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let scale = y.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    if !(c0.sqrt() > 1e-9 * scale) {
        return Err(Error::NoPeriod("series is flat".into()));
    }
    let max_lag = 2 * n / 3;
    let acf: Vec<f64> = (0..max_lag).map(|k| pearson(&d[..n - k], &d[k..])).collect();
    let start = acf
        .iter()
        .position(|&a| a <= 0.0)
        .ok_or_else(|| Error::NoPeriod("autocorrelation never crosses zero".into()))?;
    let gmax = acf[start..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(gmax > 0.1) {
        return Err(Error::NoPeriod(format!("largest autocorrelation peak is {gmax:.3}")));
    }
    let k1 = start + acf[start..].iter().position(|&a| a >= PEAK_FRACTION * gmax).expect("gmax attained");
    let mut k2 = k1;
    while k2 + 1 < acf.len() && acf[k2 + 1] >= PEAK_REGION_END * gmax {
        k2 += 1;
    }
    let k = (k1..=k2).max_by(|&a, &b| acf[a].total_cmp(&acf[b])).expect("non-empty region");
    let mut lag = k as f64;
    if k > 0 && k + 1 < acf.len() {
        let (a, b, c) = (acf[k - 1], acf[k], acf[k + 1]);
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            lag += (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
        }
    }
    Ok(PeriodEstimate {
        period: lag * h,
        uncertainty: h,
        peak: acf[k],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub window: [f64; 2],
    pub n_points: usize,
}

/// Least-squares slope of `log y` against `log t` for `t` in `window`.
pub fn fit_power_law(t: &[f64], y: &[f64], window: [f64; 2]) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(&s, _)| s >= window[0] && s <= window[1])
        .map(|(&s, &v)| (s, v))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints {
            needed: MIN_FIT_POINTS,
            found: pts.len(),
        });
    }
    if let Some(&(s, v)) = pts.iter().find(|(s, v)| !(*s > 0.0 && *v > 0.0)) {
        return Err(Error::Contract(format!("power-law fit needs t > 0 and y > 0, got ({s}, {v})")));
    }
    let m = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Contract("fit window holds a single time".into()));
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    Ok(PowerLawFit {
        exponent: slope,
        prefactor: icpt.exp(),
        residual: (rss / m).sqrt(),
        window,
        n_points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detuning {
    pub n: usize,
    pub detuning: f64,
    /// `2 pi / |detuning|`; infinite on resonance.
    pub period: f64,
    pub nearest: bool,
}

/// `Omega - n omega` for `n = 1..=n_max`, flagging the smallest magnitude.
pub fn detuning_table(drive: f64, omega: f64, n_max: usize) -> Result<Vec<Detuning>> {
    if n_max < 1 {
        return Err(Error::config("analysis.detuning", "n_max must be >= 1"));
    }
    let mut rows: Vec<Detuning> = (1..=n_max)
        .map(|n| {
            let d = drive - n as f64 * omega;
            Detuning {
                n,
                detuning: d,
                period: if d == 0.0 { f64::INFINITY } else { 2.0 * std::f64::consts::PI / d.abs() },
                nearest: false,
            }
        })
        .collect();
    let best = (0..rows.len())
        .min_by(|&a, &b| rows[a].detuning.abs().total_cmp(&rows[b].detuning.abs()))
        .expect("n_max >= 1");
    rows[best].nearest = true;
    Ok(rows)
}

/// Index of the smallest value of `y` with `t` in `window`.
pub fn argmin_in(t: &[f64], y: &[f64], window: [f64; 2]) -> Option<usize> {
    (0..t.len())
        .filter(|&i| t[i] >= window[0] && t[i] <= window[1])
        .min_by(|&a, &b| y[a].total_cmp(&y[b]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn width_examples() {
        assert_eq!(index_width(&[0.0, 1.0, 0.0]), 0.0);
        let mut p = vec![0.0; 9];
        p[0] = 0.5;
        p[8] = 0.5;
        assert!((index_width(&p) - 4.0).abs() < 1e-15);
        assert_eq!(participation_ratio(&[0.0, 1.0]), 1.0);
        assert!((participation_ratio(&[0.25; 4]) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn period_of_squared_sine() {
        let t0 = 3.7;
        let h = 0.01;
        let t: Vec<f64> = (0..2000).map(|k| k as f64 * h).collect();
        let y: Vec<f64> = t.iter().map(|s| (PI * s / t0).sin().powi(2)).collect();
        let e = estimate_period(&t, &y).unwrap();
        assert!((e.period - t0).abs() < h, "{e:?}");
    }

    #[test]
    fn period_ignores_fast_ripple() {
        let h = 0.05;
        let t: Vec<f64> = (0..3000).map(|k| k as f64 * h).collect();
        let y: Vec<f64> = t
            .iter()
            .map(|s| (2.0 * PI * s / 31.4).cos() + 0.2 * (2.0 * PI * s / (31.4 / 6.0)).cos())
            .collect();
        let e = estimate_period(&t, &y).unwrap();
        assert!((e.period - 31.4).abs() < h, "{e:?}");
    }

    #[test]
    fn flat_series_has_no_period() {
        let t: Vec<f64> = (0..100).map(|k| k as f64).collect();
        assert!(matches!(estimate_period(&t, &vec![2.0; 100]), Err(Error::NoPeriod(_))));
    }

    #[test]
    fn power_law_examples() {
        let t: Vec<f64> = (1..=50).map(|k| k as f64 * 0.3).collect();
        let lin: Vec<f64> = t.iter().map(|s| 3.0 * s).collect();
        assert!((fit_power_law(&t, &lin, [0.3, 15.0]).unwrap().exponent - 1.0).abs() < 1e-3);
        let root: Vec<f64> = t.iter().map(|s| 2.0 * s.sqrt()).collect();
        let f = fit_power_law(&t, &root, [1.0, 15.0]).unwrap();
        assert!((f.exponent - 0.5).abs() < 1e-3);
        assert!((f.prefactor - 2.0).abs() < 1e-9);
        assert!(matches!(fit_power_law(&t, &root, [1.0, 2.0]), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn detuning_examples() {
        let rows = detuning_table(1.2, 1.0, 3).unwrap();
        assert!((rows[0].detuning - 0.2).abs() < 1e-15 && rows[0].nearest);
        assert!((rows[0].period - 10.0 * PI).abs() < 1e-12);
        let res = detuning_table(1.0, 1.0, 2).unwrap();
        assert!(res[0].nearest && res[0].detuning == 0.0 && res[0].period.is_infinite());
        let b = detuning_table(5.2, 5.0, 4).unwrap();
        assert!(b[0].nearest && (b[0].detuning - 0.2).abs() < 1e-12);
        assert!(detuning_table(1.0, 1.0, 0).is_err());
    }
}
