//! Integer-order Bessel functions of the first kind.

/// `J_k(x)` for `k = 0..=kmax`, by Miller's backward recurrence normalised
/// with `J_0 + 2 sum_{j >= 1} J_{2j} = 1`.
pub fn bessel_j_table(kmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = kmax.max(ax.ceil() as usize);
    let mut start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut jp1 = 0.0_f64;
    let mut j = 1e-300_f64;
    let mut norm = 0.0_f64;
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / ax * j - jp1;
        jp1 = j;
        j = jm1;
        let km1 = k - 1;
        if km1 <= kmax {
            out[km1] = j;
        }
        if km1 > 0 && km1 % 2 == 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += j;
    for (k, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < 0.0 && k % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `J_k(x)` for any integer order, using `J_{-k} = (-1)^k J_k`.
pub fn bessel_j(order: i64, x: f64) -> f64 {
    let k = order.unsigned_abs() as usize;
    let v = bessel_j_table(k, x)[k];
    if order < 0 && k % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Power series `sum_j (-1)^j (x/2)^{2j+k} / (j! (j+k)!)`; accurate for moderate `|x|`.
pub fn bessel_j_series(order: i64, x: f64) -> f64 {
    let k = order.unsigned_abs();
    let half = x / 2.0;
    let mut term = 1.0_f64;
    for i in 1..=k {
        term *= half / i as f64;
    }
    let mut sum = term;
    let h2 = half * half;
    for j in 1..500u64 {
        term *= -h2 / (j as f64 * (j + k) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    if order < 0 && k % 2 == 1 {
        -sum
    } else {
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Abramowitz & Stegun table 9.1.
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(2, 5.0) - 0.046_565_116_277_752_22).abs() < 1e-15);
        assert!((bessel_j(0, 20.0) - 0.167_024_664_340_583_1).abs() < 1e-14);
    }

    #[test]
    fn series_agrees_with_recurrence() {
        for &x in &[0.1, 1.0, 2.5, 8.0] {
            for k in -12..=12 {
                let a = bessel_j(k, x);
                let b = bessel_j_series(k, x);
                assert!((a - b).abs() < 1e-13, "k={k} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn symmetries() {
        assert!((bessel_j(3, -2.0) + bessel_j(3, 2.0)).abs() < 1e-16);
        assert!((bessel_j(-3, 2.0) + bessel_j(3, 2.0)).abs() < 1e-16);
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(4, 0.0), 0.0);
    }
}
