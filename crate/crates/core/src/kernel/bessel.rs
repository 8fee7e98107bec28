//! Exponentially scaled modified Bessel functions `e^{-x} I_n(x)` of integer
//! order, plus the two expansions the heat-kernel integral needs near `0`
//! and near `∞`.

/// `e^{-x} I_n(x)` for `n = 0..=n_max`, by Miller's backward recurrence
/// normalised with `I_0 + 2 Σ_{k≥1} I_k = e^x`.
pub fn scaled_bessel_i(n_max: usize, x: f64) -> Vec<f64> {
    assert!(x >= 0.0);
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = n_max + 30 + (10.0 * x.sqrt()).ceil() as usize;
    let mut next = 0.0; // I_{k+1}
    let mut cur = 1e-280; // I_k
    let mut sum = 0.0;
    let two_over_x = 2.0 / x;
    for k in (1..=start).rev() {
        let prev = next + k as f64 * two_over_x * cur; // I_{k-1}
        if k <= n_max {
            out[k] = cur;
        }
        sum += 2.0 * cur;
        next = cur;
        cur = prev;
        if cur > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            sum *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    out[0] = cur;
    sum += cur;
    for v in out.iter_mut() {
        *v /= sum;
    }
    out
}

/// Power-series coefficients of `I_n(2t) = Σ_m t^{2m+n} / (m! (m+n)!)` up to
/// degree `degree`.
pub fn bessel_i2t_series(n: usize, degree: usize) -> Vec<f64> {
    let mut c = vec![0.0; degree + 1];
    if n > degree {
        return c;
    }
    // leading term 1/n!
    let mut term = 1.0;
    for k in 1..=n {
        term /= k as f64;
    }
    let mut m = 0;
    while n + 2 * m <= degree {
        c[n + 2 * m] = term;
        m += 1;
        term /= (m * (m + n)) as f64;
        if term == 0.0 {
            break;
        }
    }
    c
}

/// Coefficients `c_k` of the large-argument expansion
/// `e^{-x} I_n(x) ≈ (2πx)^{-1/2} Σ_k c_k x^{-k}`, `k = 0..terms`.
pub fn scaled_bessel_asymptotic(n: usize, terms: usize) -> Vec<f64> {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut c = Vec::with_capacity(terms);
    let mut a = 1.0;
    c.push(1.0);
    for k in 1..terms {
        let odd = (2 * k - 1) as f64;
        a *= -(mu - odd * odd) / (k as f64 * 8.0);
        c.push(a);
    }
    c
}

/// Truncated product of two power series.
pub fn series_mul(a: &[f64], b: &[f64], degree: usize) -> Vec<f64> {
    let mut out = vec![0.0; degree + 1];
    for (i, &ai) in a.iter().enumerate().take(degree + 1) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(degree + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `e^{-x} I_n(x) = (1/π) ∫_0^π e^{x(cos θ - 1)} cos(nθ) dθ` by a fine
    /// trapezoid rule (spectrally accurate for the periodic integrand).
    fn integral_oracle(n: usize, x: f64) -> f64 {
        let m = 20000;
        let h = PI / m as f64;
        let mut s = 0.0;
        for k in 0..=m {
            let th = k as f64 * h;
            let w = if k == 0 || k == m { 0.5 } else { 1.0 };
            s += w * (x * (th.cos() - 1.0)).exp() * (n as f64 * th).cos();
        }
        s * h / PI
    }

    // the oracle loses absolute accuracy ~1e-15 to cancellation for odd n at small x
    #[test]
    fn miller_matches_integral_representation() {
        for &x in &[0.01, 0.5, 1.0, 7.3, 40.0, 500.0] {
            let v = scaled_bessel_i(12, x);
            for n in [0usize, 1, 2, 5, 12] {
                let o = integral_oracle(n, x);
                assert!(
                    (v[n] - o).abs() <= 1e-13 * o.abs() + 1e-14,
                    "n={n} x={x}: {} vs {o}",
                    v[n]
                );
            }
        }
    }

    #[test]
    fn known_values() {
        // I_0(1) = 1.2660658777520082, I_1(1) = 0.5651591039924851
        let v = scaled_bessel_i(1, 1.0);
        assert!((v[0] * 1f64.exp() - 1.2660658777520082).abs() < 1e-15);
        assert!((v[1] * 1f64.exp() - 0.5651591039924851).abs() < 1e-15);
        assert_eq!(scaled_bessel_i(3, 0.0), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn series_agrees_with_miller_for_small_argument() {
        let t: f64 = 0.4;
        for n in 0..6 {
            let c = bessel_i2t_series(n, 60);
            let s: f64 = c.iter().enumerate().map(|(k, ck)| ck * t.powi(k as i32)).sum();
            let m = scaled_bessel_i(6, 2.0 * t)[n] * (2.0 * t).exp();
            assert!((s - m).abs() <= 1e-15 * m.max(1e-300), "n={n}");
        }
    }

    #[test]
    fn asymptotic_expansion_is_accurate_for_large_argument() {
        let x = 4000.0;
        let v = scaled_bessel_i(10, x);
        for n in [0, 3, 10] {
            let c = scaled_bessel_asymptotic(n, 10);
            let s: f64 = c.iter().enumerate().map(|(k, ck)| ck / x.powi(k as i32)).sum();
            let a = s / (2.0 * PI * x).sqrt();
            assert!((a - v[n]).abs() <= 1e-14 * v[n], "n={n}: {a} vs {}", v[n]);
        }
    }
}
