//! Kernel values from the lattice heat kernel.
//!
//! With `μ^{-α/2} = Γ(α/2)^{-1} ∫_0^∞ t^{α/2-1} e^{-tμ} dt` and the
//! one-dimensional identity `(2π)^{-1} ∫ e^{izk} e^{2t cos k} dk = I_z(2t)`,
//!
//! ```text
//! R_α(z) = K_α / Γ(α/2) ∫_0^∞ t^{α/2-1} Π_j e^{-2t} I_{z_j}(2t) dt.
//! ```
//!
//! The integral is split at `t0` and `T`:
//! * `[0, t0]`: exact term-by-term integration of the power series;
//! * `[t0, T]`: composite Gauss–Legendre in `s = ln t`;
//! * `[T, ∞)`: term-by-term integration of the large-argument Bessel
//!   expansion, with `T` large enough that `z²/T` is tiny.

use std::f64::consts::PI;

use super::bessel::{bessel_i2t_series, scaled_bessel_asymptotic, scaled_bessel_i, series_mul};
use super::quadrature::composite_gauss_legendre;
use crate::error::{Error, Result};
use crate::lattice::Index3;

const SPLIT_LOW: f64 = 0.5;
const GAUSS_ORDER: usize = 16;
const ASYMPTOTIC_TERMS: usize = 10;
/// Relative error above which a value is reported as unconverged.
pub const HEAT_TOLERANCE: f64 = 1e-9;

/// Shared nodes for every displacement with `max |z_i| <= nu_max`.
#[derive(Debug, Clone)]
pub struct HeatKernelRule {
    alpha: f64,
    nu_max: usize,
    upper: f64,
    fine: Vec<Node>,
    coarse: Vec<Node>,
}

#[derive(Debug, Clone)]
struct Node {
    /// `w · t^{α/2}` (the `dt = t ds` Jacobian folded in).
    weight: f64,
    bessel: Vec<f64>,
}

impl HeatKernelRule {
    /// `panels` is the number of Gauss panels on `[ln t0, ln T]`; the error
    /// estimate compares against a rule with half as many.
    pub fn new(alpha: f64, nu_max: usize, panels: usize) -> Self {
        let nu2 = (nu_max * nu_max) as f64;
        let upper = (40.0 * nu2).max(2000.0);
        let build = |p: usize| -> Vec<Node> {
            composite_gauss_legendre(SPLIT_LOW.ln(), upper.ln(), p.max(1), GAUSS_ORDER)
                .into_iter()
                .map(|(s, w)| {
                    let t = s.exp();
                    Node {
                        weight: w * t.powf(0.5 * alpha),
                        bessel: scaled_bessel_i(nu_max, 2.0 * t),
                    }
                })
                .collect()
        };
        HeatKernelRule {
            alpha,
            nu_max,
            upper,
            fine: build(panels),
            coarse: build(panels / 2),
        }
    }

    pub fn nu_max(&self) -> usize {
        self.nu_max
    }

    /// `∫_0^∞ t^{α/2-1} Π_j e^{-2t} I_{z_j}(2t) dt` with an error estimate.
    pub fn integral(&self, z: Index3) -> Result<(f64, f64)> {
        let nu = z.0.map(|c| c.unsigned_abs() as usize);
        if nu.iter().any(|&n| n > self.nu_max) {
            return Err(Error::InvalidParameter(format!(
                "displacement {z} beyond heat rule range {}",
                self.nu_max
            )));
        }
        let head = self.head(nu);
        let tail = self.tail(nu);
        let body = |nodes: &[Node]| -> f64 {
            nodes
                .iter()
                .map(|n| n.weight * n.bessel[nu[0]] * n.bessel[nu[1]] * n.bessel[nu[2]])
                .sum()
        };
        let fine = head + body(&self.fine) + tail;
        let coarse = head + body(&self.coarse) + tail;
        Ok((fine, (fine - coarse).abs()))
    }

    fn head(&self, nu: [usize; 3]) -> f64 {
        let half = 0.5 * self.alpha;
        let degree = nu.iter().sum::<usize>() + 60;
        let mut prod = bessel_i2t_series(nu[0], degree);
        prod = series_mul(&prod, &bessel_i2t_series(nu[1], degree), degree);
        prod = series_mul(&prod, &bessel_i2t_series(nu[2], degree), degree);
        let mut damp = vec![0.0; degree + 1];
        let mut term = 1.0;
        for (k, d) in damp.iter_mut().enumerate() {
            *d = term;
            term *= -6.0 / (k as f64 + 1.0);
        }
        let h = series_mul(&prod, &damp, degree);
        h.iter()
            .enumerate()
            .map(|(k, c)| {
                let e = k as f64 + half;
                c * SPLIT_LOW.powf(e) / e
            })
            .sum()
    }

    fn tail(&self, nu: [usize; 3]) -> f64 {
        let mut prod = scaled_bessel_asymptotic(nu[0], ASYMPTOTIC_TERMS);
        for &n in &nu[1..] {
            prod = series_mul(&prod, &scaled_bessel_asymptotic(n, ASYMPTOTIC_TERMS), ASYMPTOTIC_TERMS - 1);
        }
        let half = 0.5 * self.alpha;
        // Π (2π·2t)^{-1/2} = (4πt)^{-3/2}; x^{-m} = (2t)^{-m}
        let mut acc = 0.0;
        for (m, c) in prod.iter().enumerate() {
            let e = m as f64 + 1.5 - half;
            acc += c * 0.5f64.powi(m as i32) * self.upper.powf(-e) / e;
        }
        acc * (4.0 * PI).powf(-1.5)
    }
}
