//! Direct quadrature of torus integrals `∫_{T³} g(k) μ(k)^γ dk` with the
//! point singularity (or cusp) of `μ^γ` at `k = 0` resolved by grading.
//!
//! `μ` is even in every coordinate, so the torus average equals the average
//! over `[0, π]³`, where the only non-smooth point is the corner `0`. The cube
//! is split into three pyramids by the largest coordinate `r`, mapped with
//! `k = (r, r v, r w)` (Jacobian `r²`), and `r = π ρ^q` turns
//! `r^{2+2γ} dr` into a polynomially vanishing weight in `ρ`. What is left,
//! `(μ/r²)^γ`, is analytic on the closed pyramid.

use std::f64::consts::PI;

use super::quadrature::{composite_gauss_legendre, gauss_legendre};

/// Grading exponent of the radial map `r = π ρ^q`.
const GRADING: i32 = 6;
const RADIAL_ORDER: usize = 16;

/// Precomputed nodes for a fixed power `γ` of the symbol.
#[derive(Debug, Clone)]
pub struct GradedTorusRule {
    /// Per node: combined weight (already divided by π³) and the point `k`.
    nodes: Vec<(f64, [f64; 3])>,
}

impl GradedTorusRule {
    /// `resolution` Gauss points per angular direction and `resolution / 4`
    /// radial panels of 16 points.
    pub fn new(gamma: f64, resolution: usize) -> Self {
        let resolution = resolution.max(4);
        let radial = composite_gauss_legendre(0.0, 1.0, (resolution / 4).max(1), RADIAL_ORDER);
        let (x, w) = gauss_legendre(resolution);
        let ang: Vec<(f64, f64)> = x.iter().zip(&w).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
        let q = GRADING as f64;
        // r^{2+2γ} dr = π^{3+2γ} q ρ^{q(3+2γ)-1} dρ
        let radial_exp = q * (3.0 + 2.0 * gamma) - 1.0;
        let prefactor = PI.powf(3.0 + 2.0 * gamma) * q / PI.powi(3);
        let mut nodes = Vec::with_capacity(3 * radial.len() * ang.len() * ang.len());
        for &(rho, wr) in &radial {
            let r = PI * rho.powi(GRADING);
            let radial_weight = prefactor * wr * rho.powf(radial_exp);
            if radial_weight == 0.0 {
                continue;
            }
            for &(v, wv) in &ang {
                for &(u, wu) in &ang {
                    let (a, b) = (r * v, r * u);
                    let ratio = normalised_symbol(r, a, b);
                    let weight = radial_weight * wv * wu * ratio.powf(gamma);
                    nodes.push((weight, [r, a, b]));
                    nodes.push((weight, [a, r, b]));
                    nodes.push((weight, [a, b, r]));
                }
            }
        }
        GradedTorusRule { nodes }
    }

    /// `(2π)^{-3} ∫_{T³} μ^γ g(k) dk` for `g` even in each coordinate.
    pub fn integrate(&self, g: impl Fn([f64; 3]) -> f64) -> f64 {
        self.nodes.iter().map(|(w, k)| w * g(*k)).sum()
    }

    /// The cosine transform `(2π)^{-3} ∫ cos(z·k) μ^γ dk`.
    pub fn cosine_transform(&self, z: [i64; 3]) -> f64 {
        let z = z.map(|c| c as f64);
        self.integrate(|k| (z[0] * k[0]).cos() * (z[1] * k[1]).cos() * (z[2] * k[2]).cos())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `μ(r, a, b) / r²` evaluated without cancellation.
fn normalised_symbol(r: f64, a: f64, b: f64) -> f64 {
    let s = |x: f64| {
        let h = (0.5 * x).sin();
        h * h
    };
    4.0 * (s(r) + s(a) + s(b)) / (r * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_symbol_powers_exactly() {
        // mean of μ is 6; μ² = 36 − 24Σcos + 4(Σcos)² has mean 36 + 4·3/2 = 42
        let one = GradedTorusRule::new(1.0, 24);
        assert!((one.integrate(|_| 1.0) - 6.0).abs() < 1e-12);
        let two = GradedTorusRule::new(2.0, 24);
        assert!((two.integrate(|_| 1.0) - 42.0).abs() < 1e-11);
        let zero = GradedTorusRule::new(0.0, 8);
        assert!((zero.integrate(|_| 1.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn singular_power_converges() {
        let a = GradedTorusRule::new(-1.25, 32).cosine_transform([1, 0, 2]);
        let b = GradedTorusRule::new(-1.25, 48).cosine_transform([1, 0, 2]);
        assert!((a - b).abs() < 1e-10 * b.abs(), "{a} vs {b}");
    }
}
