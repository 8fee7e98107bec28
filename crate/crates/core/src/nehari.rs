//! The Nehari manifold `𝒩 = {u ≠ 0 : ⟨J'(u), u⟩ = 0}` and the reduced
//! functional `Ψ(w) = J(s_w w)` on the unit sphere of H.
//!
//! For the power nonlinearity the fiber `s ↦ J(su)` is the polynomial
//!
//! ```text
//! J(su) = (s²/2)‖u‖² + (b s⁴/4) A² − (s^{2p}/2) B
//! ```
//!
//! whose unique positive critical point `s_u` solves
//! `‖u‖² + b A² s² − D s^{2p−2} = 0` with `D = p B`.

use crate::energy::EnergyModel;
use crate::error::{Error, Result};
use crate::lattice::{self, Field};

/// The scalars that determine `J` and `⟨J'(·),·⟩` along the ray through `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberCoefficients {
    /// `‖u‖²` in H.
    pub norm_h2: f64,
    /// `A = ∫|∇u|²`.
    pub gradient: f64,
    /// `D = ∫(R_α ∗ F(u)) f(u) u`.
    pub d: f64,
    /// `B = ∫(R_α ∗ F(u)) F(u)`.
    pub b_choquard: f64,
    /// Homogeneity `p` of `F`.
    pub exponent: f64,
}

impl FiberCoefficients {
    /// Coefficients of `s u`.
    pub fn scaled(&self, s: f64) -> Self {
        let s2 = s * s;
        let s2p = s.abs().powf(2.0 * self.exponent);
        FiberCoefficients {
            norm_h2: s2 * self.norm_h2,
            gradient: s2 * self.gradient,
            d: s2p * self.d,
            b_choquard: s2p * self.b_choquard,
            exponent: self.exponent,
        }
    }

    /// `J(su)`.
    pub fn energy_at(&self, s: f64, b: f64) -> f64 {
        let s2 = s * s;
        0.5 * s2 * self.norm_h2 + 0.25 * b * s2 * s2 * self.gradient * self.gradient
            - 0.5 * s.abs().powf(2.0 * self.exponent) * self.b_choquard
    }

    /// Sum of the magnitudes of the three terms of `J(su)`, the scale of its
    /// rounding error.
    pub fn energy_magnitude(&self, s: f64, b: f64) -> f64 {
        let s2 = s * s;
        0.5 * s2 * self.norm_h2.abs()
            + 0.25 * b * s2 * s2 * self.gradient * self.gradient
            + 0.5 * s.abs().powf(2.0 * self.exponent) * self.b_choquard.abs()
    }

    /// `φ(s) = ⟨J'(su), su⟩ / s = s‖u‖² + b s³ A² − s^{2p−1} D`.
    pub fn phi(&self, s: f64, b: f64) -> f64 {
        s * self.norm_h2 + b * s.powi(3) * self.gradient * self.gradient - s.powf(2.0 * self.exponent - 1.0) * self.d
    }
}

/// Scalars of the fiber through `u`, using one convolution.
pub fn fiber_coefficients(model: &EnergyModel, u: &Field) -> Result<FiberCoefficients> {
    let (coeffs, _) = fiber_coefficients_with_convolution(model, u)?;
    Ok(coeffs)
}

/// [`fiber_coefficients`] and the field `R_α ∗ F(u)`.
pub(crate) fn fiber_coefficients_with_convolution(model: &EnergyModel, u: &Field) -> Result<(FiberCoefficients, Field)> {
    if u.is_zero() {
        return Err(Error::Degenerate("fiber of the zero field".into()));
    }
    let spec = model.spec();
    let exponent = spec
        .nonlinearity
        .homogeneity()
        .ok_or_else(|| Error::InvalidParameter("fiber map needs a homogeneous nonlinearity".into()))?;
    let fu = model.primitive_field(u);
    let conv = model.convolve(&fu)?;
    let nl = spec.nonlinearity;
    let d = conv
        .values()
        .iter()
        .zip(u.values())
        .map(|(c, x)| c * nl.f(*x) * x)
        .sum();
    let coeffs = FiberCoefficients {
        norm_h2: model.h_inner(u, u)?,
        gradient: lattice::gradient_energy(u),
        d,
        b_choquard: conv.dot(&fu),
        exponent,
    };
    Ok((coeffs, conv))
}

/// The unique `s > 0` with `s u ∈ 𝒩`.
///
/// Works on `ψ(s) = φ(s)/s`, which is positive at `0` and has exactly one
/// sign change. A bracket with `ψ(lo) > 0 > ψ(hi)` is found first, then
/// Newton steps that leave the bracket are replaced by bisection.
/// The returned root satisfies `|φ(s)| <= tolerance · s‖u‖²`, or sits at the
/// roundoff floor of `ψ` when the Kirchhoff and Choquard terms dwarf `‖u‖²`.
pub fn nehari_scale(coeffs: &FiberCoefficients, b: f64, tolerance: f64) -> Result<f64> {
    let FiberCoefficients {
        norm_h2,
        gradient,
        d,
        exponent: p,
        ..
    } = *coeffs;
    if !(norm_h2 > 0.0 && norm_h2.is_finite()) {
        return Err(Error::InvalidParameter(format!("fiber needs ‖u‖² > 0, got {norm_h2}")));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!("fiber needs D > 0, got {d}")));
    }
    if p <= 2.0 {
        return Err(Error::InvalidParameter(format!("fiber needs p > 2, got {p}")));
    }
    let kirchhoff = b * gradient * gradient;
    let psi = |s: f64| norm_h2 + kirchhoff * s * s - d * s.powf(2.0 * p - 2.0);
    let dpsi = |s: f64| 2.0 * kirchhoff * s - (2.0 * p - 2.0) * d * s.powf(2.0 * p - 3.0);

    // start from the b = 0 root, which lower-bounds the true one
    let guess = (norm_h2 / d).powf(1.0 / (2.0 * p - 2.0));
    let (mut lo, mut hi) = (guess, guess);
    while psi(lo) <= 0.0 {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::Degenerate("no positive fiber bracket".into()));
        }
    }
    while psi(hi) >= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Degenerate("fiber root escapes to infinity".into()));
        }
    }
    debug_assert!(psi(lo) > 0.0 && psi(hi) < 0.0);

    let mut s = 0.5 * (lo + hi);
    for _ in 0..200 {
        let v = psi(s);
        if v == 0.0 {
            break;
        }
        if v > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let dv = dpsi(s);
        let newton = s - v / dv;
        let next = if dv < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - s).abs();
        s = next;
        if step <= 4.0 * f64::EPSILON * s || hi - lo <= 4.0 * f64::EPSILON * s {
            break;
        }
    }
    let defect = psi(s).abs() / norm_h2;
    let roundoff = 16.0 * f64::EPSILON * (norm_h2 + kirchhoff * s * s + d * s.powf(2.0 * p - 2.0)) / norm_h2;
    if defect > tolerance.max(roundoff) {
        return Err(Error::Degenerate(format!(
            "fiber root residual {defect:e} above tolerance {tolerance:e}"
        )));
    }
    Ok(s)
}

/// `m̂(u) = s_u u`, returned with `s_u`.
pub fn project_to_nehari(model: &EnergyModel, u: &Field, tolerance: f64) -> Result<(Field, f64)> {
    let coeffs = fiber_coefficients(model, u)?;
    let s = nehari_scale(&coeffs, model.spec().b, tolerance)?;
    Ok((u.scaled(s), s))
}

/// `m^{-1}(u) = u / ‖u‖`, the H-normalisation.
pub fn sphere_inverse(model: &EnergyModel, u: &Field) -> Result<Field> {
    let norm = model.h_norm(u)?;
    if norm == 0.0 || u.is_zero() {
        return Err(Error::Degenerate("cannot normalise the zero field".into()));
    }
    Ok(u.scaled(1.0 / norm))
}

/// `|⟨J'(u), u⟩| / ‖u‖²`.
pub fn nehari_defect(model: &EnergyModel, u: &Field) -> Result<f64> {
    Ok(model.nehari_functional(u)?.abs() / model.h_inner(u, u)?)
}

/// Solves `(−aΔ + V) r = g` by conjugate gradients with the diagonal
/// preconditioner `6a + V`, so that `(r, φ)_H = Σ g φ` for every `φ`.
pub fn h_representer(model: &EnergyModel, g: &Field, rel_tolerance: f64) -> Result<Field> {
    solve_elliptic(model, model.spec().a, g, rel_tolerance)
}

/// Solves `(−κΔ + V) r = g` for a stiffness `κ > 0` by preconditioned CG.
pub fn solve_elliptic(model: &EnergyModel, kappa: f64, g: &Field, rel_tolerance: f64) -> Result<Field> {
    let lattice = *model.lattice();
    if g.lattice() != &lattice {
        return Err(Error::BoxMismatch {
            expected: lattice.radius(),
            found: g.lattice().radius(),
        });
    }
    let pot = model.potential().values();
    let diag: Vec<f64> = pot.iter().map(|v| 6.0 * kappa + v).collect();
    let n = g.values().len();
    let b = g.values();
    let b_norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        return Ok(Field::zeros(lattice));
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let max_iter = 10 * n.max(100);
    for it in 0..max_iter {
        let r_norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r_norm <= rel_tolerance * b_norm {
            return Field::from_values(lattice, x);
        }
        lattice::apply_h_operator(&p, &lattice, kappa, pot, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::LinearSolveFailed {
                residual: r_norm / b_norm,
                iterations: it,
            });
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let r_norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    Err(Error::LinearSolveFailed {
        residual: r_norm / b_norm,
        iterations: max_iter,
    })
}

/// Relative residual target for the representer solves.
pub const REPRESENTER_TOLERANCE: f64 = 1e-12;

/// State of `Ψ` at a unit vector `w`.
#[derive(Debug, Clone)]
pub struct SpherePoint {
    pub w: Field,
    pub coeffs: FiberCoefficients,
    /// `s_w`, so that `m(w) = s_w w`.
    pub scale: f64,
    /// `Ψ(w) = J(s_w w)`.
    pub energy: f64,
    /// `R_α ∗ F(w)`.
    convolution: Field,
}

impl SpherePoint {
    /// Normalises `u` and projects it; `u` need not be unit.
    pub fn new(model: &EnergyModel, u: &Field, tolerance: f64) -> Result<Self> {
        let w = sphere_inverse(model, u)?;
        let (coeffs, convolution) = fiber_coefficients_with_convolution(model, &w)?;
        let b = model.spec().b;
        let scale = nehari_scale(&coeffs, b, tolerance)?;
        Ok(SpherePoint {
            energy: coeffs.energy_at(scale, b),
            w,
            coeffs,
            scale,
            convolution,
        })
    }

    /// `m(w)`.
    pub fn on_manifold(&self) -> Field {
        self.w.scaled(self.scale)
    }

    /// The derivative field `g` of `J` at `m(w)`, reusing the stored convolution.
    pub fn derivative_field(&self, model: &EnergyModel) -> Field {
        // R ∗ F(s w) = s^p R ∗ F(w)
        let conv = self.convolution.scaled(self.scale.powf(self.coeffs.exponent));
        model.gradient_with(&self.on_manifold(), &conv)
    }
}

/// `Ψ'(w)` as a tangent vector, with the derivative field of `J` at `m(w)`.
#[derive(Debug, Clone)]
pub struct ReducedGradient {
    /// Tangential H-representer `r`, `(r, w)_H = 0`.
    pub tangent: Field,
    /// `g`, the ℓ² field of `J'(m(w))`.
    pub field: Field,
    /// H-representer of `J'(m(w))`.
    pub representer: Field,
}

impl ReducedGradient {
    /// `‖J'(m(w))‖` in the dual of H, `√(Σ g · H⁻¹g)`.
    pub fn dual_norm(&self) -> f64 {
        self.field.dot(&self.representer).max(0.0).sqrt()
    }
}

/// `r = s_w (H⁻¹g − (H⁻¹g, w)_H w)` where `g` represents `J'(s_w w)`.
pub fn reduced_gradient(model: &EnergyModel, point: &SpherePoint) -> Result<ReducedGradient> {
    let field = point.derivative_field(model);
    let representer = h_representer(model, &field, REPRESENTER_TOLERANCE)?;
    // (H⁻¹g, w)_H = Σ g w
    let radial = field.dot(&point.w);
    let tangent = representer.add_scaled(-radial, &point.w).scaled(point.scale);
    Ok(ReducedGradient {
        tangent,
        field,
        representer,
    })
}

/// `min_u J(m̂(u))` over the samples; an upper estimate of `c = inf_𝒩 J`.
pub fn mountain_pass_level_check(model: &EnergyModel, samples: &[Field], tolerance: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("level check needs at least one sample".into()));
    }
    let mut best = f64::INFINITY;
    for u in samples {
        let coeffs = fiber_coefficients(model, u)?;
        let s = nehari_scale(&coeffs, model.spec().b, tolerance)?;
        best = best.min(coeffs.energy_at(s, model.spec().b));
    }
    Ok(best)
}
