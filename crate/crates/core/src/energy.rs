//! Potentials, nonlinearities and the Kirchhoff–Choquard energy
//!
//! ```text
//! J(u) = ½∫(a|∇u|² + V u²) + (b/4)(∫|∇u|²)² − ½∫(R_α ∗ F(u)) F(u)
//! ```
//!
//! with derivative field `g = −(a + b∫|∇u|²)Δu + V u − (R_α ∗ F(u)) f(u)`,
//! so that `⟨J'(u), φ⟩ = Σ_x g(x) φ(x)`.

use crate::error::{Error, Result};
use crate::kernel::{ConvolutionMethod, Convolver, GreenKernel};
use crate::lattice::{self, Field, Index3, LatticeBox};

/// The potential `V`, bounded below by `V₀ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// `V ≡ V₀`.
    Constant { v0: f64 },
    /// `V(x) = V₀ + λ |x − x₀|^β` with the graph distance `|·|`.
    Coercive {
        v0: f64,
        center: Index3,
        rate: f64,
        exponent: f64,
    },
    /// `V(x) = table[x mod τ]`, a `τ³` row-major table with entries `>= V₀`.
    Periodic { v0: f64, period: usize, table: Vec<f64> },
}

impl PotentialSpec {
    pub fn constant(v0: f64) -> Result<Self> {
        let p = PotentialSpec::Constant { v0 };
        p.validate()?;
        Ok(p)
    }

    pub fn coercive(v0: f64, center: Index3, rate: f64, exponent: f64) -> Result<Self> {
        let p = PotentialSpec::Coercive {
            v0,
            center,
            rate,
            exponent,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn periodic(v0: f64, period: usize, table: Vec<f64>) -> Result<Self> {
        let p = PotentialSpec::Periodic { v0, period, table };
        p.validate()?;
        Ok(p)
    }

    pub fn v0(&self) -> f64 {
        match self {
            PotentialSpec::Constant { v0 } | PotentialSpec::Coercive { v0, .. } | PotentialSpec::Periodic { v0, .. } => {
                *v0
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let v0 = self.v0();
        if !(v0.is_finite() && v0 > 0.0) {
            return bad(format!("V0 must be positive, got {v0}"));
        }
        match self {
            PotentialSpec::Constant { .. } => Ok(()),
            PotentialSpec::Coercive { rate, exponent, .. } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return bad(format!("coercive rate must be positive, got {rate}"));
                }
                if !(exponent.is_finite() && *exponent > 0.0) {
                    return bad(format!("coercive exponent must be positive, got {exponent}"));
                }
                Ok(())
            }
            PotentialSpec::Periodic { period, table, .. } => {
                if *period == 0 {
                    return bad("period must be positive".into());
                }
                if table.len() != period.pow(3) {
                    return bad(format!("periodic table needs {} values, got {}", period.pow(3), table.len()));
                }
                if let Some(v) = table.iter().find(|v| !(v.is_finite() && **v >= v0)) {
                    return bad(format!("periodic table value {v} below V0 = {v0}"));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: Index3) -> f64 {
        match self {
            PotentialSpec::Constant { v0 } => *v0,
            PotentialSpec::Coercive {
                v0,
                center,
                rate,
                exponent,
            } => {
                let d = (x - *center).l1() as f64;
                v0 + rate * d.powf(*exponent)
            }
            PotentialSpec::Periodic { period, table, .. } => {
                let t = *period as i64;
                let i = x.0.map(|c| c.rem_euclid(t) as usize);
                table[(i[0] * period + i[1]) * period + i[2]]
            }
        }
    }

    pub fn field(&self, lattice: &LatticeBox) -> Field {
        Field::from_fn(*lattice, |x| self.eval(x))
    }

    /// A site where `V` is smallest, nearest the origin.
    pub fn minimum_site(&self, lattice: &LatticeBox) -> Index3 {
        match self {
            PotentialSpec::Coercive { center, .. } if lattice.contains(*center) => *center,
            _ => {
                let mut best = Index3::ORIGIN;
                let mut best_v = self.eval(best);
                for x in lattice.sites() {
                    let v = self.eval(x);
                    if v < best_v || (v == best_v && x.l1() < best.l1()) {
                        best = x;
                        best_v = v;
                    }
                }
                best
            }
        }
    }
}

/// `f(t) = c|t|^{p−2} t`, `F(t) = c|t|^p / p`, with `4 < θ <= 2p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub coefficient: f64,
    pub exponent: f64,
    pub theta: f64,
}

impl PowerLaw {
    /// `θ` defaults to `2p`.
    pub fn new(coefficient: f64, exponent: f64) -> Result<Self> {
        Self::with_theta(coefficient, exponent, 2.0 * exponent)
    }

    pub fn with_theta(coefficient: f64, exponent: f64, theta: f64) -> Result<Self> {
        let p = PowerLaw {
            coefficient,
            exponent,
            theta,
        };
        Nonlinearity::Power(p).validate()?;
        Ok(p)
    }
}

/// Admissible right-hand sides. Only pure powers ship; a new variant must
/// supply its own admissibility check in [`Nonlinearity::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    Power(PowerLaw),
}

impl Nonlinearity {
    pub fn power(coefficient: f64, exponent: f64) -> Result<Self> {
        Ok(Nonlinearity::Power(PowerLaw::new(coefficient, exponent)?))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Nonlinearity::Power(PowerLaw {
                coefficient: c,
                exponent: p,
                theta,
            }) => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidParameter(format!("coefficient c must be positive, got {c}")));
                }
                if !(p.is_finite() && *p > 2.0) {
                    return Err(Error::InvalidParameter(format!("exponent p must exceed 2, got {p}")));
                }
                if !(*theta > 4.0 && *theta <= 2.0 * p) {
                    return Err(Error::InvalidParameter(format!(
                        "theta must satisfy 4 < theta <= 2p = {}, got {theta}",
                        2.0 * p
                    )));
                }
                Ok(())
            }
        }
    }

    /// `f(t)`.
    pub fn f(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::Power(PowerLaw {
                coefficient, exponent, ..
            }) => coefficient * t.abs().powf(exponent - 2.0) * t,
        }
    }

    /// `F(t) = ∫_0^t f`.
    pub fn primitive(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::Power(PowerLaw {
                coefficient, exponent, ..
            }) => coefficient * t.abs().powf(*exponent) / exponent,
        }
    }

    pub fn theta(&self) -> f64 {
        match self {
            Nonlinearity::Power(p) => p.theta,
        }
    }

    /// Degree of homogeneity of `F`, when it is homogeneous.
    pub fn homogeneity(&self) -> Option<f64> {
        match self {
            Nonlinearity::Power(p) => Some(p.exponent),
        }
    }

    /// Constants `(ε, C_ε)` of `|f(t)| <= ε|t| + C_ε|t|^{p−1}`.
    pub fn growth_constants(&self) -> (f64, f64) {
        match self {
            Nonlinearity::Power(p) => (p.coefficient, p.coefficient),
        }
    }
}

/// Everything that defines `J` on one box.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub potential: PotentialSpec,
    pub nonlinearity: Nonlinearity,
    pub lattice: LatticeBox,
}

impl ProblemSpec {
    pub fn new(
        a: f64,
        b: f64,
        alpha: f64,
        potential: PotentialSpec,
        nonlinearity: Nonlinearity,
        lattice: LatticeBox,
    ) -> Result<Self> {
        let s = ProblemSpec {
            a,
            b,
            alpha,
            potential,
            nonlinearity,
            lattice,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidParameter(format!("a must be positive, got {}", self.a)));
        }
        if !(self.b.is_finite() && self.b >= 0.0) {
            return Err(Error::InvalidParameter(format!("b must be nonnegative, got {}", self.b)));
        }
        if !(self.alpha > 0.0 && self.alpha < 3.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 3), got {}", self.alpha)));
        }
        self.potential.validate()?;
        self.nonlinearity.validate()?;
        if let Some(p) = self.nonlinearity.homogeneity() {
            if p <= (3.0 + self.alpha) / 3.0 {
                return Err(Error::InvalidParameter(format!(
                    "p = {p} must exceed (3 + alpha)/3 = {}",
                    (3.0 + self.alpha) / 3.0
                )));
            }
        }
        Ok(())
    }

    pub fn with_lattice(&self, lattice: LatticeBox) -> Self {
        ProblemSpec { lattice, ..self.clone() }
    }
}

/// The pieces of `J(u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    /// `‖u‖² = a∫|∇u|² + ∫V u²`.
    pub norm_h2: f64,
    /// `∫|∇u|²`.
    pub gradient: f64,
    /// `∫(R_α ∗ F(u)) F(u)`.
    pub choquard: f64,
}

impl EnergyParts {
    pub fn energy(&self, b: f64) -> f64 {
        0.5 * self.norm_h2 + 0.25 * b * self.gradient * self.gradient - 0.5 * self.choquard
    }
}

/// `J` and its derivatives for one problem and kernel.
pub struct EnergyModel {
    spec: ProblemSpec,
    potential: Field,
    convolver: Convolver,
}

impl EnergyModel {
    pub fn new(spec: &ProblemSpec, kernel: &GreenKernel) -> Result<Self> {
        Self::with_method(spec, kernel, ConvolutionMethod::Fft)
    }

    pub fn with_method(spec: &ProblemSpec, kernel: &GreenKernel, method: ConvolutionMethod) -> Result<Self> {
        spec.validate()?;
        if (kernel.alpha() - spec.alpha).abs() > 1e-14 * spec.alpha {
            return Err(Error::InvalidParameter(format!(
                "kernel alpha {} does not match problem alpha {}",
                kernel.alpha(),
                spec.alpha
            )));
        }
        Ok(EnergyModel {
            spec: spec.clone(),
            potential: spec.potential.field(&spec.lattice),
            convolver: Convolver::new(kernel, spec.lattice, method)?,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.spec.lattice
    }

    pub fn potential(&self) -> &Field {
        &self.potential
    }

    fn check(&self, u: &Field) -> Result<()> {
        if u.lattice() != &self.spec.lattice {
            return Err(Error::BoxMismatch {
                expected: self.spec.lattice.radius(),
                found: u.lattice().radius(),
            });
        }
        Ok(())
    }

    pub fn convolve(&self, w: &Field) -> Result<Field> {
        self.convolver.apply(w)
    }

    /// `(R ∗ w1, R ∗ w2)` at roughly the cost of one convolution.
    pub fn convolve_pair(&self, w1: &Field, w2: &Field) -> Result<(Field, Field)> {
        self.convolver.apply_pair(w1, w2)
    }

    /// `F(u)` pointwise.
    pub fn primitive_field(&self, u: &Field) -> Field {
        let nl = self.spec.nonlinearity;
        u.map(|t| nl.primitive(t))
    }

    /// `f(u)` pointwise.
    pub fn f_field(&self, u: &Field) -> Field {
        let nl = self.spec.nonlinearity;
        u.map(|t| nl.f(t))
    }

    /// `∫ (R_α ∗ w₁) w₂`.
    pub fn bilinear(&self, w1: &Field, w2: &Field) -> Result<f64> {
        self.check(w1)?;
        self.check(w2)?;
        Ok(self.convolve(w1)?.dot(w2))
    }

    pub fn h_inner(&self, u: &Field, v: &Field) -> Result<f64> {
        lattice::h_inner_with(u, v, self.spec.a, &self.potential)
    }

    pub fn h_norm(&self, u: &Field) -> Result<f64> {
        Ok(self.h_inner(u, u)?.max(0.0).sqrt())
    }

    pub fn parts(&self, u: &Field) -> Result<EnergyParts> {
        self.check(u)?;
        let gradient = lattice::gradient_energy(u);
        let mass: f64 = u
            .values()
            .iter()
            .zip(self.potential.values())
            .map(|(x, v)| v * x * x)
            .sum();
        let fu = self.primitive_field(u);
        let choquard = self.convolve(&fu)?.dot(&fu);
        Ok(EnergyParts {
            norm_h2: self.spec.a * gradient + mass,
            gradient,
            choquard,
        })
    }

    /// `J(u)`.
    pub fn energy(&self, u: &Field) -> Result<f64> {
        Ok(self.parts(u)?.energy(self.spec.b))
    }

    /// `I(u) = ½ ∫ (R_α ∗ F(u)) F(u)`.
    pub fn choquard_i(&self, u: &Field) -> Result<f64> {
        self.check(u)?;
        let fu = self.primitive_field(u);
        Ok(0.5 * self.convolve(&fu)?.dot(&fu))
    }

    /// `⟨I'(u), φ⟩ = ∫ (R_α ∗ F(u)) f(u) φ`.
    pub fn choquard_i_pairing(&self, u: &Field, phi: &Field) -> Result<f64> {
        self.check(u)?;
        self.check(phi)?;
        let conv = self.convolve(&self.primitive_field(u))?;
        let nl = self.spec.nonlinearity;
        Ok(conv
            .values()
            .iter()
            .zip(u.values())
            .zip(phi.values())
            .map(|((c, x), p)| c * nl.f(*x) * p)
            .sum())
    }

    /// The field `g` representing `J'(u)` in the ℓ² pairing.
    pub fn gradient(&self, u: &Field) -> Result<Field> {
        self.check(u)?;
        let conv = self.convolve(&self.primitive_field(u))?;
        Ok(self.gradient_with(u, &conv))
    }

    /// [`Self::gradient`] given `R_α ∗ F(u)`.
    pub(crate) fn gradient_with(&self, u: &Field, conv: &Field) -> Field {
        let kirchhoff = self.spec.a + self.spec.b * lattice::gradient_energy(u);
        let lap = lattice::laplacian(u);
        let nl = self.spec.nonlinearity;
        let values = lap
            .values()
            .iter()
            .zip(u.values())
            .zip(self.potential.values())
            .zip(conv.values())
            .map(|(((l, x), v), c)| -kirchhoff * l + v * x - c * nl.f(*x))
            .collect();
        Field::from_values(*u.lattice(), values).expect("gradient of a finite field is finite")
    }

    /// `⟨J'(u), φ⟩` expanded term by term with the gradient form:
    /// `∫(a∇u∇φ + Vuφ) + b∫|∇u|² ∫∇u∇φ − ∫(R_α ∗ F(u)) f(u) φ`.
    pub fn pairing(&self, u: &Field, phi: &Field) -> Result<f64> {
        self.check(u)?;
        self.check(phi)?;
        let grad_uphi = lattice::gradient_form_sum(u, phi)?;
        let mass: f64 = u
            .values()
            .iter()
            .zip(phi.values())
            .zip(self.potential.values())
            .map(|((x, p), v)| v * x * p)
            .sum();
        let kirchhoff = self.spec.b * lattice::gradient_energy(u);
        Ok(self.spec.a * grad_uphi + mass + kirchhoff * grad_uphi - self.choquard_i_pairing(u, phi)?)
    }

    /// `⟨J'(u), u⟩`, zero exactly on the Nehari manifold.
    pub fn nehari_functional(&self, u: &Field) -> Result<f64> {
        self.pairing(u, u)
    }
}
