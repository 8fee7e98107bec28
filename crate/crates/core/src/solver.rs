//! Ground states by Riemannian descent of `Ψ(w) = J(s_w w)` on the unit
//! sphere of H.
//!
//! Each step moves along the tangential H-gradient of `Ψ`, retracts by
//! normalisation, and re-projects onto the Nehari manifold in closed form
//! through the fiber coefficients. Step lengths come from Barzilai–Borwein
//! with Armijo backtracking. The minimum of `Ψ` is the ground-state level
//! `c = inf_𝒩 J`.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{EnergyModel, PotentialSpec, ProblemSpec};
use crate::error::{Error, Result};
use crate::field_io;
use crate::lattice::{self, BoundaryMode, Field, Index3};
use crate::nehari::{nehari_defect, reduced_gradient, solve_elliptic, SpherePoint, REPRESENTER_TOLERANCE};

/// Starting field for the descent.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    /// Gaussian centred at the potential minimum, with seeded multiplicative noise.
    GaussianBump,
    /// Independent uniform values in `[0, 1)`.
    Random,
    /// A field file on the same box.
    File(PathBuf),
}

impl InitialGuess {
    pub fn as_str(&self) -> &str {
        match self {
            InitialGuess::GaussianBump => "gaussian_bump",
            InitialGuess::Random => "random",
            InitialGuess::File(_) => "file",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub max_iterations: usize,
    /// Stop once the ℓ² norm of the derivative field drops below this.
    pub gradient_tolerance: f64,
    /// Backtracking factor in `(0, 1)`.
    pub backtrack: f64,
    /// Armijo sufficient-decrease constant in `(0, 1)`.
    pub armijo: f64,
    pub max_backtracks: usize,
    /// Bound on `|⟨J'(u),u⟩| / ‖u‖²` for every Nehari projection.
    pub nehari_tolerance: f64,
    pub seed: u64,
    pub initial_guess: InitialGuess,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            max_iterations: 5000,
            gradient_tolerance: 1e-8,
            backtrack: 0.5,
            armijo: 1e-4,
            max_backtracks: 60,
            nehari_tolerance: 1e-10,
            seed: 42,
            initial_guess: InitialGuess::GaussianBump,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if !(self.gradient_tolerance > 0.0) {
            return bad("gradient_tolerance must be positive");
        }
        if !(self.nehari_tolerance > 0.0) {
            return bad("nehari_tolerance must be positive");
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad("backtrack must lie in (0, 1)");
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return bad("armijo must lie in (0, 1)");
        }
        if self.max_backtracks == 0 {
            return bad("max_backtracks must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub energy: f64,
    pub residual: f64,
    pub scale: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// The ground state `u = s_w w`, canonicalised in periodic mode.
    pub solution: Field,
    /// `c = J(u)`.
    pub energy: f64,
    /// ℓ² norm of the derivative field at `u`.
    pub residual: f64,
    /// Norm of `J'(u)` in the dual of H.
    pub h_residual: f64,
    /// `|⟨J'(u),u⟩| / ‖u‖²`.
    pub nehari_defect: f64,
    /// Max-norm of the Euler–Lagrange residual field.
    pub euler_lagrange: f64,
    /// `‖u‖` in H.
    pub norm: f64,
    /// Lower bound for `‖u‖` on 𝒩 from the largest `D(w)` met on the sphere.
    pub eta_estimate: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Translation applied by the periodic canonicalisation.
    pub shift: Index3,
    pub history: Vec<HistoryEntry>,
}

impl SolveReport {
    /// `(½ − 1/θ) η²`, the lower bound the level must respect.
    pub fn level_lower_bound(&self, theta: f64) -> f64 {
        (0.5 - 1.0 / theta) * self.eta_estimate * self.eta_estimate
    }

    /// Level bound test with a `1e-9` relative slack. For `b = 0` the ground
    /// state maximizes `D` on the sphere, so the bound holds with equality.
    pub fn respects_level_bound(&self, theta: f64) -> bool {
        self.energy >= self.level_lower_bound(theta) * (1.0 - 1e-9)
    }

    pub fn history_csv(&self) -> String {
        let mut out = String::from("iteration,energy,residual,s_u\n");
        for h in &self.history {
            let _ = writeln!(out, "{},{:.16e},{:.6e},{:.16e}", h.iteration, h.energy, h.residual, h.scale);
        }
        out
    }

    /// Human-readable summary.
    pub fn to_text(&self, spec: &ProblemSpec) -> String {
        let theta = spec.nonlinearity.theta();
        let mut out = String::new();
        let _ = writeln!(out, "status            {}", if self.converged { "converged" } else { "NOT CONVERGED" });
        let _ = writeln!(out, "box               radius={} mode={}", spec.lattice.radius(), spec.lattice.mode());
        let _ = writeln!(out, "parameters        a={} b={} alpha={}", spec.a, spec.b, spec.alpha);
        let _ = writeln!(out, "energy c          {:.16e}", self.energy);
        let _ = writeln!(out, "residual l2       {:.6e}", self.residual);
        let _ = writeln!(out, "residual H-dual   {:.6e}", self.h_residual);
        let _ = writeln!(out, "nehari defect     {:.6e}", self.nehari_defect);
        let _ = writeln!(out, "euler-lagrange    {:.6e}", self.euler_lagrange);
        let _ = writeln!(out, "max |u|           {:.16e}", self.solution.max_abs());
        let _ = writeln!(out, "norm ||u||        {:.16e}", self.norm);
        let _ = writeln!(out, "eta estimate      {:.16e}", self.eta_estimate);
        let _ = writeln!(
            out,
            "level bound       (1/2 - 1/theta) eta^2 = {:.6e} (theta = {theta})",
            self.level_lower_bound(theta)
        );
        let _ = writeln!(out, "iterations        {}", self.iterations);
        let _ = writeln!(out, "canonical shift   {}", self.shift);
        out
    }
}

/// Residuals compared against when energy changes are below roundoff.
const NONMONOTONE_WINDOW: usize = 8;

/// The starting field for `config.initial_guess`.
pub fn initial_field(spec: &ProblemSpec, config: &SolveConfig) -> Result<Field> {
    let lattice = spec.lattice;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let field = match &config.initial_guess {
        InitialGuess::GaussianBump => {
            let center = spec.potential.minimum_site(&lattice);
            let sigma = (lattice.radius() as f64 / 4.0).max(1.0);
            Field::from_fn(lattice, |x| {
                let r2 = (x - center).0.iter().map(|c| (c * c) as f64).sum::<f64>();
                (-r2 / (2.0 * sigma * sigma)).exp() * (1.0 + 0.1 * rng.gen_range(-1.0..1.0))
            })
        }
        InitialGuess::Random => Field::from_fn(lattice, |_| rng.gen_range(0.0..1.0)),
        InitialGuess::File(path) => {
            let f = field_io::load(path)?;
            if f.lattice() != &lattice {
                return Err(Error::BoxMismatch {
                    expected: lattice.radius(),
                    found: f.lattice().radius(),
                });
            }
            f
        }
    };
    if field.is_zero() {
        return Err(Error::Degenerate("initial guess is identically zero".into()));
    }
    Ok(field)
}

/// Minimises `Ψ` from the configured initial guess.
///
/// Returns a report with `converged = false` when `max_iterations` runs out,
/// and an error when the line search cannot make progress.
pub fn solve_ground_state(model: &EnergyModel, config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    let start = initial_field(model.spec(), config)?;
    solve_from(model, &start, config)
}

/// [`solve_ground_state`] from an explicit starting field.
pub fn solve_from(model: &EnergyModel, start: &Field, config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    let tol = config.nehari_tolerance;
    let mut point = SpherePoint::new(model, start, tol)?;
    let mut step = Descent::at(model, &point)?;
    let mut history = Vec::new();
    let mut max_d = point.coeffs.d;
    // the Hessian of Ψ scales like s² in the preconditioned metric
    let mut tau = 1.0 / (point.scale * point.scale);
    let mut prev: Option<(Field, Field)> = None;
    let mut converged = false;
    let mut iteration = 0;

    loop {
        history.push(HistoryEntry {
            iteration,
            energy: point.energy,
            residual: step.residual,
            scale: point.scale,
        });
        if step.residual <= config.gradient_tolerance {
            converged = true;
            break;
        }
        if iteration >= config.max_iterations {
            break;
        }

        if let Some((w_old, d_old)) = &prev {
            let dw = point.w.add_scaled(-1.0, w_old);
            let dd = step.direction.add_scaled(-1.0, d_old);
            let sy = model.h_inner(&dw, &dd)?;
            if sy > 0.0 {
                tau = model.h_inner(&dw, &dw)? / sy;
            }
        }
        // dΨ(w)[−d] = −s ⟨g, d⟩
        let slope = point.scale * step.field.dot(&step.direction);
        let roundoff = 16.0 * f64::EPSILON * point.coeffs.energy_magnitude(point.scale, model.spec().b);
        let recent_max = history[history.len().saturating_sub(NONMONOTONE_WINDOW)..]
            .iter()
            .map(|h| h.residual)
            .fold(0.0, f64::max);
        let mut accepted = None;
        let mut trial_tau = tau;
        for _ in 0..config.max_backtracks {
            let trial = SpherePoint::new(model, &point.w.add_scaled(-trial_tau, &step.direction), tol)?;
            let drop = point.energy - trial.energy;
            if drop >= config.armijo * trial_tau * slope {
                accepted = Some((trial, None));
                break;
            }
            // a change below the resolution of Ψ is accepted when the gradient
            // stays below its recent maximum
            if drop >= -roundoff {
                let next = Descent::at(model, &trial)?;
                if next.residual < recent_max {
                    accepted = Some((trial, Some(next)));
                    break;
                }
            }
            trial_tau *= config.backtrack;
        }
        let Some((next_point, next_step)) = accepted else {
            return Err(Error::LineSearchFailed {
                iteration,
                detail: format!(
                    "no acceptable step after {} backtracks (energy {:.16e}, residual {:e})",
                    config.max_backtracks, point.energy, step.residual
                ),
            });
        };
        let next_step = match next_step {
            Some(s) => s,
            None => Descent::at(model, &next_point)?,
        };
        max_d = max_d.max(next_point.coeffs.d);
        prev = Some((point.w, step.direction));
        point = next_point;
        step = next_step;
        iteration += 1;
    }

    finish(model, point, history, max_d, iteration, converged, config)
}

/// Derivative field at `m(w)` and the preconditioned tangent direction
/// `s (P g − (P g, w)_H w)` with `P = (−(a + bA)Δ + V)⁻¹`, the inverse of
/// the principal part of `J''`.
struct Descent {
    field: Field,
    direction: Field,
    residual: f64,
}

impl Descent {
    fn at(model: &EnergyModel, point: &SpherePoint) -> Result<Self> {
        let spec = model.spec();
        let field = point.derivative_field(model);
        let kappa = spec.a + spec.b * point.scale * point.scale * point.coeffs.gradient;
        let pg = solve_elliptic(model, kappa, &field, REPRESENTER_TOLERANCE)?;
        let radial = model.h_inner(&pg, &point.w)?;
        let direction = pg.add_scaled(-radial, &point.w).scaled(point.scale);
        Ok(Descent {
            residual: l2(&field),
            field,
            direction,
        })
    }
}

fn finish(
    model: &EnergyModel,
    point: SpherePoint,
    history: Vec<HistoryEntry>,
    max_d: f64,
    iterations: usize,
    converged: bool,
    config: &SolveConfig,
) -> Result<SolveReport> {
    let spec = model.spec();
    let p = spec.nonlinearity.homogeneity().unwrap_or(2.0);
    let eta_estimate = max_d.powf(-1.0 / (2.0 * p - 2.0));
    let mut point = point;
    let mut shift = Index3::ORIGIN;
    if let (BoundaryMode::Periodic, PotentialSpec::Periodic { period, .. }) = (spec.lattice.mode(), &spec.potential) {
        shift = canonical_shift(&point.w, *period);
        if shift != Index3::ORIGIN {
            point = SpherePoint::new(model, &point.w.translate(shift), config.nehari_tolerance)?;
        }
    }
    let grad = reduced_gradient(model, &point)?;
    let solution = point.on_manifold();
    let residual = l2(&grad.field);
    Ok(SolveReport {
        energy: model.energy(&solution)?,
        residual,
        h_residual: grad.dual_norm(),
        nehari_defect: nehari_defect(model, &solution)?,
        euler_lagrange: grad.field.max_abs(),
        norm: model.h_norm(&solution)?,
        eta_estimate,
        iterations,
        converged: converged && residual <= config.gradient_tolerance,
        shift,
        history,
        solution,
    })
}

/// The multiple of the period along each axis that moves the peak of `u`
/// closest to the box centre.
pub fn canonical_shift(u: &Field, period: usize) -> Index3 {
    let peak = u.argmax_abs();
    let t = period as f64;
    Index3(peak.0.map(|c| -((c as f64 / t).round() as i64) * period as i64))
}

/// ℓ² norm.
pub fn l2(u: &Field) -> f64 {
    u.dot(u).sqrt()
}

/// `−(a + bA)Δu + Vu − (R ∗ F(u)) f(u)` evaluated from scratch.
pub fn euler_lagrange_residual(model: &EnergyModel, u: &Field) -> Result<Field> {
    let spec = model.spec();
    let kirchhoff = spec.a + spec.b * lattice::gradient_energy(u);
    let lap = lattice::laplacian(u);
    let conv = model.convolve(&model.primitive_field(u))?;
    let nl = spec.nonlinearity;
    Ok(Field::from_fn(*u.lattice(), |x| {
        let v = spec.potential.eval(x);
        -kirchhoff * lap.get(x) + v * u.get(x) - conv.get(x) * nl.f(u.get(x))
    }))
}
