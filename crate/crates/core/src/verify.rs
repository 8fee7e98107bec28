//! Sampled checks of the variational structure: mountain-pass geometry, the
//! discrete Hardy–Littlewood–Sobolev bound, monotonicity along fibers, the minimax
//! level identity, truncation convergence and symmetry.
//!
//! The statements being checked quantify over whole function spaces; every
//! check here looks at finitely many samples and is evidence, not proof.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{EnergyModel, PotentialSpec, ProblemSpec};
use crate::error::{Error, Result};
use crate::kernel::{ConvolutionMethod, Convolver, GreenKernel};
use crate::lattice::{lp_norm, octahedral_images, BoundaryMode, Field, Index3, LatticeBox, LpExponent};
use crate::nehari::{fiber_coefficients, nehari_scale, sphere_inverse};
use crate::solver::{solve_ground_state, SolveConfig, SolveReport};

/// Outcome of one sampled check.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub name: String,
    /// The statement being sampled.
    pub anchor: String,
    pub samples: usize,
    pub pass: bool,
    /// Measured extremes, as `key=value` pairs.
    pub measured: String,
    pub tolerance: f64,
    /// Input that broke the property, when it failed.
    pub witness: Option<String>,
}

impl PropertyReport {
    fn new(name: &str, anchor: &str, samples: usize, tolerance: f64) -> Self {
        PropertyReport {
            name: name.into(),
            anchor: anchor.into(),
            samples,
            pass: true,
            measured: String::new(),
            tolerance,
            witness: None,
        }
    }

    fn fail(&mut self, witness: String) {
        if self.pass {
            self.pass = false;
            self.witness = Some(witness);
        }
    }
}

/// Sample counts and tolerances for the full suite.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub mountain_pass_trials: usize,
    pub hls_trials: usize,
    pub hls_radii: Vec<usize>,
    /// Allowed relative spread of the HLS supremum across radii.
    pub hls_stability: f64,
    pub fiber_trials: usize,
    pub fiber_grid: usize,
    pub level_samples: usize,
    /// Slack on `ray max >= c`.
    pub level_tolerance: f64,
    pub box_radii: Vec<usize>,
    pub box_tolerance: f64,
    pub translation_tolerance: f64,
    pub symmetry_tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            mountain_pass_trials: 100,
            hls_trials: 200,
            hls_radii: vec![4, 6, 8],
            hls_stability: 0.05,
            fiber_trials: 20,
            fiber_grid: 50,
            level_samples: 20,
            level_tolerance: 1e-8,
            box_radii: vec![4, 6, 8, 10],
            box_tolerance: 1e-3,
            translation_tolerance: 1e-10,
            symmetry_tolerance: 1e-4,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mountain_pass_trials < 10 {
            return Err(Error::InvalidParameter("mountain-pass check needs at least 10 trials".into()));
        }
        for (name, v) in [
            ("hls_trials", self.hls_trials),
            ("fiber_trials", self.fiber_trials),
            ("fiber_grid", self.fiber_grid),
            ("level_samples", self.level_samples),
        ] {
            if v == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if self.hls_radii.is_empty() {
            return Err(Error::InvalidParameter("hls_radii must not be empty".into()));
        }
        if self.box_radii.len() < 2 || self.box_radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("box_radii must hold at least two increasing radii".into()));
        }
        Ok(())
    }

    /// Independent stream for one named check.
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

fn random_field(lattice: LatticeBox, rng: &mut ChaCha8Rng, lo: f64) -> Field {
    Field::from_fn(lattice, |_| rng.gen_range(lo..1.0))
}

/// Largest `ρ = 2^{-k}`, scanning down from `2^{64}`, with `min_j J(ρ w_j) > 0`
/// over unit directions `w_j`, and that minimum `σ`.
pub fn mountain_pass_radius(model: &EnergyModel, directions: &[Field]) -> Result<Option<(f64, f64)>> {
    let b = model.spec().b;
    let coeffs = directions
        .iter()
        .map(|w| fiber_coefficients(model, w))
        .collect::<Result<Vec<_>>>()?;
    for k in -64..64 {
        let rho = 0.5f64.powi(k);
        let sigma = coeffs.iter().map(|c| c.energy_at(rho, b)).fold(f64::INFINITY, f64::min);
        if sigma > 0.0 {
            return Ok(Some((rho, sigma)));
        }
    }
    Ok(None)
}

/// `J >= σ > 0` on a small sphere `‖u‖ = ρ`, and some `e` beyond it with `J(e) < 0`.
pub fn check_mountain_pass_geometry(model: &EnergyModel, config: &VerifyConfig) -> Result<PropertyReport> {
    let trials = config.mountain_pass_trials;
    let mut report = PropertyReport::new(
        "mountain_pass_geometry",
        "J >= sigma > 0 on the sphere ||u|| = rho, and J(e) < 0 for some ||e|| > rho",
        trials,
        0.0,
    );
    let mut rng = config.rng(1);
    let lattice = *model.lattice();
    let directions = (0..trials)
        .map(|_| sphere_inverse(model, &random_field(lattice, &mut rng, -1.0)))
        .collect::<Result<Vec<_>>>()?;
    let Some((rho, sigma)) = mountain_pass_radius(model, &directions)? else {
        report.fail("no radius 2^-k, |k| <= 64, with positive energy on every sampled direction".into());
        report.measured = "rho=none".into();
        return Ok(report);
    };
    let b = model.spec().b;
    let c = fiber_coefficients(model, &directions[0])?;
    let mut t = 1.0;
    while c.energy_at(t, b) >= 0.0 && t < 1e150 {
        t *= 2.0;
    }
    let je = c.energy_at(t, b);
    report.measured = format!("rho={rho:e} sigma={sigma:e} norm_e={t:e} J(e)={je:e}");
    if !(je < 0.0 && t > rho) {
        report.fail(format!("no negative energy along direction 0 up to t = {t:e}"));
    }
    Ok(report)
}

/// `Σ(R ∗ u) v / (‖u‖_r ‖v‖_s)` with `r = s = 6/(3+α)`.
pub fn hls_ratio(conv: &Convolver, u: &Field, v: &Field, alpha: f64) -> Result<f64> {
    Ok(hls_ratios(conv, u, v, alpha)?.0)
}

/// [`hls_ratio`] and [`hls_equivalent_ratio`] of `u` from one convolution.
fn hls_ratios(conv: &Convolver, u: &Field, v: &Field, alpha: f64) -> Result<(f64, f64)> {
    let r = LpExponent::Finite(6.0 / (3.0 + alpha));
    let q = LpExponent::Finite(6.0 / (3.0 - alpha));
    let ru = conv.apply(u)?;
    let nu = lp_norm(u, r)?;
    Ok((ru.dot(v) / (nu * lp_norm(v, r)?), lp_norm(&ru, q)? / nu))
}

/// `‖R ∗ u‖_q / ‖u‖_r` with `r = 6/(3+α)` and `q = 3r/(3 − αr) = 6/(3−α)`.
pub fn hls_equivalent_ratio(conv: &Convolver, u: &Field, alpha: f64) -> Result<f64> {
    let r = LpExponent::Finite(6.0 / (3.0 + alpha));
    let q = LpExponent::Finite(6.0 / (3.0 - alpha));
    Ok(lp_norm(&conv.apply(u)?, q)? / lp_norm(u, r)?)
}

fn relative_spread(sups: &[(usize, f64)]) -> f64 {
    let hi = sups.iter().map(|s| s.1).fold(f64::MIN, f64::max);
    let lo = sups.iter().map(|s| s.1).fold(f64::MAX, f64::min);
    (hi - lo) / hi
}

/// Random nonnegative field: uniform noise under a Gaussian envelope of
/// random width and centre, so both concentrated and spread shapes occur.
fn random_profile(lattice: LatticeBox, rng: &mut ChaCha8Rng) -> Field {
    let n = lattice.radius() as f64;
    let width = 0.5 + rng.gen_range(0.0..1.5 * n.max(1.0));
    let c = [0; 3].map(|_: i32| rng.gen_range(-n / 2.0..=n / 2.0));
    Field::from_fn(lattice, |x| {
        let r2: f64 = (0..3).map(|i| (x.0[i] as f64 - c[i]).powi(2)).sum();
        (-r2 / (2.0 * width * width)).exp() * rng.gen_range(0.0..1.0)
    })
}

/// Empirical HLS constant per radius; pass when the supremum is stable
/// across radii.
pub fn check_hls(kernel: &GreenKernel, config: &VerifyConfig) -> Result<PropertyReport> {
    let alpha = kernel.alpha();
    let mut report = PropertyReport::new(
        "hls_inequality",
        "sum (R*u) v <= C ||u||_r ||v||_s with 1/r + 1/s + (3-alpha)/3 = 2",
        config.hls_trials * config.hls_radii.len(),
        config.hls_stability,
    );
    let mut rng = config.rng(2);
    let mut sups = Vec::new();
    let mut eq_sups = Vec::new();
    let mut homogeneity_gap: f64 = 0.0;
    for &n in &config.hls_radii {
        let lattice = LatticeBox::dirichlet(n);
        let conv = Convolver::new(kernel, lattice, ConvolutionMethod::Fft)?;
        let delta = Field::delta(lattice, Index3::ORIGIN, 1.0);
        let (mut sup, mut sup_eq) = hls_ratios(&conv, &delta, &delta, alpha)?;
        for t in 0..config.hls_trials {
            let u = random_profile(lattice, &mut rng);
            let v = random_profile(lattice, &mut rng);
            if u.is_zero() || v.is_zero() {
                continue;
            }
            let (q, q_eq) = hls_ratios(&conv, &u, &v, alpha)?;
            if !q.is_finite() || q <= 0.0 {
                report.fail(format!("radius {n}, trial {t}: ratio {q}"));
            }
            if t == 0 {
                let q2 = hls_ratio(&conv, &u.scaled(2.0), &v, alpha)?;
                homogeneity_gap = homogeneity_gap.max((q2 - q).abs() / q);
            }
            sup = sup.max(q);
            sup_eq = sup_eq.max(q_eq);
        }
        sups.push((n, sup));
        eq_sups.push((n, sup_eq));
    }
    let spread = relative_spread(&sups);
    let eq_spread = relative_spread(&eq_sups);
    let mut measured = sups
        .iter()
        .map(|(n, s)| format!("sup(n={n})={s:.6e}"))
        .chain(eq_sups.iter().map(|(n, s)| format!("sup_potential(n={n})={s:.6e}")))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = write!(
        measured,
        " spread={spread:.3e} potential_spread={eq_spread:.3e} scaling_gap={homogeneity_gap:.1e}"
    );
    report.measured = measured;
    if spread > config.hls_stability {
        report.fail(format!("supremum varies by {spread:.3e} across radii"));
    }
    if eq_spread > config.hls_stability {
        report.fail(format!("potential-form supremum varies by {eq_spread:.3e} across radii"));
    }
    if homogeneity_gap > 1e-12 {
        report.fail(format!("ratio changed by {homogeneity_gap:e} under u -> 2u"));
    }
    Ok(report)
}

/// `g(t) = I(tu)`: `¼ t g'(t) − g(t)` positive and increasing, `g(t) >= t^θ g(1)`
/// for `t >= 1`, and `g(t) = t^{2p} g(1)` for the power law.
pub fn check_fiber_monotonicity(model: &EnergyModel, config: &VerifyConfig) -> Result<PropertyReport> {
    let spec = model.spec();
    let theta = spec.nonlinearity.theta();
    let p = spec
        .nonlinearity
        .homogeneity()
        .ok_or_else(|| Error::InvalidParameter("fiber check needs a power nonlinearity".into()))?;
    let grid = config.fiber_grid;
    let mut report = PropertyReport::new(
        "fiber_monotonicity",
        "t g'(t)/4 - g(t) positive and increasing; g(t) >= t^theta g(1) for t >= 1",
        config.fiber_trials * grid,
        1e-10,
    );
    let mut rng = config.rng(3);
    let lattice = *model.lattice();
    let mut min_h = f64::INFINITY;
    let mut worst_identity: f64 = 0.0;
    let mut min_margin = f64::INFINITY;
    for trial in 0..config.fiber_trials {
        let u = random_field(lattice, &mut rng, -1.0);
        let g1 = model.choquard_i(&u)?;
        let ts: Vec<f64> = (1..=grid).map(|k| 3.0 * k as f64 / grid as f64).collect();
        let mut values = Vec::with_capacity(grid);
        for pair in ts.chunks(2) {
            let fields: Vec<Field> = pair.iter().map(|t| u.scaled(*t)).collect();
            let prims: Vec<Field> = fields.iter().map(|f| model.primitive_field(f)).collect();
            let convs = match prims.as_slice() {
                [a, b] => {
                    let (ca, cb) = model.convolve_pair(a, b)?;
                    vec![ca, cb]
                }
                [a] => vec![model.convolve(a)?],
                _ => unreachable!(),
            };
            for ((tu, prim), conv) in fields.iter().zip(&prims).zip(&convs) {
                // g(t) = ½ Σ (R ∗ F(tu)) F(tu),  g'(t) = Σ (R ∗ F(tu)) f(tu) u
                let g = 0.5 * conv.dot(prim);
                let fu = model.f_field(tu);
                let dg: f64 = (0..u.values().len())
                    .map(|k| conv.values()[k] * fu.values()[k] * u.values()[k])
                    .sum();
                values.push((g, dg));
            }
        }
        let mut prev_h = f64::NEG_INFINITY;
        for (&t, &(g, dg)) in ts.iter().zip(&values) {
            let h = 0.25 * t * dg - g;
            min_h = min_h.min(h);
            if !(h > 0.0 && h > prev_h) {
                report.fail(format!("trial {trial}, t = {t}: h = {h:e} after {prev_h:e}"));
            }
            prev_h = h;
            let exact = t.powf(2.0 * p) * g1;
            worst_identity = worst_identity.max((g - exact).abs() / exact);
            if t >= 1.0 {
                for th in [theta, 4.5f64.min(2.0 * p)] {
                    let margin = g - t.powf(th) * g1;
                    min_margin = min_margin.min(margin / g);
                    if margin < -1e-12 * g {
                        report.fail(format!("trial {trial}, t = {t}, theta = {th}: g(t) - t^theta g(1) = {margin:e}"));
                    }
                }
            }
        }
    }
    if worst_identity > report.tolerance {
        report.fail(format!("power identity off by {worst_identity:e}"));
    }
    report.measured = format!("min_h={min_h:e} identity_gap={worst_identity:.2e} min_theta_margin={min_margin:.2e}");
    Ok(report)
}

/// Ray maxima `max_s J(su)` of random samples bound the solver level from above,
/// the ground-state ray attains it, and so does the segment path `t e`.
pub fn check_level_identity(model: &EnergyModel, solved: &SolveReport, config: &VerifyConfig) -> Result<PropertyReport> {
    let c = solved.energy;
    let tol = config.level_tolerance;
    let b = model.spec().b;
    let mut report = PropertyReport::new(
        "level_identity",
        "c1 = c2 = c > 0: ray maxima and path maxima are >= inf over the Nehari manifold",
        config.level_samples + 2,
        tol,
    );
    let mut rng = config.rng(4);
    let lattice = *model.lattice();
    let mut min_ray = f64::INFINITY;
    for k in 0..config.level_samples {
        let u = random_field(lattice, &mut rng, -1.0);
        let coeffs = fiber_coefficients(model, &u)?;
        let s = nehari_scale(&coeffs, b, 1e-10)?;
        let top = coeffs.energy_at(s, b);
        min_ray = min_ray.min(top);
        if top < c - tol {
            report.fail(format!("sample {k}: ray maximum {top:.16e} below c = {c:.16e}"));
        }
    }
    // the ground state's own ray, and a multiple of it
    let gs = fiber_coefficients(model, &solved.solution)?;
    let own = gs.energy_at(nehari_scale(&gs, b, 1e-10)?, b);
    let half = fiber_coefficients(model, &solved.solution.scaled(0.5))?;
    let own_half = half.energy_at(nehari_scale(&half, b, 1e-10)?, b);
    if (own - c).abs() > tol * c.abs().max(1.0) || (own_half - own).abs() > tol * c.abs().max(1.0) {
        report.fail(format!("ground-state ray gives {own:.16e} and {own_half:.16e}, c = {c:.16e}"));
    }
    // segment 0 -> e along the ground-state direction with J(e) < 0
    let mut t_end = 1.0;
    while gs.energy_at(t_end, b) >= 0.0 {
        t_end *= 2.0;
    }
    let path_max = segment_maximum(|t| gs.energy_at(t * t_end, b));
    if path_max < c - tol || (path_max - c).abs() > 1e-6 * c.abs().max(1.0) {
        report.fail(format!("segment maximum {path_max:.16e} vs c = {c:.16e}"));
    }
    report.measured = format!("c={c:.12e} min_ray={min_ray:.12e} own_ray={own:.12e} path_max={path_max:.12e}");
    if !(c > 0.0) {
        report.fail(format!("level c = {c} is not positive"));
    }
    Ok(report)
}

/// Maximum of a unimodal function on `[0, 1]`: grid search, then golden
/// section around the best grid point.
fn segment_maximum(f: impl Fn(f64) -> f64) -> f64 {
    let n = 200;
    let (mut best_t, mut best) = (0.0, f(0.0));
    for k in 1..=n {
        let t = k as f64 / n as f64;
        let v = f(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let h = 1.0 / n as f64;
    let (mut a, mut b) = ((best_t - h).max(0.0), (best_t + h).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if f(x1) < f(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    best.max(f(0.5 * (a + b)))
}

/// `c(n)` over increasing radii; pass when the last relative gap is small.
pub fn check_box_convergence(
    template: &ProblemSpec,
    kernel: &GreenKernel,
    solve: &SolveConfig,
    config: &VerifyConfig,
) -> Result<(PropertyReport, Vec<(usize, f64)>)> {
    let mut report = PropertyReport::new(
        "box_convergence",
        "truncation: c(n) is Cauchy in the box radius n",
        config.box_radii.len(),
        config.box_tolerance,
    );
    let mut table = Vec::new();
    for &n in &config.box_radii {
        let spec = template.with_lattice(LatticeBox::new(n, template.lattice.mode()));
        let model = EnergyModel::new(&spec, kernel)?;
        let r = solve_ground_state(&model, solve)?;
        if !r.converged {
            report.fail(format!("solve on radius {n} did not converge (residual {:e})", r.residual));
        }
        table.push((n, r.energy));
    }
    let gaps: Vec<f64> = table
        .windows(2)
        .map(|w| (w[1].1 - w[0].1).abs() / w[1].1.abs())
        .collect();
    let last = *gaps.last().unwrap();
    report.measured = table
        .iter()
        .map(|(n, c)| format!("c({n})={c:.12e}"))
        .chain(std::iter::once(format!("last_gap={last:.3e}")))
        .collect::<Vec<_>>()
        .join(" ");
    if last >= config.box_tolerance {
        report.fail(format!("relative gap {last:e} between the two largest radii"));
    }
    Ok((report, table))
}

/// Average of `u` over the 48 octahedral images about `center`.
pub fn octahedral_average(u: &Field, center: Index3) -> Field {
    let mut acc = Field::zeros(*u.lattice());
    for k in 0..48 {
        let img = u.transform(|x| octahedral_images(x - center).nth(k).unwrap() + center);
        acc.axpy(1.0 / 48.0, &img);
    }
    acc
}

/// Periodic mode: `J` invariant under translation by `τ e_j`. Coercive mode:
/// distance of the solution from its octahedral average about `x₀`.
pub fn check_symmetry_and_translation(
    model: &EnergyModel,
    solved: &SolveReport,
    config: &VerifyConfig,
) -> Result<PropertyReport> {
    let spec = model.spec();
    let u = &solved.solution;
    match (&spec.potential, spec.lattice.mode()) {
        (PotentialSpec::Periodic { period, .. }, BoundaryMode::Periodic) => {
            let tol = config.translation_tolerance;
            let mut report = PropertyReport::new(
                "translation_invariance",
                "V tau-periodic: J(u(. - tau e_j)) = J(u)",
                4,
                tol,
            );
            let j0 = model.energy(u)?;
            let mut worst: f64 = (model.energy(&u.translate(Index3::ORIGIN))? - j0).abs();
            for axis in 0..3 {
                let shifted = u.translate(Index3::axis(axis, *period as i64));
                let d = (model.energy(&shifted)? - j0).abs();
                worst = worst.max(d);
                if d >= tol {
                    report.fail(format!("axis {axis}: |J(shifted) - J(u)| = {d:e}"));
                }
            }
            report.measured = format!("max_energy_change={worst:.3e}");
            Ok(report)
        }
        (PotentialSpec::Coercive { .. } | PotentialSpec::Constant { .. }, BoundaryMode::Dirichlet) => {
            let center = match spec.potential {
                PotentialSpec::Coercive { center, .. } => center,
                _ => Index3::ORIGIN,
            };
            let tol = config.symmetry_tolerance;
            let mut report = PropertyReport::new(
                "octahedral_symmetry",
                "diagnostic: radial V about x0, ground state compared with its octahedral average",
                48,
                tol,
            );
            let sym = octahedral_average(u, center);
            let diff = u.add_scaled(-1.0, &sym);
            let rel = diff.dot(&diff).sqrt() / u.dot(u).sqrt();
            report.measured = format!("relative_asymmetry={rel:.3e}");
            let box_symmetric = center.max_abs() == 0;
            if box_symmetric && rel > tol {
                report.fail(format!("asymmetry {rel:e}"));
            }
            Ok(report)
        }
        _ => {
            let mut report = PropertyReport::new(
                "symmetry",
                "no symmetry applies to this potential and boundary combination",
                0,
                0.0,
            );
            report.measured = "skipped".into();
            Ok(report)
        }
    }
}

/// Finite, positive and exactly octahedrally symmetric kernel table.
pub fn check_kernel_integrity(kernel: &GreenKernel) -> PropertyReport {
    let mut report = PropertyReport::new(
        "kernel_integrity",
        "R_alpha is positive and even under the octahedral group",
        kernel.table().len(),
        0.0,
    );
    match kernel.check_integrity() {
        Ok(()) => report.measured = format!("R(0)={:.12e}", kernel.value(Index3::ORIGIN).unwrap_or(f64::NAN)),
        Err(w) => {
            report.measured = "corrupt".into();
            report.fail(w);
        }
    }
    report
}

/// Runs every check. `kernel` must cover the largest radius used by the
/// HLS and box-convergence checks.
pub fn run_suite(
    spec: &ProblemSpec,
    kernel: &GreenKernel,
    solve: &SolveConfig,
    config: &VerifyConfig,
) -> Result<(Vec<PropertyReport>, Option<SolveReport>)> {
    config.validate()?;
    let mut reports = vec![check_kernel_integrity(kernel)];
    if !reports[0].pass {
        return Ok((reports, None));
    }
    let model = EnergyModel::new(spec, kernel)?;
    reports.push(check_mountain_pass_geometry(&model, config)?);
    reports.push(check_hls(kernel, config)?);
    reports.push(check_fiber_monotonicity(&model, config)?);
    let solved = solve_ground_state(&model, solve)?;
    let mut solve_report = PropertyReport::new(
        "ground_state_solve",
        "c = inf over the Nehari manifold is attained; c >= (1/2 - 1/theta) eta^2",
        1,
        solve.gradient_tolerance,
    );
    let theta = spec.nonlinearity.theta();
    solve_report.measured = format!(
        "c={:.12e} residual={:.3e} nehari_defect={:.3e} eta={:.6e}",
        solved.energy, solved.residual, solved.nehari_defect, solved.eta_estimate
    );
    if !solved.converged {
        solve_report.fail(format!("not converged, residual {:e}", solved.residual));
    }
    if !solved.respects_level_bound(theta) || solved.norm < 0.9 * solved.eta_estimate {
        solve_report.fail(format!(
            "level {:e} or norm {:e} below the eta bounds (eta = {:e})",
            solved.energy, solved.norm, solved.eta_estimate
        ));
    }
    reports.push(solve_report);
    reports.push(check_level_identity(&model, &solved, config)?);
    reports.push(check_symmetry_and_translation(&model, &solved, config)?);
    if spec.lattice.mode() == BoundaryMode::Dirichlet {
        reports.push(check_box_convergence(spec, kernel, solve, config)?.0);
    }
    Ok((reports, Some(solved)))
}

/// Table radius needed by [`run_suite`] for this spec and config.
pub fn suite_table_radius(spec: &ProblemSpec, config: &VerifyConfig) -> usize {
    let hls = config.hls_radii.iter().max().copied().unwrap_or(0) * 2;
    let own = crate::kernel::required_table_radius(&spec.lattice);
    let boxes = match spec.lattice.mode() {
        BoundaryMode::Dirichlet => config.box_radii.iter().max().copied().unwrap_or(0) * 2,
        BoundaryMode::Periodic => 0,
    };
    hls.max(own).max(boxes)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `name,anchor,samples,pass,measured,tolerance`, preceded by a comment line.
pub fn suite_csv(reports: &[PropertyReport]) -> String {
    let mut out = String::from("# sampled evidence, not proof: each row checks finitely many inputs\n");
    out.push_str("name,anchor,samples,pass,measured,tolerance\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:e}",
            csv_field(&r.name),
            csv_field(&r.anchor),
            r.samples,
            r.pass,
            csv_field(&r.measured),
            r.tolerance
        );
    }
    out
}

/// One line per check plus failing witnesses.
pub fn suite_summary(reports: &[PropertyReport]) -> String {
    let mut out = String::from("Sampled checks (evidence on finitely many inputs, not proofs)\n");
    for r in reports {
        let _ = writeln!(out, "[{}] {:<24} {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.measured);
        if let Some(w) = &r.witness {
            let _ = writeln!(out, "       witness: {w}");
        }
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    let _ = writeln!(out, "{} of {} checks passed", reports.len() - failed, reports.len());
    out
}
