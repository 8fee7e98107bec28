//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.
//!
//! Run with `cargo test -p lattice-kc --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lattice_kc::kernel::{
    build_kernel_with, convolve, k_alpha_trapezoid, ConvolutionMethod, DEFAULT_HEAT_PANELS, DEFAULT_TORUS_RESOLUTION,
};
use lattice_kc::nehari::FiberCoefficients;
use lattice_kc::solver::euler_lagrange_residual;
use lattice_kc::verify::{
    check_box_convergence, check_fiber_monotonicity, check_level_identity, check_mountain_pass_geometry,
    check_symmetry_and_translation, VerifyConfig,
};
use lattice_kc::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// The coercive model problem: V = 1 + |x|², a = b = 1, α = 1, F(t) = |t|³/3.
fn model_spec(radius: usize, b: f64) -> ProblemSpec {
    ProblemSpec::new(
        1.0,
        b,
        1.0,
        PotentialSpec::coercive(1.0, Index3::ORIGIN, 1.0, 2.0).unwrap(),
        Nonlinearity::power(1.0, 3.0).unwrap(),
        LatticeBox::dirichlet(radius),
    )
    .unwrap()
}

struct Shared {
    /// α = 1 table covering boxes up to radius 10.
    kernel: GreenKernel,
    solved: Option<SolveReport>,
}

fn kernel_anchors() -> Result<Outcome> {
    let start = Instant::now();
    let k0 = k_alpha_trapezoid(1e-12, 64)?;
    let k2 = k_alpha_trapezoid(2.0, 64)?;
    let elapsed = start.elapsed();
    let pass = (k0 - 1.0).abs() < 1e-10 && (k2 - 6.0).abs() < 1e-10 && elapsed < Duration::from_secs(1);
    Ok(outcome(
        pass,
        format!("K(alpha->0) - 1 = {:.1e}, K_2 - 6 = {:.1e}, {elapsed:.2?}", k0 - 1.0, k2 - 6.0),
    ))
}

fn cross_method() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 1.5, 2.0, 2.5] {
        let heat = build_kernel_with(alpha, 4, KernelMethod::HeatKernel, DEFAULT_HEAT_PANELS)?;
        let torus = build_kernel_with(alpha, 4, KernelMethod::TorusQuadrature, DEFAULT_TORUS_RESOLUTION)?;
        for (h, t) in heat.table().iter().zip(torus.table()) {
            worst = worst.max((h - t).abs() / t.abs());
        }
    }
    let elapsed = start.elapsed();
    Ok(outcome(
        worst < 1e-6 && elapsed < Duration::from_secs(30),
        format!("max relative gap {worst:.2e} over 5 alphas x 9^3 displacements, {elapsed:.2?}"),
    ))
}

fn decay_law() -> Result<Outcome> {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for alpha in [1.0, 2.0] {
        let k = build_kernel(alpha, 32)?;
        let (slope, prefactor) = k.fit_axis_decay(10, 30).expect("fit range inside table");
        pass &= (slope - (alpha - 3.0)).abs() <= 0.05;
        detail.push(format!("alpha={alpha}: slope {slope:.4} (prefactor {prefactor:.4})"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    Ok(outcome(pass, format!("{}, {elapsed:.2?}", detail.join("; "))))
}

fn convolution_oracle(shared: &Shared) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let lattice = LatticeBox::dirichlet(4);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let w = Field::from_fn(lattice, |_| rng.gen_range(-1.0..1.0));
        let fft = convolve(&shared.kernel, &w, ConvolutionMethod::Fft)?;
        let direct = convolve(&shared.kernel, &w, ConvolutionMethod::Direct)?;
        worst = worst.max(fft.add_scaled(-1.0, &direct).max_abs());
    }
    Ok(outcome(worst < 1e-10, format!("max |fft - direct| = {worst:.2e} over 20 fields")))
}

fn gradient_check(shared: &Shared) -> Result<Outcome> {
    let spec = model_spec(5, 1.0);
    let model = EnergyModel::new(&spec, &shared.kernel)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let u = Field::from_fn(spec.lattice, |_| rng.gen_range(-0.5..0.5));
        let phi = Field::from_fn(spec.lattice, |_| rng.gen_range(-1.0..1.0));
        let exact = model.pairing(&u, &phi)?;
        let fd = (model.energy(&u.add_scaled(h, &phi))? - model.energy(&u.add_scaled(-h, &phi))?) / (2.0 * h);
        worst = worst.max((fd - exact).abs() / exact.abs());
    }
    Ok(outcome(worst < 1e-6, format!("max relative gap {worst:.2e} over 50 pairs")))
}

fn nehari_oracles() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(0.01..100.0);
        let a = rng.gen_range(0.0..100.0);
        let d = rng.gen_range(0.01..100.0);
        let p = rng.gen_range(2.05..8.0);
        let c = FiberCoefficients {
            norm_h2: n,
            gradient: a,
            d,
            b_choquard: d / p,
            exponent: p,
        };
        let s = nehari_scale(&c, 0.0, 1e-12)?;
        let exact = (n / d).powf(1.0 / (2.0 * p - 2.0));
        worst = worst.max((s - exact).abs() / exact);

        let b = rng.gen_range(0.01..5.0);
        let c3 = FiberCoefficients {
            exponent: 3.0,
            b_choquard: d / 3.0,
            ..c
        };
        let s = nehari_scale(&c3, b, 1e-12)?;
        let ba2 = b * a * a;
        let exact = ((ba2 + (ba2 * ba2 + 4.0 * d * n).sqrt()) / (2.0 * d)).sqrt();
        worst = worst.max((s - exact).abs() / exact);
    }
    Ok(outcome(worst < 1e-12, format!("max relative gap {worst:.2e} over 2 x 100 coefficient sets")))
}

fn fiber_monotonicity(shared: &Shared) -> Result<Outcome> {
    let model = EnergyModel::new(&model_spec(8, 1.0), &shared.kernel)?;
    let r = check_fiber_monotonicity(&model, &VerifyConfig::default())?;
    Ok(outcome(r.pass, format!("{} samples: {}", r.samples, r.measured)))
}

fn ground_state(shared: &mut Shared) -> Result<Outcome> {
    let model = EnergyModel::new(&model_spec(8, 1.0), &shared.kernel)?;
    let start = Instant::now();
    let first = solve_ground_state(&model, &SolveConfig::default())?;
    let elapsed = start.elapsed();
    let second = solve_ground_state(
        &model,
        &SolveConfig {
            seed: 1234,
            ..SolveConfig::default()
        },
    )?;
    let el = euler_lagrange_residual(&model, &first.solution)?.max_abs();
    let max_u = first.solution.max_abs();
    let seed_gap = (first.energy - second.energy).abs() / first.energy;
    let pass = first.converged
        && second.converged
        && first.residual < 1e-8
        && first.nehari_defect < 1e-8
        && elapsed < Duration::from_secs(300)
        && seed_gap < 1e-6
        && el < 1e-6 * max_u;
    let detail = format!(
        "c = {:.10e}, residual {:.2e}, nehari defect {:.2e}, seeds differ by {seed_gap:.1e}, EL/max|u| = {:.1e}, {} iterations in {elapsed:.2?}",
        first.energy,
        first.residual,
        first.nehari_defect,
        el / max_u,
        first.iterations
    );
    shared.solved = Some(first);
    Ok(outcome(pass, detail))
}

fn level_identity(shared: &Shared) -> Result<Outcome> {
    let Some(solved) = &shared.solved else {
        return Ok(outcome(false, "no ground state from the solve criterion"));
    };
    let model = EnergyModel::new(&model_spec(8, 1.0), &shared.kernel)?;
    let r = check_level_identity(&model, solved, &VerifyConfig::default())?;
    let own = fiber_coefficients(&model, &solved.solution)?;
    let top = own.energy_at(nehari_scale(&own, 1.0, 1e-10)?, 1.0);
    let pass = r.pass && (top - solved.energy).abs() <= 1e-6 * solved.energy && solved.energy > 0.0;
    Ok(outcome(pass, r.measured))
}

fn mountain_pass(shared: &Shared) -> Result<Outcome> {
    let model = EnergyModel::new(&model_spec(8, 1.0), &shared.kernel)?;
    let r = check_mountain_pass_geometry(&model, &VerifyConfig::default())?;
    Ok(outcome(r.pass, format!("{} directions: {}", r.samples, r.measured)))
}

fn periodic_mode() -> Result<Outcome> {
    // τ = 2 checkerboard, values 2 and 3
    let table: Vec<f64> = (0..8)
        .map(|i: usize| if (i ^ (i >> 1) ^ (i >> 2)) & 1 == 1 { 3.0 } else { 2.0 })
        .collect();
    let lattice = LatticeBox::periodic(10);
    let spec = ProblemSpec::new(
        1.0,
        1.0,
        1.0,
        PotentialSpec::periodic(2.0, 2, table)?,
        Nonlinearity::power(100.0, 3.0)?,
        lattice,
    )?;
    let kernel = build_kernel(1.0, 10)?;
    let model = EnergyModel::new(&spec, &kernel)?;
    let start = Instant::now();
    let solved = solve_ground_state(&model, &SolveConfig::default())?;
    let elapsed = start.elapsed();
    let r = check_symmetry_and_translation(&model, &solved, &VerifyConfig::default())?;
    let pass = r.pass
        && solved.converged
        && solved.residual < 1e-8
        && solved.nehari_defect < 1e-8
        && elapsed < Duration::from_secs(300);
    Ok(outcome(
        pass,
        format!(
            "radius 10, c = {:.6e}, residual {:.2e}, nehari defect {:.2e}, {}, {elapsed:.2?}",
            solved.energy, solved.residual, solved.nehari_defect, r.measured
        ),
    ))
}

fn b_monotonicity(shared: &Shared) -> Result<Outcome> {
    let mut levels = Vec::new();
    let mut converged = true;
    for b in [0.0, 0.5, 1.0] {
        let model = EnergyModel::new(&model_spec(8, b), &shared.kernel)?;
        let r = solve_ground_state(&model, &SolveConfig::default())?;
        converged &= r.converged;
        levels.push((b, r.energy));
    }
    let monotone = levels.windows(2).all(|w| w[0].1 <= w[1].1 + 1e-6 * w[1].1.abs());
    let table: Vec<String> = levels.iter().map(|(b, c)| format!("c({b}) = {c:.10e}")).collect();
    Ok(outcome(monotone && converged, table.join(", ")))
}

fn box_convergence(shared: &Shared) -> Result<Outcome> {
    let config = VerifyConfig::default();
    let (r, _) = check_box_convergence(&model_spec(10, 1.0), &shared.kernel, &SolveConfig::default(), &config)?;
    Ok(outcome(r.pass, r.measured))
}

fn main() -> ExitCode {
    let total = Instant::now();
    let mut shared = Shared {
        kernel: build_kernel(1.0, 20).expect("alpha = 1 kernel"),
        solved: None,
    };
    type Check = fn(&mut Shared) -> Result<Outcome>;
    let criteria: [(&str, Check); 13] = [
        ("kernel exactness anchors", |_| kernel_anchors()),
        ("kernel cross-method agreement", |_| cross_method()),
        ("kernel decay law", |_| decay_law()),
        ("convolution oracle", |s| convolution_oracle(s)),
        ("gradient correctness", |s| gradient_check(s)),
        ("nehari scale oracles", |_| nehari_oracles()),
        ("fiber monotonicity", |s| fiber_monotonicity(s)),
        ("ground-state solve", ground_state),
        ("level identity", |s| level_identity(s)),
        ("mountain-pass geometry", |s| mountain_pass(s)),
        ("periodic mode", |_| periodic_mode()),
        ("b-monotonicity", |s| b_monotonicity(s)),
        ("box convergence", |s| box_convergence(s)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check(&mut shared).unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        if !result.pass {
            failures += 1;
        }
        println!(
            "{} {:>2} {:<30} {} [{:.1?}]",
            if result.pass { "PASS" } else { "FAIL" },
            i + 1,
            name,
            result.detail,
            start.elapsed()
        );
    }
    println!(
        "{} of {} criteria passed in {:.1?}",
        criteria.len() - failures,
        criteria.len(),
        total.elapsed()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
