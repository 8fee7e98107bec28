use lattice_kc::field_io;
use lattice_kc::solver::{canonical_shift, euler_lagrange_residual, solve_from};
use lattice_kc::*;

fn coercive(radius: usize, b: f64) -> (ProblemSpec, GreenKernel) {
    let spec = ProblemSpec::new(
        1.0,
        b,
        1.0,
        PotentialSpec::coercive(1.0, Index3::ORIGIN, 1.0, 2.0).unwrap(),
        Nonlinearity::power(1.0, 3.0).unwrap(),
        LatticeBox::dirichlet(radius),
    )
    .unwrap();
    (spec, build_kernel(1.0, 2 * radius).unwrap())
}

#[test]
fn converged_state_satisfies_the_equation() {
    let (spec, kernel) = coercive(6, 1.0);
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    let r = solve_ground_state(&model, &SolveConfig::default()).unwrap();
    assert!(r.converged, "residual {:e}", r.residual);
    assert!(r.residual <= 1e-8);
    assert!(r.nehari_defect <= 1e-8);
    assert!(r.energy > 0.0);
    assert!(r.h_residual.is_finite() && r.h_residual <= r.residual);

    let el = euler_lagrange_residual(&model, &r.solution).unwrap();
    assert!(el.max_abs() <= 1e-6 * r.solution.max_abs());
    assert!((el.max_abs() - r.euler_lagrange).abs() <= 1e-9 * r.solution.max_abs());

    // η bounds
    assert!(r.norm > 0.9 * r.eta_estimate, "{} vs {}", r.norm, r.eta_estimate);
    assert!(r.energy >= r.level_lower_bound(spec.nonlinearity.theta()));

    // energy history is nonincreasing up to roundoff
    for w in r.history.windows(2) {
        assert!(w[1].energy <= w[0].energy + 1e-12 * w[0].energy.abs());
    }
    assert!(r.history_csv().starts_with("iteration,energy,residual,s_u\n"));
    assert!(r.to_text(&spec).contains("converged"));
}

#[test]
fn seeds_and_initial_guesses_reach_the_same_level() {
    let (spec, kernel) = coercive(6, 1.0);
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    let levels: Vec<f64> = [
        SolveConfig::default(),
        SolveConfig {
            seed: 7,
            ..SolveConfig::default()
        },
        SolveConfig {
            seed: 3,
            initial_guess: InitialGuess::Random,
            ..SolveConfig::default()
        },
    ]
    .iter()
    .map(|c| {
        let r = solve_ground_state(&model, c).unwrap();
        assert!(r.converged);
        r.energy
    })
    .collect();
    for c in &levels[1..] {
        assert!((c - levels[0]).abs() <= 1e-6 * levels[0], "{levels:?}");
    }
}

#[test]
fn fixed_seed_is_reproducible() {
    let (spec, kernel) = coercive(5, 1.0);
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    let a = solve_ground_state(&model, &SolveConfig::default()).unwrap();
    let b = solve_ground_state(&model, &SolveConfig::default()).unwrap();
    assert!((a.energy - b.energy).abs() <= 1e-12 * a.energy);
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn small_kirchhoff_coefficient_perturbs_the_level_slightly() {
    let (spec0, kernel) = coercive(5, 0.0);
    let c0 = solve_ground_state(&EnergyModel::new(&spec0, &kernel).unwrap(), &SolveConfig::default()).unwrap();
    let spec1 = ProblemSpec { b: 1e-4, ..spec0 };
    let c1 = solve_ground_state(&EnergyModel::new(&spec1, &kernel).unwrap(), &SolveConfig::default()).unwrap();
    assert!(c0.converged && c1.converged);
    assert!(c1.energy >= c0.energy - 1e-6 * c0.energy);
    assert!((c1.energy - c0.energy).abs() / c0.energy < 1e-2);
}

#[test]
fn iteration_cap_is_flagged() {
    let (spec, kernel) = coercive(4, 1.0);
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    let config = SolveConfig {
        max_iterations: 2,
        ..SolveConfig::default()
    };
    let r = solve_ground_state(&model, &config).unwrap();
    assert!(!r.converged);
    assert!(r.iterations <= 2);
}

#[test]
fn restart_from_a_saved_solution() {
    let (spec, kernel) = coercive(4, 1.0);
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    let r = solve_ground_state(&model, &SolveConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.field");
    field_io::save_text(&r.solution, &path).unwrap();
    let config = SolveConfig {
        initial_guess: InitialGuess::File(path),
        ..SolveConfig::default()
    };
    let again = solve_ground_state(&model, &config).unwrap();
    assert!(again.converged);
    assert!(again.iterations <= 2, "{} iterations", again.iterations);
    assert!((again.energy - r.energy).abs() <= 1e-10 * r.energy);

    let wrong_box = SolveConfig {
        initial_guess: InitialGuess::File(dir.path().join("missing.field")),
        ..SolveConfig::default()
    };
    assert!(solve_ground_state(&model, &wrong_box).is_err());
    assert!(solve_from(&model, &Field::zeros(spec.lattice), &SolveConfig::default()).is_err());
}

#[test]
fn periodic_solution_is_centred() {
    let table = vec![2.0, 3.0, 3.0, 2.0, 3.0, 2.0, 2.0, 3.0];
    let spec = ProblemSpec::new(
        1.0,
        1.0,
        1.0,
        PotentialSpec::periodic(2.0, 2, table).unwrap(),
        Nonlinearity::power(100.0, 3.0).unwrap(),
        LatticeBox::periodic(6),
    )
    .unwrap();
    let kernel = build_kernel(1.0, 6).unwrap();
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    let r = solve_ground_state(&model, &SolveConfig::default()).unwrap();
    assert!(r.converged);
    let peak = r.solution.argmax_abs();
    assert!(peak.max_abs() <= 1, "peak at {peak}");
    assert_eq!(canonical_shift(&r.solution, 2), Index3::ORIGIN);
}
