use lattice_kc::kernel::{ConvolutionMethod, Convolver};
use lattice_kc::verify::*;
use lattice_kc::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coercive_spec(radius: usize, c: f64) -> ProblemSpec {
    ProblemSpec::new(
        1.0,
        1.0,
        1.0,
        PotentialSpec::coercive(1.0, Index3::ORIGIN, 1.0, 2.0).unwrap(),
        Nonlinearity::power(c, 3.0).unwrap(),
        LatticeBox::dirichlet(radius),
    )
    .unwrap()
}

fn small_config() -> VerifyConfig {
    VerifyConfig {
        mountain_pass_trials: 20,
        hls_trials: 20,
        hls_radii: vec![3, 4],
        fiber_trials: 4,
        fiber_grid: 20,
        level_samples: 5,
        box_radii: vec![4, 5],
        box_tolerance: 5e-2,
        ..VerifyConfig::default()
    }
}

#[test]
fn small_suite_passes_and_writes_csv() {
    let spec = coercive_spec(4, 1.0);
    let config = small_config();
    let kernel = build_kernel(1.0, suite_table_radius(&spec, &config)).unwrap();
    let (reports, solved) = run_suite(&spec, &kernel, &SolveConfig::default(), &config).unwrap();
    assert!(solved.is_some());
    for r in &reports {
        assert!(r.pass, "{} failed: {:?}", r.name, r.witness);
        assert!(!r.anchor.is_empty());
    }
    let names: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
    for expected in [
        "kernel_integrity",
        "mountain_pass_geometry",
        "hls_inequality",
        "fiber_monotonicity",
        "ground_state_solve",
        "level_identity",
        "octahedral_symmetry",
        "box_convergence",
    ] {
        assert!(names.contains(&expected), "{expected} missing from {names:?}");
    }
    let csv = suite_csv(&reports);
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# sampled evidence, not proof"));
    assert_eq!(lines.next().unwrap(), "name,anchor,samples,pass,measured,tolerance");
    assert_eq!(lines.count(), reports.len());
    assert!(suite_summary(&reports).contains("not proofs"));
}

#[test]
fn suite_is_deterministic() {
    let spec = coercive_spec(3, 1.0);
    let config = VerifyConfig {
        box_radii: vec![2, 3],
        ..small_config()
    };
    let kernel = build_kernel(1.0, suite_table_radius(&spec, &config)).unwrap();
    let (a, _) = run_suite(&spec, &kernel, &SolveConfig::default(), &config).unwrap();
    let (b, _) = run_suite(&spec, &kernel, &SolveConfig::default(), &config).unwrap();
    assert_eq!(a, b);
}

#[test]
fn corrupted_kernel_stops_the_suite() {
    let spec = coercive_spec(3, 1.0);
    let config = small_config();
    let mut kernel = build_kernel(1.0, suite_table_radius(&spec, &config)).unwrap();
    kernel.corrupt_entry(Index3::new(1, 2, 0), 0.5);
    let (reports, solved) = run_suite(&spec, &kernel, &SolveConfig::default(), &config).unwrap();
    assert!(solved.is_none());
    assert_eq!(reports.len(), 1);
    assert!(!reports[0].pass);
    assert!(reports[0].witness.is_some());
}

#[test]
fn mountain_pass_radius_shrinks_with_the_coefficient() {
    let kernel = build_kernel(1.0, 12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let lattice = LatticeBox::dirichlet(6);
    let raw: Vec<Field> = (0..100)
        .map(|_| Field::from_fn(lattice, |_| rng.gen_range(-1.0..1.0)))
        .collect();
    let mut radii = Vec::new();
    for c in [1.0, 10.0, 1e4] {
        let model = EnergyModel::new(&coercive_spec(6, c), &kernel).unwrap();
        let dirs: Vec<Field> = raw
            .iter()
            .map(|u| lattice_kc::nehari::sphere_inverse(&model, u).unwrap())
            .collect();
        let (rho, sigma) = mountain_pass_radius(&model, &dirs).unwrap().unwrap();
        assert!(sigma > 0.0);
        radii.push(rho);
    }
    assert!(radii.windows(2).all(|w| w[1] <= w[0]), "{radii:?}");
    assert!(radii[2] < radii[0], "{radii:?}");
}

#[test]
fn hls_baseline_is_the_kernel_at_the_origin() {
    let kernel = build_kernel(1.0, 8).unwrap();
    let lattice = LatticeBox::dirichlet(4);
    let conv = Convolver::new(&kernel, lattice, ConvolutionMethod::Fft).unwrap();
    let delta = Field::delta(lattice, Index3::new(1, -2, 0), 1.0);
    let q = hls_ratio(&conv, &delta, &delta, 1.0).unwrap();
    assert!((q - kernel.value(Index3::ORIGIN).unwrap()).abs() < 1e-13);
    let u = Field::from_fn(lattice, |x| 1.0 / (1.0 + x.l1() as f64));
    let a = hls_ratio(&conv, &u, &u, 1.0).unwrap();
    let b = hls_ratio(&conv, &u.scaled(2.0), &u.scaled(0.25), 1.0).unwrap();
    assert!((a - b).abs() < 1e-13 * a);
}

#[test]
fn periodic_solution_is_translation_invariant() {
    let table = vec![2.0, 3.0, 3.0, 2.0, 3.0, 2.0, 2.0, 3.0];
    let spec = ProblemSpec::new(
        1.0,
        1.0,
        1.0,
        PotentialSpec::periodic(2.0, 2, table).unwrap(),
        Nonlinearity::power(100.0, 3.0).unwrap(),
        LatticeBox::periodic(8),
    )
    .unwrap();
    let kernel = build_kernel(1.0, 8).unwrap();
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    let solved = solve_ground_state(&model, &SolveConfig::default()).unwrap();
    let r = check_symmetry_and_translation(&model, &solved, &VerifyConfig::default()).unwrap();
    assert_eq!(r.name, "translation_invariance");
    assert!(r.pass, "{}", r.measured);
}

#[test]
fn octahedral_average_is_a_projection() {
    let lattice = LatticeBox::dirichlet(3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u = Field::from_fn(lattice, |_| rng.gen_range(0.0..1.0));
    let once = octahedral_average(&u, Index3::ORIGIN);
    let twice = octahedral_average(&once, Index3::ORIGIN);
    assert!(once.add_scaled(-1.0, &twice).max_abs() < 1e-15);
    let radial = Field::from_fn(lattice, |x| (-(x.euclid().powi(2))).exp());
    assert!(octahedral_average(&radial, Index3::ORIGIN).add_scaled(-1.0, &radial).max_abs() < 1e-15);
}
