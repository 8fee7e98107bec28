use lattice_kc::nehari::{
    mountain_pass_level_check, nehari_defect, reduced_gradient, sphere_inverse, SpherePoint,
};
use lattice_kc::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coeffs(norm_h2: f64, gradient: f64, d: f64, p: f64) -> FiberCoefficients {
    FiberCoefficients {
        norm_h2,
        gradient,
        d,
        b_choquard: d / p,
        exponent: p,
    }
}

fn setup(radius: usize, b: f64) -> (ProblemSpec, GreenKernel) {
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

fn positive_field(lattice: LatticeBox, rng: &mut ChaCha8Rng) -> Field {
    Field::from_fn(lattice, |_| rng.gen_range(0.0..1.0))
}

/// Gaussian bump with multiplicative noise, the shape the solver works with.
fn bump(lattice: LatticeBox, rng: &mut ChaCha8Rng) -> Field {
    let width = rng.gen_range(1.0..2.0);
    Field::from_fn(lattice, |x| {
        let r2 = (x.0[0] * x.0[0] + x.0[1] * x.0[1] + x.0[2] * x.0[2]) as f64;
        (-r2 / (2.0 * width * width)).exp() * (1.0 + 0.3 * rng.gen_range(-1.0..1.0))
    })
}

#[test]
fn closed_form_scales_without_kirchhoff_term() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let (n, a, d) = (rng.gen_range(0.1..10.0), rng.gen_range(0.0..10.0), rng.gen_range(0.1..10.0));
        let p = rng.gen_range(2.05..6.0);
        let s = nehari_scale(&coeffs(n, a, d, p), 0.0, 1e-12).unwrap();
        let exact = (n / d).powf(1.0 / (2.0 * p - 2.0));
        assert!((s - exact).abs() <= 1e-12 * exact, "{s} vs {exact}");
    }
}

#[test]
fn quadratic_formula_for_cubic_nonlinearity() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let (n, a, d) = (rng.gen_range(0.1..10.0), rng.gen_range(0.0..10.0), rng.gen_range(0.1..10.0));
        let b = rng.gen_range(0.01..5.0);
        let s = nehari_scale(&coeffs(n, a, d, 3.0), b, 1e-12).unwrap();
        let ba2 = b * a * a;
        let exact = ((ba2 + (ba2 * ba2 + 4.0 * d * n).sqrt()) / (2.0 * d)).sqrt();
        assert!((s - exact).abs() <= 1e-12 * exact, "{s} vs {exact}");
    }
}

#[test]
fn degenerate_coefficients_are_rejected() {
    assert!(nehari_scale(&coeffs(1.0, 1.0, 0.0, 3.0), 1.0, 1e-12).is_err());
    assert!(nehari_scale(&coeffs(0.0, 1.0, 1.0, 3.0), 1.0, 1e-12).is_err());
    let (spec, kernel) = setup(2, 1.0);
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    assert!(fiber_coefficients(&model, &Field::zeros(spec.lattice)).is_err());
    assert!(sphere_inverse(&model, &Field::zeros(spec.lattice)).is_err());
}

#[test]
fn delta_coefficients() {
    let (spec, kernel) = setup(2, 1.0);
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    let c = fiber_coefficients(&model, &Field::delta(spec.lattice, Index3::ORIGIN, 1.0)).unwrap();
    assert_eq!(c.gradient, 6.0);
    assert_eq!(c.norm_h2, 6.0 + 1.0);
    assert!(c.d > 0.0 && c.b_choquard > 0.0);
    assert!((c.d - 3.0 * c.b_choquard).abs() <= 1e-15 * c.d);
}

#[test]
fn projection_lands_on_the_manifold_and_maximises_the_ray() {
    let (spec, kernel) = setup(4, 1.0);
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let u = bump(spec.lattice, &mut rng);
        let (v, s) = project_to_nehari(&model, &u, 1e-12).unwrap();
        assert!(nehari_defect(&model, &v).unwrap() < 1e-10);
        let top = model.energy(&v).unwrap();
        for k in 1..=16 {
            let t = 0.25 * k as f64;
            assert!(model.energy(&u.scaled(t)).unwrap() <= top * (1.0 + 1e-12));
        }
        // m̂(tu) = m̂(u)
        for t in [0.1, 3.0, 17.0] {
            let (w, _) = project_to_nehari(&model, &u.scaled(t), 1e-12).unwrap();
            let gap = w.add_scaled(-1.0, &v).max_abs() / v.max_abs();
            assert!(gap < 1e-12, "gap {gap:e}");
        }
        // already on the manifold
        let (_, again) = project_to_nehari(&model, &v, 1e-12).unwrap();
        assert!((again - 1.0).abs() < 1e-12, "s = {again} after projecting with {s}");
    }
}

#[test]
fn sphere_round_trips() {
    let (spec, kernel) = setup(3, 0.5);
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let w = sphere_inverse(&model, &positive_field(spec.lattice, &mut rng)).unwrap();
        assert!((model.h_norm(&w).unwrap() - 1.0).abs() < 1e-14);
        let (m, _) = project_to_nehari(&model, &w, 1e-12).unwrap();
        let back = sphere_inverse(&model, &m).unwrap();
        assert!(back.add_scaled(-1.0, &w).max_abs() < 1e-10 * w.max_abs());
        let again = sphere_inverse(&model, &w).unwrap();
        assert!(again.add_scaled(-1.0, &w).max_abs() < 1e-14 * w.max_abs());
    }
}

#[test]
fn reduced_gradient_is_tangent_and_matches_finite_differences() {
    let (spec, kernel) = setup(4, 1.0);
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = 1e-5;
    let psi = |u: &Field| SpherePoint::new(&model, u, 1e-12).unwrap().energy;
    for _ in 0..5 {
        let point = SpherePoint::new(&model, &bump(spec.lattice, &mut rng), 1e-12).unwrap();
        let w = &point.w;
        let r = reduced_gradient(&model, &point).unwrap();
        let radial = model.h_inner(&r.tangent, w).unwrap();
        assert!(radial.abs() < 1e-10 * model.h_norm(&r.tangent).unwrap(), "(r, w) = {radial:e}");

        // unit tangent direction z, (z, w)_H = 0
        let raw = Field::from_fn(spec.lattice, |_| rng.gen_range(-1.0..1.0));
        let z = sphere_inverse(&model, &raw.add_scaled(-model.h_inner(&raw, w).unwrap(), w)).unwrap();
        let fd = (psi(&w.add_scaled(h, &z)) - psi(&w.add_scaled(-h, &z))) / (2.0 * h);
        let exact = model.h_inner(&r.tangent, &z).unwrap();
        assert!((fd - exact).abs() <= 1e-5 * exact.abs(), "{fd} vs {exact}");
        assert!(r.dual_norm() > 0.0);
    }
}

#[test]
fn level_check_is_scale_invariant() {
    let (spec, kernel) = setup(3, 1.0);
    let model = EnergyModel::new(&spec, &kernel).unwrap();
    let u = positive_field(spec.lattice, &mut ChaCha8Rng::seed_from_u64(1));
    let one = mountain_pass_level_check(&model, &[u.clone()], 1e-12).unwrap();
    for t in [0.5, 2.0, 10.0] {
        let v = mountain_pass_level_check(&model, &[u.scaled(t)], 1e-12).unwrap();
        assert!((v - one).abs() <= 1e-12 * one);
    }
    assert!(mountain_pass_level_check(&model, &[], 1e-12).is_err());
}

proptest! {
    #[test]
    fn coefficients_scale_homogeneously(seed in any::<u64>(), s in 0.1f64..5.0) {
        let (spec, kernel) = setup(2, 1.0);
        let model = EnergyModel::new(&spec, &kernel).unwrap();
        let u = positive_field(spec.lattice, &mut ChaCha8Rng::seed_from_u64(seed));
        let c = fiber_coefficients(&model, &u).unwrap();
        let cs = fiber_coefficients(&model, &u.scaled(s)).unwrap();
        let expect = c.scaled(s);
        for (x, y) in [(cs.norm_h2, expect.norm_h2), (cs.gradient, expect.gradient), (cs.d, expect.d), (cs.b_choquard, expect.b_choquard)] {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs());
        }
    }

    #[test]
    fn fiber_root_is_unique_sign_change(n in 0.01f64..100.0, a in 0.0f64..100.0, d in 0.01f64..100.0, b in 0.0f64..3.0, p in 2.05f64..5.0) {
        let c = coeffs(n, a, d, p);
        let s = nehari_scale(&c, b, 1e-12).unwrap();
        prop_assert!(c.phi(0.5 * s, b) > 0.0);
        prop_assert!(c.phi(2.0 * s, b) < 0.0);
        prop_assert!(c.phi(s, b).abs() <= 1e-10 * s * n.max(b * a * a * s * s));
    }
}
