mod common;

use std::f64::consts::PI;

use leafwise_core::cohomology::*;
use leafwise_core::groupoid::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn derivative_of_sine() {
    let s = FiberedGSpace::single_torus(1, 16).unwrap();
    let f = FoliatedForm::from_fn(&s, 0, |_, z| {
        vec![Complex64::new((2.0 * PI * z[0]).sin(), 0.0)]
    })
    .unwrap();
    let df = f.d_leafwise().unwrap();
    let want = FoliatedForm::from_fn(&s, 1, |_, z| {
        vec![Complex64::new(2.0 * PI * (2.0 * PI * z[0]).cos(), 0.0)]
    })
    .unwrap();
    assert!(df.max_abs_diff(&want) < 1e-12);
}

#[test]
fn area_cocycle_lambda_is_volume_form() {
    let s = FiberedGSpace::single_torus(2, 8).unwrap();
    let l = van_est_lambda(&ASCochain::area(), &s).unwrap();
    let one = FoliatedForm::from_fn(&s, 2, |_, _| vec![Complex64::new(1.0, 0.0)]).unwrap();
    assert!(l.max_abs_diff(&one) < 1e-14);
}

#[test]
fn area_cocycle_is_closed_near_diagonal() {
    let a = ASCochain::area();
    let d = a.d_as();
    let pts = vec![
        vec![0.98, 0.01],
        vec![0.02, 0.97],
        vec![0.99, 0.03],
        vec![0.005, 0.995],
    ];
    assert!(d.eval(&pts).unwrap().norm() < 1e-15);
    let tri = vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![0.0, 0.1]];
    assert!((a.eval(&tri).unwrap().re - 0.005).abs() < 1e-15);
}

#[test]
fn integral_of_sin_squared_over_quotient() {
    // ∫_{T²/(Z/2)} sin²(2πx) dx dy = ½ · ½
    let s = common::half_shift(8);
    let c = compute_cutoff(&s, Seed::Uniform).unwrap();
    let f = FoliatedForm::from_fn(&s, 2, |_, z| {
        vec![Complex64::new((2.0 * PI * z[0]).sin().powi(2), 0.0)]
    })
    .unwrap();
    let v = integrate_invariant(&f, &s, &c, &TransversalDensity::uniform(1), 1e-10).unwrap();
    assert!((v.re - 0.25).abs() < 1e-14 && v.im.abs() < 1e-15);
}

#[test]
fn non_invariant_integrand_rejected() {
    let s = common::half_shift(8);
    let c = compute_cutoff(&s, Seed::Uniform).unwrap();
    let f = FoliatedForm::from_fn(&s, 2, |_, z| {
        vec![Complex64::new((2.0 * PI * z[0]).sin(), 0.0)]
    })
    .unwrap();
    let res = integrate_invariant(&f, &s, &c, &TransversalDensity::uniform(1), 1e-10);
    assert!(matches!(
        res,
        Err(leafwise_core::Error::NotInvariant { .. })
    ));
}

#[test]
fn invariant_betti_numbers() {
    let torus = FiberedGSpace::single_torus(2, 8).unwrap();
    assert_eq!(
        invariant_cohomology_ranks(&torus, 2).unwrap(),
        vec![1, 2, 1]
    );
    assert_eq!(
        invariant_cohomology_ranks(&common::half_shift(8), 2).unwrap(),
        vec![1, 2, 1]
    );
    assert_eq!(
        invariant_cohomology_ranks(&common::flip(8), 2).unwrap(),
        vec![1, 0, 1]
    );
    assert_eq!(
        invariant_cohomology_ranks(&common::swap_two_points(8), 1).unwrap(),
        vec![1, 2, 1]
    );
}

#[test]
fn finite_groupoid_cohomology_is_orbit_functions() {
    let g = FiniteGroup::cyclic(2);
    let gp = GroupoidModel::action(&g, &[vec![0, 1, 2], vec![1, 0, 2]]).unwrap();
    assert_eq!(groupoid_cohomology_dims(&gp, 3).unwrap(), vec![2, 0, 0, 0]);
    for p in 0..3 {
        let d2 = groupoid_differential(&gp, p + 1) * groupoid_differential(&gp, p);
        assert!(d2.amax() < 1e-15);
    }
}

#[test]
fn degree0_van_est_is_pullback() {
    let s = common::swap_two_points(4);
    let f = van_est_degree0(&[1.5, 1.5], &s).unwrap();
    assert!(f.invariance_defect(&s).unwrap() < 1e-15);
    let f = van_est_degree0(&[1.0, 2.0], &s).unwrap();
    assert!(f.invariance_defect(&s).unwrap() > 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn d_squared_vanishes(seed in 0u64..1000) {
        let mut rng = common::rng(seed);
        let s = FiberedGSpace::single_torus(2, 12).unwrap();
        let p = common::random_trig(&mut rng, 2, 4, 6);
        let f = FoliatedForm::from_fn(&s, 0, |_, z| vec![p.eval(z)]).unwrap();
        let dd = f.d_leafwise().unwrap().d_leafwise().unwrap();
        prop_assert!(dd.max_abs() < 1e-9);
    }

    #[test]
    fn lambda_is_a_chain_map(seed in 0u64..1000, k in 0usize..2) {
        let mut rng = common::rng(seed);
        let s = FiberedGSpace::single_torus(2, 16).unwrap();
        let terms = (0..3)
            .map(|_| Term {
                coeff: Complex64::new(1.0, 0.0),
                factors: (0..=k).map(|_| Factor::trig(common::random_trig(&mut rng, 2, 2, 3))).collect(),
            })
            .collect();
        let phi = ASCochain::from_terms(2, k, terms).unwrap();
        let lhs = van_est_lambda(&phi.d_as(), &s).unwrap();
        let rhs = van_est_lambda(&phi, &s).unwrap().d_leafwise().unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-9 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn d_as_squared_vanishes(seed in 0u64..1000) {
        let mut rng = common::rng(seed);
        let terms = (0..2)
            .map(|_| Term { coeff: Complex64::new(1.0, 0.0), factors: (0..2).map(|_| Factor::trig(common::random_trig(&mut rng, 2, 2, 2))).collect() })
            .collect();
        let phi = ASCochain::from_terms(2, 1, terms).unwrap();
        let dd = phi.d_as().d_as();
        let pts: Vec<Vec<f64>> = (0..4).map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
        prop_assert!(dd.eval(&pts).unwrap().norm() < 1e-12);
    }

    #[test]
    fn projection_idempotent_and_commutes_with_d(seed in 0u64..1000) {
        let mut rng = common::rng(seed);
        for s in [common::half_shift(8), common::flip(8), common::swap_two_points(8)] {
            let p = common::random_trig(&mut rng, 2, 3, 5);
            let f = FoliatedForm::from_fn(&s, 0, |x, z| vec![p.eval(z) * (1.0 + x as f64)]).unwrap();
            let pf = f.invariant_project(&s).unwrap();
            prop_assert!(pf.invariant_project(&s).unwrap().max_abs_diff(&pf) < 1e-12);
            prop_assert!(pf.invariance_defect(&s).unwrap() < 1e-12);
            let a = pf.d_leafwise().unwrap();
            let b = f.d_leafwise().unwrap().invariant_project(&s).unwrap();
            prop_assert!(a.max_abs_diff(&b) < 1e-9);
        }
    }

    #[test]
    fn stokes_for_invariant_exact_forms(seed in 0u64..1000) {
        let mut rng = common::rng(seed);
        let s = common::swap_two_points(8);
        let c = compute_cutoff(&s, Seed::Uniform).unwrap();
        let p = common::random_trig(&mut rng, 2, 3, 4);
        let q = common::random_trig(&mut rng, 2, 3, 4);
        let f = FoliatedForm::from_fn(&s, 1, |_, z| vec![p.eval(z), q.eval(z)]).unwrap().invariant_project(&s).unwrap();
        let v = integrate_invariant(&f.d_leafwise().unwrap(), &s, &c, &TransversalDensity::uniform(2), 1e-9).unwrap();
        prop_assert!(v.norm() < 1e-10);
    }
}
