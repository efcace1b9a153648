mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use leafwise_core::calculus::*;
use leafwise_core::cohomology::*;
use leafwise_core::groupoid::*;
use leafwise_core::linalg::CMat;
use leafwise_core::pairing::*;
use leafwise_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn dolbeault_class(space: &FiberedGSpace, d: i64, n: usize, heat: Option<f64>, eps: Option<f64>) -> IndexIdempotent {
    let op = LeafwiseOperatorFamily::dolbeault(space.clone(), d, n).unwrap();
    let par = parametrix(&op, heat).unwrap();
    index_idempotent(&op, &par, eps).unwrap()
}

fn setup(space: &FiberedGSpace) -> (CutoffDensity, TransversalDensity) {
    (compute_cutoff(space, Seed::Uniform).unwrap(), TransversalDensity::uniform(space.n_base()))
}

#[test]
fn area_cocycle_pairs_to_minus_i_over_two_pi() {
    let s = FiberedGSpace::single_torus(2, 66).unwrap();
    let (cut, om) = setup(&s);
    let p = dolbeault_class(&s, 0, 32, None, None);
    let v = pair_cocycle(&ASCochain::area(), &p, &s, &cut, &om).unwrap();
    assert!((v - Complex64::new(0.0, -1.0 / (2.0 * PI))).norm() < 1e-8, "{v}");
}

#[test]
fn degree_zero_pairing_is_index() {
    let s = FiberedGSpace::single_torus(2, 10).unwrap();
    let (cut, om) = setup(&s);
    for d in [-2, 1] {
        let p = dolbeault_class(&s, d, 4, None, None);
        let v = pair_cocycle(&ASCochain::constant(2), &p, &s, &cut, &om).unwrap();
        assert!((v - c(d as f64)).norm() < 1e-8);
    }
}

#[test]
fn trivial_class_pairs_to_zero() {
    let s = FiberedGSpace::single_torus(2, 20).unwrap();
    let (cut, om) = setup(&s);
    let op = LeafwiseOperatorFamily::multiplier(s.clone(), 8, 1, 1, 2.0, |_, nu| {
        CMat::from_element(1, 1, c(1.0 + (nu[0] * nu[0] + nu[1] * nu[1]) as f64))
    })
    .unwrap();
    let p = index_idempotent(&op, &parametrix(&op, Some(40.0)).unwrap(), None).unwrap();
    for phi in [ASCochain::constant(2), ASCochain::area()] {
        assert!(pair_cocycle(&phi, &p, &s, &cut, &om).unwrap().norm() < 1e-12);
    }
}

#[test]
fn odd_cochains_are_rejected() {
    let s = FiberedGSpace::single_torus(2, 8).unwrap();
    let (cut, om) = setup(&s);
    let p = dolbeault_class(&s, 1, 3, None, None);
    let psi = ASCochain::from_terms(2, 1, vec![Term { coeff: c(1.0), factors: vec![Factor::one(2), Factor::coord(2, 0)] }]).unwrap();
    assert!(matches!(pair_cocycle(&psi, &p, &s, &cut, &om), Err(Error::Degree(_))));
}

#[test]
fn heat_time_homotopy_leaves_pairing_fixed() {
    let s = FiberedGSpace::single_torus(2, 66).unwrap();
    let (cut, om) = setup(&s);
    let a = dolbeault_class(&s, 0, 32, None, None);
    let t = a_heat(&s, 32);
    let b = dolbeault_class(&s, 0, 32, Some(0.5 * t), None);
    let va = pair_cocycle(&ASCochain::area(), &a, &s, &cut, &om).unwrap();
    let vb = pair_cocycle(&ASCochain::area(), &b, &s, &cut, &om).unwrap();
    assert!((va - vb).norm() < 1e-8, "{va} vs {vb}");
}

fn a_heat(s: &FiberedGSpace, n: usize) -> f64 {
    default_heat_time(&LeafwiseOperatorFamily::dolbeault(s.clone(), 0, n).unwrap())
}

#[test]
fn localization_does_not_change_pairing() {
    let s = FiberedGSpace::single_torus(2, 66).unwrap();
    let (cut, om) = setup(&s);
    let wide = dolbeault_class(&s, 0, 32, None, Some(0.6));
    let narrow = dolbeault_class(&s, 0, 32, None, Some(0.3));
    let a = pair_cocycle_within(&ASCochain::area(), &wide, &s, &cut, &om, Some(0.3)).unwrap();
    let b = pair_cocycle_within(&ASCochain::area(), &narrow, &s, &cut, &om, Some(0.3)).unwrap();
    assert!((a - b).norm() < 1e-8, "{a} vs {b}");
}

fn random_one_cochain(seed: u64) -> ASCochain {
    let mut r = common::rng(seed);
    let terms = (0..2)
        .map(|_| Term {
            coeff: c(1.0),
            factors: vec![
                Factor::trig(common::random_trig(&mut r, 2, 1, 3)),
                Factor::trig(common::random_trig(&mut r, 2, 1, 3)),
            ],
        })
        .collect();
    ASCochain::from_terms(2, 1, terms).unwrap()
}

fn grassmann(n: usize, entries: &[(usize, f64)]) -> Grassmann {
    let mut g = Grassmann::zero(n);
    for (m, v) in entries {
        g.c[*m] = c(*v);
    }
    g
}

#[test]
fn a_hat_series_coefficients() {
    let b = a_hat_log_coefficients(3);
    assert!((b[0] + 1.0 / 24.0).abs() < 1e-16);
    assert!((b[1] - 1.0 / 2880.0).abs() < 1e-18);
    assert!((b[2] + 1.0 / 181440.0).abs() < 1e-20);
    // single root x = e0e1 + e2e3 + e4e5 + e6e7, x² = 2(...), x⁴ = 24 e0…e7
    let x = grassmann(8, &[(0b11, 1.0), (0b1100, 1.0), (0b110000, 1.0), (0b11000000, 1.0)]);
    let a = a_hat_from_roots(&[x.clone()], 8).unwrap();
    let x2 = x.wedge(&x);
    let x4 = x2.wedge(&x2);
    let want = Grassmann::one(8).add(&x2.scale(c(-1.0 / 24.0))).add(&x4.scale(c(7.0 / 5760.0)));
    assert!(a.form.sub(&want).max_abs() < 1e-15);
}

#[test]
fn a_hat_multiplies_over_roots() {
    let x = grassmann(8, &[(0b11, 1.0), (0b110000, 0.5)]);
    let y = grassmann(8, &[(0b1100, 2.0), (0b11000000, -1.0)]);
    let both = a_hat_from_roots(&[x.clone(), y.clone()], 8).unwrap();
    let ax = a_hat_from_roots(&[x], 8).unwrap();
    let ay = a_hat_from_roots(&[y], 8).unwrap();
    assert!(both.form.sub(&ax.form.wedge(&ay.form)).max_abs() < 1e-15);
}

#[test]
fn flat_curvature_gives_unit_a_hat() {
    let a = a_hat_form(&FormMatrix::zero(4, 2), 4).unwrap();
    assert!(a.form.sub(&Grassmann::one(4)).max_abs() == 0.0);
    let mut bad = FormMatrix::zero(4, 2);
    bad.set(0, 1, grassmann(4, &[(0b11, 1.0)]));
    assert!(matches!(a_hat_form(&bad, 4), Err(Error::Parameter(_))));
}

#[test]
fn curvature_rotation_a_hat() {
    // Θ = [[0, θ], [−θ, 0]] with θ = 2π(e0e1 + e2e3) has Chern root x = e0e1 + e2e3
    let t = grassmann(4, &[(0b11, 2.0 * PI), (0b1100, 2.0 * PI)]);
    let mut th = FormMatrix::zero(4, 2);
    th.set(0, 1, t.clone());
    th.set(1, 0, t.scale(c(-1.0)));
    let a = a_hat_form(&th, 4).unwrap();
    let x = grassmann(4, &[(0b11, 1.0), (0b1100, 1.0)]);
    let want = Grassmann::one(4).add(&x.wedge(&x).scale(c(-1.0 / 24.0)));
    assert!(a.form.sub(&want).max_abs() < 1e-14);
}

fn sample_projector(z: &[f64], xi: &[f64], d: i64) -> (CMat, Vec<CMat>) {
    graph_projector(&SymbolClass::TwistedDolbeault { degree: d }, &CotangentModel::for_cutoff(4), z, xi).unwrap()
}

#[test]
fn chern_character_rank_and_additivity() {
    let kappa = Complex64::new(0.0, 1.0 / (2.0 * PI));
    let (p, dp) = sample_projector(&[0.1, 0.7], &[0.4, -0.3], 1);
    let (q, dq) = sample_projector(&[0.1, 0.7], &[0.4, -0.3], -2);
    let chp = chern_character_form(&p, &dp, kappa, None).unwrap();
    let chq = chern_character_form(&q, &dq, kappa, None).unwrap();
    assert!((chp.scalar_part() - c(2.0)).norm() < 1e-12);
    let sum = leafwise_core::linalg::blocks(&p, &CMat::zeros(4, 4), &CMat::zeros(4, 4), &q);
    let dsum: Vec<CMat> = dp.iter().zip(&dq).map(|(a, b)| leafwise_core::linalg::blocks(a, &CMat::zeros(4, 4), &CMat::zeros(4, 4), b)).collect();
    let chs = chern_character_form(&sum, &dsum, kappa, None).unwrap();
    assert!(chs.form.sub(&chp.form.add(&chq.form)).max_abs() < 1e-12);
    let skew = &p + CMat::from_element(4, 4, c(1e-3));
    assert!(matches!(chern_character_form(&skew, &dp, kappa, None), Err(Error::NotIdempotent { .. })));
}

#[test]
fn chern_character_is_closed() {
    // dω for the degree-two part of ch on (z, ξ), by central differences
    let kappa = Complex64::new(0.0, 1.0 / (2.0 * PI));
    let y0 = [0.23, 0.61, 0.8, -0.5];
    let two = |y: &[f64]| {
        let (p, dp) = sample_projector(&y[..2], &y[2..], 1);
        chern_character_form(&p, &dp, kappa, None).unwrap().degree_part(2)
    };
    let h = 1e-4;
    let partial = |j: usize| {
        let (mut a, mut b) = (y0, y0);
        a[j] += h;
        b[j] -= h;
        two(&a).sub(&two(&b)).scale(c(0.5 / h))
    };
    let parts: Vec<Grassmann> = (0..4).map(partial).collect();
    let mut d = Grassmann::zero(4);
    for (j, pj) in parts.iter().enumerate() {
        d = d.add(&Grassmann::generator(4, j).wedge(pj));
    }
    let scale = two(&y0).max_abs();
    assert!(d.max_abs() < 1e-6 * scale.max(1.0), "{}", d.max_abs());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn coboundaries_pair_to_zero(seed in 0u64..1000) {
        let s = FiberedGSpace::single_torus(2, 10).unwrap();
        let (cut, om) = setup(&s);
        let p = dolbeault_class(&s, 1, 4, None, None);
        let v = pair_cocycle(&random_one_cochain(seed).d_as(), &p, &s, &cut, &om).unwrap();
        prop_assert!(v.norm() < 1e-8, "{}", v);
    }
}

fn one_form(space: &FiberedGSpace) -> FoliatedForm {
    FoliatedForm::from_fn(space, 0, |_, _| vec![c(1.0)]).unwrap()
}

fn bump_cutoff(space: &FiberedGSpace) -> CutoffDensity {
    let seed: FiberFn = Arc::new(|_, z: &[f64]| 1.0 + 0.7 * (2.0 * PI * z[0]).sin() * (2.0 * PI * z[1]).cos());
    compute_cutoff(space, Seed::Function(seed)).unwrap()
}

#[test]
fn calibration_constant_is_i_over_two_pi() {
    let k = default_calibration().unwrap().kappa;
    assert!((k - Complex64::new(0.0, 1.0 / (2.0 * PI))).norm() < 1e-7 / (2.0 * PI));
}

#[test]
fn twisted_dolbeault_topological_predictions() {
    let s = FiberedGSpace::single_torus(2, 8).unwrap();
    let (cut, om) = setup(&s);
    let cal = default_calibration().unwrap();
    let opts = TopologicalOptions::default();
    for d in [-1, 2] {
        let sym = SymbolClass::TwistedDolbeault { degree: d };
        let v = topological_index(&one_form(&s), &sym, &CotangentModel::for_cutoff(8), &s, &cut, &om, &cal, &opts).unwrap();
        assert!((v - c(d as f64)).norm() < 1e-6, "d = {d}: {v}");
    }
}

#[test]
fn quotient_integral_matches_cutoff_integral() {
    let s = common::half_shift(8);
    let (cut, om) = setup(&s);
    let cal = default_calibration().unwrap();
    let opts = TopologicalOptions::default();
    let sym = SymbolClass::TwistedDolbeault { degree: 2 };
    let model = CotangentModel::for_cutoff(8);
    let a = topological_index(&one_form(&s), &sym, &model, &s, &cut, &om, &cal, &opts).unwrap();
    let b = topological_index(&one_form(&s), &sym, &model, &s, &bump_cutoff(&s), &om, &cal, &opts).unwrap();
    let q = free_action_reduction(&one_form(&s), &sym, &model, &s, &om, &cal, &opts).unwrap();
    assert!((a - c(1.0)).norm() < 1e-6, "{a}");
    assert!((a - b).norm() < 1e-8, "{a} vs {b}");
    assert!((a - q).norm() < 1e-8, "{a} vs {q}");
}

#[test]
fn topological_side_input_checks() {
    let cal = default_calibration().unwrap();
    let opts = TopologicalOptions::default();
    let model = CotangentModel::for_cutoff(4);
    let sym = SymbolClass::TwistedDolbeault { degree: 1 };
    let flip = common::flip(6);
    let om = TransversalDensity::uniform(1);
    assert!(matches!(
        free_action_reduction(&one_form(&flip), &sym, &model, &flip, &om, &cal, &opts),
        Err(Error::NotFree(_))
    ));
    let s = FiberedGSpace::single_torus(2, 6).unwrap();
    let (cut1, om1) = setup(&s);
    let wavy = FoliatedForm::from_fn(&s, 0, |_, z| vec![c((2.0 * PI * z[0]).cos())]).unwrap();
    assert!(matches!(
        topological_index(&wavy, &sym, &model, &s, &cut1, &om1, &cal, &opts),
        Err(Error::NotClosed { .. })
    ));
    let shifted = common::half_shift(6);
    let odd = FoliatedForm::from_fn(&shifted, 2, |_, z| vec![c(1.0 + (2.0 * PI * z[0]).cos())]).unwrap();
    let (cut2, om2) = setup(&shifted);
    assert!(matches!(
        topological_index(&odd, &sym, &model, &shifted, &cut2, &om2, &cal, &opts),
        Err(Error::NotInvariant { .. })
    ));
    // half shift does not preserve a degree-one line bundle
    assert!(matches!(
        free_action_reduction(&one_form(&shifted), &sym, &model, &shifted, &om2, &cal, &opts),
        Err(Error::NotInvariant { .. })
    ));
}

#[test]
fn orbifold_family_both_sides() {
    let g = FiniteGroup::cyclic(2);
    let maps = [
        AffineMap::identity(2),
        AffineMap::translation(vec![num_rational::Rational64::new(1, 2), num_rational::Rational64::from_integer(0)]),
    ];
    let s = FiberedGSpace::from_group_action(BaseModel::uniform(4), &g, &[vec![0, 1, 2, 3], vec![1, 0, 2, 3]], &maps, TorusGrid::new(2, 8).unwrap()).unwrap();
    let cut = compute_cutoff(&s, Seed::Uniform).unwrap();
    // every point carries base cut-off ½, so Ω = ½ gives the quotient mass one
    let om = TransversalDensity::new(vec![0.5; 4]).unwrap();
    assert!((base_cutoff(&s).iter().map(|v| v * 0.5).sum::<f64>() - 1.0).abs() < 1e-15);
    let op = LeafwiseOperatorFamily::dolbeault(s.clone(), 2, 6).unwrap();
    let f = family_index_orbifold(&op, &SymbolClass::TwistedDolbeault { degree: 2 }, &CotangentModel::for_cutoff(6), &cut, &om, &default_calibration().unwrap(), &TopologicalOptions::default()).unwrap();
    assert_eq!(f.per_point, vec![2; 4]);
    assert_eq!(f.kernel_cokernel, vec![(2, 0); 4]);
    assert!((f.chern_integral - 2.0).abs() < 1e-12);
    assert!(f.difference() < 1e-6, "{f:?}");
}

#[test]
fn family_rank_jump_is_rejected() {
    let s = FiberedGSpace::new(BaseModel::uniform(2), GroupoidModel::trivial(2), TorusGrid::new(1, 8).unwrap(), vec![AffineMap::identity(1); 2]).unwrap();
    let op = LeafwiseOperatorFamily::multiplier(s.clone(), 3, 1, 1, 1.0, |x, nu| {
        CMat::from_element(1, 1, Complex64::new(x as f64, 2.0 * PI * nu[0] as f64))
    })
    .unwrap();
    let sym = SymbolClass::Polynomial(PolySymbol::new(1, 1, vec![(vec![1], CMat::from_element(1, 1, Complex64::new(0.0, 2.0 * PI)))]).unwrap());
    let (cut, om) = setup(&s);
    let r = family_index_orbifold(&op, &sym, &CotangentModel::for_cutoff(3), &cut, &om, &default_calibration().unwrap(), &TopologicalOptions::default());
    assert!(matches!(r, Err(Error::RankJump(_))), "{r:?}");
}

#[test]
fn connection_choice_does_not_change_topological_side() {
    let s = FiberedGSpace::single_torus(2, 4).unwrap();
    let (cut, om) = setup(&s);
    let cal = default_calibration().unwrap();
    let m = CMat::from_fn(4, 4, |i, j| Complex64::new(0.3 * (i as f64 - j as f64), 0.1 * (i + j) as f64));
    let conn: ConnectionFn = Arc::new(move |z: &[f64], xi: &[f64]| {
        let g = (-(xi[0] * xi[0] + xi[1] * xi[1]) / 4.0).exp();
        let a = (2.0 * PI * z[0]).sin();
        let da = 2.0 * PI * (2.0 * PI * z[0]).cos();
        let dg = [0.0, 0.0, -xi[0] / 2.0 * g, -xi[1] / 2.0 * g];
        let zero = CMat::zeros(4, 4);
        let omega = vec![&m * c(a * g), zero.clone(), &m * c(g), zero.clone()];
        let d_omega = (0..4)
            .map(|j| {
                let dj = if j == 0 { da * g } else { a * dg[j] };
                vec![&m * c(dj), zero.clone(), &m * c(dg[j]), zero.clone()]
            })
            .collect();
        ConnectionForm { omega, d_omega }
    });
    let opts = TopologicalOptions { z_per_band: 32, radial: 32, ..TopologicalOptions::default() };
    let sym = SymbolClass::TwistedDolbeault { degree: 1 };
    let model = CotangentModel::for_cutoff(4);
    let a = topological_index(&one_form(&s), &sym, &model, &s, &cut, &om, &cal, &opts).unwrap();
    let b = topological_index(&one_form(&s), &sym, &model, &s, &cut, &om, &cal, &TopologicalOptions { connection: Some(conn), ..opts }).unwrap();
    assert!((a - b).norm() < 1e-8 * a.norm(), "{a} vs {b}");
}
