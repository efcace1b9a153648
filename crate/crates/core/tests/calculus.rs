mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use leafwise_core::calculus::*;
use leafwise_core::groupoid::*;
use leafwise_core::linalg::CMat;
use leafwise_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn scalar(v: Complex64) -> CMat {
    CMat::from_element(1, 1, v)
}

#[test]
fn twisted_dolbeault_index_is_degree() {
    let s = FiberedGSpace::single_torus(2, 8).unwrap();
    // h⁰ = h¹ = 1 untwisted; otherwise only one side survives
    let dims = [(0, 2), (0, 1), (1, 1), (1, 0), (2, 0)];
    for (d, want) in (-2..=2i64).zip(dims) {
        let op = LeafwiseOperatorFamily::dolbeault(s.clone(), d, 6).unwrap();
        assert_eq!(analytic_index(&op).unwrap(), vec![d]);
        assert_eq!(kernel_cokernel(&op).unwrap()[0], want);
    }
}

#[test]
fn circle_derivative_has_index_zero() {
    let s = FiberedGSpace::single_torus(1, 16).unwrap();
    let op = LeafwiseOperatorFamily::multiplier(s, 6, 1, 1, 1.0, |_, nu| {
        scalar(Complex64::new(0.0, 2.0 * PI * nu[0] as f64))
    })
    .unwrap();
    assert_eq!(analytic_index(&op).unwrap(), vec![0]);
    assert_eq!(kernel_cokernel(&op).unwrap(), vec![(1, 1)]);
}

#[test]
fn rank_gap_is_reported() {
    let s = FiberedGSpace::single_torus(1, 8).unwrap();
    let op = LeafwiseOperatorFamily::multiplier(s, 2, 1, 1, 0.0, |_, nu| {
        scalar(Complex64::new(if nu[0] == 0 { 2e-8 } else { 1.0 }, 0.0))
    })
    .unwrap();
    assert!(matches!(analytic_index(&op), Err(Error::RankGap(_))));
}

fn random_symbol(seed: u64, band: i64) -> SymbolData {
    let mut r = common::rng(seed);
    let t = common::random_trig(&mut r, 2, band, 4);
    let (a, b) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
    SymbolData {
        f: Arc::new(move |_, z, nu| {
            scalar(t.eval(z) * Complex64::new(1.0 + a * nu[0] as f64, b * nu[1] as f64))
        }),
        rows: 1,
        cols: 1,
        order: Some(1.0),
        z_band: band as usize,
    }
}

#[test]
fn quantize_rejects_coarse_grid() {
    let s = FiberedGSpace::single_torus(2, 8).unwrap();
    let a = random_symbol(1, 2);
    assert!(matches!(quantize(&a, &s, 3), Err(Error::BandLimit(_))));
}

#[test]
fn multiplier_symbol_read_back_exactly() {
    let s = FiberedGSpace::single_torus(2, 12).unwrap();
    let op = LeafwiseOperatorFamily::multiplier(s, 3, 1, 1, 2.0, |_, nu| {
        scalar(Complex64::new((nu[0] * nu[0] + 2 * nu[1] * nu[1]) as f64, nu[1] as f64))
    })
    .unwrap();
    let sym = symbol_of(&op).unwrap();
    for (m, per_point) in sym[0].iter().enumerate() {
        let nu = op.domain.mode(m);
        let want = Complex64::new((nu[0] * nu[0] + 2 * nu[1] * nu[1]) as f64, nu[1] as f64);
        for v in per_point {
            assert!((v[(0, 0)] - want).norm() < 1e-12);
        }
    }
}

#[test]
fn dense_round_trip_and_corruption() {
    let m = CMat::from_fn(3, 4, |i, j| Complex64::new(i as f64 - 0.5, j as f64 * 1e-3));
    let mut buf = Vec::new();
    write_dense(&m, &mut buf).unwrap();
    assert_eq!(read_dense(buf.as_slice()).unwrap(), m);
    let mut bad = buf.clone();
    bad[3] ^= 0xff;
    assert!(matches!(read_dense(bad.as_slice()), Err(Error::Format(_))));
    assert!(matches!(read_dense(&buf[..buf.len() - 8]), Err(Error::Format(_))));
    let mut nan = buf.clone();
    let k = nan.len() - 8;
    nan[k..].copy_from_slice(&f64::NAN.to_le_bytes());
    assert!(matches!(read_dense(nan.as_slice()), Err(Error::Format(_))));
}

#[test]
fn heat_parametrix_identities() {
    let s = FiberedGSpace::single_torus(2, 8).unwrap();
    for d in [-1, 0, 2] {
        let op = LeafwiseOperatorFamily::dolbeault(s.clone(), d, 5).unwrap();
        let par = parametrix(&op, None).unwrap();
        assert!(par.residual(&op) < 1e-10, "d = {d}");
    }
    assert!(matches!(
        parametrix(&LeafwiseOperatorFamily::dolbeault(s, 1, 3).unwrap(), Some(-1.0)),
        Err(Error::Parameter(_))
    ));
}

fn random_kernel(seed: u64, space: &FiberedGSpace) -> SmoothingKernel {
    let mut r = common::rng(seed);
    let n = space.fiber_len();
    let blocks = (0..space.n_base())
        .map(|_| {
            KernelBlock::Dense(CMat::from_fn(n, n, |_, _| {
                Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
            }))
        })
        .collect();
    SmoothingKernel { rank: 1, blocks }.invariant_average(space).unwrap()
}

fn bump_cutoff(space: &FiberedGSpace) -> CutoffDensity {
    let seed: FiberFn = Arc::new(|_, z: &[f64]| 1.0 + 0.8 * (2.0 * PI * z[0]).cos() * (2.0 * PI * z[1]).sin());
    compute_cutoff(space, Seed::Function(seed)).unwrap()
}

fn kernel_norm(k: &SmoothingKernel) -> f64 {
    k.blocks.iter().map(|b| leafwise_core::linalg::frobenius(&b.to_dense())).fold(0.0, f64::max)
}

#[test]
fn landau_idempotent_traces_to_index() {
    let s = FiberedGSpace::single_torus(2, 10).unwrap();
    let c = compute_cutoff(&s, Seed::Uniform).unwrap();
    let om = TransversalDensity::uniform(1);
    for d in [-1, 1, 2] {
        let op = LeafwiseOperatorFamily::dolbeault(s.clone(), d, 4).unwrap();
        let par = parametrix(&op, None).unwrap();
        let p = index_idempotent(&op, &par, None).unwrap();
        assert!(p.idempotency_defect() < 1e-10);
        let t = p.trace(&s, &c, &om).unwrap();
        assert!((t - d as f64).norm() < 1e-8, "d = {d}: {t}");
    }
}

#[test]
fn invertible_operator_gives_trivial_class() {
    let s = FiberedGSpace::single_torus(2, 12).unwrap();
    let op = LeafwiseOperatorFamily::multiplier(s, 4, 1, 1, 2.0, |_, nu| {
        scalar(Complex64::new(1.0 + (nu[0] * nu[0] + nu[1] * nu[1]) as f64, 0.0))
    })
    .unwrap();
    let par = parametrix(&op, Some(40.0)).unwrap();
    let p = index_idempotent(&op, &par, None).unwrap();
    assert!(kernel_norm(&p.s) < 1e-12);
}

#[test]
fn localization_shrinks_support() {
    let s = FiberedGSpace::single_torus(2, 12).unwrap();
    let c = compute_cutoff(&s, Seed::Uniform).unwrap();
    let om = TransversalDensity::uniform(1);
    let op = LeafwiseOperatorFamily::dolbeault(s.clone(), 0, 4).unwrap();
    let par = parametrix(&op, None).unwrap();
    let wide = index_idempotent(&op, &par, None).unwrap();
    let p = index_idempotent(&op, &par, Some(0.3)).unwrap();
    // the Newton correction regrows a small tail past ε
    assert!(p.leakage(0.3) < 0.25 * wide.leakage(0.3));
    assert!(p.leakage(0.6) < 0.1 * wide.leakage(0.6));
    assert!(p.idempotency_defect() < 1e-8);
    assert!(p.trace(&s, &c, &om).unwrap().norm() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quantize_then_symbol_is_identity(seed in 0u64..1000) {
        let s = FiberedGSpace::single_torus(2, 12).unwrap();
        let a = random_symbol(seed, 1);
        let op = quantize(&a, &s, 4).unwrap();
        let sym = symbol_of(&op).unwrap();
        let pts = s.grid.points();
        for (m, per_point) in sym[0].iter().enumerate() {
            let nu = op.domain.mode(m);
            // modes whose band neighbours leave the truncation lose matrix entries
            if nu.iter().any(|v| v.abs() > 3) {
                continue;
            }
            for (p, v) in per_point.iter().enumerate() {
                prop_assert!((v - a.eval(0, &pts[p], &nu)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn trace_is_tracial_and_cutoff_free(seed in 0u64..1000) {
        let s = common::half_shift(6);
        let om = TransversalDensity::uniform(1);
        let (k1, k2) = (random_kernel(seed, &s), random_kernel(seed + 5000, &s));
        let c = compute_cutoff(&s, Seed::Uniform).unwrap();
        let comm = k1.mul(&k2).unwrap().sub(&k2.mul(&k1).unwrap());
        let t = trace_tau(&comm, &s, &c, &om).unwrap();
        prop_assert!(t.norm() <= 1e-9 * kernel_norm(&k1) * kernel_norm(&k2));
        let a = trace_tau(&k1, &s, &c, &om).unwrap();
        let b = trace_tau(&k1, &s, &bump_cutoff(&s), &om).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
    }

    #[test]
    fn symbol_trace_formula(seed in 0u64..1000) {
        let s = common::half_shift(14);
        let om = TransversalDensity::uniform(1);
        let mut r = common::rng(seed);
        let t = common::random_trig(&mut r, 2, 1, 3);
        let shifted = leafwise_core::cohomology::TrigPoly {
            dim: 2,
            terms: t.terms.into_iter().filter(|(nu, _)| nu[0] % 2 == 0).collect(),
        };
        let width = r.random_range(1.0..3.0);
        let a = SymbolData {
            f: Arc::new(move |_, z, nu| {
                let g = (-((nu[0] * nu[0] + nu[1] * nu[1]) as f64) / (width * width)).exp();
                scalar(shifted.eval(z) * g)
            }),
            rows: 1,
            cols: 1,
            order: None,
            z_band: 1,
        };
        let c = bump_cutoff(&s);
        let op = quantize(&a, &s, 6).unwrap();
        let k = SmoothingKernel::from_operator(&op).unwrap();
        let lhs = trace_tau(&k, &s, &c, &om).unwrap();
        let rhs = trace_symbol_formula(&a, 6, &s, &c, &om).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-8, "{} vs {}", lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn index_survives_small_smoothing_perturbation(seed in 0u64..1000, d in -2i64..=2) {
        let s = FiberedGSpace::single_torus(2, 8).unwrap();
        let op = LeafwiseOperatorFamily::dolbeault(s.clone(), d, 5).unwrap();
        let m = op.dense(0);
        let gap = m.clone().singular_values().iter().cloned().filter(|v| *v > 1e-6).fold(f64::INFINITY, f64::min);
        let mut r = common::rng(seed);
        let k = CMat::from_fn(m.nrows(), m.ncols(), |_, _| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
        let k = &k * Complex64::new(0.1 * gap / leafwise_core::linalg::op_norm(&k), 0.0);
        let pert = LeafwiseOperatorFamily::new(s, op.domain.clone(), op.codomain.clone(), vec![OperatorMatrix::Dense(&m + k)], 1.0).unwrap();
        prop_assert_eq!(analytic_index(&pert).unwrap(), vec![d]);
    }
}
