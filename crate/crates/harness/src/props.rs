//! Seeded property checks on small fixed spaces.

use std::f64::consts::PI;
use std::sync::Arc;

use leafwise_core::calculus::{
    index_idempotent, parametrix, quantize, trace_symbol_formula, trace_tau, KernelBlock,
    LeafwiseOperatorFamily, SmoothingKernel, SymbolData,
};
use leafwise_core::cohomology::{
    integrate_invariant, van_est_lambda, ASCochain, Factor, FoliatedForm, Term, TrigPoly,
};
use leafwise_core::groupoid::{
    compute_cutoff, AffineMap, BaseModel, CutoffDensity, FiberFn, FiberedGSpace, FiniteGroup, Seed,
    TorusGrid, TransversalDensity,
};
use leafwise_core::linalg::{frobenius, CMat};
use leafwise_core::pairing::{pair_cocycle, pair_cocycle_within};
use leafwise_core::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, StageExt};

/// Worst deviation of one property over its seeded cases.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub cases: usize,
    pub worst: f64,
    pub tol: f64,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.worst <= self.tol
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c1(z: Complex64) -> CMat {
    CMat::from_element(1, 1, z)
}

fn random_trig(r: &mut ChaCha8Rng, dim: usize, band: i64, terms: usize) -> TrigPoly {
    let t = (0..terms)
        .map(|_| {
            let nu = (0..dim).map(|_| r.random_range(-band..=band)).collect();
            (
                nu,
                Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)),
            )
        })
        .collect();
    TrigPoly { dim, terms: t }
}

/// `ℤ/2` acting on one torus by the half shift in `z₁`.
pub fn half_shift(n: usize) -> Result<FiberedGSpace> {
    let maps = [
        AffineMap::identity(2),
        AffineMap::translation(vec![Rational64::new(1, 2), Rational64::from_integer(0)]),
    ];
    let grid = TorusGrid::new(2, n).stage("groupoid")?;
    FiberedGSpace::from_group_action(
        BaseModel::uniform(1),
        &FiniteGroup::cyclic(2),
        &[vec![0], vec![0]],
        &maps,
        grid,
    )
    .stage("groupoid")
}

/// `ℤ/2` swapping two weighted base points, fibers shifted by `(½, ½)`.
pub fn swap_two_points(n: usize) -> Result<FiberedGSpace> {
    let maps = [
        AffineMap::identity(2),
        AffineMap::translation(vec![Rational64::new(1, 2), Rational64::new(1, 2)]),
    ];
    let base = BaseModel::new(vec![1.0, 2.0], vec![1, 1]).stage("groupoid")?;
    let grid = TorusGrid::new(2, n).stage("groupoid")?;
    FiberedGSpace::from_group_action(
        base,
        &FiniteGroup::cyclic(2),
        &[vec![0, 1], vec![1, 0]],
        &maps,
        grid,
    )
    .stage("groupoid")
}

fn bump_cutoff(space: &FiberedGSpace) -> Result<CutoffDensity> {
    let seed: FiberFn =
        Arc::new(|_, z: &[f64]| 1.0 + 0.8 * (2.0 * PI * z[0]).cos() * (2.0 * PI * z[1]).sin());
    compute_cutoff(space, Seed::Function(seed)).stage("cutoff")
}

fn random_kernel(seed: u64, space: &FiberedGSpace) -> Result<SmoothingKernel> {
    let mut r = rng(seed);
    let n = space.fiber_len();
    let blocks = (0..space.n_base())
        .map(|_| {
            KernelBlock::Dense(CMat::from_fn(n, n, |_, _| {
                Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
            }))
        })
        .collect();
    SmoothingKernel { rank: 1, blocks }
        .invariant_average(space)
        .stage("kernel")
}

fn kernel_norm(k: &SmoothingKernel) -> f64 {
    k.blocks
        .iter()
        .map(|b| frobenius(&b.to_dense()))
        .fold(0.0, f64::max)
}

fn fold(
    name: &'static str,
    tol: f64,
    seeds: impl Iterator<Item = u64>,
    mut f: impl FnMut(u64) -> Result<f64>,
) -> Result<PropertyResult> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for s in seeds {
        let d = f(s)?;
        // NaN must not pass
        worst = if d.is_nan() { f64::NAN } else { worst.max(d) };
        cases += 1;
    }
    Ok(PropertyResult {
        name,
        cases,
        worst,
        tol,
    })
}

fn seeds(base: u64, n: usize) -> impl Iterator<Item = u64> {
    (0..n as u64).map(move |k| base.wrapping_mul(0x9e37_79b9).wrapping_add(k))
}

/// `|τ(K₁K₂ − K₂K₁)| / (‖K₁‖‖K₂‖)` for random invariant kernels.
pub fn trace_commutator(seed: u64, n: usize) -> Result<PropertyResult> {
    let s = half_shift(6)?;
    let c = compute_cutoff(&s, Seed::Uniform).stage("cutoff")?;
    let om = TransversalDensity::uniform(1);
    fold("trace-commutator", 1e-9, seeds(seed, n), |k| {
        let (a, b) = (random_kernel(k, &s)?, random_kernel(k ^ 0x5a5a_5a5a, &s)?);
        let comm = a.mul(&b).stage("kernel")?.sub(&b.mul(&a).stage("kernel")?);
        let t = trace_tau(&comm, &s, &c, &om).stage("trace")?;
        Ok(t.norm() / (kernel_norm(&a) * kernel_norm(&b)))
    })
}

/// `τ` with the uniform cut-off against a bump cut-off.
pub fn trace_cutoff_independence(seed: u64, n: usize) -> Result<PropertyResult> {
    let s = half_shift(6)?;
    let (c0, c1) = (
        compute_cutoff(&s, Seed::Uniform).stage("cutoff")?,
        bump_cutoff(&s)?,
    );
    let om = TransversalDensity::uniform(1);
    fold("trace-cutoff-independence", 1e-9, seeds(seed, n), |k| {
        let a = random_kernel(k, &s)?;
        let t0 = trace_tau(&a, &s, &c0, &om).stage("trace")?;
        let t1 = trace_tau(&a, &s, &c1, &om).stage("trace")?;
        Ok((t0 - t1).norm() / (1.0 + t0.norm()))
    })
}

/// Trace of a quantized Gaussian symbol against its cotangent integral.
pub fn symbol_trace(seed: u64, n: usize) -> Result<PropertyResult> {
    let s = half_shift(14)?;
    let om = TransversalDensity::uniform(1);
    let c = bump_cutoff(&s)?;
    fold("symbol-trace", 1e-8, seeds(seed, n), |k| {
        let mut r = rng(k);
        let mut t = random_trig(&mut r, 2, 1, 3);
        // keep only modes invariant under the half shift
        t.terms.retain(|(nu, _)| nu[0] % 2 == 0);
        let width = r.random_range(1.0..3.0);
        let a = SymbolData {
            f: Arc::new(move |_, z, nu| {
                let g = (-((nu[0] * nu[0] + nu[1] * nu[1]) as f64) / (width * width)).exp();
                c1(t.eval(z) * g)
            }),
            rows: 1,
            cols: 1,
            order: None,
            z_band: 1,
        };
        let op = quantize(&a, &s, 6).stage("quantize")?;
        let kern = SmoothingKernel::from_operator(&op).stage("kernel")?;
        let lhs = trace_tau(&kern, &s, &c, &om).stage("trace")?;
        let rhs = trace_symbol_formula(&a, 6, &s, &c, &om).stage("trace")?;
        Ok((lhs - rhs).norm())
    })
}

fn random_invariant_one_form(r: &mut ChaCha8Rng, s: &FiberedGSpace) -> Result<FoliatedForm> {
    let p = random_trig(r, 2, 3, 4);
    let q = random_trig(r, 2, 3, 4);
    FoliatedForm::from_fn(s, 1, |_, z| vec![p.eval(z), q.eval(z)])
        .and_then(|f| f.invariant_project(s))
        .stage("forms")
}

/// `∫_{Z/G} dβ` for random invariant 1-forms `β`.
pub fn invariant_stokes(seed: u64, n: usize) -> Result<PropertyResult> {
    let s = swap_two_points(8)?;
    let c = compute_cutoff(&s, Seed::Uniform).stage("cutoff")?;
    let om = TransversalDensity::uniform(2);
    fold("invariant-stokes", 1e-9, seeds(seed, n), |k| {
        let b = random_invariant_one_form(&mut rng(k), &s)?;
        let db = b.d_leafwise().stage("forms")?;
        Ok(integrate_invariant(&db, &s, &c, &om, 1e-9)
            .stage("integrate")?
            .norm())
    })
}

/// Invariant top-degree integrals with two cut-offs.
pub fn integration_cutoff_independence(seed: u64, n: usize) -> Result<PropertyResult> {
    let s = swap_two_points(8)?;
    let (c0, c1) = (
        compute_cutoff(&s, Seed::Uniform).stage("cutoff")?,
        bump_cutoff(&s)?,
    );
    let om = TransversalDensity::uniform(2);
    fold(
        "integration-cutoff-independence",
        1e-9,
        seeds(seed, n),
        |k| {
            let p = random_trig(&mut rng(k), 2, 3, 5);
            let f = FoliatedForm::from_fn(&s, 2, |_, z| vec![p.eval(z)])
                .and_then(|f| f.invariant_project(&s))
                .stage("forms")?;
            let a = integrate_invariant(&f, &s, &c0, &om, 1e-9).stage("integrate")?;
            let b = integrate_invariant(&f, &s, &c1, &om, 1e-9).stage("integrate")?;
            Ok((a - b).norm() / (1.0 + a.norm()))
        },
    )
}

fn random_cochain(r: &mut ChaCha8Rng, degree: usize) -> Result<ASCochain> {
    let terms = (0..2)
        .map(|_| Term {
            coeff: Complex64::new(1.0, 0.0),
            factors: (0..=degree)
                .map(|_| Factor::trig(random_trig(r, 2, 2, 3)))
                .collect(),
        })
        .collect();
    ASCochain::from_terms(2, degree, terms).stage("cocycle")
}

/// `λ(d_AS φ) − d λ(φ)` for random elementary cochains of degree 0 and 1.
pub fn van_est_chain_map(seed: u64, n: usize) -> Result<PropertyResult> {
    let s = FiberedGSpace::single_torus(2, 16).stage("groupoid")?;
    fold("van-est-chain-map", 1e-10, seeds(seed, n), |k| {
        let phi = random_cochain(&mut rng(k), (k % 2) as usize)?;
        let lhs = van_est_lambda(&phi.d_as(), &s).stage("van-est")?;
        let rhs = van_est_lambda(&phi, &s)
            .and_then(|f| f.d_leafwise())
            .stage("van-est")?;
        Ok(lhs.max_abs_diff(&rhs))
    })
}

fn dolbeault_class(
    space: &FiberedGSpace,
    d: i64,
    n: usize,
    eps: Option<f64>,
) -> Result<leafwise_core::calculus::IndexIdempotent> {
    let op = LeafwiseOperatorFamily::dolbeault(space.clone(), d, n).stage("operator")?;
    let par = parametrix(&op, None).stage("parametrix")?;
    index_idempotent(&op, &par, eps).stage("idempotent")
}

/// Pairing of coboundaries `d_AS ψ` with the degree-one Dolbeault class.
pub fn coboundary_pairing(seed: u64, n: usize) -> Result<PropertyResult> {
    let s = FiberedGSpace::single_torus(2, 10).stage("groupoid")?;
    let c = compute_cutoff(&s, Seed::Uniform).stage("cutoff")?;
    let om = TransversalDensity::uniform(1);
    let p = dolbeault_class(&s, 1, 4, None)?;
    fold("coboundary-pairing", 1e-8, seeds(seed, n), |k| {
        let psi = random_cochain(&mut rng(k), 1)?;
        Ok(pair_cocycle(&psi.d_as(), &p, &s, &c, &om)
            .stage("pairing")?
            .norm())
    })
}

/// Idempotents localized at `ε` and `ε/2` against cocycles supported within `ε/2`.
pub fn localization_stability(eps: f64) -> Result<PropertyResult> {
    let s = FiberedGSpace::single_torus(2, 66).stage("groupoid")?;
    let c = compute_cutoff(&s, Seed::Uniform).stage("cutoff")?;
    let om = TransversalDensity::uniform(1);
    let wide = dolbeault_class(&s, 0, 32, Some(eps))?;
    let narrow = dolbeault_class(&s, 0, 32, Some(eps / 2.0))?;
    let cocycles = [ASCochain::constant(2), ASCochain::area()];
    let mut i = 0;
    fold(
        "localization-stability",
        1e-8,
        0..cocycles.len() as u64,
        |_| {
            let phi = &cocycles[i];
            i += 1;
            let a =
                pair_cocycle_within(phi, &wide, &s, &c, &om, Some(eps / 2.0)).stage("pairing")?;
            let b =
                pair_cocycle_within(phi, &narrow, &s, &c, &om, Some(eps / 2.0)).stage("pairing")?;
            Ok((a - b).norm())
        },
    )
}

/// A property check with its case count fixed.
pub type Check = Box<dyn Fn() -> Result<PropertyResult> + Send + Sync>;

/// The registered invariants with their default case counts.
pub fn all(seed: u64) -> Vec<(&'static str, Check)> {
    vec![
        (
            "trace-commutator",
            Box::new(move || trace_commutator(seed, 20)),
        ),
        (
            "trace-cutoff-independence",
            Box::new(move || trace_cutoff_independence(seed, 20)),
        ),
        ("symbol-trace", Box::new(move || symbol_trace(seed, 10))),
        (
            "invariant-stokes",
            Box::new(move || invariant_stokes(seed, 20)),
        ),
        (
            "integration-cutoff-independence",
            Box::new(move || integration_cutoff_independence(seed, 20)),
        ),
        (
            "van-est-chain-map",
            Box::new(move || van_est_chain_map(seed, 20)),
        ),
        (
            "coboundary-pairing",
            Box::new(move || coboundary_pairing(seed, 20)),
        ),
        (
            "localization-stability",
            Box::new(|| localization_stability(0.6)),
        ),
    ]
}
