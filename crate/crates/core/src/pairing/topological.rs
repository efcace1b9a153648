use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use nalgebra::SMatrix;
use num_complex::Complex64;

use super::charclass::{chern_character_form, ConnectionForm};
use super::symbolclass::{
    check_symbol_elliptic, chern_projector, graph_projector, CotangentModel, SymbolClass,
};
use crate::cohomology::{shuffle_sign, subsets, FoliatedForm};
use crate::groupoid::{CutoffDensity, FiberedGSpace, TorusGrid, TransversalDensity};
use crate::linalg::CMat;
use crate::{Error, Result};

const FORM_TOL: f64 = 1e-8;

/// Connection perturbation `ω(z, ξ)` for the Chern–Weil representative.
pub type ConnectionFn = Arc<dyn Fn(&[f64], &[f64]) -> ConnectionForm + Send + Sync>;

#[derive(Clone)]
pub struct TopologicalOptions {
    /// Trapezoid points per Fourier band of the symbol in each fiber direction.
    pub z_per_band: usize,
    /// Gauss–Legendre nodes along `|ξ|`.
    pub radial: usize,
    /// Trapezoid nodes in the angle of `ξ` (fiber dimension 2).
    pub angular: usize,
    pub connection: Option<ConnectionFn>,
}

impl Default for TopologicalOptions {
    fn default() -> Self {
        Self {
            z_per_band: 28,
            radial: 24,
            angular: 8,
            connection: None,
        }
    }
}

impl std::fmt::Debug for TopologicalOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "TopologicalOptions(z {}, radial {}, angular {}, connection {})",
            self.z_per_band,
            self.radial,
            self.angular,
            self.connection.is_some()
        )
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn xi_nodes(r: usize, model: &CotangentModel, opts: &TopologicalOptions) -> Vec<(Vec<f64>, f64)> {
    let gl = gauss_legendre(opts.radial);
    let rad = model.radius;
    if r == 1 {
        let mut out = Vec::new();
        for sign in [-1.0, 1.0] {
            for (x, w) in &gl {
                out.push((vec![sign * (x + 1.0) * rad / 2.0], w * rad / 2.0));
            }
        }
        return out;
    }
    let mut out = Vec::with_capacity(opts.radial * opts.angular);
    for (x, w) in &gl {
        let rho = (x + 1.0) * rad / 2.0;
        for a in 0..opts.angular {
            let t = 2.0 * PI * (a as f64 + 0.5) / opts.angular as f64;
            out.push((
                vec![rho * t.cos(), rho * t.sin()],
                w * rad / 2.0 * rho * 2.0 * PI / opts.angular as f64,
            ));
        }
    }
    out
}

/// Periodic trigonometric interpolation from `n` samples to `m` equispaced points.
pub fn interpolation_matrix(n: usize, m: usize) -> Vec<Vec<f64>> {
    let kmax = (n - 1) / 2;
    (0..m)
        .map(|i| {
            let t = i as f64 / m as f64;
            (0..n)
                .map(|j| {
                    let u = t - j as f64 / n as f64;
                    let mut s = 1.0;
                    for k in 1..=kmax {
                        s += 2.0 * (2.0 * PI * k as f64 * u).cos();
                    }
                    if n % 2 == 0 {
                        s += (PI * n as f64 * u).cos();
                    }
                    s / n as f64
                })
                .collect()
        })
        .collect()
}

fn interpolate(grid: &TorusGrid, ms: &[usize], f: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n;
    let mat0 = interpolation_matrix(n, ms[0]);
    if grid.dim == 1 {
        return mat0
            .iter()
            .map(|row| row.iter().zip(f).map(|(a, b)| b * *a).sum())
            .collect();
    }
    let (m0, m1) = (ms[0], ms[1]);
    let mat1 = interpolation_matrix(n, m1);
    // along axis 0, then axis 1
    let mut tmp = vec![Complex64::new(0.0, 0.0); m0 * n];
    for i1 in 0..n {
        for (a0, row) in mat0.iter().enumerate() {
            tmp[a0 + m0 * i1] = row
                .iter()
                .enumerate()
                .map(|(i0, w)| f[i0 + n * i1] * *w)
                .sum();
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); m0 * m1];
    for a0 in 0..m0 {
        for (a1, row) in mat1.iter().enumerate() {
            out[a0 + m0 * a1] = row
                .iter()
                .enumerate()
                .map(|(i1, w)| tmp[a0 + m0 * i1] * *w)
                .sum();
        }
    }
    out
}

/// `Σ_σ sgn σ · A_{c_σ(1)} ⋯ A_{c_σ(m)}` over the coordinates in `mask`, memoized by subset.
fn alternating_product(a: &[CMat], mask: u16, memo: &mut [Option<CMat>]) -> CMat {
    if let Some(m) = &memo[mask as usize] {
        return m.clone();
    }
    let dim = a[0].nrows();
    let out = if mask == 0 {
        CMat::identity(dim, dim)
    } else {
        let mut acc = CMat::zeros(dim, dim);
        let mut pos = 0;
        for i in 0..a.len() {
            if mask & (1 << i) == 0 {
                continue;
            }
            let rest = alternating_product(a, mask & !(1 << i), memo);
            let term = &a[i] * rest;
            if pos % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
            pos += 1;
        }
        acc
    };
    memo[mask as usize] = Some(out.clone());
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Orientation of `dz_1 … dz_r dξ_1 … dξ_r` relative to the symplectic orientation.
pub fn symplectic_sign(r: usize) -> f64 {
    if (r * (r.saturating_sub(1)) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

type M2 = SMatrix<Complex64, 2, 2>;
type M4 = SMatrix<Complex64, 4, 4>;

fn to_m2(a: &CMat) -> M2 {
    M2::from_fn(|i, j| a[(i, j)])
}

fn alternating_product_fixed(a: &[M4; 4], mask: u16, memo: &mut [Option<M4>; 16]) -> M4 {
    if let Some(m) = memo[mask as usize] {
        return m;
    }
    let out = if mask == 0 {
        M4::identity()
    } else {
        let mut acc = M4::zeros();
        let mut pos = 0;
        for (i, ai) in a.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            let term = ai * alternating_product_fixed(a, mask & !(1 << i), memo);
            if pos % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
            pos += 1;
        }
        acc
    };
    memo[mask as usize] = Some(out);
    out
}

fn trace_product(x: &M4, y: &M4) -> Complex64 {
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            t += x[(i, j)] * y[(j, i)];
        }
    }
    t
}

/// `tr(P · Alt(mask))`, with closed forms for two and four coordinates.
fn trace_alternating(p: &M4, a: &[M4; 4], mask: u16, memo: &mut [Option<M4>; 16]) -> Complex64 {
    let comm = |i: usize, j: usize| a[i] * a[j] - a[j] * a[i];
    match mask.count_ones() {
        2 => {
            let i = mask.trailing_zeros() as usize;
            let j = 15 - mask.leading_zeros() as usize;
            trace_product(p, &comm(i, j))
        }
        4 => {
            let c = [
                comm(0, 1),
                comm(0, 2),
                comm(0, 3),
                comm(1, 2),
                comm(1, 3),
                comm(2, 3),
            ];
            // Alt = C01C23 − C02C13 + C03C12 + C12C03 − C13C02 + C23C01
            let pc = c.map(|m| p * m);
            trace_product(&pc[0], &c[5]) - trace_product(&pc[1], &c[4])
                + trace_product(&pc[2], &c[3])
                + trace_product(&pc[3], &c[2])
                - trace_product(&pc[4], &c[1])
                + trace_product(&pc[5], &c[0])
        }
        _ => trace_product(p, &alternating_product_fixed(a, mask, memo)),
    }
}

/// Fixed-size evaluation of `Σ_ξ w tr(P · Alt(S))` for the twisted Dolbeault class.
fn dolbeault_fiber_integrals(
    degree: i64,
    model: &CotangentModel,
    nodes: &[(Vec<f64>, f64)],
    z: &[f64],
    masks: &[u16],
) -> Result<Vec<Complex64>> {
    let (q, dq) = chern_projector(degree, z);
    let (q, dq) = (to_m2(&q), [to_m2(&dq[0]), to_m2(&dq[1])]);
    let id = M2::identity();
    let w2 = model.width * model.width;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let dsxi = [q * two_pi_i, q * Complex64::new(-2.0 * PI, 0.0)];
    let mut out = vec![Complex64::new(0.0, 0.0); masks.len()];
    let assemble4 = |a: &M2, b: &M2, c: &M2, d: &M2| {
        let mut m = M4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
        m
    };
    for (xi, w) in nodes {
        let s = two_pi_i * Complex64::new(xi[0], xi[1]);
        let sigma = q * s + (id - q);
        // σ⁻¹ = q/s + (1 − q) since q is a projector
        let inv = q / s + (id - q);
        let sm1 = s - 1.0;
        let ds = [dq[0] * sm1, dq[1] * sm1, dsxi[0], dsxi[1]];
        let rho2 = xi[0] * xi[0] + xi[1] * xi[1];
        let chi = (-rho2 / (2.0 * w2)).exp();
        let omc = -(-rho2 / (2.0 * w2)).exp_m1();
        let dchi = [0.0, 0.0, -xi[0] / w2 * chi, -xi[1] / w2 * chi];
        let qm = inv * Complex64::new(omc, 0.0);
        let c = Complex64::new(chi, 0.0);
        let p = assemble4(
            &(id * (c * c)),
            &(qm * (c * (c + 1.0))),
            &(sigma * c),
            &(id * (1.0 - c * c)),
        );
        let mut a = [M4::zeros(); 4];
        for i in 0..4 {
            let dc = Complex64::new(dchi[i], 0.0);
            let dqm = -(inv * dc) - (inv * ds[i] * inv) * Complex64::new(omc, 0.0);
            a[i] = assemble4(
                &(id * (c * dc * 2.0)),
                &(qm * (dc * (c * 2.0 + 1.0)) + dqm * (c * (c + 1.0))),
                &(sigma * dc + ds[i] * c),
                &(id * (-(c * dc * 2.0))),
            );
        }
        let mut memo = [None; 16];
        for (o, mask) in out.iter_mut().zip(masks) {
            *o += trace_alternating(&p, &a, *mask, &mut memo) * *w;
        }
    }
    Ok(out)
}

fn quadrature_sizes(
    symbol: &SymbolClass,
    grid: &TorusGrid,
    opts: &TopologicalOptions,
) -> Vec<usize> {
    symbol
        .z_band()
        .iter()
        .map(|b| {
            // a connection is resolved as if it carried one Fourier band
            let b = if opts.connection.is_some() { (*b).max(1) } else { *b };
            grid.n.max(opts.z_per_band * b)
        })
        .collect()
}

fn quadrature_point(ms: &[usize], q: usize) -> Vec<f64> {
    if ms.len() == 1 {
        vec![q as f64 / ms[0] as f64]
    } else {
        vec![
            (q % ms[0]) as f64 / ms[0] as f64,
            (q / ms[0]) as f64 / ms[1] as f64,
        ]
    }
}

fn assemble(
    g: &[(u8, Vec<Complex64>)],
    grid: &TorusGrid,
    symbol: &SymbolClass,
    model: &CotangentModel,
    kappa: Complex64,
    opts: &TopologicalOptions,
) -> Result<Complex64> {
    let ms = quadrature_sizes(symbol, grid, opts);
    let vals: Vec<(u8, Vec<Complex64>)> = g
        .iter()
        .map(|(v, f)| (*v, interpolate(grid, &ms, f)))
        .collect();
    assemble_quadrature(&vals, &ms, symbol, model, kappa, opts)
}

/// `Σ_z h Σ_V g_V(z) sgn(V, U) ∫ ch_U(z, ξ) dξ` with `U` the complement of `V`, for
/// `g_V` sampled on the `ms` quadrature grid; `ch_U` is the coefficient of
/// `dz_U ∧ dξ_1 … dξ_r` in `ch(P) − ch(e)`.
fn assemble_quadrature(
    vals: &[(u8, Vec<Complex64>)],
    ms: &[usize],
    symbol: &SymbolClass,
    model: &CotangentModel,
    kappa: Complex64,
    opts: &TopologicalOptions,
) -> Result<Complex64> {
    let r = ms.len();
    let full_z: u8 = (1u8 << r) - 1;
    let xi_mask: u16 = ((1u16 << r) - 1) << r;
    let nodes = xi_nodes(r, model, opts);
    let masks: Vec<u16> = vals
        .iter()
        .map(|(v, _)| ((full_z & !v) as u16) | xi_mask)
        .collect();
    let n_pts: usize = ms.iter().product();
    let j = r
        - (vals
            .first()
            .map(|(v, _)| v.count_ones() as usize)
            .unwrap_or(0))
            / 2;
    let coeff = kappa.powu(j as u32) / factorial(j);

    let fiber_integrals = |z: &[f64]| -> Result<Vec<Complex64>> {
        if let (SymbolClass::TwistedDolbeault { degree }, None) = (symbol, &opts.connection) {
            return Ok(
                dolbeault_fiber_integrals(*degree, model, &nodes, z, &masks)?
                    .into_iter()
                    .map(|v| v * coeff)
                    .collect(),
            );
        }
        let mut out = vec![Complex64::new(0.0, 0.0); vals.len()];
        for (xi, w) in &nodes {
            let (p, partials) = graph_projector(symbol, model, z, xi)?;
            match &opts.connection {
                None => {
                    let mut memo = vec![None; 1 << (2 * r)];
                    for (o, s) in out.iter_mut().zip(&masks) {
                        let alt = alternating_product(&partials, *s, &mut memo);
                        *o += (&p * alt).trace() * coeff * *w;
                    }
                }
                Some(conn) => {
                    let ch = chern_character_form(&p, &partials, kappa, Some(&conn(z, xi)))?;
                    for (o, s) in out.iter_mut().zip(&masks) {
                        *o += ch.form.c[*s as usize] * *w;
                    }
                }
            }
        }
        Ok(out)
    };

    let mut total = Complex64::new(0.0, 0.0);
    let constant = if symbol.z_dependent() || opts.connection.is_some() {
        None
    } else {
        Some(fiber_integrals(&vec![0.0; r])?)
    };
    for q in 0..n_pts {
        let z = quadrature_point(ms, q);
        let k = match &constant {
            Some(k) => k.clone(),
            None => fiber_integrals(&z)?,
        };
        for ((v, f), kv) in vals.iter().zip(&k) {
            total += f[q] * *kv * shuffle_sign(*v, full_z & !v);
        }
    }
    Ok(total * symplectic_sign(r) / n_pts as f64)
}

/// Normalization constant `κ` of the Chern character, pinned by the degree-one
/// Dolbeault operator on `T²` having index 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub kappa: Complex64,
}

/// Calibrates `κ` with the given quadrature; `κ²` is solved for and the root with
/// positive imaginary part is taken.
pub fn calibrate(opts: &TopologicalOptions) -> Result<Calibration> {
    let grid = TorusGrid::new(2, 4)?;
    let one = vec![Complex64::new(1.0, 0.0); grid.len()];
    let model = CotangentModel::for_cutoff(8);
    let plain = TopologicalOptions {
        connection: None,
        ..opts.clone()
    };
    let raw = assemble(
        &[(0, one)],
        &grid,
        &SymbolClass::TwistedDolbeault { degree: 1 },
        &model,
        Complex64::new(1.0, 0.0),
        &plain,
    )?;
    // raw already carries the 1/2! of the degree-four term
    let k2 = Complex64::new(1.0, 0.0) / raw;
    let mut kappa = k2.sqrt();
    if kappa.im < 0.0 {
        kappa = -kappa;
    }
    if kappa.im.abs() < 10.0 * kappa.re.abs() {
        return Err(Error::Calibration(format!(
            "κ² = {k2} is not negative real; orientation conventions disagree"
        )));
    }
    Ok(Calibration { kappa })
}

static DEFAULT_CALIBRATION: OnceLock<Result<Calibration>> = OnceLock::new();

/// The calibration with default quadrature, computed once per process.
pub fn default_calibration() -> Result<Calibration> {
    DEFAULT_CALIBRATION
        .get_or_init(|| calibrate(&TopologicalOptions::default()))
        .clone()
}

fn check_form(alpha: &FoliatedForm, space: &FiberedGSpace) -> Result<()> {
    if alpha.grid != space.grid || alpha.n_base != space.n_base() {
        return Err(Error::Dimension("form does not live on this space".into()));
    }
    if alpha.degree % 2 != 0 || alpha.degree > space.dim() {
        return Err(Error::Degree(format!(
            "index formula needs an even-degree form, got {}",
            alpha.degree
        )));
    }
    let defect = alpha.invariance_defect(space)?;
    if defect > FORM_TOL {
        return Err(Error::NotInvariant { defect });
    }
    if alpha.degree < space.dim() {
        let defect = alpha.d_leafwise()?.max_abs();
        if defect > FORM_TOL {
            return Err(Error::NotClosed { defect });
        }
    }
    Ok(())
}

/// `(2πi)^{−k} ∫_{T*Z} π*⟨c, α⟩ ∧ Â ∧ ch(σ)` for an invariant closed form `α` of degree `2k`.
///
/// `Â = 1` here: on flat torus leaves every Pontryagin form vanishes.
#[allow(clippy::too_many_arguments)]
pub fn topological_index(
    alpha: &FoliatedForm,
    symbol: &SymbolClass,
    model: &CotangentModel,
    space: &FiberedGSpace,
    cutoff: &CutoffDensity,
    omega: &TransversalDensity,
    calibration: &Calibration,
    opts: &TopologicalOptions,
) -> Result<Complex64> {
    if symbol.dim() != space.dim() {
        return Err(Error::Dimension("symbol and fiber dimension differ".into()));
    }
    check_form(alpha, space)?;
    check_symbol_elliptic(symbol, model)?;
    let r = space.dim();
    let g = space.fiber_len();
    let weighted: Vec<(u8, Vec<Complex64>)> = subsets(r, alpha.degree)
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let f = (0..g)
                .map(|p| {
                    (0..space.n_base())
                        .map(|x| {
                            alpha.comps[i][x * g + p]
                                * cutoff.values[x][p]
                                * space.base.weights[x]
                                * omega.values[x]
                        })
                        .sum()
                })
                .collect();
            (v, f)
        })
        .collect();
    let k = alpha.degree / 2;
    let raw = assemble(
        &weighted,
        &space.grid,
        symbol,
        model,
        calibration.kappa,
        opts,
    )?;
    Ok(raw / Complex64::new(0.0, 2.0 * PI).powu(k as u32))
}

fn quadrature_image(map: &crate::groupoid::AffineMap, ms: &[usize], q: usize) -> Option<usize> {
    let z = map.apply(&quadrature_point(ms, q));
    let mut out = 0;
    let mut stride = 1;
    for (zi, mi) in z.iter().zip(ms) {
        let t = zi * *mi as f64;
        let k = t.round();
        if (t - k).abs() > 1e-9 {
            return None;
        }
        out += (k as i64).rem_euclid(*mi as i64) as usize * stride;
        stride *= mi;
    }
    Some(out)
}

/// Index integral over the quotient of the cotangent model by a free action.
///
/// Each base orbit contributes through one representative fiber, integrated over one
/// point per isotropy orbit of the quadrature grid; no cut-off is involved.
pub fn free_action_reduction(
    alpha: &FoliatedForm,
    symbol: &SymbolClass,
    model: &CotangentModel,
    space: &FiberedGSpace,
    omega: &TransversalDensity,
    calibration: &Calibration,
    opts: &TopologicalOptions,
) -> Result<Complex64> {
    if symbol.dim() != space.dim() {
        return Err(Error::Dimension("symbol and fiber dimension differ".into()));
    }
    space.check_free()?;
    check_form(alpha, space)?;
    check_symbol_elliptic(symbol, model)?;
    let r = space.dim();
    let g = space.fiber_len();
    let gp = &space.groupoid;
    let ms = quadrature_sizes(symbol, &space.grid, opts);
    let n_pts: usize = ms.iter().product();
    let subs = subsets(r, alpha.degree);
    let mut vals: Vec<(u8, Vec<Complex64>)> = subs
        .iter()
        .map(|v| (*v, vec![Complex64::new(0.0, 0.0); n_pts]))
        .collect();
    let mut seen = vec![false; space.n_base()];
    for x in 0..space.n_base() {
        if seen[x] {
            continue;
        }
        let orbit = gp.orbit(x);
        let mu = space.base.weights[x] * omega.values[x];
        for y in &orbit {
            seen[*y] = true;
            let my = space.base.weights[*y] * omega.values[*y];
            if (my - mu).abs() > 1e-12 * mu.abs().max(1.0) {
                return Err(Error::Parameter(format!(
                    "transversal measure differs along the orbit of base point {x}"
                )));
            }
        }
        let iso: Vec<usize> = gp.isotropy(x).filter(|h| *h != gp.unit(x)).collect();
        for h in &iso {
            check_symbol_translation(symbol, space.act(*h))?;
        }
        let mut rep = vec![true; n_pts];
        for q in 0..n_pts {
            if !rep[q] {
                continue;
            }
            for h in &iso {
                let img = quadrature_image(space.act(*h), &ms, q).ok_or_else(|| {
                    Error::Unsupported(format!("arrow {h} does not preserve the quadrature grid"))
                })?;
                if img != q {
                    rep[img] = false;
                }
            }
        }
        for (i, (_, out)) in vals.iter_mut().enumerate() {
            let f: Vec<Complex64> = (0..g).map(|p| alpha.comps[i][x * g + p]).collect();
            let fine = interpolate(&space.grid, &ms, &f);
            for q in 0..n_pts {
                if rep[q] {
                    out[q] += fine[q] * mu;
                }
            }
        }
    }
    let k = alpha.degree / 2;
    let raw = assemble_quadrature(&vals, &ms, symbol, model, calibration.kappa, opts)?;
    Ok(raw / Complex64::new(0.0, 2.0 * PI).powu(k as u32))
}

/// Fails unless `act` is a translation leaving the symbol unchanged.
fn check_symbol_translation(symbol: &SymbolClass, act: &crate::groupoid::AffineMap) -> Result<()> {
    let r = symbol.dim();
    let linear_identity = (0..r).all(|i| (0..r).all(|j| act.entry(i, j) == i64::from(i == j)));
    if !linear_identity {
        return Err(Error::Unsupported(
            "quotient model needs translation isotropy".into(),
        ));
    }
    let mut defect = 0.0f64;
    for t in [0.0, 0.23, 0.61] {
        let z = vec![t; r];
        let xi = vec![0.7; r];
        let (a, _) = symbol.eval(&z, &xi);
        let (b, _) = symbol.eval(&act.apply(&z), &xi);
        defect = defect.max((a - b).norm());
    }
    if defect > 1e-10 {
        return Err(Error::NotInvariant { defect });
    }
    Ok(())
}
