use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::basis::SectionBasis;
use super::operator::{LeafwiseOperatorFamily, OperatorMatrix};
use crate::groupoid::{FiberedGSpace, TorusGrid};
use crate::linalg::CMat;
use crate::{Error, Result};

/// `a(x, z, ν)`: matrix-valued symbol on the base × fiber × cotangent lattice.
pub type SymbolFn = Arc<dyn Fn(usize, &[f64], &[i64]) -> CMat + Send + Sync>;

/// Symbol of a leafwise operator with declared order and band limit in `z`.
#[derive(Clone)]
pub struct SymbolData {
    pub f: SymbolFn,
    pub rows: usize,
    pub cols: usize,
    /// `None` for order −∞.
    pub order: Option<f64>,
    pub z_band: usize,
}

impl std::fmt::Debug for SymbolData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SymbolData({}x{}, order {:?}, band {})",
            self.rows, self.cols, self.order, self.z_band
        )
    }
}

impl SymbolData {
    pub fn eval(&self, x: usize, z: &[f64], nu: &[i64]) -> CMat {
        (self.f)(x, z, nu)
    }
}

fn fft_nd(grid: &TorusGrid, data: &mut [Complex64], inverse: bool) {
    let n = grid.n;
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..grid.dim {
        let stride = if axis == 0 { 1 } else { n };
        for l in 0..grid.len() / n {
            let start = if axis == 0 { l * n } else { l };
            for (i, b) in buf.iter_mut().enumerate() {
                *b = data[start + i * stride];
            }
            plan.process(&mut buf);
            for (i, b) in buf.iter().enumerate() {
                data[start + i * stride] = *b;
            }
        }
    }
}

/// Fourier coefficients `â(k)` of `z ↦ a(z)` sampled on `grid`, indexed by DFT position.
pub(crate) fn grid_coefficients(grid: &TorusGrid, samples: &[Complex64]) -> Vec<Complex64> {
    let mut d = samples.to_vec();
    fft_nd(grid, &mut d, false);
    let w = grid.weight();
    d.iter_mut().for_each(|v| *v *= w);
    d
}

fn wrapped(grid: &TorusGrid, p: usize) -> Vec<i64> {
    let n = grid.n as i64;
    let m = grid.multi_index(p);
    (0..grid.dim)
        .map(|i| {
            let v = m[i] as i64;
            if 2 * v > n {
                v - n
            } else {
                v
            }
        })
        .collect()
}

/// Matrix elements `⟨e_μ, Op(a) e_ν⟩ = ∫ e^{−2πiμz} a(z, ν) e^{2πiνz} dz`, computed exactly
/// on the fiber grid for band-limited symbols.
pub fn quantize(
    a: &SymbolData,
    space: &FiberedGSpace,
    cutoff: usize,
) -> Result<LeafwiseOperatorFamily> {
    let grid = space.grid;
    let dim = space.dim();
    let dom = SectionBasis::fourier(dim, cutoff, a.cols)?;
    let cod = SectionBasis::fourier(dim, cutoff, a.rows)?;
    if 2 * cutoff + a.z_band >= grid.n {
        return Err(Error::BandLimit(format!(
            "grid {} too coarse for cutoff {cutoff} and band {}",
            grid.n, a.z_band
        )));
    }
    let pts = grid.points();
    let mut blocks = Vec::with_capacity(space.n_base());
    for x in 0..space.n_base() {
        let mut m = CMat::zeros(cod.len(), dom.len());
        for col in 0..dom.n_modes() {
            let nu = dom.mode(col);
            let samples: Vec<CMat> = pts.iter().map(|z| a.eval(x, z, &nu)).collect();
            for i in 0..a.rows {
                for j in 0..a.cols {
                    let s: Vec<Complex64> = samples.iter().map(|v| v[(i, j)]).collect();
                    let coef = grid_coefficients(&grid, &s);
                    for (p, c) in coef.iter().enumerate() {
                        let k = wrapped(&grid, p);
                        if k.iter().any(|v| v.unsigned_abs() as usize > a.z_band) {
                            if c.norm() > 1e-10 * (1.0 + coef[0].norm()) {
                                return Err(Error::BandLimit(format!(
                                    "symbol has z-frequency {k:?} beyond band {}",
                                    a.z_band
                                )));
                            }
                            continue;
                        }
                        let mu: Vec<i64> = nu.iter().zip(&k).map(|(a, b)| a + b).collect();
                        if let Some(row) = cod.mode_index(&mu) {
                            m[(row * a.rows + i, col * a.cols + j)] = *c;
                        }
                    }
                }
            }
        }
        blocks.push(OperatorMatrix::Dense(m));
    }
    LeafwiseOperatorFamily::new(
        space.clone(),
        dom,
        cod,
        blocks,
        a.order.unwrap_or(f64::NEG_INFINITY),
    )
}

/// Full symbol `σ(x, z, ν) = e^{−2πiνz} (D e_ν)(z)` sampled at grid points, indexed
/// `[x][mode][p]`, for operators on Fourier bases.
pub fn symbol_of(op: &LeafwiseOperatorFamily) -> Result<Vec<Vec<Vec<CMat>>>> {
    let (dom, cod) = (&op.domain, &op.codomain);
    if !matches!(dom, SectionBasis::Fourier { .. }) || !matches!(cod, SectionBasis::Fourier { .. })
    {
        return Err(Error::Unsupported(
            "symbols are read off Fourier bases only".into(),
        ));
    }
    let grid = op.space.grid;
    let (rd, rc) = (dom.rank(), cod.rank());
    let mut out = Vec::with_capacity(op.n_base());
    for x in 0..op.n_base() {
        let m = op.dense(x);
        let mut per_mode = Vec::with_capacity(dom.n_modes());
        for col in 0..dom.n_modes() {
            let nu = dom.mode(col);
            let mut per_point = Vec::with_capacity(grid.len());
            for p in 0..grid.len() {
                let z = grid.point(p);
                let mut s = CMat::zeros(rc, rd);
                for row in 0..cod.n_modes() {
                    let mu = cod.mode(row);
                    let ph: f64 = mu
                        .iter()
                        .zip(&nu)
                        .zip(&z)
                        .map(|((a, b), c)| (a - b) as f64 * c)
                        .sum();
                    let e = Complex64::from_polar(1.0, 2.0 * PI * ph);
                    for i in 0..rc {
                        for j in 0..rd {
                            s[(i, j)] += m[(row * rc + i, col * rd + j)] * e;
                        }
                    }
                }
                per_point.push(s);
            }
            per_mode.push(per_point);
        }
        out.push(per_mode);
    }
    Ok(out)
}
