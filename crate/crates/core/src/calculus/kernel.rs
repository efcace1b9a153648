use num_complex::Complex64;
use rustfft::FftPlanner;

use super::basis::SectionBasis;
use super::operator::LeafwiseOperatorFamily;
use super::symbol::SymbolData;
use crate::groupoid::{CutoffDensity, FiberedGSpace, TorusGrid, TransversalDensity};
use crate::linalg::{max_abs, CMat};
use crate::{Error, Result};

/// Translation-invariant grid operator `M(z, w) = k(z − w)`, stored by its DFT symbol
/// `S(m)` (one `rows × cols` block per DFT position): `k(Δ) = G⁻¹ Σ_m S(m) e^{2πi m·Δ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Circulant {
    pub grid: TorusGrid,
    pub rows: usize,
    pub cols: usize,
    pub sym: Vec<CMat>,
}

fn fft_axes(grid: &TorusGrid, data: &mut [Complex64], inverse: bool) {
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

impl Circulant {
    pub fn zero(grid: TorusGrid, rows: usize, cols: usize) -> Self {
        Self {
            grid,
            rows,
            cols,
            sym: vec![CMat::zeros(rows, cols); grid.len()],
        }
    }

    pub fn identity(grid: TorusGrid, rank: usize) -> Self {
        Self {
            grid,
            rows: rank,
            cols: rank,
            sym: vec![CMat::identity(rank, rank); grid.len()],
        }
    }

    /// Embeds a Fourier multiplier (modes `|ν_i| ≤ N`, `2N < n`) into the grid.
    pub fn from_multiplier(grid: TorusGrid, basis: &SectionBasis, blocks: &[CMat]) -> Result<Self> {
        let SectionBasis::Fourier { cutoff, .. } = basis else {
            return Err(Error::Unsupported(
                "circulant kernels need a Fourier basis".into(),
            ));
        };
        if 2 * cutoff >= grid.n {
            return Err(Error::Parameter(format!(
                "grid {} cannot resolve cutoff {cutoff}",
                grid.n
            )));
        }
        let (rows, cols) = blocks[0].shape();
        let mut c = Self::zero(grid, rows, cols);
        for (m, b) in blocks.iter().enumerate() {
            c.sym[grid.flat_index(&basis.mode(m))] = b.clone();
        }
        Ok(c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            grid: self.grid,
            rows: self.rows,
            cols: other.cols,
            sym: self
                .sym
                .iter()
                .zip(&other.sym)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            sym: self
                .sym
                .iter()
                .zip(&other.sym)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            sym: self.sym.iter().map(|a| a * s).collect(),
            ..self.clone()
        }
    }

    /// Position-space kernel `k(Δ)` indexed by grid point of `Δ`.
    pub fn position(&self) -> Vec<CMat> {
        let g = self.grid.len();
        let mut out = vec![CMat::zeros(self.rows, self.cols); g];
        let mut buf = vec![Complex64::new(0.0, 0.0); g];
        for i in 0..self.rows {
            for j in 0..self.cols {
                for (p, b) in buf.iter_mut().enumerate() {
                    *b = self.sym[p][(i, j)];
                }
                fft_axes(&self.grid, &mut buf, true);
                for (p, b) in buf.iter().enumerate() {
                    out[p][(i, j)] = *b / g as f64;
                }
            }
        }
        out
    }

    pub fn from_position(grid: TorusGrid, k: &[CMat]) -> Self {
        let g = grid.len();
        let (rows, cols) = k[0].shape();
        let mut sym = vec![CMat::zeros(rows, cols); g];
        let mut buf = vec![Complex64::new(0.0, 0.0); g];
        for i in 0..rows {
            for j in 0..cols {
                for (p, b) in buf.iter_mut().enumerate() {
                    *b = k[p][(i, j)];
                }
                fft_axes(&grid, &mut buf, false);
                for (p, b) in buf.iter().enumerate() {
                    sym[p][(i, j)] = *b;
                }
            }
        }
        Self {
            grid,
            rows,
            cols,
            sym,
        }
    }

    /// Diagonal value `M(z, z) = k(0)`.
    pub fn diagonal(&self) -> CMat {
        let mut s = CMat::zeros(self.rows, self.cols);
        for b in &self.sym {
            s += b;
        }
        s / Complex64::new(self.grid.len() as f64, 0.0)
    }

    pub fn to_dense(&self) -> CMat {
        let k = self.position();
        let g = self.grid.len();
        let mut m = CMat::zeros(g * self.rows, g * self.cols);
        for p in 0..g {
            let zp = self.grid.multi_index(p);
            for q in 0..g {
                let zq = self.grid.multi_index(q);
                let d: Vec<i64> = (0..self.grid.dim)
                    .map(|i| zp[i] as i64 - zq[i] as i64)
                    .collect();
                let blk = &k[self.grid.flat_index(&d)];
                m.view_mut((p * self.rows, q * self.cols), (self.rows, self.cols))
                    .copy_from(blk);
            }
        }
        m
    }
}

/// Smoothing kernel on the fiber grids, one block per base point, acting on grid
/// samples (quadrature weight included): `(Kf)(z) = Σ_w M(z, w) f(w)`.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelBlock {
    Dense(CMat),
    Circulant(Circulant),
}

impl KernelBlock {
    pub fn to_dense(&self) -> CMat {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Circulant(c) => c.to_dense(),
        }
    }

    /// `tr M(z, z)` at every grid point.
    pub fn diagonal_traces(&self, rank: usize, g: usize) -> Vec<Complex64> {
        match self {
            Self::Dense(m) => (0..g)
                .map(|p| (0..rank).map(|a| m[(p * rank + a, p * rank + a)]).sum())
                .collect(),
            Self::Circulant(c) => vec![c.diagonal().trace(); g],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingKernel {
    pub rank: usize,
    pub blocks: Vec<KernelBlock>,
}

impl SmoothingKernel {
    /// `E A E^* h` for an operator family given in its section bases.
    pub fn from_operator(op: &LeafwiseOperatorFamily) -> Result<Self> {
        if op.domain != op.codomain {
            return Err(Error::Dimension(
                "kernel of an operator between different bundles".into(),
            ));
        }
        let grid = op.space.grid;
        let e = op.domain.eval_grid(&grid)?;
        let h = Complex64::new(grid.weight(), 0.0);
        let blocks = (0..op.n_base())
            .map(|x| KernelBlock::Dense(&e * op.dense(x) * e.adjoint() * h))
            .collect();
        Ok(Self {
            rank: op.domain.rank(),
            blocks,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| match (a, b) {
                (KernelBlock::Circulant(p), KernelBlock::Circulant(q)) => {
                    KernelBlock::Circulant(p.mul(q))
                }
                _ => KernelBlock::Dense(a.to_dense() * b.to_dense()),
            })
            .collect();
        Ok(Self {
            rank: self.rank,
            blocks,
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| match (a, b) {
                (KernelBlock::Circulant(p), KernelBlock::Circulant(q)) => {
                    KernelBlock::Circulant(p.add(&q.scale(Complex64::new(-1.0, 0.0))))
                }
                _ => KernelBlock::Dense(a.to_dense() - b.to_dense()),
            })
            .collect();
        Self {
            rank: self.rank,
            blocks,
        }
    }

    /// Average `K_x(z, w) ← |G^x|⁻¹ Σ_{g ∈ G^x} K_{t(g)}(g⁻¹z, g⁻¹w)` over grid-preserving arrows.
    pub fn invariant_average(&self, space: &FiberedGSpace) -> Result<Self> {
        let gp = &space.groupoid;
        let r = self.rank;
        let g = space.fiber_len();
        let dense: Vec<CMat> = self.blocks.iter().map(|b| b.to_dense()).collect();
        let mut out = Vec::with_capacity(space.n_base());
        for x in 0..space.n_base() {
            let arrows: Vec<usize> = gp.from_object(x).collect();
            let mut acc = CMat::zeros(g * r, g * r);
            for &a in &arrows {
                let perm = space.grid_perm(gp.inverse(a))?;
                let src = &dense[gp.target(a)];
                for p in 0..g {
                    for q in 0..g {
                        for i in 0..r {
                            for j in 0..r {
                                acc[(p * r + i, q * r + j)] +=
                                    src[(perm[p] * r + i, perm[q] * r + j)];
                            }
                        }
                    }
                }
            }
            out.push(KernelBlock::Dense(
                acc / Complex64::new(arrows.len() as f64, 0.0),
            ));
        }
        Ok(Self {
            rank: r,
            blocks: out,
        })
    }

    /// Largest `|K_{t(g)}(z, w) − K_{s(g)}(g z, g w)|`.
    pub fn invariance_defect(&self, space: &FiberedGSpace) -> Result<f64> {
        let gp = &space.groupoid;
        let r = self.rank;
        let g = space.fiber_len();
        let dense: Vec<CMat> = self.blocks.iter().map(|b| b.to_dense()).collect();
        let mut worst: f64 = 0.0;
        for a in 0..gp.n_arrows() {
            let perm = space.grid_perm(a)?;
            let (s, t) = (&dense[gp.source(a)], &dense[gp.target(a)]);
            let moved = CMat::from_fn(g * r, g * r, |u, v| {
                s[(perm[u / r] * r + u % r, perm[v / r] * r + v % r)]
            });
            worst = worst.max(max_abs(&(t - moved)));
        }
        Ok(worst)
    }
}

/// `τ(K) = Σ_x w_x Ω_x Σ_z c(z) tr k_x(z, z) |dz|`.
pub fn trace_tau(
    k: &SmoothingKernel,
    space: &FiberedGSpace,
    cutoff: &CutoffDensity,
    omega: &TransversalDensity,
) -> Result<Complex64> {
    if k.blocks.len() != space.n_base() {
        return Err(Error::Dimension(
            "kernel blocks differ from base points".into(),
        ));
    }
    let g = space.fiber_len();
    let mut total = Complex64::new(0.0, 0.0);
    for (x, b) in k.blocks.iter().enumerate() {
        let d = b.diagonal_traces(k.rank, g);
        let s: Complex64 = d.iter().zip(&cutoff.values[x]).map(|(t, c)| t * c).sum();
        total += s * space.base.weights[x] * omega.values[x];
    }
    Ok(total)
}

/// `Σ_x w_x Ω_x Σ_z c(z) Σ_{|ν_i| ≤ N} tr a(x, z, ν) |dz|` for a symbol of order −∞.
pub fn trace_symbol_formula(
    a: &SymbolData,
    cutoff_modes: usize,
    space: &FiberedGSpace,
    cutoff: &CutoffDensity,
    omega: &TransversalDensity,
) -> Result<Complex64> {
    if a.order.is_some() {
        return Err(Error::NotSmoothing(
            "symbol trace formula needs an order −∞ symbol".into(),
        ));
    }
    if a.rows != a.cols {
        return Err(Error::Dimension("trace of a non-square symbol".into()));
    }
    let basis = SectionBasis::fourier(space.dim(), cutoff_modes, 1)?;
    let h = space.grid.weight();
    let mut total = Complex64::new(0.0, 0.0);
    for x in 0..space.n_base() {
        let mut s = Complex64::new(0.0, 0.0);
        for (p, z) in space.grid.points().iter().enumerate() {
            let c = cutoff.values[x][p];
            if c == 0.0 {
                continue;
            }
            for m in 0..basis.n_modes() {
                s += a.eval(x, z, &basis.mode(m)).trace() * c;
            }
        }
        total += s * h * space.base.weights[x] * omega.values[x];
    }
    Ok(total)
}

/// Whether every block of the family is a multiplier and every arrow a pure translation.
pub fn translation_invariant(op: &LeafwiseOperatorFamily) -> bool {
    op.is_multiplier()
        && (0..op.space.groupoid.n_arrows()).all(|g| {
            let m = op.space.act(g);
            m.a == crate::groupoid::AffineMap::identity(m.dim).a && m.preserves(&op.space.grid)
        })
        && op.blocks.windows(2).all(|w| w[0] == w[1])
}
