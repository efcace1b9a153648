use num_complex::Complex64;

use super::kernel::{translation_invariant, Circulant, KernelBlock, SmoothingKernel};
use super::operator::{LeafwiseOperatorFamily, OperatorMatrix};
use super::parametrix::Parametrix;
use crate::groupoid::{CutoffDensity, FiberedGSpace, TorusGrid, TransversalDensity};
use crate::linalg::{blocks, e_grid, frobenius, CMat};
use crate::{Error, Result};

pub const IDEMPOTENT_TOL: f64 = 1e-8;
const NEWTON_TOL: f64 = 1e-11;
const NEWTON_STEPS: usize = 50;

/// Index idempotent `P = e + S` on sections of `E ⊕ F` sampled on the fiber grids,
/// with `e = diag(0, 1)` and `S` a smoothing kernel.
///
/// Grid layout is point-major: index `p·(r_E + r_F) + a`, with `a < r_E` on `E`.
#[derive(Clone, Debug)]
pub struct IndexIdempotent {
    pub rank_dom: usize,
    pub rank_cod: usize,
    pub grid: TorusGrid,
    pub s: SmoothingKernel,
    pub locality: Option<f64>,
    pub defect: f64,
}

/// `[[S0², S0(1+S0)Q], [S1 D, 1 − S1²]] − diag(0, 1)` in the section bases.
fn mode_blocks(d: &CMat, q: &CMat, s0: &CMat, s1: &CMat) -> CMat {
    let n0 = s0.nrows();
    let a = s0 * s0;
    let b = s0 * (CMat::identity(n0, n0) + s0) * q;
    let c = s1 * d;
    let dd = -(s1 * s1);
    blocks(&a, &b, &c, &dd)
}

fn e_diag(rank_dom: usize, rank_cod: usize) -> CMat {
    let r = rank_dom + rank_cod;
    CMat::from_fn(r, r, |i, j| {
        if i == j && i >= rank_dom {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn index_idempotent(
    op: &LeafwiseOperatorFamily,
    par: &Parametrix,
    locality: Option<f64>,
) -> Result<IndexIdempotent> {
    let (dom, cod) = (&op.domain, &op.codomain);
    let grid = op.space.grid;
    let (rd, rc) = (dom.rank(), cod.rank());
    let r = rd + rc;
    let g = grid.len();
    let mut out = Vec::with_capacity(op.n_base());
    let mut defect: f64 = 0.0;
    if translation_invariant(op) {
        for x in 0..op.n_base() {
            let (
                OperatorMatrix::Diagonal(dv),
                OperatorMatrix::Diagonal(qv),
                OperatorMatrix::Diagonal(s0v),
                OperatorMatrix::Diagonal(s1v),
            ) = (&op.blocks[x], &par.q[x], &par.r0[x], &par.r1[x])
            else {
                return Err(Error::Unsupported(
                    "mixed multiplier/dense parametrix".into(),
                ));
            };
            let per_mode: Vec<CMat> = (0..dv.len())
                .map(|m| mode_blocks(&dv[m], &qv[m], &s0v[m], &s1v[m]))
                .collect();
            let mut c = Circulant::from_multiplier(grid, dom, &per_mode)?;
            if let Some(eps) = locality {
                c = truncate_circulant(&c, eps);
                c = newton_circulant(&c, rd, rc)?;
            }
            out.push(KernelBlock::Circulant(c));
        }
    } else {
        let ed = dom.eval_grid(&grid)?;
        let ec = cod.eval_grid(&grid)?;
        let mut etot = CMat::zeros(g * r, dom.len() + cod.len());
        for p in 0..g {
            for a in 0..rd {
                for k in 0..dom.len() {
                    etot[(p * r + a, k)] = ed[(p * rd + a, k)];
                }
            }
            for b in 0..rc {
                for k in 0..cod.len() {
                    etot[(p * r + rd + b, dom.len() + k)] = ec[(p * rc + b, k)];
                }
            }
        }
        let h = Complex64::new(grid.weight(), 0.0);
        for x in 0..op.n_base() {
            let d = op.dense(x);
            let q = par.q[x].to_dense(cod, dom);
            let s0 = par.r0[x].to_dense(dom, dom);
            let s1 = par.r1[x].to_dense(cod, cod);
            let sm = mode_blocks(&d, &q, &s0, &s1);
            let mut s = &etot * sm * etot.adjoint() * h;
            if let Some(eps) = locality {
                truncate_dense(&mut s, &grid, r, eps);
            }
            let (s, d) = newton_dense(s, rd, rc, g)?;
            defect = defect.max(d);
            out.push(KernelBlock::Dense(s));
        }
    }
    let s = SmoothingKernel {
        rank: r,
        blocks: out,
    };
    let mut idem = IndexIdempotent {
        rank_dom: rd,
        rank_cod: rc,
        grid,
        s,
        locality,
        defect,
    };
    if idem
        .s
        .blocks
        .iter()
        .any(|b| matches!(b, KernelBlock::Circulant(_)))
    {
        idem.defect = idem.idempotency_defect();
    }
    if idem.defect > IDEMPOTENT_TOL {
        return Err(Error::Convergence(format!(
            "idempotency defect {:e}",
            idem.defect
        )));
    }
    Ok(idem)
}

fn truncate_dense(s: &mut CMat, grid: &TorusGrid, r: usize, eps: f64) {
    let pts = grid.points();
    for p in 0..grid.len() {
        for q in 0..grid.len() {
            if grid.distance(&pts[p], &pts[q]) > eps {
                s.view_mut((p * r, q * r), (r, r))
                    .fill(Complex64::new(0.0, 0.0));
            }
        }
    }
}

fn truncate_circulant(c: &Circulant, eps: f64) -> Circulant {
    let mut k = c.position();
    let zero = vec![0.0; c.grid.dim];
    for (p, blk) in k.iter_mut().enumerate() {
        if c.grid.distance(&c.grid.point(p), &zero) > eps {
            blk.fill(Complex64::new(0.0, 0.0));
        }
    }
    Circulant::from_position(c.grid, &k)
}

/// `P ← 3P² − 2P³` on `P = e + S`, returning the new `S` and its defect.
fn newton_dense(mut s: CMat, rd: usize, rc: usize, g: usize) -> Result<(CMat, f64)> {
    let e = e_grid(rd, rc, g);
    for _ in 0..NEWTON_STEPS {
        let p = &e + &s;
        let p2 = &p * &p;
        let defect = frobenius(&(&p2 - &p));
        if defect < NEWTON_TOL {
            return Ok((s, defect));
        }
        let p3 = &p2 * &p;
        s = p2 * Complex64::new(3.0, 0.0) - p3 * Complex64::new(2.0, 0.0) - &e;
    }
    let p = &e + &s;
    let defect = frobenius(&(&p * &p - &p));
    if defect < IDEMPOTENT_TOL {
        return Ok((s, defect));
    }
    Err(Error::Convergence(format!(
        "Newton iteration stalled at defect {defect:e}"
    )))
}

fn newton_circulant(c: &Circulant, rd: usize, rc: usize) -> Result<Circulant> {
    let e = e_diag(rd, rc);
    let mut out = c.clone();
    for blk in out.sym.iter_mut() {
        let mut p = &e + &*blk;
        let mut ok = false;
        for _ in 0..NEWTON_STEPS {
            let p2 = &p * &p;
            if frobenius(&(&p2 - &p)) < NEWTON_TOL {
                ok = true;
                break;
            }
            let p3 = &p2 * &p;
            p = p2 * Complex64::new(3.0, 0.0) - p3 * Complex64::new(2.0, 0.0);
        }
        if !ok {
            return Err(Error::Convergence(
                "Newton iteration stalled on a circulant mode".into(),
            ));
        }
        *blk = p - &e;
    }
    Ok(out)
}

impl IndexIdempotent {
    pub fn rank(&self) -> usize {
        self.rank_dom + self.rank_cod
    }

    /// `e` block at a single grid point.
    pub fn e_point(&self) -> CMat {
        e_diag(self.rank_dom, self.rank_cod)
    }

    /// Largest Frobenius norm of `P² − P` over base points.
    pub fn idempotency_defect(&self) -> f64 {
        let g = self.grid.len();
        self.s
            .blocks
            .iter()
            .map(|b| match b {
                KernelBlock::Circulant(c) => {
                    let e = self.e_point();
                    c.sym
                        .iter()
                        .map(|s| {
                            let p = &e + s;
                            frobenius(&(&p * &p - &p))
                        })
                        .fold(0.0, f64::max)
                }
                KernelBlock::Dense(s) => {
                    let p = e_grid(self.rank_dom, self.rank_cod, g) + s;
                    frobenius(&(&p * &p - &p))
                }
            })
            .fold(0.0, f64::max)
    }

    /// `τ(P − e)`.
    pub fn trace(
        &self,
        space: &FiberedGSpace,
        cutoff: &CutoffDensity,
        omega: &TransversalDensity,
    ) -> Result<Complex64> {
        super::kernel::trace_tau(&self.s, space, cutoff, omega)
    }

    /// Largest kernel entry of `S` at leafwise distance greater than `eps`.
    pub fn leakage(&self, eps: f64) -> f64 {
        let r = self.rank();
        let pts = self.grid.points();
        let g = self.grid.len();
        let mut worst: f64 = 0.0;
        for b in &self.s.blocks {
            match b {
                KernelBlock::Dense(s) => {
                    for p in 0..g {
                        for q in 0..g {
                            if self.grid.distance(&pts[p], &pts[q]) > eps {
                                worst = worst.max(
                                    s.view((p * r, q * r), (r, r))
                                        .iter()
                                        .fold(0.0, |a, v| a.max(v.norm())),
                                );
                            }
                        }
                    }
                }
                KernelBlock::Circulant(c) => {
                    let zero = vec![0.0; self.grid.dim];
                    for (p, k) in c.position().iter().enumerate() {
                        if self.grid.distance(&pts[p], &zero) > eps {
                            worst = worst.max(k.iter().fold(0.0, |a, v| a.max(v.norm())));
                        }
                    }
                }
            }
        }
        worst
    }
}
