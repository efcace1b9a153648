//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn zeros(r: usize, cols: usize) -> CMat {
    CMat::zeros(r, cols)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Numerical rank of `m` with a relative threshold `rel_tol`.
///
/// Fails with [`Error::RankGap`] when a singular value lies within a factor
/// `gap` of the threshold on either side.
pub fn rank_with_gap(m: &CMat, rel_tol: f64, gap: f64) -> Result<usize> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0);
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    let thr = rel_tol * smax;
    let mut rank = 0;
    for &s in sv.iter() {
        if s > thr / gap && s < thr * gap {
            return Err(Error::RankGap(format!(
                "singular value {s:e} within factor {gap} of threshold {thr:e}"
            )));
        }
        if s >= thr {
            rank += 1;
        }
    }
    Ok(rank)
}

/// Assemble a 2x2 block matrix.
pub fn blocks(a: &CMat, b: &CMat, cc: &CMat, d: &CMat) -> CMat {
    let (r0, c0) = a.shape();
    let (r1, c1) = d.shape();
    assert_eq!(b.shape(), (r0, c1));
    assert_eq!(cc.shape(), (r1, c0));
    let mut m = CMat::zeros(r0 + r1, c0 + c1);
    m.view_mut((0, 0), (r0, c0)).copy_from(a);
    m.view_mut((0, c0), (r0, c1)).copy_from(b);
    m.view_mut((r0, 0), (r1, c0)).copy_from(cc);
    m.view_mut((r0, c0), (r1, c1)).copy_from(d);
    m
}

/// Block-diagonal projection `diag(0, 1)` with blocks of size `n0`, `n1`.
pub fn e_block(n0: usize, n1: usize) -> CMat {
    let mut m = CMat::zeros(n0 + n1, n0 + n1);
    for i in n0..n0 + n1 {
        m[(i, i)] = c(1.0);
    }
    m
}

/// `diag(0, 1)` repeated at each of `g` points, point-major.
pub fn e_grid(rank_dom: usize, rank_cod: usize, g: usize) -> CMat {
    let r = rank_dom + rank_cod;
    CMat::from_fn(g * r, g * r, |i, j| {
        if i == j && i % r >= rank_dom {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Idempotency defect `‖P² − P‖` in operator norm.
pub fn idempotent_defect(p: &CMat) -> f64 {
    op_norm(&(p * p - p))
}
