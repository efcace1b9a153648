use super::operator::{LeafwiseOperatorFamily, OperatorMatrix};
use crate::linalg::{rank_with_gap, CMat};
use crate::{Error, Result};

/// Relative singular-value threshold separating kernel from range.
pub const RANK_TOL: f64 = 1e-8;

const GAP: f64 = 10.0;

fn rank_against(m: &CMat, thr: f64) -> Result<usize> {
    let mut rank = 0;
    for &s in m.clone().singular_values().iter() {
        if s > thr / GAP && s < thr * GAP {
            return Err(Error::RankGap(format!("singular value {s:e} near threshold {thr:e}")));
        }
        if s >= thr {
            rank += 1;
        }
    }
    Ok(rank)
}

/// `(dim ker D_x, dim coker D_x)` per base point, from singular values.
///
/// Fails with a rank-gap error when a singular value sits within a factor 10 of
/// the threshold.
pub fn kernel_cokernel(op: &LeafwiseOperatorFamily) -> Result<Vec<(usize, usize)>> {
    op.blocks
        .iter()
        .map(|b| match b {
            OperatorMatrix::Dense(m) => {
                let rank = rank_with_gap(m, RANK_TOL, GAP)?;
                Ok((m.ncols() - rank, m.nrows() - rank))
            }
            OperatorMatrix::Diagonal(v) => {
                let scale = v
                    .iter()
                    .map(|m| m.clone().singular_values().iter().cloned().fold(0.0, f64::max))
                    .fold(0.0, f64::max);
                let mut dims = (0, 0);
                for m in v {
                    let rank = rank_against(m, RANK_TOL * scale)?;
                    dims.0 += m.ncols() - rank;
                    dims.1 += m.nrows() - rank;
                }
                Ok(dims)
            }
        })
        .collect()
}

/// `dim ker D_x − dim coker D_x` per base point.
pub fn analytic_index(op: &LeafwiseOperatorFamily) -> Result<Vec<i64>> {
    Ok(kernel_cokernel(op)?.into_iter().map(|(k, c)| k as i64 - c as i64).collect())
}
