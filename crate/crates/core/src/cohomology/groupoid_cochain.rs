use nalgebra::DMatrix;
use num_complex::Complex64;

use super::form::FoliatedForm;
use crate::groupoid::{FiberedGSpace, GroupoidModel};
use crate::linalg::rank_with_gap;
use crate::{Error, Result};

/// Composable `p`-tuples `(g_1, …, g_p)` with `t(g_i) = s(g_{i+1})`; for `p = 0` the objects.
pub fn nerve(groupoid: &GroupoidModel, p: usize) -> Vec<Vec<usize>> {
    if p == 0 {
        return (0..groupoid.n_objects()).map(|x| vec![x]).collect();
    }
    let mut out: Vec<Vec<usize>> = (0..groupoid.n_arrows()).map(|g| vec![g]).collect();
    for _ in 1..p {
        let mut next = Vec::new();
        for t in &out {
            let last = *t.last().unwrap();
            for g in 0..groupoid.n_arrows() {
                if groupoid.source(g) == groupoid.target(last) {
                    let mut u = t.clone();
                    u.push(g);
                    next.push(u);
                }
            }
        }
        out = next;
    }
    out
}

fn face(groupoid: &GroupoidModel, t: &[usize], i: usize) -> Vec<usize> {
    let p = t.len();
    if p == 1 {
        return vec![if i == 0 {
            groupoid.target(t[0])
        } else {
            groupoid.source(t[0])
        }];
    }
    if i == 0 {
        return t[1..].to_vec();
    }
    if i == p {
        return t[..p - 1].to_vec();
    }
    let mut u = t[..i - 1].to_vec();
    u.push(
        groupoid
            .compose(t[i - 1], t[i])
            .expect("composable nerve tuple"),
    );
    u.extend_from_slice(&t[i + 1..]);
    u
}

/// Matrix of `δ: C^p → C^{p+1}` in the nerve bases.
pub fn groupoid_differential(groupoid: &GroupoidModel, p: usize) -> DMatrix<f64> {
    let src = nerve(groupoid, p);
    let dst = nerve(groupoid, p + 1);
    let mut d = DMatrix::zeros(dst.len(), src.len());
    for (row, t) in dst.iter().enumerate() {
        for i in 0..=p + 1 {
            let f = face(groupoid, t, i);
            let col = src
                .iter()
                .position(|s| *s == f)
                .expect("face lies in the nerve");
            d[(row, col)] += if i % 2 == 0 { 1.0 } else { -1.0 };
        }
    }
    d
}

/// Dimensions of the groupoid cohomology `H^0 … H^{max_p}` with complex coefficients.
pub fn groupoid_cohomology_dims(groupoid: &GroupoidModel, max_p: usize) -> Result<Vec<usize>> {
    let rank = |p: usize| -> Result<usize> {
        let d = groupoid_differential(groupoid, p).map(|v| Complex64::new(v, 0.0));
        rank_with_gap(&d, 1e-10, 10.0)
    };
    let mut ranks = Vec::with_capacity(max_p + 1);
    for p in 0..=max_p {
        ranks.push(rank(p)?);
    }
    Ok((0..=max_p)
        .map(|p| nerve(groupoid, p).len() - ranks[p] - if p > 0 { ranks[p - 1] } else { 0 })
        .collect())
}

/// Degree-0 part of the van Est map: `ν ↦ ν ∘ μ` as a leafwise 0-form.
pub fn van_est_degree0(nu: &[f64], space: &FiberedGSpace) -> Result<FoliatedForm> {
    if nu.len() != space.n_base() {
        return Err(Error::Dimension(
            "0-cochain length differs from base".into(),
        ));
    }
    FoliatedForm::from_fn(space, 0, |x, _| vec![Complex64::new(nu[x], 0.0)])
}
