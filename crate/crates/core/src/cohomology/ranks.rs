use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::form::{shuffle_sign, subsets};
use crate::groupoid::FiberedGSpace;
use crate::linalg::{rank_with_gap, CMat};
use crate::{Error, Result};

struct ModeSpace {
    r: usize,
    band: i64,
    n_base: usize,
}

impl ModeSpace {
    fn modes(&self) -> Vec<Vec<i64>> {
        let side = 2 * self.band + 1;
        (0..side.pow(self.r as u32))
            .map(|m| {
                (0..self.r)
                    .map(|k| (m / side.pow(k as u32)) % side - self.band)
                    .collect()
            })
            .collect()
    }

    fn mode_index(&self, nu: &[i64]) -> Option<usize> {
        let side = 2 * self.band + 1;
        let mut idx = 0;
        for (k, &v) in nu.iter().enumerate() {
            if v.abs() > self.band {
                return None;
            }
            idx += ((v + self.band) * side.pow(k as u32)) as usize;
        }
        Some(idx)
    }

    fn size(&self, k: usize) -> usize {
        self.n_base * self.modes().len() * subsets(self.r, k).len()
    }

    fn index(&self, x: usize, mode: usize, set: usize, k: usize) -> usize {
        let nsets = subsets(self.r, k).len();
        (x * self.modes().len() + mode) * nsets + set
    }
}

fn averaging(space: &FiberedGSpace, ms: &ModeSpace, k: usize) -> Result<CMat> {
    let r = ms.r;
    let sets = subsets(r, k);
    let modes = ms.modes();
    let gp = &space.groupoid;
    let n = ms.size(k);
    let mut p = CMat::zeros(n, n);
    for x in 0..ms.n_base {
        let arrows: Vec<usize> = gp.from_object(x).collect();
        let w = 1.0 / arrows.len() as f64;
        for g in arrows {
            let phi = space.act(gp.inverse(g));
            let t = gp.target(g);
            for (mi, nu) in modes.iter().enumerate() {
                let image: Vec<i64> = (0..r)
                    .map(|i| (0..r).map(|j| phi.entry(j, i) * nu[j]).sum())
                    .collect();
                let mo = ms.mode_index(&image).ok_or_else(|| {
                    Error::Unsupported("fiber map does not preserve the mode box".into())
                })?;
                let ph: f64 = nu
                    .iter()
                    .zip(&phi.shift)
                    .map(|(v, s)| *v as f64 * (*s.numer() as f64 / *s.denom() as f64))
                    .sum();
                let phase = Complex64::from_polar(w, 2.0 * PI * ph);
                let a = phi.jacobian();
                for (ji, &sj) in sets.iter().enumerate() {
                    for (ii, &si) in sets.iter().enumerate() {
                        let m = minor(&a, r, sj, si);
                        if m != 0.0 {
                            p[(ms.index(x, mo, ii, k), ms.index(t, mi, ji, k))] += phase * m;
                        }
                    }
                }
            }
        }
    }
    Ok(p)
}

fn minor(a: &[f64], r: usize, rows: u8, cols: u8) -> f64 {
    let ri: Vec<usize> = (0..r).filter(|i| rows & (1 << i) != 0).collect();
    let ci: Vec<usize> = (0..r).filter(|i| cols & (1 << i) != 0).collect();
    match ri.len() {
        0 => 1.0,
        1 => a[ri[0] * r + ci[0]],
        _ => {
            a[ri[0] * r + ci[0]] * a[ri[1] * r + ci[1]]
                - a[ri[0] * r + ci[1]] * a[ri[1] * r + ci[0]]
        }
    }
}

fn differential(ms: &ModeSpace, k: usize) -> CMat {
    let r = ms.r;
    let (src, dst) = (subsets(r, k), subsets(r, k + 1));
    let modes = ms.modes();
    let mut d = CMat::zeros(ms.size(k + 1), ms.size(k));
    for x in 0..ms.n_base {
        for (mi, nu) in modes.iter().enumerate() {
            for (si, &a) in src.iter().enumerate() {
                for j in 0..r {
                    if a & (1 << j) != 0 || nu[j] == 0 {
                        continue;
                    }
                    let o = dst.iter().position(|&m| m == a | (1 << j)).unwrap();
                    let v = Complex64::new(0.0, 2.0 * PI * nu[j] as f64) * shuffle_sign(1 << j, a);
                    d[(ms.index(x, mi, o, k + 1), ms.index(x, mi, si, k))] += v;
                }
            }
        }
    }
    d
}

fn range_basis(p: &CMat) -> Result<CMat> {
    let svd = p.clone().svd(true, false);
    let u = svd
        .u
        .ok_or_else(|| Error::Convergence("SVD failed".into()))?;
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 0.5)
        .collect();
    Ok(DMatrix::from_fn(p.nrows(), cols.len(), |i, j| {
        u[(i, cols[j])]
    }))
}

/// Betti numbers of the invariant leafwise de Rham complex restricted to
/// Fourier modes `|ν_i| ≤ band`.
pub fn invariant_cohomology_ranks(space: &FiberedGSpace, band: i64) -> Result<Vec<usize>> {
    let ms = ModeSpace {
        r: space.dim(),
        band,
        n_base: space.n_base(),
    };
    let r = ms.r;
    let bases: Vec<CMat> = (0..=r)
        .map(|k| averaging(space, &ms, k).and_then(|p| range_basis(&p)))
        .collect::<Result<_>>()?;
    let mut ranks = vec![0usize; r];
    for k in 0..r {
        let dk = bases[k + 1].adjoint() * differential(&ms, k) * &bases[k];
        ranks[k] = rank_with_gap(&dk, 1e-9, 10.0)?;
    }
    Ok((0..=r)
        .map(|k| {
            let out = if k < r { ranks[k] } else { 0 };
            let inc = if k > 0 { ranks[k - 1] } else { 0 };
            bases[k].ncols() - out - inc
        })
        .collect())
}
