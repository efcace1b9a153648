use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::groupoid::{AffineMap, CutoffDensity, FiberedGSpace, TorusGrid, TransversalDensity};
use crate::{Error, Result};

/// Bitmasks of the `k`-element subsets of `{0..r}`, in increasing order.
pub fn subsets(r: usize, k: usize) -> Vec<u8> {
    (0u8..(1 << r))
        .filter(|m| m.count_ones() as usize == k)
        .collect()
}

/// Leafwise differential form sampled on the fiber grids.
///
/// `comps[i][x * G + p]` is the coefficient of `dz_I` (with `I = subsets(r,k)[i]`)
/// at grid point `p` over base point `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct FoliatedForm {
    pub grid: TorusGrid,
    pub n_base: usize,
    pub degree: usize,
    pub comps: Vec<Vec<Complex64>>,
}

fn spectral_partial(grid: &TorusGrid, data: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = grid.n;
    let stride = if axis == 0 { 1 } else { n };
    let lines = grid.len() / n;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for l in 0..lines {
        let start = if axis == 0 { l * n } else { l };
        for (i, b) in buf.iter_mut().enumerate() {
            *b = data[start + i * stride];
        }
        fwd.process(&mut buf);
        for (i, b) in buf.iter_mut().enumerate() {
            let k = if 2 * i < n {
                i as f64
            } else if 2 * i == n {
                0.0
            } else {
                i as f64 - n as f64
            };
            *b *= Complex64::new(0.0, 2.0 * PI * k / n as f64);
        }
        inv.process(&mut buf);
        for (i, b) in buf.iter().enumerate() {
            out[start + i * stride] = *b;
        }
    }
    out
}

impl FoliatedForm {
    pub fn zero(space: &FiberedGSpace, degree: usize) -> Result<Self> {
        let r = space.dim();
        if degree > r {
            return Err(Error::Degree(format!(
                "degree {degree} on {r}-dimensional leaves"
            )));
        }
        let len = space.n_base() * space.fiber_len();
        let comps = vec![vec![Complex64::new(0.0, 0.0); len]; subsets(r, degree).len()];
        Ok(Self {
            grid: space.grid,
            n_base: space.n_base(),
            degree,
            comps,
        })
    }

    /// Samples `f(x, z)`, which returns the components in `subsets` order.
    pub fn from_fn(
        space: &FiberedGSpace,
        degree: usize,
        f: impl Fn(usize, &[f64]) -> Vec<Complex64>,
    ) -> Result<Self> {
        let mut form = Self::zero(space, degree)?;
        let g = space.fiber_len();
        for x in 0..space.n_base() {
            for p in 0..g {
                let v = f(x, &space.grid.point(p));
                if v.len() != form.comps.len() {
                    return Err(Error::Dimension(format!(
                        "{} components given, {} expected",
                        v.len(),
                        form.comps.len()
                    )));
                }
                for (i, c) in v.into_iter().enumerate() {
                    form.comps[i][x * g + p] = c;
                }
            }
        }
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.n_base != other.n_base {
            return Err(Error::Dimension("forms live on different spaces".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        if self.degree != other.degree {
            return Err(Error::Degree("adding forms of different degree".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            for (u, v) in a.iter_mut().zip(b) {
                *u += v;
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(u, v)| (u - v).norm()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let r = self.dim();
        let k = self.degree + other.degree;
        if k > r {
            return Err(Error::Degree(format!(
                "wedge of degree {k} on {r}-dimensional leaves"
            )));
        }
        let out_sets = subsets(r, k);
        let len = self.comps.first().map_or(0, |c| c.len());
        let mut comps = vec![vec![Complex64::new(0.0, 0.0); len]; out_sets.len()];
        for (i, &a) in subsets(r, self.degree).iter().enumerate() {
            for (j, &b) in subsets(r, other.degree).iter().enumerate() {
                if a & b != 0 {
                    continue;
                }
                let s = shuffle_sign(a, b);
                let o = out_sets.iter().position(|&m| m == a | b).unwrap();
                for q in 0..len {
                    comps[o][q] += self.comps[i][q] * other.comps[j][q] * s;
                }
            }
        }
        Ok(Self {
            grid: self.grid,
            n_base: self.n_base,
            degree: k,
            comps,
        })
    }

    /// Leafwise exterior derivative by spectral differentiation on the fiber grid.
    pub fn d_leafwise(&self) -> Result<Self> {
        let r = self.dim();
        if self.degree >= r {
            return Err(Error::Degree(format!(
                "d of a degree-{} form on {r}-dimensional leaves",
                self.degree
            )));
        }
        let out_sets = subsets(r, self.degree + 1);
        let g = self.grid.len();
        let len = self.n_base * g;
        let mut comps = vec![vec![Complex64::new(0.0, 0.0); len]; out_sets.len()];
        for (i, &a) in subsets(r, self.degree).iter().enumerate() {
            for j in 0..r {
                if a & (1 << j) != 0 {
                    continue;
                }
                let s = shuffle_sign(1 << j, a);
                let o = out_sets.iter().position(|&m| m == a | (1 << j)).unwrap();
                for x in 0..self.n_base {
                    let part = spectral_partial(&self.grid, &self.comps[i][x * g..(x + 1) * g], j);
                    for (q, v) in part.into_iter().enumerate() {
                        comps[o][x * g + q] += v * s;
                    }
                }
            }
        }
        Ok(Self {
            grid: self.grid,
            n_base: self.n_base,
            degree: self.degree + 1,
            comps,
        })
    }

    /// Pull back the forms over `from` along `map: fiber(to) → fiber(from)`, landing over `to`.
    fn pullback_fiber(
        &self,
        map: &AffineMap,
        from: usize,
        out: &mut [Vec<Complex64>],
        to: usize,
        weight: f64,
    ) -> Result<()> {
        let r = self.dim();
        let g = self.grid.len();
        let sets = subsets(r, self.degree);
        let a = map.jacobian();
        for p in 0..g {
            let q = map.apply_index(&self.grid, p).ok_or_else(|| {
                Error::Unsupported("pullback along a map that does not preserve the grid".into())
            })?;
            for (i, &si) in sets.iter().enumerate() {
                let mut v = Complex64::new(0.0, 0.0);
                for (j, &sj) in sets.iter().enumerate() {
                    let m = minor(&a, r, sj, si);
                    if m != 0.0 {
                        v += self.comps[j][from * g + q] * m;
                    }
                }
                out[i][to * g + p] += v * weight;
            }
        }
        Ok(())
    }

    /// Projection onto invariant forms by averaging `act(g⁻¹)^*` over `G^x` with counting measure.
    pub fn invariant_project(&self, space: &FiberedGSpace) -> Result<Self> {
        let gp = &space.groupoid;
        let mut out = Self {
            comps: vec![vec![Complex64::new(0.0, 0.0); self.comps[0].len()]; self.comps.len()],
            ..self.clone()
        };
        for x in 0..self.n_base {
            let arrows: Vec<usize> = gp.from_object(x).collect();
            let w = 1.0 / arrows.len() as f64;
            for g in arrows {
                self.pullback_fiber(space.act(gp.inverse(g)), gp.target(g), &mut out.comps, x, w)?;
            }
        }
        Ok(out)
    }

    /// Largest entry of `act(g)^* α_{s(g)} − α_{t(g)}`.
    pub fn invariance_defect(&self, space: &FiberedGSpace) -> Result<f64> {
        let gp = &space.groupoid;
        let mut worst: f64 = 0.0;
        for g in 0..gp.n_arrows() {
            let mut pulled =
                vec![vec![Complex64::new(0.0, 0.0); self.comps[0].len()]; self.comps.len()];
            self.pullback_fiber(space.act(g), gp.source(g), &mut pulled, gp.target(g), 1.0)?;
            let t = gp.target(g);
            let gl = self.grid.len();
            for (a, b) in pulled.iter().zip(&self.comps) {
                for p in 0..gl {
                    worst = worst.max((a[t * gl + p] - b[t * gl + p]).norm());
                }
            }
        }
        Ok(worst)
    }
}

/// Sign of the permutation sorting the concatenation of index sets `a` then `b`.
pub fn shuffle_sign(a: u8, b: u8) -> f64 {
    let mut inversions = 0;
    for i in 0..8 {
        if a & (1 << i) != 0 {
            inversions += (b & ((1u16 << i) - 1) as u8).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Minor of the row-major `r×r` matrix `a` with rows `rows` and columns `cols`.
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

/// `∫ α = Σ_x w_x Ω_x Σ_z c(z) α(z) |dz|` for an invariant top-degree form.
pub fn integrate_invariant(
    form: &FoliatedForm,
    space: &FiberedGSpace,
    cutoff: &CutoffDensity,
    omega: &TransversalDensity,
    tol: f64,
) -> Result<Complex64> {
    if form.degree != space.dim() {
        return Err(Error::Degree(format!(
            "integrating a degree-{} form over {}-dimensional leaves",
            form.degree,
            space.dim()
        )));
    }
    let defect = form.invariance_defect(space)?;
    if defect > tol {
        return Err(Error::NotInvariant { defect });
    }
    let g = space.fiber_len();
    let w = space.grid.weight();
    let mut total = Complex64::new(0.0, 0.0);
    for x in 0..space.n_base() {
        let mut s = Complex64::new(0.0, 0.0);
        for p in 0..g {
            s += form.comps[0][x * g + p] * cutoff.values[x][p];
        }
        total += s * w * space.base.weights[x] * omega.values[x];
    }
    Ok(total)
}
