use std::f64::consts::PI;

use num_complex::Complex64;

use crate::groupoid::{AffineMap, TorusGrid};
use crate::linalg::CMat;
use crate::{Error, Result};

pub const MAX_CUTOFF: usize = 32;

/// Finite-dimensional space of sections over one fiber, with its sampling on the grid.
#[derive(Clone, Debug, PartialEq)]
pub enum SectionBasis {
    /// `e_ν ⊗ e_a` with `|ν_i| ≤ cutoff` and `a < rank`, ordered mode-major.
    Fourier {
        dim: usize,
        cutoff: usize,
        rank: usize,
    },
    /// Lowest Landau levels `ψ_{n,j}` of the line bundle of degree `degree` on the
    /// torus with periods `(lx, ly)`, levels `lo..lo+levels`, `j < |degree|`.
    Landau {
        degree: i64,
        lo: usize,
        levels: usize,
        lx: f64,
        ly: f64,
    },
}

impl SectionBasis {
    pub fn fourier(dim: usize, cutoff: usize, rank: usize) -> Result<Self> {
        if cutoff > MAX_CUTOFF {
            return Err(Error::Parameter(format!(
                "cutoff {cutoff} exceeds {MAX_CUTOFF}"
            )));
        }
        if rank == 0 {
            return Err(Error::Parameter("bundle rank must be positive".into()));
        }
        Ok(Self::Fourier { dim, cutoff, rank })
    }

    pub fn landau(degree: i64, lo: usize, levels: usize) -> Result<Self> {
        Self::landau_rect(degree, lo, levels, 1.0, 1.0)
    }

    pub fn landau_rect(degree: i64, lo: usize, levels: usize, lx: f64, ly: f64) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Parameter(
                "Landau levels need a nonzero degree".into(),
            ));
        }
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::Parameter("periods must be positive".into()));
        }
        Ok(Self::Landau {
            degree,
            lo,
            levels,
            lx,
            ly,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Fourier { dim, .. } => *dim,
            Self::Landau { .. } => 2,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Self::Fourier { rank, .. } => *rank,
            Self::Landau { .. } => 1,
        }
    }

    pub fn n_modes(&self) -> usize {
        match self {
            Self::Fourier { dim, cutoff, .. } => (2 * cutoff + 1).pow(*dim as u32),
            Self::Landau { degree, levels, .. } => levels * degree.unsigned_abs() as usize,
        }
    }

    pub fn len(&self) -> usize {
        self.n_modes() * self.rank()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lattice point of Fourier mode `m`.
    pub fn mode(&self, m: usize) -> Vec<i64> {
        match self {
            Self::Fourier { dim, cutoff, .. } => {
                let side = 2 * *cutoff as i64 + 1;
                (0..*dim)
                    .map(|k| (m as i64 / side.pow(k as u32)) % side - *cutoff as i64)
                    .collect()
            }
            Self::Landau { .. } => panic!("Landau basis has no lattice modes"),
        }
    }

    pub fn mode_index(&self, nu: &[i64]) -> Option<usize> {
        match self {
            Self::Fourier { cutoff, .. } => {
                let n = *cutoff as i64;
                let side = 2 * n + 1;
                let mut idx = 0;
                for (k, &v) in nu.iter().enumerate() {
                    if v.abs() > n {
                        return None;
                    }
                    idx += ((v + n) * side.pow(k as u32)) as usize;
                }
                Some(idx)
            }
            Self::Landau { .. } => None,
        }
    }

    /// Oscillator frequency of the Landau levels.
    pub fn omega(&self) -> f64 {
        match self {
            Self::Landau { degree, lx, ly, .. } => {
                2.0 * PI * degree.unsigned_abs() as f64 / (lx * ly)
            }
            _ => 0.0,
        }
    }

    /// Samples: row `p * rank + a`, column = basis index; values of the basis sections.
    pub fn eval_grid(&self, grid: &TorusGrid) -> Result<CMat> {
        if grid.dim != self.dim() {
            return Err(Error::Dimension(format!(
                "basis on T^{} sampled on T^{}",
                self.dim(),
                grid.dim
            )));
        }
        let rank = self.rank();
        let mut e = CMat::zeros(grid.len() * rank, self.len());
        match self {
            Self::Fourier { .. } => {
                if 2 * self.cutoff() >= grid.n {
                    return Err(Error::Parameter(format!(
                        "grid {} cannot resolve cutoff {}",
                        grid.n,
                        self.cutoff()
                    )));
                }
                for m in 0..self.n_modes() {
                    let nu = self.mode(m);
                    for p in 0..grid.len() {
                        let z = grid.point(p);
                        let ph: f64 = nu.iter().zip(&z).map(|(a, b)| *a as f64 * b).sum();
                        let v = Complex64::from_polar(1.0, 2.0 * PI * ph);
                        for a in 0..rank {
                            e[(p * rank + a, m * rank + a)] = v;
                        }
                    }
                }
            }
            Self::Landau { .. } => {
                for p in 0..grid.len() {
                    let z = grid.point(p);
                    for b in 0..self.len() {
                        e[(p, b)] = self.landau_eval(b, z[0], z[1]);
                    }
                }
            }
        }
        Ok(e)
    }

    fn cutoff(&self) -> usize {
        match self {
            Self::Fourier { cutoff, .. } => *cutoff,
            _ => 0,
        }
    }

    /// `(level, j)` of Landau basis index `b`.
    pub fn landau_label(&self, b: usize) -> (usize, usize) {
        match self {
            Self::Landau { degree, lo, .. } => {
                let dd = degree.unsigned_abs() as usize;
                (lo + b / dd, b % dd)
            }
            _ => panic!("not a Landau basis"),
        }
    }

    /// `ψ_{n,j}(x, y) = Lx^{-1/2} Σ_m φ_n(y + m Ly + j Ly/d) e^{2πi (j + m d) x / Lx}`.
    pub fn landau_eval(&self, b: usize, x: f64, y: f64) -> Complex64 {
        let Self::Landau { degree, lx, ly, .. } = *self else {
            panic!("not a Landau basis")
        };
        let (n, j) = self.landau_label(b);
        let w = self.omega();
        let sw = w.sqrt();
        let reach = ((2.0 * n as f64 + 1.0).sqrt() + 8.0) / sw;
        let shift = j as f64 * ly / degree as f64;
        let m_lo = ((-reach - y - shift) / ly).floor() as i64 - 1;
        let m_hi = ((reach - y - shift) / ly).ceil() as i64 + 1;
        let mut s = Complex64::new(0.0, 0.0);
        for m in m_lo..=m_hi {
            let v = y + m as f64 * ly + shift;
            let k = j as f64 + m as f64 * degree as f64;
            s += Complex64::from_polar(
                w.powf(0.25) * hermite_function(n, sw * v),
                2.0 * PI * k * x / lx,
            );
        }
        s / lx.sqrt()
    }

    /// Matrix of `f ↦ f ∘ map` between fibers (same basis on both).
    pub fn pullback(&self, map: &AffineMap) -> Result<CMat> {
        let n = self.len();
        let mut l = CMat::zeros(n, n);
        match self {
            Self::Fourier { dim, rank, .. } => {
                for m in 0..self.n_modes() {
                    let nu = self.mode(m);
                    let image: Vec<i64> = (0..*dim)
                        .map(|i| (0..*dim).map(|j| map.entry(j, i) * nu[j]).sum())
                        .collect();
                    let mo = self.mode_index(&image).ok_or_else(|| {
                        Error::Unsupported("fiber map does not preserve the Fourier box".into())
                    })?;
                    let ph: f64 = nu
                        .iter()
                        .zip(&map.shift)
                        .map(|(v, s)| *v as f64 * (*s.numer() as f64 / *s.denom() as f64))
                        .sum();
                    let phase = Complex64::from_polar(1.0, 2.0 * PI * ph);
                    for a in 0..*rank {
                        l[(mo * rank + a, m * rank + a)] = phase;
                    }
                }
            }
            Self::Landau { degree, lx, ly, .. } => {
                let th = *map.shift[0].numer() as f64 / *map.shift[0].denom() as f64;
                let ty = *map.shift[1].numer();
                let lattice = (*degree as f64 * th / lx).round();
                if !map.a.eq(&AffineMap::identity(2).a)
                    || ty != 0
                    || (*degree as f64 * th / lx - lattice).abs() > 1e-12
                    || *ly != 1.0
                {
                    return Err(Error::Unsupported(
                        "Landau sections only pull back along x-translations by multiples of Lx/d"
                            .into(),
                    ));
                }
                for b in 0..n {
                    let (_, j) = self.landau_label(b);
                    l[(b, b)] = Complex64::from_polar(1.0, 2.0 * PI * j as f64 * th / lx);
                }
            }
        }
        Ok(l)
    }
}

/// Normalised Hermite function `h_n(t) = (2^n n! √π)^{-1/2} H_n(t) e^{-t²/2}`.
pub fn hermite_function(n: usize, t: f64) -> f64 {
    let mut h0 = PI.powf(-0.25) * (-t * t / 2.0).exp();
    if n == 0 {
        return h0;
    }
    let mut h1 = 2f64.sqrt() * t * h0;
    for k in 1..n {
        let h2 =
            (2.0 / (k as f64 + 1.0)).sqrt() * t * h1 - (k as f64 / (k as f64 + 1.0)).sqrt() * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_functions_orthonormal() {
        let h = 0.01;
        for a in 0..6 {
            for b in 0..6 {
                let s: f64 = (-1200..=1200)
                    .map(|i| {
                        hermite_function(a, i as f64 * h) * hermite_function(b, i as f64 * h) * h
                    })
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-10, "{a} {b} {s}");
            }
        }
    }

    #[test]
    fn landau_quasi_periodicity() {
        for d in [-2i64, 1, 3] {
            let b = SectionBasis::landau(d, 0, 3).unwrap();
            for k in 0..b.len() {
                let (x, y) = (0.37, 0.21);
                let lhs = b.landau_eval(k, x, y + 1.0);
                let rhs =
                    Complex64::from_polar(1.0, -2.0 * PI * d as f64 * x) * b.landau_eval(k, x, y);
                assert!((lhs - rhs).norm() < 1e-12);
                assert!((b.landau_eval(k, x + 1.0, y) - b.landau_eval(k, x, y)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn landau_grid_orthonormal() {
        let b = SectionBasis::landau(2, 0, 9).unwrap();
        let g = TorusGrid::new(2, 18).unwrap();
        let e = b.eval_grid(&g).unwrap();
        let gram = e.adjoint() * &e * Complex64::new(g.weight(), 0.0);
        let defect = crate::linalg::max_abs(&(gram - CMat::identity(b.len(), b.len())));
        assert!(defect < 1e-9, "{defect}");
    }
}
