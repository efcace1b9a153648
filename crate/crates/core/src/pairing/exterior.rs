use num_complex::Complex64;

use crate::{Error, Result};

/// Element of the exterior algebra on `n` generators with constant complex
/// coefficients, indexed by bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct Grassmann {
    pub n: usize,
    pub c: Vec<Complex64>,
}

pub const MAX_GENERATORS: usize = 12;

/// Sign of `e_a ∧ e_b` relative to `e_{a ∪ b}` for disjoint masks.
pub fn wedge_sign(a: usize, b: usize) -> f64 {
    // count pairs (i in a, j in b) with i > j
    let mut swaps = 0;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl Grassmann {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_GENERATORS, "too many generators");
        Self {
            n,
            c: vec![Complex64::new(0.0, 0.0); 1 << n],
        }
    }

    pub fn scalar(n: usize, a: Complex64) -> Self {
        let mut g = Self::zero(n);
        g.c[0] = a;
        g
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, Complex64::new(1.0, 0.0))
    }

    pub fn generator(n: usize, i: usize) -> Self {
        let mut g = Self::zero(n);
        g.c[1 << i] = Complex64::new(1.0, 0.0);
        g
    }

    /// Monomial `a · e_mask` with generators wedged in increasing order.
    pub fn monomial(n: usize, mask: usize, a: Complex64) -> Self {
        let mut g = Self::zero(n);
        g.c[mask] = a;
        g
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            n: self.n,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            n: self.n,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            c: self.c.iter().map(|a| a * s).collect(),
        }
    }

    pub fn wedge(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (a, x) in self.c.iter().enumerate() {
            if x.norm_sqr() == 0.0 {
                continue;
            }
            for (b, y) in o.c.iter().enumerate() {
                if a & b != 0 || y.norm_sqr() == 0.0 {
                    continue;
                }
                out.c[a | b] += x * y * wedge_sign(a, b);
            }
        }
        out
    }

    /// Homogeneous component of the given degree.
    pub fn degree_part(&self, deg: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (m, v) in self.c.iter().enumerate() {
            if m.count_ones() as usize == deg {
                out.c[m] = *v;
            }
        }
        out
    }

    /// Coefficient of `e_0 ∧ … ∧ e_{n−1}`.
    pub fn top(&self) -> Complex64 {
        self.c[(1 << self.n) - 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Whether every component has even degree.
    pub fn is_even(&self) -> bool {
        self.c
            .iter()
            .enumerate()
            .all(|(m, v)| m.count_ones() % 2 == 0 || v.norm() == 0.0)
    }

    /// `Σ_m a_m x^m` for `x` with vanishing scalar part (hence nilpotent).
    pub fn series(&self, coeffs: &[f64]) -> Result<Self> {
        if self.c[0].norm() != 0.0 {
            return Err(Error::Parameter(
                "power series needs a nilpotent argument".into(),
            ));
        }
        let mut out = Self::zero(self.n);
        let mut pow = Self::one(self.n);
        for (m, a) in coeffs.iter().enumerate() {
            if m > 0 {
                pow = pow.wedge(self);
            }
            if pow.max_abs() == 0.0 {
                break;
            }
            out = out.add(&pow.scale(Complex64::new(*a, 0.0)));
        }
        Ok(out)
    }

    /// `exp(x)` for nilpotent even `x`.
    pub fn exp(&self) -> Result<Self> {
        let mut coeffs = vec![1.0; self.n / 2 + 2];
        for m in 1..coeffs.len() {
            coeffs[m] = coeffs[m - 1] / m as f64;
        }
        self.series(&coeffs)
    }
}

/// Square matrix with exterior-algebra entries.
#[derive(Clone, Debug)]
pub struct FormMatrix {
    pub dim: usize,
    pub entries: Vec<Grassmann>,
}

impl FormMatrix {
    pub fn zero(n: usize, dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Grassmann::zero(n); dim * dim],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Grassmann {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Grassmann) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.entries[0].n;
        let mut out = Self::zero(n, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = Grassmann::zero(n);
                for k in 0..self.dim {
                    acc = acc.add(&self.get(i, k).wedge(o.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn trace(&self) -> Grassmann {
        let n = self.entries[0].n;
        (0..self.dim).fold(Grassmann::zero(n), |acc, i| acc.add(self.get(i, i)))
    }
}
