use std::f64::consts::PI;

use num_complex::Complex64;

/// Trigonometric polynomial `Σ a_ν e^{2πi ν·z}` on `T^r`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    pub dim: usize,
    pub terms: Vec<(Vec<i64>, Complex64)>,
}

impl TrigPoly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn constant(dim: usize, a: Complex64) -> Self {
        Self {
            dim,
            terms: vec![(vec![0; dim], a)],
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Complex64::new(1.0, 0.0))
    }

    pub fn mode(nu: Vec<i64>, a: Complex64) -> Self {
        Self {
            dim: nu.len(),
            terms: vec![(nu, a)],
        }
    }

    /// `sin(2π k z_j)`.
    pub fn sin(dim: usize, j: usize, k: i64) -> Self {
        let mut p = vec![0; dim];
        p[j] = k;
        let m: Vec<i64> = p.iter().map(|v| -v).collect();
        Self {
            dim,
            terms: vec![
                (p, Complex64::new(0.0, -0.5)),
                (m, Complex64::new(0.0, 0.5)),
            ],
        }
    }

    /// `cos(2π k z_j)`.
    pub fn cos(dim: usize, j: usize, k: i64) -> Self {
        let mut p = vec![0; dim];
        p[j] = k;
        let m: Vec<i64> = p.iter().map(|v| -v).collect();
        Self {
            dim,
            terms: vec![(p, Complex64::new(0.5, 0.0)), (m, Complex64::new(0.5, 0.0))],
        }
    }

    pub fn band(&self) -> i64 {
        self.terms
            .iter()
            .flat_map(|(nu, _)| nu.iter().map(|v| v.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, z: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(nu, a)| {
                let ph: f64 = nu.iter().zip(z).map(|(n, x)| *n as f64 * x).sum();
                a * Complex64::from_polar(1.0, 2.0 * PI * ph)
            })
            .sum()
    }

    /// `∂/∂z_j`.
    pub fn derivative(&self, j: usize) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(nu, _)| nu[j] != 0)
                .map(|(nu, a)| (nu.clone(), a * Complex64::new(0.0, 2.0 * PI * nu[j] as f64)))
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(nu, a)| (nu.clone(), a * s))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        Self {
            dim: self.dim,
            terms: t,
        }
        .simplify()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut t = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (n1, a1) in &self.terms {
            for (n2, a2) in &other.terms {
                t.push((n1.iter().zip(n2).map(|(x, y)| x + y).collect(), a1 * a2));
            }
        }
        Self {
            dim: self.dim,
            terms: t,
        }
        .simplify()
    }

    /// Merges equal modes and drops zero coefficients.
    pub fn simplify(mut self) -> Self {
        self.terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Vec<i64>, Complex64)> = Vec::new();
        for (nu, a) in self.terms {
            match out.last_mut() {
                Some((m, b)) if *m == nu => *b += a,
                _ => out.push((nu, a)),
            }
        }
        out.retain(|(_, a)| a.norm() > 0.0);
        Self {
            dim: self.dim,
            terms: out,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(nu, _)| nu.iter().all(|v| *v == 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_derivative() {
        let s = TrigPoly::sin(1, 0, 1);
        let d = s.derivative(0);
        let z = [0.13];
        let want = 2.0 * PI * (2.0 * PI * 0.13).cos();
        assert!((d.eval(&z) - Complex64::new(want, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn product_of_modes() {
        let a = TrigPoly::cos(2, 0, 1);
        let b = TrigPoly::cos(2, 0, 1);
        let p = a.mul(&b);
        let z = [0.3, 0.7];
        let want = (2.0 * PI * 0.3).cos().powi(2);
        assert!((p.eval(&z).re - want).abs() < 1e-14);
        assert_eq!(p.terms.len(), 3);
    }
}
