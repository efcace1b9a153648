use num_complex::Complex64;

use super::form::{shuffle_sign, subsets, FoliatedForm};
use super::trig::TrigPoly;
use crate::groupoid::{FiberedGSpace, TorusGrid};
use crate::{Error, Result};

/// One tensor factor: a trigonometric polynomial times a monomial `∏ z_j^{p_j}`
/// in lifted coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub trig: TrigPoly,
    pub powers: Vec<u32>,
}

impl Factor {
    pub fn one(dim: usize) -> Self {
        Self {
            trig: TrigPoly::one(dim),
            powers: vec![0; dim],
        }
    }

    pub fn trig(t: TrigPoly) -> Self {
        let dim = t.dim;
        Self {
            trig: t,
            powers: vec![0; dim],
        }
    }

    /// The lifted coordinate `z_j`.
    pub fn coord(dim: usize, j: usize) -> Self {
        let mut powers = vec![0; dim];
        powers[j] = 1;
        Self {
            trig: TrigPoly::one(dim),
            powers,
        }
    }

    pub fn is_one(&self) -> bool {
        self.powers.iter().all(|p| *p == 0)
            && self.trig.is_constant()
            && self.trig.eval(&vec![0.0; self.trig.dim]) == Complex64::new(1.0, 0.0)
    }

    /// Value at the lifted point `y`.
    pub fn eval(&self, y: &[f64]) -> Complex64 {
        let m: f64 = self
            .powers
            .iter()
            .zip(y)
            .map(|(p, v)| v.powi(*p as i32))
            .product();
        self.trig.eval(y) * m
    }

    /// Partial derivative `∂_j` at the point `y`.
    pub fn partial(&self, j: usize, y: &[f64]) -> Complex64 {
        let m: f64 = self
            .powers
            .iter()
            .zip(y)
            .map(|(p, v)| v.powi(*p as i32))
            .product();
        let mut v = self.trig.derivative(j).eval(y) * m;
        let p = self.powers[j];
        if p > 0 {
            let dm: f64 = self
                .powers
                .iter()
                .zip(y)
                .enumerate()
                .map(|(i, (q, v))| {
                    if i == j {
                        *q as f64 * v.powi(*q as i32 - 1)
                    } else {
                        v.powi(*q as i32)
                    }
                })
                .product();
            v += self.trig.eval(y) * dm;
        }
        v
    }
}

/// `coeff · f_0 ⊗ f_1 ⊗ … ⊗ f_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub factors: Vec<Factor>,
}

/// Alexander–Spanier cochain given as a finite sum of tensors of functions.
///
/// Values are taken at `(k+1)`-tuples of nearby points; every point is lifted to
/// `z_0 + (z_i − z_0)` using minimal-image differences, so cochains built from
/// coordinate monomials (such as the area cocycle) are germs at the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct ASCochain {
    pub dim: usize,
    pub degree: usize,
    pub terms: Vec<Term>,
}

impl ASCochain {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self {
            dim,
            degree,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(dim: usize, degree: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.factors.len() != degree + 1 {
                return Err(Error::Degree(format!(
                    "tensor of length {} in a degree-{degree} cochain",
                    t.factors.len()
                )));
            }
            if t.factors
                .iter()
                .any(|f| f.trig.dim != dim || f.powers.len() != dim)
            {
                return Err(Error::Dimension("factor dimension".into()));
            }
        }
        Ok(Self { dim, degree, terms })
    }

    /// Degree-0 cochain given by a function.
    pub fn function(f: Factor) -> Self {
        let dim = f.powers.len();
        Self {
            dim,
            degree: 0,
            terms: vec![Term {
                coeff: Complex64::new(1.0, 0.0),
                factors: vec![f],
            }],
        }
    }

    pub fn constant(dim: usize) -> Self {
        Self::function(Factor::one(dim))
    }

    /// Area cocycle on `T²`: `½[(x1−x0)(y2−y0) − (y1−y0)(x2−x0)]`.
    pub fn area() -> Self {
        let one = Factor::one(2);
        let x = Factor::coord(2, 0);
        let y = Factor::coord(2, 1);
        let mut terms = Vec::new();
        // (x1 − x0)(y2 − y0) = x1 y2 − x1 y0 − x0 y2 + x0 y0
        let pieces = |a: &Factor, b: &Factor, s: f64, terms: &mut Vec<Term>| {
            let t = |f0: &Factor, f1: &Factor, f2: &Factor, c: f64| Term {
                coeff: Complex64::new(c, 0.0),
                factors: vec![f0.clone(), f1.clone(), f2.clone()],
            };
            terms.push(t(&one, a, b, 0.5 * s));
            terms.push(t(b, a, &one, -0.5 * s));
            terms.push(t(a, &one, b, -0.5 * s));
            // x0 y0 as a single slot-0 factor
            let mut ab = a.clone();
            for (p, q) in ab.powers.iter_mut().zip(&b.powers) {
                *p += q;
            }
            terms.push(t(&ab, &one, &one, 0.5 * s));
        };
        pieces(&x, &y, 1.0, &mut terms);
        pieces(&y, &x, -1.0, &mut terms);
        Self {
            dim: 2,
            degree: 2,
            terms,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::Degree("adding cochains of different degree".into()));
        }
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        Ok(Self {
            terms: t,
            ..self.clone()
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * s,
                    factors: t.factors.clone(),
                })
                .collect(),
            ..self.clone()
        }
    }

    /// Lifts of the points of a tuple relative to the first point.
    pub fn lift(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let z0 = &points[0];
        points
            .iter()
            .map(|z| {
                z0.iter()
                    .zip(z)
                    .map(|(a, b)| a + TorusGrid::min_image(*a, *b))
                    .collect()
            })
            .collect()
    }

    pub fn eval(&self, points: &[Vec<f64>]) -> Result<Complex64> {
        if points.len() != self.degree + 1 {
            return Err(Error::Degree(format!(
                "{} points for a degree-{} cochain",
                points.len(),
                self.degree
            )));
        }
        let y = Self::lift(points);
        Ok(self
            .terms
            .iter()
            .map(|t| {
                t.coeff
                    * t.factors
                        .iter()
                        .zip(&y)
                        .map(|(f, p)| f.eval(p))
                        .product::<Complex64>()
            })
            .sum())
    }

    /// Alexander–Spanier coboundary, exact on tensors:
    /// `d(f_0⊗…⊗f_k) = Σ_i (−1)^i f_0⊗…⊗1⊗…⊗f_k` with `1` inserted at slot `i`.
    pub fn d_as(&self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * (self.degree + 2));
        for t in &self.terms {
            for i in 0..=self.degree + 1 {
                let mut f = t.factors.clone();
                f.insert(i, Factor::one(self.dim));
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                terms.push(Term {
                    coeff: t.coeff * s,
                    factors: f,
                });
            }
        }
        Self {
            dim: self.dim,
            degree: self.degree + 1,
            terms,
        }
    }
}

/// `λ(f_0 ⊗ … ⊗ f_k) = f_0 df_1 ∧ … ∧ df_k`, sampled on the fiber grid.
pub fn van_est_lambda(phi: &ASCochain, space: &FiberedGSpace) -> Result<FoliatedForm> {
    let r = space.dim();
    if phi.dim != r {
        return Err(Error::Dimension(format!(
            "cochain on T^{} applied to T^{r}",
            phi.dim
        )));
    }
    let k = phi.degree;
    if k > r {
        return Err(Error::Degree(format!(
            "degree {k} exceeds leaf dimension {r}"
        )));
    }
    let sets = subsets(r, k);
    FoliatedForm::from_fn(space, k, |_, z| {
        let mut out = vec![Complex64::new(0.0, 0.0); sets.len()];
        for t in &phi.terms {
            let f0 = t.coeff * t.factors[0].eval(z);
            if f0 == Complex64::new(0.0, 0.0) {
                continue;
            }
            // expand df_1 ∧ … ∧ df_k over ordered choices of coordinates
            expand(&t.factors[1..], z, 0u8, 1.0, f0, &sets, &mut out);
        }
        out
    })
}

fn expand(
    rest: &[Factor],
    z: &[f64],
    mask: u8,
    sign: f64,
    acc: Complex64,
    sets: &[u8],
    out: &mut [Complex64],
) {
    if rest.is_empty() {
        let i = sets.iter().position(|&m| m == mask).unwrap();
        out[i] += acc * sign;
        return;
    }
    for j in 0..z.len() {
        if mask & (1 << j) != 0 {
            continue;
        }
        let dj = rest[0].partial(j, z);
        if dj == Complex64::new(0.0, 0.0) {
            continue;
        }
        let s = sign * shuffle_sign(mask, 1 << j);
        expand(&rest[1..], z, mask | (1 << j), s, acc * dj, sets, out);
    }
}
