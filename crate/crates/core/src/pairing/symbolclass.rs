use std::f64::consts::PI;

use num_complex::Complex64;

use crate::calculus::LeafwiseOperatorFamily;
use crate::groupoid::FiberedGSpace;
use crate::linalg::CMat;
use crate::{Error, Result};

/// Constant-coefficient matrix symbol `σ(ξ) = Σ_p C_p ξ^p` in mode units.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySymbol {
    pub dim: usize,
    pub rank: usize,
    pub terms: Vec<(Vec<u32>, CMat)>,
}

impl PolySymbol {
    pub fn new(dim: usize, rank: usize, terms: Vec<(Vec<u32>, CMat)>) -> Result<Self> {
        if terms
            .iter()
            .any(|(p, c)| p.len() != dim || c.shape() != (rank, rank))
        {
            return Err(Error::Dimension("polynomial symbol term shape".into()));
        }
        Ok(Self { dim, rank, terms })
    }

    pub fn order(&self) -> u32 {
        self.terms
            .iter()
            .map(|(p, _)| p.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, xi: &[f64]) -> CMat {
        let mut out = CMat::zeros(self.rank, self.rank);
        for (p, c) in &self.terms {
            let m: f64 = p.iter().zip(xi).map(|(e, v)| v.powi(*e as i32)).product();
            out += c * Complex64::new(m, 0.0);
        }
        out
    }

    pub fn partial(&self, j: usize, xi: &[f64]) -> CMat {
        let mut out = CMat::zeros(self.rank, self.rank);
        for (p, c) in &self.terms {
            if p[j] == 0 {
                continue;
            }
            let m: f64 = p
                .iter()
                .zip(xi)
                .enumerate()
                .map(|(i, (e, v))| {
                    if i == j {
                        *e as f64 * v.powi(*e as i32 - 1)
                    } else {
                        v.powi(*e as i32)
                    }
                })
                .product();
            out += c * Complex64::new(m, 0.0);
        }
        out
    }

    /// The Fourier multiplier with this symbol, truncated at `cutoff`.
    pub fn operator(&self, space: FiberedGSpace, cutoff: usize) -> Result<LeafwiseOperatorFamily> {
        if space.dim() != self.dim {
            return Err(Error::Dimension("symbol and fiber dimension differ".into()));
        }
        let s = self.clone();
        LeafwiseOperatorFamily::multiplier(
            space,
            cutoff,
            self.rank,
            self.rank,
            self.order() as f64,
            move |_, nu| {
                let xi: Vec<f64> = nu.iter().map(|v| *v as f64).collect();
                s.eval(&xi)
            },
        )
    }
}

/// K-theory class of a principal symbol on the leafwise cotangent bundle.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolClass {
    /// `∂̄` on `T²` twisted by a degree-`d` line bundle, realized as
    /// `σ = q(z)·2πi(ξ₁ + iξ₂) + (1 − q(z))` on `C²`, where `q` is a rank-one projector
    /// field of Chern number `d`.
    TwistedDolbeault {
        degree: i64,
    },
    Polynomial(PolySymbol),
}

const PAULI: [[[Complex64; 2]; 2]; 3] = [
    [
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    ],
    [
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
        [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
    ],
    [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
    ],
];

fn half_pauli(v: &[f64; 3]) -> CMat {
    CMat::from_fn(2, 2, |i, j| {
        (0..3).map(|k| PAULI[k][i][j] * v[k]).sum::<Complex64>() * 0.5
    })
}

/// `q(z) = (1 + n̂·τ)/2` with `n = (sin 2πd z₁, sin 2πz₂, 1 + cos 2πd z₁ + cos 2πz₂)`,
/// together with `∂q/∂z₁`, `∂q/∂z₂`.
pub fn chern_projector(degree: i64, z: &[f64]) -> (CMat, [CMat; 2]) {
    let d = degree as f64;
    let (a, b) = (2.0 * PI * d * z[0], 2.0 * PI * z[1]);
    let n = [a.sin(), b.sin(), 1.0 + a.cos() + b.cos()];
    let dn = [
        [2.0 * PI * d * a.cos(), 0.0, -2.0 * PI * d * a.sin()],
        [0.0, 2.0 * PI * b.cos(), -2.0 * PI * b.sin()],
    ];
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let nh = [n[0] / len, n[1] / len, n[2] / len];
    let mut q = half_pauli(&nh);
    q[(0, 0)] += 0.5;
    q[(1, 1)] += 0.5;
    let dq = dn.map(|v| {
        let dot = nh[0] * v[0] + nh[1] * v[1] + nh[2] * v[2];
        half_pauli(&[
            (v[0] - nh[0] * dot) / len,
            (v[1] - nh[1] * dot) / len,
            (v[2] - nh[2] * dot) / len,
        ])
    });
    (q, dq)
}

impl SymbolClass {
    pub fn dim(&self) -> usize {
        match self {
            Self::TwistedDolbeault { .. } => 2,
            Self::Polynomial(p) => p.dim,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Self::TwistedDolbeault { .. } => 2,
            Self::Polynomial(p) => p.rank,
        }
    }

    /// Highest Fourier band of the `z`-dependence per coordinate.
    pub fn z_band(&self) -> Vec<usize> {
        match self {
            Self::TwistedDolbeault { degree } => vec![degree.unsigned_abs() as usize, 1],
            Self::Polynomial(p) => vec![0; p.dim],
        }
    }

    pub fn z_dependent(&self) -> bool {
        self.z_band().iter().any(|b| *b > 0)
    }

    /// `σ(z, ξ)` and its partials along `z_1..z_r, ξ_1..ξ_r`.
    pub fn eval(&self, z: &[f64], xi: &[f64]) -> (CMat, Vec<CMat>) {
        match self {
            Self::TwistedDolbeault { degree } => {
                let (q, dq) = chern_projector(*degree, z);
                let s = Complex64::new(0.0, 2.0 * PI) * Complex64::new(xi[0], xi[1]);
                let id = CMat::identity(2, 2);
                let sigma = &q * s + (&id - &q);
                let sm1 = s - Complex64::new(1.0, 0.0);
                let partials = vec![
                    &dq[0] * sm1,
                    &dq[1] * sm1,
                    &q * Complex64::new(0.0, 2.0 * PI),
                    &q * Complex64::new(-2.0 * PI, 0.0),
                ];
                (sigma, partials)
            }
            Self::Polynomial(p) => {
                let mut partials = vec![CMat::zeros(p.rank, p.rank); p.dim];
                partials.extend((0..p.dim).map(|j| p.partial(j, xi)));
                (p.eval(xi), partials)
            }
        }
    }
}

/// Compactified cotangent model: frequencies in the ball of radius `radius` (mode units),
/// with the Gaussian cut `χ(ξ) = exp(−|ξ|²/(2·width²))` realizing the difference class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CotangentModel {
    pub radius: f64,
    pub width: f64,
}

impl CotangentModel {
    /// Radius `N + 1` and width `(N + 1)/8` for a Fourier cutoff `N`.
    pub fn for_cutoff(cutoff: usize) -> Self {
        let r = cutoff as f64 + 1.0;
        Self {
            radius: r,
            width: r / 8.0,
        }
    }
}

/// Graph projector `[[χ², χ(1+χ)Q], [χσ, 1 − χ²]]`, `Q = (1 − χ)σ⁻¹`, and its partials.
pub fn graph_projector(
    symbol: &SymbolClass,
    model: &CotangentModel,
    z: &[f64],
    xi: &[f64],
) -> Result<(CMat, Vec<CMat>)> {
    let m = symbol.rank();
    let r = symbol.dim();
    let (sigma, ds) = symbol.eval(z, xi);
    let rho2: f64 = xi.iter().map(|v| v * v).sum();
    let w2 = model.width * model.width;
    let chi = (-rho2 / (2.0 * w2)).exp();
    let omc = -(-rho2 / (2.0 * w2)).exp_m1();
    let dchi: Vec<f64> = (0..2 * r)
        .map(|i| if i < r { 0.0 } else { -xi[i - r] / w2 * chi })
        .collect();
    let inv = sigma
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotElliptic(format!("symbol singular at ξ = {xi:?}")))?;
    let q = &inv * Complex64::new(omc, 0.0);
    let id = CMat::identity(m, m);
    let c = Complex64::new(chi, 0.0);
    let assemble = |a: CMat, b: CMat, cc: CMat, d: CMat| crate::linalg::blocks(&a, &b, &cc, &d);
    let p = assemble(
        &id * (c * c),
        &q * (c * (c + 1.0)),
        &sigma * c,
        &id * (Complex64::new(1.0, 0.0) - c * c),
    );
    let mut partials = Vec::with_capacity(2 * r);
    for (i, dsi) in ds.iter().enumerate() {
        let dc = Complex64::new(dchi[i], 0.0);
        let dq = -(&inv * dc) - (&inv * dsi * &inv) * Complex64::new(omc, 0.0);
        partials.push(assemble(
            &id * (c * dc * 2.0),
            &q * (dc * (c * 2.0 + 1.0)) + dq * (c * (c + 1.0)),
            &sigma * dc + dsi * c,
            &id * (-(c * dc * 2.0)),
        ));
    }
    Ok((p, partials))
}

/// Fails unless `σ` is invertible on a dense sample of the punctured model ball.
pub fn check_symbol_elliptic(symbol: &SymbolClass, model: &CotangentModel) -> Result<()> {
    let r = symbol.dim();
    let zs: Vec<Vec<f64>> = [0.0, 0.37, 0.71].iter().map(|t| vec![*t; r]).collect();
    for z in &zs {
        for k in 1..=64 {
            let rho = model.radius * k as f64 / 64.0;
            let dirs: Vec<Vec<f64>> = if r == 1 {
                vec![vec![rho], vec![-rho]]
            } else {
                (0..64)
                    .map(|a| {
                        let t = 2.0 * PI * a as f64 / 64.0;
                        vec![rho * t.cos(), rho * t.sin()]
                    })
                    .collect()
            };
            for xi in dirs {
                let (s, _) = symbol.eval(z, &xi);
                let sv = s.singular_values();
                let (lo, hi) = sv
                    .iter()
                    .fold((f64::MAX, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
                if lo <= 1e-6 * hi.max(1.0) {
                    return Err(Error::NotElliptic(format!(
                        "symbol singular near ξ = {xi:?}"
                    )));
                }
            }
        }
    }
    Ok(())
}
