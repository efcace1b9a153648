use std::f64::consts::PI;

use num_complex::Complex64;

use super::basis::SectionBasis;
use crate::groupoid::FiberedGSpace;
use crate::linalg::{max_abs, CMat};
use crate::{Error, Result};

/// Matrix of one fiber operator in the section bases.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorMatrix {
    Dense(CMat),
    /// Fourier multiplier: one `rank_cod × rank_dom` block per mode.
    Diagonal(Vec<CMat>),
}

impl OperatorMatrix {
    pub fn to_dense(&self, dom: &SectionBasis, cod: &SectionBasis) -> CMat {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Diagonal(blocks) => {
                let (rd, rc) = (dom.rank(), cod.rank());
                let mut m = CMat::zeros(cod.len(), dom.len());
                for (k, b) in blocks.iter().enumerate() {
                    m.view_mut((k * rc, k * rd), (rc, rd)).copy_from(b);
                }
                m
            }
        }
    }
}

/// Invariant family of leafwise operators `D = (D_x)`, one matrix per base point.
#[derive(Clone, Debug)]
pub struct LeafwiseOperatorFamily {
    pub space: FiberedGSpace,
    pub domain: SectionBasis,
    pub codomain: SectionBasis,
    pub blocks: Vec<OperatorMatrix>,
    pub order: f64,
}

impl LeafwiseOperatorFamily {
    pub fn new(
        space: FiberedGSpace,
        domain: SectionBasis,
        codomain: SectionBasis,
        blocks: Vec<OperatorMatrix>,
        order: f64,
    ) -> Result<Self> {
        if blocks.len() != space.n_base() {
            return Err(Error::Dimension(format!(
                "{} operator blocks for {} base points",
                blocks.len(),
                space.n_base()
            )));
        }
        if domain.dim() != space.dim() || codomain.dim() != space.dim() {
            return Err(Error::Dimension(
                "section basis dimension differs from fiber dimension".into(),
            ));
        }
        for b in &blocks {
            match b {
                OperatorMatrix::Dense(m) => {
                    if m.shape() != (codomain.len(), domain.len()) {
                        return Err(Error::Dimension(format!(
                            "operator block shape {:?}",
                            m.shape()
                        )));
                    }
                }
                OperatorMatrix::Diagonal(v) => {
                    let same_lattice = matches!((&domain, &codomain), (SectionBasis::Fourier { cutoff: a, .. }, SectionBasis::Fourier { cutoff: b, .. }) if a == b);
                    if !same_lattice || v.len() != domain.n_modes() {
                        return Err(Error::Dimension(
                            "multiplier blocks need matching Fourier bases".into(),
                        ));
                    }
                    if v.iter()
                        .any(|m| m.shape() != (codomain.rank(), domain.rank()))
                    {
                        return Err(Error::Dimension("multiplier block shape".into()));
                    }
                }
            }
        }
        Ok(Self {
            space,
            domain,
            codomain,
            blocks,
            order,
        })
    }

    /// Fourier multiplier `σ(x, ν)` on every fiber.
    pub fn multiplier(
        space: FiberedGSpace,
        cutoff: usize,
        rank_dom: usize,
        rank_cod: usize,
        order: f64,
        symbol: impl Fn(usize, &[i64]) -> CMat,
    ) -> Result<Self> {
        let dim = space.dim();
        let dom = SectionBasis::fourier(dim, cutoff, rank_dom)?;
        let cod = SectionBasis::fourier(dim, cutoff, rank_cod)?;
        let blocks = (0..space.n_base())
            .map(|x| {
                OperatorMatrix::Diagonal(
                    (0..dom.n_modes())
                        .map(|m| symbol(x, &dom.mode(m)))
                        .collect(),
                )
            })
            .collect();
        Self::new(space, dom, cod, blocks, order)
    }

    /// `∂̄` twisted by the line bundle of degree `degree` on `T²`, truncated at `cutoff`
    /// (Fourier modes for degree 0, Landau levels otherwise).
    pub fn dolbeault(space: FiberedGSpace, degree: i64, cutoff: usize) -> Result<Self> {
        if space.dim() != 2 {
            return Err(Error::Dimension("the Dolbeault family lives on T²".into()));
        }
        if degree == 0 {
            return Self::multiplier(space, cutoff, 1, 1, 1.0, |_, nu| {
                CMat::from_element(
                    1,
                    1,
                    Complex64::new(0.0, 2.0 * PI) * Complex64::new(nu[0] as f64, nu[1] as f64),
                )
            });
        }
        let (dom, cod, m) = dolbeault_matrix(degree, cutoff, 1.0, 1.0)?;
        let n = space.n_base();
        Self::new(space, dom, cod, vec![OperatorMatrix::Dense(m); n], 1.0)
    }

    pub fn n_base(&self) -> usize {
        self.space.n_base()
    }

    pub fn dense(&self, x: usize) -> CMat {
        self.blocks[x].to_dense(&self.domain, &self.codomain)
    }

    pub fn is_multiplier(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| matches!(b, OperatorMatrix::Diagonal(_)))
    }

    /// Largest `‖L_g D_{s(g)} − D_{t(g)} L_g‖` over arrows.
    pub fn invariance_defect(&self) -> Result<f64> {
        let gp = &self.space.groupoid;
        let mut worst: f64 = 0.0;
        for g in 0..gp.n_arrows() {
            let map = self.space.act(g);
            let (bs, bt) = (&self.blocks[gp.source(g)], &self.blocks[gp.target(g)]);
            if let (OperatorMatrix::Diagonal(ds), OperatorMatrix::Diagonal(dt)) = (bs, bt) {
                // the pullback sends mode ν to Aᵀν up to a unit phase
                for (m, a) in ds.iter().enumerate() {
                    let nu = self.domain.mode(m);
                    let image: Vec<i64> = (0..nu.len())
                        .map(|i| (0..nu.len()).map(|j| map.entry(j, i) * nu[j]).sum())
                        .collect();
                    let mo = self.domain.mode_index(&image).ok_or_else(|| {
                        Error::Unsupported("fiber map does not preserve the Fourier box".into())
                    })?;
                    worst = worst.max(max_abs(&(a - &dt[mo])));
                }
                continue;
            }
            if map.is_identity() && bs == bt {
                continue;
            }
            let ld = self.domain.pullback(map)?;
            let lc = self.codomain.pullback(map)?;
            let lhs = &lc * self.dense(gp.source(g));
            let rhs = self.dense(gp.target(g)) * &ld;
            worst = worst.max(max_abs(&(lhs - rhs)));
        }
        Ok(worst)
    }

    pub fn check_invariance(&self, tol: f64) -> Result<()> {
        let d = self.invariance_defect()?;
        if d > tol {
            return Err(Error::OperatorInvariance(format!(
                "defect {d:e} exceeds {tol:e}"
            )));
        }
        Ok(())
    }

    /// For multipliers: smallest `σ_min(σ(ν)) / |2πν|^order` over the outermost shell,
    /// which must stay bounded away from zero.
    pub fn check_elliptic(&self) -> Result<()> {
        for b in &self.blocks {
            let OperatorMatrix::Diagonal(v) = b else {
                continue;
            };
            if self.domain.rank() != self.codomain.rank() {
                return Err(Error::NotElliptic(
                    "multiplier between bundles of different rank".into(),
                ));
            }
            let cutoff = match self.domain {
                SectionBasis::Fourier { cutoff, .. } => cutoff as i64,
                _ => unreachable!(),
            };
            for (m, s) in v.iter().enumerate() {
                let nu = self.domain.mode(m);
                if nu.iter().map(|a| a.abs()).max() != Some(cutoff) || cutoff == 0 {
                    continue;
                }
                let size = 2.0 * PI * nu.iter().map(|a| (a * a) as f64).sum::<f64>().sqrt();
                let smin = s
                    .clone()
                    .singular_values()
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                if smin / size.powf(self.order) < 1e-3 {
                    return Err(Error::NotElliptic(format!(
                        "symbol degenerates at ν = {nu:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Landau-level bases and the matrix of `∂̄` twisted by a line bundle of nonzero
/// degree on the torus with periods `(lx, ly)`, truncated at `cutoff` levels.
pub fn dolbeault_matrix(degree: i64, cutoff: usize, lx: f64, ly: f64) -> Result<(SectionBasis, SectionBasis, CMat)> {
    let (dom, cod) = if degree > 0 {
        (
            SectionBasis::landau_rect(degree, 0, cutoff + 1, lx, ly)?,
            SectionBasis::landau_rect(degree, 0, cutoff, lx, ly)?,
        )
    } else {
        (
            SectionBasis::landau_rect(degree, 0, cutoff, lx, ly)?,
            SectionBasis::landau_rect(degree, 0, cutoff + 1, lx, ly)?,
        )
    };
    let m = landau_dbar(&dom, &cod);
    Ok((dom, cod, m))
}

/// `∂̄ ψ_{n,j} = i√(2ωn) ψ_{n−1,j}` for positive degree, `−i√(2ω(n+1)) ψ_{n+1,j}` for negative.
fn landau_dbar(dom: &SectionBasis, cod: &SectionBasis) -> CMat {
    let w = dom.omega();
    let SectionBasis::Landau { degree, .. } = *dom else {
        unreachable!()
    };
    let mut m = CMat::zeros(cod.len(), dom.len());
    for b in 0..dom.len() {
        let (n, j) = dom.landau_label(b);
        let (target, coeff) = if degree > 0 {
            if n == 0 {
                continue;
            }
            (n - 1, Complex64::new(0.0, (2.0 * w * n as f64).sqrt()))
        } else {
            (
                n + 1,
                Complex64::new(0.0, -(2.0 * w * (n as f64 + 1.0)).sqrt()),
            )
        };
        if let Some(r) = (0..cod.len()).find(|&r| cod.landau_label(r) == (target, j)) {
            m[(r, b)] = coeff;
        }
    }
    m
}
