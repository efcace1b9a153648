use std::sync::Arc;

use super::groupoid::{BaseModel, GroupoidModel};
use super::space::FiberedGSpace;
use crate::{Error, Result};

/// Positive function on the fibers, `f(x, z)` with `x` a base point.
pub type FiberFn = Arc<dyn Fn(usize, &[f64]) -> f64 + Send + Sync>;

/// Seed used to build a cut-off density.
#[derive(Clone)]
pub enum Seed {
    Uniform,
    Function(FiberFn),
}

impl Seed {
    pub fn eval(&self, x: usize, z: &[f64]) -> f64 {
        match self {
            Seed::Uniform => 1.0,
            Seed::Function(f) => f(x, z),
        }
    }
}

impl std::fmt::Debug for Seed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Seed::Uniform => write!(f, "Uniform"),
            Seed::Function(_) => write!(f, "Function"),
        }
    }
}

/// Cut-off density `c ≥ 0` with `Σ_{g ∈ G^{μ(z)}} c(g⁻¹z) = 1`.
#[derive(Clone, Debug)]
pub struct CutoffDensity {
    seed: Seed,
    /// `c` at the fiber grid, indexed `[x][p]`.
    pub values: Vec<Vec<f64>>,
}

/// Normalises `seed` over groupoid orbits: `c(z) = s(z) / Σ_{g ∈ G^{μ(z)}} s(g⁻¹z)`.
pub fn compute_cutoff(space: &FiberedGSpace, seed: Seed) -> Result<CutoffDensity> {
    let mut values = Vec::with_capacity(space.n_base());
    for x in 0..space.n_base() {
        let mut row = Vec::with_capacity(space.fiber_len());
        for z in space.grid.points() {
            row.push(cutoff_at(space, &seed, x, &z)?);
        }
        values.push(row);
    }
    Ok(CutoffDensity { seed, values })
}

fn cutoff_at(space: &FiberedGSpace, seed: &Seed, x: usize, z: &[f64]) -> Result<f64> {
    let s = seed.eval(x, z);
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Density(format!("seed value {s} at base point {x}")));
    }
    let gp = &space.groupoid;
    let mut denom = 0.0;
    for g in gp.from_object(x) {
        let gi = gp.inverse(g);
        let w = space.act(gi).apply(z);
        let v = seed.eval(gp.target(g), &w);
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::Density(format!(
                "seed value {v} at base point {}",
                gp.target(g)
            )));
        }
        denom += v;
    }
    if denom <= 1e-300 {
        return Err(Error::DegenerateCutoff(format!(
            "orbit sum vanishes at base point {x}"
        )));
    }
    Ok(s / denom)
}

impl CutoffDensity {
    /// `c(x, z)` at an arbitrary fiber point.
    pub fn eval(&self, space: &FiberedGSpace, x: usize, z: &[f64]) -> Result<f64> {
        cutoff_at(space, &self.seed, x, z)
    }

    /// Largest deviation of `Σ_{g ∈ G^x} c(g⁻¹z)` from 1 over the fiber grids.
    pub fn partition_defect(&self, space: &FiberedGSpace) -> Result<f64> {
        let gp = &space.groupoid;
        let mut worst: f64 = 0.0;
        for x in 0..space.n_base() {
            for z in space.grid.points() {
                let mut sum = 0.0;
                for g in gp.from_object(x) {
                    let w = space.act(gp.inverse(g)).apply(&z);
                    sum += self.eval(space, gp.target(g), &w)?;
                }
                worst = worst.max((sum - 1.0).abs());
            }
        }
        Ok(worst)
    }
}

/// Positive transversal density `Ω`, one value per base point.
#[derive(Clone, Debug, PartialEq)]
pub struct TransversalDensity {
    pub values: Vec<f64>,
}

impl TransversalDensity {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::Density(format!("transversal density value {v}")));
        }
        Ok(Self { values })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            values: vec![1.0; n],
        }
    }

    /// Rescaled so that `Σ_x w_x Ω_x = 1`.
    pub fn normalized(base: &BaseModel) -> Self {
        let total: f64 = base.weights.iter().sum();
        Self {
            values: vec![1.0 / total; base.len()],
        }
    }
}

/// Modular cocycle `δ(g) = (wΩ)(target g) / (wΩ)(source g)`, one value per arrow.
///
/// It is multiplicative, `δ(g1 g2) = δ(g1) δ(g2)`, and identically 1 when `wΩ` is invariant.
pub fn modular_cocycle(
    groupoid: &GroupoidModel,
    base: &BaseModel,
    omega: &TransversalDensity,
) -> Result<Vec<f64>> {
    if omega.values.len() != base.len() || groupoid.n_objects() != base.len() {
        return Err(Error::Dimension("density length differs from base".into()));
    }
    let m = |x: usize| base.weights[x] * omega.values[x];
    Ok((0..groupoid.n_arrows())
        .map(|g| m(groupoid.target(g)) / m(groupoid.source(g)))
        .collect())
}

/// Largest `|δ(g1 g2) − δ(g1) δ(g2)|` over composable pairs.
pub fn cocycle_defect(groupoid: &GroupoidModel, delta: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for g1 in 0..groupoid.n_arrows() {
        for g2 in 0..groupoid.n_arrows() {
            if let Some(p) = groupoid.compose(g1, g2) {
                worst = worst.max((delta[p] - delta[g1] * delta[g2]).abs());
            }
        }
    }
    worst
}
