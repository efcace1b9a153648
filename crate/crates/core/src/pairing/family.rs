use num_complex::Complex64;

use super::symbolclass::{CotangentModel, SymbolClass};
use super::topological::{topological_index, Calibration, TopologicalOptions};
use crate::calculus::{kernel_cokernel, LeafwiseOperatorFamily};
use crate::cohomology::FoliatedForm;
use crate::groupoid::{CutoffDensity, FiberedGSpace, TransversalDensity};
use crate::{Error, Result};

const INVARIANCE_TOL: f64 = 1e-8;

/// Both sides of the family index formula over a zero-dimensional base.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyIndex {
    /// `(dim ker, dim coker)` of the fiber operator over each base point.
    pub kernel_cokernel: Vec<(usize, usize)>,
    pub per_point: Vec<i64>,
    /// `∫ ch` of the index bundle against the base cut-off and `Ω`.
    pub chern_integral: f64,
    pub topological: Complex64,
}

impl FamilyIndex {
    pub fn difference(&self) -> f64 {
        (self.topological - self.chern_integral).norm()
    }
}

/// Cut-off on the base: each point shares its orbit's mass equally among the arrows
/// leaving it.
pub fn base_cutoff(space: &FiberedGSpace) -> Vec<f64> {
    let gp = &space.groupoid;
    (0..space.n_base())
        .map(|x| 1.0 / (0..gp.n_arrows()).filter(|g| gp.source(*g) == x).count() as f64)
        .collect()
}

/// Index bundle of a family of fiber operators and its Chern integral, compared with
/// the cotangent integral of the symbol class.
///
/// The base is discrete, so `ch` of the index bundle reduces to its rank.
#[allow(clippy::too_many_arguments)]
pub fn family_index_orbifold(
    op: &LeafwiseOperatorFamily,
    symbol: &SymbolClass,
    model: &CotangentModel,
    cutoff: &CutoffDensity,
    omega: &TransversalDensity,
    calibration: &Calibration,
    opts: &TopologicalOptions,
) -> Result<FamilyIndex> {
    let space = &op.space;
    op.check_invariance(INVARIANCE_TOL)?;
    let dims = kernel_cokernel(op)?;
    if let Some(x) = dims.iter().position(|d| *d != dims[0]) {
        return Err(Error::RankJump(format!(
            "base point 0 has (ker, coker) = {:?} but base point {x} has {:?}",
            dims[0], dims[x]
        )));
    }
    let per_point: Vec<i64> = dims.iter().map(|(k, c)| *k as i64 - *c as i64).collect();
    let cm = base_cutoff(space);
    let chern_integral = (0..space.n_base())
        .map(|x| cm[x] * space.base.weights[x] * omega.values[x] * per_point[x] as f64)
        .sum();
    let one = FoliatedForm::from_fn(space, 0, |_, _| vec![Complex64::new(1.0, 0.0)])?;
    let topological = topological_index(&one, symbol, model, space, cutoff, omega, calibration, opts)?;
    Ok(FamilyIndex { kernel_cokernel: dims, per_point, chern_integral, topological })
}
