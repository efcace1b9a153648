//! Finite groupoids, proper fibered G-spaces over finite bases, cut-off densities,
//! transversal densities and invariant leafwise metrics.

mod density;
mod group;
#[allow(clippy::module_inception)]
mod groupoid;
mod metric;
mod space;

pub use density::{
    cocycle_defect, compute_cutoff, modular_cocycle, CutoffDensity, FiberFn, Seed,
    TransversalDensity,
};
pub use group::FiniteGroup;
pub use groupoid::{BaseModel, GroupoidModel};
pub use metric::{average_metric, LeafwiseMetric, MetricFn};
pub use space::{AffineMap, FiberedGSpace, TorusGrid, MAX_GRID};
