//! Foliated (leafwise) differential forms, Alexander–Spanier cochains, groupoid
//! cochains and the van Est map into invariant leafwise forms.

mod cochain;
mod form;
mod groupoid_cochain;
mod ranks;
mod trig;

pub use cochain::{van_est_lambda, ASCochain, Factor, Term};
pub use form::{integrate_invariant, shuffle_sign, subsets, FoliatedForm};
pub use groupoid_cochain::{
    groupoid_cohomology_dims, groupoid_differential, nerve, van_est_degree0,
};
pub use ranks::invariant_cohomology_ranks;
pub use trig::TrigPoly;
