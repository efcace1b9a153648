//! Cyclic pairings with index classes and the Chern–Weil side of the index formula.

mod charclass;
mod cocycle;
mod exterior;
mod family;
mod symbolclass;
mod topological;

pub use charclass::{
    a_hat_form, a_hat_from_roots, a_hat_log_coefficients, chern_character_form, CharClassForm,
    CharKind, ConnectionForm,
};
pub use cocycle::{
    alternate, cochain_invariance_defect, pair_cocycle, pair_cocycle_within, pairing_normalization,
};
pub use family::{base_cutoff, family_index_orbifold, FamilyIndex};
pub use exterior::{wedge_sign, FormMatrix, Grassmann, MAX_GENERATORS};
pub use symbolclass::{
    check_symbol_elliptic, chern_projector, graph_projector, CotangentModel, PolySymbol,
    SymbolClass,
};
pub use topological::{
    calibrate, default_calibration, free_action_reduction, gauss_legendre, interpolation_matrix,
    symplectic_sign, topological_index, Calibration, ConnectionFn, TopologicalOptions,
};
