//! Numerical toolkit for leafwise elliptic operators on fibered spaces with a
//! proper action of a finite étale groupoid.
//!
//! The crate is organised bottom-up:
//!
//! * [`groupoid`] finite groupoids, fibered G-spaces, cut-off densities, invariant metrics.
//! * [`cohomology`] foliated forms, Alexander–Spanier cochains and the van Est map.
//! * [`calculus`] leafwise operators, smoothing kernels, traces, parametrices, index idempotents.
//! * [`pairing`] cyclic pairings and the topological (Chern–Weil) side of the index formula.

pub mod calculus;
pub mod cohomology;
pub mod error;
pub mod groupoid;
pub mod linalg;
pub mod pairing;

pub use error::{Error, Result};
pub use num_complex::Complex64;
