//! Leafwise operator calculus: section bases, operator families, symbols and
//! quantization, smoothing kernels and their traces, parametrices and index idempotents.

mod basis;
mod dense_io;
mod idempotent;
mod index;
mod kernel;
mod operator;
mod parametrix;
mod symbol;

pub use basis::{hermite_function, SectionBasis, MAX_CUTOFF};
pub use dense_io::{read_dense, write_dense};
pub use idempotent::{index_idempotent, IndexIdempotent, IDEMPOTENT_TOL};
pub use index::{analytic_index, kernel_cokernel, RANK_TOL};
pub use kernel::{
    trace_symbol_formula, trace_tau, translation_invariant, Circulant, KernelBlock, SmoothingKernel,
};
pub use operator::{dolbeault_matrix, LeafwiseOperatorFamily, OperatorMatrix};
pub use parametrix::{default_heat_time, parametrix, Parametrix};
pub use symbol::{quantize, symbol_of, SymbolData, SymbolFn};
