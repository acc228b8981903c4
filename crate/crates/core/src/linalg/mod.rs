//! Dense complex linear algebra: matrices, Hermitian operators and states,
//! the Jacobi eigensolver, tensor structure and Schatten norms.

mod dump;
mod eigen;
mod matrix;
mod norms;
mod operators;
mod tensor;

pub use dump::{dump, format_entry};
pub use eigen::{eig_hermitian, Spectrum};
pub use matrix::ComplexMatrix;
pub use norms::{positive_part_projector, schatten_norm, support_projector, SchattenP};
pub use operators::{DensityMatrix, HermitianOperator, PureState};
pub use tensor::{kron, kron_vec, partial_trace_b, swap_operator};

/// Maximum `|A - A†|` accepted when building a [`HermitianOperator`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Largest negative eigenvalue clipped to zero when building a [`DensityMatrix`].
pub const PSD_TOL: f64 = 1e-9;
/// Allowed deviation of a state's trace from one.
pub const TRACE_TOL: f64 = 1e-9;
/// Allowed deviation of a pure state's norm from one.
pub const NORM_TOL: f64 = 1e-12;
/// Eigenvalues with magnitude at or below this count as zero.
pub const ZERO_EIG_TOL: f64 = 1e-10;
