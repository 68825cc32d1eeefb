//! Entanglement of formation for small bipartite systems, together with
//! sufficient conditions for its strong superadditivity on four-party
//! states `A1 B1 A2 B2`.
//!
//! The crate is split into:
//! - [`linalg`]: dense complex matrices, Jacobi eigensolver and SVD, QR.
//! - [`qstate`]: labeled subsystem layouts, pure states, density matrices,
//!   partial trace/transpose, entropy, Schmidt decomposition.
//! - [`entanglement`]: pure-state EoF, Wootters two-qubit EoF, negativity,
//!   the Schmidt-weighted quantity `R(χ)`, the gap `ΔE_F` and a numerical
//!   convex-roof upper bound.
//! - [`sampling`]: deterministic random streams, Haar states and unitaries,
//!   Dicke states.
//! - [`families`]: example state families and the three condition checkers.
//!
//! Entropies are reported in ebits (base-2 logarithms).

pub mod entanglement;
pub mod error;
pub mod families;
pub mod linalg;
pub mod qstate;
pub mod sampling;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64;
pub use qstate::{Bipartition, DensityMatrix, PureState, SchmidtDecomposition, SubsystemLayout};
