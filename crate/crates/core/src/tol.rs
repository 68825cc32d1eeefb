//! Numerical tolerances shared across the crate.
//!
//! Every threshold a check or a decomposition relies on lives here so that
//! the acceptance tests and the library agree on one set of numbers.

/// Maximum supported matrix dimension (rows or columns).
pub const MAX_DIM: usize = 256;

/// Entrywise `max |m - m†|` allowed for a matrix to count as Hermitian.
pub const HERMITIAN: f64 = 1e-10;

/// Off-diagonal Frobenius norm at which the Jacobi eigensolver stops.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-12;

/// Upper bound on Jacobi sweeps before the solver gives up.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// `|Σ|a|² - 1|` allowed for a pure state.
pub const NORM: f64 = 1e-10;

/// `|tr ρ - 1|` allowed for a density matrix.
pub const TRACE: f64 = 1e-10;

/// Most negative eigenvalue still accepted (and clamped to zero) for a state.
pub const NEGATIVE_EIGENVALUE: f64 = -1e-9;

/// Eigenvalues at or below this contribute nothing to an entropy.
pub const ENTROPY_CUTOFF: f64 = 1e-12;

/// Schmidt coefficients at or below this are dropped.
pub const SCHMIDT_CUTOFF: f64 = 1e-12;

/// Orthonormality check for user supplied bases.
pub const ORTHONORMAL: f64 = 1e-8;

/// Two Schmidt coefficients closer than this are treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Relative column norm below which QR declares rank deficiency.
pub const RANK_DEFICIENT: f64 = 1e-12;

/// Minimum eigenvalue of a partial transpose still considered PPT.
pub const PPT: f64 = -1e-9;

/// Largest off-diagonal magnitude of a matrix still considered diagonal.
pub const DIAGONAL: f64 = 1e-10;

/// Entrywise change allowed when a dephasing leaves a state "unchanged".
pub const DEPHASING_FIXED_POINT: f64 = 1e-8;

/// Slack on inequalities that hold exactly in exact arithmetic.
pub const INEQUALITY: f64 = 1e-9;

/// Any superadditivity gap below this is treated as a genuine violation.
pub const HARD_NEGATIVE_DELTA: f64 = -1e-6;

/// Eigenvalues of a state at or below this are treated as exactly zero when
/// forming `√ρ` or counting rank.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Central finite-difference step for the convex-roof gradient.
pub const FD_STEP: f64 = 1e-6;
