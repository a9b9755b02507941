//! Named numerical tolerances shared across modules.

/// Default relative tolerance for identities between two computed routes.
pub const DEFAULT_REL: f64 = 1e-9;

/// Allowed deviation of `p E[X1] + (1-p) E[X2]` from one.
pub const MEAN_NORMALIZATION: f64 = 1e-9;

/// Row sums of a subgenerator may exceed zero by at most this much.
pub const GENERATOR_ROW_SUM: f64 = 1e-12;

/// Accuracy target of the matrix exponential.
pub const EXPM_REL: f64 = 1e-12;

/// Row sums of `exp(Qt)` for a subgenerator may exceed one by at most this much.
pub const EXPM_ROW_SUM: f64 = 1e-10;

/// Two eigenvalues closer than this (relative to the spectral scale) are treated as equal.
pub const EIGEN_SEPARATION: f64 = 1e-8;

/// Imaginary parts below this (relative) are treated as zero.
pub const EIGEN_IMAG: f64 = 1e-10;

/// Agreement between the eigenvalue and the scalar-root routes for the decay rate.
pub const DECAY_CROSS_CHECK: f64 = 1e-10;

/// Stopping rule of the doubling iteration (successive iterates).
pub const SDA_STEP: f64 = 1e-14;

/// Stopping rule of the doubling iteration (Riccati residual).
pub const SDA_RESIDUAL: f64 = 1e-12;

/// Maximum number of doubling steps.
pub const SDA_MAX_ITER: usize = 200;

/// Probability vectors must sum to one within this.
pub const PMF_SUM: f64 = 1e-10;

/// Largest Riccati residual accepted once the doubling iteration has stopped.
pub const RICCATI_ACCEPT: f64 = 1e-10;
