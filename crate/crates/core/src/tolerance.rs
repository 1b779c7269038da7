//! Numerical tolerances shared across the crate.

/// Unit-norm check for single-photon amplitude vectors and alpha vectors.
pub const NORM: f64 = 1e-12;

/// Hermiticity residual (Frobenius norm of `M - M^†`).
pub const HERMITIAN: f64 = 1e-12;

/// Magnitudes at or below this are treated as exact zeros when building alpha vectors.
pub const ZERO_AMPLITUDE: f64 = 1e-12;

/// Last-mode probabilities within this distance of 0 or 1 make the W decomposition singular.
pub const SINGULAR_LAST_MODE: f64 = 1e-12;

/// Strict-inequality margin for single-photon entanglement verdicts.
pub const DETECTION: f64 = 1e-12;

/// Margin below the bound before a Fock-space state counts as violating it.
pub const FOCK_VIOLATION: f64 = 1e-10;

/// Directional coupler unitarity constraints.
pub const COUPLER: f64 = 1e-12;

/// Phase corrections only change phases; magnitudes must already agree to this level.
pub const PHASE_MAGNITUDE: f64 = 1e-9;

/// Target residual for the coupling-constant search.
pub const SYNTHESIS_RESIDUAL: f64 = 1e-6;

/// Largest probability tolerated on truncated Fock basis states with a mode at the cutoff.
pub const TOP_SHELL_WEIGHT: f64 = 1e-24;
