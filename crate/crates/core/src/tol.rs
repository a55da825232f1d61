//! Numerical tolerances shared across the crate.

/// Pure closed-form algebra: normalization, stochasticity, identities.
pub const ALGEBRA: f64 = 1e-12;

/// Quantities that pass through arccos/arccosh near |λ| = 1.
pub const CONDITIONING: f64 = 1e-9;
