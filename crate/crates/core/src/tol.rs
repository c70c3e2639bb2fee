//! Default numerical tolerances.

/// Negative entries down to `-TOL_NEG` are clamped to zero.
pub const TOL_NEG: f64 = 1e-12;
/// Allowed deviation of a probability vector's sum from 1.
pub const TOL_SUM: f64 = 1e-12;
/// Slack when comparing thermomajorisation curves.
pub const TOL_CURVE: f64 = 1e-10;
/// Slope tolerance for the concavity check on curves.
pub const TOL_SLOPE: f64 = 1e-9;
/// Two vertices closer than this (max norm) are the same vertex.
pub const TOL_DUP: f64 = 1e-10;
/// Simplex pivoting and hull-membership tolerance.
pub const TOL_LP: f64 = 1e-9;
/// Default Hausdorff threshold for declaring a simulation converged.
pub const CONV_TOL: f64 = 1e-8;
/// Frobenius defect of `U^dagger U - I` accepted as unitary.
pub const TOL_UNITARY: f64 = 1e-10;
/// Moduli at or below this count as structural zeros.
pub const TOL_ZERO: f64 = 1e-12;
/// Minimum modulus required of every entry of a dense product.
pub const TOL_DENSE: f64 = 1e-8;
/// Acceptance threshold for a flat column.
pub const TOL_FLAT: f64 = 1e-8;
