//! Numerical tolerances shared by validation, verdicts and reports.
//!
//! All values are absolute and assume double precision on matrices of side
//! at most 4096.

/// Hermiticity, trace and positivity checks on states and witnesses.
pub const STRUCTURAL: f64 = 1e-10;

/// Reconstruction identities (e.g. tr₃[N(η𝟙 − P₀₀)] against c·Wᵀ).
pub const RECONSTRUCTION: f64 = 1e-9;

/// Floor below which an eigenvalue of a partial transpose counts as negative.
pub const PPT_FLOOR: f64 = -1e-9;

/// Hermiticity precondition of the eigensolver.
pub const EIGEN_HERMITIAN: f64 = 1e-8;

/// Width of the band around η inside which exact verdicts may disagree.
pub const VERDICT_BAND: f64 = 1e-9;

/// Seesaw floor above which a witness is accepted as non-negative on products.
pub const SEP_FLOOR: f64 = -1e-6;

/// Slack on the cyclic inequality bound `d`.
pub const CYCLIC_SLACK: f64 = 1e-9;

/// Post-selection probability below which filtering is refused.
pub const MIN_SUCCESS_PROB: f64 = 1e-14;
