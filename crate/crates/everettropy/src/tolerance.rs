//! Numerical tolerances used by validation and classification routines.
//!
//! One struct carries every threshold so callers can tighten or relax the
//! whole stack coherently. The operator tolerance can also be overridden
//! globally through the `EVERETTROPY_TOL` environment variable, which the
//! command-line front end reads at startup.

/// Environment variable that overrides [`Tolerances::operator`].
pub const TOLERANCE_ENV_VAR: &str = "EVERETTROPY_TOL";

/// Default entrywise tolerance for operator identities (hermiticity,
/// unitarity, reconstruction residuals).
pub const DEFAULT_OPERATOR_TOL: f64 = 1e-10;

/// Default slack below zero allowed for density-matrix eigenvalues before the
/// matrix is rejected as not positive semidefinite.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Default entropy bound (in bits) below which a state counts as pure.
pub const DEFAULT_PURITY_TOL: f64 = 1e-9;

/// Default spectral-gap threshold separating distinct eigenvalues from a
/// degenerate cluster.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

/// Tolerance bundle threaded through constructors and checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Entrywise tolerance for operator identities.
    pub operator: f64,
    /// How far below zero a density eigenvalue may dip before rejection;
    /// eigenvalues in `[-psd, 0)` are clipped to zero and the spectrum is
    /// renormalized.
    pub psd: f64,
    /// Entropy (bits) under which a state is treated as pure.
    pub purity: f64,
    /// Spectral gap under which adjacent eigenvalues are merged into one
    /// degenerate cluster.
    pub degeneracy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            operator: DEFAULT_OPERATOR_TOL,
            psd: DEFAULT_PSD_TOL,
            purity: DEFAULT_PURITY_TOL,
            degeneracy: DEFAULT_DEGENERACY_TOL,
        }
    }
}

impl Tolerances {
    /// Defaults, with the operator tolerance taken from `EVERETTROPY_TOL`
    /// when that variable is set to a positive finite number.
    pub fn from_env() -> Self {
        let mut tols = Tolerances::default();
        if let Ok(raw) = std::env::var(TOLERANCE_ENV_VAR) {
            if let Ok(value) = raw.trim().parse::<f64>() {
                if value.is_finite() && value > 0.0 {
                    tols.operator = value;
                }
            }
        }
        tols
    }

    /// Defaults with a different operator tolerance.
    pub fn with_operator(operator: f64) -> Self {
        Tolerances {
            operator,
            ..Tolerances::default()
        }
    }
}
