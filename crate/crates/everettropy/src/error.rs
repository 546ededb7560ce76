//! Error taxonomy shared across the crate.
//!
//! Everything a caller can get wrong — bad labels, non-square matrices,
//! tolerance breaches on physical preconditions — surfaces as an [`Error`]
//! variant instead of a panic, so the command-line front end can map failures
//! onto its exit-code contract: configuration and validation problems are
//! distinct from violations of numerical properties the library guarantees.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    // ---- layout and indexing ----
    #[error("duplicate subsystem label `{label}`")]
    DuplicateLabel { label: String },
    #[error("subsystem `{label}` has dimension 0; every dimension must be at least 1")]
    ZeroDimension { label: String },
    #[error("total dimension {total} exceeds the layout cap {cap}")]
    DimensionCapExceeded { total: usize, cap: usize },
    #[error("unknown subsystem label `{label}`")]
    UnknownLabel { label: String },
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("labels must be listed in layout order and without repeats (got `{label}` out of place)")]
    LabelsOutOfOrder { label: String },
    #[error("matrix is {rows}x{cols} but the layout requires a square matrix of dimension {expected}")]
    MatrixShape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("operator layouts differ: [{left}] vs [{right}]")]
    LayoutMismatch { left: String, right: String },
    #[error("tensor factors share the subsystem label `{label}`")]
    OverlappingLabels { label: String },
    #[error("the keep-set of a partial trace must be non-empty")]
    EmptyKeepSet,
    #[error("bipartition must split the layout into two non-empty sides")]
    EmptyBipartitionSide,

    // ---- state and observable validation ----
    #[error("matrix is not Hermitian: max |A - A^dagger| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("operator is not unitary: max |U^dagger U - 1| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotUnitary { deviation: f64, tolerance: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e} is below -{tolerance:.3e}")]
    NotPositiveSemidefinite { eigenvalue: f64, tolerance: f64 },
    #[error("trace is {trace:.12} but must equal 1 within {tolerance:.3e}")]
    TraceNotOne { trace: f64, tolerance: f64 },
    #[error("spectrum is ambiguous: eigenvalue clusters spread {spread:.3e} wider than the reconstruction tolerance {tolerance:.3e}")]
    AmbiguousSpectrum { spread: f64, tolerance: f64 },
    #[error("trace has imaginary residual {residual:.3e}, above the 1e-9 bound")]
    ImaginaryResidual { residual: f64 },
    #[error("payoff missing for eigenvalue {eigenvalue}")]
    PayoffMissing { eigenvalue: f64 },
    #[error("state is not pure: entropy {entropy_bits:.3e} bits exceeds purity tolerance {tolerance:.3e}")]
    NotPure { entropy_bits: f64, tolerance: f64 },
    #[error("state vector norm is {norm:.12}, expected 1 within {tolerance:.3e}")]
    NotNormalized { norm: f64, tolerance: f64 },

    // ---- projector families and branching ----
    #[error("projector family member {index} is not a projector (deviation {deviation:.3e})")]
    NotAProjector { index: usize, deviation: f64 },
    #[error("projector family is not mutually orthogonal (members {first} and {second}, overlap {deviation:.3e})")]
    ProjectorsNotOrthogonal {
        first: usize,
        second: usize,
        deviation: f64,
    },
    #[error("projector family is incomplete: max |sum - 1| = {deviation:.3e}")]
    ProjectorsIncomplete { deviation: f64 },
    #[error("ambiguous projector matching: observable has a degenerate spectrum")]
    AmbiguousProjectorMatching,

    // ---- permutations, codes, distributions ----
    #[error("permutation of length {len} is not a bijection on 0..{dim}")]
    NotBijective { len: usize, dim: usize },
    #[error("{name} is not a probability distribution: {reason}")]
    InvalidDistribution { name: String, reason: String },

    // ---- copying ----
    #[error("operator is not copyable: non-normality witnessed at entry ({row}, {col})")]
    NotCopyable { row: usize, col: usize },
    #[error("record dimension {dim} is smaller than the {needed} distinct eigenvalues to be recorded")]
    RecordTooSmall { dim: usize, needed: usize },

    // ---- numerical property violations (exit code 2 at the CLI) ----
    #[error("numerical property violated: {context}: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NumericalViolation {
        context: String,
        deviation: f64,
        tolerance: f64,
    },

    // ---- I/O and wire formats ----
    #[error("field `{field}`: {reason}")]
    InvalidField { field: String, reason: String },

    // ---- files and wire formats ----
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Whether this error reports a violated numerical property (as opposed
    /// to invalid caller input). The CLI maps these onto exit code 2.
    pub fn is_numerical_violation(&self) -> bool {
        matches!(self, Error::NumericalViolation { .. })
    }
}
