//! Wire format for operators, states, and coding experiments.
//!
//! An operator travels as `{"layout": [{"label": str, "dim": int}, ...],
//! "matrix": [[[re, im], ...], ...]}` with the matrix row-major over the
//! layout's flat index. States use the same shape (they are operators with
//! extra physical requirements, re-checked on load). A coding experiment is
//! `{"prior": [...], "spectrum": [...], "code": [[...], ...]}`.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::SystemLayout;
use crate::linalg::C64;
use crate::operator::Operator;
use crate::state::DensityState;
use crate::tolerance::Tolerances;

/// One subsystem of a serialized layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsystemWire {
    /// Subsystem label.
    pub label: String,
    /// Subsystem dimension.
    pub dim: usize,
}

/// A serialized operator: labeled layout plus a row-major complex matrix
/// with entries written as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorWire {
    /// Subsystems in layout order.
    pub layout: Vec<SubsystemWire>,
    /// Row-major matrix entries.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl OperatorWire {
    /// Snapshot of an operator in wire form.
    pub fn from_operator(op: &Operator) -> Self {
        let layout = op
            .layout()
            .subsystems()
            .iter()
            .map(|s| SubsystemWire {
                label: s.label().to_string(),
                dim: s.dim(),
            })
            .collect();
        let dim = op.layout().total_dim();
        let matrix = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let entry = op.matrix()[(i, j)];
                        [entry.re, entry.im]
                    })
                    .collect()
            })
            .collect();
        OperatorWire { layout, matrix }
    }

    /// Reassembles the operator, rejecting non-square or
    /// dimension-mismatched matrices.
    pub fn into_operator(self) -> Result<Operator> {
        let layout =
            SystemLayout::new(self.layout.iter().map(|s| (s.label.as_str(), s.dim)))?;
        let dim = layout.total_dim();
        if self.matrix.len() != dim || self.matrix.iter().any(|row| row.len() != dim) {
            let rows = self.matrix.len();
            let cols = self.matrix.first().map_or(0, Vec::len);
            return Err(Error::MatrixShape {
                rows,
                cols,
                expected: dim,
            });
        }
        let mut entries = DMatrix::<C64>::zeros(dim, dim);
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::InvalidField {
                        field: "matrix".into(),
                        reason: format!("entry ({i}, {j}) is not finite"),
                    });
                }
                entries[(i, j)] = C64::new(re, im);
            }
        }
        Operator::new(layout, entries)
    }
}

/// A serialized coding experiment over a single register.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentWire {
    /// Message prior.
    pub prior: Vec<f64>,
    /// Channel-state spectrum, interpreted as eigenvalue probabilities.
    pub spectrum: Vec<f64>,
    /// One permutation of spectrum indices per message.
    pub code: Vec<Vec<usize>>,
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}

/// Loads an operator from a wire-format JSON file.
pub fn load_operator(path: &Path) -> Result<Operator> {
    let wire: OperatorWire = parse(path, &read_to_string(path)?)?;
    wire.into_operator()
}

/// Loads a density state: an operator file whose matrix must additionally
/// be Hermitian, positive semidefinite, and unit trace.
pub fn load_state(path: &Path, tols: &Tolerances) -> Result<DensityState> {
    DensityState::with_tolerances(load_operator(path)?, tols)
}

/// Loads a coding experiment description.
pub fn load_experiment(path: &Path) -> Result<ExperimentWire> {
    parse(path, &read_to_string(path)?)
}

/// Writes an operator to a wire-format JSON file.
pub fn save_operator(path: &Path, op: &Operator) -> Result<()> {
    let text = serde_json::to_string_pretty(&OperatorWire::from_operator(op)).map_err(
        |source| Error::Json {
            path: path.display().to_string(),
            source,
        },
    )?;
    std::fs::write(path, text + "\n").map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
