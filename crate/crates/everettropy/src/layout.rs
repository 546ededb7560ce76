//! Labeled tensor-product structure of a finite-dimensional Hilbert space.
//!
//! A [`SystemLayout`] is an ordered list of named subsystems with their
//! dimensions. Operators and states carry a layout so that subsystem-level
//! operations (embedding, partial trace, bipartitions) can be addressed by
//! label instead of by error-prone manual index arithmetic.
//!
//! Basis convention: the product basis is ordered row-major in layout order,
//! i.e. the flat index of the multi-index `(i_0, ..., i_{k-1})` is
//! `sum_k i_k * stride_k` with `stride_k = prod_{j > k} dim_j`. The first
//! subsystem in the layout is therefore the most significant digit, which is
//! exactly the ordering produced by a Kronecker product taken left to right.

use crate::error::{Error, Result};

/// Default upper bound on the total dimension of a layout.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// One named subsystem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    label: String,
    dim: usize,
}

impl Subsystem {
    /// Subsystem label.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Subsystem dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Ordered collection of named subsystems spanning a tensor-product space.
#[derive(Debug, Clone)]
pub struct SystemLayout {
    subsystems: Vec<Subsystem>,
    cap: usize,
}

impl PartialEq for SystemLayout {
    /// Layouts compare by subsystem sequence only; the dimension cap is a
    /// construction guard, not part of the identity of the space.
    fn eq(&self, other: &Self) -> bool {
        self.subsystems == other.subsystems
    }
}

impl Eq for SystemLayout {}

impl SystemLayout {
    /// Builds a layout from `(label, dim)` pairs under the default cap.
    ///
    /// Labels must be unique and every dimension at least 1; the product of
    /// all dimensions must not exceed the cap.
    pub fn new<L: Into<String>>(parts: impl IntoIterator<Item = (L, usize)>) -> Result<Self> {
        Self::with_cap(parts, DEFAULT_DIMENSION_CAP)
    }

    /// Builds a layout with an explicit total-dimension cap.
    pub fn with_cap<L: Into<String>>(
        parts: impl IntoIterator<Item = (L, usize)>,
        cap: usize,
    ) -> Result<Self> {
        let mut subsystems: Vec<Subsystem> = Vec::new();
        let mut total: usize = 1;
        for (label, dim) in parts {
            let label = label.into();
            if dim == 0 {
                return Err(Error::ZeroDimension { label });
            }
            if subsystems.iter().any(|s| s.label == label) {
                return Err(Error::DuplicateLabel { label });
            }
            total = total.checked_mul(dim).ok_or(Error::DimensionCapExceeded {
                total: usize::MAX,
                cap,
            })?;
            if total > cap {
                return Err(Error::DimensionCapExceeded { total, cap });
            }
            subsystems.push(Subsystem { label, dim });
        }
        Ok(SystemLayout { subsystems, cap })
    }

    /// Single-subsystem layout.
    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    /// The subsystems in order.
    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    /// Number of subsystems.
    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    /// Whether the layout has no subsystems (a one-dimensional scalar space).
    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    /// Total dimension (product of subsystem dimensions; 1 when empty).
    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    /// The configured dimension cap.
    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Position of `label` in the layout.
    pub fn position(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownLabel {
                label: label.to_string(),
            })
    }

    /// Dimension of the subsystem named `label`.
    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.subsystems[self.position(label)?].dim)
    }

    /// Labels in layout order.
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.subsystems.iter().map(|s| s.label.as_str())
    }

    /// Human-readable `label:dim` list, used in error messages.
    pub fn describe(&self) -> String {
        self.subsystems
            .iter()
            .map(|s| format!("{}:{}", s.label, s.dim))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Row-major strides: `stride_k = prod_{j > k} dim_j`.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.subsystems.len()];
        for k in (0..self.subsystems.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.subsystems[k + 1].dim;
        }
        strides
    }

    /// Flat basis index of a full multi-index (one entry per subsystem).
    pub fn flat_index(&self, multi: &[usize]) -> Result<usize> {
        if multi.len() != self.subsystems.len() {
            return Err(Error::InvalidField {
                field: "multi-index".into(),
                reason: format!(
                    "expected {} entries, got {}",
                    self.subsystems.len(),
                    multi.len()
                ),
            });
        }
        let mut flat = 0usize;
        for (k, (&i, s)) in multi.iter().zip(&self.subsystems).enumerate() {
            if i >= s.dim {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    dim: s.dim,
                });
            }
            let _ = k;
            flat = flat * s.dim + i;
        }
        Ok(flat)
    }

    /// Decomposes a flat basis index into per-subsystem indices.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.subsystems.len()];
        let mut rest = flat;
        for (k, s) in self.subsystems.iter().enumerate().rev() {
            out[k] = rest % s.dim;
            rest /= s.dim;
        }
        out
    }

    /// Concatenation of two layouts (the layout of a tensor product).
    /// Labels must be disjoint; the result inherits the larger cap.
    pub fn concat(&self, other: &SystemLayout) -> Result<SystemLayout> {
        for label in other.labels() {
            if self.subsystems.iter().any(|s| s.label == label) {
                return Err(Error::OverlappingLabels {
                    label: label.to_string(),
                });
            }
        }
        let cap = self.cap.max(other.cap);
        SystemLayout::with_cap(
            self.subsystems
                .iter()
                .chain(&other.subsystems)
                .map(|s| (s.label.clone(), s.dim)),
            cap,
        )
    }

    /// Sub-layout formed by the subsystems at `positions` (which must be
    /// strictly increasing).
    pub(crate) fn restricted(&self, positions: &[usize]) -> SystemLayout {
        SystemLayout {
            subsystems: positions
                .iter()
                .map(|&p| self.subsystems[p].clone())
                .collect(),
            cap: self.cap,
        }
    }

    /// Resolves a list of labels to strictly increasing positions, rejecting
    /// unknown labels, repeats, and lists given out of layout order.
    pub(crate) fn positions_in_order(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut positions = Vec::with_capacity(labels.len());
        let mut last: Option<usize> = None;
        for &label in labels {
            let p = self.position(label)?;
            if let Some(prev) = last {
                if p <= prev {
                    return Err(Error::LabelsOutOfOrder {
                        label: label.to_string(),
                    });
                }
            }
            positions.push(p);
            last = Some(p);
        }
        Ok(positions)
    }
}

/// Precomputed maps from flat indices of a layout onto flat indices of a
/// chosen subsystem subset and of its complement. Used by embeddings,
/// controlled constructions, and partial traces, which all need to answer
/// "which (subset, rest) pair is this global basis vector?" in O(1).
#[derive(Debug, Clone)]
pub(crate) struct IndexSplit {
    /// For each global flat index, the flat index over the chosen subset.
    pub selected: Vec<usize>,
    /// For each global flat index, the flat index over the complement.
    pub rest: Vec<usize>,
    /// Total dimension of the chosen subset.
    pub selected_dim: usize,
    /// Total dimension of the complement.
    pub rest_dim: usize,
}

impl IndexSplit {
    /// Splits `layout` along the subsystems at `positions` (strictly
    /// increasing). Both sides keep layout order.
    pub fn new(layout: &SystemLayout, positions: &[usize]) -> IndexSplit {
        let total = layout.total_dim();
        let in_subset: Vec<bool> = {
            let mut mask = vec![false; layout.len()];
            for &p in positions {
                mask[p] = true;
            }
            mask
        };
        let rest_positions: Vec<usize> =
            (0..layout.len()).filter(|&p| !in_subset[p]).collect();
        let selected_dim = positions
            .iter()
            .map(|&p| layout.subsystems()[p].dim)
            .product::<usize>()
            .max(1);
        let rest_dim = rest_positions
            .iter()
            .map(|&p| layout.subsystems()[p].dim)
            .product::<usize>()
            .max(1);

        let mut selected = vec![0usize; total];
        let mut rest = vec![0usize; total];
        for flat in 0..total {
            let multi = layout.multi_index(flat);
            let mut s = 0usize;
            for &p in positions {
                s = s * layout.subsystems()[p].dim + multi[p];
            }
            let mut r = 0usize;
            for &p in &rest_positions {
                r = r * layout.subsystems()[p].dim + multi[p];
            }
            selected[flat] = s;
            rest[flat] = r;
        }
        IndexSplit {
            selected,
            rest,
            selected_dim,
            rest_dim,
        }
    }
}
