//! Which operators can be copied, and the machines that copy them.
//!
//! An operator's value can be written into a second system by a unitary
//! interaction exactly when the operator is a complex linear combination of
//! one orthogonal projector family — equivalently, when it is normal. The
//! classifier here decides that by the commutator test `B B^dagger =
//! B^dagger B`; the constructor builds the copying unitary `U = sum_c P_c
//! (x) u_c` with `P_c` the eigenspace projectors and `u_c` the shift-by-`c`
//! permutation on a record register; the verifier checks the two defining
//! properties of a genuine copy (the copied operator is left invariant, and
//! the interaction does not factorize into independent local unitaries).
//! [`cloning_demo`] exhibits the classic limitation: a machine that copies
//! one basis perfectly scrambles superpositions of it.

use nalgebra::DMatrix;

use crate::dynamics::ensure_unitary;
use crate::error::{Error, Result};
use crate::layout::{IndexSplit, SystemLayout};
use crate::linalg::{self, C64};
use crate::operator::Operator;
use crate::state::DensityState;
use crate::tolerance::Tolerances;

/// A unitary factorizes across a cut when its second operator-Schmidt
/// singular value is at most this fraction of the first.
pub const OPERATOR_SCHMIDT_RATIO: f64 = 1e-8;

/// Outcome of [`classify_copyable`].
#[derive(Debug, Clone)]
pub struct CopyVerdict {
    copyable: bool,
    degenerate: bool,
    eigenbasis: Option<DMatrix<C64>>,
    witness: Option<(usize, usize)>,
    distinct_eigenvalues: Vec<C64>,
}

impl CopyVerdict {
    /// Whether the operator admits a copying interaction.
    pub fn copyable(&self) -> bool {
        self.copyable
    }

    /// Whether any eigenvalue has multiplicity above one (meaningful only
    /// when copyable).
    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    /// Orthonormal eigenbasis columns; present exactly when copyable.
    pub fn eigenbasis(&self) -> Option<&DMatrix<C64>> {
        self.eigenbasis.as_ref()
    }

    /// Matrix entry indices witnessing the failure; present exactly when
    /// not copyable.
    pub fn witness(&self) -> Option<(usize, usize)> {
        self.witness
    }

    /// Distinct eigenvalues, sorted descending by (real, imaginary) part;
    /// empty when not copyable.
    pub fn distinct_eigenvalues(&self) -> &[C64] {
        &self.distinct_eigenvalues
    }
}

/// Position of the largest-magnitude entry of `m`.
fn argmax_entry(m: &DMatrix<C64>) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_norm = -1.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let n = m[(i, j)].norm();
            if n > best_norm {
                best_norm = n;
                best = (i, j);
            }
        }
    }
    best
}

/// Distinct-eigenvalue clusters of a normal matrix: representatives sorted
/// descending by (real, imaginary) part, with matching eigenspace
/// projectors.
fn clustered_spectrum(
    matrix: &DMatrix<C64>,
    degeneracy_gap: f64,
) -> (Vec<C64>, Vec<DMatrix<C64>>, DMatrix<C64>) {
    let (values, vectors) = linalg::normal_eigen(matrix, degeneracy_gap);
    let n = values.len();

    // transitive clustering: two eigenvalues share a cluster when connected
    // by a chain of pairs closer than the degeneracy gap
    let mut cluster_of: Vec<usize> = (0..n).collect();
    fn root(cluster_of: &mut Vec<usize>, mut i: usize) -> usize {
        while cluster_of[i] != i {
            cluster_of[i] = cluster_of[cluster_of[i]];
            i = cluster_of[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= degeneracy_gap {
                let (ri, rj) = (root(&mut cluster_of, i), root(&mut cluster_of, j));
                if ri != rj {
                    cluster_of[ri] = rj;
                }
            }
        }
    }
    let mut members: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = root(&mut cluster_of, i);
        match members.iter_mut().find(|(rep, _)| *rep == r) {
            Some((_, m)) => m.push(i),
            None => members.push((r, vec![i])),
        }
    }

    let mut clusters: Vec<(C64, Vec<usize>)> = members
        .into_iter()
        .map(|(_, m)| {
            let mean = m.iter().map(|&i| values[i]).sum::<C64>() / C64::new(m.len() as f64, 0.0);
            (mean, m)
        })
        .collect();
    clusters.sort_by(|(a, _), (b, _)| {
        b.re.partial_cmp(&a.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
    });

    let mut representatives = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    for (rep, m) in clusters {
        let mut p = DMatrix::<C64>::zeros(n, n);
        for &i in &m {
            let v = vectors.column(i).into_owned();
            p += &v * v.adjoint();
        }
        representatives.push(rep);
        projectors.push(p);
    }
    (representatives, projectors, vectors)
}

/// Classifies whether `b` can be copied by a unitary interaction: yes
/// exactly when `b` is normal, i.e. `max |B B^dagger - B^dagger B| <= tol`.
/// Degeneracy is judged with the default degeneracy tolerance.
pub fn classify_copyable(b: &Operator, tol: f64) -> CopyVerdict {
    let m = b.matrix();
    let commutator = m * m.adjoint() - m.adjoint() * m;
    if linalg::max_abs(&commutator) > tol {
        return CopyVerdict {
            copyable: false,
            degenerate: false,
            eigenbasis: None,
            witness: Some(argmax_entry(&commutator)),
            distinct_eigenvalues: Vec::new(),
        };
    }
    let (representatives, _, vectors) =
        clustered_spectrum(m, Tolerances::default().degeneracy);
    CopyVerdict {
        copyable: true,
        degenerate: representatives.len() < b.dim(),
        eigenbasis: Some(vectors),
        witness: None,
        distinct_eigenvalues: representatives,
    }
}

/// Stricter variant accepting only Hermitian operators (real-coefficient
/// projector combinations): copyable iff `max |B - B^dagger| <= tol`.
pub fn classify_copyable_hermitian_only(b: &Operator, tol: f64) -> CopyVerdict {
    let m = b.matrix();
    if linalg::hermiticity_deviation(m) > tol {
        let difference = m - m.adjoint();
        return CopyVerdict {
            copyable: false,
            degenerate: false,
            eigenbasis: None,
            witness: Some(argmax_entry(&difference)),
            distinct_eigenvalues: Vec::new(),
        };
    }
    classify_copyable(b, tol)
}

/// Builds the copying unitary `U = sum_c P_c (x) u_c` onto a fresh record
/// subsystem of dimension `record_dim`: `P_c` are the eigenspace projectors
/// of `b` (eigenvalues sorted descending by real then imaginary part) and
/// `u_c` is the shift-by-`c` permutation of the record's computational
/// basis. Conjugation by the result leaves `b (x) 1` invariant, and
/// applying it to an eigenstate with a blank record writes the eigenvalue
/// index into the record. For `b` with degenerate eigenvalues one shift is
/// shared per eigenspace (identity action inside each block).
pub fn build_copy_unitary(b: &Operator, record_label: &str, record_dim: usize) -> Result<Operator> {
    build_copy_unitary_with(b, record_label, record_dim, &Tolerances::default())
}

/// [`build_copy_unitary`] under explicit tolerances (`tols.operator` is the
/// normality threshold, `tols.degeneracy` the eigenvalue-grouping gap).
pub fn build_copy_unitary_with(
    b: &Operator,
    record_label: &str,
    record_dim: usize,
    tols: &Tolerances,
) -> Result<Operator> {
    let m = b.matrix();
    let commutator = m * m.adjoint() - m.adjoint() * m;
    if linalg::max_abs(&commutator) > tols.operator {
        let (row, col) = argmax_entry(&commutator);
        return Err(Error::NotCopyable { row, col });
    }
    let (representatives, projectors, _) = clustered_spectrum(m, tols.degeneracy);
    if record_dim < representatives.len() {
        return Err(Error::RecordTooSmall {
            dim: record_dim,
            needed: representatives.len(),
        });
    }
    let record = SystemLayout::single(record_label, record_dim)?;
    let combined = b.layout().concat(&record)?;
    let source_labels: Vec<&str> = b.layout().labels().collect();
    let mut acc = Operator::zeros(&combined);
    for (c, projector) in projectors.iter().enumerate() {
        let shift: Vec<usize> = (0..record_dim).map(|r| (r + c) % record_dim).collect();
        let mut shift_matrix = DMatrix::<C64>::zeros(record_dim, record_dim);
        for (r, &image) in shift.iter().enumerate() {
            shift_matrix[(image, r)] = C64::new(1.0, 0.0);
        }
        let term = &Operator::embedded_multi(&combined, &source_labels, projector)?
            * &Operator::embedded(&combined, record_label, &shift_matrix)?;
        acc = &acc + &term;
    }
    Ok(acc)
}

/// The two defining checks of a copying interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CopyCheck {
    /// Conjugation by the unitary leaves the lifted operator unchanged.
    pub invariant: bool,
    /// The unitary is a tensor product of local unitaries (and therefore
    /// copies nothing).
    pub factorizes: bool,
}

/// Checks whether `unitary` copies `b`: `invariant` holds when
/// `U^dagger (b (x) 1) U = b (x) 1` within the operator tolerance, and
/// `factorizes` when the unitary's operator-Schmidt decomposition across
/// (b's subsystems | rest) has rank one. A genuine copy is invariant and
/// non-factorizing.
pub fn verify_copy(unitary: &Operator, b: &Operator) -> Result<CopyCheck> {
    verify_copy_with(unitary, b, &Tolerances::default())
}

/// [`verify_copy`] under explicit tolerances.
pub fn verify_copy_with(unitary: &Operator, b: &Operator, tols: &Tolerances) -> Result<CopyCheck> {
    ensure_unitary(unitary, tols)?;
    let layout = unitary.layout();
    let source_labels: Vec<&str> = b.layout().labels().collect();
    let positions = layout.positions_in_order(&source_labels)?;
    if positions.len() == layout.len() {
        return Err(Error::EmptyBipartitionSide);
    }
    let lifted = Operator::embedded_multi(layout, &source_labels, b.matrix())?;
    let u = unitary.matrix();
    let conjugated = u.adjoint() * lifted.matrix() * u;
    let invariant = linalg::max_abs_diff(&conjugated, lifted.matrix()) <= tols.operator;

    let split = IndexSplit::new(layout, &positions);
    let mut paired = DMatrix::<C64>::zeros(
        split.selected_dim * split.selected_dim,
        split.rest_dim * split.rest_dim,
    );
    let n = layout.total_dim();
    for i in 0..n {
        for j in 0..n {
            paired[(
                split.selected[i] * split.selected_dim + split.selected[j],
                split.rest[i] * split.rest_dim + split.rest[j],
            )] = u[(i, j)];
        }
    }
    let mut singulars = paired.svd(false, false).singular_values.as_slice().to_vec();
    singulars.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let factorizes = match singulars.as_slice() {
        [] | [_] => true,
        [first, second, ..] => *second <= OPERATOR_SCHMIDT_RATIO * *first,
    };
    Ok(CopyCheck {
        invariant,
        factorizes,
    })
}

/// Per-probe outcome of [`cloning_demo`].
#[derive(Debug, Clone, Copy)]
pub struct CloneOutcome {
    /// The joint output equals probe (x) probe within the operator
    /// tolerance.
    pub exact: bool,
    /// Overlap of the record marginal with the probe.
    pub marginal_fidelity: f64,
}

/// Runs pure probe states through a would-be cloner on a two-subsystem
/// layout (first subsystem: source, second: record, equal dimensions). Each
/// probe is paired with a blank record `|0>`, evolved, and compared with
/// the ideal clone `probe (x) probe`.
pub fn cloning_demo(unitary: &Operator, probes: &[DensityState]) -> Result<Vec<CloneOutcome>> {
    cloning_demo_with(unitary, probes, &Tolerances::default())
}

/// [`cloning_demo`] under explicit tolerances.
pub fn cloning_demo_with(
    unitary: &Operator,
    probes: &[DensityState],
    tols: &Tolerances,
) -> Result<Vec<CloneOutcome>> {
    ensure_unitary(unitary, tols)?;
    let layout = unitary.layout();
    if layout.len() != 2 {
        return Err(Error::InvalidField {
            field: "unitary".into(),
            reason: format!(
                "cloning demo needs a two-subsystem layout, got {}",
                layout.describe()
            ),
        });
    }
    let source = layout.subsystems()[0].label().to_string();
    let record = layout.subsystems()[1].label().to_string();
    let n = layout.subsystems()[0].dim();
    if layout.subsystems()[1].dim() != n {
        return Err(Error::LayoutMismatch {
            left: format!("{source}:{n}"),
            right: format!("{record}:{}", layout.subsystems()[1].dim()),
        });
    }

    let mut blank = DMatrix::<C64>::zeros(n, n);
    blank[(0, 0)] = C64::new(1.0, 0.0);
    let u = unitary.matrix();
    probes
        .iter()
        .map(|probe| {
            if probe.layout().total_dim() != n {
                return Err(Error::MatrixShape {
                    rows: probe.layout().total_dim(),
                    cols: probe.layout().total_dim(),
                    expected: n,
                });
            }
            if !probe.is_pure(tols) {
                return Err(Error::NotPure {
                    entropy_bits: probe.entropy_bits(),
                    tolerance: tols.purity,
                });
            }
            let input = probe.operator().matrix().kronecker(&blank);
            let output = u * input * u.adjoint();
            let ideal = probe.operator().matrix().kronecker(probe.operator().matrix());
            let exact = linalg::max_abs_diff(&output, &ideal) <= tols.operator;
            let joint = Operator::new(layout.clone(), output)?;
            let record_marginal = joint.partial_trace(&[record.as_str()])?;
            let mut fidelity = C64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    fidelity += probe.operator().matrix()[(j, i)] * record_marginal.matrix()[(i, j)];
                }
            }
            Ok(CloneOutcome {
                exact,
                marginal_fidelity: fidelity.re,
            })
        })
        .collect()
}
