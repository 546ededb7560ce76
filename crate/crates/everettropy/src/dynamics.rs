//! Unitary evolution in both pictures, measurement-style unitary
//! constructors, branching detection, and projective dephasing.
//!
//! The constructors here produce the workhorse interactions of the rest of
//! the crate: basis-relative permutation unitaries, the perfect-measurement
//! coupling `|a,b> -> |a,(a+b) mod N>` that correlates a subsystem with a
//! record, and general computational-basis controlled unitaries.
//! [`detect_branching`] asks the converse question: given a unitary and a
//! nondegenerate observable, does conjugation merely permute the
//! observable's eigenprojectors? When it does, the dynamics look classical
//! relative to that observable; when it does not, superpositions of its
//! eigenstates are being created.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::layout::{IndexSplit, SystemLayout};
use crate::linalg::{self, C64};
use crate::operator::Operator;
use crate::state::{DensityState, Observable};
use crate::tolerance::Tolerances;

/// Which quantity a step advances: observables (Heisenberg) or states
/// (Schrödinger). Expectation values agree between the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    Heisenberg,
    Schrodinger,
}

/// A validated unitary step between two time tags, tagged with the picture
/// it is meant to advance. Time tags are bookkeeping only; there is no
/// continuous-time generator.
#[derive(Debug, Clone)]
pub struct EvolutionStep {
    unitary: Operator,
    picture: Picture,
    t_from: f64,
    t_to: f64,
}

impl EvolutionStep {
    /// Validates the unitary (within the default operator tolerance) and
    /// requires distinct time tags.
    pub fn new(unitary: Operator, picture: Picture, t_from: f64, t_to: f64) -> Result<Self> {
        Self::with_tolerances(unitary, picture, t_from, t_to, &Tolerances::default())
    }

    /// [`Self::new`] under explicit tolerances.
    pub fn with_tolerances(
        unitary: Operator,
        picture: Picture,
        t_from: f64,
        t_to: f64,
        tols: &Tolerances,
    ) -> Result<Self> {
        ensure_unitary(&unitary, tols)?;
        if t_from == t_to {
            return Err(Error::InvalidField {
                field: "t_to".into(),
                reason: format!("time tags must differ, both are {t_from}"),
            });
        }
        Ok(EvolutionStep {
            unitary,
            picture,
            t_from,
            t_to,
        })
    }

    /// The step's unitary.
    pub fn unitary(&self) -> &Operator {
        &self.unitary
    }

    /// The picture this step advances.
    pub fn picture(&self) -> Picture {
        self.picture
    }

    /// Starting time tag.
    pub fn t_from(&self) -> f64 {
        self.t_from
    }

    /// Ending time tag.
    pub fn t_to(&self) -> f64 {
        self.t_to
    }

    /// Advances a state: in the Schrödinger picture this conjugates by the
    /// unitary; in the Heisenberg picture states are static and the input
    /// is returned unchanged.
    pub fn advance_state(&self, state: &DensityState) -> Result<DensityState> {
        match self.picture {
            Picture::Schrodinger => evolve_schrodinger(state, &self.unitary),
            Picture::Heisenberg => Ok(state.clone()),
        }
    }

    /// Advances an observable: in the Heisenberg picture this conjugates by
    /// the unitary; in the Schrödinger picture observables are static and
    /// the input is returned unchanged.
    pub fn advance_observable(&self, observable: &Operator) -> Result<Operator> {
        match self.picture {
            Picture::Heisenberg => evolve_heisenberg(observable, &self.unitary),
            Picture::Schrodinger => Ok(observable.clone()),
        }
    }
}

/// Fails with [`Error::NotUnitary`] unless `op` is unitary within the
/// operator tolerance.
pub(crate) fn ensure_unitary(op: &Operator, tols: &Tolerances) -> Result<()> {
    let m = op.matrix();
    let left = linalg::deviation_from_identity(&(m.adjoint() * m));
    let right = linalg::deviation_from_identity(&(m * m.adjoint()));
    let deviation = left.max(right);
    if deviation > tols.operator {
        return Err(Error::NotUnitary {
            deviation,
            tolerance: tols.operator,
        });
    }
    Ok(())
}

/// Heisenberg-picture step: `A -> U^dagger A U`. Preserves Hermiticity and
/// spectrum.
pub fn evolve_heisenberg(observable: &Operator, unitary: &Operator) -> Result<Operator> {
    evolve_heisenberg_with(observable, unitary, &Tolerances::default())
}

/// [`evolve_heisenberg`] under explicit tolerances.
pub fn evolve_heisenberg_with(
    observable: &Operator,
    unitary: &Operator,
    tols: &Tolerances,
) -> Result<Operator> {
    observable.check_same_layout(unitary)?;
    ensure_unitary(unitary, tols)?;
    let u = unitary.matrix();
    Operator::new(
        observable.layout().clone(),
        u.adjoint() * observable.matrix() * u,
    )
}

/// Schrödinger-picture step: `rho -> U rho U^dagger`. Preserves the
/// spectrum, hence the entropy.
pub fn evolve_schrodinger(state: &DensityState, unitary: &Operator) -> Result<DensityState> {
    evolve_schrodinger_with(state, unitary, &Tolerances::default())
}

/// [`evolve_schrodinger`] under explicit tolerances.
pub fn evolve_schrodinger_with(
    state: &DensityState,
    unitary: &Operator,
    tols: &Tolerances,
) -> Result<DensityState> {
    state.operator().check_same_layout(unitary)?;
    ensure_unitary(unitary, tols)?;
    let u = unitary.matrix();
    let evolved = Operator::new(
        state.layout().clone(),
        u * state.operator().matrix() * u.adjoint(),
    )?;
    DensityState::with_tolerances(evolved, tols)
}

pub(crate) fn ensure_bijection(perm: &[usize], dim: usize) -> Result<()> {
    if perm.len() != dim {
        return Err(Error::NotBijective {
            len: perm.len(),
            dim,
        });
    }
    let mut seen = vec![false; dim];
    for &image in perm {
        if image >= dim || seen[image] {
            return Err(Error::NotBijective {
                len: perm.len(),
                dim,
            });
        }
        seen[image] = true;
    }
    Ok(())
}

fn validated_basis<'a>(
    basis: Option<&'a DMatrix<C64>>,
    dim: usize,
    tols: &Tolerances,
) -> Result<Option<&'a DMatrix<C64>>> {
    if let Some(v) = basis {
        if v.nrows() != dim || v.ncols() != dim {
            return Err(Error::MatrixShape {
                rows: v.nrows(),
                cols: v.ncols(),
                expected: dim,
            });
        }
        let deviation = linalg::deviation_from_identity(&(v.adjoint() * v));
        if deviation > tols.operator {
            return Err(Error::NotUnitary {
                deviation,
                tolerance: tols.operator,
            });
        }
    }
    Ok(basis)
}

/// Permutation matrix `sum_b |v_perm(b)><v_b|` over the columns of `basis`
/// (computational basis when `None`).
fn permutation_matrix(perm: &[usize], basis: Option<&DMatrix<C64>>) -> DMatrix<C64> {
    let dim = perm.len();
    let mut p = DMatrix::<C64>::zeros(dim, dim);
    for (b, &image) in perm.iter().enumerate() {
        p[(image, b)] = C64::new(1.0, 0.0);
    }
    match basis {
        None => p,
        Some(v) => v * p * v.adjoint(),
    }
}

/// Unitary permuting the basis vectors of one subsystem: `|v_b> ->
/// |v_perm(b)>` over the columns of `basis` (computational when `None`),
/// identity elsewhere.
pub fn permutation_unitary(
    layout: &SystemLayout,
    label: &str,
    perm: &[usize],
    basis: Option<&DMatrix<C64>>,
) -> Result<Operator> {
    permutation_unitary_with(layout, label, perm, basis, &Tolerances::default())
}

/// [`permutation_unitary`] under explicit tolerances.
pub fn permutation_unitary_with(
    layout: &SystemLayout,
    label: &str,
    perm: &[usize],
    basis: Option<&DMatrix<C64>>,
    tols: &Tolerances,
) -> Result<Operator> {
    let dim = layout.dim_of(label)?;
    ensure_bijection(perm, dim)?;
    let basis = validated_basis(basis, dim, tols)?;
    Operator::embedded(layout, label, &permutation_matrix(perm, basis))
}

/// Measurement-style coupling writing one subsystem's basis index into
/// another: `|v_a, v_b> -> |v_a, v_(a+b) mod N>` over the columns of
/// `basis` (computational when `None`) on both subsystems, which must share
/// the dimension N. For qubits in the computational basis this is exactly
/// the controlled-NOT matrix. Starting the target in `|v_0>` perfectly
/// correlates it with the source: `|v_a, v_0> -> |v_a, v_a>`.
pub fn perfect_measurement_unitary(
    layout: &SystemLayout,
    source: &str,
    target: &str,
    basis: Option<&DMatrix<C64>>,
) -> Result<Operator> {
    perfect_measurement_unitary_with(layout, source, target, basis, &Tolerances::default())
}

/// [`perfect_measurement_unitary`] under explicit tolerances.
pub fn perfect_measurement_unitary_with(
    layout: &SystemLayout,
    source: &str,
    target: &str,
    basis: Option<&DMatrix<C64>>,
    tols: &Tolerances,
) -> Result<Operator> {
    let n = layout.dim_of(source)?;
    let target_dim = layout.dim_of(target)?;
    if n != target_dim {
        return Err(Error::LayoutMismatch {
            left: format!("{source}:{n}"),
            right: format!("{target}:{target_dim}"),
        });
    }
    if source == target {
        return Err(Error::OverlappingLabels {
            label: source.to_string(),
        });
    }
    let basis = validated_basis(basis, n, tols)?;
    let mut acc = Operator::zeros(layout);
    for a in 0..n {
        // projector onto |v_a> of the source
        let mut pa = DMatrix::<C64>::zeros(n, n);
        pa[(a, a)] = C64::new(1.0, 0.0);
        if let Some(v) = basis {
            pa = v * pa * v.adjoint();
        }
        // shift-by-a on the target, in the same basis
        let shift: Vec<usize> = (0..n).map(|b| (a + b) % n).collect();
        let ua = permutation_matrix(&shift, basis);
        let term = &Operator::embedded(layout, source, &pa)?
            * &Operator::embedded(layout, target, &ua)?;
        acc = &acc + &term;
    }
    Ok(acc)
}

/// Unitary acting blockwise: for each computational flat index `k` of the
/// `controls` subsystems, applies `blocks[k]` to the `targets` subsystems.
///
/// Both label lists must be given in layout order and be disjoint; `k` runs
/// over the control subsystems' combined computational basis in layout
/// order, and each block is a square matrix over the targets' combined
/// basis in layout order. Every block must itself be unitary.
pub fn controlled_unitary(
    layout: &SystemLayout,
    controls: &[&str],
    targets: &[&str],
    blocks: &[DMatrix<C64>],
) -> Result<Operator> {
    controlled_unitary_with(layout, controls, targets, blocks, &Tolerances::default())
}

/// [`controlled_unitary`] under explicit tolerances.
pub fn controlled_unitary_with(
    layout: &SystemLayout,
    controls: &[&str],
    targets: &[&str],
    blocks: &[DMatrix<C64>],
    tols: &Tolerances,
) -> Result<Operator> {
    for label in controls {
        if targets.contains(label) {
            return Err(Error::OverlappingLabels {
                label: label.to_string(),
            });
        }
    }
    let control_positions = layout.positions_in_order(controls)?;
    let target_positions = layout.positions_in_order(targets)?;
    let control_dim: usize = control_positions
        .iter()
        .map(|&p| layout.subsystems()[p].dim())
        .product();
    let target_dim: usize = target_positions
        .iter()
        .map(|&p| layout.subsystems()[p].dim())
        .product();
    if blocks.len() != control_dim {
        return Err(Error::InvalidField {
            field: "blocks".into(),
            reason: format!(
                "expected one block per control index ({control_dim}), got {}",
                blocks.len()
            ),
        });
    }
    for (k, block) in blocks.iter().enumerate() {
        if block.nrows() != target_dim || block.ncols() != target_dim {
            return Err(Error::MatrixShape {
                rows: block.nrows(),
                cols: block.ncols(),
                expected: target_dim,
            });
        }
        let deviation = linalg::deviation_from_identity(&(block.adjoint() * block));
        if deviation > tols.operator {
            return Err(Error::InvalidField {
                field: "blocks".into(),
                reason: format!("block {k} is not unitary (deviation {deviation:.3e})"),
            });
        }
    }

    // Assemble over the combined control+target sub-layout, then embed.
    let mut combined = control_positions.clone();
    combined.extend_from_slice(&target_positions);
    combined.sort_unstable();
    let sub = layout.restricted(&combined);
    let controls_within_sub: Vec<usize> = combined
        .iter()
        .enumerate()
        .filter(|(_, p)| control_positions.contains(p))
        .map(|(i, _)| i)
        .collect();
    let split = IndexSplit::new(&sub, &controls_within_sub);
    let mut local = DMatrix::<C64>::zeros(sub.total_dim(), sub.total_dim());
    for i in 0..sub.total_dim() {
        for j in 0..sub.total_dim() {
            if split.selected[i] == split.selected[j] {
                local[(i, j)] = blocks[split.selected[i]][(split.rest[i], split.rest[j])];
            }
        }
    }
    let combined_labels: Vec<&str> = combined
        .iter()
        .map(|&p| layout.subsystems()[p].label())
        .collect();
    Operator::embedded_multi(layout, &combined_labels, &local)
}

/// Asks whether conjugation by `unitary` merely permutes the eigenprojectors
/// of `observable`: returns `Some(pi)` with `U P_a U^dagger = P_pi(a)`
/// within the operator tolerance for every projector, `None` when any
/// conjugated projector falls outside the family (the evolution then
/// creates superpositions of the observable's eigenstates). Indices refer
/// to the observable's eigenvalue-sorted projector list. The observable
/// must be nondegenerate: permutations of projectors are ill-defined across
/// degenerate eigenspaces.
pub fn detect_branching(unitary: &Operator, observable: &Observable) -> Result<Option<Vec<usize>>> {
    detect_branching_with(unitary, observable, &Tolerances::default())
}

/// [`detect_branching`] under explicit tolerances.
pub fn detect_branching_with(
    unitary: &Operator,
    observable: &Observable,
    tols: &Tolerances,
) -> Result<Option<Vec<usize>>> {
    unitary.check_same_layout(observable.operator())?;
    ensure_unitary(unitary, tols)?;
    if !observable.is_nondegenerate() {
        return Err(Error::AmbiguousProjectorMatching);
    }
    let u = unitary.matrix();
    let projectors = observable.projectors();
    let mut perm = Vec::with_capacity(projectors.len());
    let mut hit = vec![false; projectors.len()];
    for pa in projectors {
        let conjugated = u * pa.matrix() * u.adjoint();
        let matched = projectors
            .iter()
            .position(|pb| linalg::max_abs_diff(&conjugated, pb.matrix()) <= tols.operator);
        match matched {
            Some(b) if !hit[b] => {
                hit[b] = true;
                perm.push(b);
            }
            _ => return Ok(None),
        }
    }
    Ok(Some(perm))
}

/// Rank-one projectors onto the orthonormal columns of `vectors`, as
/// operators on `layout`.
pub fn rank_one_projectors(layout: &SystemLayout, vectors: &DMatrix<C64>) -> Result<Vec<Operator>> {
    if vectors.nrows() != layout.total_dim() {
        return Err(Error::MatrixShape {
            rows: vectors.nrows(),
            cols: vectors.ncols(),
            expected: layout.total_dim(),
        });
    }
    (0..vectors.ncols())
        .map(|c| {
            let v = vectors.column(c).into_owned();
            Operator::new(layout.clone(), &v * v.adjoint())
        })
        .collect()
}

fn validate_projector_family(projectors: &[Operator], tols: &Tolerances) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::ProjectorsIncomplete { deviation: 1.0 });
    }
    let layout = projectors[0].layout();
    for p in &projectors[1..] {
        p.check_same_layout(&projectors[0])?;
    }
    for (index, p) in projectors.iter().enumerate() {
        let m = p.matrix();
        let herm = linalg::hermiticity_deviation(m);
        let idem = linalg::max_abs_diff(&(m * m), m);
        let deviation = herm.max(idem);
        if deviation > tols.operator {
            return Err(Error::NotAProjector { index, deviation });
        }
    }
    for i in 0..projectors.len() {
        for j in (i + 1)..projectors.len() {
            let product = projectors[i].matrix() * projectors[j].matrix();
            let deviation = linalg::max_abs(&product);
            if deviation > tols.operator {
                return Err(Error::ProjectorsNotOrthogonal {
                    first: i,
                    second: j,
                    deviation,
                });
            }
        }
    }
    let dim = layout.total_dim();
    let total = projectors
        .iter()
        .fold(DMatrix::<C64>::zeros(dim, dim), |acc, p| acc + p.matrix());
    let deviation = linalg::deviation_from_identity(&total);
    if deviation > tols.operator {
        return Err(Error::ProjectorsIncomplete { deviation });
    }
    Ok(())
}

/// Projective dephasing `rho -> sum_c P_c rho P_c` over a complete
/// orthogonal projector family. Preserves the trace and never decreases the
/// entropy; states already diagonal in the dephasing decomposition are
/// fixed points.
pub fn dephase(state: &DensityState, projectors: &[Operator]) -> Result<DensityState> {
    dephase_with(state, projectors, &Tolerances::default())
}

/// [`dephase`] under explicit tolerances.
pub fn dephase_with(
    state: &DensityState,
    projectors: &[Operator],
    tols: &Tolerances,
) -> Result<DensityState> {
    validate_projector_family(projectors, tols)?;
    state.operator().check_same_layout(&projectors[0])?;
    let dim = state.layout().total_dim();
    let mut acc = DMatrix::<C64>::zeros(dim, dim);
    for p in projectors {
        acc += p.matrix() * state.operator().matrix() * p.matrix();
    }
    DensityState::with_tolerances(Operator::new(state.layout().clone(), acc)?, tols)
}
