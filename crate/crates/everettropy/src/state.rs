//! Density states, observables, quantum games, entropy, and state structure.
//!
//! A [`DensityState`] is a validated density matrix with its spectral
//! decomposition cached: eigenvalues slightly below zero (within the PSD
//! tolerance) are clipped and the spectrum renormalized, so entropy and
//! probability queries are always well defined. An [`Observable`] caches the
//! orthogonal projector family of a Hermitian operator, grouping eigenvalues
//! that fall within the degeneracy tolerance into one projector.
//!
//! Structural queries live here too: Schmidt decomposition of pure states
//! across a labeled [`Bipartition`], and the check whether a state is a
//! classical mixture of product basis states (diagonal in some product
//! eigenbasis) — the form required of any system whose subsystems are to be
//! read as records about each other.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::layout::{IndexSplit, SystemLayout};
use crate::linalg::{self, C64};
use crate::operator::Operator;
use crate::tolerance::Tolerances;

/// Hard bound on the imaginary residual of a trace that should be real;
/// anything larger signals corrupted inputs rather than roundoff.
pub const IMAGINARY_RESIDUAL_BOUND: f64 = 1e-9;

/// Singular values at or below this cutoff are dropped from a Schmidt
/// decomposition; the survivors still satisfy the unit-norm constraint well
/// inside its 1e-10 tolerance.
const SCHMIDT_CUTOFF: f64 = 1e-7;

/// Shannon entropy in bits of a nonnegative weight vector; entries that are
/// not strictly positive contribute zero.
pub fn shannon_entropy_bits(weights: &[f64]) -> f64 {
    let s: f64 = weights
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    s.max(0.0)
}

/// Validated density matrix with cached spectral decomposition.
#[derive(Debug, Clone)]
pub struct DensityState {
    op: Operator,
    probabilities: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl DensityState {
    /// Validates `op` as a density matrix under the default tolerances.
    pub fn new(op: Operator) -> Result<Self> {
        Self::with_tolerances(op, &Tolerances::default())
    }

    /// Validates `op` as a density matrix: Hermitian within the operator
    /// tolerance, unit trace within the operator tolerance, and eigenvalues
    /// no lower than minus the PSD tolerance. Eigenvalues in the clipping
    /// window are set to zero and the spectrum renormalized.
    pub fn with_tolerances(op: Operator, tols: &Tolerances) -> Result<Self> {
        let deviation = linalg::hermiticity_deviation(op.matrix());
        if deviation > tols.operator {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: tols.operator,
            });
        }
        let trace = op.trace();
        if (trace.re - 1.0).abs() > tols.operator || trace.im.abs() > tols.operator {
            return Err(Error::TraceNotOne {
                trace: trace.re,
                tolerance: tols.operator,
            });
        }
        let (values, eigenvectors) = linalg::hermitian_eigen(op.matrix());
        if let Some(&lowest) = values.last() {
            if lowest < -tols.psd {
                return Err(Error::NotPositiveSemidefinite {
                    eigenvalue: lowest,
                    tolerance: tols.psd,
                });
            }
        }
        let clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let probabilities: Vec<f64> = clipped.iter().map(|&v| v / total).collect();
        Ok(DensityState {
            op,
            probabilities,
            eigenvectors,
        })
    }

    /// Pure state from an amplitude vector (must be normalized within 1e-9).
    pub fn from_amplitudes(layout: &SystemLayout, amplitudes: &[C64]) -> Result<Self> {
        let n = layout.total_dim();
        if amplitudes.len() != n {
            return Err(Error::MatrixShape {
                rows: amplitudes.len(),
                cols: 1,
                expected: n,
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized {
                norm,
                tolerance: 1e-9,
            });
        }
        let psi = DVector::from_column_slice(amplitudes);
        let matrix = &psi * psi.adjoint();
        Self::new(Operator::new(layout.clone(), matrix)?)
    }

    /// Pure computational product state `|i_0, i_1, ...>`.
    pub fn basis_state(layout: &SystemLayout, indices: &[usize]) -> Result<Self> {
        let flat = layout.flat_index(indices)?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); layout.total_dim()];
        amplitudes[flat] = C64::new(1.0, 0.0);
        Self::from_amplitudes(layout, &amplitudes)
    }

    /// The maximally mixed state `1/N`.
    pub fn maximally_mixed(layout: &SystemLayout) -> Self {
        let n = layout.total_dim();
        let weight = 1.0 / n as f64;
        let op = Operator::from_real_diagonal(layout, &vec![weight; n])
            .expect("diagonal length matches layout");
        Self::new(op).expect("maximally mixed state is always valid")
    }

    /// Diagonal state with the given probability weights.
    pub fn from_probabilities(layout: &SystemLayout, probabilities: &[f64]) -> Result<Self> {
        validate_distribution("probabilities", probabilities, 1e-9)?;
        Self::new(Operator::from_real_diagonal(layout, probabilities)?)
    }

    /// The underlying operator.
    pub fn operator(&self) -> &Operator {
        &self.op
    }

    /// System layout.
    pub fn layout(&self) -> &SystemLayout {
        self.op.layout()
    }

    /// Clipped, renormalized spectrum, sorted descending.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Orthonormal eigenvector columns matching [`Self::probabilities`].
    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    /// Von Neumann entropy in bits: `-sum p log2 p` over the clipped
    /// spectrum, with `0 log 0 = 0`. Lies in `[0, log2 N]`.
    pub fn entropy_bits(&self) -> f64 {
        shannon_entropy_bits(&self.probabilities)
    }

    /// Whether the state is pure under the given purity tolerance.
    pub fn is_pure(&self, tols: &Tolerances) -> bool {
        self.entropy_bits() <= tols.purity
    }

    /// Reduced state on the kept subsystems (partial trace over the rest),
    /// revalidated as a density matrix.
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityState> {
        self.reduced_with(keep, &Tolerances::default())
    }

    /// [`Self::reduced`] under explicit tolerances.
    pub fn reduced_with(&self, keep: &[&str], tols: &Tolerances) -> Result<DensityState> {
        DensityState::with_tolerances(self.op.partial_trace(keep)?, tols)
    }
}

fn validate_distribution(name: &str, weights: &[f64], tol: f64) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidDistribution {
            name: name.into(),
            reason: "empty".into(),
        });
    }
    if let Some(&bad) = weights.iter().find(|&&p| !(p >= -1e-12) || !p.is_finite()) {
        return Err(Error::InvalidDistribution {
            name: name.into(),
            reason: format!("entry {bad} is negative or not finite"),
        });
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > tol {
        return Err(Error::InvalidDistribution {
            name: name.into(),
            reason: format!("sums to {total}, expected 1 within {tol:e}"),
        });
    }
    Ok(())
}

/// Hermitian operator with its cached spectral decomposition into distinct
/// eigenvalues and orthogonal, complete projectors.
#[derive(Debug, Clone)]
pub struct Observable {
    op: Operator,
    eigenvalues: Vec<f64>,
    projectors: Vec<Operator>,
}

impl Observable {
    /// Builds the spectral decomposition under default tolerances.
    pub fn new(op: Operator) -> Result<Self> {
        Self::with_tolerances(op, &Tolerances::default())
    }

    /// Builds the spectral decomposition: eigenvalues within the degeneracy
    /// tolerance of each other are merged into a single eigenvalue (their
    /// mean) with a higher-rank projector. Fails if the operator is not
    /// Hermitian or if the merged decomposition no longer reconstructs the
    /// operator within the operator tolerance (an ambiguous near-degenerate
    /// spectrum).
    pub fn with_tolerances(op: Operator, tols: &Tolerances) -> Result<Self> {
        let deviation = linalg::hermiticity_deviation(op.matrix());
        if deviation > tols.operator {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: tols.operator,
            });
        }
        let (values, vectors) = linalg::hermitian_eigen(op.matrix());
        let mut eigenvalues = Vec::new();
        let mut projectors = Vec::new();
        for (start, len) in linalg::cluster_sorted(&values, tols.degeneracy) {
            let mean = values[start..start + len].iter().sum::<f64>() / len as f64;
            let block = vectors.columns(start, len).into_owned();
            let projector = Operator::new(op.layout().clone(), &block * block.adjoint())?;
            eigenvalues.push(mean);
            projectors.push(projector);
        }
        let observable = Observable {
            op,
            eigenvalues,
            projectors,
        };
        let projector_sum = observable.projectors.iter().fold(
            DMatrix::<C64>::zeros(observable.op.dim(), observable.op.dim()),
            |acc, p| acc + p.matrix(),
        );
        let completeness = linalg::deviation_from_identity(&projector_sum);
        if completeness > tols.operator {
            return Err(Error::ProjectorsIncomplete {
                deviation: completeness,
            });
        }
        let rebuilt = observable.reconstruct();
        let residual = linalg::max_abs_diff(rebuilt.matrix(), observable.op.matrix());
        if residual > tols.operator.max(1e-12) {
            return Err(Error::AmbiguousSpectrum {
                spread: residual,
                tolerance: tols.operator,
            });
        }
        Ok(observable)
    }

    /// Observable with the given real diagonal in the computational basis.
    pub fn from_real_diagonal(layout: &SystemLayout, diagonal: &[f64]) -> Result<Self> {
        Self::new(Operator::from_real_diagonal(layout, diagonal)?)
    }

    /// The underlying Hermitian operator.
    pub fn operator(&self) -> &Operator {
        &self.op
    }

    /// Distinct eigenvalues, sorted descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthogonal projectors matching [`Self::eigenvalues`].
    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    /// Whether every eigenvalue is simple (as many projectors as dimensions).
    pub fn is_nondegenerate(&self) -> bool {
        self.projectors.len() == self.op.dim()
    }

    /// Born-rule outcome probabilities `tr(rho P_a)` for each eigenvalue.
    pub fn outcome_probabilities(&self, state: &DensityState) -> Result<Vec<f64>> {
        if state.layout() != self.op.layout() {
            return Err(Error::LayoutMismatch {
                left: state.layout().describe(),
                right: self.op.layout().describe(),
            });
        }
        self.projectors
            .iter()
            .map(|p| real_trace_product(state.operator(), p))
            .collect()
    }

    /// `sum_a alpha_a P_a`.
    fn reconstruct(&self) -> Operator {
        let mut acc = Operator::zeros(self.op.layout());
        for (alpha, projector) in self.eigenvalues.iter().zip(&self.projectors) {
            acc = &acc + &projector.scale(C64::new(*alpha, 0.0));
        }
        acc
    }
}

/// `tr(a b)` with the imaginary residual checked and discarded.
fn real_trace_product(a: &Operator, b: &Operator) -> Result<f64> {
    let am = a.matrix();
    let bm = b.matrix();
    let mut t = C64::new(0.0, 0.0);
    for i in 0..am.nrows() {
        for j in 0..am.ncols() {
            t += am[(i, j)] * bm[(j, i)];
        }
    }
    if t.im.abs() > IMAGINARY_RESIDUAL_BOUND {
        return Err(Error::ImaginaryResidual { residual: t.im });
    }
    Ok(t.re)
}

/// Born-rule expectation value `tr(rho A)` of a Hermitian operator.
pub fn expectation(state: &DensityState, observable: &Operator) -> Result<f64> {
    expectation_with(state, observable, &Tolerances::default())
}

/// [`expectation`] under explicit tolerances.
pub fn expectation_with(
    state: &DensityState,
    observable: &Operator,
    tols: &Tolerances,
) -> Result<f64> {
    if state.layout() != observable.layout() {
        return Err(Error::LayoutMismatch {
            left: state.layout().describe(),
            right: observable.layout().describe(),
        });
    }
    let deviation = linalg::hermiticity_deviation(observable.matrix());
    if deviation > tols.operator {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: tols.operator,
        });
    }
    real_trace_product(state.operator(), observable)
}

/// An observable, a state, and a payoff for each distinct eigenvalue.
///
/// With the identity payoff the value of the game is the Born-rule
/// expectation; a different payoff reweights the same outcome probabilities.
#[derive(Debug, Clone)]
pub struct QuantumGame {
    observable: Observable,
    state: DensityState,
    payoffs: Vec<f64>,
}

impl QuantumGame {
    /// Builds a game from `(eigenvalue, payoff)` pairs. Every distinct
    /// eigenvalue of the observable must be matched (within 1e-9) by a pair.
    pub fn new(
        observable: Observable,
        state: DensityState,
        payoff_pairs: &[(f64, f64)],
    ) -> Result<Self> {
        if state.layout() != observable.operator().layout() {
            return Err(Error::LayoutMismatch {
                left: state.layout().describe(),
                right: observable.operator().layout().describe(),
            });
        }
        let payoffs = observable
            .eigenvalues()
            .iter()
            .map(|&alpha| {
                payoff_pairs
                    .iter()
                    .find(|(eig, _)| (eig - alpha).abs() <= 1e-9)
                    .map(|&(_, payoff)| payoff)
                    .ok_or(Error::PayoffMissing { eigenvalue: alpha })
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(QuantumGame {
            observable,
            state,
            payoffs,
        })
    }

    /// Game whose payoff is each eigenvalue itself.
    pub fn with_identity_payoff(observable: Observable, state: DensityState) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = observable
            .eigenvalues()
            .iter()
            .map(|&a| (a, a))
            .collect();
        Self::new(observable, state, &pairs)
    }

    /// The observable being played.
    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    /// The state being played on.
    pub fn state(&self) -> &DensityState {
        &self.state
    }

    /// Payoffs aligned with the observable's distinct eigenvalues.
    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }
}

/// Value of a game: `sum_a payoff(alpha_a) tr(rho P_a)`.
pub fn game_value(game: &QuantumGame) -> Result<f64> {
    let probabilities = game.observable.outcome_probabilities(&game.state)?;
    Ok(game
        .payoffs
        .iter()
        .zip(&probabilities)
        .map(|(payoff, p)| payoff * p)
        .sum())
}

/// A two-sided split of a layout's subsystems, used for Schmidt
/// decompositions and the knowledge-form check.
#[derive(Debug, Clone)]
pub struct Bipartition {
    layout: SystemLayout,
    left_positions: Vec<usize>,
    right_positions: Vec<usize>,
}

impl Bipartition {
    /// Splits `layout` into the subsystems named in `left` (any order) and
    /// the rest. Both sides must be non-empty.
    pub fn new(layout: &SystemLayout, left: &[&str]) -> Result<Self> {
        let mut left_positions = Vec::with_capacity(left.len());
        for &label in left {
            let p = layout.position(label)?;
            if left_positions.contains(&p) {
                return Err(Error::LabelsOutOfOrder {
                    label: label.to_string(),
                });
            }
            left_positions.push(p);
        }
        left_positions.sort_unstable();
        let right_positions: Vec<usize> = (0..layout.len())
            .filter(|p| !left_positions.contains(p))
            .collect();
        if left_positions.is_empty() || right_positions.is_empty() {
            return Err(Error::EmptyBipartitionSide);
        }
        Ok(Bipartition {
            layout: layout.clone(),
            left_positions,
            right_positions,
        })
    }

    /// The full layout being split.
    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    /// Labels on the left side, in layout order.
    pub fn left_labels(&self) -> Vec<&str> {
        self.left_positions
            .iter()
            .map(|&p| self.layout.subsystems()[p].label())
            .collect()
    }

    /// Labels on the right side, in layout order.
    pub fn right_labels(&self) -> Vec<&str> {
        self.right_positions
            .iter()
            .map(|&p| self.layout.subsystems()[p].label())
            .collect()
    }

    fn left_layout(&self) -> SystemLayout {
        self.layout.restricted(&self.left_positions)
    }

    fn right_layout(&self) -> SystemLayout {
        self.layout.restricted(&self.right_positions)
    }

    fn split(&self) -> IndexSplit {
        IndexSplit::new(&self.layout, &self.left_positions)
    }
}

/// Schmidt decomposition of a pure state across a bipartition:
/// `psi = sum_k lambda_k |u_k> (x) |w_k>` with `lambda` sorted descending and
/// `sum lambda^2 = 1`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    cut: Bipartition,
    coefficients: Vec<f64>,
    left_vectors: Vec<DVector<C64>>,
    right_vectors: Vec<DVector<C64>>,
}

impl SchmidtDecomposition {
    /// Schmidt coefficients, sorted descending; values at or below the
    /// internal cutoff (1e-7) are dropped, so a product state reports a
    /// single coefficient.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Orthonormal vectors on the left side of the cut.
    pub fn left_vectors(&self) -> &[DVector<C64>] {
        &self.left_vectors
    }

    /// Orthonormal vectors on the right side of the cut.
    pub fn right_vectors(&self) -> &[DVector<C64>] {
        &self.right_vectors
    }

    /// Layout of the left side.
    pub fn left_layout(&self) -> SystemLayout {
        self.cut.left_layout()
    }

    /// Layout of the right side.
    pub fn right_layout(&self) -> SystemLayout {
        self.cut.right_layout()
    }

    /// Number of retained Schmidt terms.
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Reassembles the projector `|psi><psi|` on the original layout.
    pub fn reconstructed(&self) -> Operator {
        let split = self.cut.split();
        let n = self.cut.layout.total_dim();
        let mut psi = DVector::<C64>::zeros(n);
        for g in 0..n {
            let mut amplitude = C64::new(0.0, 0.0);
            for (k, lambda) in self.coefficients.iter().enumerate() {
                amplitude += C64::new(*lambda, 0.0)
                    * self.left_vectors[k][split.selected[g]]
                    * self.right_vectors[k][split.rest[g]];
            }
            psi[g] = amplitude;
        }
        Operator::new(self.cut.layout.clone(), &psi * psi.adjoint())
            .expect("projector shape matches layout")
    }
}

/// Schmidt decomposition of a pure state across `cut`.
pub fn schmidt_decompose(state: &DensityState, cut: &Bipartition) -> Result<SchmidtDecomposition> {
    schmidt_decompose_with(state, cut, &Tolerances::default())
}

/// [`schmidt_decompose`] under explicit tolerances.
pub fn schmidt_decompose_with(
    state: &DensityState,
    cut: &Bipartition,
    tols: &Tolerances,
) -> Result<SchmidtDecomposition> {
    if state.layout() != &cut.layout {
        return Err(Error::LayoutMismatch {
            left: state.layout().describe(),
            right: cut.layout.describe(),
        });
    }
    let entropy = state.entropy_bits();
    if entropy > tols.purity {
        return Err(Error::NotPure {
            entropy_bits: entropy,
            tolerance: tols.purity,
        });
    }
    let split = cut.split();
    let psi = state.eigenvectors().column(0);
    let mut m = DMatrix::<C64>::zeros(split.selected_dim, split.rest_dim);
    for g in 0..cut.layout.total_dim() {
        m[(split.selected[g], split.rest[g])] = psi[g];
    }
    let svd = m.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut coefficients = Vec::new();
    let mut left_vectors = Vec::new();
    let mut right_vectors = Vec::new();
    for &k in &order {
        let sigma = svd.singular_values[k];
        if sigma <= SCHMIDT_CUTOFF {
            continue;
        }
        coefficients.push(sigma);
        left_vectors.push(u.column(k).into_owned());
        right_vectors.push(v_t.row(k).transpose());
    }
    Ok(SchmidtDecomposition {
        cut: cut.clone(),
        coefficients,
        left_vectors,
        right_vectors,
    })
}

/// Verdict of the knowledge-form check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnowledgeForm {
    /// The state is, within tolerance, a classical mixture of products of
    /// orthogonal pure projectors across the cut.
    Conforms,
    /// The state provably is not of that form.
    Violates,
    /// Degenerate marginal spectra leave the product eigenbasis ambiguous;
    /// no verdict is possible by this procedure.
    Indeterminate,
}

/// Checks whether `state` is diagonal in some product basis across `cut`.
///
/// Pure states are decided exactly: a product state conforms, an entangled
/// pure state violates (it cannot be a mixture of product projectors).
/// Mixed states are decided by diagonalizing both marginals; when both
/// spectra are nondegenerate (all gaps above the degeneracy tolerance) the
/// state conforms iff it is diagonal in the product of the marginal
/// eigenbases. Degenerate marginals are indeterminate unless the state is
/// already diagonal in the computational product basis.
pub fn knowledge_form_check(state: &DensityState, cut: &Bipartition) -> Result<KnowledgeForm> {
    knowledge_form_check_with(state, cut, &Tolerances::default())
}

/// [`knowledge_form_check`] under explicit tolerances.
pub fn knowledge_form_check_with(
    state: &DensityState,
    cut: &Bipartition,
    tols: &Tolerances,
) -> Result<KnowledgeForm> {
    if state.layout() != &cut.layout {
        return Err(Error::LayoutMismatch {
            left: state.layout().describe(),
            right: cut.layout.describe(),
        });
    }
    if state.is_pure(tols) {
        let schmidt = schmidt_decompose_with(state, cut, tols)?;
        return Ok(if schmidt.rank() == 1 {
            KnowledgeForm::Conforms
        } else {
            KnowledgeForm::Violates
        });
    }
    let left_labels = cut.left_labels();
    let right_labels = cut.right_labels();
    let left = state.reduced_with(&left_labels, tols)?;
    let right = state.reduced_with(&right_labels, tols)?;
    let nondegenerate = spectrum_nondegenerate(left.probabilities(), tols.degeneracy)
        && spectrum_nondegenerate(right.probabilities(), tols.degeneracy);
    if nondegenerate {
        let q_left = Operator::embedded_multi(&cut.layout, &left_labels, left.eigenvectors())?;
        let q_right = Operator::embedded_multi(&cut.layout, &right_labels, right.eigenvectors())?;
        let q = &q_left * &q_right;
        let transformed = &(&q.dagger() * state.operator()) * &q;
        Ok(if max_offdiagonal(transformed.matrix()) <= tols.operator {
            KnowledgeForm::Conforms
        } else {
            KnowledgeForm::Violates
        })
    } else if max_offdiagonal(state.operator().matrix()) <= tols.operator {
        Ok(KnowledgeForm::Conforms)
    } else {
        Ok(KnowledgeForm::Indeterminate)
    }
}

fn spectrum_nondegenerate(sorted_descending: &[f64], gap: f64) -> bool {
    sorted_descending
        .windows(2)
        .all(|w| (w[0] - w[1]).abs() > gap)
}

fn max_offdiagonal(m: &DMatrix<C64>) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                dev = dev.max(m[(i, j)].norm());
            }
        }
    }
    dev
}
