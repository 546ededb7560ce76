//! Entropy growth under classically correlated interactions built from
//! imperfect knowledge.
//!
//! Two record-bearing subsystems start in a classical product-basis
//! mixture ([`knowledge_state`]). A comparison step between them would
//! ideally be a variant-controlled permutation, but whoever builds the
//! apparatus only knows the relevant bases approximately; that is modeled
//! by conjugating the ideal interaction with small seeded basis rotations
//! ([`selection_unitary`]). [`run_selection`] evolves the state, tracks
//! each marginal's entropy, and checks whether the after-marginal is a
//! dephasing of the before-marginal in some orthonormal basis — the
//! structural fact that forces marginal entropies upward while the global
//! entropy stays constant.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{
    controlled_unitary_with, dephase_with, ensure_bijection, evolve_schrodinger_with,
    perfect_measurement_unitary_with, rank_one_projectors,
};
use crate::error::{Error, Result};
use crate::layout::SystemLayout;
use crate::linalg::{self, C64};
use crate::operator::Operator;
use crate::state::{knowledge_form_check_with, Bipartition, DensityState, KnowledgeForm};
use crate::tolerance::Tolerances;

/// Classical mixture of product basis states: the entry `weights[a][b]`
/// becomes the probability of `|a, b>`.
pub fn knowledge_state(layout: &SystemLayout, weights: &[Vec<f64>]) -> Result<DensityState> {
    knowledge_state_with(layout, weights, &Tolerances::default())
}

/// [`knowledge_state`] under explicit tolerances.
pub fn knowledge_state_with(
    layout: &SystemLayout,
    weights: &[Vec<f64>],
    tols: &Tolerances,
) -> Result<DensityState> {
    let [first, second] = two_subsystems(layout)?;
    let (dim_a, dim_b) = (first.dim(), second.dim());
    if weights.len() != dim_a || weights.iter().any(|row| row.len() != dim_b) {
        return Err(Error::InvalidField {
            field: "weights".into(),
            reason: format!("expected a {dim_a} x {dim_b} matrix"),
        });
    }
    let mut total = 0.0;
    for row in weights {
        for &p in row {
            if !p.is_finite() || p < -1e-12 {
                return Err(Error::InvalidDistribution {
                    name: "weights".into(),
                    reason: format!("entry {p} is negative or not finite"),
                });
            }
            total += p;
        }
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution {
            name: "weights".into(),
            reason: format!("sums to {total}, expected 1 within 1e-12"),
        });
    }
    let dim = layout.total_dim();
    let mut matrix = DMatrix::<C64>::zeros(dim, dim);
    for (a, row) in weights.iter().enumerate() {
        for (b, &p) in row.iter().enumerate() {
            matrix[(a * dim_b + b, a * dim_b + b)] = C64::new(p.max(0.0), 0.0);
        }
    }
    DensityState::with_tolerances(Operator::new(layout.clone(), matrix)?, tols)
}

fn two_subsystems(layout: &SystemLayout) -> Result<[&crate::layout::Subsystem; 2]> {
    match layout.subsystems() {
        [first, second] => Ok([first, second]),
        other => Err(Error::InvalidField {
            field: "layout".into(),
            reason: format!("expected exactly two subsystems, got {}", other.len()),
        }),
    }
}

/// Interaction between two record-bearing subsystems: the ideal
/// variant-controlled permutation given by `code` (one permutation of the
/// second subsystem's basis per first-subsystem variant), conjugated by
/// seeded local basis rotations `exp(i epsilon G)` with `G` random
/// Hermitian of unit spectral norm. `epsilon = 0` returns the ideal
/// interaction exactly.
pub fn selection_unitary(
    layout: &SystemLayout,
    code: &[Vec<usize>],
    epsilon: f64,
    seed: u64,
) -> Result<Operator> {
    selection_unitary_with(layout, code, epsilon, seed, &Tolerances::default())
}

/// [`selection_unitary`] under explicit tolerances.
pub fn selection_unitary_with(
    layout: &SystemLayout,
    code: &[Vec<usize>],
    epsilon: f64,
    seed: u64,
    tols: &Tolerances,
) -> Result<Operator> {
    let [first, second] = two_subsystems(layout)?;
    let (label_a, label_b) = (first.label().to_string(), second.label().to_string());
    let (dim_a, dim_b) = (first.dim(), second.dim());
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::InvalidField {
            field: "epsilon".into(),
            reason: format!("{epsilon} is not a finite non-negative number"),
        });
    }
    if code.len() != dim_a {
        return Err(Error::InvalidField {
            field: "code".into(),
            reason: format!(
                "expected one permutation per first-subsystem variant ({dim_a}), got {}",
                code.len()
            ),
        });
    }
    let blocks: Vec<DMatrix<C64>> = code
        .iter()
        .map(|perm| {
            ensure_bijection(perm, dim_b)?;
            let mut p = DMatrix::<C64>::zeros(dim_b, dim_b);
            for (b, &image) in perm.iter().enumerate() {
                p[(image, b)] = C64::new(1.0, 0.0);
            }
            Ok(p)
        })
        .collect::<Result<_>>()?;
    let ideal = controlled_unitary_with(layout, &[&label_a], &[&label_b], &blocks, tols)?;
    if epsilon == 0.0 {
        return Ok(ideal);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g1 = linalg::random_hermitian_unit_norm(dim_a, &mut rng);
    let g2 = linalg::random_hermitian_unit_norm(dim_b, &mut rng);
    let rotation = &Operator::embedded(layout, &label_a, &linalg::exp_i_hermitian(&g1, epsilon))?
        * &Operator::embedded(layout, &label_b, &linalg::exp_i_hermitian(&g2, epsilon))?;
    Ok(&(&rotation * &ideal) * &rotation.dagger())
}

/// What one selection interaction did to the entropy bookkeeping.
#[derive(Debug, Clone)]
pub struct SelectionOutcome {
    entropies_before: Vec<f64>,
    entropies_after: Vec<f64>,
    global_entropy_before: f64,
    global_entropy_after: f64,
    dephasing_form_matched: Vec<bool>,
    final_state: DensityState,
}

impl SelectionOutcome {
    /// Marginal entropies before the interaction, in subsystem order, bits.
    pub fn entropies_before(&self) -> &[f64] {
        &self.entropies_before
    }

    /// Marginal entropies after the interaction, in subsystem order, bits.
    pub fn entropies_after(&self) -> &[f64] {
        &self.entropies_after
    }

    /// Per-subsystem entropy change, bits.
    pub fn entropy_changes(&self) -> Vec<f64> {
        self.entropies_after
            .iter()
            .zip(&self.entropies_before)
            .map(|(after, before)| after - before)
            .collect()
    }

    /// Entropy of the whole state before the interaction, bits.
    pub fn global_entropy_before(&self) -> f64 {
        self.global_entropy_before
    }

    /// Entropy of the whole state after the interaction, bits.
    pub fn global_entropy_after(&self) -> f64 {
        self.global_entropy_after
    }

    /// For each subsystem, whether the after-marginal equals the
    /// before-marginal dephased in the after-marginal's own eigenbasis.
    pub fn dephasing_form_matched(&self) -> &[bool] {
        &self.dephasing_form_matched
    }

    /// Whether every marginal matched the dephasing form.
    pub fn all_matched(&self) -> bool {
        self.dephasing_form_matched.iter().all(|&m| m)
    }

    /// The evolved state.
    pub fn final_state(&self) -> &DensityState {
        &self.final_state
    }
}

/// Evolves a classical product-basis mixture through one interaction and
/// reports the entropy bookkeeping: each subsystem's marginal entropy
/// before and after, the (constant) global entropy, and whether each
/// after-marginal is a dephasing of its before-marginal.
pub fn run_selection(initial: &DensityState, interaction: &Operator) -> Result<SelectionOutcome> {
    run_selection_with(initial, interaction, &Tolerances::default())
}

/// [`run_selection`] under explicit tolerances.
pub fn run_selection_with(
    initial: &DensityState,
    interaction: &Operator,
    tols: &Tolerances,
) -> Result<SelectionOutcome> {
    if initial.layout() != interaction.layout() {
        return Err(Error::LayoutMismatch {
            left: format!("{:?}", initial.layout()),
            right: format!("{:?}", interaction.layout()),
        });
    }
    let [first, _] = two_subsystems(initial.layout())?;
    let cut = Bipartition::new(initial.layout(), &[first.label()])?;
    if knowledge_form_check_with(initial, &cut, tols)? == KnowledgeForm::Violates {
        return Err(Error::InvalidField {
            field: "initial".into(),
            reason: "not a classical mixture over a product eigenbasis".into(),
        });
    }
    let final_state = evolve_schrodinger_with(initial, interaction, tols)?;

    let labels: Vec<String> = initial
        .layout()
        .subsystems()
        .iter()
        .map(|s| s.label().to_string())
        .collect();
    let mut entropies_before = Vec::with_capacity(labels.len());
    let mut entropies_after = Vec::with_capacity(labels.len());
    let mut dephasing_form_matched = Vec::with_capacity(labels.len());
    for label in &labels {
        let before = initial.reduced_with(&[label], tols)?;
        let after = final_state.reduced_with(&[label], tols)?;
        entropies_before.push(before.entropy_bits());
        entropies_after.push(after.entropy_bits());

        let projectors = rank_one_projectors(before.layout(), after.eigenvectors())?;
        let dephased = dephase_with(&before, &projectors, tols)?;
        let deviation =
            linalg::max_abs_diff(dephased.operator().matrix(), after.operator().matrix());
        dephasing_form_matched.push(deviation <= tols.operator);
    }

    Ok(SelectionOutcome {
        entropies_before,
        entropies_after,
        global_entropy_before: initial.entropy_bits(),
        global_entropy_after: final_state.entropy_bits(),
        dephasing_form_matched,
        final_state,
    })
}

/// One fully seeded selection experiment: the initial mixture, the noisy
/// interaction built for it, and the resulting entropy bookkeeping.
#[derive(Debug, Clone)]
pub struct SelectionRun {
    initial: DensityState,
    interaction: Operator,
    noise: f64,
    seed: u64,
    outcome: SelectionOutcome,
}

impl SelectionRun {
    /// The initial classical mixture.
    pub fn initial(&self) -> &DensityState {
        &self.initial
    }

    /// The interaction that was applied.
    pub fn interaction(&self) -> &Operator {
        &self.interaction
    }

    /// Basis-misalignment strength the interaction was built with.
    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Seed that determined the mixture, the code, and the misalignment.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Entropy bookkeeping for the run.
    pub fn outcome(&self) -> &SelectionOutcome {
        &self.outcome
    }

    /// Weights of each surviving product-basis branch after the
    /// interaction, one sorted coefficient list per initial basis state
    /// with nonzero probability. For a noiseless interaction every branch
    /// stays a product state and each list is exactly `[1.0]`.
    pub fn branch_coefficients(&self) -> Result<Vec<(usize, usize, Vec<f64>)>> {
        let layout = self.initial.layout();
        let [first, second] = two_subsystems(layout)?;
        let (dim_a, dim_b) = (first.dim(), second.dim());
        let cut = Bipartition::new(layout, &[first.label()])?;
        let mut branches = Vec::new();
        for a in 0..dim_a {
            for b in 0..dim_b {
                let index = a * dim_b + b;
                let weight = self.initial.operator().matrix()[(index, index)].re;
                if weight <= 1e-12 {
                    continue;
                }
                let column = self.interaction.matrix().column(index).into_owned();
                let branch =
                    DensityState::from_amplitudes(layout, column.as_slice())?;
                let schmidt = crate::state::schmidt_decompose(&branch, &cut)?;
                branches.push((a, b, schmidt.coefficients().to_vec()));
            }
        }
        Ok(branches)
    }
}

/// Builds and runs one seeded experiment: a seeded random mixture over the
/// product basis, a seeded random variant-controlled permutation code, and
/// a [`selection_unitary`] misaligned by `noise`.
pub fn seeded_selection_run(
    dim_a: usize,
    dim_b: usize,
    noise: f64,
    seed: u64,
) -> Result<SelectionRun> {
    seeded_selection_run_with(dim_a, dim_b, noise, seed, &Tolerances::default())
}

/// [`seeded_selection_run`] under explicit tolerances.
pub fn seeded_selection_run_with(
    dim_a: usize,
    dim_b: usize,
    noise: f64,
    seed: u64,
    tols: &Tolerances,
) -> Result<SelectionRun> {
    let layout = SystemLayout::new([("one", dim_a), ("two", dim_b)])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // seeded point on the probability simplex via exponential spacings
    let mut weights: Vec<Vec<f64>> = (0..dim_a)
        .map(|_| {
            (0..dim_b)
                .map(|_| -f64::ln(1.0 - rng.random::<f64>()))
                .collect()
        })
        .collect();
    let total: f64 = weights.iter().flatten().sum();
    for row in &mut weights {
        for p in row.iter_mut() {
            *p /= total;
        }
    }

    let code: Vec<Vec<usize>> = (0..dim_a)
        .map(|_| {
            let mut perm: Vec<usize> = (0..dim_b).collect();
            for i in (1..dim_b).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            perm
        })
        .collect();
    let unitary_seed = rng.random::<u64>();

    let initial = knowledge_state_with(&layout, &weights, tols)?;
    let interaction = selection_unitary_with(&layout, &code, noise, unitary_seed, tols)?;
    let outcome = run_selection_with(&initial, &interaction, tols)?;
    Ok(SelectionRun {
        initial,
        interaction,
        noise,
        seed,
        outcome,
    })
}

/// Measures one subsystem's computational basis onto a fresh ancilla and
/// discards the ancilla, returning the post-measurement state of the
/// original subsystems. This is the "now read the results off" step that
/// follows a selection interaction; it can only raise the state's entropy.
pub fn measure_results(state: &DensityState, subsystem: &str) -> Result<DensityState> {
    measure_results_with(state, subsystem, &Tolerances::default())
}

/// [`measure_results`] under explicit tolerances.
pub fn measure_results_with(
    state: &DensityState,
    subsystem: &str,
    tols: &Tolerances,
) -> Result<DensityState> {
    let dim = state.layout().dim_of(subsystem)?;
    let mut ancilla_label = String::from("results");
    while state.layout().subsystems().iter().any(|s| s.label() == ancilla_label) {
        ancilla_label.push('_');
    }
    let extended = state
        .layout()
        .concat(&SystemLayout::single(ancilla_label.clone(), dim)?)?;
    let mut blank = DMatrix::<C64>::zeros(dim, dim);
    blank[(0, 0)] = C64::new(1.0, 0.0);
    let joint = Operator::new(
        extended.clone(),
        state.operator().matrix().kronecker(&blank),
    )?;
    let readout =
        perfect_measurement_unitary_with(&extended, subsystem, &ancilla_label, None, tols)?;
    let evolved = readout.matrix() * joint.matrix() * readout.matrix().adjoint();
    let keep: Vec<&str> = state
        .layout()
        .subsystems()
        .iter()
        .map(|s| s.label())
        .collect();
    let remaining = Operator::new(extended, evolved)?.partial_trace(&keep)?;
    DensityState::with_tolerances(remaining, tols)
}
