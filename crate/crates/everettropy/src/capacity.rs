//! How much classical information a system of known state can carry, and
//! the permutation-coding protocol that probes the bound.
//!
//! A system of dimension `N` in a known state `rho` can hold at most
//! `log2 N - S(rho)` bits ([`i_max_bits`]): the sender encodes a message by
//! permuting the state's eigenbasis, and entropy already present in the
//! spectrum is bandwidth lost. [`run_permutation_code`] simulates the whole
//! protocol honestly on a message (x) channel (x) record register — encode
//! by a message-controlled eigenbasis permutation, then read the channel
//! out onto a blank record — and returns the resulting joint distribution
//! next to the analytic prediction, so the quantum simulation and the
//! classical bookkeeping check each other.

use nalgebra::DMatrix;

use crate::dynamics::{controlled_unitary_with, ensure_bijection};
use crate::error::{Error, Result};
use crate::layout::SystemLayout;
use crate::linalg::C64;
use crate::operator::Operator;
use crate::state::DensityState;
use crate::tolerance::Tolerances;

/// Maximum information the state can carry, in bits: `log2 N - S(rho)`.
pub fn i_max_bits(state: &DensityState) -> f64 {
    let n = state.layout().total_dim() as f64;
    (n.log2() - state.entropy_bits()).max(0.0)
}

/// A permutation-coding experiment: a prior over messages, a channel state
/// whose spectrum is the code's raw material, and one eigenbasis
/// permutation per message.
#[derive(Debug, Clone)]
pub struct ChannelExperiment {
    prior: Vec<f64>,
    channel_state: DensityState,
    code: Vec<Vec<usize>>,
}

impl ChannelExperiment {
    /// Validates the pieces: `prior` a distribution, one bijective
    /// permutation of the channel's eigenvalue indices per message, and no
    /// more messages than channel dimensions.
    pub fn new(prior: Vec<f64>, channel_state: DensityState, code: Vec<Vec<usize>>) -> Result<Self> {
        let n = channel_state.layout().total_dim();
        validate_prior(&prior)?;
        if prior.len() > n {
            return Err(Error::InvalidField {
                field: "prior".into(),
                reason: format!(
                    "{} messages exceed the channel dimension {n}",
                    prior.len()
                ),
            });
        }
        if code.len() != prior.len() {
            return Err(Error::InvalidField {
                field: "code".into(),
                reason: format!(
                    "expected one permutation per message ({}), got {}",
                    prior.len(),
                    code.len()
                ),
            });
        }
        for perm in &code {
            ensure_bijection(perm, n)?;
        }
        Ok(ChannelExperiment {
            prior,
            channel_state,
            code,
        })
    }

    /// Uniform prior with the shift code `pi_a(b) = (a + b) mod N`.
    pub fn with_shift_code(channel_state: DensityState, messages: usize) -> Result<Self> {
        let n = channel_state.layout().total_dim();
        let prior = vec![1.0 / messages as f64; messages];
        let code = (0..messages)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::new(prior, channel_state, code)
    }

    /// Message prior.
    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    /// The channel state.
    pub fn channel_state(&self) -> &DensityState {
        &self.channel_state
    }

    /// One permutation of eigenvalue indices per message.
    pub fn code(&self) -> &[Vec<usize>] {
        &self.code
    }

    /// Analytic joint distribution `p(a,b)`: sending `a` permutes the
    /// channel's eigenvalue ladder by `pi_a`, so the readout lands on `b`
    /// with the probability originally attached to `pi_a^-1(b)`.
    pub fn predicted_joint(&self) -> Vec<Vec<f64>> {
        let p = self.channel_state.probabilities();
        let n = p.len();
        self.prior
            .iter()
            .zip(&self.code)
            .map(|(&prior_a, perm)| {
                let mut inverse = vec![0usize; n];
                for (b, &image) in perm.iter().enumerate() {
                    inverse[image] = b;
                }
                (0..n).map(|b| prior_a * p[inverse[b]]).collect()
            })
            .collect()
    }
}

fn validate_prior(prior: &[f64]) -> Result<()> {
    if prior.is_empty() {
        return Err(Error::InvalidDistribution {
            name: "prior".into(),
            reason: "empty".into(),
        });
    }
    if let Some(&bad) = prior.iter().find(|&&p| !p.is_finite() || p < 0.0) {
        return Err(Error::InvalidDistribution {
            name: "prior".into(),
            reason: format!("entry {bad} is negative or not finite"),
        });
    }
    let total: f64 = prior.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution {
            name: "prior".into(),
            reason: format!("sums to {total}, expected 1 within 1e-9"),
        });
    }
    Ok(())
}

/// Result of simulating a [`ChannelExperiment`].
#[derive(Debug, Clone)]
pub struct CodeRun {
    /// Joint distribution `p(a, b)` read off the final register state.
    pub joint: Vec<Vec<f64>>,
    /// Conditional record state for each message with nonzero prior.
    pub record_states: Vec<Option<DensityState>>,
}

/// Simulates the coding protocol on a message (x) channel (x) record
/// register: prepare `sum_a prior(a) |a><a|` next to the channel state and
/// a blank record, apply the message-controlled eigenbasis permutation,
/// read the channel's eigenbasis index onto the record, and extract the
/// joint distribution over (message, record) outcomes.
pub fn run_permutation_code(experiment: &ChannelExperiment) -> Result<CodeRun> {
    run_permutation_code_with(experiment, &Tolerances::default())
}

/// [`run_permutation_code`] under explicit tolerances.
pub fn run_permutation_code_with(
    experiment: &ChannelExperiment,
    tols: &Tolerances,
) -> Result<CodeRun> {
    let m = experiment.prior.len();
    let n = experiment.channel_state.layout().total_dim();
    let layout = SystemLayout::new([("message", m), ("channel", n), ("record", n)])?;
    let eigenvectors = experiment.channel_state.eigenvectors().clone();

    // initial register: diag(prior) (x) channel (x) |0><0|
    let prior_matrix = DMatrix::<C64>::from_fn(m, m, |i, j| {
        if i == j {
            C64::new(experiment.prior[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut blank = DMatrix::<C64>::zeros(n, n);
    blank[(0, 0)] = C64::new(1.0, 0.0);
    let initial = prior_matrix
        .kronecker(experiment.channel_state.operator().matrix())
        .kronecker(&blank);

    // encode: controlled permutation of the channel's eigenvalue indices
    let blocks: Vec<DMatrix<C64>> = experiment
        .code
        .iter()
        .map(|perm| {
            let mut p = DMatrix::<C64>::zeros(n, n);
            for (b, &image) in perm.iter().enumerate() {
                p[(image, b)] = C64::new(1.0, 0.0);
            }
            &eigenvectors * p * eigenvectors.adjoint()
        })
        .collect();
    let encode = controlled_unitary_with(&layout, &["message"], &["channel"], &blocks, tols)?;

    // read out: correlate the channel's eigenbasis index with the record
    let mut readout = Operator::zeros(&layout);
    for b in 0..n {
        let mut pb = DMatrix::<C64>::zeros(n, n);
        pb[(b, b)] = C64::new(1.0, 0.0);
        let eigen_projector = &eigenvectors * pb * eigenvectors.adjoint();
        let mut shift = DMatrix::<C64>::zeros(n, n);
        for r in 0..n {
            shift[((r + b) % n, r)] = C64::new(1.0, 0.0);
        }
        let term = &Operator::embedded(&layout, "channel", &eigen_projector)?
            * &Operator::embedded(&layout, "record", &shift)?;
        readout = &readout + &term;
    }

    let u = readout.matrix() * encode.matrix();
    let final_matrix = &u * initial * u.adjoint();
    let final_op = Operator::new(layout.clone(), final_matrix)?;

    // joint distribution p(a, b): diagonal of the message (x) record
    // reduction in the computational product basis
    let message_record = final_op.partial_trace(&["message", "record"])?;
    let mut joint = vec![vec![0.0f64; n]; m];
    for (a, row) in joint.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let diagonal = message_record.matrix()[(a * n + b, a * n + b)];
            if diagonal.im.abs() > 1e-9 {
                return Err(Error::ImaginaryResidual {
                    residual: diagonal.im,
                });
            }
            *entry = diagonal.re.max(0.0);
        }
    }

    // conditional record states per message
    let mut record_states = Vec::with_capacity(m);
    for a in 0..m {
        let prior_a = experiment.prior[a];
        if prior_a <= 1e-12 {
            record_states.push(None);
            continue;
        }
        let mut pa = DMatrix::<C64>::zeros(m, m);
        pa[(a, a)] = C64::new(1.0, 0.0);
        let projector = Operator::embedded(&layout, "message", &pa)?;
        let conditioned = Operator::new(
            layout.clone(),
            (projector.matrix() * final_op.matrix() * projector.matrix())
                / C64::new(prior_a, 0.0),
        )?;
        let record = conditioned.partial_trace(&["record"])?;
        record_states.push(Some(DensityState::with_tolerances(record, tols)?));
    }

    Ok(CodeRun {
        joint,
        record_states,
    })
}

/// Mutual information of a joint distribution, in bits:
/// `sum p(a,b) log2[p(a,b) / (p(a) p(b))]` with zero terms skipped.
pub fn mutual_information_bits(joint: &[Vec<f64>]) -> Result<f64> {
    if joint.is_empty() || joint[0].is_empty() {
        return Err(Error::InvalidDistribution {
            name: "joint".into(),
            reason: "empty".into(),
        });
    }
    let cols = joint[0].len();
    let mut total = 0.0;
    for row in joint {
        if row.len() != cols {
            return Err(Error::InvalidDistribution {
                name: "joint".into(),
                reason: "ragged rows".into(),
            });
        }
        for &p in row {
            if !p.is_finite() || p < -1e-12 {
                return Err(Error::InvalidDistribution {
                    name: "joint".into(),
                    reason: format!("entry {p} is negative or not finite"),
                });
            }
            total += p;
        }
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution {
            name: "joint".into(),
            reason: format!("sums to {total}, expected 1 within 1e-9"),
        });
    }
    let row_marginals: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let col_marginals: Vec<f64> = (0..cols)
        .map(|b| joint.iter().map(|r| r[b]).sum())
        .collect();
    let mut information = 0.0;
    for (a, row) in joint.iter().enumerate() {
        for (b, &p) in row.iter().enumerate() {
            if p > 0.0 {
                information += p * (p / (row_marginals[a] * col_marginals[b])).log2();
            }
        }
    }
    Ok(information.max(0.0))
}
