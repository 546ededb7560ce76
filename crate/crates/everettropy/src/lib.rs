//! Finite-dimensional quantum mechanics on labeled tensor-product spaces.
//!
//! The crate builds up from dense labeled operators ([`operator::Operator`]
//! over a [`layout::SystemLayout`]) to validated density matrices and
//! spectral observables ([`state`]), unitary dynamics with branching
//! detection and dephasing ([`dynamics`]), copyability classification and
//! copy-machine construction ([`copyability`]), record capacity of
//! permutation codes ([`capacity`]), entropy growth under imperfect
//! selection ([`selection`]), and a four-stage single-molecule engine cycle
//! ([`szilard`]). The `everettropy` binary exposes each scenario as a CLI
//! subcommand.

pub mod capacity;
pub mod cli;
pub mod copyability;
pub mod dynamics;
pub mod error;
pub mod json;
pub mod layout;
mod linalg;
pub mod operator;
pub mod selection;
pub mod state;
pub mod szilard;
pub mod tolerance;

pub use capacity::{
    i_max_bits, mutual_information_bits, run_permutation_code, ChannelExperiment, CodeRun,
};
pub use copyability::{
    build_copy_unitary, classify_copyable, classify_copyable_hermitian_only, cloning_demo,
    verify_copy, CloneOutcome, CopyCheck, CopyVerdict, OPERATOR_SCHMIDT_RATIO,
};
pub use dynamics::{
    controlled_unitary, dephase, detect_branching, evolve_heisenberg, evolve_schrodinger,
    perfect_measurement_unitary, permutation_unitary, rank_one_projectors, EvolutionStep, Picture,
};
pub use error::{Error, Result};
pub use layout::{SystemLayout, DEFAULT_DIMENSION_CAP};
pub use linalg::C64;
pub use operator::{Operator, OperatorFlags};
pub use selection::{
    knowledge_state, measure_results, run_selection, seeded_selection_run, selection_unitary,
    SelectionOutcome, SelectionRun,
};
pub use state::{
    expectation, game_value, knowledge_form_check, schmidt_decompose, shannon_entropy_bits,
    Bipartition, DensityState, KnowledgeForm, Observable, QuantumGame, SchmidtDecomposition,
};
pub use szilard::{
    run_szilard, x_projectors, xz_conjugation, EntropyTrace, MoleculeCell, StageReport,
    GLOBAL_ENTROPY_DRIFT,
};
pub use tolerance::Tolerances;
