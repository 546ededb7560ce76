//! Batch command-line front end.
//!
//! Each subcommand loads its inputs, runs one library scenario, re-checks
//! the numeric invariants the library promises, and writes CSV or JSON.
//! All randomness is seeded by flags, so a repeated invocation produces
//! byte-identical output. Exit codes: 0 success, 1 configuration or
//! validation error, 2 violation of a numerical property (an entropy
//! decrease, a capacity excess, a drifting global entropy).
//!
//! The environment variable `EVERETTROPY_TOL` overrides the default
//! operator tolerance for every subcommand.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::capacity::{
    i_max_bits, mutual_information_bits, run_permutation_code_with, ChannelExperiment,
};
use crate::copyability::{classify_copyable, classify_copyable_hermitian_only};
use crate::dynamics::detect_branching_with;
use crate::error::{Error, Result};
use crate::json as wire;
use crate::layout::SystemLayout;
use crate::operator::Operator;
use crate::selection::{measure_results_with, seeded_selection_run_with};
use crate::state::{DensityState, Observable};
use crate::szilard::run_szilard_with;
use crate::tolerance::Tolerances;

#[derive(Parser)]
#[command(
    name = "everettropy",
    version,
    about = "Scenario runner for branching measurements, operator copying, record capacity, and entropy bookkeeping"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the four-stage molecule engine cycle and write its entropy trace
    Szilard {
        /// Number of identical non-interacting molecules
        #[arg(long)]
        molecules: u64,
        /// Output CSV path (stage, subsystem, entropy per molecule, total)
        #[arg(long)]
        out: PathBuf,
        /// Also write per-stage reduced states to the same path with a
        /// .json extension
        #[arg(long)]
        json: bool,
    },
    /// Sweep seeded noisy selection interactions and record entropy growth
    Selection {
        /// First-register dimension
        #[arg(long)]
        dim_a: usize,
        /// Second-register dimension
        #[arg(long)]
        dim_b: usize,
        /// Basis-misalignment strength (0 = ideal classical interaction)
        #[arg(long)]
        noise: f64,
        /// How many consecutive seeds to run
        #[arg(long)]
        seeds: u64,
        /// First seed
        #[arg(long)]
        seed: u64,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for the sweep; rows stay in seed order
        #[arg(long)]
        parallel: Option<usize>,
        /// Measure both registers onto ancillas after each interaction and
        /// report the post-measurement entropies
        #[arg(long)]
        measure_results: bool,
    },
    /// Classify whether an operator's information can be copied
    CopyCheck {
        /// Operator JSON file
        #[arg(long)]
        operator: PathBuf,
        /// Override the commutator tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// Treat non-Hermitian input as not copyable instead of
        /// classifying by normality
        #[arg(long)]
        hermitian_only: bool,
        /// Write the verdict JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Information capacity of a known state, or a full coding experiment
    Capacity {
        /// State JSON file: print its capacity in bits
        #[arg(long, conflicts_with = "experiment")]
        state: Option<PathBuf>,
        /// Experiment JSON file {prior, spectrum, code}: print the result
        #[arg(long)]
        experiment: Option<PathBuf>,
    },
    /// Detect whether a unitary permutes an observable's outcome projectors
    Branches {
        /// Unitary JSON file
        #[arg(long)]
        unitary: PathBuf,
        /// Observable JSON file
        #[arg(long)]
        observable: PathBuf,
    },
    /// Von Neumann entropy of a state or of one of its marginals
    Entropy {
        /// State JSON file
        #[arg(long)]
        state: PathBuf,
        /// Comma-separated subsystem labels to keep
        #[arg(long)]
        keep: Option<String>,
    },
}

/// Parses the command line, runs one subcommand, and maps the outcome to
/// the exit-code contract.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_numerical_violation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let tols = Tolerances::from_env();
    match cli.command {
        Command::Szilard {
            molecules,
            out,
            json,
        } => cmd_szilard(molecules, &out, json, &tols),
        Command::Selection {
            dim_a,
            dim_b,
            noise,
            seeds,
            seed,
            out,
            parallel,
            measure_results,
        } => cmd_selection(
            dim_a,
            dim_b,
            noise,
            seeds,
            seed,
            &out,
            parallel,
            measure_results,
            &tols,
        ),
        Command::CopyCheck {
            operator,
            tol,
            hermitian_only,
            out,
        } => cmd_copy_check(&operator, tol, hermitian_only, out.as_deref(), &tols),
        Command::Capacity { state, experiment } => {
            cmd_capacity(state.as_deref(), experiment.as_deref(), &tols)
        }
        Command::Branches {
            unitary,
            observable,
        } => cmd_branches(&unitary, &observable, &tols),
        Command::Entropy { state, keep } => cmd_entropy(&state, keep.as_deref(), &tols),
    }
}

// ---- numeric output discipline ----

/// Rounds to 12 significant digits with sub-1e-12 magnitudes snapped to
/// zero, so every written number is stable digit noise notwithstanding.
fn rounded(value: f64) -> f64 {
    if !value.is_finite() || value == 0.0 {
        return value;
    }
    if value.abs() < 1e-12 {
        return 0.0;
    }
    let magnitude = value.abs().log10().floor() as i32;
    let factor = 10f64.powi(11 - magnitude);
    (value * factor).round() / factor
}

/// Formats an entropy-like quantity, refusing to write non-finite or
/// negative values.
fn bits(value: f64) -> Result<String> {
    if !value.is_finite() || value < -1e-9 {
        return Err(Error::NumericalViolation {
            context: "entropy output is negative or not finite".into(),
            deviation: value,
            tolerance: 1e-9,
        });
    }
    Ok(format!("{:?}", rounded(value.max(0.0))))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn render_json(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

fn rounded_wire(op: &Operator) -> wire::OperatorWire {
    let mut snapshot = wire::OperatorWire::from_operator(op);
    for row in &mut snapshot.matrix {
        for entry in row {
            entry[0] = rounded(entry[0]);
            entry[1] = rounded(entry[1]);
        }
    }
    snapshot
}

// ---- subcommands ----

fn cmd_szilard(molecules: u64, out: &Path, json: bool, tols: &Tolerances) -> Result<()> {
    let trace = run_szilard_with(molecules, tols)?;
    let mut csv = String::from("stage,subsystem,entropy_bits_per_molecule,entropy_bits_total\n");
    for report in trace.stages() {
        for (label, &per) in trace.labels().iter().zip(report.subsystem_bits()) {
            let total = per * trace.n_molecules() as f64;
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                report.stage(),
                label,
                bits(per)?,
                bits(total)?
            );
        }
    }
    write_text(out, &csv)?;

    if json {
        let stages = trace
            .stages()
            .iter()
            .map(|report| -> Result<serde_json::Value> {
                let subsystems = trace
                    .labels()
                    .iter()
                    .zip(report.subsystem_bits())
                    .zip(report.reduced_states())
                    .map(|((label, &per), reduced)| -> Result<serde_json::Value> {
                        Ok(json!({
                            "label": label,
                            "entropy_bits_per_molecule": rounded(per),
                            "entropy_bits_total": rounded(per * trace.n_molecules() as f64),
                            "reduced_state": serde_json::to_value(rounded_wire(reduced.operator()))
                                .expect("wire snapshots always serialize"),
                        }))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(json!({
                    "stage": report.stage(),
                    "global_entropy_bits": rounded(report.global_bits()),
                    "subsystems": subsystems,
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        let doc = json!({
            "molecules": trace.n_molecules(),
            "stages": stages,
        });
        write_text(&out.with_extension("json"), &render_json(&doc))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_selection(
    dim_a: usize,
    dim_b: usize,
    noise: f64,
    seeds: u64,
    seed: u64,
    out: &Path,
    parallel: Option<usize>,
    measure_results: bool,
    tols: &Tolerances,
) -> Result<()> {
    if seeds == 0 {
        return Err(Error::InvalidField {
            field: "seeds".into(),
            reason: "must run at least one seed".into(),
        });
    }
    let last = seed.checked_add(seeds - 1).ok_or_else(|| Error::InvalidField {
        field: "seed".into(),
        reason: "seed range overflows".into(),
    })?;
    let seed_list: Vec<u64> = (seed..=last).collect();

    let runs = match parallel {
        Some(workers) if workers > 1 => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::InvalidField {
                    field: "parallel".into(),
                    reason: e.to_string(),
                })?;
            pool.install(|| {
                seed_list
                    .par_iter()
                    .map(|&s| seeded_selection_run_with(dim_a, dim_b, noise, s, tols))
                    .collect::<Result<Vec<_>>>()
            })?
        }
        _ => seed_list
            .iter()
            .map(|&s| seeded_selection_run_with(dim_a, dim_b, noise, s, tols))
            .collect::<Result<Vec<_>>>()?,
    };

    let mut csv = String::from(
        "seed,S1_before,S1_after,S2_before,S2_after,global_S,dephasing_form_matched\n",
    );
    for run in &runs {
        let outcome = run.outcome();
        let drift = (outcome.global_entropy_after() - outcome.global_entropy_before()).abs();
        if drift > 1e-9 {
            return Err(Error::NumericalViolation {
                context: format!(
                    "global entropy changed under a unitary interaction (seed {})",
                    run.seed()
                ),
                deviation: drift,
                tolerance: 1e-9,
            });
        }
        let changes = outcome.entropy_changes();
        for (register, &matched) in outcome.dephasing_form_matched().iter().enumerate() {
            if matched && changes[register] < -1e-9 {
                return Err(Error::NumericalViolation {
                    context: format!(
                        "marginal entropy decreased on a dephasing-form run (seed {}, register {})",
                        run.seed(),
                        register + 1
                    ),
                    deviation: -changes[register],
                    tolerance: 1e-9,
                });
            }
        }

        let (s1_after, s2_after, global) = if measure_results {
            let once = measure_results_with(outcome.final_state(), "one", tols)?;
            let post = measure_results_with(&once, "two", tols)?;
            (
                post.reduced_with(&["one"], tols)?.entropy_bits(),
                post.reduced_with(&["two"], tols)?.entropy_bits(),
                post.entropy_bits(),
            )
        } else {
            (
                outcome.entropies_after()[0],
                outcome.entropies_after()[1],
                outcome.global_entropy_after(),
            )
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            run.seed(),
            bits(outcome.entropies_before()[0])?,
            bits(s1_after)?,
            bits(outcome.entropies_before()[1])?,
            bits(s2_after)?,
            bits(global)?,
            outcome.all_matched()
        );
    }
    write_text(out, &csv)
}

fn cmd_copy_check(
    operator: &Path,
    tol: Option<f64>,
    hermitian_only: bool,
    out: Option<&Path>,
    tols: &Tolerances,
) -> Result<()> {
    if let Some(value) = tol {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidField {
                field: "tol".into(),
                reason: format!("{value} is not a positive finite tolerance"),
            });
        }
    }
    let op = wire::load_operator(operator)?;
    let tolerance = tol.unwrap_or(tols.operator);
    let verdict = if hermitian_only {
        classify_copyable_hermitian_only(&op, tolerance)
    } else {
        classify_copyable(&op, tolerance)
    };
    let value = json!({
        "copyable": verdict.copyable(),
        "degenerate": verdict.degenerate(),
        "witness": verdict.witness().map(|(row, col)| vec![row, col]),
    });
    let text = render_json(&value);
    match out {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_capacity(
    state: Option<&Path>,
    experiment: Option<&Path>,
    tols: &Tolerances,
) -> Result<()> {
    match (state, experiment) {
        (Some(path), None) => {
            let state = wire::load_state(path, tols)?;
            println!("{}", bits(i_max_bits(&state))?);
            Ok(())
        }
        (None, Some(path)) => {
            let config = wire::load_experiment(path)?;
            let layout = SystemLayout::single("channel", config.spectrum.len().max(1))?;
            let channel = DensityState::from_probabilities(&layout, &config.spectrum)?;
            let experiment = ChannelExperiment::new(config.prior, channel.clone(), config.code)?;
            let run = run_permutation_code_with(&experiment, tols)?;
            let information = mutual_information_bits(&run.joint)?;
            let capacity = i_max_bits(&channel);
            if information > capacity + 1e-9 {
                return Err(Error::NumericalViolation {
                    context: "mutual information exceeded the capacity bound".into(),
                    deviation: information - capacity,
                    tolerance: 1e-9,
                });
            }
            let joint: Vec<Vec<f64>> = run
                .joint
                .iter()
                .map(|row| row.iter().map(|&p| rounded(p)).collect())
                .collect();
            let value = json!({
                "joint": joint,
                "mutual_information_bits": rounded(information),
                "i_max_bits": rounded(capacity),
                "gap": rounded((capacity - information).max(0.0)),
            });
            print!("{}", render_json(&value));
            Ok(())
        }
        _ => Err(Error::InvalidField {
            field: "state".into(),
            reason: "provide exactly one of --state or --experiment".into(),
        }),
    }
}

fn cmd_branches(unitary: &Path, observable: &Path, tols: &Tolerances) -> Result<()> {
    let unitary = wire::load_operator(unitary)?;
    let observable = Observable::with_tolerances(wire::load_operator(observable)?, tols)?;
    let permutation = detect_branching_with(&unitary, &observable, tols)?;
    let value = json!({
        "branching": permutation.is_some(),
        "permutation": permutation,
    });
    print!("{}", render_json(&value));
    Ok(())
}

fn cmd_entropy(state: &Path, keep: Option<&str>, tols: &Tolerances) -> Result<()> {
    let state = wire::load_state(state, tols)?;
    let value = match keep {
        Some(list) => {
            let labels: Vec<&str> = list
                .split(',')
                .map(str::trim)
                .filter(|label| !label.is_empty())
                .collect();
            if labels.is_empty() {
                return Err(Error::InvalidField {
                    field: "keep".into(),
                    reason: "no labels given".into(),
                });
            }
            state.reduced_with(&labels, tols)?.entropy_bits()
        }
        None => state.entropy_bits(),
    };
    println!("{}", bits(value)?);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_snaps_noise_and_keeps_twelve_digits() {
        assert_eq!(rounded(0.0), 0.0);
        assert_eq!(rounded(3.2e-16), 0.0);
        assert_eq!(rounded(-4.0e-13), 0.0);
        assert_eq!(rounded(0.9999999999999997), 1.0);
        assert_eq!(rounded(1.0), 1.0);
        assert_eq!(rounded(0.18872187554086715), 0.188721875541);
        assert_eq!(rounded(-2.5), -2.5);
    }

    #[test]
    fn bits_formats_like_a_decimal_and_rejects_bad_values() {
        assert_eq!(bits(1.0).unwrap(), "1.0");
        assert_eq!(bits(0.0).unwrap(), "0.0");
        assert_eq!(bits(-3.0e-13).unwrap(), "0.0");
        assert_eq!(bits(0.5).unwrap(), "0.5");
        assert!(bits(f64::NAN).is_err());
        assert!(bits(-1.0).is_err());
    }
}
