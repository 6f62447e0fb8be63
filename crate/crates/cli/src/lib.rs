//! Command implementations behind the `povm` binary. Each command returns
//! the text it would print, so tests can drive them without a process.

pub mod problem;

use std::fmt::Write as _;

use povm_core::optimizer::{grid_oracle_with, OptimizerOptions};
use povm_core::posterior::{posterior_report_with, SPECTRAL_CUTOFF};
use povm_core::{
    build_povm, dual_vectors, optimize_with, outcome_probabilities, run_simulation, surface_sample,
    CoefficientVector, DualSystem, SimulationConfig, SimulationReport, Solution, StateEnsemble,
    StateVector,
};
use serde::{Deserialize, Serialize};

pub use povm_core::{InputOptions, ProblemFile};
pub use problem::{load_ensemble, parse_problem, read_problem};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] povm_core::Error),
}

impl CliError {
    /// 1 malformed input, 2 linear dependence, 3 unsupported dimension.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(povm_core::Error::LinearDependence { .. }) => 2,
            CliError::Core(povm_core::Error::UnsupportedDimension { .. }) => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub psd_tolerance: f64,
    /// Grid resolution for the brute-force cross-check, if requested.
    pub oracle: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            psd_tolerance: OptimizerOptions::default().psd_tolerance,
            oracle: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OracleDiagnostics {
    pub resolution: usize,
    pub gain: f64,
    /// Optimizer gain minus oracle gain; never meaningfully negative.
    pub gap: f64,
    pub resolution_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Diagnostics {
    pub min_eigenvalue: f64,
    pub boundary_contact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SolutionFile {
    pub k: Vec<f64>,
    pub gain: f64,
    pub inconclusive_probability: f64,
    pub active_face: Vec<usize>,
    /// Probability that input `j` fires detector `j`.
    pub detection_probabilities: Vec<f64>,
    pub dual_norms_squared: Vec<f64>,
    pub gram_volume: f64,
    pub diagnostics: Diagnostics,
}

impl SolutionFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("malformed solution file: {e}")))
    }

    /// Re-evaluates the stored coefficients against `ensemble`.
    pub fn reevaluate(&self, ensemble: &StateEnsemble, psd_tolerance: f64) -> CliResult<Solution> {
        let duals = dual_vectors(ensemble)?;
        let k = CoefficientVector::new(self.k.clone())?;
        Ok(Solution::evaluate(ensemble, &duals, k, psd_tolerance)?)
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn solve_ensemble(
    ensemble: &StateEnsemble,
    options: &SolveOptions,
) -> CliResult<(DualSystem, Solution)> {
    let duals = dual_vectors(ensemble)?;
    let solution = optimize_with(
        ensemble,
        &OptimizerOptions {
            psd_tolerance: options.psd_tolerance,
        },
    )?;
    Ok((duals, solution))
}

pub fn solution_file(ensemble: &StateEnsemble, options: &SolveOptions) -> CliResult<SolutionFile> {
    let (duals, s) = solve_ensemble(ensemble, options)?;
    let outcomes = outcome_probabilities(ensemble, &duals, &s.k)?;
    let oracle = match options.oracle {
        None => None,
        Some(resolution) => {
            let o = grid_oracle_with(
                ensemble,
                resolution,
                &OptimizerOptions {
                    psd_tolerance: options.psd_tolerance,
                },
            )?;
            Some(OracleDiagnostics {
                resolution,
                gain: o.solution.gain,
                gap: s.gain - o.solution.gain,
                resolution_bound: o.resolution_bound,
            })
        }
    };
    Ok(SolutionFile {
        k: s.k.as_slice().to_vec(),
        gain: s.gain,
        inconclusive_probability: s.inconclusive_probability,
        active_face: s.active_face,
        detection_probabilities: outcomes.detection,
        dual_norms_squared: duals.norms_sqr(),
        gram_volume: duals.gram_volume(),
        diagnostics: Diagnostics {
            min_eigenvalue: s.min_eigenvalue,
            boundary_contact: s.boundary_contact,
            oracle,
        },
    })
}

pub fn cmd_solve(ensemble: &StateEnsemble, options: &SolveOptions) -> CliResult<String> {
    Ok(to_json(&solution_file(ensemble, options)?))
}

/// One inconclusive outcome with its posterior over the inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OutcomeEntry {
    pub label: String,
    /// Absent for the merged outcome.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalue: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvector: Option<StateVector>,
    pub probability: f64,
    pub joint_probabilities: Vec<f64>,
    pub posteriors: Vec<f64>,
    /// Nats.
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PosteriorOutput {
    pub k: Vec<f64>,
    pub inconclusive_probability: f64,
    /// Nats.
    pub initial_entropy: f64,
    pub outcomes: Vec<OutcomeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn posterior_output(
    ensemble: &StateEnsemble,
    options: &SolveOptions,
    merged: bool,
    cutoff: f64,
) -> CliResult<PosteriorOutput> {
    let (duals, s) = solve_ensemble(ensemble, options)?;
    let povm = build_povm(&duals, &s.k)?;
    let report = posterior_report_with(ensemble, &povm, cutoff)?;
    let outcomes = if merged {
        report
            .merged
            .into_iter()
            .map(|m| OutcomeEntry {
                label: "inconclusive".into(),
                eigenvalue: None,
                eigenvector: None,
                probability: m.probability,
                joint_probabilities: m.joint_probabilities,
                posteriors: m.posteriors,
                entropy: m.entropy,
            })
            .collect()
    } else {
        report
            .outcomes
            .into_iter()
            .zip(report.joint_probabilities)
            .zip(report.posteriors.into_iter().zip(report.outcome_entropies))
            .map(|((o, joint), (post, h))| OutcomeEntry {
                label: o.label,
                eigenvalue: Some(o.eigenvalue),
                eigenvector: Some(o.eigenvector),
                probability: joint.iter().sum(),
                joint_probabilities: joint,
                posteriors: post,
                entropy: h,
            })
            .collect::<Vec<_>>()
    };
    let note = outcomes
        .is_empty()
        .then(|| "inconclusive operator vanishes: every input is identified".to_string());
    Ok(PosteriorOutput {
        k: s.k.as_slice().to_vec(),
        inconclusive_probability: s.inconclusive_probability,
        initial_entropy: report.initial_entropy,
        outcomes,
        warnings: report.warnings,
        note,
    })
}

pub fn cmd_posterior(
    ensemble: &StateEnsemble,
    options: &SolveOptions,
    merged: bool,
    cutoff: f64,
) -> CliResult<String> {
    Ok(to_json(&posterior_output(
        ensemble, options, merged, cutoff,
    )?))
}

pub const DEFAULT_SPECTRAL_CUTOFF: f64 = SPECTRAL_CUTOFF;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationOutput {
    pub k: Vec<f64>,
    pub seed: u64,
    pub split: bool,
    #[serde(flatten)]
    pub report: SimulationReport,
}

pub fn simulation_output(
    ensemble: &StateEnsemble,
    options: &SolveOptions,
    config: &SimulationConfig,
) -> CliResult<SimulationOutput> {
    let (duals, s) = solve_ensemble(ensemble, options)?;
    let povm = build_povm(&duals, &s.k)?;
    let report = run_simulation(ensemble, &povm, config)?;
    Ok(SimulationOutput {
        k: s.k.as_slice().to_vec(),
        seed: config.seed,
        split: config.split_inconclusive,
        report,
    })
}

pub fn cmd_simulate(
    ensemble: &StateEnsemble,
    options: &SolveOptions,
    trials: u64,
    seed: u64,
    split: bool,
) -> CliResult<String> {
    let config = SimulationConfig::new(trials, seed, split)?;
    Ok(to_json(&simulation_output(ensemble, options, &config)?))
}

pub fn cmd_surface(ensemble: &StateEnsemble, resolution: usize) -> CliResult<String> {
    let duals = dual_vectors(ensemble)?;
    let sample = surface_sample(&duals, resolution)?;
    let mut out = String::from("k1,k2,k3\n");
    for [a, b, c] in sample.points {
        // `{}` prints the shortest representation that round-trips.
        writeln!(out, "{a},{b},{c}").expect("writing to a String");
    }
    Ok(out)
}
