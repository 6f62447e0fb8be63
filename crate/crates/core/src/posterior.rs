//! What an inconclusive answer still says about the input.
//!
//! `A_0` is split along its eigenvectors into rank-one outcomes; for each
//! outcome the joint probabilities with every input give Bayes posteriors
//! and their Shannon entropy (in nats).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, inner_product, StateEnsemble, StateVector, C64};
use crate::povm::{is_feasible, PovmSet, PSD_TOLERANCE};

/// Eigenvalues below this fraction of the largest are dropped.
pub const SPECTRAL_CUTOFF: f64 = 1e-10;
/// `A_0` whose largest eigenvalue is below this is treated as zero.
pub const ZERO_OPERATOR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralOutcome {
    pub label: String,
    pub eigenvalue: f64,
    pub eigenvector: StateVector,
}

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

/// Rank-one pieces `lambda_m |m><m|` of the inconclusive element, largest
/// eigenvalue first. Empty when `A_0` vanishes.
pub fn decompose_inconclusive(povm: &PovmSet, cutoff: f64) -> Result<Vec<SpectralOutcome>> {
    let feas = is_feasible(povm, PSD_TOLERANCE);
    if !feas.feasible {
        return Err(Error::Infeasible {
            min_eigenvalue: feas.min_eigenvalue,
        });
    }
    let (values, vectors) = hermitian_eigen(&povm.inconclusive.matrix);
    let largest = values.last().copied().unwrap_or(0.0);
    if largest <= ZERO_OPERATOR_TOLERANCE {
        return Ok(Vec::new());
    }
    let mut outcomes = Vec::new();
    for idx in (0..values.len()).rev() {
        if values[idx] <= cutoff * largest {
            continue;
        }
        let v: Vec<C64> = vectors.column(idx).iter().copied().collect();
        outcomes.push(SpectralOutcome {
            label: format!("inconclusive-{}", outcomes.len() + 1),
            eigenvalue: values[idx],
            eigenvector: StateVector::normalized(v)?,
        });
    }
    Ok(outcomes)
}

/// The whole of `A_0` taken as a single outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MergedOutcome {
    pub probability: f64,
    pub joint_probabilities: Vec<f64>,
    pub posteriors: Vec<f64>,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PosteriorReport {
    pub outcomes: Vec<SpectralOutcome>,
    /// `joint_probabilities[m][j] = p_j lambda_m |<m, u_j>|^2`.
    pub joint_probabilities: Vec<Vec<f64>>,
    /// `posteriors[m][j]`: probability of input `j` given outcome `m`.
    pub posteriors: Vec<Vec<f64>>,
    pub outcome_entropies: Vec<f64>,
    pub initial_entropy: f64,
    /// `None` when `A_0` vanishes.
    pub merged: Option<MergedOutcome>,
    pub warnings: Vec<String>,
}

fn normalize(joint: &[f64]) -> Option<Vec<f64>> {
    let total: f64 = joint.iter().sum();
    (total > f64::MIN_POSITIVE).then(|| joint.iter().map(|p| p / total).collect())
}

pub fn posterior_report(ensemble: &StateEnsemble, povm: &PovmSet) -> Result<PosteriorReport> {
    posterior_report_with(ensemble, povm, SPECTRAL_CUTOFF)
}

pub fn posterior_report_with(
    ensemble: &StateEnsemble,
    povm: &PovmSet,
    cutoff: f64,
) -> Result<PosteriorReport> {
    let priors = ensemble.priors();
    let mut report = PosteriorReport {
        outcomes: Vec::new(),
        joint_probabilities: Vec::new(),
        posteriors: Vec::new(),
        outcome_entropies: Vec::new(),
        initial_entropy: shannon_entropy(priors),
        merged: None,
        warnings: Vec::new(),
    };
    for outcome in decompose_inconclusive(povm, cutoff)? {
        let joint = ensemble
            .states()
            .iter()
            .zip(priors)
            .map(|(u, p)| {
                let overlap = inner_product(outcome.eigenvector.components(), u.components())?;
                Ok(p * outcome.eigenvalue * overlap.norm_sqr())
            })
            .collect::<Result<Vec<f64>>>()?;
        let Some(post) = normalize(&joint) else {
            report
                .warnings
                .push(format!("outcome {} never occurs; dropped", outcome.label));
            continue;
        };
        report.outcome_entropies.push(shannon_entropy(&post));
        report.posteriors.push(post);
        report.joint_probabilities.push(joint);
        report.outcomes.push(outcome);
    }
    if !report.outcomes.is_empty() {
        let joint: Vec<f64> = ensemble
            .states()
            .iter()
            .zip(priors)
            .map(|(u, p)| p * povm.inconclusive.probability(u.components()).max(0.0))
            .collect();
        if let Some(post) = normalize(&joint) {
            report.merged = Some(MergedOutcome {
                probability: joint.iter().sum(),
                entropy: shannon_entropy(&post),
                posteriors: post,
                joint_probabilities: joint,
            });
        }
    }
    Ok(report)
}
