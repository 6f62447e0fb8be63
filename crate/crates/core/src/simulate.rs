//! Monte Carlo check of the measurement statistics.
//!
//! Trial `t` draws its randomness from ChaCha8 stream `t` under the
//! configured seed, so results do not depend on how trials are scheduled.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::StateEnsemble;
use crate::posterior::{decompose_inconclusive, SPECTRAL_CUTOFF};
use crate::povm::{is_feasible, PovmElement, PovmSet, PSD_TOLERANCE};

/// Negative Born probabilities down to this are treated as round-off.
pub const NEGATIVE_PROBABILITY_TOLERANCE: f64 = 1e-9;
/// Born probabilities with magnitude below this are set to zero.
pub const ZERO_PROBABILITY: f64 = 1e-12;
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationConfig {
    pub trials: u64,
    pub seed: u64,
    pub split_inconclusive: bool,
}

impl SimulationConfig {
    pub fn new(trials: u64, seed: u64, split_inconclusive: bool) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        Ok(Self {
            trials,
            seed,
            split_inconclusive,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationReport {
    /// Detector labels `1..=N`, then the inconclusive outcome(s).
    pub outcome_labels: Vec<String>,
    /// `counts[input][outcome]`.
    pub counts: Vec<Vec<u64>>,
    /// Analytic `p_i <u_i, A_o u_i>` for each cell.
    pub analytic: Vec<Vec<f64>>,
    pub trials: u64,
    pub empirical_inconclusive: f64,
    pub analytic_inconclusive: f64,
    /// Largest `|count / trials - analytic|` over all cells.
    pub max_deviation: f64,
    /// Three binomial standard errors of the widest cell.
    pub standard_error_bound: f64,
    /// Events where detector `j` fired on input `i != j`.
    pub misidentifications: u64,
}

/// Conditional outcome distribution of one input, after clipping round-off.
fn conditional(
    elements: &[&PovmElement],
    u: &[crate::linalg::C64],
    input: usize,
) -> Result<Vec<f64>> {
    let mut probs = Vec::with_capacity(elements.len());
    for e in elements {
        let p = e.probability(u);
        if p < -NEGATIVE_PROBABILITY_TOLERANCE {
            return Err(Error::NegativeProbability { input, value: p });
        }
        probs.push(if p.abs() < ZERO_PROBABILITY {
            0.0
        } else {
            p.max(0.0)
        });
    }
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Consistency(format!(
            "input {input} has no possible outcome"
        )));
    }
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(probs)
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], r: f64) -> usize {
    cdf.iter()
        .position(|&c| r < c)
        .unwrap_or_else(|| cdf.iter().rposition(|&c| c > 0.0).unwrap_or(0))
}

pub fn run_simulation(
    ensemble: &StateEnsemble,
    povm: &PovmSet,
    config: &SimulationConfig,
) -> Result<SimulationReport> {
    if config.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let feas = is_feasible(povm, PSD_TOLERANCE);
    if !feas.feasible {
        return Err(Error::Infeasible {
            min_eigenvalue: feas.min_eigenvalue,
        });
    }
    let n = ensemble.dim();

    let split: Vec<PovmElement> = if config.split_inconclusive {
        decompose_inconclusive(povm, SPECTRAL_CUTOFF)?
            .into_iter()
            .map(|o| {
                let v = o.eigenvector.components();
                PovmElement {
                    matrix: crate::linalg::CMatrix::from_fn(n, n, |r, c| {
                        v[r] * v[c].conj() * o.eigenvalue
                    }),
                }
            })
            .collect()
    } else {
        vec![povm.inconclusive.clone()]
    };
    let elements: Vec<&PovmElement> = povm.detectors.iter().chain(split.iter()).collect();
    let mut outcome_labels: Vec<String> = (1..=n).map(|j| j.to_string()).collect();
    if config.split_inconclusive {
        outcome_labels.extend((1..=split.len()).map(|m| format!("0.{m}")));
    } else {
        outcome_labels.push("0".into());
    }
    let outcomes = elements.len();

    let conditionals: Vec<Vec<f64>> = ensemble
        .states()
        .iter()
        .enumerate()
        .map(|(i, u)| conditional(&elements, u.components(), i))
        .collect::<Result<_>>()?;
    let input_cdf = cumulative(ensemble.priors());
    let outcome_cdfs: Vec<Vec<f64>> = conditionals.iter().map(|p| cumulative(p)).collect();

    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let run_chunk = |chunk: u64| -> Vec<u64> {
        let mut counts = vec![0u64; n * outcomes];
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(config.trials);
        for trial in start..end {
            let mut rng = base.clone();
            rng.set_stream(trial);
            let input = draw(&input_cdf, rng.random::<f64>());
            let outcome = draw(&outcome_cdfs[input], rng.random::<f64>());
            counts[input * outcomes + outcome] += 1;
        }
        counts
    };
    let chunks = config.trials.div_ceil(CHUNK);
    let merge = |mut a: Vec<u64>, b: Vec<u64>| {
        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        a
    };
    #[cfg(feature = "parallel")]
    let flat = (0..chunks)
        .into_par_iter()
        .map(run_chunk)
        .reduce(|| vec![0u64; n * outcomes], merge);
    #[cfg(not(feature = "parallel"))]
    let flat = (0..chunks)
        .map(run_chunk)
        .fold(vec![0u64; n * outcomes], merge);

    let counts: Vec<Vec<u64>> = flat.chunks(outcomes).map(|c| c.to_vec()).collect();
    let analytic: Vec<Vec<f64>> = conditionals
        .iter()
        .zip(ensemble.priors())
        .map(|(c, p)| c.iter().map(|q| p * q).collect())
        .collect();
    let trials = config.trials as f64;
    let mut max_deviation: f64 = 0.0;
    let mut widest: f64 = 0.0;
    let mut misidentifications = 0;
    for i in 0..n {
        for o in 0..outcomes {
            let p = analytic[i][o];
            max_deviation = max_deviation.max((counts[i][o] as f64 / trials - p).abs());
            widest = widest.max(p * (1.0 - p));
            if o < n && o != i {
                misidentifications += counts[i][o];
            }
        }
    }
    let inconclusive_count: u64 = counts.iter().map(|row| row[n..].iter().sum::<u64>()).sum();
    let analytic_inconclusive: f64 = analytic
        .iter()
        .map(|row| row[n..].iter().sum::<f64>())
        .sum();

    Ok(SimulationReport {
        outcome_labels,
        counts,
        analytic,
        trials: config.trials,
        empirical_inconclusive: inconclusive_count as f64 / trials,
        analytic_inconclusive,
        max_deviation,
        standard_error_bound: 3.0 * (widest / trials).sqrt(),
        misidentifications,
    })
}
