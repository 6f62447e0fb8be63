//! Maximization of the expected gain `G = T sum_j b_j k_j`, `b_j = C_j p_j`,
//! over the coefficients for which `A_0` stays positive semidefinite.
//!
//! The feasible set is bounded by the surface `det(A_0) = 0`. Level planes
//! of `G` are swept inward until they touch it; when the touching point
//! leaves the orthant the search moves to the coordinate faces. Every face
//! (subset of coefficients clamped to zero) is enumerated and the best
//! feasible tangency point wins.

mod oracle;
mod surface;
mod tangency;

pub use oracle::{grid_oracle, grid_oracle_with, OracleResult, DEFAULT_ORACLE_RESOLUTION};
pub use surface::{hyperbola_asymptote, solve_axis, surface_sample, SurfaceSample};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dual_vectors, DualSystem, StateEnsemble};
use crate::povm::{build_povm, det_inconclusive, is_feasible, CoefficientVector, PSD_TOLERANCE};
use tangency::{block_roots, blocks, spectral_load, submatrix};

/// Candidates whose gains differ by less than this are considered tied.
pub const GAIN_TIE_TOLERANCE: f64 = 1e-10;
/// `|det(A_0)|` below this counts as contact with the positivity boundary.
pub const BOUNDARY_TOLERANCE: f64 = 1e-8;
/// A tangency root is on the boundary of the feasible set (rather than on
/// another sheet of the determinant surface) when its spectral load is
/// within this of one.
const BRANCH_TOLERANCE: f64 = 1e-6;

/// `b_j = C_j p_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GainWeights(Vec<f64>);

impl GainWeights {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        if let Some((j, v)) = b
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidValues(format!(
                "gain weight {j} = {v} is negative"
            )));
        }
        if !b.iter().any(|v| *v > 0.0) {
            return Err(Error::InvalidValues("every signal has zero value".into()));
        }
        Ok(Self(b))
    }

    pub fn from_ensemble(ensemble: &StateEnsemble) -> Result<Self> {
        Self::new(
            ensemble
                .priors()
                .iter()
                .zip(ensemble.values())
                .map(|(p, c)| p * c)
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Solution {
    pub k: CoefficientVector,
    pub gain: f64,
    pub inconclusive_probability: f64,
    /// Indices whose coefficient is zero.
    pub active_face: Vec<usize>,
    pub boundary_contact: bool,
    pub min_eigenvalue: f64,
}

impl Solution {
    /// Evaluates `k` against the problem. Fails if `A_0` is not PSD at `psd_tolerance`.
    pub fn evaluate(
        ensemble: &StateEnsemble,
        duals: &DualSystem,
        k: CoefficientVector,
        psd_tolerance: f64,
    ) -> Result<Self> {
        let povm = build_povm(duals, &k)?;
        let feas = is_feasible(&povm, psd_tolerance);
        if !feas.feasible {
            return Err(Error::Infeasible {
                min_eigenvalue: feas.min_eigenvalue,
            });
        }
        let t = duals.gram_volume();
        let kk = k.as_slice();
        let gain = t * kk
            .iter()
            .zip(ensemble.priors().iter().zip(ensemble.values()))
            .map(|(k, (p, c))| k * p * c)
            .sum::<f64>();
        let inconclusive_probability = 1.0
            - t * kk
                .iter()
                .zip(ensemble.priors())
                .map(|(k, p)| k * p)
                .sum::<f64>();
        let active_face = (0..kk.len()).filter(|&j| kk[j] == 0.0).collect();
        let boundary_contact = det_inconclusive(duals, kk).abs() < BOUNDARY_TOLERANCE;
        Ok(Self {
            k,
            gain,
            inconclusive_probability,
            active_face,
            boundary_contact,
            min_eigenvalue: feas.min_eigenvalue,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub psd_tolerance: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            psd_tolerance: PSD_TOLERANCE,
        }
    }
}

fn free_indices(n: usize, face: &[usize]) -> Vec<usize> {
    (0..n).filter(|j| !face.contains(j)).collect()
}

/// Cartesian product of per-block root lists, embedded into `n` coordinates.
fn combine(n: usize, parts: &[(Vec<usize>, Vec<Vec<f64>>)]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; n]];
    for (indices, roots) in parts {
        let mut next = Vec::with_capacity(out.len() * roots.len());
        for base in &out {
            for r in roots {
                let mut k = base.clone();
                for (&i, &v) in indices.iter().zip(r) {
                    k[i] = v;
                }
                next.push(k);
            }
        }
        out = next;
    }
    out
}

fn face_roots(
    duals: &DualSystem,
    weights: &GainWeights,
    face: &[usize],
    positive: bool,
) -> Vec<Vec<f64>> {
    let n = duals.dim();
    let w = duals.dual_gram();
    let free = free_indices(n, face);
    if free.is_empty() {
        return vec![vec![0.0; n]];
    }
    let b = weights.as_slice();
    let parts: Vec<(Vec<usize>, Vec<Vec<f64>>)> = blocks(w, &free)
        .into_iter()
        .map(|idx| {
            let sub = submatrix(w, &idx);
            let bb: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
            let roots = block_roots(&sub, &bb)
                .into_iter()
                .filter(|r| !positive || r.iter().all(|&v| v > 0.0))
                .collect();
            (idx, roots)
        })
        .collect();
    combine(n, &parts)
}

/// Tangency points on the face where the coefficients in `face` are zero,
/// with every free coefficient positive. Not filtered for positivity of
/// `A_0`; roots on other sheets of the determinant surface may appear.
pub fn face_tangency(duals: &DualSystem, weights: &GainWeights, face: &[usize]) -> Vec<Vec<f64>> {
    face_roots(duals, weights, face, true)
}

/// Like [`face_tangency`] but keeps roots with negative free coefficients.
pub fn tangency_roots(duals: &DualSystem, weights: &GainWeights, face: &[usize]) -> Vec<Vec<f64>> {
    face_roots(duals, weights, face, false)
}

/// Best feasible tangency point of one face, with each block pushed exactly
/// onto the positivity boundary.
fn best_on_face(duals: &DualSystem, b: &[f64], free: &[usize]) -> Option<Vec<f64>> {
    let n = duals.dim();
    let w = duals.dual_gram();
    let mut k = vec![0.0; n];
    for idx in blocks(w, free) {
        let sub = submatrix(w, &idx);
        let bb: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for root in block_roots(&sub, &bb) {
            if !root.iter().all(|&v| v > 0.0) {
                continue;
            }
            let load = spectral_load(&sub, &root);
            if !((load - 1.0).abs() <= BRANCH_TOLERANCE) {
                continue;
            }
            let x: Vec<f64> = root.iter().map(|v| v / load).collect();
            let g: f64 = x.iter().zip(&bb).map(|(a, c)| a * c).sum();
            let better = match &best {
                None => true,
                Some((bg, bx)) => {
                    g > *bg + GAIN_TIE_TOLERANCE
                        || ((g - bg).abs() <= GAIN_TIE_TOLERANCE && x < *bx)
                }
            };
            if better {
                best = Some((g, x));
            }
        }
        let (_, x) = best?;
        for (&i, v) in idx.iter().zip(x) {
            k[i] = v;
        }
    }
    Some(k)
}

pub fn optimize(ensemble: &StateEnsemble) -> Result<Solution> {
    optimize_with(ensemble, &OptimizerOptions::default())
}

pub fn optimize_with(ensemble: &StateEnsemble, options: &OptimizerOptions) -> Result<Solution> {
    let duals = dual_vectors(ensemble)?;
    let weights = GainWeights::from_ensemble(ensemble)?;
    optimize_duals(ensemble, &duals, &weights, options)
}

pub(crate) fn optimize_duals(
    ensemble: &StateEnsemble,
    duals: &DualSystem,
    weights: &GainWeights,
    options: &OptimizerOptions,
) -> Result<Solution> {
    let n = duals.dim();
    let b = weights.as_slice();
    // Signals without value never get a detector.
    let useful: Vec<usize> = (0..n).filter(|&j| b[j] > 0.0).collect();
    let subsets: Vec<usize> = (1usize..(1 << useful.len())).collect();

    let evaluate = |mask: &usize| -> Option<Vec<f64>> {
        let free: Vec<usize> = useful
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, &j)| j)
            .collect();
        best_on_face(duals, b, &free)
    };
    #[cfg(feature = "parallel")]
    let found: Vec<Option<Vec<f64>>> = subsets.par_iter().map(evaluate).collect();
    #[cfg(not(feature = "parallel"))]
    let found: Vec<Option<Vec<f64>>> = subsets.iter().map(evaluate).collect();

    let mut candidates: Vec<Vec<f64>> = vec![vec![0.0; n]];
    for k in found.into_iter().flatten() {
        let povm = build_povm(duals, &CoefficientVector::new(k.clone())?)?;
        if is_feasible(&povm, options.psd_tolerance).feasible {
            candidates.push(k);
        }
    }

    let gain = |k: &[f64]| k.iter().zip(b).map(|(a, c)| a * c).sum::<f64>();
    let best_gain = candidates
        .iter()
        .map(|k| gain(k))
        .fold(f64::NEG_INFINITY, f64::max);
    let clamped = |k: &[f64]| k.iter().filter(|&&v| v == 0.0).count();
    let t = duals.gram_volume();
    let winner = candidates
        .into_iter()
        .filter(|k| t * (best_gain - gain(k)) <= GAIN_TIE_TOLERANCE)
        .min_by(|a, b| {
            clamped(a)
                .cmp(&clamped(b))
                .then_with(|| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
        })
        .ok_or_else(|| Error::Consistency("no feasible candidate".into()))?;

    Solution::evaluate(
        ensemble,
        duals,
        CoefficientVector::new(winner)?,
        options.psd_tolerance,
    )
}
