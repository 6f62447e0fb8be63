//! Exhaustive grid search over the intercept box, used to check the
//! tangency solver.
//!
//! `A_0(k)` only loses positivity as any `k_j` grows, so along the last axis
//! the feasible grid points form a prefix. The scan binary-searches that
//! prefix instead of testing every point; the sample it returns is the same
//! one a point-by-point scan would find.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{OptimizerOptions, Solution};
use crate::error::Result;
use crate::linalg::{dual_vectors, is_psd_within, CMatrix, DualSystem, StateEnsemble, C64};
use crate::povm::CoefficientVector;

pub const DEFAULT_ORACLE_RESOLUTION: usize = 200;
const REFINEMENT_FACTOR: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub solution: Solution,
    /// Upper bound on how far the true optimum's gain can exceed the
    /// coarse grid's best: `T sum_j b_j h_j` for cell widths `h_j`.
    pub resolution_bound: f64,
}

struct Grid<'a> {
    projectors: Vec<CMatrix>,
    b: &'a [f64],
    tol: f64,
}

impl Grid<'_> {
    fn feasible(&self, k: &[f64]) -> bool {
        let n = k.len();
        let mut a0 = CMatrix::identity(n, n);
        for (p, &kj) in self.projectors.iter().zip(k) {
            if kj != 0.0 {
                a0 -= p * C64::new(kj, 0.0);
            }
        }
        is_psd_within(&a0, self.tol)
    }

    fn gain(&self, k: &[f64]) -> f64 {
        k.iter().zip(self.b).map(|(a, c)| a * c).sum()
    }

    /// Best feasible point of the lattice `origin + i * step`, `i_j in 0..=counts_j`.
    fn scan(&self, origin: &[f64], step: &[f64], counts: &[usize]) -> Option<(f64, Vec<f64>)> {
        let n = origin.len();
        let last = n - 1;
        let outer: usize = counts[..last].iter().map(|c| c + 1).product();
        let point = |flat: usize, tail: usize| -> Vec<f64> {
            let mut rest = flat;
            let mut k = vec![0.0; n];
            for j in 0..last {
                let i = rest % (counts[j] + 1);
                rest /= counts[j] + 1;
                k[j] = origin[j] + i as f64 * step[j];
            }
            k[last] = origin[last] + tail as f64 * step[last];
            k
        };
        let visit = |flat: usize| -> Option<(f64, Vec<f64>)> {
            if !self.feasible(&point(flat, 0)) {
                return None;
            }
            let (mut lo, mut hi) = (0usize, counts[last]);
            if self.b[last] > 0.0 {
                while lo < hi {
                    let mid = (lo + hi).div_ceil(2);
                    if self.feasible(&point(flat, mid)) {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
            }
            let k = point(flat, lo);
            Some((self.gain(&k), k))
        };
        let pick = |a: Option<(f64, Vec<f64>)>, b: Option<(f64, Vec<f64>)>| match (a, b) {
            (Some(x), Some(y)) => Some(if y.0 > x.0 { y } else { x }),
            (x, None) => x,
            (None, y) => y,
        };
        #[cfg(feature = "parallel")]
        let best = (0..outer)
            .into_par_iter()
            .map(visit)
            .collect::<Vec<_>>()
            .into_iter()
            .fold(None, pick);
        #[cfg(not(feature = "parallel"))]
        let best = (0..outer).map(visit).fold(None, pick);
        best
    }
}

pub fn grid_oracle(ensemble: &StateEnsemble, resolution: usize) -> Result<OracleResult> {
    grid_oracle_with(ensemble, resolution, &OptimizerOptions::default())
}

pub fn grid_oracle_with(
    ensemble: &StateEnsemble,
    resolution: usize,
    options: &OptimizerOptions,
) -> Result<OracleResult> {
    let duals = dual_vectors(ensemble)?;
    let b: Vec<f64> = ensemble
        .priors()
        .iter()
        .zip(ensemble.values())
        .map(|(p, c)| p * c)
        .collect();
    let resolution = resolution.max(1);
    let n = duals.dim();
    let grid = Grid {
        projectors: projectors(&duals),
        b: &b,
        tol: options.psd_tolerance,
    };
    let step: Vec<f64> = (0..n)
        .map(|j| 1.0 / duals.norm_sqr(j) / resolution as f64)
        .collect();
    let (coarse_gain, coarse) = grid
        .scan(&vec![0.0; n], &step, &vec![resolution; n])
        .expect("the origin is always feasible");

    // One finer pass over the cells around the best coarse sample.
    let fine_step: Vec<f64> = step.iter().map(|h| h / REFINEMENT_FACTOR as f64).collect();
    let mut origin = vec![0.0; n];
    let mut counts = vec![0; n];
    for j in 0..n {
        let lo = (coarse[j] - step[j]).max(0.0);
        let hi = (coarse[j] + step[j]).min(step[j] * resolution as f64);
        origin[j] = lo;
        counts[j] = ((hi - lo) / fine_step[j]).round() as usize;
    }
    let best = match grid.scan(&origin, &fine_step, &counts) {
        Some((g, k)) if g > coarse_gain => k,
        _ => coarse,
    };

    let t = duals.gram_volume();
    let resolution_bound = t * step.iter().zip(&b).map(|(h, c)| h * c).sum::<f64>();
    let solution = Solution::evaluate(
        ensemble,
        &duals,
        CoefficientVector::new(best)?,
        options.psd_tolerance,
    )?;
    Ok(OracleResult {
        solution,
        resolution_bound,
    })
}

fn projectors(duals: &DualSystem) -> Vec<CMatrix> {
    let n = duals.dim();
    (0..n)
        .map(|j| {
            let v = duals.dual(j);
            CMatrix::from_fn(n, n, |r, c| v[r] * v[c].conj())
        })
        .collect()
}
