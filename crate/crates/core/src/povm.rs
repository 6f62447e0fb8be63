//! Construction of the measurement `{A_1..A_N, A_0}` from dual vectors and a
//! coefficient vector, outcome probabilities, and positivity of `A_0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, CMatrix, DualSystem, StateEnsemble, C64};

/// Default tolerance on the minimum eigenvalue of `A_0`.
pub const PSD_TOLERANCE: f64 = 1e-9;
/// Largest allowed gap between `k_j T` and the Born-rule detection probability.
pub const BORN_CONSISTENCY_TOLERANCE: f64 = 1e-8;
/// Largest allowed probability of detector `j` firing on input `i != j`.
pub const CROSS_DETECTION_TOLERANCE: f64 = 1e-10;

/// Non-negative detector weights `k_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefficientVector(Vec<f64>);

impl CoefficientVector {
    pub fn new(k: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = k
            .iter()
            .enumerate()
            .find(|(_, x)| !(x.is_finite() && **x >= 0.0))
        {
            return Err(Error::NegativeCoefficient { index, value });
        }
        Ok(Self(k))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for CoefficientVector {
    type Output = f64;
    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub matrix: CMatrix,
}

impl PovmElement {
    /// Born probability `<u, A u>`.
    pub fn probability(&self, u: &[C64]) -> f64 {
        let au = &self.matrix * nalgebra::DVector::from_column_slice(u);
        u.iter()
            .zip(au.iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .re
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PovmSet {
    pub detectors: Vec<PovmElement>,
    pub inconclusive: PovmElement,
    pub coefficients: CoefficientVector,
}

impl PovmSet {
    /// Largest entrywise deviation of `sum_j A_j + A_0` from the identity.
    pub fn completeness_residual(&self) -> f64 {
        let n = self.inconclusive.matrix.nrows();
        let mut total = self.inconclusive.matrix.clone();
        for d in &self.detectors {
            total += &d.matrix;
        }
        (total - CMatrix::identity(n, n))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

fn check_dims(duals: &DualSystem, k: usize) -> Result<()> {
    if duals.dim() != k {
        return Err(Error::DimensionMismatch {
            expected: duals.dim(),
            found: k,
        });
    }
    Ok(())
}

fn projector(v: &[C64], weight: f64) -> CMatrix {
    let n = v.len();
    CMatrix::from_fn(n, n, |r, c| v[r] * v[c].conj() * weight)
}

/// `1 - sum_j k_j |v_j><v_j|` for arbitrary real `k`.
pub fn inconclusive_matrix(duals: &DualSystem, k: &[f64]) -> CMatrix {
    let n = duals.dim();
    assert_eq!(
        k.len(),
        n,
        "coefficient vector length must match the dimension"
    );
    let mut a0 = CMatrix::identity(n, n);
    for (j, &kj) in k.iter().enumerate() {
        if kj != 0.0 {
            a0 -= projector(duals.dual(j), kj);
        }
    }
    a0
}

/// Detectors `A_j = k_j |v_j><v_j|` and `A_0 = 1 - sum_j A_j`. Positivity
/// of `A_0` is not checked here; see [`is_feasible`].
pub fn build_povm(duals: &DualSystem, k: &CoefficientVector) -> Result<PovmSet> {
    check_dims(duals, k.len())?;
    let detectors = k
        .as_slice()
        .iter()
        .enumerate()
        .map(|(j, &kj)| PovmElement {
            matrix: projector(duals.dual(j), kj),
        })
        .collect();
    Ok(PovmSet {
        detectors,
        inconclusive: PovmElement {
            matrix: inconclusive_matrix(duals, k.as_slice()),
        },
        coefficients: k.clone(),
    })
}

/// `det(1 - sum_j k_j |v_j><v_j|)`, evaluated directly. Accepts negative
/// coefficients so that the surface can be studied off the orthant.
///
/// # Panics
/// If `k.len()` differs from the dimension.
pub fn det_inconclusive(duals: &DualSystem, k: &[f64]) -> f64 {
    inconclusive_matrix(duals, k).determinant().re
}

/// The three-state polynomial
/// `1 - sum |v_j|^2 k_j + T (k1 k2 + k2 k3 + k3 k1) - T^2 k1 k2 k3`.
pub fn det_inconclusive_closed_form(duals: &DualSystem, k: &[f64]) -> Result<f64> {
    if duals.dim() != 3 {
        return Err(Error::UnsupportedDimension {
            found: duals.dim(),
            reason: "the closed-form determinant is defined for three states",
        });
    }
    check_dims(duals, k.len())?;
    let t = duals.gram_volume();
    let linear: f64 = (0..3).map(|j| duals.norm_sqr(j) * k[j]).sum();
    Ok(1.0 - linear + t * (k[0] * k[1] + k[1] * k[2] + k[2] * k[0]) - t * t * k[0] * k[1] * k[2])
}

/// Result of a positivity check on `A_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Feasibility {
    pub feasible: bool,
    pub min_eigenvalue: f64,
}

/// Full PSD test of the inconclusive element via its spectrum.
pub fn is_feasible(povm: &PovmSet, tol: f64) -> Feasibility {
    let min_eigenvalue = min_eigenvalue(&povm.inconclusive.matrix);
    Feasibility {
        feasible: min_eigenvalue >= -tol,
        min_eigenvalue,
    }
}

/// Outcome statistics of a feasible measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OutcomeProbabilities {
    /// `P_j = k_j T`: probability that input `j` is identified.
    pub detection: Vec<f64>,
    /// Prior-weighted probability of the inconclusive answer.
    pub inconclusive: f64,
    /// `<u_j, A_0 u_j>` for each input.
    pub inconclusive_given: Vec<f64>,
}

pub fn outcome_probabilities(
    ensemble: &StateEnsemble,
    duals: &DualSystem,
    k: &CoefficientVector,
) -> Result<OutcomeProbabilities> {
    check_dims(duals, ensemble.dim())?;
    let povm = build_povm(duals, k)?;
    let feas = is_feasible(&povm, PSD_TOLERANCE);
    if !feas.feasible {
        return Err(Error::Infeasible {
            min_eigenvalue: feas.min_eigenvalue,
        });
    }
    let t = duals.gram_volume();
    let detection: Vec<f64> = k.as_slice().iter().map(|kj| kj * t).collect();
    let weighted: f64 = k
        .as_slice()
        .iter()
        .zip(ensemble.priors())
        .map(|(kj, pj)| kj * pj)
        .sum();
    let inconclusive = 1.0 - t * weighted;

    for (i, u) in ensemble.states().iter().enumerate() {
        for (j, detector) in povm.detectors.iter().enumerate() {
            let born = detector.probability(u.components());
            if i == j {
                if (born - detection[j]).abs() > BORN_CONSISTENCY_TOLERANCE {
                    return Err(Error::Consistency(format!(
                        "detector {j}: Born probability {born} differs from k_j T = {}",
                        detection[j]
                    )));
                }
            } else if born.abs() > CROSS_DETECTION_TOLERANCE {
                return Err(Error::Consistency(format!(
                    "detector {j} fires on input {i} with probability {born:e}"
                )));
            }
        }
    }
    let inconclusive_given = ensemble
        .states()
        .iter()
        .map(|u| povm.inconclusive.probability(u.components()))
        .collect();
    Ok(OutcomeProbabilities {
        detection,
        inconclusive,
        inconclusive_given,
    })
}
