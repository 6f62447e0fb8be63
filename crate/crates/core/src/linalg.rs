//! Complex vector primitives, Gram data, dual (reciprocal) vectors and the
//! triangular canonical basis for a set of linearly independent states.
//!
//! Inner products conjugate their first argument: `<a, b> = sum conj(a_i) b_i`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Maximum deviation of a state's norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Maximum deviation of the priors' sum from 1.
pub const PRIOR_SUM_TOLERANCE: f64 = 1e-12;
/// Ensembles whose gram volume falls below this are rejected as dependent.
pub const LINEAR_INDEPENDENCE_TOLERANCE: f64 = 1e-12;

/// A normalized pure state, stored as its components in a fixed basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVector(Vec<C64>);

impl StateVector {
    /// Wraps `components`, rejecting vectors whose norm is not 1.
    pub fn new(components: Vec<C64>) -> Result<Self> {
        let norm = norm(&components);
        if components.is_empty() || !((norm - 1.0).abs() <= NORM_TOLERANCE) {
            return Err(Error::NotNormalized { index: 0, norm });
        }
        Ok(Self(components))
    }

    /// Scales `components` to unit norm. Fails on the zero vector.
    pub fn normalized(mut components: Vec<C64>) -> Result<Self> {
        let n = norm(&components);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized { index: 0, norm: n });
        }
        components.iter_mut().for_each(|c| *c /= n);
        Ok(Self(components))
    }

    /// Builds a state from real components.
    pub fn from_real(components: &[f64]) -> Result<Self> {
        Self::new(components.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn components(&self) -> &[C64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }
}

impl AsRef<[C64]> for StateVector {
    fn as_ref(&self) -> &[C64] {
        &self.0
    }
}

/// `sum conj(a_i) b_i`.
pub fn inner_product(a: &[C64], b: &[C64]) -> Result<C64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// The signals to be discriminated: N states in an N-dimensional space,
/// their prior probabilities and the value attached to identifying each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateEnsemble {
    states: Vec<StateVector>,
    priors: Vec<f64>,
    values: Vec<f64>,
}

impl StateEnsemble {
    pub fn new(states: Vec<StateVector>, priors: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::EmptyEnsemble);
        }
        for (index, s) in states.iter().enumerate() {
            if s.dim() != n {
                return Err(Error::NotSquare {
                    expected: n,
                    found: s.dim(),
                });
            }
            let nrm = norm(s.components());
            if (nrm - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::NotNormalized { index, norm: nrm });
            }
        }
        if priors.len() != n {
            return Err(Error::InvalidPriors(format!(
                "expected {n} priors, found {}",
                priors.len()
            )));
        }
        if let Some((j, p)) = priors
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p > 0.0))
        {
            return Err(Error::InvalidPriors(format!(
                "prior {j} = {p} is not positive"
            )));
        }
        let sum: f64 = priors.iter().sum();
        if (sum - 1.0).abs() > PRIOR_SUM_TOLERANCE {
            return Err(Error::InvalidPriors(format!("priors sum to {sum}, not 1")));
        }
        if values.len() != n {
            return Err(Error::InvalidValues(format!(
                "expected {n} values, found {}",
                values.len()
            )));
        }
        if let Some((j, c)) = values
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.is_finite() && **c >= 0.0))
        {
            return Err(Error::InvalidValues(format!("value {j} = {c} is negative")));
        }
        let ensemble = Self {
            states,
            priors,
            values,
        };
        let gram = gram_data(&ensemble);
        if !(gram.gram_volume >= LINEAR_INDEPENDENCE_TOLERANCE) {
            return Err(Error::LinearDependence {
                gram_volume: gram.gram_volume,
                tolerance: LINEAR_INDEPENDENCE_TOLERANCE,
            });
        }
        Ok(ensemble)
    }

    /// Uniform priors and unit values.
    pub fn uniform(states: Vec<StateVector>) -> Result<Self> {
        let n = states.len().max(1);
        Self::new(states, vec![1.0 / n as f64; n], vec![1.0; n])
    }

    pub fn with_values(self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.states, self.priors, values)
    }

    pub fn with_priors(self, priors: Vec<f64>) -> Result<Self> {
        Self::new(self.states, priors, self.values)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Matrix whose row `i` holds the components of state `i`.
    pub fn state_matrix(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| self.states[i].components()[j])
    }
}

/// Pairwise overlaps `s_ij = <u_i, u_j>`, the determinant `D` of the
/// state-component matrix, and the gram volume `T = |D|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramData {
    pub overlaps: CMatrix,
    pub determinant: C64,
    pub gram_volume: f64,
}

pub fn gram_data(ensemble: &StateEnsemble) -> GramData {
    let u = ensemble.state_matrix();
    // s_ij = sum_k conj(u_ik) u_jk
    let overlaps = u.conjugate() * u.transpose();
    let determinant = u.determinant();
    GramData {
        overlaps,
        determinant,
        gram_volume: determinant.norm_sqr(),
    }
}

/// Closed-form gram volume of three states from their pairwise overlaps:
/// `1 + s12 s23 s31 + s13 s32 s21 - |s12|^2 - |s23|^2 - |s31|^2`.
pub fn three_state_gram_volume(overlaps: &CMatrix) -> Result<f64> {
    if overlaps.nrows() != 3 || overlaps.ncols() != 3 {
        return Err(Error::UnsupportedDimension {
            found: overlaps.nrows(),
            reason: "closed-form gram volume is defined for three states",
        });
    }
    let s = |i: usize, j: usize| overlaps[(i, j)];
    let value = C64::new(1.0, 0.0) + s(0, 1) * s(1, 2) * s(2, 0) + s(0, 2) * s(2, 1) * s(1, 0)
        - s(0, 1).norm_sqr()
        - s(1, 2).norm_sqr()
        - s(2, 0).norm_sqr();
    Ok(value.re)
}

/// Unnormalized vectors `v_j` with `<u_i, v_j> = delta_ij D`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSystem {
    duals: Vec<Vec<C64>>,
    dual_gram: CMatrix,
    pub gram: GramData,
}

impl DualSystem {
    pub fn dim(&self) -> usize {
        self.duals.len()
    }

    pub fn dual(&self, j: usize) -> &[C64] {
        &self.duals[j]
    }

    pub fn duals(&self) -> &[Vec<C64>] {
        &self.duals
    }

    /// `|v_j|^2`; its inverse is where the positivity surface cuts the `k_j` axis.
    pub fn norm_sqr(&self, j: usize) -> f64 {
        self.dual_gram[(j, j)].re
    }

    pub fn norms_sqr(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.norm_sqr(j)).collect()
    }

    /// `W_ij = <v_i, v_j>`.
    pub fn dual_gram(&self) -> &CMatrix {
        &self.dual_gram
    }

    pub fn gram_volume(&self) -> f64 {
        self.gram.gram_volume
    }

    /// Matrix whose column `j` is `v_j`.
    pub fn dual_matrix(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| self.duals[j][i])
    }
}

pub fn dual_vectors(ensemble: &StateEnsemble) -> Result<DualSystem> {
    let gram = gram_data(ensemble);
    if !(gram.gram_volume >= LINEAR_INDEPENDENCE_TOLERANCE) {
        return Err(Error::LinearDependence {
            gram_volume: gram.gram_volume,
            tolerance: LINEAR_INDEPENDENCE_TOLERANCE,
        });
    }
    let n = ensemble.dim();
    // conj(U) V^T = D I, so column j of D conj(U)^{-1} is v_j.
    let inverse = ensemble
        .state_matrix()
        .conjugate()
        .lu()
        .try_inverse()
        .ok_or(Error::LinearDependence {
            gram_volume: gram.gram_volume,
            tolerance: LINEAR_INDEPENDENCE_TOLERANCE,
        })?;
    let scaled = inverse * gram.determinant;
    let duals: Vec<Vec<C64>> = (0..n)
        .map(|j| scaled.column(j).iter().copied().collect())
        .collect();
    let v = CMatrix::from_fn(n, n, |i, j| duals[j][i]);
    let dual_gram = v.adjoint() * &v;
    Ok(DualSystem {
        duals,
        dual_gram,
        gram,
    })
}

/// Parameters of the three-state canonical form
/// `u1 = (1, 0, 0)`, `u2 = (a2, b2, 0)`, `u3 = (a3, b3 e^{i beta}, c3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeStateParameters {
    pub a2: f64,
    pub b2: f64,
    pub a3: f64,
    pub b3: f64,
    pub beta: f64,
    pub c3: f64,
}

/// States rewritten in the orthonormal basis obtained by Gram-Schmidt on
/// the states themselves, so state `j` only has components `0..=j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    pub reduced_states: Vec<StateVector>,
    /// Present for three states only.
    pub parameters: Option<ThreeStateParameters>,
}

/// Triangular components of `states` with a positive real diagonal.
/// Overlaps between the states are preserved.
fn triangular_components(states: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
    let n = states.len();
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut reduced = Vec::with_capacity(n);
    for (j, u) in states.iter().enumerate() {
        let mut row = vec![C64::new(0.0, 0.0); n];
        let mut residual = u.clone();
        for (i, e) in basis.iter().enumerate() {
            let c = inner_product(e, &residual)?;
            row[i] += c;
            residual.iter_mut().zip(e).for_each(|(r, ei)| *r -= c * ei);
        }
        let r = norm(&residual);
        if !(r > LINEAR_INDEPENDENCE_TOLERANCE.sqrt() * 1e-3) {
            return Err(Error::LinearDependence {
                gram_volume: 0.0,
                tolerance: LINEAR_INDEPENDENCE_TOLERANCE,
            });
        }
        residual.iter_mut().for_each(|x| *x /= r);
        // Components along earlier basis vectors, recomputed against the
        // original state to avoid accumulating round-off.
        for (i, e) in basis.iter().enumerate() {
            row[i] = inner_product(e, u)?;
        }
        row[j] = C64::new(inner_product(&residual, u)?.re, 0.0);
        basis.push(residual);
        reduced.push(row);
    }
    Ok(reduced)
}

pub fn canonical_reduce(ensemble: &StateEnsemble) -> Result<CanonicalForm> {
    let raw: Vec<Vec<C64>> = ensemble
        .states()
        .iter()
        .map(|s| s.components().to_vec())
        .collect();
    let reduced = triangular_components(&raw)?;
    let reduced_states = reduced
        .into_iter()
        .map(StateVector::normalized)
        .collect::<Result<Vec<_>>>()?;

    let parameters = if ensemble.dim() == 3 {
        // Global phases of u2 and u3 are physically irrelevant; fix them so
        // that the first components are real and non-negative.
        let first = &raw[0];
        let rephased: Vec<Vec<C64>> = raw
            .iter()
            .enumerate()
            .map(|(j, u)| {
                if j == 0 {
                    return Ok(u.clone());
                }
                let s = inner_product(first, u)?;
                let phase = if s.norm() > 0.0 {
                    s.conj() / s.norm()
                } else {
                    C64::new(1.0, 0.0)
                };
                Ok(u.iter().map(|c| c * phase).collect())
            })
            .collect::<Result<_>>()?;
        let t = triangular_components(&rephased)?;
        let (b3, beta) = t[2][1].to_polar();
        Some(ThreeStateParameters {
            a2: t[1][0].re,
            b2: t[1][1].re,
            a3: t[2][0].re,
            b3,
            beta,
            c3: t[2][2].re,
        })
    } else {
        None
    };
    Ok(CanonicalForm {
        reduced_states,
        parameters,
    })
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = m.nrows();
    let vectors = CMatrix::from_fn(n, order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Cheap PSD test: Cholesky of `m + tol I` with real positive pivots.
pub fn is_psd_within(m: &CMatrix, tol: f64) -> bool {
    let n = m.nrows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re + tol;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let pivot = d.sqrt();
        l[(j, j)] = C64::new(pivot, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / pivot;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{eq14, orthonormal as basis3, subspace};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inner_product_examples() {
        let e1 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let u2 = [c(0.6, 0.0), c(0.8, 0.0), c(0.0, 0.0)];
        let u3 = [c(0.5, 0.0), c(0.5, 0.5), c(0.5, 0.0)];
        assert!((inner_product(&e1, &u2).unwrap() - c(0.6, 0.0)).norm() < 1e-15);
        assert!((inner_product(&e1, &e1).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        // 0.6*0.5 + 0.8*(0.5+0.5i)
        assert!((inner_product(&u2, &u3).unwrap() - c(0.7, 0.4)).norm() < 1e-15);
        let back = inner_product(&u3, &u2).unwrap();
        assert!((back - c(0.7, -0.4)).norm() < 1e-15);
    }

    #[test]
    fn inner_product_rejects_mismatched_lengths() {
        let err = inner_product(&[c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn gram_examples() {
        let g = gram_data(&basis3());
        assert!((g.gram_volume - 1.0).abs() < 1e-15);

        let g = gram_data(&eq14());
        assert!((g.determinant - c(0.4, 0.0)).norm() < 1e-14);
        assert!((g.gram_volume - 0.16).abs() < 1e-14);
        let closed = three_state_gram_volume(&g.overlaps).unwrap();
        assert!((closed - g.gram_volume).abs() < 1e-12);

        let g = gram_data(&subspace());
        assert!((g.gram_volume - 0.64).abs() < 1e-14);
    }

    #[test]
    fn overlaps_are_hermitian_with_unit_diagonal() {
        let g = gram_data(&eq14());
        for i in 0..3 {
            assert!((g.overlaps[(i, i)] - c(1.0, 0.0)).norm() < 1e-14);
            for j in 0..3 {
                assert!((g.overlaps[(i, j)] - g.overlaps[(j, i)].conj()).norm() < 1e-15);
            }
        }
        assert!((g.overlaps[(1, 2)] - c(0.7, 0.4)).norm() < 1e-14);
    }

    #[test]
    fn duals_of_basis_are_the_basis() {
        let d = dual_vectors(&basis3()).unwrap();
        for j in 0..3 {
            for i in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((d.dual(j)[i] - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn eq14_duals() {
        let d = dual_vectors(&eq14()).unwrap();
        let v1 = [c(0.4, 0.0), c(-0.3, 0.0), c(-0.1, -0.3)];
        for (a, b) in d.dual(0).iter().zip(&v1) {
            assert!((a - b).norm() < 1e-14, "{a} vs {b}");
        }
        let norms = d.norms_sqr();
        for (n, e) in norms.iter().zip([0.35, 0.75, 0.64]) {
            assert!((n - e).abs() < 1e-14);
        }
    }

    #[test]
    fn subspace_duals() {
        let d = dual_vectors(&subspace()).unwrap();
        let expect = [[0.8, 0.0, 0.0], [0.0, 0.8, -0.6], [0.0, 0.0, 1.0]];
        for (j, row) in expect.iter().enumerate() {
            for (got, want) in d.dual(j).iter().zip(row) {
                assert!((got - c(*want, 0.0)).norm() < 1e-14);
            }
        }
        assert!((d.gram.determinant - c(0.8, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rejects_dependent_states() {
        let r = 0.5f64.sqrt();
        let err = StateEnsemble::uniform(vec![
            StateVector::from_real(&[1.0, 0.0, 0.0]).unwrap(),
            StateVector::from_real(&[0.0, 1.0, 0.0]).unwrap(),
            StateVector::from_real(&[r, r, 0.0]).unwrap(),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::LinearDependence { .. }));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            StateVector::from_real(&[1.0, 0.1]),
            Err(Error::NotNormalized { .. })
        ));
        let states = || {
            vec![
                StateVector::from_real(&[1.0, 0.0]).unwrap(),
                StateVector::from_real(&[0.6, 0.8]).unwrap(),
            ]
        };
        assert!(matches!(
            StateEnsemble::new(states(), vec![0.5, 0.6], vec![1.0, 1.0]),
            Err(Error::InvalidPriors(_))
        ));
        assert!(matches!(
            StateEnsemble::new(states(), vec![1.0, 0.0], vec![1.0, 1.0]),
            Err(Error::InvalidPriors(_))
        ));
        assert!(matches!(
            StateEnsemble::new(states(), vec![0.5, 0.5], vec![1.0, -1.0]),
            Err(Error::InvalidValues(_))
        ));
        assert!(matches!(
            StateEnsemble::new(states(), vec![0.5, 0.5], vec![1.0]),
            Err(Error::InvalidValues(_))
        ));
        let err =
            StateEnsemble::uniform(vec![StateVector::from_real(&[0.6, 0.8]).unwrap()]).unwrap_err();
        assert_eq!(
            err,
            Error::NotSquare {
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn canonical_form_of_eq14_is_itself() {
        let form = canonical_reduce(&eq14()).unwrap();
        let p = form.parameters.unwrap();
        assert!((p.a2 - 0.6).abs() < 1e-14);
        assert!((p.b2 - 0.8).abs() < 1e-14);
        assert!((p.a3 - 0.5).abs() < 1e-14);
        assert!((p.b3 - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((p.beta - std::f64::consts::FRAC_PI_4).abs() < 1e-14);
        assert!((p.c3 - 0.5).abs() < 1e-14);
        for (r, s) in form.reduced_states.iter().zip(eq14().states()) {
            for (a, b) in r.components().iter().zip(s.components()) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn canonical_form_of_basis() {
        let p = canonical_reduce(&basis3()).unwrap().parameters.unwrap();
        assert_eq!((p.a2, p.a3, p.b3), (0.0, 0.0, 0.0));
        assert!((p.b2 - 1.0).abs() < 1e-15 && (p.c3 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_form_general_n_has_no_parameters() {
        let states = vec![
            StateVector::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap(),
            StateVector::from_real(&[0.0, 0.6, 0.8, 0.0]).unwrap(),
            StateVector::from_real(&[0.0, 0.0, 0.6, 0.8]).unwrap(),
            StateVector::from_real(&[0.5, 0.5, 0.5, 0.5]).unwrap(),
        ];
        let form = canonical_reduce(&StateEnsemble::uniform(states).unwrap()).unwrap();
        assert!(form.parameters.is_none());
        for (j, s) in form.reduced_states.iter().enumerate() {
            assert!(s.components()[j].im == 0.0 && s.components()[j].re > 0.0);
            assert!(s.components()[j + 1..].iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn eigen_helpers() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let (vals, _) = hermitian_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        assert!((min_eigenvalue(&m) - 1.0).abs() < 1e-14);
        assert!((max_eigenvalue(&m) - 3.0).abs() < 1e-14);
        assert!(is_psd_within(&m, 0.0));
        let neg = CMatrix::from_row_slice(1, 1, &[c(-1e-6, 0.0)]);
        assert!(!is_psd_within(&neg, 1e-9));
        assert!(is_psd_within(&neg, 1e-5));
    }
}
