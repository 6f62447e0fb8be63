#![allow(dead_code)]

use nalgebra::DMatrix;
use povm_core::linalg::CMatrix;
use povm_core::{StateEnsemble, StateVector, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn gaussian(rng: &mut StdRng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn random_state(rng: &mut StdRng, n: usize) -> StateVector {
    let v = (0..n)
        .map(|_| C64::new(gaussian(rng), gaussian(rng)))
        .collect();
    StateVector::normalized(v).unwrap()
}

/// Random linearly independent states with gram volume above `min_volume`,
/// random priors and values in `[0.2, 2]`.
pub fn random_ensemble(rng: &mut StdRng, n: usize) -> StateEnsemble {
    loop {
        let states: Vec<_> = (0..n).map(|_| random_state(rng, n)).collect();
        let raw: Vec<f64> = (0..n).map(|_| 0.1 + rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let mut priors: Vec<f64> = raw.iter().map(|p| p / total).collect();
        let rest: f64 = priors[1..].iter().sum();
        priors[0] = 1.0 - rest;
        let values: Vec<f64> = (0..n).map(|_| 0.2 + 1.8 * rng.random::<f64>()).collect();
        if let Ok(e) = StateEnsemble::new(states, priors, values) {
            if povm_core::gram_data(&e).gram_volume > 1e-3 {
                return e;
            }
        }
    }
}

/// Random states with uniform priors and unit values.
pub fn random_uniform_ensemble(rng: &mut StdRng, n: usize) -> StateEnsemble {
    let e = random_ensemble(rng, n);
    StateEnsemble::uniform(e.states().to_vec()).unwrap()
}

pub fn random_unitary(rng: &mut StdRng, n: usize) -> CMatrix {
    let m = DMatrix::from_fn(n, n, |_, _| C64::new(gaussian(rng), gaussian(rng)));
    m.qr().q()
}

pub fn rotate(e: &StateEnsemble, u: &CMatrix) -> StateEnsemble {
    let states = e
        .states()
        .iter()
        .map(|s| {
            let v = u * nalgebra::DVector::from_column_slice(s.components());
            StateVector::normalized(v.iter().copied().collect()).unwrap()
        })
        .collect();
    StateEnsemble::new(states, e.priors().to_vec(), e.values().to_vec()).unwrap()
}

/// Random feasible coefficients: a random direction scaled inside the boundary.
pub fn random_feasible_k(rng: &mut StdRng, duals: &povm_core::DualSystem) -> Vec<f64> {
    let n = duals.dim();
    let dir: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let a = povm_core::povm::inconclusive_matrix(duals, &dir);
    // max eigenvalue of sum dir_j |v_j><v_j| = 1 - min eig of (1 - that)
    let load = 1.0 - povm_core::linalg::min_eigenvalue(&a);
    let scale = rng.random::<f64>() / load;
    dir.iter().map(|d| d * scale).collect()
}
