//! Reference ensembles used by the tests, the CLI fixtures and the demo.

use crate::linalg::{StateEnsemble, StateVector, C64};

fn real(components: &[f64]) -> StateVector {
    StateVector::from_real(components).expect("fixture states are normalized")
}

/// `u1 = (1,0,0)`, `u2 = (0.6,0.8,0)`, `u3 = (0.5, 0.5+0.5i, 0.5)` with
/// uniform priors and unit values.
pub fn eq14() -> StateEnsemble {
    let u3 = StateVector::new(vec![
        C64::new(0.5, 0.0),
        C64::new(0.5, 0.5),
        C64::new(0.5, 0.0),
    ])
    .expect("fixture states are normalized");
    StateEnsemble::uniform(vec![real(&[1.0, 0.0, 0.0]), real(&[0.6, 0.8, 0.0]), u3])
        .expect("fixture ensemble is valid")
}

/// [`eq14`] with signal values `(0.8, 1.2, 1)`.
pub fn eq14_weighted() -> StateEnsemble {
    eq14()
        .with_values(vec![0.8, 1.2, 1.0])
        .expect("fixture ensemble is valid")
}

/// The standard basis of a three-dimensional space.
pub fn orthonormal() -> StateEnsemble {
    StateEnsemble::uniform(vec![
        real(&[1.0, 0.0, 0.0]),
        real(&[0.0, 1.0, 0.0]),
        real(&[0.0, 0.0, 1.0]),
    ])
    .expect("fixture ensemble is valid")
}

/// `u1` orthogonal to `u2` and `u3`, with `<u2, u3> = 0.6`.
pub fn subspace() -> StateEnsemble {
    StateEnsemble::uniform(vec![
        real(&[1.0, 0.0, 0.0]),
        real(&[0.0, 1.0, 0.0]),
        real(&[0.0, 0.6, 0.8]),
    ])
    .expect("fixture ensemble is valid")
}

/// Two equiprobable real qubit states with the given overlap.
pub fn qubit_pair(overlap: f64) -> StateEnsemble {
    let s = (1.0 - overlap * overlap).sqrt();
    StateEnsemble::uniform(vec![real(&[1.0, 0.0]), real(&[overlap, s])])
        .expect("fixture ensemble is valid")
}
