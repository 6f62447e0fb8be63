//! Points on the boundary `det(A_0) = 0` of the positivity domain, for
//! plotting and for geometric checks of the surface.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, DualSystem};
use crate::povm::{det_inconclusive, inconclusive_matrix, PSD_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub points: Vec<[f64; 3]>,
}

/// Solves `det(A_0) = 0` for coordinate `axis`, holding the others at `k`.
/// The determinant is affine in each coordinate, so there is at most one
/// root unless the whole line lies on the surface, in which case 0 is
/// returned.
pub fn solve_axis(duals: &DualSystem, k: &[f64], axis: usize) -> Option<f64> {
    let mut at = k.to_vec();
    at[axis] = 0.0;
    let alpha = det_inconclusive(duals, &at);
    at[axis] = 1.0;
    let beta = det_inconclusive(duals, &at) - alpha;
    if beta.abs() < 1e-14 {
        return (alpha.abs() < 1e-12).then_some(0.0);
    }
    Some(-alpha / beta)
}

/// For three states, the asymptote of the section `k_fixed = value` as
/// `k_infinite -> inf`: the remaining coordinate solving
/// `-|v_inf|^2 + T (k + value) - T^2 k value = 0`.
pub fn hyperbola_asymptote(
    duals: &DualSystem,
    infinite: usize,
    fixed: usize,
    value: f64,
) -> Result<Option<f64>> {
    if duals.dim() != 3 {
        return Err(Error::UnsupportedDimension {
            found: duals.dim(),
            reason: "hyperbolic sections are defined for three states",
        });
    }
    if infinite == fixed || infinite > 2 || fixed > 2 {
        return Err(Error::InvalidConfig(
            "section axes must be two distinct indices below 3".into(),
        ));
    }
    let t = duals.gram_volume();
    let denom = t - t * t * value;
    if denom.abs() < 1e-300 {
        return Ok(None);
    }
    Ok(Some((duals.norm_sqr(infinite) - t * value) / denom))
}

/// Boundary points over a `(resolution + 1)^2` grid of `(k1, k2)` spanning
/// the intercept box. Each grid node contributes the `k3 >= 0` that puts
/// it on the surface, if that point bounds the positivity domain.
pub fn surface_sample(duals: &DualSystem, resolution: usize) -> Result<SurfaceSample> {
    if duals.dim() != 3 {
        return Err(Error::UnsupportedDimension {
            found: duals.dim(),
            reason: "surface samples are produced for three states",
        });
    }
    let resolution = resolution.max(1);
    let box1 = 1.0 / duals.norm_sqr(0);
    let box2 = 1.0 / duals.norm_sqr(1);
    let mut points = Vec::new();
    for i in 0..=resolution {
        let k1 = box1 * i as f64 / resolution as f64;
        for j in 0..=resolution {
            let k2 = box2 * j as f64 / resolution as f64;
            let Some(k3) = solve_axis(duals, &[k1, k2, 0.0], 2) else {
                continue;
            };
            if k3 < -1e-12 {
                continue;
            }
            let p = [k1, k2, k3.max(0.0)];
            if min_eigenvalue(&inconclusive_matrix(duals, &p)) >= -PSD_TOLERANCE
                && det_inconclusive(duals, &p).abs() < 1e-8
            {
                points.push(p);
            }
        }
    }
    Ok(SurfaceSample { points })
}
