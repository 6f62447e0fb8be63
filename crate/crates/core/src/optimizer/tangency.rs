//! Tangency between the level planes `sum_j b_j k_j = X` and the surface
//! `det(A_0) = 0`, restricted to a face of the orthant.
//!
//! On a face with free indices `F` the determinant reduces to
//! `det(1 - diag(k_F) W_FF)` where `W_ij = <v_i, v_j>`. This is affine in
//! each `k_j` separately, so its gradient and Hessian are exact finite
//! differences at `k_j in {0, 1}`.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{max_eigenvalue, CMatrix, C64};

/// Couplings below this (relative to `sqrt(W_ii W_jj)`) split a face into
/// independent blocks.
pub(crate) const COUPLING_TOLERANCE: f64 = 1e-12;
pub(crate) const NEWTON_TOLERANCE: f64 = 1e-12;
pub(crate) const NEWTON_MAX_ITERATIONS: usize = 100;
const ROOT_ACCEPT_TOLERANCE: f64 = 1e-10;
const DUPLICATE_TOLERANCE: f64 = 1e-8;

/// `det(1 - diag(x) w)`.
pub(crate) fn reduced_det(w: &CMatrix, x: &[f64]) -> f64 {
    let m = x.len();
    match m {
        0 => 1.0,
        1 => 1.0 - x[0] * w[(0, 0)].re,
        _ => {
            let a = CMatrix::from_fn(m, m, |r, c| {
                let id = if r == c { 1.0 } else { 0.0 };
                C64::new(id, 0.0) - w[(r, c)] * x[r]
            });
            a.determinant().re
        }
    }
}

fn with(x: &[f64], assignments: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(i, v) in assignments {
        y[i] = v;
    }
    y
}

pub(crate) fn gradient(w: &CMatrix, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| reduced_det(w, &with(x, &[(j, 1.0)])) - reduced_det(w, &with(x, &[(j, 0.0)])))
        .collect()
}

pub(crate) fn hessian(w: &CMatrix, x: &[f64]) -> DMatrix<f64> {
    let m = x.len();
    let mut h = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i + 1..m {
            let f = |a: f64, b: f64| reduced_det(w, &with(x, &[(i, a), (j, b)]));
            let v = f(1.0, 1.0) - f(1.0, 0.0) - f(0.0, 1.0) + f(0.0, 0.0);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// Largest eigenvalue of `diag(x)^(1/2) w diag(x)^(1/2)`; the point `x >= 0`
/// is feasible iff this is at most one.
pub(crate) fn spectral_load(w: &CMatrix, x: &[f64]) -> f64 {
    let m = x.len();
    let s: Vec<f64> = x.iter().map(|v| v.max(0.0).sqrt()).collect();
    let scaled = CMatrix::from_fn(m, m, |r, c| w[(r, c)] * (s[r] * s[c]));
    max_eigenvalue(&scaled)
}

/// Principal submatrix of `w` on `indices`.
pub(crate) fn submatrix(w: &CMatrix, indices: &[usize]) -> CMatrix {
    let m = indices.len();
    CMatrix::from_fn(m, m, |r, c| w[(indices[r], indices[c])])
}

/// Connected components of the coupling graph of `w` restricted to `free`.
pub(crate) fn blocks(w: &CMatrix, free: &[usize]) -> Vec<Vec<usize>> {
    let mut component = vec![usize::MAX; free.len()];
    let mut out = Vec::new();
    for start in 0..free.len() {
        if component[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![];
        let mut stack = vec![start];
        component[start] = id;
        while let Some(a) = stack.pop() {
            members.push(free[a]);
            for b in 0..free.len() {
                if component[b] != usize::MAX {
                    continue;
                }
                let (i, j) = (free[a], free[b]);
                let scale = (w[(i, i)].re * w[(j, j)].re).sqrt();
                if w[(i, j)].norm() > COUPLING_TOLERANCE * scale {
                    component[b] = id;
                    stack.push(b);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

fn push_unique(roots: &mut Vec<Vec<f64>>, x: Vec<f64>) {
    if x.iter().any(|v| !v.is_finite()) {
        return;
    }
    let duplicate = roots.iter().any(|r| {
        r.iter()
            .zip(&x)
            .all(|(a, b)| (a - b).abs() <= DUPLICATE_TOLERANCE * (1.0 + a.abs()))
    });
    if !duplicate {
        roots.push(x);
    }
}

/// Real roots of `a t^2 + b t + c`, smaller first.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![];
    }
    if a.abs() <= 1e-14 * scale {
        return if b.abs() > 1e-14 * scale {
            vec![-c / b]
        } else {
            vec![]
        };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc > -1e-14 * b * b {
            return vec![-b / (2.0 * a)];
        }
        return vec![];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut r = if q == 0.0 {
        vec![0.0, 0.0]
    } else {
        vec![q / a, c / q]
    };
    r.sort_by(f64::total_cmp);
    r
}

/// Closed-form tangency for two coupled coordinates:
/// `f = 1 - w00 x - w11 y + c x y` with `c = w00 w11 - |w01|^2`.
fn pair_roots(w: &CMatrix, b: &[f64]) -> Vec<Vec<f64>> {
    let (w0, w1) = (w[(0, 0)].re, w[(1, 1)].re);
    let c = w0 * w1 - w[(0, 1)].norm_sqr();
    let mut roots = Vec::new();
    // grad f = (c y - w0, c x - w1) parallel to b:
    //   b1 (c y - w0) = b0 (c x - w1)
    if b[1] != 0.0 {
        // y = r x + s
        let r = b[0] / b[1];
        let s = (b[1] * w0 - b[0] * w1) / (c * b[1]);
        for x in quadratic_roots(c * r, c * s - w0 - w1 * r, 1.0 - w1 * s) {
            push_unique(&mut roots, vec![x, r * x + s]);
        }
    } else if b[0] != 0.0 {
        let x = w1 / c;
        let slope = c * x - w1;
        if slope.abs() > 0.0 {
            push_unique(&mut roots, vec![x, -(1.0 - w0 * x) / slope]);
        }
    }
    roots
}

/// Newton iteration on `(x, mu)` for `grad f(x) = mu b`, `f(x) = 0`.
fn newton(w: &CMatrix, b: &[f64], start: &[f64]) -> Option<Vec<f64>> {
    let m = start.len();
    let mut x = start.to_vec();
    let g = gradient(w, &x);
    let bb: f64 = b.iter().map(|v| v * v).sum();
    let mut mu = g.iter().zip(b).map(|(a, c)| a * c).sum::<f64>() / bb;

    let residual = |x: &[f64], mu: f64| -> (Vec<f64>, f64) {
        let g = gradient(w, x);
        let mut r: Vec<f64> = g.iter().zip(b).map(|(gi, bi)| gi - mu * bi).collect();
        r.push(reduced_det(w, x));
        let norm = r.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        (r, norm)
    };

    let (mut r, mut norm) = residual(&x, mu);
    for _ in 0..NEWTON_MAX_ITERATIONS {
        if norm < NEWTON_TOLERANCE {
            break;
        }
        let g = gradient(w, &x);
        let h = hessian(w, &x);
        let mut jac = DMatrix::zeros(m + 1, m + 1);
        jac.view_mut((0, 0), (m, m)).copy_from(&h);
        for i in 0..m {
            jac[(i, m)] = -b[i];
            jac[(m, i)] = g[i];
        }
        let rhs = -DVector::from_vec(r.clone());
        let step = jac.lu().solve(&rhs)?;
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = (0..m).map(|i| x[i] + alpha * step[i]).collect();
            let trial_mu = mu + alpha * step[m];
            let (tr, tn) = residual(&trial, trial_mu);
            if tn < norm || alpha < 1e-8 {
                x = trial;
                mu = trial_mu;
                r = tr;
                norm = tn;
                break;
            }
            alpha *= 0.5;
        }
    }
    (norm < ROOT_ACCEPT_TOLERANCE).then_some(x)
}

/// Newton starting points: the centroid of the intercept box and the
/// non-trivial corners of the half box, each pushed radially onto the
/// positivity boundary.
fn starts(w: &CMatrix) -> Vec<Vec<f64>> {
    let m = w.nrows();
    let half: Vec<f64> = (0..m).map(|j| 0.5 / w[(j, j)].re).collect();
    let mut pts = vec![half.clone()];
    for mask in 1usize..(1 << m) {
        pts.push(
            (0..m)
                .map(|j| if mask >> j & 1 == 1 { half[j] } else { 0.0 })
                .collect(),
        );
    }
    pts.into_iter()
        .map(|p| {
            let load = spectral_load(w, &p);
            p.into_iter().map(|v| v / load).collect()
        })
        .collect()
}

/// All tangency roots found for one coupled block, regardless of sign.
pub(crate) fn block_roots(w: &CMatrix, b: &[f64]) -> Vec<Vec<f64>> {
    let m = w.nrows();
    let bmax = b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if bmax == 0.0 {
        return vec![];
    }
    let b: Vec<f64> = b.iter().map(|v| v / bmax).collect();
    match m {
        0 => vec![],
        1 => vec![vec![1.0 / w[(0, 0)].re]],
        2 => pair_roots(w, &b),
        _ => {
            let mut roots = Vec::new();
            for s in starts(w) {
                if let Some(x) = newton(w, &b, &s) {
                    push_unique(&mut roots, x);
                }
            }
            roots
        }
    }
}
