//! Browser bindings. Every export takes a problem as JSON text (the same
//! format the command-line tool reads) and returns JSON text.

use povm_core::{
    build_povm, dual_vectors, optimize, posterior_report, run_simulation, surface_sample,
    InputOptions, PosteriorReport, ProblemFile, SimulationConfig, SimulationReport, Solution,
    StateEnsemble,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest surface grid the page may request; keeps the UI responsive.
pub const MAX_RESOLUTION: usize = 400;
pub const MAX_TRIALS: u64 = 2_000_000;

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveResult {
    pub solution: Solution,
    pub gram_volume: f64,
    pub dual_norms_squared: Vec<f64>,
    pub posterior: PosteriorReport,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SurfaceResult {
    /// Axis intercepts `1 / |v_j|^2`.
    pub intercepts: Vec<f64>,
    pub points: Vec<[f64; 3]>,
    pub optimum: Vec<f64>,
}

fn ensemble(problem_json: &str) -> Result<StateEnsemble, String> {
    let problem: ProblemFile =
        serde_json::from_str(problem_json).map_err(|e| format!("malformed problem: {e}"))?;
    problem
        .to_ensemble(&InputOptions::default())
        .map_err(|e| e.to_string())
}

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

pub fn solve_json(problem_json: &str) -> Result<String, String> {
    let e = ensemble(problem_json)?;
    let duals = dual_vectors(&e).map_err(|e| e.to_string())?;
    let solution = optimize(&e).map_err(|e| e.to_string())?;
    let povm = build_povm(&duals, &solution.k).map_err(|e| e.to_string())?;
    let posterior = posterior_report(&e, &povm).map_err(|e| e.to_string())?;
    json(&SolveResult {
        solution,
        gram_volume: duals.gram_volume(),
        dual_norms_squared: duals.norms_sqr(),
        posterior,
    })
}

pub fn surface_json(problem_json: &str, resolution: usize) -> Result<String, String> {
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(format!("resolution must be between 1 and {MAX_RESOLUTION}"));
    }
    let e = ensemble(problem_json)?;
    let duals = dual_vectors(&e).map_err(|e| e.to_string())?;
    let sample = surface_sample(&duals, resolution).map_err(|e| e.to_string())?;
    let optimum = optimize(&e).map_err(|e| e.to_string())?;
    json(&SurfaceResult {
        intercepts: duals.norms_sqr().iter().map(|n| 1.0 / n).collect(),
        points: sample.points,
        optimum: optimum.k.as_slice().to_vec(),
    })
}

pub fn simulate_json(
    problem_json: &str,
    trials: u64,
    seed: u64,
    split: bool,
) -> Result<String, String> {
    if trials > MAX_TRIALS {
        return Err(format!("at most {MAX_TRIALS} trials"));
    }
    let e = ensemble(problem_json)?;
    let duals = dual_vectors(&e).map_err(|e| e.to_string())?;
    let solution = optimize(&e).map_err(|e| e.to_string())?;
    let povm = build_povm(&duals, &solution.k).map_err(|e| e.to_string())?;
    let config = SimulationConfig::new(trials, seed, split).map_err(|e| e.to_string())?;
    let report: SimulationReport = run_simulation(&e, &povm, &config).map_err(|e| e.to_string())?;
    json(&report)
}

/// Optimal coefficients plus the posterior analysis of the inconclusive outcome.
#[wasm_bindgen]
pub fn solve(problem_json: &str) -> Result<String, JsError> {
    solve_json(problem_json).map_err(|e| JsError::new(&e))
}

/// Boundary of the positivity domain (three states only) and the optimum on it.
#[wasm_bindgen]
pub fn surface(problem_json: &str, resolution: usize) -> Result<String, JsError> {
    surface_json(problem_json, resolution).map_err(|e| JsError::new(&e))
}

/// Monte Carlo run of the optimal measurement. The seed arrives as an f64
/// from JavaScript and is truncated.
#[wasm_bindgen]
pub fn simulate(
    problem_json: &str,
    trials: u32,
    seed: f64,
    split: bool,
) -> Result<String, JsError> {
    simulate_json(problem_json, u64::from(trials), seed.max(0.0) as u64, split)
        .map_err(|e| JsError::new(&e))
}
