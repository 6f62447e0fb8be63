//! Problem files: the states as `[re, im]` component pairs, with optional
//! priors (default uniform) and values (default 1). Format-agnostic: any
//! serde format that maps a complex number to `[re, im]` works.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, StateEnsemble, StateVector, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub states: Vec<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputOptions {
    /// Largest accepted deviation of a state's norm (or the priors' sum) from 1.
    pub norm_tolerance: f64,
    /// Rescale states of any nonzero norm instead of rejecting them.
    pub normalize: bool,
}

impl Default for InputOptions {
    fn default() -> Self {
        Self {
            norm_tolerance: 1e-6,
            normalize: false,
        }
    }
}

impl ProblemFile {
    /// Validates the file and builds the ensemble. Norms and the priors'
    /// sum within `norm_tolerance` of 1 are rescaled exactly.
    pub fn to_ensemble(&self, options: &InputOptions) -> Result<StateEnsemble> {
        let n = self.states.len();
        if n == 0 {
            return Err(Error::MalformedInput(
                "states: expected at least one state".into(),
            ));
        }
        let mut states = Vec::with_capacity(n);
        for (i, s) in self.states.iter().enumerate() {
            if s.len() != n {
                return Err(Error::MalformedInput(format!(
                    "states[{i}]: expected {n} components (one per state), found {}",
                    s.len()
                )));
            }
            if s.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err(Error::MalformedInput(format!(
                    "states[{i}]: non-finite component"
                )));
            }
            let norm = norm(s);
            if !options.normalize && (norm - 1.0).abs() > options.norm_tolerance {
                return Err(Error::MalformedInput(format!(
                    "states[{i}]: norm {norm} differs from 1 by more than {} (use --normalize to rescale)",
                    options.norm_tolerance
                )));
            }
            states.push(
                StateVector::normalized(s.clone())
                    .map_err(|_| Error::MalformedInput(format!("states[{i}]: zero vector")))?,
            );
        }

        let priors = match &self.priors {
            None => vec![1.0 / n as f64; n],
            Some(p) => {
                if p.len() != n {
                    return Err(Error::MalformedInput(format!(
                        "priors: expected {n} entries, found {}",
                        p.len()
                    )));
                }
                if let Some((j, v)) = p
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !(v.is_finite() && **v > 0.0))
                {
                    return Err(Error::MalformedInput(format!(
                        "priors[{j}]: {v} is not positive"
                    )));
                }
                let sum: f64 = p.iter().sum();
                if (sum - 1.0).abs() > options.norm_tolerance {
                    return Err(Error::MalformedInput(format!(
                        "priors: sum is {sum}, not 1"
                    )));
                }
                let mut p: Vec<f64> = p.iter().map(|v| v / sum).collect();
                let rest: f64 = p[1..].iter().sum();
                p[0] = 1.0 - rest;
                p
            }
        };

        let values = match &self.values {
            None => vec![1.0; n],
            Some(v) => {
                if v.len() != n {
                    return Err(Error::MalformedInput(format!(
                        "values: expected {n} entries, found {}",
                        v.len()
                    )));
                }
                if let Some((j, x)) = v
                    .iter()
                    .enumerate()
                    .find(|(_, x)| !(x.is_finite() && **x >= 0.0))
                {
                    return Err(Error::MalformedInput(format!(
                        "values[{j}]: {x} is negative"
                    )));
                }
                v.clone()
            }
        };
        StateEnsemble::new(states, priors, values)
    }
}
