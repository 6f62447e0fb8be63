//! Reading problem files from disk.

use std::path::Path;

use povm_core::{InputOptions, ProblemFile, StateEnsemble};

use crate::CliError;

pub fn parse_problem(text: &str) -> Result<ProblemFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed problem file: {e}")))
}

pub fn read_problem(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_problem(&text)
}

pub fn load_ensemble(path: &Path, options: &InputOptions) -> Result<StateEnsemble, CliError> {
    Ok(read_problem(path)?.to_ensemble(options)?)
}
