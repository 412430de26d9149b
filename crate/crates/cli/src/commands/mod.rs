pub mod evaluate;
pub mod measure;
pub mod prompts;
pub mod refine;
pub mod simulate;

use crate::error::{CliError, CliResult};

/// Converts a 1-based landmark pair from the command line to zero-based.
pub(crate) fn landmark_pair(pair: &[usize]) -> CliResult<(usize, usize)> {
    match pair {
        [a, b] if *a >= 1 && *b >= 1 && a != b => Ok((a - 1, b - 1)),
        _ => Err(CliError::usage(format!(
            "--pair needs two distinct 1-based landmark numbers, got {pair:?}"
        ))),
    }
}
