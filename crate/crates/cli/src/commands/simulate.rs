use std::fs;

use ssr_core::harness::{run_experiment_with_dump, HarnessConfig};

use crate::args::SimulateArgs;
use crate::error::{CliError, CliResult};
use crate::output::emit;

pub fn run(args: SimulateArgs) -> CliResult {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| ssr_core::Error::Io {
                path: p.clone(),
                source: e,
            })?;
            serde_json::from_str::<HarnessConfig>(&text).map_err(ssr_core::Error::from)?
        }
        None => HarnessConfig::default(),
    };
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.images {
        cfg.test_samples = v;
    }
    if let Some(v) = args.train_samples {
        cfg.train_samples = v;
    }
    if args.rho.is_empty() {
        return Err(CliError::usage("--rho needs at least one value"));
    }
    if let Some(dir) = &args.dump_heatmaps {
        fs::create_dir_all(dir).map_err(|e| ssr_core::Error::Io {
            path: dir.clone(),
            source: e,
        })?;
    }

    let table = run_experiment_with_dump(&cfg, &args.rho, args.dump_heatmaps.as_deref())?;
    if let Some(p) = &args.summary {
        emit(Some(p), &(table.to_json() + "\n"))?;
    }
    emit(args.out.as_deref(), &table.to_csv())
}
