use std::collections::HashSet;

use ssr_core::io::{load_fold_spec, load_landmark_table};
use ssr_core::metrics::{evaluate, EvaluateOptions, FoldSelection, StdConvention};
use ssr_core::ScaleConfig;

use super::landmark_pair;
use crate::args::{EvaluateArgs, StdArg};
use crate::error::{CliError, CliResult};
use crate::output::emit;

pub fn run(args: EvaluateArgs) -> CliResult {
    let opts = EvaluateOptions {
        scale: ScaleConfig::new(args.mm_per_pixel)?,
        joint: landmark_pair(&args.pair)?,
        std_convention: match args.std {
            StdArg::Population => StdConvention::Population,
            StdArg::Sample => StdConvention::Sample,
        },
    };
    let preds = load_landmark_table(&args.pred)?;
    // Ground truth usually covers the whole dataset; keep the predicted images.
    let predicted: HashSet<&str> = preds.iter().map(|p| p.image_id.as_str()).collect();
    let gts: Vec<_> = load_landmark_table(&args.gt)?
        .into_iter()
        .filter(|g| predicted.contains(g.image_id.as_str()))
        .collect();

    let mut folds = Vec::with_capacity(args.folds.len());
    for path in &args.folds {
        let spec = load_fold_spec(path)?;
        let image_ids = spec.test_images(preds.iter().map(|p| p.image_id.as_str()), args.participant_delimiter);
        if image_ids.is_empty() {
            return Err(CliError::new(
                "invalid-input",
                format!("fold {} ({}): no predicted image belongs to its test participants", spec.fold, path.display()),
            ));
        }
        folds.push(FoldSelection {
            fold: spec.fold.to_string(),
            image_ids,
        });
    }

    let report = evaluate(&preds, &gts, &folds, &opts)?;
    if let Some(p) = &args.out_csv {
        emit(Some(p), &report.to_csv())?;
    }
    if args.out_json.is_some() || args.out_csv.is_none() {
        let mut json = serde_json::to_string_pretty(&report).map_err(ssr_core::Error::from)?;
        json.push('\n');
        emit(args.out_json.as_deref(), &json)?;
    }
    Ok(())
}
