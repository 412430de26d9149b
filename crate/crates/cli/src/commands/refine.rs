use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use ssr_core::io::{load_heatmaps, load_landmark_table, load_run_config, write_landmark_table, RunConfig};
use ssr_core::{
    decode_landmarks, refine_landmarks, Dims, LandmarkSet, Point2, ReferenceBank, ScaleConvention,
};

use crate::args::{ConventionArg, RefineArgs};
use crate::error::{CliError, CliResult};
use crate::output::{emit, warn};

pub fn run(args: RefineArgs) -> CliResult {
    let cfg = resolve_config(&args)?;
    let image = cfg.image.ok_or_else(|| {
        CliError::usage("image size unknown; pass --image-width and --image-height or set `image` in the config")
    })?;

    let mut inputs: Vec<(String, PathBuf)> = cfg
        .paths
        .heatmaps
        .iter()
        .map(|p| Ok((image_id_of(p)?, p.clone())))
        .collect::<CliResult<_>>()?;
    if inputs.is_empty() {
        return Err(CliError::usage("no heatmap files given"));
    }
    inputs.sort();
    let mut seen = HashSet::new();
    if let Some((id, _)) = inputs.iter().find(|(id, _)| !seen.insert(id.as_str())) {
        return Err(CliError::new("duplicate-key", format!("two heatmap files map to image_id {id}")));
    }

    let bank = if cfg.ssr.enabled {
        let reference = cfg.paths.reference.as_ref().ok_or_else(|| {
            CliError::usage("SSR needs --reference (or paths.reference); use --no-ssr for plain decoding")
        })?;
        let training: Vec<Vec<Point2>> =
            load_landmark_table(reference)?.into_iter().map(|l| l.points).collect();
        let shared = if cfg.ssr.resample_bank_per_image {
            None
        } else {
            Some(build_bank(&training, &cfg, cfg.ssr.seed)?)
        };
        Some((training, shared))
    } else {
        None
    };

    let results: Vec<(String, ssr_core::Result<LandmarkSet>)> = inputs
        .par_iter()
        .enumerate()
        .map(|(pos, (id, path))| {
            let res = load_heatmaps(path).and_then(|h| {
                let refined = match &bank {
                    None => decode_landmarks(&h, &cfg.decode, image)?,
                    Some((_, Some(shared))) => {
                        refine_landmarks(&h, &cfg.decode, shared, image, cfg.ssr.combination_budget)?
                    }
                    Some((training, None)) => {
                        let own = build_bank(training, &cfg, image_seed(cfg.ssr.seed, pos))?;
                        refine_landmarks(&h, &cfg.decode, &own, image, cfg.ssr.combination_budget)?
                    }
                };
                for (k, &flat) in refined.no_peak.iter().enumerate() {
                    if flat {
                        log::warn!("{id}: landmark {} has a flat heatmap", k + 1);
                    }
                }
                Ok(LandmarkSet::new(id.clone(), refined.points))
            });
            (id.clone(), res)
        })
        .collect();

    let mut done = Vec::with_capacity(results.len());
    let mut failed = 0;
    for (id, res) in results {
        match res {
            Ok(set) => done.push(set),
            Err(e) => {
                failed += 1;
                warn(e.code(), format!("{id}: {e}"));
            }
        }
    }
    if !done.is_empty() {
        let mut buf = Vec::new();
        write_landmark_table(&mut buf, &done)?;
        emit(cfg.paths.output.as_deref(), &String::from_utf8(buf).expect("CSV is UTF-8"))?;
    }
    if failed > 0 {
        return Err(CliError::new(
            "partial-failure",
            format!("{failed} of {} images failed", inputs.len()),
        ));
    }
    Ok(())
}

fn resolve_config(args: &RefineArgs) -> CliResult<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => load_run_config(p)?,
        None => RunConfig::default(),
    };
    if !args.heatmaps.is_empty() {
        cfg.paths.heatmaps = args.heatmaps.clone();
    }
    if let Some(p) = &args.reference {
        cfg.paths.reference = Some(p.clone());
    }
    if let Some(p) = &args.out {
        cfg.paths.output = Some(p.clone());
    }
    match (args.image_width, args.image_height) {
        (Some(width), Some(height)) => cfg.image = Some(Dims::new(width, height)),
        (None, None) => {}
        _ => return Err(CliError::usage("--image-width and --image-height go together")),
    }
    if args.no_ssr {
        cfg.ssr.enabled = false;
    }
    if args.resample_bank_per_image {
        cfg.ssr.resample_bank_per_image = true;
    }
    if let Some(v) = args.sampling_fraction {
        cfg.ssr.sampling_fraction = v;
    }
    if let Some(v) = args.seed {
        cfg.ssr.seed = v;
    }
    if let Some(v) = args.budget {
        cfg.ssr.combination_budget = v;
    }
    if let Some(v) = args.value_ratio {
        cfg.decode.value_ratio = v;
    }
    if let Some(v) = args.min_distance {
        cfg.decode.min_distance = v;
    }
    if let Some(v) = args.max_candidates {
        cfg.decode.max_candidates = v;
    }
    if let Some(c) = args.scale_convention {
        cfg.decode.scale_convention = match c {
            ConventionArg::Unbiased => ScaleConvention::Unbiased,
            ConventionArg::Ratio => ScaleConvention::Ratio,
        };
    }
    cfg.validate()?;
    cfg.check_paths()?;
    Ok(cfg)
}

fn build_bank(training: &[Vec<Point2>], cfg: &RunConfig, seed: u64) -> ssr_core::Result<ReferenceBank> {
    ReferenceBank::build_with_tolerance(training, cfg.ssr.sampling_fraction, seed, cfg.ssr.rank_tolerance)
}

/// Seed for the bank of the image at `pos` in image_id order.
fn image_seed(seed: u64, pos: usize) -> u64 {
    seed ^ (pos as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn image_id_of(path: &Path) -> CliResult<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .ok_or_else(|| CliError::new("invalid-input", format!("{}: no usable file name", path.display())))
}
