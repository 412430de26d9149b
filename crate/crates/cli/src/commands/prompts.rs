use std::fs;

use ssr_core::io::load_landmark_table;
use ssr_core::generate_prompts;

use crate::args::PromptsArgs;
use crate::error::{CliError, CliResult};
use crate::output::{emit, warn};

pub fn run(args: PromptsArgs) -> CliResult {
    let mut sets = load_landmark_table(&args.landmarks)?;
    if let Some(id) = &args.image {
        sets.retain(|s| &s.image_id == id);
        if sets.is_empty() {
            return Err(CliError::new("invalid-input", format!("image {id} not found")));
        }
    }

    let mut prompts = Vec::with_capacity(sets.len());
    for s in &sets {
        let p = generate_prompts(s)?;
        for w in &p.warnings {
            warn(w.code(), format!("{}: negative prompt (x4, y3) is listed twice", s.image_id));
        }
        prompts.push((s.image_id.as_str(), p.to_json() + "\n"));
    }

    match &args.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| ssr_core::Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            for (id, json) in &prompts {
                if id.contains(['/', '\\']) || id.is_empty() || *id == "." || *id == ".." {
                    return Err(CliError::new("invalid-input", format!("image_id {id:?} is not a file name")));
                }
                emit(Some(&dir.join(format!("{id}.json"))), json)?;
            }
            Ok(())
        }
        None => match prompts.as_slice() {
            [(_, json)] => emit(args.out.as_deref(), json),
            _ => Err(CliError::usage(format!(
                "{} images in the table; pass --image <id> or --out-dir",
                prompts.len()
            ))),
        },
    }
}
