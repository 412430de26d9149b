use std::fmt::Write;

use ssr_core::io::load_landmark_table;
use ssr_core::metrics::joint_space_length_px;
use ssr_core::ScaleConfig;

use super::landmark_pair;
use crate::args::MeasureArgs;
use crate::error::CliResult;
use crate::output::emit;

pub fn run(args: MeasureArgs) -> CliResult {
    let scale = ScaleConfig::new(args.mm_per_pixel)?;
    let (a, b) = landmark_pair(&args.pair)?;
    let sets = load_landmark_table(&args.landmarks)?;

    let mut out = String::from("image_id,length_px,length_mm\n");
    for s in &sets {
        let px = joint_space_length_px(s, a, b)?;
        let _ = writeln!(out, "{},{px},{}", csv_field(&s.image_id), px * scale.mm_per_pixel);
    }
    emit(args.out.as_deref(), &out)
}

fn csv_field(v: &str) -> String {
    if v.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}
