//! Fixtures shared by the benchmarks.

use ssr_core::harness::{
    heatmap_centres, render_heatmaps, sample_landmark_instance, stream_rng, HarnessConfig,
    ELBOW_TEMPLATE,
};
use ssr_core::{HeatmapStack, LandmarkSet, Point2};

/// Default harness geometry: 512×512 images, 128×128 heatmaps, K = 8.
pub fn config() -> HarnessConfig {
    HarnessConfig {
        seed: 17,
        ..HarnessConfig::default()
    }
}

/// `n` synthetic training shapes.
pub fn training_shapes(cfg: &HarnessConfig, n: usize) -> Vec<Vec<Point2>> {
    (0..n as u64)
        .map(|i| {
            sample_landmark_instance(cfg, &mut stream_rng(cfg.seed, 1, i), "train")
                .expect("harness sample")
                .points
        })
        .collect()
}

/// Heatmaps where every channel yields three candidates: the true peak plus
/// two weaker decoys 10 heatmap pixels away. 3⁸ = 6561 combinations.
pub fn worst_case_stack(cfg: &HarnessConfig) -> HeatmapStack {
    let truth = LandmarkSet::new("worst", ELBOW_TEMPLATE.to_vec());
    let mut h = render_heatmaps(&truth, cfg).expect("render");
    let centres = heatmap_centres(&truth, cfg).expect("centres");
    let (w, ht) = (cfg.heatmap.width, cfg.heatmap.height);
    let s2 = 2.0 * cfg.gaussian_sigma * cfg.gaussian_sigma;
    for (c, p) in centres.iter().enumerate() {
        let channel = h.channel_mut(c);
        for (dx, dy, v) in [(10.0, 0.0, 0.95), (0.0, 10.0, 0.9)] {
            let (cx, cy) = (p.x + dx, p.y + dy);
            for y in 0..ht {
                for x in 0..w {
                    let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                    let decoy = (v * (-d2 / s2).exp()) as f32;
                    let cell = &mut channel[y * w + x];
                    *cell = cell.max(decoy);
                }
            }
        }
    }
    h
}
