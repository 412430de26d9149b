//! Synthetic experiments: templated eight-landmark shapes, rendered Gaussian
//! heatmaps and injected spurious peaks, scored with and without SSR.
//!
//! Every random draw comes from a ChaCha stream keyed by `(seed, domain,
//! index)`, so results do not depend on evaluation order or thread count.
//! Spurious-peak variates are drawn for every landmark regardless of the
//! injection rate, which nests the injected sets across rates.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heatmap::{extract_candidates, image_to_heatmap, DecodeConfig, Dims, HeatmapStack};
use crate::io::save_heatmaps;
use crate::landmarks::LandmarkSet;
use crate::metrics::{ede, mae_per_landmark, ScaleConfig};
use crate::point::Point2;
use crate::ssr::{decode_landmarks, refine_landmarks, ReferenceBank, SsrConfig};

/// Eight-point planar layout in a 512×512 image: humerus chain (landmarks
/// 1, 3, 4, 5, 6) on the left, ulna chain (2, 7, 8) on the right.
pub const ELBOW_TEMPLATE: [Point2; 8] = [
    Point2::new(236.0, 270.0),
    Point2::new(276.0, 276.0),
    Point2::new(200.0, 240.0),
    Point2::new(150.0, 222.0),
    Point2::new(96.0, 214.0),
    Point2::new(210.0, 300.0),
    Point2::new(330.0, 262.0),
    Point2::new(400.0, 250.0),
];

const MAX_PLACEMENT_ATTEMPTS: usize = 100;

// Stream domains.
const TRAIN: u64 = 1;
const TEST: u64 = 2;
const INJECT: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    /// Baseline landmark positions, image px.
    pub template: Vec<Point2>,
    /// Independent per-point jitter, image px.
    pub jitter_sigma: f64,
    /// Global rotation drawn from ±this many degrees about the template centroid.
    pub rotation_deg: f64,
    /// Global isotropic scale range.
    pub scale_range: [f64; 2],
    /// Global translation drawn from ±this many px on each axis.
    pub translation_px: f64,
    /// Width of rendered peaks, heatmap px.
    pub gaussian_sigma: f64,
    /// Probability ρ that a landmark's heatmap receives a spurious peak.
    pub spurious_rate: f64,
    /// Distance of a spurious peak from the true one, heatmap px.
    pub spurious_offset_range: [f64; 2],
    /// Spurious peak height relative to the true peak (1.0).
    pub spurious_value_ratio: f64,
    pub image: Dims,
    pub heatmap: Dims,
    pub train_samples: usize,
    pub test_samples: usize,
    pub seed: u64,
    pub decode: DecodeConfig,
    pub ssr: SsrConfig,
    pub scale: ScaleConfig,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            template: ELBOW_TEMPLATE.to_vec(),
            jitter_sigma: 3.0,
            rotation_deg: 10.0,
            scale_range: [0.9, 1.1],
            translation_px: 30.0,
            gaussian_sigma: 2.0,
            spurious_rate: 0.0,
            spurious_offset_range: [8.0, 16.0],
            spurious_value_ratio: 1.05,
            image: Dims::new(512, 512),
            heatmap: Dims::new(128, 128),
            train_samples: 2030,
            test_samples: 200,
            seed: 0,
            decode: DecodeConfig::default(),
            ssr: SsrConfig::default(),
            scale: ScaleConfig::default(),
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        self.decode.validate()?;
        self.ssr.validate()?;
        self.scale.validate()?;
        if self.template.is_empty() || self.template.iter().any(|p| !p.is_finite()) {
            return bad("template must hold finite points".into());
        }
        if !(0.0..=1.0).contains(&self.spurious_rate) {
            return bad(format!("spurious_rate must be in [0, 1], got {}", self.spurious_rate));
        }
        if !(self.spurious_value_ratio > self.decode.value_ratio && self.spurious_value_ratio <= 1.2)
        {
            return bad(format!(
                "spurious_value_ratio must be in (r={}, 1.2], got {}",
                self.decode.value_ratio, self.spurious_value_ratio
            ));
        }
        let [lo, hi] = self.spurious_offset_range;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return bad(format!("bad spurious_offset_range [{lo}, {hi}]"));
        }
        let [s_lo, s_hi] = self.scale_range;
        if !(s_lo > 0.0 && s_lo <= s_hi) {
            return bad(format!("bad scale_range [{s_lo}, {s_hi}]"));
        }
        if !(self.jitter_sigma >= 0.0 && self.rotation_deg >= 0.0 && self.translation_px >= 0.0) {
            return bad("jitter, rotation and translation must be non-negative".into());
        }
        if self.gaussian_sigma.is_nan() || self.gaussian_sigma <= 0.0 {
            return bad("gaussian_sigma must be positive".into());
        }
        if self.heatmap.width < 3 || self.heatmap.height < 3 {
            return bad("heatmap must be at least 3x3".into());
        }
        if self.image.width < self.heatmap.width || self.image.height < self.heatmap.height {
            return bad("image must be at least as large as the heatmap".into());
        }
        if self.test_samples == 0 {
            return bad("test_samples must be >= 1".into());
        }
        Ok(())
    }
}

/// Reproducible generator for one `(domain, index)` stream.
pub fn stream_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain << 48) ^ index);
    rng
}

fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Template under a random similarity transform plus per-point jitter, kept
/// inside the image.
pub fn sample_landmark_instance(
    cfg: &HarnessConfig,
    rng: &mut impl Rng,
    image_id: impl Into<String>,
) -> Result<LandmarkSet> {
    let jitter = Normal::new(0.0, cfg.jitter_sigma)
        .map_err(|e| Error::InvalidConfig(format!("jitter_sigma: {e}")))?;
    let n = cfg.template.len() as f64;
    let centroid = Point2::new(
        cfg.template.iter().map(|p| p.x).sum::<f64>() / n,
        cfg.template.iter().map(|p| p.y).sum::<f64>() / n,
    );
    let (max_x, max_y) = ((cfg.image.width - 1) as f64, (cfg.image.height - 1) as f64);

    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        let theta = uniform(rng, -cfg.rotation_deg, cfg.rotation_deg).to_radians();
        let s = uniform(rng, cfg.scale_range[0], cfg.scale_range[1]);
        let tx = uniform(rng, -cfg.translation_px, cfg.translation_px);
        let ty = uniform(rng, -cfg.translation_px, cfg.translation_px);
        // (sR − I) applied to the centred point keeps the identity transform exact
        let (a, b) = (s * theta.cos() - 1.0, s * theta.sin());
        let points: Vec<Point2> = cfg
            .template
            .iter()
            .map(|p| {
                let (dx, dy) = (p.x - centroid.x, p.y - centroid.y);
                Point2::new(
                    p.x + (a * dx - b * dy) + tx + jitter.sample(rng),
                    p.y + (b * dx + a * dy) + ty + jitter.sample(rng),
                )
            })
            .collect();
        let inside = points
            .iter()
            .all(|p| (0.0..=max_x).contains(&p.x) && (0.0..=max_y).contains(&p.y));
        if inside {
            return Ok(LandmarkSet::new(image_id, points));
        }
    }
    Err(Error::InvalidConfig(format!(
        "could not place landmarks inside {}x{} image in {MAX_PLACEMENT_ATTEMPTS} attempts",
        cfg.image.width, cfg.image.height
    )))
}

fn add_gaussian(grid: &mut [f32], dims: Dims, centre: Point2, sigma: f64, peak: f64) {
    let radius = (5.0 * sigma).ceil();
    let x0 = (centre.x - radius).floor().max(0.0) as usize;
    let y0 = (centre.y - radius).floor().max(0.0) as usize;
    let x1 = ((centre.x + radius).ceil().max(0.0) as usize).min(dims.width - 1);
    let y1 = ((centre.y + radius).ceil().max(0.0) as usize).min(dims.height - 1);
    let inv = 1.0 / (2.0 * sigma * sigma);
    for y in y0..=y1 {
        let dy = y as f64 - centre.y;
        for x in x0..=x1 {
            let dx = x as f64 - centre.x;
            let v = peak * (-(dx * dx + dy * dy) * inv).exp();
            grid[y * dims.width + x] += v as f32;
        }
    }
}

/// Landmark positions in heatmap pixels.
pub fn heatmap_centres(lm: &LandmarkSet, cfg: &HarnessConfig) -> Result<Vec<Point2>> {
    lm.points
        .iter()
        .map(|&p| image_to_heatmap(p, cfg.heatmap, cfg.image, cfg.decode.scale_convention))
        .collect()
}

/// One isotropic Gaussian (peak 1.0, width `gaussian_sigma`) per landmark.
pub fn render_heatmaps(lm: &LandmarkSet, cfg: &HarnessConfig) -> Result<HeatmapStack> {
    if lm.is_empty() {
        return Err(Error::InvalidInput("no landmarks to render".into()));
    }
    let mut h = HeatmapStack::zeros(cfg.heatmap.width, cfg.heatmap.height, lm.len())?;
    for (c, centre) in heatmap_centres(lm, cfg)?.into_iter().enumerate() {
        if !(centre.x >= 0.0
            && centre.y >= 0.0
            && centre.x <= (cfg.heatmap.width - 1) as f64
            && centre.y <= (cfg.heatmap.height - 1) as f64)
        {
            return Err(Error::InvalidInput(format!(
                "landmark {} of {} lies outside the heatmap",
                c + 1,
                lm.image_id
            )));
        }
        add_gaussian(h.channel_mut(c), cfg.heatmap, centre, cfg.gaussian_sigma, 1.0);
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Injection {
    pub landmark: usize,
    /// Spurious peak centre, heatmap px.
    pub centre: Point2,
}

/// Adds, per landmark with probability ρ, one Gaussian of height
/// `spurious_value_ratio` at a random direction and distance from the true
/// peak. Offsets that leave the heatmap are turned by quarter steps; if no
/// orientation fits, the landmark is left clean.
pub fn inject_spurious_peaks(
    h: &HeatmapStack,
    lm: &LandmarkSet,
    cfg: &HarnessConfig,
    rng: &mut impl Rng,
) -> Result<(HeatmapStack, Vec<Injection>)> {
    let centres = heatmap_centres(lm, cfg)?;
    if centres.len() != h.channels() {
        return Err(Error::DimensionMismatch(format!(
            "{} landmarks for {} heatmap channels",
            centres.len(),
            h.channels()
        )));
    }
    let mut out = h.clone();
    let mut log = Vec::new();
    let (w, ht) = (h.width() as f64, h.height() as f64);
    for (c, centre) in centres.into_iter().enumerate() {
        // always draw, so the same variates are used at every rate
        let u: f64 = rng.random();
        let angle = uniform(rng, 0.0, 2.0 * PI);
        let dist = uniform(rng, cfg.spurious_offset_range[0], cfg.spurious_offset_range[1]);
        if u >= cfg.spurious_rate {
            continue;
        }
        let placed = (0..4).map(|q| angle + q as f64 * PI / 2.0).find_map(|a| {
            let p = Point2::new(centre.x + dist * a.cos(), centre.y + dist * a.sin());
            let fits = p.x >= 1.0 && p.y >= 1.0 && p.x <= w - 2.0 && p.y <= ht - 2.0;
            fits.then_some(p)
        });
        if let Some(p) = placed {
            add_gaussian(
                out.channel_mut(c),
                h.dims(),
                p,
                cfg.gaussian_sigma,
                cfg.spurious_value_ratio,
            );
            log.push(Injection {
                landmark: c,
                centre: p,
            });
        }
    }
    Ok((out, log))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineMetrics {
    /// Mean over landmarks of per-landmark MAE, mm.
    pub mae_mm: f64,
    /// Joint-space (landmarks 1–2) distance error, mm.
    pub ede_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub rho: f64,
    pub images: usize,
    pub naive: PipelineMetrics,
    pub ssr: PipelineMetrics,
    /// naive − SSR.
    pub improvement: PipelineMetrics,
    /// Fraction of heatmap channels with more than one candidate.
    pub multi_peak_rate: f64,
    pub injections: usize,
    /// Images where either pipeline failed; excluded from both.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentTable {
    pub seed: u64,
    pub bank_size: usize,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentTable {
    /// `rho,pipeline,metric,value` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rho,pipeline,metric,value\n");
        for r in &self.rows {
            for (pipe, m) in [("naive", r.naive), ("ssr", r.ssr), ("improvement", r.improvement)] {
                let _ = writeln!(s, "{},{pipe},mae_mm,{}", r.rho, m.mae_mm);
                let _ = writeln!(s, "{},{pipe},ede_mm,{}", r.rho, m.ede_mm);
            }
            let _ = writeln!(s, "{},harness,multi_peak_rate,{}", r.rho, r.multi_peak_rate);
            let _ = writeln!(s, "{},harness,injections,{}", r.rho, r.injections);
            let _ = writeln!(s, "{},harness,failures,{}", r.rho, r.failures);
            let _ = writeln!(s, "{},harness,images,{}", r.rho, r.images);
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialises")
    }
}

struct ImageOutcome {
    gt: LandmarkSet,
    naive: Option<LandmarkSet>,
    ssr: Option<LandmarkSet>,
    multi_peak: usize,
    channels: usize,
    injections: usize,
}

/// Builds the reference bank from `train_samples` synthetic shapes.
pub fn harness_bank(cfg: &HarnessConfig) -> Result<ReferenceBank> {
    let train: Vec<Vec<Point2>> = (0..cfg.train_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, TRAIN, i as u64);
            sample_landmark_instance(cfg, &mut rng, format!("train_{i:05}")).map(|l| l.points)
        })
        .collect::<Result<_>>()?;
    ReferenceBank::build_with_tolerance(
        &train,
        cfg.ssr.sampling_fraction,
        cfg.ssr.seed,
        cfg.ssr.rank_tolerance,
    )
}

/// Clean test instances and their heatmaps.
pub fn harness_test_set(cfg: &HarnessConfig) -> Result<Vec<(LandmarkSet, HeatmapStack)>> {
    (0..cfg.test_samples)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream_rng(cfg.seed, TEST, j as u64);
            let lm = sample_landmark_instance(cfg, &mut rng, format!("test_{j:05}"))?;
            let h = render_heatmaps(&lm, cfg)?;
            Ok((lm, h))
        })
        .collect()
}

/// Sweeps the spurious-peak rate and compares naive argmax decoding with SSR.
pub fn run_experiment(cfg: &HarnessConfig, rhos: &[f64]) -> Result<ExperimentTable> {
    run_experiment_with_dump(cfg, rhos, None)
}

/// As [`run_experiment`], optionally writing every injected heatmap stack to
/// `dump_dir` as `rho<ρ>_<image>.hmt`.
pub fn run_experiment_with_dump(
    cfg: &HarnessConfig,
    rhos: &[f64],
    dump_dir: Option<&Path>,
) -> Result<ExperimentTable> {
    cfg.validate()?;
    if let Some(bad) = rhos.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::InvalidConfig(format!("rho {bad} outside [0, 1]")));
    }
    let bank = harness_bank(cfg)?;
    let test = harness_test_set(cfg)?;

    let mut rows = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let run_cfg = HarnessConfig {
            spurious_rate: rho,
            ..cfg.clone()
        };
        let outcomes: Vec<ImageOutcome> = test
            .par_iter()
            .enumerate()
            .map(|(j, (lm, clean))| {
                let mut rng = stream_rng(cfg.seed, INJECT, j as u64);
                let (h, inj) = inject_spurious_peaks(clean, lm, &run_cfg, &mut rng)?;
                if let Some(dir) = dump_dir {
                    save_heatmaps(dir.join(format!("rho{rho}_{}.hmt", lm.image_id)), &h)?;
                }
                Ok(evaluate_image(&h, lm, &run_cfg, &bank, inj.len()))
            })
            .collect::<Result<_>>()?;
        rows.push(summarise(rho, &outcomes, &cfg.scale)?);
    }
    Ok(ExperimentTable {
        seed: cfg.seed,
        bank_size: bank.len(),
        rows,
    })
}

fn evaluate_image(
    h: &HeatmapStack,
    lm: &LandmarkSet,
    cfg: &HarnessConfig,
    bank: &ReferenceBank,
    injections: usize,
) -> ImageOutcome {
    let as_set = |pts: Vec<Point2>| LandmarkSet::new(lm.image_id.clone(), pts);
    let naive = decode_landmarks(h, &cfg.decode, cfg.image)
        .map(|r| as_set(r.points))
        .map_err(|e| log::warn!("{}: naive decode failed: {e}", lm.image_id))
        .ok();
    let ssr = refine_landmarks(h, &cfg.decode, bank, cfg.image, cfg.ssr.combination_budget)
        .map(|r| as_set(r.points))
        .map_err(|e| log::warn!("{}: SSR failed: {e}", lm.image_id))
        .ok();
    let multi_peak = extract_candidates(h, &cfg.decode)
        .map(|c| c.counts().iter().filter(|&&n| n > 1).count())
        .unwrap_or(0);
    ImageOutcome {
        gt: lm.clone(),
        naive,
        ssr,
        multi_peak,
        channels: h.channels(),
        injections,
    }
}

fn summarise(rho: f64, outcomes: &[ImageOutcome], scale: &ScaleConfig) -> Result<ExperimentRow> {
    let mut gts = Vec::new();
    let mut naive = Vec::new();
    let mut ssr = Vec::new();
    let mut failures = 0;
    for o in outcomes {
        match (&o.naive, &o.ssr) {
            (Some(n), Some(s)) => {
                gts.push(o.gt.clone());
                naive.push(n.clone());
                ssr.push(s.clone());
            }
            _ => failures += 1,
        }
    }
    if gts.is_empty() {
        return Err(Error::RefinementFailed(format!("every image failed at rho={rho}")));
    }
    let metrics = |preds: &[LandmarkSet]| -> Result<PipelineMetrics> {
        let k = gts[0].len();
        let mut total = 0.0;
        for lm in 0..k {
            total += mae_per_landmark(preds, &gts, lm, scale)?;
        }
        let ede_mm = if k >= 2 { ede(preds, &gts, 0, 1, scale)? } else { 0.0 };
        Ok(PipelineMetrics {
            mae_mm: total / k as f64,
            ede_mm,
        })
    };
    let (n, s) = (metrics(&naive)?, metrics(&ssr)?);
    let channels: usize = outcomes.iter().map(|o| o.channels).sum();
    let multi: usize = outcomes.iter().map(|o| o.multi_peak).sum();
    Ok(ExperimentRow {
        rho,
        images: gts.len(),
        naive: n,
        ssr: s,
        improvement: PipelineMetrics {
            mae_mm: n.mae_mm - s.mae_mm,
            ede_mm: n.ede_mm - s.ede_mm,
        },
        multi_peak_rate: multi as f64 / channels as f64,
        injections: outcomes.iter().map(|o| o.injections).sum(),
        failures,
    })
}
