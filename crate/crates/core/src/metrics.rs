//! Landmark error metrics, joint-space measurement and fold aggregation.

use std::collections::HashMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landmarks::LandmarkSet;

/// Pixel spacing of the medial-elbow ultrasound images.
pub const DEFAULT_MM_PER_PIXEL: f64 = 0.0567;

/// Joint-space change the measurement must resolve, mm.
pub const CLINICAL_JOINT_SPACE_CHANGE_MM: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleConfig {
    pub mm_per_pixel: f64,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        Self {
            mm_per_pixel: DEFAULT_MM_PER_PIXEL,
        }
    }
}

impl ScaleConfig {
    pub fn new(mm_per_pixel: f64) -> Result<Self> {
        let s = Self { mm_per_pixel };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mm_per_pixel > 0.0 && self.mm_per_pixel.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "mm_per_pixel must be positive, got {}",
                self.mm_per_pixel
            )));
        }
        Ok(())
    }
}

/// Divisor used for standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StdConvention {
    /// Divide by n.
    #[default]
    Population,
    /// Divide by n − 1 (zero for a single value).
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64], convention: StdConvention) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("cannot summarise an empty list".into()));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let denom = match convention {
            StdConvention::Population => n,
            StdConvention::Sample => (n - 1.0).max(1.0),
        };
        Ok(Self {
            mean,
            std: (ss / denom).sqrt(),
        })
    }
}

/// Pairs predictions with ground truth by `image_id`. Both lists must hold
/// the same, non-empty set of ids; the result follows the prediction order.
pub fn align<'a>(
    preds: &'a [LandmarkSet],
    gts: &'a [LandmarkSet],
) -> Result<Vec<(&'a LandmarkSet, &'a LandmarkSet)>> {
    if preds.is_empty() {
        return Err(Error::Alignment("no samples".into()));
    }
    if preds.len() != gts.len() {
        return Err(Error::Alignment(format!(
            "{} predictions vs {} ground-truth samples",
            preds.len(),
            gts.len()
        )));
    }
    let by_id: HashMap<&str, &LandmarkSet> =
        gts.iter().map(|g| (g.image_id.as_str(), g)).collect();
    if by_id.len() != gts.len() {
        return Err(Error::Alignment("duplicate image_id in ground truth".into()));
    }
    preds
        .iter()
        .map(|p| {
            let g = by_id.get(p.image_id.as_str()).ok_or_else(|| {
                Error::Alignment(format!("no ground truth for image_id {}", p.image_id))
            })?;
            if p.len() != g.len() {
                return Err(Error::Alignment(format!(
                    "image {}: {} predicted vs {} ground-truth landmarks",
                    p.image_id,
                    p.len(),
                    g.len()
                )));
            }
            Ok((p, *g))
        })
        .collect()
}

/// Per-sample Euclidean errors of landmark `k` (zero-based), pixels.
/// Samples where either side flags the landmark invalid are left out.
pub fn landmark_errors_px(preds: &[LandmarkSet], gts: &[LandmarkSet], k: usize) -> Result<Vec<f64>> {
    let pairs = align(preds, gts)?;
    let mut out = Vec::with_capacity(pairs.len());
    for (p, g) in pairs {
        let (pp, gp) = (p.point(k)?, g.point(k)?);
        if p.is_valid(k) && g.is_valid(k) {
            out.push(pp.distance(&gp));
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidInput(format!(
            "landmark {} is flagged invalid in every sample",
            k + 1
        )));
    }
    Ok(out)
}

/// Mean absolute (Euclidean) error of landmark `k` (zero-based), mm.
pub fn mae_per_landmark(
    preds: &[LandmarkSet],
    gts: &[LandmarkSet],
    k: usize,
    scale: &ScaleConfig,
) -> Result<f64> {
    scale.validate()?;
    let errs = landmark_errors_px(preds, gts, k)?;
    Ok(errs.iter().sum::<f64>() / errs.len() as f64 * scale.mm_per_pixel)
}

/// Distance between two landmarks of one sample, pixels.
pub fn joint_space_length_px(lm: &LandmarkSet, i1: usize, i2: usize) -> Result<f64> {
    Ok(lm.point(i1)?.distance(&lm.point(i2)?))
}

/// Per-sample `| ‖p₁−p₂‖ − ‖g₁−g₂‖ |`, pixels.
pub fn distance_errors_px(
    preds: &[LandmarkSet],
    gts: &[LandmarkSet],
    i1: usize,
    i2: usize,
) -> Result<Vec<f64>> {
    if i1 == i2 {
        return Err(Error::InvalidInput(
            "distance error needs two different landmarks".into(),
        ));
    }
    let pairs = align(preds, gts)?;
    let mut out = Vec::with_capacity(pairs.len());
    for (p, g) in pairs {
        let (lp, lg) = (joint_space_length_px(p, i1, i2)?, joint_space_length_px(g, i1, i2)?);
        let usable = [p, g].iter().all(|s| s.is_valid(i1) && s.is_valid(i2));
        if usable {
            out.push((lp - lg).abs());
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("no sample has both landmarks valid".into()));
    }
    Ok(out)
}

/// Euclidean distance error between landmarks `i1` and `i2` (zero-based), mm.
pub fn ede(
    preds: &[LandmarkSet],
    gts: &[LandmarkSet],
    i1: usize,
    i2: usize,
    scale: &ScaleConfig,
) -> Result<f64> {
    scale.validate()?;
    let errs = distance_errors_px(preds, gts, i1, i2)?;
    Ok(errs.iter().sum::<f64>() / errs.len() as f64 * scale.mm_per_pixel)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitOfDetection {
    pub lod_mm: f64,
    /// Whether a 1.2 mm joint-space change is resolvable at this noise level.
    pub distinguishable: bool,
}

/// Smallest difference of two measurements with noise `sigma` that clears the
/// 3-sigma rule: `3·√2·σ`.
pub fn limit_of_detection(sigma: f64) -> Result<LimitOfDetection> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "sigma must be a non-negative number, got {sigma}"
        )));
    }
    let factor = 3.0 * std::f64::consts::SQRT_2;
    Ok(LimitOfDetection {
        lod_mm: factor * sigma,
        distinguishable: sigma <= CLINICAL_JOINT_SPACE_CHANGE_MM / factor,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldStats {
    pub fold: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub lod_mm: f64,
    pub distinguishable: bool,
    /// Mean of landmarks 1 and 2 errors per sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ave2: Option<MeanStd>,
    /// Mean over all landmarks per sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ave_all: Option<MeanStd>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpaceLength {
    pub image_id: String,
    pub predicted_mm: f64,
    pub ground_truth_mm: f64,
}

/// Batch measurement summary. Every mean comes with its standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementReport {
    pub n_samples: usize,
    pub std_convention: StdConvention,
    /// Per-fold statistics of the per-sample errors (joint-space EDE when
    /// produced by [`evaluate`]).
    pub folds: Vec<FoldStats>,
    /// Fold means averaged with equal fold weight.
    pub grand_mean: f64,
    /// LoD of the noisiest fold.
    pub lod_mm: f64,
    pub distinguishable: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub landmark_mae_mm: Vec<MeanStd>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ave2_mm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ave_all_mm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_space_ede_mm: Option<MeanStd>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub joint_space_lengths_mm: Vec<JointSpaceLength>,
}

impl MeasurementReport {
    /// Long-format `scope,key,metric,value` rows; values in mm unless the
    /// metric name says otherwise.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("scope,key,metric,value\n");
        let mut row = |scope: &str, key: &str, metric: &str, value: String| {
            let _ = writeln!(s, "{scope},{},{metric},{value}", csv_field(key));
        };
        row("overall", "all", "n_samples", self.n_samples.to_string());
        row("overall", "all", "grand_mean", self.grand_mean.to_string());
        row("overall", "all", "lod", self.lod_mm.to_string());
        row("overall", "all", "distinguishable", self.distinguishable.to_string());
        if let Some(v) = self.ave2_mm {
            row("overall", "all", "ave2", v.to_string());
        }
        if let Some(v) = self.ave_all_mm {
            row("overall", "all", "ave_all", v.to_string());
        }
        if let Some(m) = self.joint_space_ede_mm {
            row("overall", "all", "joint_space_ede_mean", m.mean.to_string());
            row("overall", "all", "joint_space_ede_std", m.std.to_string());
        }
        for (i, m) in self.landmark_mae_mm.iter().enumerate() {
            let key = (i + 1).to_string();
            row("landmark", &key, "mae_mean", m.mean.to_string());
            row("landmark", &key, "mae_std", m.std.to_string());
        }
        for f in &self.folds {
            row("fold", &f.fold, "n_samples", f.n.to_string());
            row("fold", &f.fold, "mean", f.mean.to_string());
            row("fold", &f.fold, "std", f.std.to_string());
            row("fold", &f.fold, "lod", f.lod_mm.to_string());
            row("fold", &f.fold, "distinguishable", f.distinguishable.to_string());
            for (name, v) in [("ave2", f.ave2), ("ave_all", f.ave_all)] {
                if let Some(m) = v {
                    row("fold", &f.fold, &format!("{name}_mean"), m.mean.to_string());
                    row("fold", &f.fold, &format!("{name}_std"), m.std.to_string());
                }
            }
        }
        s
    }
}

fn csv_field(v: &str) -> String {
    if v.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}

/// Per-fold mean ± std (population) and the equally-weighted grand mean.
pub fn fold_report(per_fold_errors: &[Vec<f64>]) -> Result<MeasurementReport> {
    fold_report_with(per_fold_errors, StdConvention::Population)
}

pub fn fold_report_with(
    per_fold_errors: &[Vec<f64>],
    convention: StdConvention,
) -> Result<MeasurementReport> {
    let named: Vec<(String, &[f64])> = per_fold_errors
        .iter()
        .enumerate()
        .map(|(i, e)| ((i + 1).to_string(), e.as_slice()))
        .collect();
    summarise_folds(&named, convention)
}

fn summarise_folds(folds: &[(String, &[f64])], convention: StdConvention) -> Result<MeasurementReport> {
    if folds.is_empty() {
        return Err(Error::InvalidInput("no folds".into()));
    }
    let mut stats = Vec::with_capacity(folds.len());
    for (name, errs) in folds {
        if errs.is_empty() {
            return Err(Error::InvalidInput(format!("fold {name} is empty")));
        }
        let ms = MeanStd::of(errs, convention)?;
        let lod = limit_of_detection(ms.std)?;
        stats.push(FoldStats {
            fold: name.clone(),
            n: errs.len(),
            mean: ms.mean,
            std: ms.std,
            lod_mm: lod.lod_mm,
            distinguishable: lod.distinguishable,
            ave2: None,
            ave_all: None,
        });
    }
    let grand_mean = stats.iter().map(|f| f.mean).sum::<f64>() / stats.len() as f64;
    let worst = stats.iter().map(|f| f.std).fold(0.0, f64::max);
    let lod = limit_of_detection(worst)?;
    Ok(MeasurementReport {
        n_samples: stats.iter().map(|f| f.n).sum(),
        std_convention: convention,
        folds: stats,
        grand_mean,
        lod_mm: lod.lod_mm,
        distinguishable: lod.distinguishable,
        landmark_mae_mm: Vec::new(),
        ave2_mm: None,
        ave_all_mm: None,
        joint_space_ede_mm: None,
        joint_space_lengths_mm: Vec::new(),
    })
}

/// Images belonging to one evaluation fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldSelection {
    pub fold: String,
    pub image_ids: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluateOptions {
    pub scale: ScaleConfig,
    /// Zero-based landmark pair spanning the joint space.
    pub joint: (usize, usize),
    pub std_convention: StdConvention,
}

impl Default for EvaluateOptions {
    fn default() -> Self {
        Self {
            scale: ScaleConfig::default(),
            joint: (0, 1),
            std_convention: StdConvention::Population,
        }
    }
}

/// Full report: per-landmark MAE, Ave2/Ave-all, joint-space EDE and lengths
/// over all images, plus per-fold joint-space statistics. An empty `folds`
/// treats the whole set as a single fold.
pub fn evaluate(
    preds: &[LandmarkSet],
    gts: &[LandmarkSet],
    folds: &[FoldSelection],
    opts: &EvaluateOptions,
) -> Result<MeasurementReport> {
    opts.scale.validate()?;
    let mm = opts.scale.mm_per_pixel;
    let (i1, i2) = opts.joint;
    let pairs = align(preds, gts)?;
    let k = pairs[0].0.len();
    if pairs.iter().any(|(p, _)| p.len() != k) {
        return Err(Error::Alignment("landmark count differs between images".into()));
    }

    let whole = [FoldSelection {
        fold: "all".into(),
        image_ids: pairs.iter().map(|(p, _)| p.image_id.clone()).collect(),
    }];
    let folds = if folds.is_empty() { &whole[..] } else { folds };

    let index: HashMap<&str, usize> = preds
        .iter()
        .enumerate()
        .map(|(i, p)| (p.image_id.as_str(), i))
        .collect();
    let mut fold_errors: Vec<(String, Vec<f64>)> = Vec::with_capacity(folds.len());
    let mut fold_extras = Vec::with_capacity(folds.len());
    for f in folds {
        let mut fp = Vec::with_capacity(f.image_ids.len());
        let mut fg = Vec::with_capacity(f.image_ids.len());
        for id in &f.image_ids {
            let i = *index.get(id.as_str()).ok_or_else(|| {
                Error::Alignment(format!("fold {}: unknown image_id {id}", f.fold))
            })?;
            fp.push(pairs[i].0.clone());
            fg.push(pairs[i].1.clone());
        }
        if fp.is_empty() {
            return Err(Error::InvalidInput(format!("fold {} has no images", f.fold)));
        }
        let errs: Vec<f64> = distance_errors_px(&fp, &fg, i1, i2)?
            .into_iter()
            .map(|e| e * mm)
            .collect();
        let per_sample = per_sample_landmark_means(&fp, &fg, mm, (i1, i2))?;
        fold_errors.push((f.fold.clone(), errs));
        fold_extras.push(per_sample);
    }

    let named: Vec<(String, &[f64])> = fold_errors
        .iter()
        .map(|(n, e)| (n.clone(), e.as_slice()))
        .collect();
    let mut report = summarise_folds(&named, opts.std_convention)?;
    for (stats, (ave2, ave_all)) in report.folds.iter_mut().zip(&fold_extras) {
        stats.ave2 = Some(MeanStd::of(ave2, opts.std_convention)?);
        stats.ave_all = Some(MeanStd::of(ave_all, opts.std_convention)?);
    }

    let mut landmark_mae = Vec::with_capacity(k);
    for lm in 0..k {
        let errs: Vec<f64> = landmark_errors_px(preds, gts, lm)?
            .into_iter()
            .map(|e| e * mm)
            .collect();
        landmark_mae.push(MeanStd::of(&errs, opts.std_convention)?);
    }
    let joint_errs: Vec<f64> = distance_errors_px(preds, gts, i1, i2)?
        .into_iter()
        .map(|e| e * mm)
        .collect();
    report.ave2_mm = Some(0.5 * (landmark_mae[i1].mean + landmark_mae[i2].mean));
    report.ave_all_mm = Some(landmark_mae.iter().map(|m| m.mean).sum::<f64>() / k as f64);
    report.landmark_mae_mm = landmark_mae;
    report.joint_space_ede_mm = Some(MeanStd::of(&joint_errs, opts.std_convention)?);

    let mut lengths = pairs
        .iter()
        .map(|(p, g)| {
            Ok(JointSpaceLength {
                image_id: p.image_id.clone(),
                predicted_mm: joint_space_length_px(p, i1, i2)? * mm,
                ground_truth_mm: joint_space_length_px(g, i1, i2)? * mm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    lengths.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    report.joint_space_lengths_mm = lengths;
    report.n_samples = pairs.len();
    Ok(report)
}

/// Per-sample (mean of the joint pair's errors, mean over all landmarks), mm.
fn per_sample_landmark_means(
    preds: &[LandmarkSet],
    gts: &[LandmarkSet],
    mm: f64,
    (i1, i2): (usize, usize),
) -> Result<(Vec<f64>, Vec<f64>)> {
    let pairs = align(preds, gts)?;
    let mut ave2 = Vec::with_capacity(pairs.len());
    let mut ave_all = Vec::with_capacity(pairs.len());
    for (p, g) in pairs {
        let errs: Vec<f64> = p
            .points
            .iter()
            .zip(&g.points)
            .map(|(a, b)| a.distance(b) * mm)
            .collect();
        ave2.push(0.5 * (errs[i1] + errs[i2]));
        ave_all.push(errs.iter().sum::<f64>() / errs.len() as f64);
    }
    Ok((ave2, ave_all))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Point2;

    fn set(id: &str, pts: &[(f64, f64)]) -> LandmarkSet {
        LandmarkSet::new(id, pts.iter().copied().map(Point2::from).collect())
    }

    const UNIT: ScaleConfig = ScaleConfig { mm_per_pixel: 1.0 };

    #[test]
    fn mae_examples() {
        let preds = [set("a", &[(0., 0.)]), set("b", &[(3., 4.)])];
        let gts = [set("a", &[(0., 0.)]), set("b", &[(0., 0.)])];
        assert!((mae_per_landmark(&preds, &gts, 0, &UNIT).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(mae_per_landmark(&gts, &gts, 0, &UNIT).unwrap(), 0.0);

        let p = [set("a", &[(100., 0.)])];
        let g = [set("a", &[(0., 0.)])];
        let mae = mae_per_landmark(&p, &g, 0, &ScaleConfig::default()).unwrap();
        assert!((mae - 5.67).abs() < 1e-12);
    }

    #[test]
    fn alignment_is_by_id() {
        let preds = [set("b", &[(3., 4.)]), set("a", &[(0., 0.)])];
        let gts = [set("a", &[(0., 0.)]), set("b", &[(0., 0.)])];
        assert!((mae_per_landmark(&preds, &gts, 0, &UNIT).unwrap() - 2.5).abs() < 1e-12);

        let other = [set("a", &[(0., 0.)]), set("c", &[(0., 0.)])];
        assert!(matches!(
            mae_per_landmark(&preds, &other, 0, &UNIT),
            Err(Error::Alignment(_))
        ));
        assert!(matches!(
            mae_per_landmark(&preds[..1], &gts, 0, &UNIT),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn ede_examples() {
        let p = [set("a", &[(0., 0.), (10., 0.)])];
        let g = [set("a", &[(0., 0.), (0., 8.)])];
        assert!((ede(&p, &g, 0, 1, &UNIT).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(ede(&g, &g, 0, 1, &UNIT).unwrap(), 0.0);

        let moved = [set("a", &[(7., -3.), (17., -3.)])];
        assert_eq!(ede(&moved, &g, 0, 1, &UNIT).unwrap(), ede(&p, &g, 0, 1, &UNIT).unwrap());
        assert!(ede(&p, &g, 1, 1, &UNIT).is_err());
    }

    #[test]
    fn invalid_points_are_excluded() {
        let mut p = set("a", &[(5., 0.)]);
        p.valid = Some(vec![false]);
        let preds = [p, set("b", &[(1., 0.)])];
        let gts = [set("a", &[(0., 0.)]), set("b", &[(0., 0.)])];
        assert_eq!(mae_per_landmark(&preds, &gts, 0, &UNIT).unwrap(), 1.0);
    }

    #[test]
    fn lod_values() {
        let l = limit_of_detection(0.283).unwrap();
        assert!((l.lod_mm - 1.2006).abs() < 1e-3);
        let l = limit_of_detection(0.0).unwrap();
        assert_eq!((l.lod_mm, l.distinguishable), (0.0, true));
        let l = limit_of_detection(0.442).unwrap();
        assert!((l.lod_mm - 1.875).abs() < 1e-3);
        assert!(!l.distinguishable);
        let edge = 1.2 / (3.0 * std::f64::consts::SQRT_2);
        assert!(limit_of_detection(edge).unwrap().distinguishable);
        assert!(limit_of_detection(-0.1).is_err());
    }

    #[test]
    fn fold_examples() {
        let r = fold_report(&[vec![2., 2., 2.]]).unwrap();
        assert_eq!((r.folds[0].mean, r.folds[0].std), (2.0, 0.0));

        let r = fold_report(&[vec![0.], vec![2.]]).unwrap();
        assert_eq!(r.grand_mean, 1.0);

        let r = fold_report(&[vec![1., 3.]]).unwrap();
        assert_eq!((r.folds[0].mean, r.folds[0].std), (2.0, 1.0));

        let r = fold_report_with(&[vec![1., 3.]], StdConvention::Sample).unwrap();
        assert!((r.folds[0].std - std::f64::consts::SQRT_2).abs() < 1e-12);

        // folds weigh equally regardless of size
        let r = fold_report(&[vec![0.; 9], vec![10.]]).unwrap();
        assert_eq!(r.grand_mean, 5.0);

        assert!(fold_report(&[vec![1.], vec![]]).is_err());
        assert!(fold_report(&[]).is_err());
    }

    #[test]
    fn evaluate_identical_is_zero() {
        let gts = [
            set("a", &[(0., 0.), (10., 0.), (3., 3.)]),
            set("b", &[(1., 1.), (12., 0.), (4., 3.)]),
        ];
        let r = evaluate(&gts, &gts, &[], &EvaluateOptions::default()).unwrap();
        assert_eq!(r.n_samples, 2);
        assert!(r.landmark_mae_mm.iter().all(|m| m.mean == 0.0 && m.std == 0.0));
        assert_eq!(r.joint_space_ede_mm.unwrap().mean, 0.0);
        assert_eq!(r.grand_mean, 0.0);
        assert_eq!(r.ave2_mm, Some(0.0));
        assert_eq!(r.folds.len(), 1);
    }

    #[test]
    fn evaluate_with_folds() {
        let gts = [
            set("a", &[(0., 0.), (10., 0.)]),
            set("b", &[(0., 0.), (10., 0.)]),
        ];
        let preds = [
            set("a", &[(0., 0.), (12., 0.)]),
            set("b", &[(0., 0.), (10., 0.)]),
        ];
        let folds = [
            FoldSelection { fold: "1".into(), image_ids: vec!["a".into()] },
            FoldSelection { fold: "2".into(), image_ids: vec!["b".into()] },
        ];
        let opts = EvaluateOptions { scale: UNIT, ..Default::default() };
        let r = evaluate(&preds, &gts, &folds, &opts).unwrap();
        assert_eq!(r.folds[0].mean, 2.0);
        assert_eq!(r.folds[1].mean, 0.0);
        assert_eq!(r.grand_mean, 1.0);
        assert_eq!(r.landmark_mae_mm[1].mean, 1.0);
        assert_eq!(r.folds[0].ave2.unwrap().mean, 1.0);
    }

    #[test]
    fn report_csv_rows() {
        let mut r = fold_report(&[vec![1.0, 3.0]]).unwrap();
        r.folds[0].fold = "a,b".into();
        let csv = r.to_csv();
        assert!(csv.starts_with("scope,key,metric,value\noverall,all,n_samples,2\n"));
        assert!(csv.contains("fold,\"a,b\",std,1\n"));
        assert!(csv.ends_with("fold,\"a,b\",distinguishable,false\n"));
    }
}
