//! Shape subspace refinement.
//!
//! Every combination of per-landmark heatmap candidates is scored by the mean
//! subspace similarity of its shape to a bank of training shapes; the best
//! combination is then refined to sub-pixel precision and mapped to image space.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heatmap::{
    argmax_decode, extract_candidates, heatmap_to_image, subpixel_refine, CandidateSet,
    DecodeConfig, Dims, HeatmapStack,
};
use crate::landmarks::LandmarkSet;
use crate::point::Point2;
use crate::subspace::{shape_subspace_basis, ShapeMatrix, SubspaceBasis, DEFAULT_RANK_TOLERANCE};

pub const DEFAULT_COMBINATION_BUDGET: usize = 100_000;
pub const DEFAULT_SAMPLING_FRACTION: f64 = 0.033;

/// Scores closer than this are ties and resolve to the lower combination index.
pub const SCORE_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsrConfig {
    pub enabled: bool,
    /// Fraction of the training set sampled into the reference bank.
    pub sampling_fraction: f64,
    pub seed: u64,
    pub combination_budget: usize,
    /// Draw a fresh bank for every image instead of one bank per run.
    pub resample_bank_per_image: bool,
    pub rank_tolerance: f64,
}

impl Default for SsrConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            sampling_fraction: DEFAULT_SAMPLING_FRACTION,
            seed: 0,
            combination_budget: DEFAULT_COMBINATION_BUDGET,
            resample_bank_per_image: false,
            rank_tolerance: DEFAULT_RANK_TOLERANCE,
        }
    }
}

impl SsrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sampling_fraction > 0.0 && self.sampling_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "sampling_fraction must be in (0, 1], got {}",
                self.sampling_fraction
            )));
        }
        if self.combination_budget == 0 {
            return Err(Error::InvalidConfig("combination_budget must be >= 1".into()));
        }
        if self.rank_tolerance.is_nan() || self.rank_tolerance <= 0.0 {
            return Err(Error::InvalidConfig("rank_tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Training-shape subspaces that test combinations are scored against.
#[derive(Debug, Clone)]
pub struct ReferenceBank {
    bases: Vec<SubspaceBasis>,
    /// Mean of the bank's projection matrices ΨΨᵀ (K×K). The mean similarity
    /// of Φ to the bank is tr(Φᵀ P̄ Φ)/N, so scoring costs O(K²N) per
    /// combination regardless of the bank size.
    mean_projection: DMatrix<f64>,
    sampled: Vec<usize>,
    skipped: Vec<usize>,
    sampling_fraction: f64,
    seed: u64,
    rank_tolerance: f64,
}

/// Number of training samples drawn for a given fraction.
pub fn bank_size(count: usize, fraction: f64) -> usize {
    // 0.033 × 2030 is 66.99 in exact arithmetic but may round above 67.0
    ((fraction * count as f64 - 1e-9).ceil() as usize).clamp(1, count.max(1))
}

impl ReferenceBank {
    /// Samples `⌈fraction · n⌉` training shapes without replacement and
    /// computes their planar subspaces. Shapes whose rank falls short of the
    /// bank's dimension are skipped with a warning.
    pub fn build(training: &[Vec<Point2>], fraction: f64, seed: u64) -> Result<Self> {
        Self::build_with_tolerance(training, fraction, seed, DEFAULT_RANK_TOLERANCE)
    }

    pub fn build_with_tolerance(
        training: &[Vec<Point2>],
        fraction: f64,
        seed: u64,
        rank_tolerance: f64,
    ) -> Result<Self> {
        if training.is_empty() {
            return Err(Error::InvalidConfig("training set is empty".into()));
        }
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "sampling fraction must be in (0, 1], got {fraction}"
            )));
        }
        let k = training[0].len();
        if let Some(bad) = training.iter().position(|t| t.len() != k) {
            return Err(Error::InvalidInput(format!(
                "training sample {bad} has {} landmarks, expected {k}",
                training[bad].len()
            )));
        }

        let m = bank_size(training.len(), fraction);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sampled = sample(&mut rng, training.len(), m).into_vec();
        sampled.sort_unstable();

        let mut candidates = Vec::with_capacity(m);
        let mut skipped = Vec::new();
        for &i in &sampled {
            let basis = ShapeMatrix::from_planar(&training[i])
                .and_then(|s| shape_subspace_basis(&s, rank_tolerance));
            match basis {
                Ok(b) => candidates.push((i, b)),
                Err(e) => {
                    log::warn!("skipping training sample {i}: {e}");
                    skipped.push(i);
                }
            }
        }
        let dim = candidates
            .iter()
            .map(|(_, b)| b.effective_dim())
            .max()
            .ok_or_else(|| Error::InvalidConfig("reference bank is empty after skipping degenerate shapes".into()))?;
        let mut bases = Vec::with_capacity(candidates.len());
        let mut kept = Vec::with_capacity(candidates.len());
        for (i, b) in candidates {
            if b.effective_dim() == dim {
                bases.push(b);
                kept.push(i);
            } else {
                log::warn!(
                    "skipping training sample {i}: rank {} below bank rank {dim}",
                    b.effective_dim()
                );
                skipped.push(i);
            }
        }
        skipped.sort_unstable();
        Ok(Self {
            mean_projection: mean_projection(&bases),
            bases,
            sampled: kept,
            skipped,
            sampling_fraction: fraction,
            seed,
            rank_tolerance,
        })
    }

    /// Bank from precomputed bases; all must share K and dimension.
    pub fn from_bases(bases: Vec<SubspaceBasis>) -> Result<Self> {
        let first = bases
            .first()
            .ok_or_else(|| Error::InvalidConfig("reference bank is empty".into()))?;
        let (k, n) = (first.k(), first.effective_dim());
        if bases.iter().any(|b| b.k() != k || b.effective_dim() != n) {
            return Err(Error::DimensionMismatch(
                "reference bases differ in K or dimension".into(),
            ));
        }
        let sampled = (0..bases.len()).collect();
        Ok(Self {
            mean_projection: mean_projection(&bases),
            bases,
            sampled,
            skipped: Vec::new(),
            sampling_fraction: 1.0,
            seed: 0,
            rank_tolerance: DEFAULT_RANK_TOLERANCE,
        })
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[SubspaceBasis] {
        &self.bases
    }

    /// Landmark count K shared by every basis.
    pub fn k(&self) -> usize {
        self.bases[0].k()
    }

    pub fn effective_dim(&self) -> usize {
        self.bases[0].effective_dim()
    }

    /// Training indices that made it into the bank, ascending.
    pub fn sampled_indices(&self) -> &[usize] {
        &self.sampled
    }

    /// Sampled training indices rejected as degenerate.
    pub fn skipped_indices(&self) -> &[usize] {
        &self.skipped
    }

    pub fn sampling_fraction(&self) -> f64 {
        self.sampling_fraction
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tolerance
    }

    /// Mean similarity of a point configuration to the bank, or −∞ when the
    /// configuration is degenerate or of lower rank than the bank.
    pub fn score_points(&self, points: &[Point2]) -> f64 {
        let basis = match ShapeMatrix::from_planar(points)
            .and_then(|s| shape_subspace_basis(&s, self.rank_tolerance))
        {
            Ok(b) => b,
            Err(_) => return f64::NEG_INFINITY,
        };
        if basis.k() != self.k() || basis.effective_dim() != self.effective_dim() {
            return f64::NEG_INFINITY;
        }
        let phi = basis.vectors();
        let n = phi.ncols();
        let mut total = 0.0;
        for c in 0..n {
            let v = phi.column(c);
            total += v.dot(&(&self.mean_projection * v));
        }
        total / n as f64
    }
}

fn mean_projection(bases: &[SubspaceBasis]) -> DMatrix<f64> {
    let k = bases.first().map_or(0, SubspaceBasis::k);
    let mut p = DMatrix::zeros(k, k);
    for b in bases {
        p += b.vectors() * b.vectors().transpose();
    }
    p / bases.len() as f64
}

/// Builds a bank from landmark sets; see [`ReferenceBank::build`].
pub fn build_reference_bank(
    training: &[LandmarkSet],
    fraction: f64,
    seed: u64,
) -> Result<ReferenceBank> {
    let shapes: Vec<Vec<Point2>> = training.iter().map(|t| t.points.clone()).collect();
    ReferenceBank::build(&shapes, fraction, seed)
}

/// One candidate chosen per landmark.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    /// Position in lexicographic enumeration order.
    pub index: usize,
    /// Candidate index chosen for each landmark.
    pub choices: Vec<usize>,
    /// Chosen integer peaks, heatmap pixels.
    pub points: Vec<Point2>,
}

impl Combination {
    pub fn integer_coords(&self, cands: &CandidateSet) -> Vec<(usize, usize)> {
        self.choices
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let cand = cands.get(k)[c];
                (cand.x, cand.y)
            })
            .collect()
    }
}

/// Lexicographic walk over the Cartesian product of candidate lists; the last
/// landmark varies fastest.
#[derive(Debug, Clone)]
pub struct Combinations<'a> {
    cands: &'a CandidateSet,
    next: Option<Vec<usize>>,
    index: usize,
    total: usize,
}

impl Combinations<'_> {
    pub fn total(&self) -> usize {
        self.total
    }
}

impl Iterator for Combinations<'_> {
    type Item = Combination;

    fn next(&mut self) -> Option<Combination> {
        let choices = self.next.take()?;
        let points = choices
            .iter()
            .enumerate()
            .map(|(k, &c)| self.cands.get(k)[c].point())
            .collect();
        let item = Combination {
            index: self.index,
            choices: choices.clone(),
            points,
        };

        let mut succ = choices;
        let advanced = (0..succ.len()).rev().any(|k| {
            succ[k] += 1;
            if succ[k] < self.cands.get(k).len() {
                true
            } else {
                succ[k] = 0;
                false
            }
        });
        if advanced {
            self.next = Some(succ);
        }
        self.index += 1;
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.total - self.index;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Combinations<'_> {}

/// Number of combinations, saturating at `u128::MAX`.
pub fn combination_count(cands: &CandidateSet) -> u128 {
    cands
        .counts()
        .iter()
        .fold(1u128, |acc, &n| acc.saturating_mul(n as u128))
}

pub fn enumerate_combinations(cands: &CandidateSet, budget: usize) -> Result<Combinations<'_>> {
    let size = combination_count(cands);
    if size > budget as u128 {
        return Err(Error::BudgetExceeded { size, budget });
    }
    Ok(Combinations {
        cands,
        next: Some(vec![0; cands.landmarks()]),
        index: 0,
        total: size as usize,
    })
}

/// Outcome of combination selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub combination: Combination,
    /// Mean similarity of the winner; `None` when the combination was unique
    /// and never scored.
    pub score: Option<f64>,
    pub evaluated: usize,
}

/// Picks the combination with the highest mean similarity to the bank.
/// Ties (within [`SCORE_TIE_TOLERANCE`]) resolve to the lowest combination index.
pub fn ssr_select(cands: &CandidateSet, bank: &ReferenceBank, budget: usize) -> Result<Selection> {
    select_impl(cands, bank, budget, false)
}

/// Same result as [`ssr_select`], with combinations scored on the rayon pool.
pub fn ssr_select_par(
    cands: &CandidateSet,
    bank: &ReferenceBank,
    budget: usize,
) -> Result<Selection> {
    select_impl(cands, bank, budget, true)
}

fn select_impl(
    cands: &CandidateSet,
    bank: &ReferenceBank,
    budget: usize,
    parallel: bool,
) -> Result<Selection> {
    let combos = enumerate_combinations(cands, budget)?;
    if combos.total() == 1 {
        let combination = combos.into_iter().next().expect("one combination");
        return Ok(Selection {
            combination,
            score: None,
            evaluated: 0,
        });
    }
    if bank.k() != cands.landmarks() {
        return Err(Error::DimensionMismatch(format!(
            "{} landmarks but reference bank has K={}",
            cands.landmarks(),
            bank.k()
        )));
    }

    let all: Vec<Combination> = combos.collect();
    let scores: Vec<f64> = if parallel {
        all.par_iter().map(|c| bank.score_points(&c.points)).collect()
    } else {
        all.iter().map(|c| bank.score_points(&c.points)).collect()
    };

    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] + SCORE_TIE_TOLERANCE {
            best = i;
        }
    }
    if scores[best] == f64::NEG_INFINITY {
        return Err(Error::RefinementFailed(format!(
            "all {} candidate combinations are degenerate",
            all.len()
        )));
    }
    let evaluated = all.len();
    let combination = all.into_iter().nth(best).expect("best index in range");
    Ok(Selection {
        combination,
        score: Some(scores[best]),
        evaluated,
    })
}

/// Landmarks decoded from one heatmap stack.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedLandmarks {
    /// Image-space positions, one per channel.
    pub points: Vec<Point2>,
    /// Integer heatmap peaks the refinement started from.
    pub peaks: Vec<(usize, usize)>,
    pub on_border: Vec<bool>,
    pub no_peak: Vec<bool>,
    pub selection: Option<Selection>,
}

/// Argmax → sub-pixel refinement → image coordinates, without SSR.
pub fn decode_landmarks(
    h: &HeatmapStack,
    cfg: &DecodeConfig,
    image: Dims,
) -> Result<RefinedLandmarks> {
    let peaks = argmax_decode(h);
    let coords: Vec<(usize, usize)> = peaks.iter().map(|p| (p.x, p.y)).collect();
    let no_peak = peaks.iter().map(|p| p.no_peak).collect();
    finish(h, cfg, image, coords, no_peak, None)
}

/// Candidates → SSR selection → sub-pixel refinement → image coordinates.
///
/// Stacks with fewer than three channels cannot form a shape subspace and
/// take the plain decode path.
pub fn refine_landmarks(
    h: &HeatmapStack,
    cfg: &DecodeConfig,
    bank: &ReferenceBank,
    image: Dims,
    budget: usize,
) -> Result<RefinedLandmarks> {
    if h.channels() < 3 {
        return decode_landmarks(h, cfg, image);
    }
    let cands = extract_candidates(h, cfg)?;
    let selection = ssr_select(&cands, bank, budget)?;
    let coords = selection.combination.integer_coords(&cands);
    let no_peak = argmax_decode(h).iter().map(|p| p.no_peak).collect();
    finish(h, cfg, image, coords, no_peak, Some(selection))
}

fn finish(
    h: &HeatmapStack,
    cfg: &DecodeConfig,
    image: Dims,
    coords: Vec<(usize, usize)>,
    no_peak: Vec<bool>,
    selection: Option<Selection>,
) -> Result<RefinedLandmarks> {
    let refined = subpixel_refine(h, &coords)?;
    let points = refined
        .iter()
        .map(|r| heatmap_to_image(r.position, h.dims(), image, cfg.scale_convention))
        .collect::<Result<Vec<_>>>()?;
    Ok(RefinedLandmarks {
        points,
        peaks: coords,
        on_border: refined.iter().map(|r| r.on_border).collect(),
        no_peak,
        selection,
    })
}
