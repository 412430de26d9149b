//! Heatmap decoding: integer peaks, multi-peak candidates, sub-pixel refinement
//! and the heatmap→image coordinate transform.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point2;

/// Per-landmark likelihood grids, channel-major, row-major within a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapStack {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl HeatmapStack {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        check_dims(width, height, channels)?;
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(Error::InvalidInput(format!(
                "heatmap data has {} values, dims require {expected}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("heatmap value #{i}")));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize, channels: usize) -> Result<Self> {
        check_dims(width, height, channels)?;
        Ok(Self {
            width,
            height,
            channels,
            data: vec![0.0; width * height * channels],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.width, self.height)
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    /// Mutable access to one channel. Callers must keep values finite.
    pub fn channel_mut(&mut self, c: usize) -> &mut [f32] {
        let n = self.width * self.height;
        &mut self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn get(&self, c: usize, x: usize, y: usize) -> f32 {
        self.data[(c * self.height + y) * self.width + x]
    }
}

fn check_dims(width: usize, height: usize, channels: usize) -> Result<()> {
    if width < 3 || height < 3 || channels < 1 {
        return Err(Error::InvalidInput(format!(
            "heatmap dims must be at least 3x3x1, got {width}x{height}x{channels}"
        )));
    }
    Ok(())
}

/// Width and height of a pixel grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub width: usize,
    pub height: usize,
}

impl Dims {
    pub const fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }
}

/// How heatmap coordinates are scaled to image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleConvention {
    /// Endpoint-aligned: `x · (W−1)/(W′−1)`; first and last pixel centres coincide.
    #[default]
    Unbiased,
    /// Plain ratio `x · W/W′`.
    Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecodeConfig {
    /// Candidate value threshold r, relative to the channel maximum.
    pub value_ratio: f64,
    /// Minimum separation D between candidates of one landmark, heatmap px.
    pub min_distance: f64,
    pub max_candidates: usize,
    pub scale_convention: ScaleConvention,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            value_ratio: 0.75,
            min_distance: 5.0,
            max_candidates: 3,
            scale_convention: ScaleConvention::Unbiased,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.value_ratio > 0.0 && self.value_ratio <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "value_ratio must be in (0, 1], got {}",
                self.value_ratio
            )));
        }
        if !(self.min_distance >= 1.0 && self.min_distance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "min_distance must be >= 1, got {}",
                self.min_distance
            )));
        }
        if self.max_candidates < 1 {
            return Err(Error::InvalidConfig("max_candidates must be >= 1".into()));
        }
        Ok(())
    }
}

/// Integer peak of one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub x: usize,
    pub y: usize,
    pub value: f32,
    /// Every value in the channel is equal; the coordinate is the tie-break default.
    pub no_peak: bool,
}

/// Global maximum of each channel. Ties go to the smallest y, then smallest x.
pub fn argmax_decode(h: &HeatmapStack) -> Vec<Peak> {
    (0..h.channels)
        .map(|c| {
            let grid = h.channel(c);
            let (mut best, mut lo) = (0usize, grid[0]);
            for (i, &v) in grid.iter().enumerate().skip(1) {
                if v > grid[best] {
                    best = i;
                }
                lo = lo.min(v);
            }
            let value = grid[best];
            if value == lo {
                log::warn!("heatmap channel {c} is flat; no peak");
            }
            Peak {
                x: best % h.width,
                y: best / h.width,
                value,
                no_peak: value == lo,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub x: usize,
    pub y: usize,
    pub value: f32,
}

impl Candidate {
    pub fn point(&self) -> Point2 {
        Point2::new(self.x as f64, self.y as f64)
    }
}

/// Per-landmark candidate peaks, each list non-empty and sorted by descending value.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    lists: Vec<Vec<Candidate>>,
}

impl CandidateSet {
    pub fn new(lists: Vec<Vec<Candidate>>) -> Result<Self> {
        if lists.is_empty() {
            return Err(Error::InvalidInput("candidate set has no landmarks".into()));
        }
        if let Some(k) = lists.iter().position(Vec::is_empty) {
            return Err(Error::InvalidInput(format!("landmark {k} has no candidates")));
        }
        Ok(Self { lists })
    }

    pub fn landmarks(&self) -> usize {
        self.lists.len()
    }

    pub fn get(&self, landmark: usize) -> &[Candidate] {
        &self.lists[landmark]
    }

    pub fn lists(&self) -> &[Vec<Candidate>] {
        &self.lists
    }

    pub fn counts(&self) -> Vec<usize> {
        self.lists.iter().map(Vec::len).collect()
    }

    /// True when some landmark has more than one candidate.
    pub fn is_ambiguous(&self) -> bool {
        self.lists.iter().any(|l| l.len() > 1)
    }
}

/// Strict 8-neighbourhood local maxima at or above `r × channel max`,
/// thinned by greedy suppression within `D` and capped at `max_candidates`.
/// The channel argmax always leads the list.
pub fn extract_candidates(h: &HeatmapStack, cfg: &DecodeConfig) -> Result<CandidateSet> {
    cfg.validate()?;
    let peaks = argmax_decode(h);
    let lists = peaks
        .iter()
        .enumerate()
        .map(|(c, peak)| channel_candidates(h, c, peak, cfg))
        .collect();
    CandidateSet::new(lists)
}

fn channel_candidates(h: &HeatmapStack, c: usize, peak: &Peak, cfg: &DecodeConfig) -> Vec<Candidate> {
    let (w, ht) = (h.width, h.height);
    let threshold = cfg.value_ratio * f64::from(peak.value);
    let mut found = vec![Candidate {
        x: peak.x,
        y: peak.y,
        value: peak.value,
    }];
    for y in 0..ht {
        for x in 0..w {
            let v = h.get(c, x, y);
            if f64::from(v) < threshold || (x == peak.x && y == peak.y) {
                continue;
            }
            if is_strict_local_max(h, c, x, y) {
                found.push(Candidate { x, y, value: v });
            }
        }
    }
    // Stable sort keeps row-major order among equal values; argmax stays first.
    found[1..].sort_by(|a, b| b.value.total_cmp(&a.value));

    let min_sq = cfg.min_distance * cfg.min_distance;
    let mut kept: Vec<Candidate> = Vec::with_capacity(cfg.max_candidates);
    for cand in found {
        if kept.len() == cfg.max_candidates {
            break;
        }
        let clear = kept.iter().all(|k| {
            let dx = k.x as f64 - cand.x as f64;
            let dy = k.y as f64 - cand.y as f64;
            dx * dx + dy * dy >= min_sq
        });
        if clear {
            kept.push(cand);
        }
    }
    kept
}

fn is_strict_local_max(h: &HeatmapStack, c: usize, x: usize, y: usize) -> bool {
    let v = h.get(c, x, y);
    let x0 = x.saturating_sub(1);
    let y0 = y.saturating_sub(1);
    let x1 = (x + 1).min(h.width - 1);
    let y1 = (y + 1).min(h.height - 1);
    for ny in y0..=y1 {
        for nx in x0..=x1 {
            if (nx, ny) != (x, y) && h.get(c, nx, ny) >= v {
                return false;
            }
        }
    }
    true
}

/// Fractional peak position in heatmap pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedPeak {
    pub position: Point2,
    /// Peak touched the border and was passed through unrefined.
    pub on_border: bool,
}

/// Second-order Taylor refinement around each integer peak.
///
/// The offset `−H⁻¹g` uses central differences on the 3×3 neighbourhood; each
/// component is clamped to ±0.5 px, and is zero unless the Hessian is
/// negative definite. `coords` holds one `(x, y)` per channel.
pub fn subpixel_refine(h: &HeatmapStack, coords: &[(usize, usize)]) -> Result<Vec<RefinedPeak>> {
    if coords.len() != h.channels {
        return Err(Error::DimensionMismatch(format!(
            "{} coordinates for {} heatmap channels",
            coords.len(),
            h.channels
        )));
    }
    coords
        .iter()
        .enumerate()
        .map(|(c, &(x, y))| {
            if x >= h.width || y >= h.height {
                return Err(Error::InvalidInput(format!(
                    "peak ({x}, {y}) outside {}x{} heatmap",
                    h.width, h.height
                )));
            }
            let base = Point2::new(x as f64, y as f64);
            if x == 0 || y == 0 || x + 1 >= h.width || y + 1 >= h.height {
                return Ok(RefinedPeak {
                    position: base,
                    on_border: true,
                });
            }
            let (dx, dy) = taylor_offset(h, c, x, y);
            Ok(RefinedPeak {
                position: Point2::new(base.x + dx, base.y + dy),
                on_border: false,
            })
        })
        .collect()
}

fn taylor_offset(h: &HeatmapStack, c: usize, x: usize, y: usize) -> (f64, f64) {
    let at = |xx: usize, yy: usize| f64::from(h.get(c, xx, yy));
    let centre = at(x, y);
    let gx = 0.5 * (at(x + 1, y) - at(x - 1, y));
    let gy = 0.5 * (at(x, y + 1) - at(x, y - 1));
    let hxx = at(x + 1, y) - 2.0 * centre + at(x - 1, y);
    let hyy = at(x, y + 1) - 2.0 * centre + at(x, y - 1);
    let hxy = 0.25 * (at(x + 1, y + 1) - at(x + 1, y - 1) - at(x - 1, y + 1) + at(x - 1, y - 1));

    let det = hxx * hyy - hxy * hxy;
    if !(hxx < 0.0 && det > 0.0) {
        return (0.0, 0.0);
    }
    // −H⁻¹g with H⁻¹ = [hyy −hxy; −hxy hxx] / det
    let ox = -(hyy * gx - hxy * gy) / det;
    let oy = -(-hxy * gx + hxx * gy) / det;
    (ox.clamp(-0.5, 0.5), oy.clamp(-0.5, 0.5))
}

fn axis_scale(from: usize, to: usize, convention: ScaleConvention) -> Result<f64> {
    if from < 2 || to < 2 {
        return Err(Error::InvalidConfig(format!(
            "coordinate transform needs dims >= 2, got {from} -> {to}"
        )));
    }
    Ok(match convention {
        ScaleConvention::Unbiased => (to - 1) as f64 / (from - 1) as f64,
        ScaleConvention::Ratio => to as f64 / from as f64,
    })
}

/// Maps heatmap pixel coordinates into image pixel coordinates.
pub fn heatmap_to_image(
    p: Point2,
    heatmap: Dims,
    image: Dims,
    convention: ScaleConvention,
) -> Result<Point2> {
    let sx = axis_scale(heatmap.width, image.width, convention)?;
    let sy = axis_scale(heatmap.height, image.height, convention)?;
    Ok(Point2::new(p.x * sx, p.y * sy))
}

/// Inverse of [`heatmap_to_image`].
pub fn image_to_heatmap(
    p: Point2,
    heatmap: Dims,
    image: Dims,
    convention: ScaleConvention,
) -> Result<Point2> {
    let sx = axis_scale(image.width, heatmap.width, convention)?;
    let sy = axis_scale(image.height, heatmap.height, convention)?;
    Ok(Point2::new(p.x * sx, p.y * sy))
}
