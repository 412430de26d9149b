use crate::error::{Error, Result};
use crate::point::Point2;

/// Landmarks of one image, in image pixels. `points[i]` is landmark `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet {
    pub image_id: String,
    pub points: Vec<Point2>,
    /// Optional per-point validity; `None` means every point is valid.
    pub valid: Option<Vec<bool>>,
}

impl LandmarkSet {
    pub fn new(image_id: impl Into<String>, points: Vec<Point2>) -> Self {
        Self {
            image_id: image_id.into(),
            points,
            valid: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_valid(&self, k: usize) -> bool {
        self.valid.as_ref().is_none_or(|v| v.get(k).copied().unwrap_or(false))
    }

    /// Zero-based access with a bounds error instead of a panic.
    pub fn point(&self, k: usize) -> Result<Point2> {
        self.points.get(k).copied().ok_or_else(|| {
            Error::InvalidInput(format!(
                "image {} has {} landmarks, index {} requested",
                self.image_id,
                self.points.len(),
                k + 1
            ))
        })
    }
}
