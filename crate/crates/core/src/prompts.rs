//! Point prompts for humerus/ulna segmentation derived from the eight
//! detected landmarks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::landmarks::LandmarkSet;
use crate::point::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptWarning {
    /// The first two negatives are the same point `(x₄, y₃)`.
    DuplicateNegative,
}

impl PromptWarning {
    pub fn code(&self) -> &'static str {
        match self {
            PromptWarning::DuplicateNegative => "duplicate-negative",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prompt {
    pub point: Point2,
    /// Landmark number (1-based) for positives, formula for negatives.
    pub source: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PromptSet {
    pub positives: Vec<Prompt>,
    pub negatives: Vec<Prompt>,
    pub warnings: Vec<PromptWarning>,
}

#[derive(Serialize)]
struct PromptPayload {
    positives: Vec<[f64; 2]>,
    negatives: Vec<[f64; 2]>,
}

impl PromptSet {
    /// `{"positives":[[x,y],...],"negatives":[[x,y],...]}`
    pub fn to_json(&self) -> String {
        let flat = |v: &[Prompt]| v.iter().map(|p| [p.point.x, p.point.y]).collect();
        let payload = PromptPayload {
            positives: flat(&self.positives),
            negatives: flat(&self.negatives),
        };
        serde_json::to_string(&payload).expect("prompt payload serialises")
    }
}

const POSITIVE_SOURCES: [&str; 6] = ["lm3", "lm4", "lm5", "lm6", "lm7", "lm8"];

/// Landmarks 3–8 as positives; six negatives from fixed coordinate formulas.
/// The first two negatives always coincide, which is reported as a
/// [`PromptWarning::DuplicateNegative`] rather than logged.
pub fn generate_prompts(lm: &LandmarkSet) -> Result<PromptSet> {
    if lm.len() != 8 {
        return Err(Error::InvalidInput(format!(
            "prompt generation needs 8 landmarks, image {} has {}",
            lm.image_id,
            lm.len()
        )));
    }
    if lm.points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite(format!("landmarks of image {}", lm.image_id)));
    }
    // 1-based accessors
    let x = |i: usize| lm.points[i - 1].x;
    let y = |i: usize| lm.points[i - 1].y;

    let positives = lm.points[2..]
        .iter()
        .zip(POSITIVE_SOURCES)
        .map(|(&point, source)| Prompt { point, source })
        .collect();

    let below_5 = 2.0 * y(5) - y(4);
    let negatives = vec![
        Prompt { point: Point2::new(x(4), y(3)), source: "(x4, y3)" },
        Prompt { point: Point2::new(x(4), y(3)), source: "(x4, y3)" },
        Prompt { point: Point2::new(x(5), y(4)), source: "(x5, y4)" },
        Prompt { point: Point2::new(x(5), below_5), source: "(x5, 2*y5 - y4)" },
        Prompt { point: Point2::new(x(8), below_5), source: "(x8, 2*y5 - y4)" },
        Prompt {
            point: Point2::new((x(1) + x(2)) / 2.0, (y(1) + y(2)) / 2.0),
            source: "((x1 + x2)/2, (y1 + y2)/2)",
        },
    ];
    Ok(PromptSet {
        positives,
        negatives,
        warnings: vec![PromptWarning::DuplicateNegative],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lm(pts: [(f64, f64); 8]) -> LandmarkSet {
        LandmarkSet::new("img", pts.iter().copied().map(Point2::from).collect())
    }

    const DISTINCT: [(f64, f64); 8] = [
        (10., 20.),
        (14., 22.),
        (30., 40.),
        (50., 60.),
        (70., 90.),
        (11., 25.),
        (80., 30.),
        (95., 35.),
    ];

    #[test]
    fn formulas_by_substitution() {
        let p = generate_prompts(&lm(DISTINCT)).unwrap();
        let pos: Vec<Point2> = p.positives.iter().map(|q| q.point).collect();
        let want: Vec<Point2> = DISTINCT[2..].iter().copied().map(Point2::from).collect();
        assert_eq!(pos, want);

        let neg: Vec<(f64, f64)> = p.negatives.iter().map(|q| (q.point.x, q.point.y)).collect();
        assert_eq!(
            neg,
            vec![(50., 40.), (50., 40.), (70., 60.), (70., 120.), (95., 120.), (12., 21.)]
        );
        assert_eq!(p.warnings, vec![PromptWarning::DuplicateNegative]);
    }

    #[test]
    fn coincident_joint_landmarks() {
        let mut pts = DISTINCT;
        pts[1] = pts[0];
        let p = generate_prompts(&lm(pts)).unwrap();
        assert_eq!(p.negatives[5].point, Point2::from(pts[0]));
    }

    #[test]
    fn level_landmarks_4_and_5() {
        let mut pts = DISTINCT;
        pts[3].1 = pts[4].1;
        let p = generate_prompts(&lm(pts)).unwrap();
        assert_eq!(p.negatives[3].point, Point2::from(pts[4]));
    }

    #[test]
    fn wrong_count_is_rejected() {
        let short = LandmarkSet::new("x", vec![Point2::default(); 2]);
        assert!(matches!(generate_prompts(&short), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn json_payload_shape() {
        let p = generate_prompts(&lm(DISTINCT)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(v["positives"].as_array().unwrap().len(), 6);
        assert_eq!(v["negatives"][3], serde_json::json!([70.0, 120.0]));
        assert_eq!(v.as_object().unwrap().len(), 2);
    }
}
