//! Landmark refinement for medial-elbow ultrasound heatmaps.
//!
//! Heatmap channels are decoded into candidate peaks; when a landmark has
//! several plausible peaks, the combination whose shape subspace best matches
//! a bank of training shapes is kept (shape subspace refinement, SSR). The
//! crate also covers sub-pixel decoding, joint-space metrics in millimetres,
//! segmentation point prompts, a synthetic experiment harness and the
//! `.hmt` / landmark-CSV file formats.

pub mod error;
pub mod harness;
pub mod heatmap;
pub mod io;
pub mod landmarks;
pub mod metrics;
pub mod point;
pub mod prompts;
pub mod ssr;
pub mod subspace;

pub use error::{Error, Result};
pub use heatmap::{
    argmax_decode, extract_candidates, heatmap_to_image, image_to_heatmap, subpixel_refine,
    Candidate, CandidateSet, DecodeConfig, Dims, HeatmapStack, Peak, RefinedPeak, ScaleConvention,
};
pub use landmarks::LandmarkSet;
pub use metrics::{
    ede, fold_report, limit_of_detection, mae_per_landmark, MeasurementReport, ScaleConfig,
};
pub use point::Point2;
pub use prompts::{generate_prompts, PromptSet};
pub use ssr::{
    build_reference_bank, decode_landmarks, enumerate_combinations, refine_landmarks, ssr_select,
    Combination, ReferenceBank, RefinedLandmarks, Selection, SsrConfig,
};
pub use subspace::{
    center_shape_matrix, mean_similarity, shape_subspace_basis, subspace_similarity, ShapeMatrix,
    SubspaceBasis,
};
