use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ssr", version, about = "Landmark decoding from heatmaps with shape subspace refinement")]
pub struct Cli {
    /// Worker threads for batch commands (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decode heatmap files into a landmark CSV.
    Refine(RefineArgs),
    /// Joint-space length per image from a landmark CSV.
    Measure(MeasureArgs),
    /// Compare predictions with ground truth, per fold.
    Evaluate(EvaluateArgs),
    /// Run the synthetic spurious-peak experiment.
    Simulate(SimulateArgs),
    /// Segmentation point prompts from eight-landmark sets.
    Prompts(PromptsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    Unbiased,
    Ratio,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StdArg {
    Population,
    Sample,
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    /// `.hmt` heatmap files; the file stem becomes the image_id.
    pub heatmaps: Vec<PathBuf>,
    /// JSON run configuration. Flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Training landmark CSV the reference bank is sampled from.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Output landmark CSV (stdout if omitted).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub image_width: Option<usize>,
    #[arg(long)]
    pub image_height: Option<usize>,
    /// Plain argmax decoding, no refinement.
    #[arg(long)]
    pub no_ssr: bool,
    /// Sample a separate reference bank for every image.
    #[arg(long)]
    pub resample_bank_per_image: bool,
    #[arg(long)]
    pub sampling_fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Maximum number of candidate combinations per image.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub value_ratio: Option<f64>,
    #[arg(long)]
    pub min_distance: Option<f64>,
    #[arg(long)]
    pub max_candidates: Option<usize>,
    #[arg(long, value_enum)]
    pub scale_convention: Option<ConventionArg>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Landmark CSV.
    pub landmarks: PathBuf,
    #[arg(long, default_value_t = ssr_core::metrics::DEFAULT_MM_PER_PIXEL)]
    pub mm_per_pixel: f64,
    /// 1-based landmark pair spanning the joint space.
    #[arg(long, num_args = 2, value_names = ["A", "B"], default_values_t = [1, 2])]
    pub pair: Vec<usize>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    /// Fold spec JSON files; without any, all images form one fold.
    #[arg(long, num_args = 1..)]
    pub folds: Vec<PathBuf>,
    /// Separator between participant id and the rest of an image_id.
    #[arg(long, default_value_t = '_')]
    pub participant_delimiter: char,
    #[arg(long, default_value_t = ssr_core::metrics::DEFAULT_MM_PER_PIXEL)]
    pub mm_per_pixel: f64,
    /// 1-based landmark pair spanning the joint space.
    #[arg(long, num_args = 2, value_names = ["A", "B"], default_values_t = [1, 2])]
    pub pair: Vec<usize>,
    #[arg(long, value_enum, default_value_t = StdArg::Population)]
    pub std: StdArg,
    /// Report as JSON (stdout if neither output is given).
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Harness configuration JSON. Flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Spurious-peak rates to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1, 0.3, 0.6])]
    pub rho: Vec<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of test images.
    #[arg(long)]
    pub images: Option<usize>,
    /// Number of training shapes the reference bank is drawn from.
    #[arg(long)]
    pub train_samples: Option<usize>,
    /// Experiment table CSV (stdout if omitted).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Experiment table as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Write every injected heatmap stack into this directory.
    #[arg(long)]
    pub dump_heatmaps: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PromptsArgs {
    /// Eight-landmark CSV.
    pub landmarks: PathBuf,
    /// Only this image.
    #[arg(long)]
    pub image: Option<String>,
    /// Output file for a single image (stdout if omitted).
    #[arg(long, short, conflicts_with = "out_dir")]
    pub out: Option<PathBuf>,
    /// Write `<image_id>.json` per image into this directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
