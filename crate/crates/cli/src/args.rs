use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "layout-synth", version, about = "Synthetic document-layout dataset generation and evaluation")]
pub struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Only errors on stderr.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compose synthetic pages from a source dataset or a saved crop bank.
    Generate(GenerateArgs),
    /// Cut element crops from a source dataset and save them as a bank.
    Bank(BankArgs),
    /// Print per-class counts and percentages.
    Stats(StatsArgs),
    /// Check an annotation set; exits 0 only when it has no violations.
    Validate(ValidateArgs),
    /// Convert annotations between manifest CSV, COCO JSON and YOLO labels.
    Convert(ConvertArgs),
    /// Score detections against ground truth (precision, recall, mAP50, mAP50-95).
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnnotFormat {
    /// Manifest CSV: image_path,image_width,image_height,class_label,x_min,y_min,x_max,y_max.
    Manifest,
    /// COCO instances JSON.
    Coco,
    /// Directory of YOLO label files; needs --images for page sizes.
    Yolo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Yolo,
    Coco,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PredFormat {
    /// Directory of `<stem>.txt` files with a sixth confidence column.
    Yolo,
    /// COCO results JSON: [{image_id, category_id, bbox, score}].
    Coco,
}

/// An annotation set on disk.
#[derive(Debug, Clone, Args)]
pub struct DatasetArgs {
    /// Annotation file or YOLO label directory. The format follows the
    /// extension: .csv is a manifest, .json is COCO, a directory is YOLO.
    pub input: PathBuf,
    /// Override the detected input format.
    #[arg(long, value_enum)]
    pub format: Option<AnnotFormat>,
    /// Image directory. Manifest and COCO image paths resolve against it
    /// (default: the annotation file's directory); YOLO reads page sizes
    /// from it.
    #[arg(long)]
    pub images: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Parallelism {
    /// Worker threads; 1 runs sequentially, 0 uses one per core. Outputs do
    /// not depend on this value.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Source annotations (see `bank --help` for formats). Mutually
    /// exclusive with --bank.
    #[arg(long, conflicts_with = "bank", required_unless_present = "bank")]
    pub source: Option<PathBuf>,
    /// Format of --source; detected from the extension when omitted.
    #[arg(long, value_enum, requires = "source")]
    pub source_format: Option<AnnotFormat>,
    /// Image directory for --source.
    #[arg(long, requires = "source")]
    pub images: Option<PathBuf>,
    /// Saved crop bank directory written by `bank`.
    #[arg(long)]
    pub bank: Option<PathBuf>,
    /// Output directory (images/, labels/, annotations.json, report.json).
    #[arg(long, short)]
    pub out: PathBuf,
    /// TOML config file (`version = 1`); flags below override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed. Required unless the config file sets master_seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of pages.
    #[arg(long)]
    pub pages: Option<usize>,
    /// Canvas width in pixels.
    #[arg(long)]
    pub canvas_w: Option<u32>,
    /// Canvas height in pixels.
    #[arg(long)]
    pub canvas_h: Option<u32>,
    /// Minimum spacing between elements in pixels.
    #[arg(long)]
    pub gap: Option<u32>,
    /// Blank border on every side in pixels.
    #[arg(long)]
    pub margin: Option<u32>,
    /// Maximum elements per page.
    #[arg(long)]
    pub max_elements: Option<usize>,
    /// Consecutive failed placements that end a page.
    #[arg(long)]
    pub max_rejections: Option<usize>,
    /// Downscale crops wider than the usable width (true) or reject them (false).
    #[arg(long)]
    pub scale_to_fit: Option<bool>,
    /// Class weights as text,title,list,table,figure; normalized to sum to 1.
    #[arg(long, value_parser = parse_weights)]
    pub weights: Option<[f64; 5]>,
    /// Probability of flipping an element's class to a different one.
    #[arg(long)]
    pub flip_prob: Option<f64>,
    /// Maximum per-corner box jitter in pixels.
    #[arg(long)]
    pub jitter_px: Option<f64>,
    /// Elements smaller than this in either dimension are not cropped.
    #[arg(long)]
    pub min_crop_px: Option<u32>,
    /// Chance that a draw pastes a whole source page instead of a crop.
    #[arg(long)]
    pub whole_page_prob: Option<f64>,
    /// Annotation formats to write.
    #[arg(long, value_enum, default_value_t = OutputFormat::Yolo)]
    pub format: OutputFormat,
    #[command(flatten)]
    pub par: Parallelism,
}

#[derive(Debug, Args)]
pub struct BankArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Bank directory to write.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Elements smaller than this in either dimension are skipped.
    #[arg(long, default_value_t = layout_synth::crop_bank::DEFAULT_MIN_CROP_PX)]
    pub min_crop_px: u32,
    /// Also keep each source page whole, for whole-page pasting.
    #[arg(long)]
    pub whole_pages: bool,
    #[command(flatten)]
    pub par: Parallelism,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Annotation set to summarize.
    #[arg(required_unless_present = "counts")]
    pub input: Option<PathBuf>,
    /// Override the detected input format.
    #[arg(long, value_enum)]
    pub format: Option<AnnotFormat>,
    /// Image directory (YOLO input only).
    #[arg(long)]
    pub images: Option<PathBuf>,
    /// Summarize raw counts text,title,list,table,figure instead of a dataset.
    #[arg(long, value_parser = parse_counts, conflicts_with = "input")]
    pub counts: Option<[u64; 5]>,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Also report overlapping elements.
    #[arg(long)]
    pub no_overlap: bool,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Target format.
    #[arg(long, value_enum)]
    pub to: AnnotFormat,
    /// Output file (manifest, COCO) or label directory (YOLO).
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ground-truth annotations.
    #[arg(long)]
    pub gt: PathBuf,
    /// Override the detected ground-truth format.
    #[arg(long, value_enum)]
    pub gt_format: Option<AnnotFormat>,
    /// Image directory (YOLO ground truth only).
    #[arg(long)]
    pub images: Option<PathBuf>,
    /// Predictions: a YOLO directory or a COCO results JSON file.
    #[arg(long)]
    pub pred: PathBuf,
    /// Override the detected prediction format.
    #[arg(long, value_enum)]
    pub pred_format: Option<PredFormat>,
    /// Confidence threshold for the reported precision and recall.
    #[arg(long, default_value_t = 0.25)]
    pub conf: f64,
    /// Also write the full report as JSON to this file.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub par: Parallelism,
}

fn parse_five<T: std::str::FromStr>(s: &str) -> Result<[T; 5], String>
where
    T::Err: std::fmt::Display,
{
    let parts: Vec<T> = s
        .split(',')
        .map(|p| p.trim().parse::<T>().map_err(|e| format!("`{}`: {e}", p.trim())))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<T>| format!("expected 5 comma-separated values, got {}", v.len()))
}

fn parse_weights(s: &str) -> Result<[f64; 5], String> {
    parse_five(s)
}

fn parse_counts(s: &str) -> Result<[u64; 5], String> {
    parse_five(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn five_values() {
        assert_eq!(parse_counts("1, 2,3,4,5"), Ok([1, 2, 3, 4, 5]));
        assert!(parse_weights("1,2,3").is_err());
        assert!(parse_weights("1,2,3,4,x").is_err());
    }
}
