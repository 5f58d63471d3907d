//! Page composition: shelf placement of sampled crops on a blank canvas,
//! rendering, box remapping, optional label noise, and dataset output.

mod config;
mod generate;
mod noise;
mod plan;
mod render;
mod seed;

pub use config::{load_config, parse_config, GenConfig, LoadedConfig, NoiseConfig, CONFIG_VERSION};
pub use generate::{
    encode_png, generate_dataset, generate_page, page_stem, write_report, GenerateOptions,
    GeneratedPage, GenerationOutput, GenerationReport, OutputFiles, RejectionStats,
    TerminationCounts, REPORT_VERSION, SEED_RULE,
};
pub use noise::{inject_label_noise, JITTER_ATTEMPTS};
pub use plan::{smart_plot, CropRef, Placement, PlacementContext, PlacementPlan, Termination};
pub use render::{render, scaled_pixels, CANVAS_COLOR, RESAMPLE_FILTER};
pub use seed::{page_rng, seed_derive, splitmix64, NOISE_STREAM, PAGE_SEED_MULTIPLIER, PLACEMENT_STREAM};

use std::path::PathBuf;

use thiserror::Error;

use crate::annot_io::{AnnotError, LayoutClass};

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("invalid generation config: {0}")]
    InvalidConfig(String),
    #[error("crop bank has no crops of class {0}, which has a positive weight")]
    EmptyClass(LayoutClass),
    #[error("whole-page pasting requested but the bank holds no whole pages")]
    NoWholePages,
    #[error("no crop of any positive-weight class fits on an empty canvas")]
    UnplaceableConfig,
    #[error("invalid placement plan: {0}")]
    InvalidPlan(String),
    #[error("{}{path}: {source}", page.map(|p| format!("page {p}: ")).unwrap_or_default())]
    Io {
        path: PathBuf,
        page: Option<usize>,
        #[source]
        source: std::io::Error,
    },
    #[error("page {page}: cannot encode image: {message}")]
    Encode { page: usize, message: String },
    #[error("cannot serialize report: {0}")]
    Report(String),
    #[error(transparent)]
    Annot(#[from] AnnotError),
}
