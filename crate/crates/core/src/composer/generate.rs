//! Whole-dataset generation.
//!
//! Output layout under `out_dir`:
//!
//! ```text
//! images/page_000000.png      composite pages
//! labels/page_000000.txt      YOLO labels (default class ids)
//! annotations.json            COCO annotations (optional)
//! report.json                 config echo, seed, class statistics, rejections
//! ```
//!
//! Every page is a pure function of `(bank, config, page index)`, so the
//! output is byte-identical for any worker count.

use std::fs;
use std::path::{Path, PathBuf};

use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder, RgbImage};
use serde::Serialize;

use super::noise::inject_label_noise;
use super::plan::{PlacementContext, PlacementPlan, Termination};
use super::render::render;
use super::seed::{page_rng, seed_derive, NOISE_STREAM};
use super::{ComposeError, GenConfig};
use crate::annot_io::{self, AnnotatedPage, ClassMap, Dataset, LayoutElement, PerClass};
use crate::crop_bank::{BankSummary, CropBank};
use crate::par::Exec;
use crate::stats::{class_distribution, DatasetStats};

pub const REPORT_VERSION: u32 = 1;
pub const SEED_RULE: &str =
    "page_seed = splitmix64(master_seed ^ page_index * 0xD1B54A32D192ED03); ChaCha8 stream 0 = placement, stream 1 = noise";

pub fn page_stem(index: usize) -> String {
    format!("page_{index:06}")
}

/// One composed page, before anything is written.
#[derive(Debug, Clone)]
pub struct GeneratedPage {
    pub plan: PlacementPlan,
    pub image: RgbImage,
    /// Elements as rendered, before label noise.
    pub clean: Vec<LayoutElement>,
    /// Final labels (equal to `clean` when noise is off).
    pub elements: Vec<LayoutElement>,
}

pub fn generate_page(ctx: &PlacementContext<'_>, index: usize) -> Result<GeneratedPage, ComposeError> {
    let cfg = ctx.config();
    let seed = seed_derive(cfg.master_seed, index as u64);
    let plan = ctx.plan_page(index, seed);
    let (image, clean) = render(&plan, ctx.bank(), cfg)?;
    let elements = if cfg.noise.is_off() {
        clean.clone()
    } else {
        let mut rng = page_rng(seed, NOISE_STREAM);
        inject_label_noise(&clean, &cfg.noise, cfg.canvas_w, cfg.canvas_h, &mut rng)
    };
    Ok(GeneratedPage {
        plan,
        image,
        clean,
        elements,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerateOptions {
    pub exec: Exec,
    pub write_yolo: bool,
    pub write_coco: bool,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            exec: Exec::Auto,
            write_yolo: true,
            write_coco: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TerminationCounts {
    pub max_elements: usize,
    pub max_rejections: usize,
    pub vertical_exhaustion: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RejectionStats {
    pub total: usize,
    pub mean_per_page: f64,
    pub max_per_page: usize,
    pub terminations: TerminationCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFiles {
    pub images: String,
    pub labels: Option<String>,
    pub coco: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationReport {
    pub report_version: u32,
    /// `complete` or `failed`; a failed run may leave partial outputs.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub master_seed: u64,
    pub seed_rule: String,
    pub config: GenConfig,
    pub bank: BankSummary,
    pub pages: usize,
    /// Elements per class as placed, before label noise.
    pub placed: PerClass<u64>,
    /// Statistics of the final (possibly noisy) labels.
    pub stats: Option<DatasetStats>,
    pub rejections: RejectionStats,
    pub outputs: OutputFiles,
}

#[derive(Debug, Clone)]
pub struct GenerationOutput {
    pub dataset: Dataset,
    pub plans: Vec<PlacementPlan>,
    pub report: GenerationReport,
}

fn io_err(path: &Path, page: Option<usize>, source: std::io::Error) -> ComposeError {
    ComposeError::Io {
        path: path.to_path_buf(),
        page,
        source,
    }
}

pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>, image::ImageError> {
    let mut buf = Vec::new();
    PngEncoder::new(&mut buf).write_image(img.as_raw(), img.width(), img.height(), ExtendedColorType::Rgb8)?;
    Ok(buf)
}

struct PageResult {
    page: AnnotatedPage,
    plan: PlacementPlan,
    placed: [u64; 5],
}

pub fn generate_dataset(
    bank: &CropBank,
    cfg: &GenConfig,
    out_dir: impl AsRef<Path>,
    opts: GenerateOptions,
) -> Result<GenerationOutput, ComposeError> {
    let out_dir = out_dir.as_ref();
    let ctx = PlacementContext::new(bank, cfg)?;

    let images_dir = out_dir.join("images");
    let labels_dir = out_dir.join("labels");
    fs::create_dir_all(&images_dir).map_err(|e| io_err(&images_dir, None, e))?;
    if opts.write_yolo {
        fs::create_dir_all(&labels_dir).map_err(|e| io_err(&labels_dir, None, e))?;
    }
    let class_map = ClassMap::default();

    let mut report = GenerationReport {
        report_version: REPORT_VERSION,
        status: "complete".into(),
        error: None,
        master_seed: cfg.master_seed,
        seed_rule: SEED_RULE.into(),
        config: cfg.clone(),
        bank: bank.summary(),
        pages: 0,
        placed: PerClass::default(),
        stats: None,
        rejections: RejectionStats::default(),
        outputs: OutputFiles {
            images: "images/".into(),
            labels: opts.write_yolo.then(|| "labels/".into()),
            coco: opts.write_coco.then(|| "annotations.json".into()),
        },
    };

    let results: Result<Vec<PageResult>, ComposeError> = opts.exec.try_map(cfg.page_count, |i| {
        let generated = generate_page(&ctx, i)?;
        let stem = page_stem(i);
        let file_name = format!("{stem}.png");

        let png = encode_png(&generated.image).map_err(|e| ComposeError::Encode {
            page: i,
            message: e.to_string(),
        })?;
        let image_path = images_dir.join(&file_name);
        fs::write(&image_path, png).map_err(|e| io_err(&image_path, Some(i), e))?;

        let mut page = AnnotatedPage::new(file_name, cfg.canvas_w, cfg.canvas_h);
        page.elements = generated.elements;
        if opts.write_yolo {
            let text = annot_io::page_label_text(&page, &class_map)?;
            let label_path = labels_dir.join(format!("{stem}.txt"));
            fs::write(&label_path, text).map_err(|e| io_err(&label_path, Some(i), e))?;
        }

        let mut placed = [0u64; 5];
        for el in &generated.clean {
            placed[el.label.index()] += 1;
        }
        Ok(PageResult {
            page,
            plan: generated.plan,
            placed,
        })
    });

    let results = match results {
        Ok(r) => r,
        Err(e) => {
            report.status = "failed".into();
            report.error = Some(e.to_string());
            // best effort: the original error matters more than a report write failure
            let _ = write_report(&report, out_dir);
            return Err(e);
        }
    };

    let mut pages = Vec::with_capacity(results.len());
    let mut plans = Vec::with_capacity(results.len());
    for r in results {
        for (total, n) in report.placed.0.iter_mut().zip(r.placed) {
            *total += n;
        }
        let rej = &mut report.rejections;
        rej.total += r.plan.rejections;
        rej.max_per_page = rej.max_per_page.max(r.plan.rejections);
        match r.plan.termination {
            Termination::MaxElements => rej.terminations.max_elements += 1,
            Termination::MaxRejections => rej.terminations.max_rejections += 1,
            Termination::VerticalExhaustion => rej.terminations.vertical_exhaustion += 1,
        }
        pages.push(r.page);
        plans.push(r.plan);
    }
    report.pages = pages.len();
    report.rejections.mean_per_page = report.rejections.total as f64 / pages.len() as f64;

    let dataset = Dataset::new(pages, class_map);
    report.stats = Some(class_distribution(&dataset));

    if opts.write_coco {
        annot_io::write_coco(&dataset, out_dir.join("annotations.json"))?;
    }
    write_report(&report, out_dir)?;

    Ok(GenerationOutput {
        dataset,
        plans,
        report,
    })
}

pub fn write_report(report: &GenerationReport, out_dir: &Path) -> Result<PathBuf, ComposeError> {
    let path = out_dir.join("report.json");
    let json = serde_json::to_string_pretty(report).map_err(|e| ComposeError::Report(e.to_string()))?;
    fs::write(&path, json + "\n").map_err(|e| io_err(&path, None, e))?;
    Ok(path)
}
