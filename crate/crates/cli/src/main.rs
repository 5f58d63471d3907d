//! `layout-synth` command-line front end.
//!
//! Exit codes: 0 success, 1 data error (unreadable or invalid input, failed
//! generation, validation violations), 2 usage error (bad flags, missing
//! paths, no seed).

mod args;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use layout_synth::annot_io::{
    self, ClassMap, CocoIds, CocoOptions, Dataset, ValidatePolicy,
};
use layout_synth::composer::{self, GenConfig, GenerateOptions};
use layout_synth::crop_bank::{self, BankOptions, ClassWeights, CropBank};
use layout_synth::metrics::{self, EvalOptions};
use layout_synth::stats::{self, ClassDistribution};
use layout_synth::Exec;

use args::{
    AnnotFormat, BankArgs, Cli, Command, ConvertArgs, DatasetArgs, EvaluateArgs, GenerateArgs, OutputFormat,
    PredFormat, StatsArgs, ValidateArgs,
};

/// An error in how the tool was invoked rather than in the data.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => "error",
        (_, 0) => "warn",
        (_, 1) => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    match run(cli.command) {
        Ok(code) => code,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Bank(a) => cmd_bank(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Evaluate(a) => cmd_evaluate(a),
    }
}

fn require_exists(path: &Path, what: &str) -> Result<()> {
    if !path.exists() {
        return usage(format!("{what} {} does not exist", path.display()));
    }
    Ok(())
}

fn detect_format(path: &Path, explicit: Option<AnnotFormat>) -> Result<AnnotFormat> {
    if let Some(f) = explicit {
        return Ok(f);
    }
    if path.is_dir() {
        return Ok(AnnotFormat::Yolo);
    }
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("csv") => Ok(AnnotFormat::Manifest),
        Some("json") => Ok(AnnotFormat::Coco),
        _ => usage(format!(
            "cannot tell the format of {}; pass --format manifest|coco|yolo",
            path.display()
        )),
    }
}

/// A dataset read from disk, with the directory its image paths resolve against.
struct Loaded {
    dataset: Dataset,
    image_root: PathBuf,
    coco_ids: Option<CocoIds>,
}

fn load_dataset(input: &Path, format: Option<AnnotFormat>, images: Option<&Path>) -> Result<Loaded> {
    require_exists(input, "input")?;
    if let Some(dir) = images {
        require_exists(dir, "image directory")?;
    }
    let format = detect_format(input, format)?;
    let parent = || input.parent().map(Path::to_path_buf).unwrap_or_default();
    let image_root = images.map(Path::to_path_buf).unwrap_or_else(parent);
    let (dataset, coco_ids) = match format {
        AnnotFormat::Manifest => (annot_io::parse_manifest(input)?, None),
        AnnotFormat::Coco => {
            let (d, ids) = annot_io::read_coco_with_ids(input, &CocoOptions::default())?;
            (d, Some(ids))
        }
        AnnotFormat::Yolo => {
            let Some(images) = images else {
                return usage("YOLO labels need --images for page sizes");
            };
            (annot_io::read_yolo_labels(input, images, &ClassMap::default())?, None)
        }
    };
    log::info!(
        "{}: {} pages, {} elements",
        input.display(),
        dataset.pages.len(),
        dataset.element_count()
    );
    Ok(Loaded {
        dataset,
        image_root,
        coco_ids,
    })
}

fn load_from(a: &DatasetArgs) -> Result<Loaded> {
    load_dataset(&a.input, a.format, a.images.as_deref())
}

fn print_bank_summary(bank: &CropBank) {
    let s = bank.summary();
    println!("{:<8} {:>8} {:>8}", "Class", "Crops", "Skipped");
    for (class, n) in s.crops.iter() {
        println!("{:<8} {:>8} {:>8}", class.display_name(), n, s.skipped.get(class));
    }
    if s.whole_pages > 0 {
        println!("whole pages: {}", s.whole_pages);
    }
}

fn resolve_config(a: &GenerateArgs) -> Result<GenConfig> {
    let (mut cfg, seed_in_file) = match &a.config {
        Some(path) => {
            require_exists(path, "config file")?;
            let loaded = composer::load_config(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            (loaded.config, loaded.seed_given)
        }
        None => (GenConfig::default(), false),
    };
    match a.seed {
        Some(s) => cfg.master_seed = s,
        None if seed_in_file => {}
        None => return usage("generate needs a seed: pass --seed or set master_seed in the config file"),
    }
    macro_rules! set {
        ($($flag:ident => $field:ident),* $(,)?) => {
            $(if let Some(v) = a.$flag { cfg.$field = v; })*
        };
    }
    set!(
        pages => page_count,
        canvas_w => canvas_w,
        canvas_h => canvas_h,
        gap => gap,
        margin => margin,
        max_elements => max_elements_per_page,
        max_rejections => max_rejections,
        scale_to_fit => scale_to_fit,
        min_crop_px => min_crop_px,
        whole_page_prob => whole_page_prob,
    );
    if let Some(p) = a.flip_prob {
        cfg.noise.class_flip_prob = p;
    }
    if let Some(j) = a.jitter_px {
        cfg.noise.bbox_jitter_px = j;
    }
    if let Some(w) = a.weights {
        cfg.class_weights = ClassWeights::normalized(w).map_err(|e| UsageError(format!("--weights: {e}")))?;
    }
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(cfg)
}

fn cmd_generate(a: GenerateArgs) -> Result<ExitCode> {
    let cfg = resolve_config(&a)?;
    let exec = Exec::from_workers(a.par.workers);

    let bank = match (&a.bank, &a.source) {
        (Some(dir), _) => {
            require_exists(dir, "bank directory")?;
            crop_bank::load_bank(dir)?
        }
        (None, Some(source)) => {
            let loaded = load_dataset(source, a.source_format, a.images.as_deref())?;
            let opts = BankOptions {
                min_crop_px: cfg.min_crop_px,
                whole_pages: cfg.whole_page_prob > 0.0,
            };
            crop_bank::build_bank(&loaded.dataset, &loaded.image_root, opts, exec)?
        }
        (None, None) => unreachable!("clap requires --source or --bank"),
    };
    if bank.is_empty() {
        bail!("empty crop bank: the source holds no element of at least {} px", cfg.min_crop_px);
    }

    let opts = GenerateOptions {
        exec,
        write_yolo: matches!(a.format, OutputFormat::Yolo | OutputFormat::Both),
        write_coco: matches!(a.format, OutputFormat::Coco | OutputFormat::Both),
    };
    let out = composer::generate_dataset(&bank, &cfg, &a.out, opts)
        .with_context(|| format!("generation into {} failed (see report.json there)", a.out.display()))?;

    let report = &out.report;
    println!(
        "wrote {} pages to {} (seed {})",
        report.pages,
        a.out.display(),
        report.master_seed
    );
    if let Some(s) = &report.stats {
        print!("{}", s.distribution.table());
        println!(
            "mean elements per page {:.2}, mean fill ratio {:.3}, rejections {}",
            s.mean_elements_per_page, s.mean_fill_ratio, report.rejections.total
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bank(a: BankArgs) -> Result<ExitCode> {
    let loaded = load_from(&a.data)?;
    let opts = BankOptions {
        min_crop_px: a.min_crop_px,
        whole_pages: a.whole_pages,
    };
    let bank = crop_bank::build_bank(&loaded.dataset, &loaded.image_root, opts, Exec::from_workers(a.par.workers))?;
    if bank.is_empty() {
        bail!("empty crop bank: no element of at least {} px", a.min_crop_px);
    }
    crop_bank::save_bank(&bank, &a.out)?;
    println!("saved {} crops to {}", bank.total(), a.out.display());
    print_bank_summary(&bank);
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats(a: StatsArgs) -> Result<ExitCode> {
    if let Some(counts) = a.counts {
        let d = ClassDistribution::from_counts(counts);
        if a.json {
            println!("{}", serde_json::to_string_pretty(&d)?);
        } else {
            print!("{}", d.table());
        }
        return Ok(ExitCode::SUCCESS);
    }
    let input = a.input.as_deref().expect("clap requires input or --counts");
    let loaded = load_dataset(input, a.format, a.images.as_deref())?;
    let s = stats::class_distribution(&loaded.dataset);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&s)?);
    } else {
        print!("{}", s.distribution.table());
        println!(
            "pages {}, mean elements per page {:.2}, mean fill ratio {:.3}",
            s.pages, s.mean_elements_per_page, s.mean_fill_ratio
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(a: ValidateArgs) -> Result<ExitCode> {
    let loaded = load_from(&a.data)?;
    let violations = annot_io::validate(
        &loaded.dataset,
        ValidatePolicy {
            no_overlap: a.no_overlap,
        },
    );
    let pages = &loaded.dataset.pages;
    for v in &violations {
        // page indices are positional; the image path locates them on disk
        let page = match v {
            annot_io::Violation::ZeroPageDimension { page }
            | annot_io::Violation::DuplicateImagePath { page, .. }
            | annot_io::Violation::OutOfPage { page, .. }
            | annot_io::Violation::NonPositiveArea { page, .. }
            | annot_io::Violation::UnknownClass { page, .. }
            | annot_io::Violation::Overlap { page, .. } => *page,
        };
        println!("{}: {v}", pages[page].image_path);
    }
    if violations.is_empty() {
        println!(
            "ok: {} pages, {} elements",
            pages.len(),
            loaded.dataset.element_count()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} violations", violations.len());
        Ok(ExitCode::from(1))
    }
}

fn cmd_convert(a: ConvertArgs) -> Result<ExitCode> {
    let loaded = load_from(&a.data)?;
    let d = &loaded.dataset;
    match a.to {
        AnnotFormat::Manifest => annot_io::write_manifest(d, &a.out)?,
        AnnotFormat::Coco => annot_io::write_coco(d, &a.out)?,
        AnnotFormat::Yolo => annot_io::write_yolo_labels(d, &a.out)?,
    }
    println!(
        "wrote {} pages, {} elements to {}",
        d.pages.len(),
        d.element_count(),
        a.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<ExitCode> {
    if !(0.0..=1.0).contains(&a.conf) {
        return usage(format!("--conf {} outside [0, 1]", a.conf));
    }
    let loaded = load_dataset(&a.gt, a.gt_format, a.images.as_deref())?;
    let gts = &loaded.dataset;
    require_exists(&a.pred, "predictions")?;
    let pred_format = match a.pred_format {
        Some(f) => f,
        None if a.pred.is_dir() => PredFormat::Yolo,
        None => PredFormat::Coco,
    };
    let preds = match pred_format {
        PredFormat::Yolo => metrics::read_yolo_predictions(&a.pred, gts, &gts.class_map)?,
        PredFormat::Coco => {
            let ids = loaded.coco_ids.clone().unwrap_or_else(|| CocoIds::sequential(gts));
            metrics::read_coco_results(&a.pred, gts, &ids)?
        }
    };
    let report = metrics::evaluate(
        &preds,
        gts,
        EvalOptions {
            conf_thresh: a.conf,
            exec: Exec::from_workers(a.par.workers),
        },
    );
    print!("{}", report.table());
    if !report.page_mismatch.is_empty() {
        println!(
            "evaluated {} shared pages; {} only in predictions, {} only in ground truth",
            report.pages_evaluated,
            report.page_mismatch.only_in_predictions.len(),
            report.page_mismatch.only_in_ground_truth.len()
        );
    }
    if let Some(path) = &a.json {
        let json = serde_json::to_string_pretty(&report)?;
        fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}
