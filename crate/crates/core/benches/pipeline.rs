//! Sequential vs rayon execution of the three data-parallel stages: page
//! composition, crop extraction, and per-page detection matching.
//!
//! `cargo bench -p layout-synth` runs both strategies; with
//! `--no-default-features` the parallel variant runs sequentially too.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use image::{Rgb, RgbImage};
use layout_synth::annot_io::{AnnotatedPage, ClassMap, Dataset, LayoutClass, LayoutElement, Provenance};
use layout_synth::composer::{generate_page, GenConfig, PlacementContext};
use layout_synth::crop_bank::{build_bank, BankOptions, Crop, CropBank};
use layout_synth::metrics::{evaluate, Detection, EvalOptions, PredictedPage, Predictions};
use layout_synth::{BBox, Exec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel { workers: 0 })];

fn textured(w: u32, h: u32, seed: u32) -> RgbImage {
    RgbImage::from_fn(w, h, |x, y| Rgb([(x + seed) as u8, (y * 3) as u8, ((x ^ y) + seed) as u8]))
}

fn bank(per_class: usize) -> CropBank {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let crops = LayoutClass::ALL.map(|label| {
        (0..per_class)
            .map(|i| {
                let (w, h) = (rng.gen_range(80..520), rng.gen_range(20..300));
                Crop {
                    pixels: textured(w, h, i as u32),
                    label,
                    provenance: Provenance {
                        image_path: "src.png".into(),
                        bbox: BBox::new(0.0, 0.0, w as f64, h as f64).unwrap(),
                    },
                }
            })
            .collect()
    });
    CropBank::from_parts(crops, [0; 5], Vec::new())
}

fn bench_compose(c: &mut Criterion) {
    let bank = bank(30);
    let cfg = GenConfig::default();
    let ctx = PlacementContext::new(&bank, &cfg).unwrap();
    let mut group = c.benchmark_group("compose_32_pages");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exec.map(32, |i| black_box(generate_page(&ctx, i).unwrap().elements.len())))
        });
    }
    group.finish();
}

fn bench_bank(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    let mut pages = Vec::new();
    for i in 0..24 {
        let name = format!("p{i}.png");
        textured(1224, 1584, i).save(dir.path().join(&name)).unwrap();
        let mut page = AnnotatedPage::new(name, 1224, 1584);
        for (k, class) in LayoutClass::ALL.into_iter().enumerate() {
            let y = 40.0 + 300.0 * k as f64;
            page.elements.push(LayoutElement::new(BBox::new(40.0, y, 1180.0, y + 260.0).unwrap(), class));
        }
        pages.push(page);
    }
    let d = Dataset::new(pages, ClassMap::default());
    let mut group = c.benchmark_group("build_bank_24_pages");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(build_bank(&d, dir.path(), BankOptions::default(), exec).unwrap().total()))
        });
    }
    group.finish();
}

fn bench_evaluate(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut gts = Vec::new();
    let mut preds = Vec::new();
    for i in 0..500 {
        let mut page = AnnotatedPage::new(format!("{i}.png"), 1000, 1000);
        let mut detections = Vec::new();
        for k in 0..40 {
            let (x, y) = ((k % 8) as f64 * 120.0, (k / 8) as f64 * 190.0);
            let b = BBox::new(x, y, x + 100.0, y + 150.0).unwrap();
            let class = LayoutClass::ALL[rng.gen_range(0..5)];
            page.elements.push(LayoutElement::new(b, class));
            let d = rng.gen_range(-20.0..20.0);
            let shifted = BBox::new(x + 20.0 + d, y + 20.0 + d, x + 120.0 + d, y + 170.0 + d).unwrap();
            detections.push(Detection::new(shifted, class, rng.gen_range(0.0..1.0)).unwrap());
        }
        preds.push(PredictedPage {
            image_path: page.image_path.clone(),
            detections,
        });
        gts.push(page);
    }
    let gts = Dataset::new(gts, ClassMap::default());
    let preds = Predictions { pages: preds };
    let mut group = c.benchmark_group("evaluate_500_pages");
    for (name, exec) in STRATEGIES {
        let opts = EvalOptions {
            exec,
            ..EvalOptions::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(evaluate(&preds, &gts, opts).map50_95))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_compose, bench_bank, bench_evaluate);
criterion_main!(benches);
