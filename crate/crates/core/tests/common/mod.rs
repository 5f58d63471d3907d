//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use image::{Rgb, RgbImage};
use layout_synth::annot_io::{AnnotatedPage, ClassMap, Dataset, LayoutClass, LayoutElement, Provenance};
use layout_synth::composer::{GenConfig, PlacementPlan};
use layout_synth::crop_bank::{Crop, CropBank};
use layout_synth::geometry::BBox;
use layout_synth::metrics::{Detection, EvalReport, PredictedPage, Predictions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic, position-dependent pixels; two different crops (or the
/// same crop shifted) never agree on every pixel.
pub fn pattern(w: u32, h: u32, tag: u32) -> RgbImage {
    RgbImage::from_fn(w, h, |x, y| {
        Rgb([
            (x.wrapping_mul(7).wrapping_add(tag) % 251) as u8,
            (y.wrapping_mul(13).wrapping_add(tag / 251) % 241) as u8,
            ((x ^ y).wrapping_add(tag * 31) % 239) as u8,
        ])
    })
}

/// Element size ranges in pixels for a 612x792 single- or two-column page,
/// roughly the proportions of scientific-article layouts.
pub fn size_range(class: LayoutClass) -> ((u32, u32), (u32, u32)) {
    match class {
        LayoutClass::Text => ((240, 520), (30, 220)),
        LayoutClass::Title => ((80, 500), (14, 40)),
        LayoutClass::List => ((230, 500), (60, 300)),
        LayoutClass::Table => ((240, 520), (100, 450)),
        LayoutClass::Figure => ((200, 520), (120, 400)),
    }
}

/// In-memory bank with `per_class` crops of every class.
pub fn synthetic_bank(seed: u64, per_class: usize) -> CropBank {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let crops = LayoutClass::ALL.map(|class| {
        let ((w0, w1), (h0, h1)) = size_range(class);
        (0..per_class)
            .map(|i| {
                let (w, h) = (rng.gen_range(w0..=w1), rng.gen_range(h0..=h1));
                Crop {
                    pixels: pattern(w, h, (class.index() * 1000 + i) as u32),
                    label: class,
                    provenance: Provenance {
                        image_path: format!("src_{i:03}.png"),
                        bbox: BBox::new(10.0, 10.0, 10.0 + w as f64, 10.0 + h as f64).unwrap(),
                    },
                }
            })
            .collect()
    });
    CropBank::from_parts(crops, [0; 5], Vec::new())
}

/// Bank with exactly the given crop sizes for one class (others empty).
pub fn sized_bank(class: LayoutClass, sizes: &[(u32, u32)]) -> CropBank {
    let mut crops: [Vec<Crop>; 5] = Default::default();
    crops[class.index()] = sizes
        .iter()
        .enumerate()
        .map(|(i, &(w, h))| Crop {
            pixels: pattern(w, h, i as u32),
            label: class,
            provenance: Provenance {
                image_path: "src.png".into(),
                bbox: BBox::new(0.0, 0.0, w as f64, h as f64).unwrap(),
            },
        })
        .collect();
    CropBank::from_parts(crops, [0; 5], Vec::new())
}

/// Brute-force layout check over raw coordinates: every box inside the
/// margin-inset canvas, and every pair separated by at least `gap` along x
/// or along y (hence zero-area intersection).
pub fn layout_violations(boxes: &[[f64; 4]], cfg: &GenConfig) -> Vec<String> {
    let m = cfg.margin as f64;
    let (r, b) = ((cfg.canvas_w - cfg.margin) as f64, (cfg.canvas_h - cfg.margin) as f64);
    let gap = cfg.gap as f64;
    let mut out = Vec::new();
    for (i, a) in boxes.iter().enumerate() {
        if !(a[0] >= m && a[1] >= m && a[2] <= r && a[3] <= b && a[0] < a[2] && a[1] < a[3]) {
            out.push(format!("box {i} {a:?} outside [{m}, {m}, {r}, {b}]"));
        }
        for (j, c) in boxes.iter().enumerate().skip(i + 1) {
            let ix = a[2].min(c[2]) - a[0].max(c[0]);
            let iy = a[3].min(c[3]) - a[1].max(c[1]);
            if ix > 0.0 && iy > 0.0 {
                out.push(format!("boxes {i} and {j} overlap"));
            }
            let dx = (c[0] - a[2]).max(a[0] - c[2]);
            let dy = (c[1] - a[3]).max(a[1] - c[3]);
            if dx < gap && dy < gap {
                out.push(format!("boxes {i} and {j} closer than gap {gap}"));
            }
        }
    }
    out
}

pub fn plan_boxes(plan: &PlacementPlan) -> Vec<[f64; 4]> {
    plan.placements.iter().map(|p| p.target.to_xyxy()).collect()
}

pub fn element(b: [f64; 4], class: LayoutClass) -> LayoutElement {
    LayoutElement::new(BBox::new(b[0], b[1], b[2], b[3]).unwrap(), class)
}

pub fn detection(b: [f64; 4], class: LayoutClass, conf: f64) -> Detection {
    Detection::new(BBox::new(b[0], b[1], b[2], b[3]).unwrap(), class, conf).unwrap()
}

/// Random box on a small grid so that exact overlaps and IoU ties occur.
pub fn grid_box<R: Rng>(rng: &mut R, grid: u32, cell: f64) -> [f64; 4] {
    let x0 = rng.gen_range(0..grid - 1);
    let y0 = rng.gen_range(0..grid - 1);
    let x1 = rng.gen_range(x0 + 1..=grid);
    let y1 = rng.gen_range(y0 + 1..=grid);
    [x0 as f64 * cell, y0 as f64 * cell, x1 as f64 * cell, y1 as f64 * cell]
}

pub fn raw_iou(a: [f64; 4], b: [f64; 4]) -> f64 {
    let iw = (a[2].min(b[2]) - a[0].max(b[0])).max(0.0);
    let ih = (a[3].min(b[3]) - a[1].max(b[1])).max(0.0);
    let inter = iw * ih;
    let union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Random page set: up to 6 predictions and 6 ground truths per page on a
/// coarse grid, predictions often jittered copies of ground truths, and
/// confidences from a small set so that ties occur.
pub fn instance(rng: &mut ChaCha8Rng) -> (Predictions, Dataset) {
    let n_pages = rng.gen_range(1..6);
    let classes = rng.gen_range(1..=5);
    let mut gts = Vec::new();
    let mut preds = Vec::new();
    for p in 0..n_pages {
        let mut page = AnnotatedPage::new(format!("p{p}.png"), 100, 100);
        for _ in 0..rng.gen_range(0..=6) {
            page.elements.push(element(grid_box(rng, 10, 10.0), LayoutClass::ALL[rng.gen_range(0..classes)]));
        }
        let mut dets = Vec::new();
        for _ in 0..rng.gen_range(0..=6) {
            let conf = [0.1, 0.25, 0.5, 0.5, 0.8, 0.9, 1.0][rng.gen_range(0..7)];
            let class = LayoutClass::ALL[rng.gen_range(0..classes)];
            let b = if !page.elements.is_empty() && rng.gen_bool(0.6) {
                let g = page.elements[rng.gen_range(0..page.elements.len())].bbox.to_xyxy();
                let mut d = |v: f64| (v + rng.gen_range(-1..=1) as f64 * 5.0).clamp(0.0, 100.0);
                let [x0, y0] = [d(g[0]), d(g[1])];
                let [x1, y1] = [d(g[2]), d(g[3])];
                [x0, y0, x1.max(x0 + 5.0).min(100.0), y1.max(y0 + 5.0).min(100.0)]
            } else {
                grid_box(rng, 10, 10.0)
            };
            let b = if b[0] < b[2] && b[1] < b[3] { b } else { grid_box(rng, 10, 10.0) };
            dets.push(detection(b, class, conf));
        }
        gts.push(page);
        preds.push(PredictedPage {
            image_path: format!("p{p}.png"),
            detections: dets,
        });
    }
    (Predictions { pages: preds }, Dataset::new(gts, ClassMap::default()))
}

pub fn run_oracle(preds: &Predictions, gts: &Dataset, conf: f64) -> oracle::Report {
    let mut ps = Vec::new();
    let mut gs = Vec::new();
    for (i, (p, g)) in preds.pages.iter().zip(&gts.pages).enumerate() {
        for (k, d) in p.detections.iter().enumerate() {
            ps.push(oracle::Pred {
                page: i,
                order: k,
                class: d.label.index(),
                bbox: d.bbox.to_xyxy(),
                conf: d.confidence,
            });
        }
        for e in &g.elements {
            gs.push(oracle::Gt {
                page: i,
                class: e.label.index(),
                bbox: e.bbox.to_xyxy(),
            });
        }
    }
    oracle::evaluate(gts.pages.len(), &ps, &gs, conf)
}

/// Compares every field of the report with the oracle to 1e-9.
pub fn compare_with_oracle(r: &EvalReport, o: &oracle::Report) -> Result<(), String> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;
    let check = |ok: bool, what: String| if ok { Ok(()) } else { Err(what) };
    check(close(r.map50, o.map50), format!("map50 {} vs {}", r.map50, o.map50))?;
    check(close(r.map50_95, o.map50_95), format!("map50_95 {} vs {}", r.map50_95, o.map50_95))?;
    check(close(r.precision, o.precision), format!("precision {} vs {}", r.precision, o.precision))?;
    check(close(r.recall, o.recall), format!("recall {} vs {}", r.recall, o.recall))?;
    for (c, oc) in r.classes.iter().zip(&o.classes) {
        let name = c.class;
        check(c.gt_count == oc.gt && c.pred_count == oc.preds, format!("{name}: counts"))?;
        check(close(c.precision, oc.precision), format!("{name}: precision"))?;
        check(close(c.recall, oc.recall), format!("{name}: recall"))?;
        match (&c.ap, &oc.ap) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                check(a.iter().zip(b).all(|(x, y)| close(*x, *y)), format!("{name}: AP {a:?} vs {b:?}"))?
            }
            _ => return Err(format!("{name}: AP presence differs")),
        }
        for (t, counts) in c.counts.iter().enumerate() {
            let want = (oc.tp[t], oc.preds - oc.tp[t], oc.gt - oc.tp[t]);
            check((counts.tp, counts.fp, counts.fn_) == want, format!("{name}: ledger at threshold {t}"))?;
        }
    }
    Ok(())
}
/// Straightforward evaluator written independently of the library: greedy
/// matching by a full rescan per prediction, AP by explicit evaluation of
/// the interpolated precision at each of the 101 recall levels.
pub mod oracle {
    use super::raw_iou;

    pub struct Pred {
        pub page: usize,
        pub order: usize,
        pub class: usize,
        pub bbox: [f64; 4],
        pub conf: f64,
    }

    pub struct Gt {
        pub page: usize,
        pub class: usize,
        pub bbox: [f64; 4],
    }

    pub const THRESHOLDS: [f64; 10] = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95];

    pub struct ClassResult {
        pub gt: usize,
        pub preds: usize,
        pub ap: Option<[f64; 10]>,
        pub tp: [usize; 10],
        pub precision: f64,
        pub recall: f64,
    }

    pub struct Report {
        pub classes: Vec<ClassResult>,
        pub map50: f64,
        pub map50_95: f64,
        pub precision: f64,
        pub recall: f64,
    }

    /// Returns for each prediction (in the order given) whether it is a TP.
    fn greedy(preds: &[&Pred], gts: &[&Gt], thresh: f64) -> Vec<bool> {
        let mut idx: Vec<usize> = (0..preds.len()).collect();
        // selection by repeated max search: highest confidence, earliest order
        let mut ordered = Vec::new();
        while !idx.is_empty() {
            let mut best = 0;
            for k in 1..idx.len() {
                let (p, q) = (preds[idx[k]], preds[idx[best]]);
                if p.conf > q.conf || (p.conf == q.conf && p.order < q.order) {
                    best = k;
                }
            }
            ordered.push(idx.remove(best));
        }
        let mut used = vec![false; gts.len()];
        let mut tp = vec![false; preds.len()];
        for pi in ordered {
            let mut best: Option<usize> = None;
            let mut best_iou = -1.0;
            for (gi, g) in gts.iter().enumerate() {
                if used[gi] {
                    continue;
                }
                let iou = raw_iou(preds[pi].bbox, g.bbox);
                if iou >= thresh && iou > best_iou {
                    best = Some(gi);
                    best_iou = iou;
                }
            }
            if let Some(gi) = best {
                used[gi] = true;
                tp[pi] = true;
            }
        }
        tp
    }

    pub fn evaluate(n_pages: usize, preds: &[Pred], gts: &[Gt], conf_thresh: f64) -> Report {
        let mut classes = Vec::new();
        for c in 0..5 {
            let n_gt = gts.iter().filter(|g| g.class == c).count();
            let class_preds: Vec<&Pred> = preds.iter().filter(|p| p.class == c).collect();
            let mut ap = [0.0; 10];
            let mut tps = [0usize; 10];
            let mut pr = (0.0, 0.0);
            for (t, &thresh) in THRESHOLDS.iter().enumerate() {
                // (conf, page, order, tp)
                let mut outcome: Vec<(f64, usize, usize, bool)> = Vec::new();
                for page in 0..n_pages {
                    let pp: Vec<&Pred> = class_preds.iter().copied().filter(|p| p.page == page).collect();
                    let pg: Vec<&Gt> = gts.iter().filter(|g| g.page == page && g.class == c).collect();
                    for (p, tp) in pp.iter().zip(greedy(&pp, &pg, thresh)) {
                        outcome.push((p.conf, p.page, p.order, tp));
                    }
                }
                tps[t] = outcome.iter().filter(|o| o.3).count();
                if t == 0 {
                    let kept: Vec<_> = outcome.iter().filter(|o| o.0 >= conf_thresh).collect();
                    let k_tp = kept.iter().filter(|o| o.3).count() as f64;
                    pr.0 = if kept.is_empty() { 0.0 } else { k_tp / kept.len() as f64 };
                    pr.1 = if n_gt == 0 { 0.0 } else { k_tp / n_gt as f64 };
                }
                outcome.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
                let mut points = Vec::new();
                let mut tp = 0.0;
                for (k, o) in outcome.iter().enumerate() {
                    if o.3 {
                        tp += 1.0;
                    }
                    // a threshold at this confidence admits the whole tie group
                    let group_end = outcome.get(k + 1).is_none_or(|next| next.0 != o.0);
                    if group_end {
                        points.push((tp / n_gt.max(1) as f64, tp / (k + 1) as f64));
                    }
                }
                let mut sum = 0.0;
                for level in 0..=100 {
                    let r = level as f64 / 100.0;
                    let best = points
                        .iter()
                        .filter(|(rec, _)| *rec >= r)
                        .map(|(_, p)| *p)
                        .fold(0.0, f64::max);
                    sum += best;
                }
                ap[t] = sum / 101.0;
            }
            classes.push(ClassResult {
                gt: n_gt,
                preds: class_preds.len(),
                ap: (n_gt > 0).then_some(ap),
                tp: tps,
                precision: pr.0,
                recall: pr.1,
            });
        }
        let scored: Vec<&ClassResult> = classes.iter().filter(|c| c.ap.is_some()).collect();
        let n = scored.len() as f64;
        let mean = |f: &dyn Fn(&ClassResult) -> f64| {
            if scored.is_empty() {
                0.0
            } else {
                scored.iter().map(|c| f(c)).sum::<f64>() / n
            }
        };
        Report {
            map50: mean(&|c| c.ap.unwrap()[0]),
            map50_95: mean(&|c| c.ap.unwrap().iter().sum::<f64>() / 10.0),
            precision: mean(&|c| c.precision),
            recall: mean(&|c| c.recall),
            classes,
        }
    }
}
