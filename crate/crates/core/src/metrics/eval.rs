use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use super::ap::average_precision;
use super::matching::{match_detections, MatchCounts, MatchLedger};
use super::{Predictions, IOU_THRESHOLDS};
use crate::annot_io::{Dataset, LayoutClass};
use crate::par::Exec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Operating point for the reported precision and recall.
    pub conf_thresh: f64,
    pub exec: Exec,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            conf_thresh: 0.25,
            exec: Exec::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassEval {
    pub class: LayoutClass,
    pub gt_count: usize,
    pub pred_count: usize,
    /// At IoU 0.50 over predictions with confidence `>= conf_thresh`; 0 when
    /// there are no such predictions.
    pub precision: f64,
    pub recall: f64,
    /// AP at each of [`IOU_THRESHOLDS`]; `None` when the class has no ground
    /// truth (such classes are left out of every mean).
    pub ap: Option<Vec<f64>>,
    pub ap50: Option<f64>,
    pub ap50_95: Option<f64>,
    /// TP/FP/FN at each IoU threshold, over all predictions.
    pub counts: Vec<MatchCounts>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PageSetMismatch {
    pub only_in_predictions: Vec<String>,
    pub only_in_ground_truth: Vec<String>,
}

impl PageSetMismatch {
    pub fn is_empty(&self) -> bool {
        self.only_in_predictions.is_empty() && self.only_in_ground_truth.is_empty()
    }
}

/// Per-class and aggregate detection metrics. `map50_95` is the COCO-style
/// mean over IoU thresholds 0.50:0.05:0.95.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub map50: f64,
    pub map50_95: f64,
    pub conf_thresh: f64,
    pub iou_thresholds: Vec<f64>,
    pub pages_evaluated: usize,
    pub classes: Vec<ClassEval>,
    pub page_mismatch: PageSetMismatch,
}

impl EvalReport {
    /// Text table with Precision, Recall, mAP50, mAP50-95 columns, one row
    /// per class plus an `all` row.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:>7} {:>7} {:>10} {:>10} {:>10} {:>10}",
            "Class", "GT", "Preds", "Precision", "Recall", "mAP50", "mAP50-95"
        );
        let fmt_opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"));
        let gt_total: usize = self.classes.iter().map(|c| c.gt_count).sum();
        let pred_total: usize = self.classes.iter().map(|c| c.pred_count).sum();
        let _ = writeln!(
            out,
            "{:<8} {:>7} {:>7} {:>10.3} {:>10.3} {:>10.3} {:>10.3}",
            "all", gt_total, pred_total, self.precision, self.recall, self.map50, self.map50_95
        );
        for c in &self.classes {
            let has_gt = c.ap.is_some();
            let _ = writeln!(
                out,
                "{:<8} {:>7} {:>7} {:>10} {:>10} {:>10} {:>10}",
                c.class.display_name(),
                c.gt_count,
                c.pred_count,
                fmt_opt(has_gt.then_some(c.precision)),
                fmt_opt(has_gt.then_some(c.recall)),
                fmt_opt(c.ap50),
                fmt_opt(c.ap50_95)
            );
        }
        out
    }
}

/// Evaluates predictions against ground truth, aligning pages by image
/// path. Pages present on only one side are listed in
/// [`EvalReport::page_mismatch`] and left out.
pub fn evaluate(preds: &Predictions, gts: &Dataset, opts: EvalOptions) -> EvalReport {
    let pred_index: HashMap<&str, usize> = preds
        .pages
        .iter()
        .enumerate()
        .map(|(i, p)| (p.image_path.as_str(), i))
        .collect();
    let gt_paths: BTreeSet<&str> = gts.pages.iter().map(|p| p.image_path.as_str()).collect();

    let mut mismatch = PageSetMismatch::default();
    let mut pairs = Vec::new();
    for gt in &gts.pages {
        match pred_index.get(gt.image_path.as_str()) {
            Some(&pi) => pairs.push((pi, gt)),
            None => mismatch.only_in_ground_truth.push(gt.image_path.clone()),
        }
    }
    for p in &preds.pages {
        if !gt_paths.contains(p.image_path.as_str()) {
            mismatch.only_in_predictions.push(p.image_path.clone());
        }
    }
    if !mismatch.is_empty() {
        log::warn!(
            "page sets differ ({} only in predictions, {} only in ground truth); evaluating the {} shared pages",
            mismatch.only_in_predictions.len(),
            mismatch.only_in_ground_truth.len(),
            pairs.len()
        );
    }

    let per_page: Vec<Vec<MatchLedger>> = opts.exec.map(pairs.len(), |k| {
        let (pi, gt) = pairs[k];
        IOU_THRESHOLDS
            .iter()
            .map(|&t| match_detections(&preds.pages[pi].detections, &gt.elements, t))
            .collect()
    });
    let mut ledgers: Vec<MatchLedger> = IOU_THRESHOLDS.iter().map(|&t| MatchLedger::empty(t)).collect();
    for page in per_page {
        for (acc, l) in ledgers.iter_mut().zip(page) {
            acc.merge(l);
        }
    }

    let classes: Vec<ClassEval> = LayoutClass::ALL
        .into_iter()
        .map(|class| {
            let at50 = ledgers[0].class(class);
            let ap: Option<Vec<f64>> = ledgers.iter().map(|l| average_precision(l, class)).collect();
            let operating: Vec<_> = at50
                .records
                .iter()
                .filter(|r| r.confidence >= opts.conf_thresh)
                .collect();
            let tp = operating.iter().filter(|r| r.tp).count();
            let precision = if operating.is_empty() {
                0.0
            } else {
                tp as f64 / operating.len() as f64
            };
            let recall = if at50.gt_count == 0 {
                0.0
            } else {
                tp as f64 / at50.gt_count as f64
            };
            ClassEval {
                class,
                gt_count: at50.gt_count,
                pred_count: at50.records.len(),
                precision,
                recall,
                ap50: ap.as_ref().map(|v| v[0]),
                ap50_95: ap.as_ref().map(|v| v.iter().sum::<f64>() / v.len() as f64),
                ap,
                counts: ledgers.iter().map(|l| l.class(class).counts()).collect(),
            }
        })
        .collect();

    let scored: Vec<&ClassEval> = classes.iter().filter(|c| c.ap.is_some()).collect();
    let mean = |f: &dyn Fn(&ClassEval) -> f64| {
        if scored.is_empty() {
            0.0
        } else {
            scored.iter().map(|c| f(c)).sum::<f64>() / scored.len() as f64
        }
    };

    EvalReport {
        precision: mean(&|c| c.precision),
        recall: mean(&|c| c.recall),
        map50: mean(&|c| c.ap50.unwrap_or(0.0)),
        map50_95: mean(&|c| c.ap50_95.unwrap_or(0.0)),
        conf_thresh: opts.conf_thresh,
        iou_thresholds: IOU_THRESHOLDS.to_vec(),
        pages_evaluated: pairs.len(),
        classes,
        page_mismatch: mismatch,
    }
}
