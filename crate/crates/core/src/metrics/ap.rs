use super::matching::MatchLedger;
use crate::annot_io::LayoutClass;

/// Recall sample points of the 101-point interpolation: 0.00, 0.01, ..., 1.00.
pub const RECALL_POINTS: usize = 101;

/// 101-point interpolated AP of one class: the mean over recall levels
/// `r = 0, 0.01, ..., 1` of the highest precision reached at recall `>= r`
/// (0 where recall `r` is never reached). The precision-recall points are
/// taken at each distinct confidence, so equal confidences enter as one
/// threshold step. `None` when the class has no ground truth.
pub fn average_precision(ledger: &MatchLedger, class: LayoutClass) -> Option<f64> {
    let cl = ledger.class(class);
    if cl.gt_count == 0 {
        return None;
    }
    let recs = cl.sorted_records();
    let n_gt = cl.gt_count as f64;

    let mut recall = Vec::with_capacity(recs.len());
    let mut precision = Vec::with_capacity(recs.len());
    let (mut tp, mut fp) = (0usize, 0usize);
    for (i, r) in recs.iter().enumerate() {
        if r.tp {
            tp += 1;
        } else {
            fp += 1;
        }
        // one operating point per distinct confidence
        if recs.get(i + 1).is_some_and(|next| next.confidence == r.confidence) {
            continue;
        }
        recall.push(tp as f64 / n_gt);
        precision.push(tp as f64 / (tp + fp) as f64);
    }
    // precision envelope: max to the right
    for i in (0..precision.len().saturating_sub(1)).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }

    let sum: f64 = (0..RECALL_POINTS)
        .map(|k| {
            let level = k as f64 / 100.0;
            let idx = recall.partition_point(|&r| r < level);
            precision.get(idx).copied().unwrap_or(0.0)
        })
        .sum();
    Some(sum / RECALL_POINTS as f64)
}
