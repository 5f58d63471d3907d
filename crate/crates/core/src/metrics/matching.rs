use serde::Serialize;

use super::Detection;
use crate::annot_io::{LayoutClass, LayoutElement, PerClass};

/// One prediction's outcome at a given IoU threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchRecord {
    pub confidence: f64,
    pub tp: bool,
}

/// Records of one class, ordered by descending confidence (ties in input
/// order), plus the number of ground-truth boxes of that class.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClassLedger {
    pub records: Vec<MatchRecord>,
    pub gt_count: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MatchCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ClassLedger {
    pub fn counts(&self) -> MatchCounts {
        let tp = self.records.iter().filter(|r| r.tp).count();
        MatchCounts {
            tp,
            fp: self.records.len() - tp,
            fn_: self.gt_count - tp,
        }
    }

    /// Records in global AP order: descending confidence, ties by position.
    pub fn sorted_records(&self) -> Vec<MatchRecord> {
        let mut recs = self.records.clone();
        // stable: equal confidences keep page order, then in-page input order
        recs.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));
        recs
    }
}

/// Per-class TP/FP outcomes for a set of pages at one IoU threshold.
/// Ledgers of disjoint page sets combine with [`MatchLedger::merge`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MatchLedger {
    pub iou_thresh: f64,
    pub classes: PerClass<ClassLedger>,
}

impl MatchLedger {
    pub fn empty(iou_thresh: f64) -> Self {
        Self {
            iou_thresh,
            classes: PerClass::default(),
        }
    }

    pub fn class(&self, class: LayoutClass) -> &ClassLedger {
        self.classes.get(class)
    }

    /// Appends `other`'s records after this ledger's (page order matters for
    /// confidence ties).
    pub fn merge(&mut self, other: MatchLedger) {
        for (mine, theirs) in self.classes.0.iter_mut().zip(other.classes.0) {
            mine.records.extend(theirs.records);
            mine.gt_count += theirs.gt_count;
        }
    }
}

/// Greedy per-class matching on one page: predictions in descending
/// confidence (ties by input order) each take the unmatched same-class
/// ground truth with the highest IoU, provided it reaches `iou_thresh`
/// (IoU ties go to the earlier ground truth).
pub fn match_detections(preds: &[Detection], gts: &[LayoutElement], iou_thresh: f64) -> MatchLedger {
    let mut ledger = MatchLedger::empty(iou_thresh);
    for class in LayoutClass::ALL {
        let class_gts: Vec<&LayoutElement> = gts.iter().filter(|g| g.label == class).collect();
        let mut order: Vec<&Detection> = preds.iter().filter(|p| p.label == class).collect();
        order.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));

        let mut taken = vec![false; class_gts.len()];
        let out = ledger.classes.get_mut(class);
        out.gt_count = class_gts.len();
        for det in order {
            let mut best: Option<(usize, f64)> = None;
            for (gi, gt) in class_gts.iter().enumerate() {
                if taken[gi] {
                    continue;
                }
                let iou = det.bbox.iou(&gt.bbox);
                if iou >= iou_thresh && best.is_none_or(|(_, b)| iou > b) {
                    best = Some((gi, iou));
                }
            }
            if let Some((gi, _)) = best {
                taken[gi] = true;
            }
            out.records.push(MatchRecord {
                confidence: det.confidence,
                tp: best.is_some(),
            });
        }
    }
    ledger
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BBox;

    fn det(b: [f64; 4], c: LayoutClass, conf: f64) -> Detection {
        Detection::new(BBox::new(b[0], b[1], b[2], b[3]).unwrap(), c, conf).unwrap()
    }

    fn gt(b: [f64; 4], c: LayoutClass) -> LayoutElement {
        LayoutElement::new(BBox::new(b[0], b[1], b[2], b[3]).unwrap(), c)
    }

    #[test]
    fn exact_hit() {
        let l = match_detections(
            &[det([0.0, 0.0, 10.0, 10.0], LayoutClass::Table, 0.7)],
            &[gt([0.0, 0.0, 10.0, 10.0], LayoutClass::Table)],
            1.0,
        );
        assert_eq!(
            l.class(LayoutClass::Table).counts(),
            MatchCounts { tp: 1, fp: 0, fn_: 0 }
        );
    }

    #[test]
    fn one_to_one() {
        // second pred has IoU 0.6 with the gt: 60 / 100
        let l = match_detections(
            &[
                det([0.0, 0.0, 6.0, 10.0], LayoutClass::Text, 0.5),
                det([0.0, 0.0, 10.0, 10.0], LayoutClass::Text, 0.9),
            ],
            &[gt([0.0, 0.0, 10.0, 10.0], LayoutClass::Text)],
            0.5,
        );
        let c = l.class(LayoutClass::Text);
        assert_eq!(
            c.records,
            vec![
                MatchRecord { confidence: 0.9, tp: true },
                MatchRecord { confidence: 0.5, tp: false }
            ]
        );
    }

    #[test]
    fn classes_do_not_cross_match() {
        let l = match_detections(
            &[det([0.0, 0.0, 10.0, 10.0], LayoutClass::Figure, 0.9)],
            &[gt([0.0, 0.0, 10.0, 10.0], LayoutClass::Table)],
            0.5,
        );
        assert_eq!(l.class(LayoutClass::Figure).counts(), MatchCounts { tp: 0, fp: 1, fn_: 0 });
        assert_eq!(l.class(LayoutClass::Table).counts(), MatchCounts { tp: 0, fp: 0, fn_: 1 });
    }

    #[test]
    fn merge_appends() {
        let a = match_detections(&[det([0.0, 0.0, 1.0, 1.0], LayoutClass::Text, 0.3)], &[], 0.5);
        let b = match_detections(
            &[det([0.0, 0.0, 1.0, 1.0], LayoutClass::Text, 0.3)],
            &[gt([0.0, 0.0, 1.0, 1.0], LayoutClass::Text)],
            0.5,
        );
        let mut m = MatchLedger::empty(0.5);
        m.merge(a);
        m.merge(b);
        let c = m.class(LayoutClass::Text);
        assert_eq!(c.gt_count, 1);
        assert_eq!(c.sorted_records().iter().map(|r| r.tp).collect::<Vec<_>>(), [false, true]);
    }
}
