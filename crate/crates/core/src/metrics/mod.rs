//! Detection metrics: greedy per-class matching, 101-point interpolated AP,
//! mAP at IoU 0.50 and averaged over 0.50:0.05:0.95, and precision/recall at
//! a confidence operating point.

mod ap;
mod eval;
mod input;
mod matching;

pub use ap::{average_precision, RECALL_POINTS};
pub use eval::{evaluate, ClassEval, EvalOptions, EvalReport, PageSetMismatch};
pub use input::{read_coco_results, read_yolo_predictions};
pub use matching::{match_detections, ClassLedger, MatchCounts, MatchLedger, MatchRecord};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annot_io::{AnnotError, LayoutClass};
use crate::geometry::BBox;

/// Written out rather than stepped so that every threshold is the exact
/// decimal literal.
pub const IOU_THRESHOLDS: [f64; 10] = [0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95];

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("confidence {0} outside [0, 1]")]
    BadConfidence(f64),
    #[error(transparent)]
    Annot(#[from] AnnotError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: BBox,
    pub label: LayoutClass,
    pub confidence: f64,
}

impl Detection {
    pub fn new(bbox: BBox, label: LayoutClass, confidence: f64) -> Result<Self, MetricsError> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(MetricsError::BadConfidence(confidence));
        }
        Ok(Self {
            bbox,
            label,
            confidence,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedPage {
    pub image_path: String,
    pub detections: Vec<Detection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Predictions {
    pub pages: Vec<PredictedPage>,
}
