//! Dataset descriptions: the source manifest CSV, COCO JSON, YOLO label
//! directories, and dataset validation.
//!
//! All readers share one box policy: a box may sit exactly on the page
//! border; a box overshooting the page by at most [`CLAMP_TOLERANCE_PX`] is
//! clamped (with a warning); anything further out is rejected.

mod coco;
mod error;
mod manifest;
mod model;
mod validate;
mod yolo;

pub use coco::{read_coco, read_coco_with_ids, write_coco, CocoIds, CocoOptions};
pub use error::AnnotError;
pub use manifest::{parse_manifest, parse_manifest_reader, write_manifest, MANIFEST_HEADER};
pub use model::{
    AnnotatedPage, ClassMap, Dataset, LayoutClass, LayoutElement, PerClass, Provenance,
};
pub use validate::{validate, ValidatePolicy, Violation};
pub use yolo::{
    list_images, read_yolo_labels, write_yolo_labels, IMAGE_EXTENSIONS, LABEL_EXTENSION,
};
pub(crate) use yolo::{list_with_extensions, page_label_text, parse_label_file, stem_of};

use crate::geometry::BBox;

/// Maximum overshoot past the page border that is clamped instead of rejected.
pub const CLAMP_TOLERANCE_PX: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BoxIssue {
    NegativeOrInverted,
    OutOfPage,
}

/// Applies the shared border policy to raw corner coordinates.
pub(crate) fn fit_to_page(raw: [f64; 4], width: u32, height: u32) -> Result<BBox, BoxIssue> {
    let [x0, y0, x1, y1] = raw;
    if raw.iter().any(|v| !v.is_finite()) || x1 <= x0 || y1 <= y0 {
        return Err(BoxIssue::NegativeOrInverted);
    }
    if x0 < -CLAMP_TOLERANCE_PX || y0 < -CLAMP_TOLERANCE_PX {
        return Err(BoxIssue::NegativeOrInverted);
    }
    let (w, h) = (width as f64, height as f64);
    if x1 > w + CLAMP_TOLERANCE_PX || y1 > h + CLAMP_TOLERANCE_PX {
        return Err(BoxIssue::OutOfPage);
    }
    let clamped = [x0.max(0.0), y0.max(0.0), x1.min(w), y1.min(h)];
    if clamped != raw {
        log::warn!("box {raw:?} clamped to the {width}x{height} page: {clamped:?}");
    }
    BBox::new(clamped[0], clamped[1], clamped[2], clamped[3]).map_err(|_| BoxIssue::OutOfPage)
}
