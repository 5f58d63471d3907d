//! Synthetic document-layout dataset generation.
//!
//! Labeled layout elements (text, titles, lists, tables, figures) are cut
//! from annotated source pages into a [`crop_bank::CropBank`], sampled by
//! class weight, shelf-packed onto blank canvases by the [`composer`], and
//! written out with remapped annotations. Around that core sit readers and
//! writers for the manifest CSV, COCO, and YOLO formats ([`annot_io`]),
//! summary [`stats`], and detection [`metrics`] (precision, recall, AP,
//! mAP50, mAP50-95).

pub mod annot_io;
pub mod composer;
pub mod crop_bank;
pub mod geometry;
pub mod metrics;
pub mod par;
pub mod stats;

pub use annot_io::{AnnotatedPage, ClassMap, Dataset, LayoutClass, LayoutElement};
pub use geometry::{BBox, YoloBox};
pub use par::Exec;
