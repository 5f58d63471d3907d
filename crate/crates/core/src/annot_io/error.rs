use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnnotError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest header mismatch: expected `{expected}`, found `{found}`")]
    BadHeader { expected: String, found: String },
    #[error("line {line}: malformed row: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("line {line}: negative or inverted box {coords:?}")]
    NegativeOrInvertedBox { line: u64, coords: [f64; 4] },
    #[error("line {line}: box {coords:?} exceeds the {width}x{height} page")]
    BoxOutOfPage {
        line: u64,
        coords: [f64; 4],
        width: u32,
        height: u32,
    },
    #[error("line {line}: unknown class label '{label}'")]
    UnknownClassLabel { line: u64, label: String },
    #[error("line {line}: missing or zero image dimension")]
    MissingImageDimension { line: u64 },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("category '{name}' (id {id}) does not map onto a layout class")]
    UnmappableCategory { id: u64, name: String },
    #[error("annotation {annotation_id} references missing image id {image_id}")]
    DanglingImageId { annotation_id: u64, image_id: u64 },
    #[error("annotation {annotation_id} references missing category id {category_id}")]
    DanglingCategoryId { annotation_id: u64, category_id: u64 },
    #[error("annotation {annotation_id}: non-positive box dimensions {bbox:?}")]
    NonPositiveBoxDims { annotation_id: u64, bbox: [f64; 4] },
    #[error("annotation {annotation_id}: box {bbox:?} exceeds its {width}x{height} image")]
    AnnotationOutOfPage {
        annotation_id: u64,
        bbox: [f64; 4],
        width: u32,
        height: u32,
    },
    #[error("image id {id}: {message}")]
    BadImageRecord { id: u64, message: String },
    #[error("{path}:{line}: normalized value out of range: {message}")]
    OutOfRangeNormalizedValue {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}:{line}: unknown class id {id}")]
    UnknownClassId { path: PathBuf, line: u64, id: String },
    #[error("{path}:{line}: malformed label line: {message}")]
    MalformedLabelLine {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("image/label mismatch: {message}")]
    ImageLabelMismatch { message: String },
    #[error("class {class} has no id in the class map")]
    ClassNotInMap { class: crate::annot_io::LayoutClass },
    #[error("{path}: cannot read image dimensions: {message}")]
    ImageHeader { path: PathBuf, message: String },
}

impl AnnotError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AnnotError::Io {
            path: path.into(),
            source,
        }
    }
}
