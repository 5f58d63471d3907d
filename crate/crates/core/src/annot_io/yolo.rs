//! YOLO label directories: one `<stem>.txt` per image, each line
//! `class_id cx cy w h` normalized by the image size, 6 decimals.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{AnnotError, AnnotatedPage, ClassMap, Dataset, LayoutClass, LayoutElement};
use crate::geometry::{BBox, YoloBox};

pub const IMAGE_EXTENSIONS: [&str; 5] = ["png", "jpg", "jpeg", "bmp", "webp"];
pub const LABEL_EXTENSION: &str = "txt";

/// One parsed label line.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LabelLine {
    pub line: u64,
    pub class: LayoutClass,
    pub yolo: YoloBox,
    pub confidence: Option<f64>,
}

/// Parses a label file. With `with_confidence` each line must carry a sixth
/// column in `[0, 1]`.
pub(crate) fn parse_label_file(
    path: &Path,
    class_map: &ClassMap,
    with_confidence: bool,
) -> Result<Vec<LabelLine>, AnnotError> {
    let text = fs::read_to_string(path).map_err(|e| AnnotError::io(path, e))?;
    let expected = if with_confidence { 6 } else { 5 };
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let malformed = |message: String| AnnotError::MalformedLabelLine {
            path: path.to_path_buf(),
            line,
            message,
        };
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.len() != expected {
            return Err(malformed(format!(
                "expected {expected} fields, found {}",
                tokens.len()
            )));
        }
        let unknown = || AnnotError::UnknownClassId {
            path: path.to_path_buf(),
            line,
            id: tokens[0].to_string(),
        };
        let class_id: u32 = tokens[0].parse().map_err(|_| unknown())?;
        let class = class_map.class(class_id).ok_or_else(unknown)?;
        let mut vals = [0.0f64; 5];
        for (k, tok) in tokens[1..].iter().enumerate() {
            vals[k] = tok
                .parse()
                .map_err(|_| malformed(format!("not a number: '{tok}'")))?;
        }
        let yolo = YoloBox::new(class_id, vals[0], vals[1], vals[2], vals[3]).map_err(|e| {
            AnnotError::OutOfRangeNormalizedValue {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            }
        })?;
        let confidence = if with_confidence {
            let c = vals[4];
            if !(0.0..=1.0).contains(&c) {
                return Err(AnnotError::OutOfRangeNormalizedValue {
                    path: path.to_path_buf(),
                    line,
                    message: format!("confidence {c} outside [0, 1]"),
                });
            }
            Some(c)
        } else {
            None
        };
        out.push(LabelLine {
            line,
            class,
            yolo,
            confidence,
        });
    }
    Ok(out)
}

/// Image files directly inside `dir`, sorted by file name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>, AnnotError> {
    list_with_extensions(dir, &IMAGE_EXTENSIONS)
}

pub(crate) fn list_with_extensions(dir: &Path, exts: &[&str]) -> Result<Vec<PathBuf>, AnnotError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| AnnotError::io(dir, e))? {
        let entry = entry.map_err(|e| AnnotError::io(dir, e))?;
        let path = entry.path();
        if !path.is_file() {
            continue;
        }
        let matches = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| exts.iter().any(|x| x.eq_ignore_ascii_case(e)));
        if matches {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

pub(crate) fn stem_of(path: &str) -> String {
    Path::new(path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string())
}

pub(crate) fn image_dimensions(path: &Path) -> Result<(u32, u32), AnnotError> {
    image::image_dimensions(path).map_err(|e| AnnotError::ImageHeader {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Pairs every image in `images_dir` with `<stem>.txt` in `labels_dir`.
/// Page image paths are the image file names.
pub fn read_yolo_labels(
    labels_dir: impl AsRef<Path>,
    images_dir: impl AsRef<Path>,
    class_map: &ClassMap,
) -> Result<Dataset, AnnotError> {
    let labels_dir = labels_dir.as_ref();
    let images_dir = images_dir.as_ref();

    let mut labels: BTreeMap<String, PathBuf> = BTreeMap::new();
    for p in list_with_extensions(labels_dir, &[LABEL_EXTENSION])? {
        let stem = stem_of(&p.to_string_lossy());
        labels.insert(stem, p);
    }

    let mut pages = Vec::new();
    let mut seen_stems = BTreeMap::new();
    for img in list_images(images_dir)? {
        let name = img
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let stem = stem_of(&name);
        if let Some(other) = seen_stems.insert(stem.clone(), name.clone()) {
            return Err(AnnotError::ImageLabelMismatch {
                message: format!("images {other} and {name} share the label stem '{stem}'"),
            });
        }
        let label_path = labels.remove(&stem).ok_or_else(|| AnnotError::ImageLabelMismatch {
            message: format!("image {name} has no label file {stem}.{LABEL_EXTENSION}"),
        })?;
        let (width, height) = image_dimensions(&img)?;
        let mut page = AnnotatedPage::new(name, width, height);
        for l in parse_label_file(&label_path, class_map, false)? {
            let bbox = BBox::from_yolo(&l.yolo, width as f64, height as f64);
            page.elements.push(LayoutElement::new(bbox, l.class));
        }
        pages.push(page);
    }
    if let Some((stem, path)) = labels.into_iter().next() {
        return Err(AnnotError::ImageLabelMismatch {
            message: format!("label file {} has no image '{stem}.*'", path.display()),
        });
    }
    Ok(Dataset::new(pages, class_map.clone()))
}

/// Serializes one page's label file contents.
pub(crate) fn page_label_text(page: &AnnotatedPage, class_map: &ClassMap) -> Result<String, AnnotError> {
    let (w, h) = (page.width as f64, page.height as f64);
    let mut out = String::new();
    for (i, el) in page.elements.iter().enumerate() {
        let id = class_map
            .id(el.label)
            .ok_or(AnnotError::ClassNotInMap { class: el.label })?;
        let y = el
            .bbox
            .to_yolo(id, w, h)
            .map_err(|e| AnnotError::OutOfRangeNormalizedValue {
                path: PathBuf::from(&page.image_path),
                line: i as u64 + 1,
                message: e.to_string(),
            })?;
        out.push_str(&y.to_line());
        out.push('\n');
    }
    Ok(out)
}

/// Writes `<stem>.txt` for every page (empty file for a page without
/// elements), lines in element order.
pub fn write_yolo_labels(d: &Dataset, out_dir: impl AsRef<Path>) -> Result<(), AnnotError> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| AnnotError::io(out_dir, e))?;
    let mut stems = BTreeMap::new();
    for page in &d.pages {
        let stem = stem_of(&page.image_path);
        if let Some(other) = stems.insert(stem.clone(), &page.image_path) {
            return Err(AnnotError::ImageLabelMismatch {
                message: format!(
                    "pages {other} and {} would share label file {stem}.{LABEL_EXTENSION}",
                    page.image_path
                ),
            });
        }
        let text = page_label_text(page, &d.class_map)?;
        let path = out_dir.join(format!("{stem}.{LABEL_EXTENSION}"));
        fs::write(&path, text).map_err(|e| AnnotError::io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blank_png(path: &Path, w: u32, h: u32) {
        image::RgbImage::from_pixel(w, h, image::Rgb([255, 255, 255]))
            .save(path)
            .unwrap();
    }

    fn setup(lines: &str) -> (tempfile::TempDir, PathBuf, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let images = dir.path().join("images");
        let labels = dir.path().join("labels");
        fs::create_dir_all(&images).unwrap();
        fs::create_dir_all(&labels).unwrap();
        blank_png(&images.join("p.png"), 800, 600);
        fs::write(labels.join("p.txt"), lines).unwrap();
        (dir, labels, images)
    }

    #[test]
    fn full_canvas_table() {
        let (_dir, labels, images) = setup("3 0.5 0.5 1.0 1.0\n");
        let d = read_yolo_labels(&labels, &images, &ClassMap::default()).unwrap();
        let el = &d.pages[0].elements[0];
        assert_eq!(el.label, LayoutClass::Table);
        assert_eq!(el.bbox.to_xyxy(), [0.0, 0.0, 800.0, 600.0]);
        assert_eq!(d.pages[0].image_path, "p.png");
    }

    #[test]
    fn out_of_range_line() {
        let (_dir, labels, images) = setup("0 0.5 0.5 0.2 0.2\n0 0.96 0.5 0.1 0.2\n");
        let err = read_yolo_labels(&labels, &images, &ClassMap::default()).unwrap_err();
        assert!(matches!(err, AnnotError::OutOfRangeNormalizedValue { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn unknown_class_id() {
        let (_dir, labels, images) = setup("9 0.5 0.5 0.2 0.2\n");
        assert!(matches!(
            read_yolo_labels(&labels, &images, &ClassMap::default()).unwrap_err(),
            AnnotError::UnknownClassId { line: 1, .. }
        ));
    }

    #[test]
    fn mismatched_files() {
        let (_dir, labels, images) = setup("");
        fs::write(labels.join("orphan.txt"), "").unwrap();
        assert!(matches!(
            read_yolo_labels(&labels, &images, &ClassMap::default()).unwrap_err(),
            AnnotError::ImageLabelMismatch { .. }
        ));
        fs::remove_file(labels.join("orphan.txt")).unwrap();
        blank_png(&images.join("q.png"), 10, 10);
        assert!(matches!(
            read_yolo_labels(&labels, &images, &ClassMap::default()).unwrap_err(),
            AnnotError::ImageLabelMismatch { .. }
        ));
    }

    #[test]
    fn writes_fixed_format() {
        let mut page = AnnotatedPage::new("dir/p.png", 1000, 1000);
        page.elements.push(LayoutElement::new(
            BBox::new(10.0, 20.0, 110.0, 220.0).unwrap(),
            LayoutClass::Table,
        ));
        let d = Dataset::new(vec![page, AnnotatedPage::new("e.png", 5, 5)], ClassMap::default());
        let dir = tempfile::tempdir().unwrap();
        write_yolo_labels(&d, dir.path()).unwrap();
        assert_eq!(
            fs::read_to_string(dir.path().join("p.txt")).unwrap(),
            "3 0.060000 0.120000 0.100000 0.200000\n"
        );
        assert_eq!(fs::read_to_string(dir.path().join("e.txt")).unwrap(), "");
    }
}
