//! Prediction readers: YOLO-style label files with a sixth confidence
//! column, and COCO detection results `[{image_id, category_id, bbox, score}]`.

use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::Deserialize;

use super::{Detection, MetricsError, PredictedPage, Predictions};
use crate::annot_io::{self, AnnotError, ClassMap, CocoIds, Dataset, LABEL_EXTENSION};
use crate::geometry::BBox;

/// Reads `<stem>.txt` files from `dir`; each is paired with the ground-truth
/// page of the same stem, whose size denormalizes the boxes. Files without a
/// ground-truth page keep their stem as image path (and surface as a page
/// set mismatch in evaluation).
pub fn read_yolo_predictions(
    dir: impl AsRef<Path>,
    gts: &Dataset,
    class_map: &ClassMap,
) -> Result<Predictions, MetricsError> {
    let dir = dir.as_ref();
    let by_stem: HashMap<String, (&str, u32, u32)> = gts
        .pages
        .iter()
        .map(|p| (annot_io::stem_of(&p.image_path), (p.image_path.as_str(), p.width, p.height)))
        .collect();

    let mut pages = Vec::new();
    for path in annot_io::list_with_extensions(dir, &[LABEL_EXTENSION])? {
        let stem = annot_io::stem_of(&path.to_string_lossy());
        let lines = annot_io::parse_label_file(&path, class_map, true)?;
        let Some(&(image_path, w, h)) = by_stem.get(&stem) else {
            pages.push(PredictedPage {
                image_path: stem,
                detections: Vec::new(),
            });
            continue;
        };
        let detections = lines
            .into_iter()
            .map(|l| {
                let bbox = BBox::from_yolo(&l.yolo, w as f64, h as f64);
                Detection::new(bbox, l.class, l.confidence.unwrap_or(1.0))
            })
            .collect::<Result<Vec<_>, _>>()?;
        pages.push(PredictedPage {
            image_path: image_path.to_string(),
            detections,
        });
    }
    Ok(Predictions { pages })
}

#[derive(Deserialize)]
struct CocoResult {
    image_id: u64,
    category_id: u64,
    bbox: [f64; 4],
    score: f64,
}

/// Reads COCO detection results. Ids resolve through `ids` (from
/// [`annot_io::read_coco_with_ids`], or [`CocoIds::sequential`] for ground
/// truth read from another format). Every ground-truth page gets an entry,
/// empty when no result refers to it. Boxes are clipped to their page;
/// boxes clipped to nothing are dropped.
pub fn read_coco_results(
    path: impl AsRef<Path>,
    gts: &Dataset,
    ids: &CocoIds,
) -> Result<Predictions, MetricsError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| AnnotError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let results: Vec<CocoResult> =
        serde_json::from_reader(BufReader::new(file)).map_err(|source| AnnotError::Json {
            path: path.to_path_buf(),
            source,
        })?;

    let mut pages: Vec<PredictedPage> = gts
        .pages
        .iter()
        .map(|p| PredictedPage {
            image_path: p.image_path.clone(),
            detections: Vec::new(),
        })
        .collect();

    for (k, r) in results.iter().enumerate() {
        let page_idx = ids
            .page_of(r.image_id)
            .filter(|&i| i < gts.pages.len())
            .ok_or(AnnotError::DanglingImageId {
                annotation_id: k as u64,
                image_id: r.image_id,
            })?;
        let &label = ids
            .categories
            .get(&r.category_id)
            .ok_or(AnnotError::DanglingCategoryId {
                annotation_id: k as u64,
                category_id: r.category_id,
            })?;
        let page = &gts.pages[page_idx];
        let [x, y, w, h] = r.bbox;
        let clipped = BBox::new(
            x.max(0.0),
            y.max(0.0),
            (x + w).min(page.width as f64),
            (y + h).min(page.height as f64),
        );
        match clipped {
            Ok(bbox) => pages[page_idx]
                .detections
                .push(Detection::new(bbox, label, r.score)?),
            Err(_) => log::warn!("result {k}: box {:?} is empty inside its image; dropped", r.bbox),
        }
    }
    Ok(Predictions { pages })
}
