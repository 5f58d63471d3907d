//! COCO JSON subset: `images`, `categories`, and `annotations` with
//! `bbox: [x, y, w, h]`. Segmentation and keypoint fields are ignored.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    fit_to_page, AnnotError, AnnotatedPage, BoxIssue, ClassMap, Dataset, LayoutClass, LayoutElement,
};

/// Category-name matching. Canonical class names always match
/// (case-insensitively); `aliases` adds extra names.
#[derive(Debug, Clone, Default)]
pub struct CocoOptions {
    pub aliases: BTreeMap<String, LayoutClass>,
}

impl CocoOptions {
    pub fn with_alias(mut self, name: &str, class: LayoutClass) -> Self {
        self.aliases.insert(name.trim().to_ascii_lowercase(), class);
        self
    }

    fn resolve(&self, name: &str) -> Option<LayoutClass> {
        let lower = name.trim().to_ascii_lowercase();
        self.aliases
            .get(&lower)
            .copied()
            .or_else(|| lower.parse().ok())
    }
}

/// The COCO ids a dataset was read with, needed to resolve detection
/// results that refer to images and categories by id.
#[derive(Debug, Clone, PartialEq)]
pub struct CocoIds {
    /// Image id of each page, in page order.
    pub image_ids: Vec<u64>,
    pub categories: BTreeMap<u64, LayoutClass>,
}

impl CocoIds {
    /// The ids [`write_coco`] assigns: page `i` gets image id `i + 1`,
    /// categories use the dataset's class map.
    pub fn sequential(d: &Dataset) -> Self {
        Self {
            image_ids: (1..=d.pages.len() as u64).collect(),
            categories: d.class_map.iter().map(|(c, id)| (id as u64, c)).collect(),
        }
    }

    pub fn page_of(&self, image_id: u64) -> Option<usize> {
        self.image_ids.iter().position(|&id| id == image_id)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CocoFile {
    images: Vec<CocoImage>,
    categories: Vec<CocoCategory>,
    annotations: Vec<CocoAnnotation>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CocoImage {
    id: u64,
    file_name: String,
    width: u32,
    height: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct CocoCategory {
    id: u64,
    name: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct CocoAnnotation {
    id: u64,
    image_id: u64,
    category_id: u64,
    bbox: [f64; 4],
    #[serde(default, skip_deserializing)]
    area: f64,
    #[serde(default, skip_deserializing)]
    iscrowd: u8,
}

pub fn read_coco(path: impl AsRef<Path>, opts: &CocoOptions) -> Result<Dataset, AnnotError> {
    read_coco_with_ids(path, opts).map(|(d, _)| d)
}

pub fn read_coco_with_ids(
    path: impl AsRef<Path>,
    opts: &CocoOptions,
) -> Result<(Dataset, CocoIds), AnnotError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| AnnotError::io(path, e))?;
    let coco: CocoFile =
        serde_json::from_reader(BufReader::new(file)).map_err(|source| AnnotError::Json {
            path: path.to_path_buf(),
            source,
        })?;

    let mut categories = BTreeMap::new();
    let mut class_ids: Vec<(LayoutClass, u32)> = Vec::new();
    for cat in &coco.categories {
        let class = opts
            .resolve(&cat.name)
            .ok_or_else(|| AnnotError::UnmappableCategory {
                id: cat.id,
                name: cat.name.clone(),
            })?;
        let id32 = u32::try_from(cat.id).map_err(|_| AnnotError::UnmappableCategory {
            id: cat.id,
            name: cat.name.clone(),
        })?;
        categories.insert(cat.id, class);
        // with aliases several categories may share a class; the first one
        // keeps the class-map slot
        if !class_ids.iter().any(|(c, _)| *c == class) {
            class_ids.push((class, id32));
        }
    }
    let class_map = ClassMap::new(class_ids).map_err(|message| AnnotError::UnmappableCategory {
        id: 0,
        name: message,
    })?;

    let mut pages = Vec::with_capacity(coco.images.len());
    let mut image_ids = Vec::with_capacity(coco.images.len());
    let mut by_id: HashMap<u64, usize> = HashMap::new();
    for img in &coco.images {
        if img.width == 0 || img.height == 0 {
            return Err(AnnotError::BadImageRecord {
                id: img.id,
                message: "zero width or height".into(),
            });
        }
        if by_id.insert(img.id, pages.len()).is_some() {
            return Err(AnnotError::BadImageRecord {
                id: img.id,
                message: "duplicate image id".into(),
            });
        }
        pages.push(AnnotatedPage::new(&img.file_name, img.width, img.height));
        image_ids.push(img.id);
    }

    for ann in &coco.annotations {
        let &page_idx = by_id.get(&ann.image_id).ok_or(AnnotError::DanglingImageId {
            annotation_id: ann.id,
            image_id: ann.image_id,
        })?;
        let &label = categories
            .get(&ann.category_id)
            .ok_or(AnnotError::DanglingCategoryId {
                annotation_id: ann.id,
                category_id: ann.category_id,
            })?;
        let [x, y, w, h] = ann.bbox;
        if !(w > 0.0 && h > 0.0) {
            return Err(AnnotError::NonPositiveBoxDims {
                annotation_id: ann.id,
                bbox: ann.bbox,
            });
        }
        let page = &mut pages[page_idx];
        let bbox = fit_to_page([x, y, x + w, y + h], page.width, page.height).map_err(|issue| match issue {
            BoxIssue::NegativeOrInverted | BoxIssue::OutOfPage => AnnotError::AnnotationOutOfPage {
                annotation_id: ann.id,
                bbox: ann.bbox,
                width: page.width,
                height: page.height,
            },
        })?;
        page.elements.push(LayoutElement::new(bbox, label));
    }

    Ok((
        Dataset::new(pages, class_map),
        CocoIds {
            image_ids,
            categories,
        },
    ))
}

/// Writes the dataset with sequential ids (see [`CocoIds::sequential`]).
/// Category ids come from the dataset's class map.
pub fn write_coco(d: &Dataset, path: impl AsRef<Path>) -> Result<(), AnnotError> {
    let path = path.as_ref();
    let mut cats: Vec<(u32, LayoutClass)> = d.class_map.iter().map(|(c, id)| (id, c)).collect();
    cats.sort();
    let categories = cats
        .into_iter()
        .map(|(id, c)| CocoCategory {
            id: id as u64,
            name: c.name().to_string(),
        })
        .collect();

    let mut images = Vec::with_capacity(d.pages.len());
    let mut annotations = Vec::with_capacity(d.element_count());
    for (i, page) in d.pages.iter().enumerate() {
        let image_id = i as u64 + 1;
        images.push(CocoImage {
            id: image_id,
            file_name: page.image_path.clone(),
            width: page.width,
            height: page.height,
        });
        for el in &page.elements {
            let category_id = d
                .class_map
                .id(el.label)
                .ok_or(AnnotError::ClassNotInMap { class: el.label })?;
            annotations.push(CocoAnnotation {
                id: annotations.len() as u64 + 1,
                image_id,
                category_id: category_id as u64,
                bbox: el.bbox.to_xywh(),
                area: el.bbox.area(),
                iscrowd: 0,
            });
        }
    }

    let coco = CocoFile {
        images,
        categories,
        annotations,
    };
    let file = File::create(path).map_err(|e| AnnotError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &coco).map_err(|source| AnnotError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| AnnotError::io(path, e))
}
