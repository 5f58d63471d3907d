use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::{Dataset, LayoutClass};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidatePolicy {
    /// Also require zero pairwise overlap area within each page.
    pub no_overlap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ZeroPageDimension { page: usize },
    DuplicateImagePath { page: usize, first_page: usize, image_path: String },
    OutOfPage { page: usize, element: usize },
    NonPositiveArea { page: usize, element: usize },
    UnknownClass { page: usize, element: usize, class: LayoutClass },
    /// `first < second`, both element indices on `page`.
    Overlap { page: usize, first: usize, second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroPageDimension { page } => write!(f, "page {page}: zero width or height"),
            Violation::DuplicateImagePath {
                page,
                first_page,
                image_path,
            } => write!(f, "page {page}: image path {image_path} already used by page {first_page}"),
            Violation::OutOfPage { page, element } => {
                write!(f, "page {page} element {element}: box exceeds the page")
            }
            Violation::NonPositiveArea { page, element } => {
                write!(f, "page {page} element {element}: non-positive area")
            }
            Violation::UnknownClass {
                page,
                element,
                class,
            } => write!(f, "page {page} element {element}: class {class} missing from class map"),
            Violation::Overlap {
                page,
                first,
                second,
            } => write!(f, "page {page}: elements {first} and {second} overlap"),
        }
    }
}

/// Collects every violation; an empty list means the dataset is valid.
pub fn validate(d: &Dataset, policy: ValidatePolicy) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut first_seen: HashMap<&str, usize> = HashMap::new();

    for (pi, page) in d.pages.iter().enumerate() {
        if page.width == 0 || page.height == 0 {
            out.push(Violation::ZeroPageDimension { page: pi });
        }
        if let Some(&first_page) = first_seen.get(page.image_path.as_str()) {
            out.push(Violation::DuplicateImagePath {
                page: pi,
                first_page,
                image_path: page.image_path.clone(),
            });
        } else {
            first_seen.insert(&page.image_path, pi);
        }

        let (w, h) = (page.width as f64, page.height as f64);
        for (ei, el) in page.elements.iter().enumerate() {
            if !el.bbox.within(0.0, 0.0, w, h) {
                out.push(Violation::OutOfPage { page: pi, element: ei });
            }
            if !(el.bbox.area() > 0.0) {
                out.push(Violation::NonPositiveArea { page: pi, element: ei });
            }
            if !d.class_map.contains(el.label) {
                out.push(Violation::UnknownClass {
                    page: pi,
                    element: ei,
                    class: el.label,
                });
            }
        }

        if policy.no_overlap {
            out.extend(
                overlapping_pairs(page.elements.iter().map(|e| e.bbox))
                    .into_iter()
                    .map(|(first, second)| Violation::Overlap {
                        page: pi,
                        first,
                        second,
                    }),
            );
        }
    }
    out
}

/// Sort-and-sweep along x: only boxes whose x-extents intersect are tested.
/// Returns index pairs `(i, j)`, `i < j`, in lexicographic order.
fn overlapping_pairs(boxes: impl Iterator<Item = crate::geometry::BBox>) -> Vec<(usize, usize)> {
    let boxes: Vec<_> = boxes.collect();
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&a, &b| boxes[a].x_min().total_cmp(&boxes[b].x_min()).then(a.cmp(&b)));

    let mut pairs = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if boxes[j].x_min() >= boxes[i].x_max() {
                break;
            }
            if boxes[i].intersect(&boxes[j]).is_some() {
                pairs.push((i.min(j), i.max(j)));
            }
        }
    }
    pairs.sort_unstable();
    pairs
}
