//! Class-indexed store of element crops cut from source pages, and the
//! class-weighted sampling the composer draws from.

mod cache;
mod weights;

pub use cache::{load_bank, save_bank, BANK_INDEX_FILE, BANK_INDEX_VERSION};
pub use weights::{sample_class, ClassWeights, REFERENCE_COUNTS};

use std::path::{Path, PathBuf};

use image::RgbImage;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::annot_io::{Dataset, LayoutClass, LayoutElement, PerClass, Provenance};
use crate::geometry::BBox;
use crate::par::Exec;

pub const DEFAULT_MIN_CROP_PX: u32 = 8;

#[derive(Debug, Error)]
pub enum BankError {
    #[error("{path}: cannot read image: {message}")]
    ImageUnreadable { path: PathBuf, message: String },
    #[error("{path}: annotated as {expected_w}x{expected_h} but the image is {actual_w}x{actual_h}")]
    DimensionMismatch {
        path: PathBuf,
        expected_w: u32,
        expected_h: u32,
        actual_w: u32,
        actual_h: u32,
    },
    #[error("no crops of class {0}")]
    EmptyClass(LayoutClass),
    #[error("bank cache {path}: {message}")]
    Cache { path: PathBuf, message: String },
}

/// An element's pixels plus where they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Crop {
    pub pixels: RgbImage,
    pub label: LayoutClass,
    pub provenance: Provenance,
}

impl Crop {
    pub fn width(&self) -> u32 {
        self.pixels.width()
    }

    pub fn height(&self) -> u32 {
        self.pixels.height()
    }
}

/// A whole source page kept for whole-page pasting; elements are in the
/// page's own pixel coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PageCrop {
    pub pixels: RgbImage,
    pub image_path: String,
    pub elements: Vec<LayoutElement>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BankOptions {
    pub min_crop_px: u32,
    /// Also keep every source page whole (off by default).
    pub whole_pages: bool,
}

impl Default for BankOptions {
    fn default() -> Self {
        Self {
            min_crop_px: DEFAULT_MIN_CROP_PX,
            whole_pages: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CropBank {
    crops: [Vec<Crop>; 5],
    skipped: [usize; 5],
    pages: Vec<PageCrop>,
}

/// Per-class crop and skip counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BankSummary {
    pub crops: PerClass<usize>,
    pub skipped: PerClass<usize>,
    pub whole_pages: usize,
}

impl CropBank {
    pub fn from_parts(crops: [Vec<Crop>; 5], skipped: [usize; 5], pages: Vec<PageCrop>) -> Self {
        Self {
            crops,
            skipped,
            pages,
        }
    }

    pub fn crops(&self, class: LayoutClass) -> &[Crop] {
        &self.crops[class.index()]
    }

    pub fn crop(&self, class: LayoutClass, index: usize) -> Option<&Crop> {
        self.crops[class.index()].get(index)
    }

    pub fn count(&self, class: LayoutClass) -> usize {
        self.crops[class.index()].len()
    }

    pub fn skipped(&self, class: LayoutClass) -> usize {
        self.skipped[class.index()]
    }

    pub fn total(&self) -> usize {
        self.crops.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0 && self.pages.is_empty()
    }

    pub fn pages(&self) -> &[PageCrop] {
        &self.pages
    }

    pub fn summary(&self) -> BankSummary {
        BankSummary {
            crops: PerClass(self.crops.each_ref().map(Vec::len)),
            skipped: PerClass(self.skipped),
            whole_pages: self.pages.len(),
        }
    }
}

/// Integer pixel range of a box, coordinates rounded half-up and clamped to
/// the raster.
pub fn pixel_rect(b: &BBox, width: u32, height: u32) -> (u32, u32, u32, u32) {
    let round = |v: f64, max: u32| ((v + 0.5).floor().max(0.0) as u32).min(max);
    let x0 = round(b.x_min(), width);
    let y0 = round(b.y_min(), height);
    let x1 = round(b.x_max(), width).max(x0);
    let y1 = round(b.y_max(), height).max(y0);
    (x0, y0, x1 - x0, y1 - y0)
}

struct PageHarvest {
    crops: Vec<Crop>,
    skipped: [usize; 5],
    page: Option<PageCrop>,
}

/// Cuts one crop per element of at least `min_crop_px` in both dimensions.
/// Smaller elements are counted as skipped.
pub fn build_bank(
    d: &Dataset,
    image_root: impl AsRef<Path>,
    opts: BankOptions,
    exec: Exec,
) -> Result<CropBank, BankError> {
    let image_root = image_root.as_ref();
    let harvests = exec.try_map(d.pages.len(), |i| {
        let page = &d.pages[i];
        let path = image_root.join(&page.image_path);
        let img = image::open(&path)
            .map_err(|e| BankError::ImageUnreadable {
                path: path.clone(),
                message: e.to_string(),
            })?
            .to_rgb8();
        if img.dimensions() != (page.width, page.height) {
            return Err(BankError::DimensionMismatch {
                path,
                expected_w: page.width,
                expected_h: page.height,
                actual_w: img.width(),
                actual_h: img.height(),
            });
        }

        let mut harvest = PageHarvest {
            crops: Vec::new(),
            skipped: [0; 5],
            page: None,
        };
        for el in &page.elements {
            let (x, y, w, h) = pixel_rect(&el.bbox, img.width(), img.height());
            if w < opts.min_crop_px || h < opts.min_crop_px {
                harvest.skipped[el.label.index()] += 1;
                continue;
            }
            harvest.crops.push(Crop {
                pixels: image::imageops::crop_imm(&img, x, y, w, h).to_image(),
                label: el.label,
                provenance: Provenance {
                    image_path: page.image_path.clone(),
                    bbox: el.bbox,
                },
            });
        }
        if opts.whole_pages {
            harvest.page = Some(PageCrop {
                pixels: img,
                image_path: page.image_path.clone(),
                elements: page.elements.clone(),
            });
        }
        Ok(harvest)
    })?;

    let mut bank = CropBank::default();
    for h in harvests {
        for crop in h.crops {
            bank.crops[crop.label.index()].push(crop);
        }
        for (total, s) in bank.skipped.iter_mut().zip(h.skipped) {
            *total += s;
        }
        bank.pages.extend(h.page);
    }
    Ok(bank)
}

/// Uniform draw with replacement from one class. Consumes one integer draw.
pub fn sample_crop<'a, R: Rng + ?Sized>(
    bank: &'a CropBank,
    class: LayoutClass,
    rng: &mut R,
) -> Result<(usize, &'a Crop), BankError> {
    let list = bank.crops(class);
    if list.is_empty() {
        return Err(BankError::EmptyClass(class));
    }
    let i = rng.gen_range(0..list.len());
    Ok((i, &list[i]))
}
