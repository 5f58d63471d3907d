//! On-disk bank cache.
//!
//! Layout (version 1):
//!
//! ```text
//! <dir>/index.json
//! <dir>/crops/<class>_<nnnnnn>.png     one PNG per crop, numbered per class
//! <dir>/pages/page_<nnnnnn>.png        whole pages, when kept
//! ```
//!
//! `index.json` holds `{ "version": 1, "skipped": {class: n},
//! "crops": [{file, class, source_image, source_bbox}],
//! "pages": [{file, source_image, elements}] }`, with crops listed in class
//! order and, within a class, in bank order.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{BankError, Crop, CropBank, PageCrop};
use crate::annot_io::{LayoutClass, LayoutElement, Provenance};
use crate::geometry::BBox;

pub const BANK_INDEX_FILE: &str = "index.json";
pub const BANK_INDEX_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct BankIndex {
    version: u32,
    skipped: SkipCounts,
    crops: Vec<CropEntry>,
    #[serde(default)]
    pages: Vec<PageEntry>,
}

#[derive(Serialize, Deserialize)]
struct SkipCounts {
    text: usize,
    title: usize,
    list: usize,
    table: usize,
    figure: usize,
}

#[derive(Serialize, Deserialize)]
struct CropEntry {
    file: String,
    class: LayoutClass,
    source_image: String,
    source_bbox: BBox,
}

#[derive(Serialize, Deserialize)]
struct PageEntry {
    file: String,
    source_image: String,
    elements: Vec<LayoutElement>,
}

fn cache_err(path: &Path, message: impl ToString) -> BankError {
    BankError::Cache {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

pub fn save_bank(bank: &CropBank, dir: impl AsRef<Path>) -> Result<(), BankError> {
    let dir = dir.as_ref();
    let crops_dir = dir.join("crops");
    fs::create_dir_all(&crops_dir).map_err(|e| cache_err(&crops_dir, e))?;

    let mut crops = Vec::with_capacity(bank.total());
    for class in LayoutClass::ALL {
        for (i, crop) in bank.crops(class).iter().enumerate() {
            let file = format!("crops/{}_{i:06}.png", class.name());
            let path = dir.join(&file);
            crop.pixels.save(&path).map_err(|e| cache_err(&path, e))?;
            crops.push(CropEntry {
                file,
                class,
                source_image: crop.provenance.image_path.clone(),
                source_bbox: crop.provenance.bbox,
            });
        }
    }

    let mut pages = Vec::with_capacity(bank.pages().len());
    if !bank.pages().is_empty() {
        let pages_dir = dir.join("pages");
        fs::create_dir_all(&pages_dir).map_err(|e| cache_err(&pages_dir, e))?;
    }
    for (i, page) in bank.pages().iter().enumerate() {
        let file = format!("pages/page_{i:06}.png");
        let path = dir.join(&file);
        page.pixels.save(&path).map_err(|e| cache_err(&path, e))?;
        pages.push(PageEntry {
            file,
            source_image: page.image_path.clone(),
            elements: page.elements.clone(),
        });
    }

    let s = |c| bank.skipped(c);
    let index = BankIndex {
        version: BANK_INDEX_VERSION,
        skipped: SkipCounts {
            text: s(LayoutClass::Text),
            title: s(LayoutClass::Title),
            list: s(LayoutClass::List),
            table: s(LayoutClass::Table),
            figure: s(LayoutClass::Figure),
        },
        crops,
        pages,
    };
    let index_path = dir.join(BANK_INDEX_FILE);
    let json = serde_json::to_string_pretty(&index).map_err(|e| cache_err(&index_path, e))?;
    fs::write(&index_path, json + "\n").map_err(|e| cache_err(&index_path, e))
}

pub fn load_bank(dir: impl AsRef<Path>) -> Result<CropBank, BankError> {
    let dir = dir.as_ref();
    let index_path = dir.join(BANK_INDEX_FILE);
    let text = fs::read_to_string(&index_path).map_err(|e| cache_err(&index_path, e))?;
    let index: BankIndex = serde_json::from_str(&text).map_err(|e| cache_err(&index_path, e))?;
    if index.version != BANK_INDEX_VERSION {
        return Err(cache_err(
            &index_path,
            format!("unsupported version {} (expected {BANK_INDEX_VERSION})", index.version),
        ));
    }

    let read = |file: &str| -> Result<image::RgbImage, BankError> {
        let path: PathBuf = dir.join(file);
        image::open(&path)
            .map(|img| img.to_rgb8())
            .map_err(|e| BankError::ImageUnreadable {
                path,
                message: e.to_string(),
            })
    };

    let mut crops: [Vec<Crop>; 5] = Default::default();
    for entry in index.crops {
        crops[entry.class.index()].push(Crop {
            pixels: read(&entry.file)?,
            label: entry.class,
            provenance: Provenance {
                image_path: entry.source_image,
                bbox: entry.source_bbox,
            },
        });
    }
    let pages = index
        .pages
        .into_iter()
        .map(|p| {
            Ok(PageCrop {
                pixels: read(&p.file)?,
                image_path: p.source_image,
                elements: p.elements,
            })
        })
        .collect::<Result<Vec<_>, BankError>>()?;

    let s = index.skipped;
    Ok(CropBank::from_parts(
        crops,
        [s.text, s.title, s.list, s.table, s.figure],
        pages,
    ))
}
