use image::imageops::{self, FilterType};
use image::{Rgb, RgbImage};

use super::plan::{CropRef, PlacementPlan};
use super::{ComposeError, GenConfig};
use crate::annot_io::{LayoutElement, Provenance};
use crate::crop_bank::CropBank;
use crate::geometry::BBox;

pub const CANVAS_COLOR: Rgb<u8> = Rgb([255, 255, 255]);

/// Bilinear resampling is used for every rescaled crop.
pub const RESAMPLE_FILTER: FilterType = FilterType::Triangle;

/// Source pixels resized to `w x h` (borrowed unchanged when already that size).
pub fn scaled_pixels(src: &RgbImage, w: u32, h: u32) -> std::borrow::Cow<'_, RgbImage> {
    if src.dimensions() == (w, h) {
        std::borrow::Cow::Borrowed(src)
    } else {
        std::borrow::Cow::Owned(imageops::resize(src, w, h, RESAMPLE_FILTER))
    }
}

/// Pastes every placement onto a white canvas and emits one element per
/// pasted crop (several for a whole page), with boxes in canvas pixels.
pub fn render(
    plan: &PlacementPlan,
    bank: &CropBank,
    cfg: &GenConfig,
) -> Result<(RgbImage, Vec<LayoutElement>), ComposeError> {
    let mut canvas = RgbImage::from_pixel(cfg.canvas_w, cfg.canvas_h, CANVAS_COLOR);
    let mut elements = Vec::with_capacity(plan.placements.len());

    for (i, p) in plan.placements.iter().enumerate() {
        let invalid = |m: &str| ComposeError::InvalidPlan(format!("placement {i}: {m}"));
        let t = &p.target;
        if !t.within(0.0, 0.0, cfg.canvas_w as f64, cfg.canvas_h as f64) {
            return Err(invalid("target outside the canvas"));
        }
        let (tx, ty) = (t.x_min() as u32, t.y_min() as u32);
        let (tw, th) = (t.width() as u32, t.height() as u32);

        match p.crop {
            CropRef::Element { class, index } => {
                let crop = bank
                    .crop(class, index)
                    .ok_or_else(|| invalid("crop reference not in bank"))?;
                let pixels = scaled_pixels(&crop.pixels, tw, th);
                imageops::replace(&mut canvas, pixels.as_ref(), tx as i64, ty as i64);
                elements.push(LayoutElement {
                    bbox: *t,
                    label: crop.label,
                    source: Some(crop.provenance.clone()),
                });
            }
            CropRef::Page { index } => {
                let page = bank
                    .pages()
                    .get(index)
                    .ok_or_else(|| invalid("page reference not in bank"))?;
                let pixels = scaled_pixels(&page.pixels, tw, th);
                imageops::replace(&mut canvas, pixels.as_ref(), tx as i64, ty as i64);
                let sx = tw as f64 / page.pixels.width() as f64;
                let sy = th as f64 / page.pixels.height() as f64;
                for el in &page.elements {
                    let mapped = BBox::new(
                        (t.x_min() + el.bbox.x_min() * sx).min(t.x_max()),
                        (t.y_min() + el.bbox.y_min() * sy).min(t.y_max()),
                        (t.x_min() + el.bbox.x_max() * sx).min(t.x_max()),
                        (t.y_min() + el.bbox.y_max() * sy).min(t.y_max()),
                    );
                    // elements squeezed to nothing by downscaling are dropped
                    if let Ok(bbox) = mapped {
                        elements.push(LayoutElement {
                            bbox,
                            label: el.label,
                            source: Some(Provenance {
                                image_path: page.image_path.clone(),
                                bbox: el.bbox,
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok((canvas, elements))
}
