//! Shelf placement ("smart plot"): crops fill a row left to right from a
//! cursor, rows stack top to bottom, with `gap` pixels between neighbours in
//! both directions.

use rand::Rng;
use serde::Serialize;

use super::seed::{page_rng, PLACEMENT_STREAM};
use super::{ComposeError, GenConfig};
use crate::annot_io::LayoutClass;
use crate::crop_bank::{sample_class, sample_crop, CropBank};
use crate::geometry::BBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CropRef {
    Element { class: LayoutClass, index: usize },
    Page { index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Placement {
    pub crop: CropRef,
    pub target: BBox,
    /// Target width over source width (1 when not rescaled).
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxElements,
    MaxRejections,
    VerticalExhaustion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementPlan {
    pub page_index: usize,
    pub page_seed: u64,
    pub placements: Vec<Placement>,
    /// Total failed placement attempts on this page.
    pub rejections: usize,
    pub termination: Termination,
}

/// Bank and config checks shared by every page of a run.
#[derive(Debug)]
pub struct PlacementContext<'a> {
    bank: &'a CropBank,
    cfg: &'a GenConfig,
    min_w: u32,
    min_h: u32,
}

impl<'a> PlacementContext<'a> {
    pub fn new(bank: &'a CropBank, cfg: &'a GenConfig) -> Result<Self, ComposeError> {
        cfg.validate()?;
        for class in cfg.class_weights.positive_classes() {
            if bank.count(class) == 0 {
                return Err(ComposeError::EmptyClass(class));
            }
        }
        let use_pages = cfg.whole_page_prob > 0.0;
        if use_pages && bank.pages().is_empty() {
            return Err(ComposeError::NoWholePages);
        }

        let usable_h = cfg.canvas_h - 2 * cfg.margin;
        let element_sizes = cfg
            .class_weights
            .positive_classes()
            .flat_map(|c| bank.crops(c).iter().map(|crop| (crop.width(), crop.height())));
        let page_sizes = bank
            .pages()
            .iter()
            .filter(|_| use_pages)
            .map(|p| p.pixels.dimensions());

        let mut ctx = Self {
            bank,
            cfg,
            min_w: u32::MAX,
            min_h: u32::MAX,
        };
        let mut any = false;
        for (w, h) in element_sizes.chain(page_sizes) {
            if let Some((tw, th, _)) = ctx.fitted_size(w, h) {
                if th <= usable_h {
                    any = true;
                    ctx.min_w = ctx.min_w.min(tw);
                    ctx.min_h = ctx.min_h.min(th);
                }
            }
        }
        if !any {
            return Err(ComposeError::UnplaceableConfig);
        }
        Ok(ctx)
    }

    pub fn bank(&self) -> &'a CropBank {
        self.bank
    }

    pub fn config(&self) -> &'a GenConfig {
        self.cfg
    }

    /// Target size of a `w x h` source: unchanged when it fits the usable
    /// width, otherwise uniformly downscaled to that width (when allowed).
    pub fn fitted_size(&self, w: u32, h: u32) -> Option<(u32, u32, f64)> {
        let usable_w = self.cfg.usable_width();
        if w <= usable_w {
            return Some((w, h, 1.0));
        }
        if !self.cfg.scale_to_fit {
            return None;
        }
        let scale = usable_w as f64 / w as f64;
        let th = ((h as f64 * scale + 0.5).floor() as u32).max(1);
        Some((usable_w, th, scale))
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> (CropRef, u32, u32) {
        let cfg = self.cfg;
        if cfg.whole_page_prob > 0.0 && rng.gen::<f64>() < cfg.whole_page_prob {
            let index = rng.gen_range(0..self.bank.pages().len());
            let (w, h) = self.bank.pages()[index].pixels.dimensions();
            return (CropRef::Page { index }, w, h);
        }
        let class = sample_class(&cfg.class_weights, rng);
        let (index, crop) = sample_crop(self.bank, class, rng).expect("checked non-empty in new()");
        (CropRef::Element { class, index }, crop.width(), crop.height())
    }

    pub fn plan_page(&self, page_index: usize, page_seed: u64) -> PlacementPlan {
        let cfg = self.cfg;
        let mut rng = page_rng(page_seed, PLACEMENT_STREAM);
        let (left, top, right, bottom) = {
            let (l, t, r, b) = cfg.usable_area();
            (l as u64, t as u64, r as u64, b as u64)
        };
        let gap = cfg.gap as u64;
        let (min_w, min_h) = (self.min_w as u64, self.min_h as u64);

        let (mut x, mut y, mut row_h) = (left, top, 0u64);
        let mut placements = Vec::new();
        let mut rejections = 0usize;
        let mut consecutive = 0usize;

        let termination = loop {
            if placements.len() >= cfg.max_elements_per_page {
                break Termination::MaxElements;
            }
            if consecutive >= cfg.max_rejections {
                break Termination::MaxRejections;
            }
            let row_can_take = x + min_w <= right && y + min_h <= bottom;
            let next_row_can_open = row_h > 0 && y + row_h + gap + min_h <= bottom;
            if !row_can_take && !next_row_can_open {
                break Termination::VerticalExhaustion;
            }

            let (crop, w, h) = self.draw(&mut rng);
            let Some((tw, th, scale)) = self.fitted_size(w, h) else {
                rejections += 1;
                consecutive += 1;
                continue;
            };
            let (tw64, th64) = (tw as u64, th as u64);

            let origin = if x + tw64 <= right && y + th64 <= bottom {
                Some((x, y))
            } else if row_h > 0 && left + tw64 <= right && y + row_h + gap + th64 <= bottom {
                y += row_h + gap;
                x = left;
                row_h = 0;
                Some((x, y))
            } else {
                None
            };

            match origin {
                Some((px, py)) => {
                    let target = BBox::new(px as f64, py as f64, (px + tw64) as f64, (py + th64) as f64)
                        .expect("positive integer extents");
                    placements.push(Placement { crop, target, scale });
                    x = px + tw64 + gap;
                    row_h = row_h.max(th64);
                    consecutive = 0;
                }
                None => {
                    rejections += 1;
                    consecutive += 1;
                }
            }
        };

        PlacementPlan {
            page_index,
            page_seed,
            placements,
            rejections,
            termination,
        }
    }
}

/// Plans one page. Builds a fresh [`PlacementContext`]; use the context
/// directly when planning many pages.
pub fn smart_plot(
    bank: &CropBank,
    cfg: &GenConfig,
    page_index: usize,
    page_seed: u64,
) -> Result<PlacementPlan, ComposeError> {
    Ok(PlacementContext::new(bank, cfg)?.plan_page(page_index, page_seed))
}
