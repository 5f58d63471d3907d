//! Generation parameters and the versioned config file.
//!
//! The config file is TOML with a mandatory `version = 1` key; every other
//! key is optional and defaults as in [`GenConfig::default`]:
//!
//! ```toml
//! version = 1
//! master_seed = 42
//! page_count = 500
//! canvas_w = 1224
//! canvas_h = 1584
//! gap = 10
//! margin = 20
//! max_elements_per_page = 30
//! max_rejections = 50
//! scale_to_fit = true
//! min_crop_px = 8
//! whole_page_prob = 0.0
//!
//! [class_weights]        # any non-negative numbers; normalized on load
//! text = 95227
//! title = 45306
//! list = 23090
//! table = 22146
//! figure = 23493
//!
//! [noise]
//! class_flip_prob = 0.0
//! bbox_jitter_px = 0.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ComposeError;
use crate::crop_bank::{ClassWeights, DEFAULT_MIN_CROP_PX};

pub const CONFIG_VERSION: i64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Probability of replacing an element's class with a different one.
    pub class_flip_prob: f64,
    /// Each box corner moves by a uniform offset in `[-j, j]` pixels.
    pub bbox_jitter_px: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            class_flip_prob: 0.0,
            bbox_jitter_px: 0.0,
        }
    }
}

impl NoiseConfig {
    pub fn is_off(&self) -> bool {
        self.class_flip_prob == 0.0 && self.bbox_jitter_px == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub canvas_w: u32,
    pub canvas_h: u32,
    pub gap: u32,
    pub margin: u32,
    pub max_elements_per_page: usize,
    /// Consecutive failed placements that end a page.
    pub max_rejections: usize,
    /// Downscale crops wider than the usable width instead of rejecting them.
    pub scale_to_fit: bool,
    pub min_crop_px: u32,
    /// Chance that a draw pastes a whole source page instead of one element
    /// crop. Needs a bank built with whole pages.
    pub whole_page_prob: f64,
    pub class_weights: ClassWeights,
    pub page_count: usize,
    pub master_seed: u64,
    pub noise: NoiseConfig,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            canvas_w: 1224,
            canvas_h: 1584,
            gap: 10,
            margin: 20,
            max_elements_per_page: 30,
            max_rejections: 50,
            scale_to_fit: true,
            min_crop_px: DEFAULT_MIN_CROP_PX,
            whole_page_prob: 0.0,
            class_weights: ClassWeights::default(),
            page_count: 1,
            master_seed: 0,
            noise: NoiseConfig::default(),
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), ComposeError> {
        let bad = |m: String| Err(ComposeError::InvalidConfig(m));
        let inner = 2 * self.margin as u64 + self.min_crop_px as u64;
        if self.canvas_w as u64 <= inner || self.canvas_h as u64 <= inner {
            return bad(format!(
                "canvas {}x{} must exceed 2*margin + min_crop_px = {inner} in both dimensions",
                self.canvas_w, self.canvas_h
            ));
        }
        if self.page_count == 0 {
            return bad("page_count must be at least 1".into());
        }
        let p = self.noise.class_flip_prob;
        if !(0.0..=1.0).contains(&p) {
            return bad(format!("class_flip_prob {p} outside [0, 1]"));
        }
        let j = self.noise.bbox_jitter_px;
        if !(j.is_finite() && j >= 0.0) {
            return bad(format!("bbox_jitter_px {j} must be finite and non-negative"));
        }
        let w = self.whole_page_prob;
        if !(0.0..=1.0).contains(&w) {
            return bad(format!("whole_page_prob {w} outside [0, 1]"));
        }
        Ok(())
    }

    /// Left, top, right, bottom of the margin-inset placement area.
    pub fn usable_area(&self) -> (u32, u32, u32, u32) {
        (
            self.margin,
            self.margin,
            self.canvas_w - self.margin,
            self.canvas_h - self.margin,
        )
    }

    pub fn usable_width(&self) -> u32 {
        self.canvas_w - 2 * self.margin
    }
}

/// A parsed config file: the config plus whether it set `master_seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: GenConfig,
    pub seed_given: bool,
}

pub fn parse_config(text: &str) -> Result<LoadedConfig, ComposeError> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ComposeError::InvalidConfig(e.to_string()))?;
    match table.remove("version") {
        Some(toml::Value::Integer(CONFIG_VERSION)) => {}
        Some(v) => {
            return Err(ComposeError::InvalidConfig(format!(
                "unsupported config version {v} (expected {CONFIG_VERSION})"
            )))
        }
        None => {
            return Err(ComposeError::InvalidConfig(
                "config file must declare `version = 1`".into(),
            ))
        }
    }
    let seed_given = table.contains_key("master_seed");
    let config: GenConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| ComposeError::InvalidConfig(e.to_string()))?;
    Ok(LoadedConfig { config, seed_given })
}

pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig, ComposeError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ComposeError::Io {
        path: path.to_path_buf(),
        page: None,
        source,
    })?;
    parse_config(&text)
}
