//! Dataset summary statistics: class counts and percentages, elements per
//! page, and fill ratio.
//!
//! Percentages are rounded half-up to two decimals using exact integer
//! arithmetic; the unrounded ratios are kept alongside.

use std::fmt::Write as _;

use serde::Serialize;

use crate::annot_io::{AnnotatedPage, Dataset, LayoutClass, PerClass};

/// Class counts with derived ratios and rounded percentages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassDistribution {
    pub counts: PerClass<u64>,
    /// `count / total`, unrounded (0 when the total is 0).
    pub ratios: PerClass<f64>,
    /// `100 * count / total`, rounded half-up to 2 decimals.
    pub percentages: PerClass<f64>,
    pub total: u64,
}

impl ClassDistribution {
    pub fn from_counts(counts: [u64; 5]) -> Self {
        let total: u64 = counts.iter().sum();
        let ratio = |c: u64| if total == 0 { 0.0 } else { c as f64 / total as f64 };
        Self {
            counts: PerClass(counts),
            ratios: PerClass(counts.map(ratio)),
            percentages: PerClass(counts.map(|c| percent_half_up(c, total))),
            total,
        }
    }

    /// Table of label, count, and percentage rows plus a total row.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<8} {:>10} {:>15}", "Label", "Count", "Percentage (%)");
        for (class, count) in self.counts.iter() {
            let _ = writeln!(
                out,
                "{:<8} {:>10} {:>15.2}",
                class.display_name(),
                count,
                self.percentages.get(class)
            );
        }
        let pct_sum: f64 = self.percentages.0.iter().sum();
        let _ = writeln!(out, "{:<8} {:>10} {:>15.2}", "Total", self.total, pct_sum);
        out
    }
}

/// `100 * count / total` rounded half-up to hundredths; 0 when `total == 0`.
pub fn percent_half_up(count: u64, total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    // hundredths = floor(10000 * count / total + 1/2)
    let num = 20_000u128 * count as u128 + total as u128;
    let hundredths = num / (2 * total as u128);
    hundredths as f64 / 100.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    #[serde(flatten)]
    pub distribution: ClassDistribution,
    pub pages: usize,
    pub mean_elements_per_page: f64,
    pub mean_fill_ratio: f64,
}

impl DatasetStats {
    pub fn count(&self, class: LayoutClass) -> u64 {
        *self.distribution.counts.get(class)
    }

    pub fn percentage(&self, class: LayoutClass) -> f64 {
        *self.distribution.percentages.get(class)
    }
}

pub fn class_distribution(d: &Dataset) -> DatasetStats {
    let mut counts = [0u64; 5];
    for page in &d.pages {
        for el in &page.elements {
            counts[el.label.index()] += 1;
        }
    }
    let pages = page_stats(d);
    DatasetStats {
        distribution: ClassDistribution::from_counts(counts),
        pages: d.pages.len(),
        mean_elements_per_page: pages.mean_elements,
        mean_fill_ratio: pages.mean_fill_ratio,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PageMeasure {
    pub elements: usize,
    /// Sum of element areas over page area.
    pub fill_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageStats {
    pub per_page: Vec<PageMeasure>,
    pub mean_elements: f64,
    pub mean_fill_ratio: f64,
}

pub fn page_measure(page: &AnnotatedPage) -> PageMeasure {
    let area = page.width as f64 * page.height as f64;
    let covered: f64 = page.elements.iter().map(|e| e.bbox.area()).sum();
    PageMeasure {
        elements: page.elements.len(),
        fill_ratio: if area > 0.0 { covered / area } else { 0.0 },
    }
}

pub fn page_stats(d: &Dataset) -> PageStats {
    let per_page: Vec<PageMeasure> = d.pages.iter().map(page_measure).collect();
    let n = per_page.len();
    let mean = |f: fn(&PageMeasure) -> f64| {
        if n == 0 {
            0.0
        } else {
            per_page.iter().map(f).sum::<f64>() / n as f64
        }
    };
    PageStats {
        mean_elements: mean(|m| m.elements as f64),
        mean_fill_ratio: mean(|m| m.fill_ratio),
        per_page,
    }
}
