use rand::Rng;

use super::NoiseConfig;
use crate::annot_io::{LayoutClass, LayoutElement};
use crate::geometry::BBox;

/// Jitter attempts per box before it is left unperturbed.
pub const JITTER_ATTEMPTS: usize = 10;

/// Perturbs labels independently per element: a class flip with
/// `class_flip_prob` (to a uniformly chosen different class), then corner
/// jitter clamped to the canvas. With both knobs at zero the input is
/// returned unchanged and no randomness is consumed.
pub fn inject_label_noise<R: Rng + ?Sized>(
    elements: &[LayoutElement],
    noise: &NoiseConfig,
    canvas_w: u32,
    canvas_h: u32,
    rng: &mut R,
) -> Vec<LayoutElement> {
    let (cw, ch) = (canvas_w as f64, canvas_h as f64);
    elements
        .iter()
        .map(|el| {
            let mut out = el.clone();
            if noise.class_flip_prob > 0.0 && rng.gen::<f64>() < noise.class_flip_prob {
                out.label = flip_class(el.label, rng);
            }
            let j = noise.bbox_jitter_px;
            if j > 0.0 {
                for _ in 0..JITTER_ATTEMPTS {
                    let mut offset = || rng.gen_range(-j..=j);
                    let x0 = (el.bbox.x_min() + offset()).clamp(0.0, cw);
                    let y0 = (el.bbox.y_min() + offset()).clamp(0.0, ch);
                    let x1 = (el.bbox.x_max() + offset()).clamp(0.0, cw);
                    let y1 = (el.bbox.y_max() + offset()).clamp(0.0, ch);
                    if let Ok(b) = BBox::new(x0, y0, x1, y1) {
                        out.bbox = b;
                        break;
                    }
                }
            }
            out
        })
        .collect()
}

fn flip_class<R: Rng + ?Sized>(from: LayoutClass, rng: &mut R) -> LayoutClass {
    let k = rng.gen_range(0..LayoutClass::COUNT - 1);
    let idx = if k >= from.index() { k + 1 } else { k };
    LayoutClass::ALL[idx]
}
