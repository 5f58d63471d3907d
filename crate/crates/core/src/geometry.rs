//! Axis-aligned box algebra in pixel space plus YOLO-normalized conversion.
//!
//! Boxes use the `(x_min, y_min, x_max, y_max)` corner convention with an
//! exclusive max edge. Two boxes that only share an edge or a corner do not
//! overlap.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed on normalized YOLO coordinates (quantization to 6 decimals).
pub const YOLO_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("box ({x_min}, {y_min}, {x_max}, {y_max}) has non-positive area or non-finite/negative coordinates")]
    InvalidBox {
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    },
    #[error("box falls outside the canvas")]
    OutOfCanvas,
    #[error("normalized box (cx={cx}, cy={cy}, w={w}, h={h}) is outside the unit square")]
    OutOfRangeNormalized { cx: f64, cy: f64, w: f64, h: f64 },
}

/// Axis-aligned rectangle in pixel coordinates with strictly positive area.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
}

impl BBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, GeometryError> {
        let finite = [x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min < 0.0 || y_min < 0.0 || x_min >= x_max || y_min >= y_max {
            return Err(GeometryError::InvalidBox {
                x_min,
                y_min,
                x_max,
                y_max,
            });
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    /// Builds a box from a COCO-style `[x, y, width, height]` quadruple.
    pub fn from_xywh(x: f64, y: f64, w: f64, h: f64) -> Result<Self, GeometryError> {
        Self::new(x, y, x + w, y + h)
    }

    #[inline]
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    #[inline]
    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    #[inline]
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    #[inline]
    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    #[inline]
    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn to_xyxy(&self) -> [f64; 4] {
        [self.x_min, self.y_min, self.x_max, self.y_max]
    }

    pub fn to_xywh(&self) -> [f64; 4] {
        [self.x_min, self.y_min, self.width(), self.height()]
    }

    /// Overlap rectangle, or `None` when the overlap has zero area.
    pub fn intersect(&self, other: &BBox) -> Option<BBox> {
        let x_min = self.x_min.max(other.x_min);
        let y_min = self.y_min.max(other.y_min);
        let x_max = self.x_max.min(other.x_max);
        let y_max = self.y_max.min(other.y_max);
        if x_min < x_max && y_min < y_max {
            Some(BBox {
                x_min,
                y_min,
                x_max,
                y_max,
            })
        } else {
            None
        }
    }

    pub fn intersection_area(&self, other: &BBox) -> f64 {
        self.intersect(other).map_or(0.0, |b| b.area())
    }

    /// Intersection over union, in `[0, 1]`.
    pub fn iou(&self, other: &BBox) -> f64 {
        if self == other {
            return 1.0;
        }
        let inter = self.intersection_area(other);
        if inter == 0.0 {
            return 0.0;
        }
        let union = self.area() + other.area() - inter;
        (inter / union).min(1.0)
    }

    /// Shifts the box by `(dx, dy)`; width and height are preserved.
    pub fn translate(&self, dx: f64, dy: f64) -> Result<BBox, GeometryError> {
        let x_min = self.x_min + dx;
        let y_min = self.y_min + dy;
        if x_min < 0.0 || y_min < 0.0 {
            return Err(GeometryError::OutOfCanvas);
        }
        let (w, h) = (self.width(), self.height());
        Ok(BBox {
            x_min,
            y_min,
            x_max: x_min + w,
            y_max: y_min + h,
        })
    }

    /// True when the box lies inside `[left, right] x [top, bottom]`.
    pub fn within(&self, left: f64, top: f64, right: f64, bottom: f64) -> bool {
        self.x_min >= left && self.y_min >= top && self.x_max <= right && self.y_max <= bottom
    }

    pub fn to_yolo(
        &self,
        class_id: u32,
        canvas_w: f64,
        canvas_h: f64,
    ) -> Result<YoloBox, GeometryError> {
        if !self.within(0.0, 0.0, canvas_w, canvas_h) {
            return Err(GeometryError::OutOfCanvas);
        }
        Ok(YoloBox {
            class_id,
            cx: (self.x_min + self.x_max) / (2.0 * canvas_w),
            cy: (self.y_min + self.y_max) / (2.0 * canvas_h),
            w: self.width() / canvas_w,
            h: self.height() / canvas_h,
        })
    }

    pub fn from_yolo(y: &YoloBox, canvas_w: f64, canvas_h: f64) -> BBox {
        let left = (y.cx - y.w / 2.0).clamp(0.0, 1.0);
        let right = (y.cx + y.w / 2.0).clamp(0.0, 1.0);
        let top = (y.cy - y.h / 2.0).clamp(0.0, 1.0);
        let bottom = (y.cy + y.h / 2.0).clamp(0.0, 1.0);
        BBox {
            x_min: left * canvas_w,
            y_min: top * canvas_h,
            x_max: right * canvas_w,
            y_max: bottom * canvas_h,
        }
    }
}

impl fmt::Debug for BBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BBox({}, {}, {}, {})",
            self.x_min, self.y_min, self.x_max, self.y_max
        )
    }
}

impl TryFrom<[f64; 4]> for BBox {
    type Error = GeometryError;

    fn try_from(v: [f64; 4]) -> Result<Self, Self::Error> {
        BBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        b.to_xyxy()
    }
}

/// A YOLO label: class id plus center and size normalized by the canvas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoloBox {
    pub class_id: u32,
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl YoloBox {
    /// Validated constructor. Extents may overshoot the unit square by at
    /// most [`YOLO_TOLERANCE`].
    pub fn new(class_id: u32, cx: f64, cy: f64, w: f64, h: f64) -> Result<Self, GeometryError> {
        let err = || GeometryError::OutOfRangeNormalized { cx, cy, w, h };
        if ![cx, cy, w, h].iter().all(|v| v.is_finite()) {
            return Err(err());
        }
        let axis_ok = |c: f64, s: f64| {
            s > 0.0
                && s <= 1.0 + YOLO_TOLERANCE
                && c - s / 2.0 >= -YOLO_TOLERANCE
                && c + s / 2.0 <= 1.0 + YOLO_TOLERANCE
                // the clamped extent must stay non-empty
                && c + s / 2.0 > 0.0
                && c - s / 2.0 < 1.0
        };
        if !axis_ok(cx, w) || !axis_ok(cy, h) {
            return Err(err());
        }
        Ok(Self {
            class_id,
            cx,
            cy,
            w,
            h,
        })
    }

    /// One label line, `class cx cy w h`, fixed at 6 decimals.
    pub fn to_line(&self) -> String {
        format!(
            "{} {:.6} {:.6} {:.6} {:.6}",
            self.class_id, self.cx, self.cy, self.w, self.h
        )
    }
}
