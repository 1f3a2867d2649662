//! Axis-aligned boxes in corner form and overlap measures.
//!
//! Boxes are stored as `(l, t, r, b)` in absolute pixel coordinates with the
//! y axis pointing down, so `l <= r` and `t <= b`. The COCO `[x, y, w, h]`
//! form appears only at conversion boundaries.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;

/// Axis-aligned bounding box with ordered corners (`l <= r`, `t <= b`).
///
/// The ordering invariant is enforced at construction: [`BBox::new`] rejects
/// violations, [`BBox::new_clamped`] repairs them by sorting each coordinate
/// pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BBox<F> {
    l: F,
    t: F,
    r: F,
    b: F,
}

impl<F: Real> BBox<F> {
    /// Builds a box from corners, rejecting non-finite or inverted input.
    pub fn new(l: F, t: F, r: F, b: F) -> Result<Self> {
        let finite = l.is_finite() && t.is_finite() && r.is_finite() && b.is_finite();
        if !finite {
            return Err(Self::invalid("coordinates must be finite", l, t, r, b));
        }
        if l > r || t > b {
            return Err(Self::invalid("corners out of order", l, t, r, b));
        }
        Ok(BBox { l, t, r, b })
    }

    /// Builds a box from corners, sorting each inverted coordinate pair
    /// instead of rejecting it. Non-finite input is still rejected.
    pub fn new_clamped(l: F, t: F, r: F, b: F) -> Result<Self> {
        let finite = l.is_finite() && t.is_finite() && r.is_finite() && b.is_finite();
        if !finite {
            return Err(Self::invalid("coordinates must be finite", l, t, r, b));
        }
        Ok(BBox {
            l: l.min(r),
            t: t.min(b),
            r: l.max(r),
            b: t.max(b),
        })
    }

    /// Converts from COCO `[x, y, w, h]`. Negative extents are rejected.
    pub fn from_xywh(x: F, y: F, w: F, h: F) -> Result<Self> {
        if !(w >= F::zero() && h >= F::zero()) {
            return Err(Error::InvalidSize {
                reason: "width and height must be non-negative",
                w: w.to_f64().unwrap_or(f64::NAN),
                h: h.to_f64().unwrap_or(f64::NAN),
            });
        }
        Self::new(x, y, x + w, y + h)
    }

    /// Converts to COCO `[x, y, w, h]`.
    pub fn to_xywh(&self) -> [F; 4] {
        [self.l, self.t, self.r - self.l, self.b - self.t]
    }

    fn invalid(reason: &'static str, l: F, t: F, r: F, b: F) -> Error {
        let f = |v: F| v.to_f64().unwrap_or(f64::NAN);
        Error::InvalidBox {
            reason,
            l: f(l),
            t: f(t),
            r: f(r),
            b: f(b),
        }
    }

    pub fn l(&self) -> F {
        self.l
    }

    pub fn t(&self) -> F {
        self.t
    }

    pub fn r(&self) -> F {
        self.r
    }

    pub fn b(&self) -> F {
        self.b
    }

    /// Corners in `[l, t, r, b]` order.
    pub fn corners(&self) -> [F; 4] {
        [self.l, self.t, self.r, self.b]
    }

    pub fn width(&self) -> F {
        self.r - self.l
    }

    pub fn height(&self) -> F {
        self.b - self.t
    }

    pub fn area(&self) -> F {
        self.width() * self.height()
    }

    /// Intersection area with `other`; zero when the boxes are disjoint.
    pub fn intersection_area(&self, other: &Self) -> F {
        let iw = (self.r.min(other.r) - self.l.max(other.l)).max(F::zero());
        let ih = (self.b.min(other.b) - self.t.max(other.t)).max(F::zero());
        iw * ih
    }

    /// Intersection over union in `[0, 1]`. Defined as 0 when the union has
    /// zero area.
    pub fn iou(&self, other: &Self) -> F {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union <= F::zero() {
            F::zero()
        } else {
            inter / union
        }
    }

    /// Whether `other` lies entirely inside this box (boundaries may touch).
    pub fn contains(&self, other: &Self) -> bool {
        self.l <= other.l && self.t <= other.t && self.r >= other.r && self.b >= other.b
    }

    /// The box shifted by `(dx, dy)`.
    pub fn translated(&self, dx: F, dy: F) -> Self {
        BBox {
            l: self.l + dx,
            t: self.t + dy,
            r: self.r + dx,
            b: self.b + dy,
        }
    }

    /// The box intersected with the image rectangle `[0, w] x [0, h]`.
    /// The result may have zero extent if the box lies outside the image.
    pub fn clipped_to_image(&self, w: F, h: F) -> Self {
        let clamp = |v: F, hi: F| v.max(F::zero()).min(hi);
        let l = clamp(self.l, w);
        let r = clamp(self.r, w);
        let t = clamp(self.t, h);
        let b = clamp(self.b, h);
        BBox { l, t, r, b }
    }
}
