//! Record types shared across the crate: annotated instances and detector
//! predictions.

use crate::geometry::BBox;

/// One annotated object: a box tied to an image, a category, and a stable id.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<F> {
    pub id: u64,
    pub image_id: u64,
    pub category_id: u64,
    pub bbox: BBox<F>,
    /// COCO crowd-region flag; crowd instances are excluded from AP matching.
    pub iscrowd: bool,
}

/// One detector prediction: a scored box for a single category in an image.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<F> {
    pub image_id: u64,
    pub category_id: u64,
    pub bbox: BBox<F>,
    /// Confidence in `[0, 1]`. Validated wherever predictions enter the
    /// system (results files, simulation).
    pub score: F,
}

impl<F: Copy> Prediction<F> {
    /// The score this prediction assigns to `category_id`, or `None` when it
    /// scores a different category.
    pub fn score_for(&self, category_id: u64) -> Option<F> {
        (self.category_id == category_id).then_some(self.score)
    }
}
