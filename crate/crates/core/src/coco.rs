//! Reading and writing COCO-style annotation and result files.
//!
//! Fields this library does not model (segmentation, info blocks, license
//! tables, precomputed areas, ...) are captured in per-object `extra` maps
//! and written back untouched, so a load/save cycle preserves everything it
//! does not explicitly edit. Output is canonical: two-space pretty printing,
//! struct fields in a fixed order, unknown keys sorted, one trailing
//! newline. Saving is atomic; the file is staged next to the target and
//! renamed into place.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::types::{Instance, Prediction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoImage {
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file_name: Option<String>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoAnnotation {
    pub id: u64,
    pub image_id: u64,
    pub category_id: u64,
    /// `[x, y, width, height]` as stored in the file.
    pub bbox: [f64; 4],
    #[serde(default)]
    pub iscrowd: u8,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoCategory {
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoDataset {
    #[serde(default)]
    pub images: Vec<CocoImage>,
    #[serde(default)]
    pub annotations: Vec<CocoAnnotation>,
    #[serde(default)]
    pub categories: Vec<CocoCategory>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

/// One detection in a COCO results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoResult {
    pub image_id: u64,
    pub category_id: u64,
    pub bbox: [f64; 4],
    pub score: f64,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl CocoDataset {
    /// Checks id uniqueness, reference integrity, box well-formedness, and
    /// crowd flags. Category references are only checked when the dataset
    /// declares categories.
    pub fn validate(&self) -> Result<()> {
        let mut image_ids = BTreeSet::new();
        for img in &self.images {
            if !image_ids.insert(img.id) {
                return Err(Error::DuplicateId(format!("image id {}", img.id)));
            }
        }
        let mut category_ids = BTreeSet::new();
        for cat in &self.categories {
            if !category_ids.insert(cat.id) {
                return Err(Error::DuplicateId(format!("category id {}", cat.id)));
            }
        }
        let mut annotation_ids = BTreeSet::new();
        for ann in &self.annotations {
            if !annotation_ids.insert(ann.id) {
                return Err(Error::DuplicateId(format!("annotation id {}", ann.id)));
            }
            if !image_ids.contains(&ann.image_id) {
                return Err(Error::DanglingReference(format!(
                    "annotation {} references missing image {}",
                    ann.id, ann.image_id
                )));
            }
            if !self.categories.is_empty() && !category_ids.contains(&ann.category_id) {
                return Err(Error::DanglingReference(format!(
                    "annotation {} references missing category {}",
                    ann.id, ann.category_id
                )));
            }
            let [x, y, w, h] = ann.bbox;
            BBox::<f64>::from_xywh(x, y, w, h).map_err(|e| Error::Instance {
                id: ann.id,
                source: Box::new(e),
            })?;
            if ann.iscrowd > 1 {
                return Err(Error::Instance {
                    id: ann.id,
                    source: Box::new(Error::InvalidConfig(format!(
                        "iscrowd must be 0 or 1, got {}",
                        ann.iscrowd
                    ))),
                });
            }
        }
        Ok(())
    }

    /// Converts every annotation to a corner-form [`Instance`].
    pub fn instances(&self) -> Result<Vec<Instance<f64>>> {
        self.annotations
            .iter()
            .map(|ann| {
                let [x, y, w, h] = ann.bbox;
                let bbox = BBox::from_xywh(x, y, w, h).map_err(|e| Error::Instance {
                    id: ann.id,
                    source: Box::new(e),
                })?;
                Ok(Instance {
                    id: ann.id,
                    image_id: ann.image_id,
                    category_id: ann.category_id,
                    bbox,
                    iscrowd: ann.iscrowd == 1,
                })
            })
            .collect()
    }

    /// Writes the given boxes back into the matching annotations by id.
    /// An annotation whose corners did not move keeps its stored `bbox`
    /// array bit for bit; only genuinely changed boxes are re-encoded.
    /// Every supplied instance must match an annotation.
    pub fn apply_boxes(&mut self, updated: &[Instance<f64>]) -> Result<()> {
        let mut index: HashMap<u64, usize> = HashMap::with_capacity(self.annotations.len());
        for (i, ann) in self.annotations.iter().enumerate() {
            index.insert(ann.id, i);
        }
        let mut seen = BTreeSet::new();
        for inst in updated {
            if !seen.insert(inst.id) {
                return Err(Error::DuplicateId(format!(
                    "updated instance id {}",
                    inst.id
                )));
            }
            let &i = index.get(&inst.id).ok_or_else(|| {
                Error::IdMismatch(format!("no annotation with id {}", inst.id))
            })?;
            let ann = &mut self.annotations[i];
            let [x, y, w, h] = ann.bbox;
            let stored = BBox::from_xywh(x, y, w, h).map_err(|e| Error::Instance {
                id: ann.id,
                source: Box::new(e),
            })?;
            if stored != inst.bbox {
                ann.bbox = inst.bbox.to_xywh();
            }
        }
        Ok(())
    }

    /// Looks up an image's pixel dimensions, when the file declares them.
    pub fn image_size(&self, image_id: u64) -> Option<(f64, f64)> {
        self.images
            .iter()
            .find(|img| img.id == image_id)
            .and_then(|img| Some((img.width?, img.height?)))
    }
}

/// Builds a dataset around the given instances: one image entry per distinct
/// image id (all sized `image_width` x `image_height`), one category entry
/// per distinct category id, and an `area` field on each annotation.
pub fn dataset_from_instances(
    instances: &[Instance<f64>],
    image_width: f64,
    image_height: f64,
) -> CocoDataset {
    let image_ids: BTreeSet<u64> = instances.iter().map(|i| i.image_id).collect();
    let category_ids: BTreeSet<u64> = instances.iter().map(|i| i.category_id).collect();
    let images = image_ids
        .into_iter()
        .map(|id| CocoImage {
            id,
            width: Some(image_width),
            height: Some(image_height),
            file_name: Some(format!("synthetic-{id:06}.jpg")),
            extra: Map::new(),
        })
        .collect();
    let categories = category_ids
        .into_iter()
        .map(|id| CocoCategory {
            id,
            name: Some(format!("category-{id}")),
            extra: Map::new(),
        })
        .collect();
    let annotations = instances
        .iter()
        .map(|inst| {
            let mut extra = Map::new();
            extra.insert("area".into(), Value::from(inst.bbox.area()));
            CocoAnnotation {
                id: inst.id,
                image_id: inst.image_id,
                category_id: inst.category_id,
                bbox: inst.bbox.to_xywh(),
                iscrowd: u8::from(inst.iscrowd),
                extra,
            }
        })
        .collect();
    CocoDataset {
        images,
        annotations,
        categories,
        extra: Map::new(),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads and validates a COCO annotation file.
pub fn load_dataset(path: &Path) -> Result<CocoDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let ds: CocoDataset = serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    ds.validate()?;
    Ok(ds)
}

/// Renders any serializable value in the canonical output format.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Schema {
        path: "<serialize>".into(),
        message: e.to_string(),
    })?;
    text.push('\n');
    Ok(text)
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(path, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

/// Canonically and atomically writes any serializable value as JSON.
pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &to_canonical_json(value)?)
}

/// Atomically writes plain text (used for CSV output).
pub fn save_text(path: &Path, contents: &str) -> Result<()> {
    write_atomic(path, contents)
}

/// Canonically and atomically writes a dataset.
pub fn save_dataset(path: &Path, dataset: &CocoDataset) -> Result<()> {
    save_json(path, dataset)
}

/// Loads a COCO results file (a JSON array of detections) as predictions.
pub fn load_results(path: &Path) -> Result<Vec<Prediction<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let results: Vec<CocoResult> = serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    results
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if !r.score.is_finite() || !(0.0..=1.0).contains(&r.score) {
                return Err(Error::ScoreOutOfRange {
                    score: r.score,
                    context: format!("result {} (image {})", i, r.image_id),
                });
            }
            let [x, y, w, h] = r.bbox;
            let bbox = BBox::from_xywh(x, y, w, h).map_err(|e| Error::Schema {
                path: path.display().to_string(),
                message: format!("result {} (image {}): {}", i, r.image_id, e),
            })?;
            Ok(Prediction {
                image_id: r.image_id,
                category_id: r.category_id,
                bbox,
                score: r.score,
            })
        })
        .collect()
}

/// Canonically and atomically writes predictions as a COCO results array.
pub fn save_results(path: &Path, predictions: &[Prediction<f64>]) -> Result<()> {
    let results: Vec<CocoResult> = predictions
        .iter()
        .map(|p| CocoResult {
            image_id: p.image_id,
            category_id: p.category_id,
            bbox: p.bbox.to_xywh(),
            score: p.score,
            extra: Map::new(),
        })
        .collect();
    write_atomic(path, &to_canonical_json(&results)?)
}
