use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FrameAnnotation;
use crate::dataset_eval::DatasetManifest;
use crate::error::{read_json, write_json};
use crate::{Error, Result, CLASS_NAMES};

pub fn export_frame(annotation: &FrameAnnotation, path: &Path) -> Result<()> {
    write_json(path, annotation)
}

pub fn load_frame(path: &Path) -> Result<FrameAnnotation> {
    let a: FrameAnnotation = read_json(path)?;
    a.validate()?;
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifestFormat {
    Native,
    CocoLike,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoImage {
    pub id: u64,
    pub file_name: String,
    pub width: u32,
    pub height: u32,
    pub split: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoAnnotation {
    pub id: u64,
    pub image_id: u64,
    pub category_id: u8,
    /// `[x, y, w, h]`.
    pub bbox: [u32; 4],
    pub area: u64,
    pub iscrowd: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoCategory {
    pub id: u8,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoDocument {
    pub images: Vec<CocoImage>,
    pub annotations: Vec<CocoAnnotation>,
    pub categories: Vec<CocoCategory>,
}

impl CocoDocument {
    fn build(manifest: &DatasetManifest, frames: &[FrameAnnotation]) -> Result<Self> {
        let by_index: BTreeMap<u64, _> = manifest
            .entries
            .iter()
            .filter_map(|e| e.frame_index.map(|i| (i, e)))
            .collect();
        let mut images = Vec::with_capacity(frames.len());
        let mut annotations = Vec::new();
        for f in frames {
            let entry = by_index.get(&f.frame_index);
            let file_name = entry
                .and_then(|e| e.files.get("rgb").cloned())
                .unwrap_or_else(|| format!("{:06}.rgb.png", f.frame_index));
            images.push(CocoImage {
                id: f.frame_index,
                file_name,
                width: f.camera.width,
                height: f.camera.height,
                split: entry.map_or_else(String::new, |e| e.split.as_str().to_string()),
            });
            for o in &f.objects {
                annotations.push(CocoAnnotation {
                    id: annotations.len() as u64 + 1,
                    image_id: f.frame_index,
                    category_id: o.class_id,
                    bbox: o.bbox.to_xywh(),
                    area: o.bbox.area(),
                    iscrowd: 0,
                });
            }
        }
        Ok(CocoDocument {
            images,
            annotations,
            categories: CLASS_NAMES
                .iter()
                .enumerate()
                .map(|(id, name)| CocoCategory {
                    id: id as u8,
                    name: name.to_string(),
                })
                .collect(),
        })
    }
}

/// Write the dataset index. `Native` writes the manifest itself;
/// `CocoLike` writes one document with images, `[x, y, w, h]` boxes and the
/// seven categories.
pub fn export_manifest(manifest: &DatasetManifest, frames: &[FrameAnnotation], format: ManifestFormat, path: &Path) -> Result<()> {
    if frames.is_empty() {
        return Err(Error::Validation("manifest export needs at least one frame".into()));
    }
    let mut seen = BTreeSet::new();
    if let Some(f) = frames.iter().find(|f| !seen.insert(f.frame_index)) {
        return Err(Error::Validation(format!("frame index {} appears twice", f.frame_index)));
    }
    match format {
        ManifestFormat::Native => {
            manifest.validate()?;
            write_json(path, manifest)
        }
        ManifestFormat::CocoLike => write_json(path, &CocoDocument::build(manifest, frames)?),
    }
}
