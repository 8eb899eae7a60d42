//! clinsynth: deterministic synthetic dataset engine for clothed human
//! detection in clinical scenes.
//!
//! The crate is organised bottom-up:
//!
//! * [`body_model`]: parametric body (template, shape blend shapes, skeleton,
//!   linear blend skinning, keyframe animation).
//! * [`clothing`]: garment binding (weight and blend-shape transfer), palette
//!   recoloring and the per-class asset registry.
//! * [`scene`]: seeded per-frame composition for domain-randomized (DR) and
//!   structured domain-randomized (SDR) datasets.
//! * [`render`]: CPU rasterizer producing RGB, depth, class and instance
//!   buffers.
//! * [`annotate`]: ground truth extraction and JSON / manifest export.
//! * [`augment`]: mosaic, green-channel gain and chroma-key compositing.
//! * [`dataset_eval`]: manifests, splitting and detection metrics.
//!
//! [`pipeline`] ties the modules together into a single frame generator and
//! [`fixtures`] builds a small procedural asset set for tests and demos.

pub mod annotate;
pub mod assets;
pub mod augment;
pub mod body_model;
pub mod clothing;
pub mod dataset_eval;
mod error;
pub mod fixtures;
pub mod pipeline;
pub mod render;
pub mod scene;
pub mod seed;

pub use error::{Error, Result};

/// Detection classes in reporting order. The class id is the index.
pub const CLASS_NAMES: [&str; 7] = ["body", "gown", "shirt", "pants", "hat", "mask", "glove"];

/// Display names used by the evaluation tables.
pub const CLASS_TITLES: [&str; 7] = ["Body", "Gown", "Shirt", "Pants", "Hat", "Mask", "Glove"];

/// Class id of the human (body + worn garments) annotation.
pub const HUMAN_CLASS: u8 = 0;

/// First class id used by distractor primitives.
pub const DISTRACTOR_CLASS_BASE: u8 = 200;

/// Class id of static room geometry in SDR scenes.
pub const ROOM_CLASS: u8 = 254;

/// Background sentinel of the class segmentation buffer.
pub const BACKGROUND_CLASS: u8 = 255;

/// Human readable name for a class id, if it is one of the detection classes.
pub fn class_name(class_id: u8) -> Option<&'static str> {
    CLASS_NAMES.get(class_id as usize).copied()
}
