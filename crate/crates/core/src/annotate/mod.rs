//! Ground truth derived from rendered buffers: tight boxes, visibility and
//! the per-frame / dataset-level JSON records.

mod bbox;
mod export;
mod frame;

pub use bbox::{bbox_from_mask, BoundingBox2D};
pub use export::{export_frame, export_manifest, load_frame, CocoAnnotation, CocoCategory, CocoDocument, CocoImage, ManifestFormat};
pub use frame::{annotate_frame, FrameAnnotation, ObjectAnnotation};
