//! Garment pipeline: bind garment meshes to the body rig, recolor textures
//! into the clinical palette and look assets up by class.

mod asset;
mod palette;
mod registry;
mod transfer;

pub use asset::{ClothingAsset, GarmentAssetFile, GarmentClass, MeshAsset, SourceKind};
pub use palette::{hsv_to_rgb, recolor_texture, rgb_to_hsv, PaletteColor, PaletteSpec};
pub use registry::GarmentRegistry;
pub use transfer::{nearest_body_vertices, transfer_blendshapes, transfer_weights, TRANSFER_NEIGHBORS};
