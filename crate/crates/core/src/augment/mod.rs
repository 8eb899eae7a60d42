//! Training-side augmentations: mosaic, green-channel gain and chroma-key
//! compositing.

mod chroma;
mod green;
mod mosaic;

pub use chroma::{chroma_composite, key_mask, ChromaKeyConfig};
pub use green::{green_channel_aug, GreenChannelConfig};
pub use mosaic::{mosaic, mosaic_center, LabeledBox, LabeledImage, MosaicConfig, MosaicOutput, MIN_BOX_SIDE};
