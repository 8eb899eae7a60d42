//! Deterministic CPU rasterizer producing RGB, depth, class and instance
//! buffers.

mod buffers;
mod instances;
mod primitives;
mod raster;

pub use buffers::{FrameBuffers, Gray16Image, InstanceInfo};
pub use instances::{build_instances, RenderInstance, HUMAN_INSTANCE_BASE};
pub use primitives::primitive_mesh;
pub use raster::{rasterize, sample_bilinear};
