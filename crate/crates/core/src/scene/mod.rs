//! Seeded scene composition. One [`FrameSpec`] is a pure function of the
//! randomization config, the frame index and the master seed.

mod camera;
mod compose;
mod config;
mod frame;

pub use camera::{project, CameraModel, Projection};
pub use compose::{compose, compose_dr, compose_sdr, frame_seed, plan_dataset, plan_range, point_in_polygon};
pub use config::{
    CameraRanges, ConfigFile, DistractorSpec, HumanTexture, ImageSize, LightRanges, RandomizationConfig,
    RenderSettings, RoomFile, RoomMesh, RoomScene,
};
pub use frame::{
    color_temperature_rgb, CharacterSpec, Distractor, Environment, FrameSpec, Light, LightKind, Mode, OutfitItem,
    Placement, PrimitiveKind,
};
