//! Parametric articulated body: a template mesh deformed by shape blend
//! shapes and posed through a joint hierarchy with linear blend skinning.

mod animation;
mod asset;
mod mesh;
mod shape;
mod skeleton;
mod skinning;

pub use animation::{sample_animation, slerp, AnimationClip, Keyframe};
pub use asset::{BodyAsset, ParametricBody};
pub use mesh::TemplateMesh;
pub use shape::{apply_shape, ShapeBasis, DEFAULT_NUM_COEFFS};
pub use skeleton::{forward_kinematics, rest_world_transforms, Joint, Pose, Skeleton};
pub use skinning::{skin_mesh, skinning_matrices, Influence, SkinWeights, MAX_INFLUENCES};
