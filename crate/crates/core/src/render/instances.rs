use std::sync::Arc;

use image::RgbImage;
use nalgebra::{Isometry3, Point3, Quaternion, UnitQuaternion, Vector3};

use super::primitive_mesh;
use crate::assets::AssetStore;
use crate::body_model::{apply_shape, forward_kinematics, skin_mesh, TemplateMesh};
use crate::clothing::recolor_texture;
use crate::scene::{Environment, FrameSpec, PrimitiveKind, RenderSettings};
use crate::{Error, Result, DISTRACTOR_CLASS_BASE, HUMAN_CLASS, ROOM_CLASS};

/// Instance id of character 0's body; its garments follow at `+ class_id`,
/// and each further character starts 8 ids later.
pub const HUMAN_INSTANCE_BASE: u16 = 1;
const IDS_PER_CHARACTER: u16 = 8;
const DISTRACTOR_INSTANCE_BASE: u16 = 50_000;
const ROOM_INSTANCE_BASE: u16 = 60_000;

/// A posed, world-space mesh ready for rasterization.
#[derive(Debug, Clone)]
pub struct RenderInstance {
    pub mesh: TemplateMesh,
    pub texture: Arc<RgbImage>,
    pub class_id: u8,
    pub instance_id: u16,
    /// Character index for the body and its garments.
    pub group: Option<u16>,
    /// World position reported in annotations.
    pub origin: [f64; 3],
}

fn transform_mesh(mesh: &mut TemplateMesh, iso: &Isometry3<f64>) {
    for v in &mut mesh.vertices {
        *v = iso.transform_point(&Point3::from(*v)).coords;
    }
    for n in &mut mesh.normals {
        *n = iso.rotation * *n;
    }
}

fn primitive_class(kind: PrimitiveKind) -> u8 {
    DISTRACTOR_CLASS_BASE
        + match kind {
            PrimitiveKind::Box => 0,
            PrimitiveKind::Sphere => 1,
            PrimitiveKind::Cylinder => 2,
        }
}

/// Posed body, one posed garment per outfit item, distractors and room
/// geometry for `frame`.
///
/// Garments share the character's shape coefficients and pose through their
/// transferred blend shapes and weights, and are pushed `garment_offset`
/// metres outward along their posed normals.
pub fn build_instances(frame: &FrameSpec, assets: &AssetStore, settings: &RenderSettings) -> Result<Vec<RenderInstance>> {
    let body = assets.body();
    let palette = assets.palette();
    let mut out = Vec::new();
    for (g, character) in frame.characters.iter().enumerate() {
        let group = u16::try_from(g)
            .ok()
            .filter(|&g| (g as u32 + 1) * (IDS_PER_CHARACTER as u32) < DISTRACTOR_INSTANCE_BASE as u32)
            .ok_or_else(|| Error::Validation(format!("too many characters in frame {}", frame.frame_index)))?;
        let base_id = HUMAN_INSTANCE_BASE + group * IDS_PER_CHARACTER;
        let pose = character.pose()?;
        let placement = character.placement.isometry();
        let root = forward_kinematics(&body.skeleton, &pose)?[0].translation.vector;
        let origin: [f64; 3] = placement.transform_point(&Point3::from(root)).coords.into();

        let shaped = apply_shape(&body.mesh, &body.shape_basis, &character.shape_coeffs)?;
        let mut mesh = skin_mesh(&shaped, &body.weights, &body.skeleton, &pose)?;
        transform_mesh(&mut mesh, &placement);
        out.push(RenderInstance {
            mesh,
            texture: assets.texture(&character.texture)?,
            class_id: HUMAN_CLASS,
            instance_id: base_id,
            group: Some(group),
            origin,
        });

        for item in &character.outfit {
            let garment = assets.garment(&item.asset)?;
            if garment.class_label != item.class {
                return Err(Error::Consistency(format!(
                    "garment '{}' is a {}, outfit slot is {}",
                    item.asset, garment.class_label, item.class
                )));
            }
            let shaped = apply_shape(&garment.mesh, &garment.shape_basis, &character.shape_coeffs)?;
            let mut mesh = skin_mesh(&shaped, &garment.weights, &body.skeleton, &pose)?;
            if settings.garment_offset != 0.0 {
                for (v, n) in mesh.vertices.iter_mut().zip(&mesh.normals) {
                    *v += n * settings.garment_offset;
                }
            }
            transform_mesh(&mut mesh, &placement);
            let texture = match item.palette {
                None => garment.base_texture.clone(),
                Some(color) => recolor_texture(&garment.base_texture, palette.hue(color), item.jitter_seed, palette),
            };
            out.push(RenderInstance {
                mesh,
                texture: Arc::new(texture),
                class_id: item.class.class_id(),
                instance_id: base_id + item.class.class_id() as u16,
                group: Some(group),
                origin,
            });
        }
    }

    for (i, d) in frame.distractors.iter().enumerate() {
        let id = u16::try_from(i)
            .ok()
            .and_then(|i| DISTRACTOR_INSTANCE_BASE.checked_add(i))
            .filter(|&id| id < ROOM_INSTANCE_BASE)
            .ok_or_else(|| Error::Validation(format!("too many distractors in frame {}", frame.frame_index)))?;
        let [w, x, y, z] = d.rotation;
        let rotation = UnitQuaternion::from_quaternion(Quaternion::new(w, x, y, z));
        let mut mesh = primitive_mesh(d.shape);
        for v in &mut mesh.vertices {
            *v = rotation * v.component_mul(&Vector3::from(d.scale)) + Vector3::from(d.position);
        }
        mesh.recompute_normals();
        out.push(RenderInstance {
            mesh,
            texture: assets.texture(&d.texture)?,
            class_id: primitive_class(d.shape),
            instance_id: id,
            group: None,
            origin: d.position,
        });
    }

    if let Environment::Room { room } = &frame.environment {
        for (i, part) in assets.room(room)?.iter().enumerate() {
            out.push(RenderInstance {
                mesh: part.mesh.as_ref().clone(),
                texture: part.texture.clone(),
                class_id: ROOM_CLASS,
                instance_id: ROOM_INSTANCE_BASE + i as u16,
                group: None,
                origin: [0.0; 3],
            });
        }
    }
    Ok(out)
}
