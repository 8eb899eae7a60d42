use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::bbox::{scan_instances, BoundingBox2D};
use crate::render::FrameBuffers;
use crate::scene::{CameraModel, FrameSpec, Mode};
use crate::{class_name, Error, Result, HUMAN_CLASS};

/// One detectable object of a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectAnnotation {
    pub class_id: u8,
    pub class_name: String,
    pub instance_id: u16,
    pub bbox: BoundingBox2D,
    pub visible_pixels: u32,
    /// Visible pixels over the pixels the object covers when rendered alone.
    pub visibility: f64,
    pub world_position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameAnnotation {
    pub frame_index: u64,
    pub mode: Mode,
    pub seed: u64,
    pub camera: CameraModel,
    pub objects: Vec<ObjectAnnotation>,
}

impl FrameAnnotation {
    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for o in &self.objects {
            if !ids.insert(o.instance_id) {
                return Err(Error::Validation(format!(
                    "frame {}: instance id {} repeated",
                    self.frame_index, o.instance_id
                )));
            }
            if !o.bbox.fits(self.camera.width, self.camera.height) {
                return Err(Error::Validation(format!(
                    "frame {}: box of instance {} leaves the image",
                    self.frame_index, o.instance_id
                )));
            }
        }
        Ok(())
    }
}

/// Annotations for the detection classes of a rendered frame.
///
/// A character's human (class 0) object is the union of its body and every
/// worn garment; its visibility compares against the whole clothed
/// character rendered alone. Garments are annotated from their own pixels.
/// Objects below `min_visibility` or without visible pixels are dropped.
/// Distractors and room geometry only act as occluders.
pub fn annotate_frame(buffers: &FrameBuffers, spec: &FrameSpec, min_visibility: f64) -> Result<FrameAnnotation> {
    let cam = &spec.camera;
    if (buffers.width(), buffers.height()) != (cam.width, cam.height) {
        return Err(Error::Consistency(format!(
            "buffers are {}x{}, camera of frame {} is {}x{}",
            buffers.width(),
            buffers.height(),
            spec.frame_index,
            cam.width,
            cam.height
        )));
    }
    let stats = scan_instances(buffers);
    let known: BTreeSet<u16> = buffers.instances.iter().map(|i| i.instance_id).collect();
    if let Some(id) = (1..stats.len()).find(|&id| stats[id].0 > 0 && !known.contains(&(id as u16))) {
        return Err(Error::Consistency(format!("instance {id} in the buffer has no record")));
    }
    let groups = buffers.group_solo_pixels.len();
    if groups != spec.characters.len() {
        return Err(Error::Consistency(format!(
            "buffers hold {groups} characters, frame {} has {}",
            spec.frame_index,
            spec.characters.len()
        )));
    }

    let mut objects = Vec::new();
    let mut push = |class_id: u8, instance_id: u16, visible: u32, bbox: Option<BoundingBox2D>, total: u32, origin| {
        let Some(bbox) = bbox else { return };
        if visible == 0 || total == 0 {
            return;
        }
        let visibility = (visible as f64 / total as f64).min(1.0);
        if visibility < min_visibility {
            return;
        }
        objects.push(ObjectAnnotation {
            class_id,
            class_name: class_name(class_id).unwrap_or("unknown").to_string(),
            instance_id,
            bbox,
            visible_pixels: visible,
            visibility,
            world_position: origin,
        });
    };

    for g in 0..groups {
        let members: Vec<_> = buffers.instances.iter().filter(|i| i.group == Some(g as u16)).collect();
        let Some(body) = members.iter().find(|i| i.class_id == HUMAN_CLASS) else {
            return Err(Error::Consistency(format!("character {g} has no body instance")));
        };
        let (visible, bbox) = members.iter().fold((0, None), |(n, b), m| {
            let s = stats[m.instance_id as usize];
            (n + s.0, BoundingBox2D::union(b, s.1))
        });
        push(HUMAN_CLASS, body.instance_id, visible, bbox, buffers.group_solo_pixels[g], body.origin);
        for m in members.iter().filter(|m| m.class_id != HUMAN_CLASS && class_name(m.class_id).is_some()) {
            let s = stats[m.instance_id as usize];
            push(m.class_id, m.instance_id, s.0, s.1, m.solo_pixels, m.origin);
        }
    }
    for m in buffers.instances.iter().filter(|m| m.group.is_none() && class_name(m.class_id).is_some()) {
        let s = stats[m.instance_id as usize];
        push(m.class_id, m.instance_id, s.0, s.1, m.solo_pixels, m.origin);
    }

    Ok(FrameAnnotation {
        frame_index: spec.frame_index,
        mode: spec.mode,
        seed: spec.seed,
        camera: cam.clone(),
        objects,
    })
}
