use std::path::Path;

use nalgebra::{Quaternion, UnitQuaternion};
use serde::{Deserialize, Serialize};

use super::Pose;
use crate::error::{read_json, write_json};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Keyframe {
    pub time: f64,
    pub pose: Pose,
}

/// Keyframed pose sequence with non-decreasing key times.
#[derive(Debug, Clone, PartialEq)]
pub struct AnimationClip {
    keyframes: Vec<Keyframe>,
}

#[derive(Serialize, Deserialize)]
struct KeyframeFile {
    time: f64,
    root_translation: [f64; 3],
    rotations: Vec<[f64; 4]>,
}

impl AnimationClip {
    pub fn new(keyframes: Vec<Keyframe>) -> Result<Self> {
        let first = keyframes
            .first()
            .ok_or_else(|| Error::InvalidAsset("animation clip has no keyframes".into()))?;
        let joints = first.pose.rotations.len();
        for pair in keyframes.windows(2) {
            if !(pair[1].time >= pair[0].time) {
                return Err(Error::InvalidAsset(format!(
                    "keyframe times must be non-decreasing ({} then {})",
                    pair[0].time, pair[1].time
                )));
            }
        }
        if let Some(k) = keyframes.iter().find(|k| k.pose.rotations.len() != joints) {
            return Err(Error::Dimension {
                what: "keyframe rotations",
                expected: joints,
                got: k.pose.rotations.len(),
            });
        }
        Ok(AnimationClip { keyframes })
    }

    pub fn keyframes(&self) -> &[Keyframe] {
        &self.keyframes
    }

    pub fn joint_count(&self) -> usize {
        self.keyframes[0].pose.rotations.len()
    }

    /// Number of intervals between consecutive keyframes (at least one).
    pub fn interval_count(&self) -> usize {
        self.keyframes.len().saturating_sub(1).max(1)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw: Vec<KeyframeFile> = read_json(path)?;
        let keyframes = raw
            .into_iter()
            .map(|k| {
                Ok(Keyframe {
                    time: k.time,
                    pose: Pose::from_wxyz(&k.rotations, k.root_translation)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        AnimationClip::new(keyframes)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let raw: Vec<KeyframeFile> = self
            .keyframes
            .iter()
            .map(|k| KeyframeFile {
                time: k.time,
                root_translation: k.pose.root_translation.into(),
                rotations: k.pose.to_wxyz(),
            })
            .collect();
        write_json(path, &raw)
    }
}

/// Shortest-arc spherical interpolation. Falls back to normalized linear
/// interpolation for nearly parallel quaternions.
pub fn slerp(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>, t: f64) -> UnitQuaternion<f64> {
    let qa = a.quaternion();
    let mut qb = *b.quaternion();
    let mut dot = qa.dot(&qb);
    if dot < 0.0 {
        qb = -qb;
        dot = -dot;
    }
    if dot > 1.0 - 1e-12 {
        return UnitQuaternion::new_normalize(qa * (1.0 - t) + qb * t);
    }
    let theta = dot.clamp(-1.0, 1.0).acos();
    let sin = theta.sin();
    let wa = ((1.0 - t) * theta).sin() / sin;
    let wb = (t * theta).sin() / sin;
    UnitQuaternion::new_normalize(Quaternion::from(qa.coords * wa + qb.coords * wb))
}

/// Pose at normalized clip time `t` in [0, 1].
pub fn sample_animation(clip: &AnimationClip, t: f64) -> Result<Pose> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Range {
            what: "animation time",
            value: t,
        });
    }
    let keys = &clip.keyframes;
    let (first, last) = (&keys[0], &keys[keys.len() - 1]);
    if t == 0.0 || keys.len() == 1 {
        return Ok(first.pose.clone());
    }
    if t == 1.0 {
        return Ok(last.pose.clone());
    }
    let time = first.time + t * (last.time - first.time);
    // Last keyframe whose time is <= the query.
    let hi = keys.partition_point(|k| k.time <= time).clamp(1, keys.len() - 1);
    let (a, b) = (&keys[hi - 1], &keys[hi]);
    let span = b.time - a.time;
    let local = if span > 0.0 { ((time - a.time) / span).clamp(0.0, 1.0) } else { 0.0 };
    Ok(Pose {
        rotations: a
            .pose
            .rotations
            .iter()
            .zip(&b.pose.rotations)
            .map(|(qa, qb)| slerp(qa, qb, local))
            .collect(),
        root_translation: a.pose.root_translation.lerp(&b.pose.root_translation, local),
    })
}
