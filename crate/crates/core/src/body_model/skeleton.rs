use nalgebra::{Isometry3, Translation3, UnitQuaternion, Vector3};

use crate::{Error, Result};

/// One joint of the hierarchy. `offset` is the rest-pose translation relative
/// to the parent joint (or to the character origin for the root).
#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    pub name: String,
    pub parent: Option<usize>,
    pub offset: Vector3<f64>,
}

/// Joint hierarchy in topological order. Joint 0 is the only root.
#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    joints: Vec<Joint>,
}

impl Skeleton {
    pub fn new(joints: Vec<Joint>) -> Result<Self> {
        if joints.is_empty() {
            return Err(Error::InvalidAsset("skeleton has no joints".into()));
        }
        for (i, j) in joints.iter().enumerate() {
            match (i, j.parent) {
                (0, None) => {}
                (0, Some(_)) => {
                    return Err(Error::InvalidAsset("joint 0 must be the root".into()));
                }
                (_, None) => {
                    return Err(Error::InvalidAsset(format!("joint {i} ({}) has no parent", j.name)));
                }
                (_, Some(p)) if p >= i => {
                    return Err(Error::InvalidAsset(format!(
                        "joint {i} ({}) has parent {p}; parents must precede children",
                        j.name
                    )));
                }
                _ => {}
            }
        }
        Ok(Skeleton { joints })
    }

    pub fn joints(&self) -> &[Joint] {
        &self.joints
    }

    pub fn joint_count(&self) -> usize {
        self.joints.len()
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.joints.iter().position(|j| j.name == name)
    }

    /// Parent index with the file-format sentinel (-1 for the root).
    pub fn parent_index(&self, joint: usize) -> i64 {
        self.joints[joint].parent.map_or(-1, |p| p as i64)
    }
}

/// Per-joint local rotations plus a root translation.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    pub rotations: Vec<UnitQuaternion<f64>>,
    pub root_translation: Vector3<f64>,
}

impl Pose {
    pub fn identity(joint_count: usize) -> Self {
        Pose {
            rotations: vec![UnitQuaternion::identity(); joint_count],
            root_translation: Vector3::zeros(),
        }
    }

    /// Build from raw `[w, x, y, z]` quaternions, each of which must already be
    /// unit length within 1e-6.
    pub fn from_wxyz(rotations: &[[f64; 4]], root_translation: [f64; 3]) -> Result<Self> {
        let rotations = rotations
            .iter()
            .map(|&[w, x, y, z]| {
                let q = nalgebra::Quaternion::new(w, x, y, z);
                let norm = q.norm();
                if (norm - 1.0).abs() > 1e-6 {
                    Err(Error::Range {
                        what: "quaternion norm",
                        value: norm,
                    })
                } else {
                    Ok(UnitQuaternion::new_normalize(q))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Pose {
            rotations,
            root_translation: Vector3::from(root_translation),
        })
    }

    pub fn to_wxyz(&self) -> Vec<[f64; 4]> {
        self.rotations
            .iter()
            .map(|q| [q.w, q.i, q.j, q.k])
            .collect()
    }
}

/// World transform of every joint.
///
/// `world[j] = world[parent(j)] * T(offset_j) * R_j`; the root additionally
/// receives the pose translation.
pub fn forward_kinematics(skeleton: &Skeleton, pose: &Pose) -> Result<Vec<Isometry3<f64>>> {
    if pose.rotations.len() != skeleton.joint_count() {
        return Err(Error::Dimension {
            what: "pose rotations",
            expected: skeleton.joint_count(),
            got: pose.rotations.len(),
        });
    }
    let mut world: Vec<Isometry3<f64>> = Vec::with_capacity(skeleton.joint_count());
    for (joint, rot) in skeleton.joints.iter().zip(&pose.rotations) {
        let local = match joint.parent {
            None => Isometry3::from_parts(Translation3::from(joint.offset + pose.root_translation), *rot),
            Some(_) => Isometry3::from_parts(Translation3::from(joint.offset), *rot),
        };
        let transform = match joint.parent {
            None => local,
            Some(p) => world[p] * local,
        };
        world.push(transform);
    }
    Ok(world)
}

/// World transforms of the rest pose.
pub fn rest_world_transforms(skeleton: &Skeleton) -> Vec<Isometry3<f64>> {
    forward_kinematics(skeleton, &Pose::identity(skeleton.joint_count()))
        .expect("identity pose always matches")
}
