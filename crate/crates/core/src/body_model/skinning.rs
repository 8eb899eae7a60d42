use arrayvec::ArrayVec;
use nalgebra::{Isometry3, Matrix3, Point3};

use super::{forward_kinematics, rest_world_transforms, Pose, Skeleton, TemplateMesh};
use crate::{Error, Result};

/// Maximum joint influences per vertex.
pub const MAX_INFLUENCES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Influence {
    pub joint: usize,
    pub weight: f64,
}

/// Per-vertex skinning weights, at most four influences each, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SkinWeights {
    per_vertex: Vec<ArrayVec<Influence, MAX_INFLUENCES>>,
}

impl SkinWeights {
    /// Keep the strongest four influences per vertex (ties broken by lower
    /// joint index) and renormalize them to sum to one.
    pub fn from_raw(raw: Vec<Vec<(usize, f64)>>, joint_count: usize) -> Result<Self> {
        let per_vertex = raw
            .into_iter()
            .enumerate()
            .map(|(v, mut infl)| {
                if let Some(&(j, w)) = infl.iter().find(|(j, w)| *j >= joint_count || !(*w >= 0.0)) {
                    return Err(Error::InvalidAsset(format!(
                        "vertex {v}: influence ({j}, {w}) invalid for {joint_count} joints"
                    )));
                }
                merge_duplicates(&mut infl);
                infl.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                infl.truncate(MAX_INFLUENCES);
                infl.retain(|&(_, w)| w > 0.0);
                let total: f64 = infl.iter().map(|(_, w)| w).sum();
                if total <= 0.0 {
                    return Err(Error::InvalidAsset(format!("vertex {v} has no positive weight")));
                }
                Ok(infl
                    .into_iter()
                    .map(|(joint, w)| Influence { joint, weight: w / total })
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SkinWeights { per_vertex })
    }

    pub fn len(&self) -> usize {
        self.per_vertex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_vertex.is_empty()
    }

    pub fn influences(&self, vertex: usize) -> &[Influence] {
        &self.per_vertex[vertex]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Influence]> {
        self.per_vertex.iter().map(|v| v.as_slice())
    }

    pub fn to_raw(&self) -> Vec<Vec<(usize, f64)>> {
        self.per_vertex
            .iter()
            .map(|v| v.iter().map(|i| (i.joint, i.weight)).collect())
            .collect()
    }

    /// Check the partition-of-unity contract.
    pub fn validate(&self, joint_count: usize) -> Result<()> {
        for (v, infl) in self.per_vertex.iter().enumerate() {
            let sum: f64 = infl.iter().map(|i| i.weight).sum();
            if (sum - 1.0).abs() > 1e-6 || infl.iter().any(|i| i.weight < 0.0 || i.joint >= joint_count) {
                return Err(Error::InvalidAsset(format!("vertex {v} weights invalid (sum {sum})")));
            }
        }
        Ok(())
    }
}

fn merge_duplicates(infl: &mut Vec<(usize, f64)>) {
    infl.sort_by_key(|&(j, _)| j);
    infl.dedup_by(|b, a| {
        if a.0 == b.0 {
            a.1 += b.1;
            true
        } else {
            false
        }
    });
}

/// `world[j] * inverse(rest_world[j])` for every joint.
pub fn skinning_matrices(skeleton: &Skeleton, pose: &Pose) -> Result<Vec<Isometry3<f64>>> {
    let world = forward_kinematics(skeleton, pose)?;
    let rest = rest_world_transforms(skeleton);
    Ok(world.iter().zip(&rest).map(|(w, r)| w * r.inverse()).collect())
}

/// Linear blend skinning of `mesh` into `pose`.
pub fn skin_mesh(mesh: &TemplateMesh, weights: &SkinWeights, skeleton: &Skeleton, pose: &Pose) -> Result<TemplateMesh> {
    if weights.len() != mesh.vertex_count() {
        return Err(Error::Dimension {
            what: "skin weights",
            expected: mesh.vertex_count(),
            got: weights.len(),
        });
    }
    let mats = skinning_matrices(skeleton, pose)?;
    let homog: Vec<_> = mats.iter().map(|m| m.to_homogeneous()).collect();
    let mut out = mesh.clone();
    for (i, infl) in weights.per_vertex.iter().enumerate() {
        if let Some(bad) = infl.iter().find(|inf| inf.joint >= mats.len()) {
            return Err(Error::Dimension {
                what: "skin weight joint index",
                expected: mats.len(),
                got: bad.joint,
            });
        }
        let p = Point3::from(mesh.vertices[i]);
        let mut pos = nalgebra::Vector3::zeros();
        let mut rot = Matrix3::zeros();
        for inf in infl {
            pos += mats[inf.joint].transform_point(&p).coords * inf.weight;
            rot += homog[inf.joint].fixed_view::<3, 3>(0, 0) * inf.weight;
        }
        out.vertices[i] = pos;
        let n = rot * mesh.normals[i];
        let len = n.norm();
        out.normals[i] = if len > 1e-12 { n / len } else { mesh.normals[i] };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body_model::Joint;
    use nalgebra::{UnitQuaternion, Vector3};
    use std::f64::consts::FRAC_PI_2;

    fn two_joint_rig() -> Skeleton {
        Skeleton::new(vec![
            Joint { name: "fixed".into(), parent: None, offset: Vector3::zeros() },
            Joint { name: "spin".into(), parent: Some(0), offset: Vector3::zeros() },
        ])
        .unwrap()
    }

    fn single_vertex(x: f64) -> TemplateMesh {
        TemplateMesh {
            vertices: vec![Vector3::new(x, 0.0, 0.0)],
            triangles: vec![],
            uvs: vec![[0.0, 0.0]],
            normals: vec![Vector3::z()],
        }
    }

    fn spin_pose() -> Pose {
        let mut pose = Pose::identity(2);
        pose.rotations[1] = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), FRAC_PI_2);
        pose
    }

    #[test]
    fn fully_weighted_vertex_follows_joint() {
        let w = SkinWeights::from_raw(vec![vec![(1, 1.0)]], 2).unwrap();
        let out = skin_mesh(&single_vertex(1.0), &w, &two_joint_rig(), &spin_pose()).unwrap();
        assert!((out.vertices[0] - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn half_weighted_vertex_blends_linearly() {
        let w = SkinWeights::from_raw(vec![vec![(0, 0.5), (1, 0.5)]], 2).unwrap();
        let out = skin_mesh(&single_vertex(1.0), &w, &two_joint_rig(), &spin_pose()).unwrap();
        assert!((out.vertices[0] - Vector3::new(0.5, 0.5, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn from_raw_truncates_and_renormalizes() {
        let w = SkinWeights::from_raw(
            vec![vec![(0, 0.1), (1, 0.4), (2, 0.2), (3, 0.2), (4, 0.1), (1, 0.0)]],
            5,
        )
        .unwrap();
        let infl = w.influences(0);
        assert_eq!(infl.len(), 4);
        assert_eq!(infl[0].joint, 1);
        // Ties at 0.2 and 0.1 resolve toward the lower joint index.
        assert_eq!(infl.iter().map(|i| i.joint).collect::<Vec<_>>(), vec![1, 2, 3, 0]);
        let sum: f64 = infl.iter().map(|i| i.weight).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        w.validate(5).unwrap();
    }

    #[test]
    fn from_raw_rejects_bad_input() {
        assert!(SkinWeights::from_raw(vec![vec![(3, 1.0)]], 2).is_err());
        assert!(SkinWeights::from_raw(vec![vec![(0, -1.0)]], 2).is_err());
        assert!(SkinWeights::from_raw(vec![vec![]], 2).is_err());
    }
}
