use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{Joint, ShapeBasis, Skeleton, SkinWeights, TemplateMesh};
use crate::error::{read_json, write_json};
use crate::{Error, Result};

/// On-disk body asset. Normals are derived on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BodyAsset {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
    pub uvs: Vec<[f64; 2]>,
    pub shape_basis: Vec<Vec<[f64; 3]>>,
    pub skeleton: Vec<JointRecord>,
    pub skin_weights: Vec<Vec<(usize, f64)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointRecord {
    pub name: String,
    /// Parent joint index, -1 for the root.
    pub parent: i64,
    pub offset: [f64; 3],
}

/// Template, shape space, rig and weights of one character.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricBody {
    pub mesh: TemplateMesh,
    pub shape_basis: ShapeBasis,
    pub skeleton: Skeleton,
    pub weights: SkinWeights,
}

impl ParametricBody {
    pub fn new(mesh: TemplateMesh, shape_basis: ShapeBasis, skeleton: Skeleton, weights: SkinWeights) -> Result<Self> {
        if weights.len() != mesh.vertex_count() {
            return Err(Error::Dimension {
                what: "skin weights",
                expected: mesh.vertex_count(),
                got: weights.len(),
            });
        }
        if let Some(n) = shape_basis.vertex_count() {
            if n != mesh.vertex_count() {
                return Err(Error::Dimension {
                    what: "shape basis vertex count",
                    expected: mesh.vertex_count(),
                    got: n,
                });
            }
        }
        weights.validate(skeleton.joint_count())?;
        Ok(ParametricBody {
            mesh,
            shape_basis,
            skeleton,
            weights,
        })
    }

    pub fn from_asset(asset: BodyAsset) -> Result<Self> {
        let vertices: Vec<_> = asset.vertices.into_iter().map(Vector3::from).collect();
        let n = vertices.len();
        let mesh = TemplateMesh::new(vertices, asset.triangles, asset.uvs)?;
        let basis = ShapeBasis::new(
            asset
                .shape_basis
                .into_iter()
                .map(|f| f.into_iter().map(Vector3::from).collect())
                .collect(),
            n,
        )?;
        let skeleton = skeleton_from_records(&asset.skeleton)?;
        let weights = SkinWeights::from_raw(asset.skin_weights, skeleton.joint_count())?;
        ParametricBody::new(mesh, basis, skeleton, weights)
    }

    pub fn to_asset(&self) -> BodyAsset {
        BodyAsset {
            vertices: self.mesh.vertices.iter().map(|v| (*v).into()).collect(),
            triangles: self.mesh.triangles.clone(),
            uvs: self.mesh.uvs.clone(),
            shape_basis: self
                .shape_basis
                .fields()
                .iter()
                .map(|f| f.iter().map(|v| (*v).into()).collect())
                .collect(),
            skeleton: skeleton_records(&self.skeleton),
            skin_weights: self.weights.to_raw(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        ParametricBody::from_asset(read_json(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, &self.to_asset())
    }
}

pub(crate) fn skeleton_from_records(records: &[JointRecord]) -> Result<Skeleton> {
    let joints = records
        .iter()
        .map(|r| {
            let parent = match r.parent {
                -1 => None,
                p if p >= 0 => Some(p as usize),
                p => {
                    return Err(Error::InvalidAsset(format!("joint {} has parent {p}", r.name)));
                }
            };
            Ok(Joint {
                name: r.name.clone(),
                parent,
                offset: Vector3::from(r.offset),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Skeleton::new(joints)
}

pub(crate) fn skeleton_records(skeleton: &Skeleton) -> Vec<JointRecord> {
    skeleton
        .joints()
        .iter()
        .enumerate()
        .map(|(i, j)| JointRecord {
            name: j.name.clone(),
            parent: skeleton.parent_index(i),
            offset: j.offset.into(),
        })
        .collect()
}
