use std::fmt;
use std::path::Path;

use image::RgbImage;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{recolor_texture, transfer_blendshapes, transfer_weights, PaletteColor, PaletteSpec};
use crate::body_model::{ParametricBody, ShapeBasis, SkinWeights, TemplateMesh};
use crate::error::{read_json, write_json};
use crate::{Error, Result};

/// The six garment classes in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GarmentClass {
    Gown,
    Shirt,
    Pants,
    Hat,
    Mask,
    Glove,
}

impl GarmentClass {
    pub const ALL: [GarmentClass; 6] = [
        GarmentClass::Gown,
        GarmentClass::Shirt,
        GarmentClass::Pants,
        GarmentClass::Hat,
        GarmentClass::Mask,
        GarmentClass::Glove,
    ];

    /// Detection class id (0 is the human).
    pub fn class_id(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_class_id(id: u8) -> Option<Self> {
        id.checked_sub(1).and_then(|i| Self::ALL.get(i as usize).copied())
    }

    pub fn name(self) -> &'static str {
        crate::CLASS_NAMES[self.class_id() as usize]
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for GarmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Scanned,
    Designed,
}

/// Bare triangle geometry in the body-asset field layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshAsset {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
    pub uvs: Vec<[f64; 2]>,
}

impl MeshAsset {
    pub fn to_mesh(&self) -> Result<TemplateMesh> {
        TemplateMesh::new(
            self.vertices.iter().map(|&v| Vector3::from(v)).collect(),
            self.triangles.clone(),
            self.uvs.clone(),
        )
    }

    pub fn from_mesh(mesh: &TemplateMesh) -> Self {
        MeshAsset {
            vertices: mesh.vertices.iter().map(|v| (*v).into()).collect(),
            triangles: mesh.triangles.clone(),
            uvs: mesh.uvs.clone(),
        }
    }
}

/// On-disk garment. Weights and blend shapes are optional; when absent they
/// are transferred from the body at bind time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GarmentAssetFile {
    #[serde(flatten)]
    pub mesh: MeshAsset,
    pub class_label: GarmentClass,
    pub source_kind: SourceKind,
    /// PNG path relative to the asset file.
    pub texture: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape_basis: Option<Vec<Vec<[f64; 3]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skin_weights: Option<Vec<Vec<(usize, f64)>>>,
}

/// A garment bound to the body rig.
#[derive(Debug, Clone)]
pub struct ClothingAsset {
    pub mesh: TemplateMesh,
    pub class_label: GarmentClass,
    pub source_kind: SourceKind,
    pub weights: SkinWeights,
    pub shape_basis: ShapeBasis,
    pub base_texture: RgbImage,
    /// One recolored texture per palette colour, in [`PaletteColor::ALL`] order.
    pub palette_variants: Vec<RgbImage>,
}

impl ClothingAsset {
    /// Bind a rest-pose garment mesh to `body`.
    pub fn bind(
        mesh: TemplateMesh,
        class_label: GarmentClass,
        source_kind: SourceKind,
        base_texture: RgbImage,
        body: &ParametricBody,
        palette: &PaletteSpec,
    ) -> Result<Self> {
        let weights = transfer_weights(&mesh, &body.mesh, &body.weights)?;
        let shape_basis = transfer_blendshapes(&mesh, &body.mesh, &body.shape_basis)?;
        Ok(ClothingAsset::assemble(
            mesh,
            class_label,
            source_kind,
            weights,
            shape_basis,
            base_texture,
            palette,
        ))
    }

    fn assemble(
        mesh: TemplateMesh,
        class_label: GarmentClass,
        source_kind: SourceKind,
        weights: SkinWeights,
        shape_basis: ShapeBasis,
        base_texture: RgbImage,
        palette: &PaletteSpec,
    ) -> Self {
        let palette_variants = PaletteColor::ALL
            .iter()
            .map(|&c| recolor_texture(&base_texture, palette.hue(c), 0, palette))
            .collect();
        ClothingAsset {
            mesh,
            class_label,
            source_kind,
            weights,
            shape_basis,
            base_texture,
            palette_variants,
        }
    }

    /// Load a garment file, binding it to `body` unless it carries its own
    /// weights and blend shapes.
    pub fn load(path: &Path, body: &ParametricBody, palette: &PaletteSpec) -> Result<Self> {
        let file: GarmentAssetFile = read_json(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let tex_path = dir.join(&file.texture);
        let texture = image::open(&tex_path)
            .map_err(|e| Error::image(&tex_path, e))?
            .to_rgb8();
        let mesh = file.mesh.to_mesh()?;
        match (file.skin_weights, file.shape_basis) {
            (Some(w), Some(b)) => {
                let weights = SkinWeights::from_raw(w, body.skeleton.joint_count())?;
                if weights.len() != mesh.vertex_count() {
                    return Err(Error::Dimension {
                        what: "garment skin weights",
                        expected: mesh.vertex_count(),
                        got: weights.len(),
                    });
                }
                let basis = ShapeBasis::new(
                    b.into_iter().map(|f| f.into_iter().map(Vector3::from).collect()).collect(),
                    mesh.vertex_count(),
                )?;
                if basis.num_coeffs() != body.shape_basis.num_coeffs() {
                    return Err(Error::Dimension {
                        what: "garment shape coefficients",
                        expected: body.shape_basis.num_coeffs(),
                        got: basis.num_coeffs(),
                    });
                }
                Ok(ClothingAsset::assemble(
                    mesh,
                    file.class_label,
                    file.source_kind,
                    weights,
                    basis,
                    texture,
                    palette,
                ))
            }
            _ => ClothingAsset::bind(mesh, file.class_label, file.source_kind, texture, body, palette),
        }
    }

    /// Write the unbound garment file (mesh, labels, texture reference).
    pub fn save_unbound(mesh: &TemplateMesh, class_label: GarmentClass, source_kind: SourceKind, texture: &str, path: &Path) -> Result<()> {
        write_json(
            path,
            &GarmentAssetFile {
                mesh: MeshAsset::from_mesh(mesh),
                class_label,
                source_kind,
                texture: texture.to_string(),
                shape_basis: None,
                skin_weights: None,
            },
        )
    }

    pub fn variant(&self, color: PaletteColor) -> &RgbImage {
        let i = PaletteColor::ALL.iter().position(|&c| c == color).unwrap_or(0);
        &self.palette_variants[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_ids_follow_reporting_order() {
        let ids: Vec<u8> = GarmentClass::ALL.iter().map(|c| c.class_id()).collect();
        assert_eq!(ids, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(GarmentClass::from_class_id(0), None);
        assert_eq!(GarmentClass::from_class_id(6), Some(GarmentClass::Glove));
        assert_eq!(GarmentClass::parse("mask"), Some(GarmentClass::Mask));
        assert_eq!(serde_json::to_string(&GarmentClass::Pants).unwrap(), "\"pants\"");
    }
}
