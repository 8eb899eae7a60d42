use nalgebra::Vector3;

use super::TemplateMesh;
use crate::{Error, Result};

/// Number of shape coefficients used by the body model.
pub const DEFAULT_NUM_COEFFS: usize = 10;

/// Shape blend shapes: one per-vertex displacement field per coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeBasis {
    displacements: Vec<Vec<Vector3<f64>>>,
}

impl ShapeBasis {
    /// Every field must hold one offset per template vertex.
    pub fn new(displacements: Vec<Vec<Vector3<f64>>>, vertex_count: usize) -> Result<Self> {
        if let Some(field) = displacements.iter().find(|f| f.len() != vertex_count) {
            return Err(Error::Dimension {
                what: "shape displacement field",
                expected: vertex_count,
                got: field.len(),
            });
        }
        Ok(ShapeBasis { displacements })
    }

    /// A basis with `num_coeffs` all-zero fields.
    pub fn zeros(num_coeffs: usize, vertex_count: usize) -> Self {
        ShapeBasis {
            displacements: vec![vec![Vector3::zeros(); vertex_count]; num_coeffs],
        }
    }

    pub fn num_coeffs(&self) -> usize {
        self.displacements.len()
    }

    pub fn vertex_count(&self) -> Option<usize> {
        self.displacements.first().map(Vec::len)
    }

    pub fn field(&self, k: usize) -> &[Vector3<f64>] {
        &self.displacements[k]
    }

    pub fn fields(&self) -> &[Vec<Vector3<f64>>] {
        &self.displacements
    }

    /// Summed displacement of vertex `i` under `coeffs`.
    pub fn offset(&self, i: usize, coeffs: &[f64]) -> Vector3<f64> {
        self.displacements
            .iter()
            .zip(coeffs)
            .fold(Vector3::zeros(), |acc, (field, &c)| acc + field[i] * c)
    }
}

/// Deform `template` by the linear combination of shape fields.
///
/// Topology and UVs are kept; normals are recomputed.
pub fn apply_shape(template: &TemplateMesh, basis: &ShapeBasis, shape_coeffs: &[f64]) -> Result<TemplateMesh> {
    if shape_coeffs.len() != basis.num_coeffs() {
        return Err(Error::Dimension {
            what: "shape coefficients",
            expected: basis.num_coeffs(),
            got: shape_coeffs.len(),
        });
    }
    if basis.num_coeffs() > 0 && basis.vertex_count() != Some(template.vertex_count()) {
        return Err(Error::Dimension {
            what: "shape basis vertex count",
            expected: template.vertex_count(),
            got: basis.vertex_count().unwrap_or(0),
        });
    }
    let mut out = template.clone();
    if shape_coeffs.iter().all(|&c| c == 0.0) {
        return Ok(out);
    }
    for (i, v) in out.vertices.iter_mut().enumerate() {
        *v += basis.offset(i, shape_coeffs);
    }
    out.recompute_normals();
    Ok(out)
}
