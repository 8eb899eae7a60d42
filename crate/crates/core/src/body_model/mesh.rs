use nalgebra::Vector3;

use crate::{Error, Result};

/// Triangle mesh with per-vertex UVs and normals. Positions are in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateMesh {
    pub vertices: Vec<Vector3<f64>>,
    pub triangles: Vec<[u32; 3]>,
    pub uvs: Vec<[f64; 2]>,
    pub normals: Vec<Vector3<f64>>,
}

impl TemplateMesh {
    /// Build a mesh and compute its vertex normals.
    pub fn new(vertices: Vec<Vector3<f64>>, triangles: Vec<[u32; 3]>, uvs: Vec<[f64; 2]>) -> Result<Self> {
        let mut mesh = TemplateMesh {
            normals: Vec::new(),
            vertices,
            triangles,
            uvs,
        };
        mesh.validate_topology()?;
        mesh.recompute_normals();
        Ok(mesh)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() || self.triangles.is_empty()
    }

    fn validate_topology(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.uvs.len() != n {
            return Err(Error::Dimension {
                what: "uv count",
                expected: n,
                got: self.uvs.len(),
            });
        }
        if let Some(t) = self.triangles.iter().find(|t| t.iter().any(|&i| i as usize >= n)) {
            return Err(Error::InvalidAsset(format!(
                "triangle {t:?} references a vertex beyond {n}"
            )));
        }
        Ok(())
    }

    /// Check every structural invariant, including unit normals.
    pub fn validate(&self) -> Result<()> {
        self.validate_topology()?;
        if self.normals.len() != self.vertices.len() {
            return Err(Error::Dimension {
                what: "normal count",
                expected: self.vertices.len(),
                got: self.normals.len(),
            });
        }
        if let Some((i, n)) = self
            .normals
            .iter()
            .enumerate()
            .find(|(_, n)| (n.norm() - 1.0).abs() > 1e-5)
        {
            return Err(Error::InvalidAsset(format!("normal {i} has length {}", n.norm())));
        }
        Ok(())
    }

    /// Area-weighted vertex normals. Vertices not referenced by any
    /// non-degenerate triangle get +Z.
    pub fn recompute_normals(&mut self) {
        let mut acc = vec![Vector3::zeros(); self.vertices.len()];
        for t in &self.triangles {
            let [a, b, c] = t.map(|i| self.vertices[i as usize]);
            // Cross product length is twice the area, which gives the weighting.
            let face = (b - a).cross(&(c - a));
            for &i in t {
                acc[i as usize] += face;
            }
        }
        self.normals = acc
            .into_iter()
            .map(|n| {
                let len = n.norm();
                if len > 1e-12 {
                    n / len
                } else {
                    Vector3::z()
                }
            })
            .collect();
    }

    /// Axis-aligned bounds, or `None` for an empty mesh.
    pub fn bounds(&self) -> Option<(Vector3<f64>, Vector3<f64>)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), v| {
            (lo.inf(v), hi.sup(v))
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> TemplateMesh {
        TemplateMesh::new(
            vec![
                Vector3::new(0.0, 0.0, 0.0),
                Vector3::new(1.0, 0.0, 0.0),
                Vector3::new(1.0, 1.0, 0.0),
                Vector3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        )
        .unwrap()
    }

    #[test]
    fn planar_normals_point_along_z() {
        let m = quad();
        m.validate().unwrap();
        for n in &m.normals {
            assert!((n - Vector3::z()).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_out_of_range_index() {
        let err = TemplateMesh::new(
            vec![Vector3::zeros(); 2],
            vec![[0, 1, 2]],
            vec![[0.0, 0.0]; 2],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidAsset(_)));
    }

    #[test]
    fn rejects_uv_count_mismatch() {
        let err = TemplateMesh::new(vec![Vector3::zeros(); 3], vec![[0, 1, 2]], vec![]).unwrap_err();
        assert!(matches!(err, Error::Dimension { what: "uv count", .. }));
    }
}
