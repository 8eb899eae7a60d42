use arrayvec::ArrayVec;
use nalgebra::Vector3;

use crate::body_model::{ShapeBasis, SkinWeights, TemplateMesh};
use crate::{Error, Result};

/// Body vertices consulted per garment vertex.
pub const TRANSFER_NEIGHBORS: usize = 3;

/// Normalized inverse-distance weights of the nearest body vertices, one list
/// per garment vertex. Distance ties resolve toward the lower body index. A
/// coincident body vertex takes the full weight.
pub fn nearest_body_vertices(
    garment: &TemplateMesh,
    body: &TemplateMesh,
) -> Result<Vec<ArrayVec<(usize, f64), TRANSFER_NEIGHBORS>>> {
    if garment.vertices.is_empty() || body.vertices.is_empty() {
        return Err(Error::InvalidAsset("weight transfer needs non-empty garment and body meshes".into()));
    }
    Ok(garment
        .vertices
        .iter()
        .map(|g| {
            let mut best: ArrayVec<(f64, usize), TRANSFER_NEIGHBORS> = ArrayVec::new();
            for (i, b) in body.vertices.iter().enumerate() {
                let d2 = (g - b).norm_squared();
                if best.is_full() && d2 >= best[best.len() - 1].0 {
                    continue;
                }
                // Strict comparison keeps earlier (lower) indices ahead on ties.
                let pos = best.iter().position(|&(d, _)| d2 < d).unwrap_or(best.len());
                if best.is_full() {
                    best.pop();
                }
                best.insert(pos, (d2, i));
            }
            if best[0].0 == 0.0 {
                let mut only = ArrayVec::new();
                only.push((best[0].1, 1.0));
                return only;
            }
            let inv: ArrayVec<f64, TRANSFER_NEIGHBORS> = best.iter().map(|(d2, _)| 1.0 / d2.sqrt()).collect();
            let total: f64 = inv.iter().sum();
            best.iter().zip(&inv).map(|(&(_, i), w)| (i, w / total)).collect()
        })
        .collect())
}

/// Skin weights for a garment from the body's weights.
pub fn transfer_weights(garment: &TemplateMesh, body: &TemplateMesh, body_weights: &SkinWeights) -> Result<SkinWeights> {
    if body_weights.len() != body.vertex_count() {
        return Err(Error::Dimension {
            what: "body skin weights",
            expected: body.vertex_count(),
            got: body_weights.len(),
        });
    }
    let joint_count = body_weights
        .iter()
        .flat_map(|infl| infl.iter().map(|i| i.joint + 1))
        .max()
        .unwrap_or(0);
    let neighbors = nearest_body_vertices(garment, body)?;
    let raw = neighbors
        .iter()
        .map(|near| {
            let mut acc: Vec<(usize, f64)> = Vec::with_capacity(8);
            for &(bv, w) in near {
                for inf in body_weights.influences(bv) {
                    match acc.iter_mut().find(|(j, _)| *j == inf.joint) {
                        Some(slot) => slot.1 += w * inf.weight,
                        None => acc.push((inf.joint, w * inf.weight)),
                    }
                }
            }
            acc
        })
        .collect();
    SkinWeights::from_raw(raw, joint_count)
}

/// Shape blend shapes for a garment from the body's basis.
pub fn transfer_blendshapes(garment: &TemplateMesh, body: &TemplateMesh, body_basis: &ShapeBasis) -> Result<ShapeBasis> {
    if let Some(n) = body_basis.vertex_count() {
        if n != body.vertex_count() {
            return Err(Error::Dimension {
                what: "body shape basis vertex count",
                expected: body.vertex_count(),
                got: n,
            });
        }
    }
    let neighbors = nearest_body_vertices(garment, body)?;
    let fields = body_basis
        .fields()
        .iter()
        .map(|field| {
            neighbors
                .iter()
                .map(|near| {
                    if near.len() == 1 {
                        field[near[0].0]
                    } else {
                        near.iter().fold(Vector3::zeros(), |acc, &(bv, w)| acc + field[bv] * w)
                    }
                })
                .collect()
        })
        .collect();
    ShapeBasis::new(fields, garment.vertex_count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(ps: &[[f64; 3]]) -> TemplateMesh {
        TemplateMesh {
            vertices: ps.iter().map(|&p| Vector3::from(p)).collect(),
            triangles: vec![],
            uvs: vec![[0.0; 2]; ps.len()],
            normals: vec![Vector3::z(); ps.len()],
        }
    }

    #[test]
    fn coincident_vertex_copies_weights() {
        let body = points(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let bw = SkinWeights::from_raw(vec![vec![(0, 0.3), (2, 0.7)], vec![(1, 1.0)], vec![(2, 1.0)]], 3).unwrap();
        let garment = points(&[[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        let gw = transfer_weights(&garment, &body, &bw).unwrap();
        assert_eq!(gw.influences(0), bw.influences(1));
        assert_eq!(gw.influences(1), bw.influences(0));
    }

    #[test]
    fn equidistant_vertex_splits_evenly() {
        let body = points(&[[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let bw = SkinWeights::from_raw(vec![vec![(0, 1.0)], vec![(1, 1.0)]], 2).unwrap();
        let garment = points(&[[0.0, 0.5, 0.0]]);
        let gw = transfer_weights(&garment, &body, &bw).unwrap();
        let infl = gw.influences(0);
        assert_eq!(infl.len(), 2);
        for i in infl {
            assert!((i.weight - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_distance_closed_form() {
        // Distances 1, 2, 4 -> weights proportional to 4:2:1.
        let body = points(&[[1.0, 0.0, 0.0], [-2.0, 0.0, 0.0], [0.0, 4.0, 0.0], [0.0, 9.0, 0.0]]);
        let garment = points(&[[0.0, 0.0, 0.0]]);
        let near = nearest_body_vertices(&garment, &body).unwrap();
        let got: Vec<_> = near[0].iter().copied().collect();
        assert_eq!(got.iter().map(|p| p.0).collect::<Vec<_>>(), vec![0, 1, 2]);
        for (w, e) in got.iter().map(|p| p.1).zip([4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]) {
            assert!((w - e).abs() < 1e-12);
        }
    }

    #[test]
    fn ties_prefer_lower_index() {
        let body = points(&[[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0]]);
        let near = nearest_body_vertices(&points(&[[0.0, 0.0, 0.0]]), &body).unwrap();
        assert_eq!(near[0].iter().map(|p| p.0).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn zero_basis_transfers_to_zero() {
        let body = points(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let basis = ShapeBasis::zeros(10, 2);
        let g = transfer_blendshapes(&points(&[[0.3, 0.2, 0.0]]), &body, &basis).unwrap();
        assert_eq!(g.num_coeffs(), 10);
        assert!(g.fields().iter().flatten().all(|d| *d == Vector3::zeros()));
    }

    #[test]
    fn empty_meshes_rejected() {
        let body = points(&[[0.0, 0.0, 0.0]]);
        let bw = SkinWeights::from_raw(vec![vec![(0, 1.0)]], 1).unwrap();
        assert!(matches!(transfer_weights(&points(&[]), &body, &bw), Err(Error::InvalidAsset(_))));
        let empty = points(&[]);
        let ew = SkinWeights::from_raw(vec![], 1).unwrap();
        assert!(matches!(transfer_weights(&body, &empty, &ew), Err(Error::InvalidAsset(_))));
    }

    #[test]
    fn basis_vertex_mismatch_rejected() {
        let body = points(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let basis = ShapeBasis::zeros(2, 3);
        assert!(matches!(
            transfer_blendshapes(&points(&[[0.0; 3]]), &body, &basis),
            Err(Error::Dimension { .. })
        ));
    }
}
