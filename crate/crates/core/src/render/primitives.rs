use std::f64::consts::TAU;

use nalgebra::Vector3;

use crate::body_model::TemplateMesh;
use crate::scene::PrimitiveKind;

const SEGMENTS: usize = 16;
const SPHERE_RINGS: usize = 10;

/// Unit-sized primitive centred at the origin: a cube of side 1, a sphere of
/// diameter 1, or a cylinder of diameter 1 and height 1 along Y.
pub fn primitive_mesh(kind: PrimitiveKind) -> TemplateMesh {
    let (vertices, triangles, uvs) = match kind {
        PrimitiveKind::Box => unit_box(),
        PrimitiveKind::Sphere => unit_sphere(),
        PrimitiveKind::Cylinder => unit_cylinder(),
    };
    let mut mesh = TemplateMesh::new(vertices, triangles, uvs).expect("primitive topology is valid");
    if kind == PrimitiveKind::Sphere {
        // Analytic normals; the seam duplicates at the poles touch no face.
        mesh.normals = mesh.vertices.iter().map(|p| p.normalize()).collect();
    }
    mesh
}

type Parts = (Vec<Vector3<f64>>, Vec<[u32; 3]>, Vec<[f64; 2]>);

fn unit_box() -> Parts {
    let mut v = Vec::new();
    let mut t = Vec::new();
    let mut uv = Vec::new();
    // Each face: outward normal and two tangent axes with n = a × b.
    let faces = [
        (Vector3::x(), Vector3::y(), Vector3::z()),
        (-Vector3::x(), Vector3::z(), Vector3::y()),
        (Vector3::y(), Vector3::z(), Vector3::x()),
        (-Vector3::y(), Vector3::x(), Vector3::z()),
        (Vector3::z(), Vector3::x(), Vector3::y()),
        (-Vector3::z(), Vector3::y(), Vector3::x()),
    ];
    for (n, a, b) in faces {
        let base = v.len() as u32;
        for (s, r) in [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)] {
            v.push((n + a * s + b * r) * 0.5);
            uv.push([(s + 1.0) * 0.5, (r + 1.0) * 0.5]);
        }
        t.push([base, base + 1, base + 2]);
        t.push([base, base + 2, base + 3]);
    }
    (v, t, uv)
}

fn unit_sphere() -> Parts {
    let mut v = Vec::new();
    let mut uv = Vec::new();
    for r in 0..=SPHERE_RINGS {
        let theta = std::f64::consts::PI * r as f64 / SPHERE_RINGS as f64;
        for s in 0..=SEGMENTS {
            let phi = TAU * s as f64 / SEGMENTS as f64;
            v.push(Vector3::new(theta.sin() * phi.cos(), theta.cos(), -theta.sin() * phi.sin()) * 0.5);
            uv.push([s as f64 / SEGMENTS as f64, r as f64 / SPHERE_RINGS as f64]);
        }
    }
    let row = SEGMENTS as u32 + 1;
    let mut t = Vec::new();
    for r in 0..SPHERE_RINGS as u32 {
        for s in 0..SEGMENTS as u32 {
            let (a, b) = (r * row + s, (r + 1) * row + s);
            if r != 0 {
                t.push([a, b, a + 1]);
            }
            if r + 1 != SPHERE_RINGS as u32 {
                t.push([a + 1, b, b + 1]);
            }
        }
    }
    (v, t, uv)
}

fn unit_cylinder() -> Parts {
    let mut v = Vec::new();
    let mut uv = Vec::new();
    let mut t = Vec::new();
    let ring = |y: f64, s: usize| {
        let phi = TAU * s as f64 / SEGMENTS as f64;
        Vector3::new(0.5 * phi.cos(), y, -0.5 * phi.sin())
    };
    for s in 0..=SEGMENTS {
        v.push(ring(-0.5, s));
        uv.push([s as f64 / SEGMENTS as f64, 1.0]);
        v.push(ring(0.5, s));
        uv.push([s as f64 / SEGMENTS as f64, 0.0]);
    }
    for s in 0..SEGMENTS as u32 {
        let (a, b) = (2 * s, 2 * s + 2);
        t.push([a, b, b + 1]);
        t.push([a, b + 1, a + 1]);
    }
    for (y, up) in [(-0.5, false), (0.5, true)] {
        let center = v.len() as u32;
        v.push(Vector3::new(0.0, y, 0.0));
        uv.push([0.5, 0.5]);
        for s in 0..SEGMENTS {
            let p = ring(y, s);
            v.push(p);
            uv.push([0.5 + p.x, 0.5 + p.z]);
        }
        for s in 0..SEGMENTS as u32 {
            let (a, b) = (center + 1 + s, center + 1 + (s + 1) % SEGMENTS as u32);
            t.push(if up { [center, a, b] } else { [center, b, a] });
        }
    }
    (v, t, uv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitives_are_unit_sized_and_outward() {
        for kind in [PrimitiveKind::Box, PrimitiveKind::Sphere, PrimitiveKind::Cylinder] {
            let m = primitive_mesh(kind);
            m.validate().unwrap();
            let (lo, hi) = m.bounds().unwrap();
            assert!((hi - lo - Vector3::repeat(1.0)).norm() < 1e-9, "{kind:?}");
            let outward = m
                .vertices
                .iter()
                .zip(&m.normals)
                .filter(|(p, n)| p.norm() > 1e-9 && p.dot(n) > 0.0)
                .count();
            let total = m.vertices.iter().filter(|p| p.norm() > 1e-9).count();
            assert_eq!(outward, total, "{kind:?}");
        }
    }
}
