use nalgebra::{Matrix3, Matrix4, Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Pinhole camera. Camera space is x right, y down, z forward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CameraRecord", into = "CameraRecord")]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
    /// Rigid world-to-camera transform.
    pub world_to_camera: Matrix4<f64>,
}

#[derive(Serialize, Deserialize)]
struct CameraRecord {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    width: u32,
    height: u32,
    /// Row-major 4x4.
    world_to_camera: [[f64; 4]; 4],
}

impl From<CameraModel> for CameraRecord {
    fn from(c: CameraModel) -> Self {
        let m = c.world_to_camera;
        CameraRecord {
            fx: c.fx,
            fy: c.fy,
            cx: c.cx,
            cy: c.cy,
            width: c.width,
            height: c.height,
            world_to_camera: std::array::from_fn(|r| std::array::from_fn(|col| m[(r, col)])),
        }
    }
}

impl TryFrom<CameraRecord> for CameraModel {
    type Error = Error;

    fn try_from(r: CameraRecord) -> Result<Self> {
        let cam = CameraModel {
            fx: r.fx,
            fy: r.fy,
            cx: r.cx,
            cy: r.cy,
            width: r.width,
            height: r.height,
            world_to_camera: Matrix4::from_fn(|row, col| r.world_to_camera[row][col]),
        };
        cam.validate()?;
        Ok(cam)
    }
}

/// Result of projecting a world point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    Visible { u: f64, v: f64, depth: f64 },
    /// Camera-space z at or behind the near plane.
    BehindCamera { depth: f64 },
}

impl CameraModel {
    /// Camera at `eye` looking at `target` with world +Y up and the given
    /// vertical field of view.
    pub fn look_at(eye: Vector3<f64>, target: Vector3<f64>, vertical_fov_deg: f64, width: u32, height: u32) -> Self {
        let forward = (target - eye).normalize();
        let up = if forward.cross(&Vector3::y()).norm() < 1e-6 { Vector3::z() } else { Vector3::y() };
        let right = forward.cross(&up).normalize();
        let down = forward.cross(&right);
        let rot = Matrix3::from_rows(&[right.transpose(), down.transpose(), forward.transpose()]);
        let t = -(rot * eye);
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&rot);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&t);
        let f = (height as f64 / 2.0) / (vertical_fov_deg.to_radians() / 2.0).tan();
        CameraModel {
            fx: f,
            fy: f,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
            width,
            height,
            world_to_camera: m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::Config(format!("focal lengths must be positive (fx {}, fy {})", self.fx, self.fy)));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::Config("image size must be non-zero".into()));
        }
        if !(self.cx >= 0.0 && self.cx < self.width as f64 && self.cy >= 0.0 && self.cy < self.height as f64) {
            return Err(Error::Config(format!(
                "principal point ({}, {}) outside {}x{}",
                self.cx, self.cy, self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn to_camera(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.world_to_camera.transform_point(&Point3::from(*p)).coords
    }

    /// Camera centre in world coordinates.
    pub fn position(&self) -> Vector3<f64> {
        let rot = self.world_to_camera.fixed_view::<3, 3>(0, 0);
        let t = self.world_to_camera.fixed_view::<3, 1>(0, 3);
        -(rot.transpose() * t)
    }

    /// Project a camera-space point.
    pub fn project_camera_space(&self, p: &Vector3<f64>, near: f64) -> Projection {
        if p.z <= near {
            return Projection::BehindCamera { depth: p.z };
        }
        Projection::Visible {
            u: self.cx + self.fx * p.x / p.z,
            v: self.cy + self.fy * p.y / p.z,
            depth: p.z,
        }
    }
}

/// Project a world point through `camera`; points at or behind `near` are
/// reported so the caller can clip.
pub fn project(point: &Vector3<f64>, camera: &CameraModel, near: f64) -> Projection {
    camera.project_camera_space(&camera.to_camera(point), near)
}
