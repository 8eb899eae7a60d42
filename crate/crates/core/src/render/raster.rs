use image::{GrayImage, RgbImage};
use nalgebra::Vector3;

use super::buffers::Gray16Image;
use super::{FrameBuffers, InstanceInfo, RenderInstance};
use crate::scene::{FrameSpec, LightKind};
use crate::{Error, Result, BACKGROUND_CLASS};

/// Sub-pixel precision of the edge functions (8 fractional bits).
const SUBPIXEL: i64 = 256;
/// Screen coordinates are clamped to this guard band before snapping.
const GUARD_BAND: f64 = 2.0e6;

#[derive(Debug, Clone, Copy)]
struct ClipVertex {
    cam: Vector3<f64>,
    world: Vector3<f64>,
    normal: Vector3<f64>,
    uv: [f64; 2],
}

impl ClipVertex {
    fn lerp(&self, other: &ClipVertex, t: f64) -> ClipVertex {
        ClipVertex {
            cam: self.cam.lerp(&other.cam, t),
            world: self.world.lerp(&other.world, t),
            normal: self.normal.lerp(&other.normal, t),
            uv: [
                self.uv[0] + (other.uv[0] - self.uv[0]) * t,
                self.uv[1] + (other.uv[1] - self.uv[1]) * t,
            ],
        }
    }
}

/// Clip a triangle against `z >= near`. Returns up to four vertices.
fn clip_near(tri: [ClipVertex; 3], near: f64, out: &mut Vec<ClipVertex>) {
    out.clear();
    for i in 0..3 {
        let (a, b) = (tri[i], tri[(i + 1) % 3]);
        let (ina, inb) = (a.cam.z >= near, b.cam.z >= near);
        if ina {
            out.push(a);
        }
        if ina != inb {
            let t = (near - a.cam.z) / (b.cam.z - a.cam.z);
            out.push(a.lerp(&b, t));
        }
    }
}

/// Bilinear texture lookup with wrap-around addressing. `uv` (0, 0) is the
/// top-left corner of the image.
pub fn sample_bilinear(tex: &RgbImage, uv: [f64; 2]) -> [f64; 3] {
    let (w, h) = (tex.width() as i64, tex.height() as i64);
    let x = uv[0] * w as f64 - 0.5;
    let y = uv[1] * h as f64 - 0.5;
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let (x0, y0) = (x0 as i64, y0 as i64);
    let texel = |xi: i64, yi: i64| tex.get_pixel(xi.rem_euclid(w) as u32, yi.rem_euclid(h) as u32).0;
    let (a, b, c, d) = (texel(x0, y0), texel(x0 + 1, y0), texel(x0, y0 + 1), texel(x0 + 1, y0 + 1));
    std::array::from_fn(|k| {
        let top = a[k] as f64 * (1.0 - fx) + b[k] as f64 * fx;
        let bottom = c[k] as f64 * (1.0 - fx) + d[k] as f64 * fx;
        top * (1.0 - fy) + bottom * fy
    })
}

struct ShadingLight {
    directional: Option<Vector3<f64>>,
    position: Vector3<f64>,
    radiance: Vector3<f64>,
}

struct Target<'a> {
    width: usize,
    height: usize,
    rgb: &'a mut [u8],
    zbuf: &'a mut [f64],
    depth: &'a mut [u16],
    class: &'a mut [u8],
    inst: &'a mut [u16],
    stamp: &'a mut [u16],
    group_bits: Option<&'a mut [u64]>,
}

struct InstanceCtx<'a> {
    instance: &'a RenderInstance,
    lights: &'a [ShadingLight],
    ambient: f64,
    eye: Vector3<f64>,
    solo_pixels: u32,
}

#[inline]
fn snap(v: f64) -> i64 {
    (v.clamp(-GUARD_BAND, GUARD_BAND) * SUBPIXEL as f64).round() as i64
}

#[inline]
fn edge(a: (i64, i64), b: (i64, i64), p: (i64, i64)) -> i64 {
    (p.0 - a.0) * (b.1 - a.1) - (p.1 - a.1) * (b.0 - a.0)
}

/// Fill-rule bias: exactly one of an edge and its reverse owns samples lying
/// on it.
#[inline]
fn bias(a: (i64, i64), b: (i64, i64)) -> i64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    if dy < 0 || (dy == 0 && dx > 0) {
        0
    } else {
        -1
    }
}

fn draw_triangle(
    verts: [ClipVertex; 3],
    cam: &crate::scene::CameraModel,
    target: &mut Target<'_>,
    ctx: &mut InstanceCtx<'_>,
) {
    let screen = verts.map(|v| {
        let sx = cam.cx + cam.fx * v.cam.x / v.cam.z;
        let sy = cam.cy + cam.fy * v.cam.y / v.cam.z;
        (snap(sx), snap(sy))
    });
    let mut idx = [0usize, 1, 2];
    let mut area = edge(screen[0], screen[1], screen[2]);
    if area == 0 {
        return;
    }
    if area < 0 {
        idx.swap(1, 2);
        area = -area;
    }
    let p = idx.map(|i| screen[i]);
    let v = idx.map(|i| verts[i]);

    let min_x = p.iter().map(|q| q.0).min().unwrap();
    let max_x = p.iter().map(|q| q.0).max().unwrap();
    let min_y = p.iter().map(|q| q.1).min().unwrap();
    let max_y = p.iter().map(|q| q.1).max().unwrap();
    // Pixel x covers samples at x*SUB + SUB/2.
    let x_start = ((min_x - SUBPIXEL / 2).div_euclid(SUBPIXEL)).max(0);
    let x_end = ((max_x - SUBPIXEL / 2).div_euclid(SUBPIXEL) + 1).min(target.width as i64 - 1);
    let y_start = ((min_y - SUBPIXEL / 2).div_euclid(SUBPIXEL)).max(0);
    let y_end = ((max_y - SUBPIXEL / 2).div_euclid(SUBPIXEL) + 1).min(target.height as i64 - 1);
    if x_start > x_end || y_start > y_end {
        return;
    }

    // Edge i is opposite vertex i.
    let edges = [(p[1], p[2]), (p[2], p[0]), (p[0], p[1])];
    let biases = edges.map(|(a, b)| bias(a, b));
    let step_x = edges.map(|(a, b)| (b.1 - a.1) * SUBPIXEL);
    let step_y = edges.map(|(a, b)| -(b.0 - a.0) * SUBPIXEL);
    let origin = (x_start * SUBPIXEL + SUBPIXEL / 2, y_start * SUBPIXEL + SUBPIXEL / 2);
    let mut row = [0, 1, 2].map(|i| edge(edges[i].0, edges[i].1, origin));

    let inv_z = v.map(|q| 1.0 / q.cam.z);
    let inv_area = 1.0 / area as f64;
    let inst = ctx.instance;
    let id = inst.instance_id;

    for y in y_start..=y_end {
        let mut w = row;
        let row_base = y as usize * target.width;
        for x in x_start..=x_end {
            if w[0] + biases[0] >= 0 && w[1] + biases[1] >= 0 && w[2] + biases[2] >= 0 {
                let pix = row_base + x as usize;
                if target.stamp[pix] != id {
                    target.stamp[pix] = id;
                    ctx.solo_pixels += 1;
                }
                if let Some(bits) = target.group_bits.as_deref_mut() {
                    bits[pix / 64] |= 1 << (pix % 64);
                }
                let l = w.map(|e| e as f64 * inv_area);
                let iz = l[0] * inv_z[0] + l[1] * inv_z[1] + l[2] * inv_z[2];
                let z = 1.0 / iz;
                if z < target.zbuf[pix] {
                    target.zbuf[pix] = z;
                    // Perspective-correct weights.
                    let b = [l[0] * inv_z[0] * z, l[1] * inv_z[1] * z, l[2] * inv_z[2] * z];
                    let uv = [
                        b[0] * v[0].uv[0] + b[1] * v[1].uv[0] + b[2] * v[2].uv[0],
                        b[0] * v[0].uv[1] + b[1] * v[1].uv[1] + b[2] * v[2].uv[1],
                    ];
                    let world = v[0].world * b[0] + v[1].world * b[1] + v[2].world * b[2];
                    let normal = v[0].normal * b[0] + v[1].normal * b[1] + v[2].normal * b[2];
                    let color = shade(ctx, &world, &normal, uv);
                    target.rgb[pix * 3..pix * 3 + 3].copy_from_slice(&color);
                    target.depth[pix] = (z * 1000.0).round().clamp(1.0, u16::MAX as f64) as u16;
                    target.class[pix] = inst.class_id;
                    target.inst[pix] = id;
                }
            }
            for i in 0..3 {
                w[i] += step_x[i];
            }
        }
        for i in 0..3 {
            row[i] += step_y[i];
        }
    }
}

fn shade(ctx: &InstanceCtx<'_>, world: &Vector3<f64>, normal: &Vector3<f64>, uv: [f64; 2]) -> [u8; 3] {
    let mut n = *normal;
    let len = n.norm();
    n = if len > 1e-12 { n / len } else { Vector3::z() };
    // Two-sided lighting: face the normal toward the viewer.
    if n.dot(&(ctx.eye - world)) < 0.0 {
        n = -n;
    }
    let mut light = Vector3::repeat(ctx.ambient);
    for l in ctx.lights {
        let dir = match l.directional {
            Some(d) => d,
            None => {
                let d = l.position - world;
                let len = d.norm();
                if len < 1e-12 {
                    continue;
                }
                d / len
            }
        };
        let lambert = n.dot(&dir);
        if lambert > 0.0 {
            light += l.radiance * lambert;
        }
    }
    let tex = sample_bilinear(&ctx.instance.texture, uv);
    [0, 1, 2].map(|k| (tex[k] * light[k]).round().clamp(0.0, 255.0) as u8)
}

/// Z-buffered rasterization of `instances` as seen by the frame's camera.
///
/// The nearest surface wins all four buffers. `background` (resampled to the
/// frame size) fills uncovered RGB pixels; without one they stay black.
pub fn rasterize(
    instances: &[RenderInstance],
    frame: &FrameSpec,
    background: Option<&RgbImage>,
    near_plane: f64,
) -> Result<FrameBuffers> {
    let cam = &frame.camera;
    cam.validate()?;
    let (w, h) = (cam.width as usize, cam.height as usize);
    let mut seen = std::collections::BTreeSet::new();
    for inst in instances {
        if inst.instance_id == 0 || !seen.insert(inst.instance_id) {
            return Err(Error::Validation(format!(
                "instance id {} is zero or repeated",
                inst.instance_id
            )));
        }
        if inst.class_id == BACKGROUND_CLASS {
            return Err(Error::Validation(format!("instance {} uses the background class", inst.instance_id)));
        }
    }

    let mut rgb = match background {
        Some(bg) if bg.dimensions() == (cam.width, cam.height) => bg.clone(),
        Some(bg) => image::imageops::resize(bg, cam.width, cam.height, image::imageops::FilterType::Triangle),
        None => RgbImage::new(cam.width, cam.height),
    };
    let mut zbuf = vec![f64::INFINITY; w * h];
    let mut depth = vec![0u16; w * h];
    let mut class = vec![BACKGROUND_CLASS; w * h];
    let mut inst_buf = vec![0u16; w * h];
    let mut stamp = vec![0u16; w * h];

    let groups = instances.iter().filter_map(|i| i.group).max().map_or(0, |g| g as usize + 1);
    let words = (w * h).div_ceil(64);
    let mut group_bits: Vec<Vec<u64>> = vec![vec![0; words]; groups];

    let lights: Vec<ShadingLight> = frame
        .lights
        .iter()
        .map(|l| {
            let radiance = Vector3::from(l.color) * l.intensity;
            match l.kind {
                LightKind::Directional { direction } => ShadingLight {
                    directional: Some(-Vector3::from(direction).normalize()),
                    position: Vector3::zeros(),
                    radiance,
                },
                LightKind::Point { position } => ShadingLight {
                    directional: None,
                    position: Vector3::from(position),
                    radiance,
                },
            }
        })
        .collect();
    let eye = cam.position();

    let mut infos = Vec::with_capacity(instances.len());
    let mut cam_space = Vec::new();
    let mut clipped = Vec::with_capacity(4);
    for instance in instances {
        let mesh = &instance.mesh;
        cam_space.clear();
        cam_space.extend(mesh.vertices.iter().map(|v| cam.to_camera(v)));
        let mut ctx = InstanceCtx {
            instance,
            lights: &lights,
            ambient: frame.ambient,
            eye,
            solo_pixels: 0,
        };
        let mut target = Target {
            width: w,
            height: h,
            rgb: rgb.as_mut(),
            zbuf: &mut zbuf,
            depth: &mut depth,
            class: &mut class,
            inst: &mut inst_buf,
            stamp: &mut stamp,
            group_bits: instance.group.map(|g| group_bits[g as usize].as_mut_slice()),
        };
        for tri in &mesh.triangles {
            let verts = tri.map(|i| {
                let i = i as usize;
                ClipVertex {
                    cam: cam_space[i],
                    world: mesh.vertices[i],
                    normal: mesh.normals[i],
                    uv: mesh.uvs[i],
                }
            });
            if verts.iter().all(|v| v.cam.z >= near_plane) {
                draw_triangle(verts, cam, &mut target, &mut ctx);
                continue;
            }
            clip_near(verts, near_plane, &mut clipped);
            for k in 1..clipped.len().saturating_sub(1) {
                draw_triangle([clipped[0], clipped[k], clipped[k + 1]], cam, &mut target, &mut ctx);
            }
        }
        infos.push(InstanceInfo {
            instance_id: instance.instance_id,
            class_id: instance.class_id,
            group: instance.group,
            origin: instance.origin,
            solo_pixels: ctx.solo_pixels,
        });
    }

    Ok(FrameBuffers {
        rgb,
        depth: Gray16Image::from_raw(cam.width, cam.height, depth).expect("sized"),
        class_seg: GrayImage::from_raw(cam.width, cam.height, class).expect("sized"),
        instance_seg: Gray16Image::from_raw(cam.width, cam.height, inst_buf).expect("sized"),
        instances: infos,
        group_solo_pixels: group_bits
            .iter()
            .map(|bits| bits.iter().map(|b| b.count_ones()).sum())
            .collect(),
    })
}
