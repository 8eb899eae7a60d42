//! Procedural assets: a capsule-built rigged human, fitted garments,
//! textures, a walk cycle and a small intervention room. Used by the tests
//! and by the demo scaffold of the command line tool.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};
use nalgebra::{UnitQuaternion, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::body_model::{
    rest_world_transforms, AnimationClip, Joint, Keyframe, ParametricBody, Pose, ShapeBasis, Skeleton, SkinWeights,
    TemplateMesh, DEFAULT_NUM_COEFFS,
};
use crate::clothing::{ClothingAsset, GarmentClass, GarmentRegistry, MeshAsset, SourceKind};
use crate::error::write_json;
use crate::render::primitive_mesh;
use crate::scene::{
    CameraRanges, ConfigFile, DistractorSpec, HumanTexture, ImageSize, LightRanges, Mode, PrimitiveKind, RenderSettings,
    RoomFile, RoomMesh,
};
use crate::seed;
use crate::{Error, Result};

/// Tessellation of every capsule segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub sides: usize,
    pub rings: usize,
}

impl Resolution {
    /// Under 2k body vertices.
    pub const LOW: Resolution = Resolution { sides: 8, rings: 4 };
    /// Roughly 10k triangles for body plus outfit.
    pub const HIGH: Resolution = Resolution { sides: 14, rings: 7 };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Torso,
    Head,
    Arm,
    Hand,
    Leg,
}

#[derive(Debug, Clone, Copy)]
enum End {
    Joint(usize),
    Tip([f64; 3]),
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    name: &'static str,
    start: usize,
    end: End,
    r0: f64,
    r1: f64,
    bulge: f64,
    part: Part,
}

const JOINTS: [(&str, Option<usize>, [f64; 3]); 21] = [
    ("pelvis", None, [0.0, 0.95, 0.0]),
    ("spine", Some(0), [0.0, 0.12, 0.0]),
    ("chest", Some(1), [0.0, 0.18, 0.0]),
    ("neck", Some(2), [0.0, 0.2, 0.0]),
    ("head", Some(3), [0.0, 0.1, 0.0]),
    ("l_shoulder", Some(2), [0.18, 0.15, 0.0]),
    ("l_elbow", Some(5), [0.08, -0.27, 0.0]),
    ("l_wrist", Some(6), [0.05, -0.25, 0.0]),
    ("l_finger1", Some(7), [0.015, -0.07, 0.0]),
    ("l_finger2", Some(8), [0.0, -0.04, 0.0]),
    ("r_shoulder", Some(2), [-0.18, 0.15, 0.0]),
    ("r_elbow", Some(10), [-0.08, -0.27, 0.0]),
    ("r_wrist", Some(11), [-0.05, -0.25, 0.0]),
    ("r_finger1", Some(12), [-0.015, -0.07, 0.0]),
    ("r_finger2", Some(13), [0.0, -0.04, 0.0]),
    ("l_hip", Some(0), [0.1, -0.05, 0.0]),
    ("l_knee", Some(15), [0.0, -0.42, 0.0]),
    ("l_ankle", Some(16), [0.0, -0.42, 0.0]),
    ("r_hip", Some(0), [-0.1, -0.05, 0.0]),
    ("r_knee", Some(18), [0.0, -0.42, 0.0]),
    ("r_ankle", Some(19), [0.0, -0.42, 0.0]),
];

fn segments() -> Vec<Segment> {
    let s = |name, start, end, r0, r1, part| Segment {
        name,
        start,
        end,
        r0,
        r1,
        bulge: 0.0,
        part,
    };
    let mut v = vec![
        s("pelvis", 0, End::Joint(1), 0.15, 0.14, Part::Torso),
        s("spine", 1, End::Joint(2), 0.14, 0.15, Part::Torso),
        s("chest", 2, End::Joint(3), 0.15, 0.06, Part::Torso),
        s("neck", 3, End::Joint(4), 0.05, 0.05, Part::Head),
        Segment {
            bulge: 0.35,
            ..s("head", 4, End::Tip([0.0, 0.21, 0.0]), 0.065, 0.06, Part::Head)
        },
    ];
    for (side, base) in [("l", 5), ("r", 10)] {
        let sign = if side == "l" { 1.0 } else { -1.0 };
        let name = |n: &str| -> &'static str { Box::leak(format!("{side}_{n}").into_boxed_str()) };
        v.extend([
            s(name("clavicle"), 2, End::Joint(base), 0.06, 0.055, Part::Torso),
            s(name("upper_arm"), base, End::Joint(base + 1), 0.05, 0.042, Part::Arm),
            s(name("forearm"), base + 1, End::Joint(base + 2), 0.04, 0.032, Part::Arm),
            s(name("palm"), base + 2, End::Joint(base + 3), 0.032, 0.03, Part::Hand),
            s(name("finger"), base + 3, End::Joint(base + 4), 0.022, 0.018, Part::Hand),
            s(name("fingertip"), base + 4, End::Tip([0.0, -0.035, 0.0]), 0.017, 0.012, Part::Hand),
        ]);
        let hip = if side == "l" { 15 } else { 18 };
        v.extend([
            s(name("hip"), 0, End::Joint(hip), 0.11, 0.09, Part::Torso),
            s(name("thigh"), hip, End::Joint(hip + 1), 0.085, 0.06, Part::Leg),
            s(name("shin"), hip + 1, End::Joint(hip + 2), 0.055, 0.04, Part::Leg),
            s(name("foot"), hip + 2, End::Tip([0.02 * sign, -0.03, 0.15]), 0.04, 0.035, Part::Leg),
        ]);
    }
    v
}

/// Per-vertex bookkeeping of the body builder.
#[derive(Debug, Clone, Copy)]
struct Tag {
    joint: usize,
    parent_blend: f64,
    axis: Vector3<f64>,
    part: Part,
}

#[derive(Default)]
struct MeshBuilder {
    vertices: Vec<Vector3<f64>>,
    triangles: Vec<[u32; 3]>,
    uvs: Vec<[f64; 2]>,
    tags: Vec<Tag>,
}

struct TubeSpec<'a> {
    a: Vector3<f64>,
    b: Vector3<f64>,
    r0: f64,
    r1: f64,
    bulge: f64,
    t_range: [f64; 2],
    arc: Option<[f64; 2]>,
    caps: [bool; 2],
    /// Radius multiplier as a function of `(angle, t)`.
    wrinkle: Option<&'a dyn Fn(f64, f64) -> f64>,
}

impl MeshBuilder {
    /// Tube around `a → b` with outward winding. `tag` supplies the
    /// bookkeeping for a vertex at parameter `t` and axis point.
    fn tube(&mut self, spec: &TubeSpec<'_>, res: Resolution, tag: impl Fn(f64, Vector3<f64>) -> Tag) {
        let axis = spec.b - spec.a;
        let len = axis.norm();
        let d = axis / len;
        let helper = if d.y.abs() < 0.9 { Vector3::y() } else { Vector3::z() };
        let u = helper.cross(&d).normalize();
        let v = d.cross(&u);
        let [p0, p1] = spec.arc.unwrap_or([0.0, TAU]);
        let cols = res.sides + 1;
        let rings = res.rings.max(1);
        let base = self.vertices.len() as u32;
        for i in 0..=rings {
            let t = spec.t_range[0] + (spec.t_range[1] - spec.t_range[0]) * i as f64 / rings as f64;
            let center = spec.a + axis * t;
            let radius = (spec.r0 + (spec.r1 - spec.r0) * t) * (1.0 + spec.bulge * (PI * t).sin());
            for j in 0..cols {
                let phi = p0 + (p1 - p0) * j as f64 / res.sides as f64;
                let w = spec.wrinkle.map_or(1.0, |f| f(phi, t));
                let n = u * phi.cos() + v * phi.sin();
                self.vertices.push(center + n * radius * w);
                self.uvs.push([j as f64 / res.sides as f64, 1.0 - i as f64 / rings as f64]);
                self.tags.push(tag(t, center));
            }
        }
        for i in 0..rings as u32 {
            for j in 0..res.sides as u32 {
                let v00 = base + i * cols as u32 + j;
                let v10 = v00 + cols as u32;
                self.triangles.push([v00, v00 + 1, v10]);
                self.triangles.push([v00 + 1, v10 + 1, v10]);
            }
        }
        for (end, &cap) in spec.caps.iter().enumerate() {
            if !cap {
                continue;
            }
            let i = if end == 0 { 0 } else { rings as u32 };
            let t = spec.t_range[end];
            let ring_radius = (spec.r0 + (spec.r1 - spec.r0) * t) * (1.0 + spec.bulge * (PI * t).sin());
            let center = spec.a + axis * t + d * if end == 0 { -0.4 } else { 0.4 } * ring_radius;
            let c = self.vertices.len() as u32;
            self.vertices.push(center);
            self.uvs.push([0.5, if end == 0 { 1.0 } else { 0.0 }]);
            self.tags.push(tag(t, spec.a + axis * t));
            for j in 0..res.sides as u32 {
                let p = base + i * cols as u32 + j;
                self.triangles.push(if end == 0 { [c, p + 1, p] } else { [c, p, p + 1] });
            }
        }
    }

    fn into_mesh(self) -> TemplateMesh {
        TemplateMesh::new(self.vertices, self.triangles, self.uvs).expect("builder emits valid topology")
    }
}

fn skeleton() -> Skeleton {
    Skeleton::new(
        JOINTS
            .iter()
            .map(|&(name, parent, offset)| Joint {
                name: name.to_string(),
                parent,
                offset: Vector3::from(offset),
            })
            .collect(),
    )
    .expect("fixture skeleton is valid")
}

fn segment_endpoints(seg: &Segment, rest: &[Vector3<f64>]) -> (Vector3<f64>, Vector3<f64>) {
    let a = rest[seg.start];
    let b = match seg.end {
        End::Joint(j) => rest[j],
        End::Tip(off) => a + Vector3::from(off),
    };
    (a, b)
}

fn rest_positions(skeleton: &Skeleton) -> Vec<Vector3<f64>> {
    rest_world_transforms(skeleton).iter().map(|t| t.translation.vector).collect()
}

/// Smooth displacement fields over the body: height, girth, width, depth,
/// belly, shoulder width, leg length, head size, a ripple and arm girth.
fn shape_fields(mesh: &TemplateMesh, tags: &[Tag]) -> Vec<Vec<Vector3<f64>>> {
    let field = |f: &dyn Fn(&Vector3<f64>, &Tag) -> Vector3<f64>| -> Vec<Vector3<f64>> {
        mesh.vertices.iter().zip(tags).map(|(p, t)| f(p, t)).collect()
    };
    let radial = |p: &Vector3<f64>, t: &Tag| p - t.axis;
    let head_center = Vector3::new(0.0, 1.66, 0.0);
    vec![
        field(&|p, _| Vector3::new(0.0, p.y * 0.04, 0.0)),
        field(&|p, t| radial(p, t) * 0.08),
        field(&|p, _| Vector3::new(p.x * 0.06, 0.0, 0.0)),
        field(&|p, _| Vector3::new(0.0, 0.0, p.z * 0.08)),
        field(&|p, t| {
            let g = (-((p.y - 1.08) / 0.12).powi(2)).exp();
            if t.part == Part::Torso && p.z > 0.0 {
                Vector3::new(0.0, 0.0, 0.035 * g * p.z / 0.15)
            } else {
                Vector3::zeros()
            }
        }),
        field(&|p, t| match t.part {
            Part::Arm | Part::Hand => Vector3::new(0.025 * p.x.signum(), 0.0, 0.0),
            Part::Torso if p.y > 1.15 => Vector3::new(0.02 * p.x / 0.2, 0.0, 0.0),
            _ => Vector3::zeros(),
        }),
        field(&|p, _| {
            if p.y < 0.9 {
                Vector3::new(0.0, -(0.9 - p.y) * 0.05, 0.0)
            } else {
                Vector3::zeros()
            }
        }),
        field(&|p, t| {
            if t.part == Part::Head && p.y > 1.5 {
                (p - head_center) * 0.1
            } else {
                Vector3::zeros()
            }
        }),
        field(&|p, t| radial(p, t) * 0.03 * (5.0 * p.y).sin()),
        field(&|p, t| match t.part {
            Part::Arm => radial(p, t) * 0.15,
            _ => Vector3::zeros(),
        }),
    ]
}

/// The capsule human at [`Resolution::LOW`].
pub fn capsule_human() -> ParametricBody {
    capsule_human_with(Resolution::LOW)
}

/// A 21-joint capsule human (two finger joints per hand) standing on the
/// floor facing +Z, with ten shape fields and blended skin weights.
pub fn capsule_human_with(res: Resolution) -> ParametricBody {
    let skeleton = skeleton();
    let rest = rest_positions(&skeleton);
    let mut b = MeshBuilder::default();
    for seg in segments() {
        let (a, e) = segment_endpoints(&seg, &rest);
        let has_parent = skeleton.joints()[seg.start].parent;
        let tip = matches!(seg.end, End::Tip(_));
        let spec = TubeSpec {
            a,
            b: e,
            r0: seg.r0,
            r1: seg.r1,
            bulge: seg.bulge,
            t_range: [0.0, 1.0],
            arc: None,
            caps: [true, true],
            wrinkle: None,
        };
        b.tube(&spec, res, |t, axis| Tag {
            joint: seg.start,
            parent_blend: match has_parent {
                Some(_) if !tip && t < 0.3 => 0.5 * (1.0 - t / 0.3),
                _ => 0.0,
            },
            axis,
            part: seg.part,
        });
    }
    let tags = std::mem::take(&mut b.tags);
    let mesh = b.into_mesh();
    let weights = SkinWeights::from_raw(
        tags.iter()
            .map(|t| match skeleton.joints()[t.joint].parent {
                Some(p) if t.parent_blend > 0.0 => vec![(t.joint, 1.0 - t.parent_blend), (p, t.parent_blend)],
                _ => vec![(t.joint, 1.0)],
            })
            .collect(),
        skeleton.joint_count(),
    )
    .expect("fixture weights are valid");
    let basis = ShapeBasis::new(shape_fields(&mesh, &tags), mesh.vertex_count()).expect("fixture basis is valid");
    debug_assert_eq!(basis.num_coeffs(), DEFAULT_NUM_COEFFS);
    ParametricBody::new(mesh, basis, skeleton, weights).expect("fixture body is valid")
}

/// Which body segments a garment covers and how far it stands off.
struct Cover {
    segment: &'static str,
    scale: f64,
    t_range: [f64; 2],
}

fn cover(segment: &'static str, scale: f64, t0: f64, t1: f64) -> Cover {
    Cover {
        segment,
        scale,
        t_range: [t0, t1],
    }
}

fn mirrored(out: &mut Vec<Cover>, name: &str, scale: f64, t0: f64, t1: f64) {
    for side in ["l", "r"] {
        let n: &'static str = Box::leak(format!("{side}_{name}").into_boxed_str());
        out.push(cover(n, scale, t0, t1));
    }
}

fn garment_covers(class: GarmentClass) -> Vec<Cover> {
    let mut v = Vec::new();
    match class {
        GarmentClass::Gown => {
            v.extend([cover("pelvis", 1.4, 0.0, 1.0), cover("spine", 1.38, 0.0, 1.0), cover("chest", 1.3, 0.0, 0.6)]);
            mirrored(&mut v, "clavicle", 1.4, 0.0, 1.0);
            mirrored(&mut v, "upper_arm", 1.35, 0.0, 1.0);
            mirrored(&mut v, "forearm", 1.3, 0.0, 0.4);
        }
        GarmentClass::Shirt => {
            v.extend([cover("spine", 1.18, 0.0, 1.0), cover("chest", 1.15, 0.0, 0.7)]);
            mirrored(&mut v, "clavicle", 1.2, 0.0, 1.0);
            mirrored(&mut v, "upper_arm", 1.2, 0.0, 0.5);
        }
        GarmentClass::Pants => {
            v.push(cover("pelvis", 1.22, 0.0, 0.6));
            mirrored(&mut v, "hip", 1.2, 0.0, 1.0);
            mirrored(&mut v, "thigh", 1.2, 0.0, 1.0);
            mirrored(&mut v, "shin", 1.25, 0.0, 0.95);
        }
        GarmentClass::Hat => v.push(cover("head", 1.14, 0.55, 1.0)),
        GarmentClass::Mask => v.push(cover("head", 1.12, 0.08, 0.45)),
        GarmentClass::Glove => {
            mirrored(&mut v, "forearm", 1.2, 0.8, 1.0);
            mirrored(&mut v, "palm", 1.22, 0.0, 1.0);
            mirrored(&mut v, "finger", 1.28, 0.0, 1.0);
            mirrored(&mut v, "fingertip", 1.35, 0.0, 1.0);
        }
    }
    v
}

/// Rest-pose garment mesh fitted over the capsule human. Scanned garments
/// carry small wrinkles; designed ones are smooth.
pub fn garment_mesh(class: GarmentClass, kind: SourceKind, res: Resolution) -> TemplateMesh {
    let skeleton = skeleton();
    let rest = rest_positions(&skeleton);
    let segs = segments();
    let wrinkle = |phi: f64, t: f64| 1.0 + 0.03 * (5.0 * phi + 9.0 * t).sin() + 0.015 * (11.0 * phi).cos();
    let wrinkle_ref: &dyn Fn(f64, f64) -> f64 = &wrinkle;
    let mut b = MeshBuilder::default();
    let dummy = |_, axis| Tag {
        joint: 0,
        parent_blend: 0.0,
        axis,
        part: Part::Torso,
    };
    for c in garment_covers(class) {
        let seg = segs.iter().find(|s| s.name == c.segment).expect("cover names a segment");
        let (a, e) = segment_endpoints(seg, &rest);
        let closed_end = matches!(class, GarmentClass::Hat | GarmentClass::Glove) && c.t_range[1] == 1.0 && matches!(seg.end, End::Tip(_));
        let spec = TubeSpec {
            a,
            b: e,
            r0: seg.r0 * c.scale,
            r1: seg.r1 * c.scale,
            bulge: seg.bulge,
            t_range: c.t_range,
            // Masks cover the front of the face only.
            arc: (class == GarmentClass::Mask).then_some([PI / 2.0 - 1.2, PI / 2.0 + 1.2]),
            caps: [false, closed_end],
            wrinkle: (kind == SourceKind::Scanned).then_some(wrinkle_ref),
        };
        b.tube(&spec, res, dummy);
    }
    if class == GarmentClass::Gown {
        // Coat skirt from the waist to below the knees.
        let spec = TubeSpec {
            a: Vector3::new(0.0, 0.97, 0.0),
            b: Vector3::new(0.0, 0.42, 0.0),
            r0: 0.21,
            r1: 0.27,
            bulge: 0.0,
            t_range: [0.0, 1.0],
            arc: None,
            caps: [false, false],
            wrinkle: (kind == SourceKind::Scanned).then_some(wrinkle_ref),
        };
        b.tube(&spec, res, dummy);
    }
    b.into_mesh()
}

fn noise_image(w: u32, h: u32, seed_value: u64, f: impl Fn(u32, u32, f64) -> [f64; 3]) -> RgbImage {
    let mut rng = seed::rng(seed_value, 0x7E47_0000, 0);
    let mut img = RgbImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let n: f64 = rng.random_range(-1.0..1.0);
            let c = f(x, y, n);
            img.put_pixel(x, y, Rgb(c.map(|v| v.round().clamp(0.0, 255.0) as u8)));
        }
    }
    img
}

/// Skin texture of the given base tone with a little per-pixel noise.
pub fn skin_texture(tone: [u8; 3], seed_value: u64) -> RgbImage {
    noise_image(64, 64, seed_value, |_, y, n| {
        let shade = 1.0 - 0.08 * (y as f64 / 64.0);
        tone.map(|c| c as f64 * shade + 6.0 * n)
    })
}

/// Garment texture: scanned fabric is noisy with folds, designed fabric is
/// flat with seams.
pub fn fabric_texture(base: [u8; 3], kind: SourceKind, seed_value: u64) -> RgbImage {
    match kind {
        SourceKind::Scanned => noise_image(64, 64, seed_value, |x, y, n| {
            let fold = 1.0 + 0.12 * ((x as f64 * 0.4 + y as f64 * 0.15).sin());
            base.map(|c| c as f64 * fold + 12.0 * n)
        }),
        SourceKind::Designed => RgbImage::from_fn(64, 64, |x, y| {
            let seam = x % 16 == 0 || y % 32 == 0;
            Rgb(base.map(|c| if seam { (c as f64 * 0.8) as u8 } else { c }))
        }),
    }
}

/// Backdrop image `index`: gradients, stripes and checkers.
pub fn background_texture(index: usize, seed_value: u64) -> RgbImage {
    let palette = [[180, 170, 150], [60, 90, 120], [120, 140, 100], [200, 200, 210], [90, 60, 70]];
    let a = palette[index % palette.len()];
    let b = palette[(index + 2) % palette.len()];
    noise_image(128, 128, seed_value ^ index as u64, |x, y, n| {
        let t = match index % 3 {
            0 => y as f64 / 127.0,
            1 => ((x / 16 + y / 16) % 2) as f64,
            _ => 0.5 + 0.5 * (x as f64 * 0.2).sin(),
        };
        [0, 1, 2].map(|k| a[k] as f64 * (1.0 - t) + b[k] as f64 * t + 10.0 * n)
    })
}

pub fn checker_texture(a: [u8; 3], b: [u8; 3], cells: u32) -> RgbImage {
    RgbImage::from_fn(32, 32, |x, y| {
        let cell = 32 / cells.max(1);
        Rgb(if (x / cell + y / cell).is_multiple_of(2) { a } else { b })
    })
}

/// In-place walk cycle with `intervals + 1` keyframes; the last equals the
/// first.
pub fn walk_clip(skeleton: &Skeleton, intervals: usize) -> AnimationClip {
    let idx = |name: &str| skeleton.find(name);
    let keyframes = (0..=intervals)
        .map(|k| {
            let t = k as f64 / intervals as f64;
            // Wrap so the closing keyframe is bit-identical to the first.
            let phase = TAU * (k % intervals) as f64 / intervals as f64;
            let s = phase.sin();
            let mut pose = Pose::identity(skeleton.joint_count());
            let mut set = |name: &str, axis: Vector3<f64>, angle: f64| {
                if let Some(j) = idx(name) {
                    pose.rotations[j] = UnitQuaternion::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
                }
            };
            set("l_shoulder", Vector3::x(), 0.4 * s);
            set("r_shoulder", Vector3::x(), -0.4 * s);
            set("l_elbow", Vector3::x(), -0.35);
            set("r_elbow", Vector3::x(), -0.35);
            set("l_hip", Vector3::x(), -0.45 * s);
            set("r_hip", Vector3::x(), 0.45 * s);
            set("l_knee", Vector3::x(), 0.5 * (phase + 0.6).sin().max(0.0));
            set("r_knee", Vector3::x(), 0.5 * (phase + 0.6 + PI).sin().max(0.0));
            set("spine", Vector3::y(), 0.1 * s);
            set("l_finger1", Vector3::x(), -0.25);
            set("r_finger1", Vector3::x(), -0.25);
            set("head", Vector3::x(), 0.05 * (2.0 * phase).sin());
            pose.root_translation = Vector3::new(0.0, 0.015 * (2.0 * phase).cos(), 0.0);
            Keyframe { time: t, pose }
        })
        .collect();
    AnimationClip::new(keyframes).expect("walk keyframes are ordered")
}

/// Which garment sources a demo asset set includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceSelection {
    Scanned,
    Designed,
    Both,
}

impl SourceSelection {
    fn kinds(self) -> Vec<SourceKind> {
        match self {
            SourceSelection::Scanned => vec![SourceKind::Scanned],
            SourceSelection::Designed => vec![SourceKind::Designed],
            SourceSelection::Both => vec![SourceKind::Scanned, SourceKind::Designed],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemoOptions {
    pub mode: Mode,
    pub sources: SourceSelection,
    pub resolution: Resolution,
    pub image: ImageSize,
    /// Rows of the generated shape table (DR only; 0 disables the table).
    pub shape_rows: usize,
    pub seed: u64,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            mode: Mode::Dr,
            sources: SourceSelection::Both,
            resolution: Resolution::LOW,
            image: ImageSize::default(),
            shape_rows: 32,
            seed: 1,
        }
    }
}

const SKIN_TONES: [([u8; 3], &str); 6] = [
    ([234, 192, 165], "female"),
    ([198, 145, 110], "female"),
    ([120, 80, 60], "female"),
    ([226, 180, 150], "male"),
    ([170, 120, 90], "male"),
    ([95, 65, 50], "male"),
];

const GARMENT_COLORS: [[u8; 3]; 6] = [
    [140, 180, 200],
    [110, 160, 135],
    [105, 150, 130],
    [120, 150, 190],
    [175, 205, 225],
    [190, 200, 235],
];

fn save_png(img: &RgbImage, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    img.save(path).map_err(|e| Error::image(path, e))
}

fn save_mesh(mesh: &TemplateMesh, path: &Path) -> Result<()> {
    write_json(path, &MeshAsset::from_mesh(mesh))
}

fn room_box(center: [f64; 3], size: [f64; 3]) -> TemplateMesh {
    let mut m = primitive_mesh(PrimitiveKind::Box);
    for v in &mut m.vertices {
        *v = v.component_mul(&Vector3::from(size)) + Vector3::from(center);
    }
    m.recompute_normals();
    m
}

fn room_quad(corners: [[f64; 3]; 4], tiles: f64) -> TemplateMesh {
    TemplateMesh::new(
        corners.iter().map(|&c| Vector3::from(c)).collect(),
        vec![[0, 1, 2], [0, 2, 3]],
        vec![[0.0, 0.0], [tiles, 0.0], [tiles, tiles], [0.0, tiles]],
    )
    .expect("quad topology is valid")
}

/// Intervention room: floor, ceiling, four walls, an operating table and a
/// cabinet. Writes the room file and its meshes and textures below `dir`.
pub fn write_room(dir: &Path) -> Result<PathBuf> {
    let (x, y, z) = (3.0, 3.0, 2.5);
    let parts: Vec<(&str, TemplateMesh, RgbImage)> = vec![
        (
            "floor",
            room_quad([[-x, 0.0, -z], [-x, 0.0, z], [x, 0.0, z], [x, 0.0, -z]], 6.0),
            checker_texture([200, 205, 200], [170, 180, 175], 4),
        ),
        (
            "ceiling",
            room_quad([[-x, y, -z], [x, y, -z], [x, y, z], [-x, y, z]], 3.0),
            checker_texture([235, 235, 235], [220, 220, 225], 2),
        ),
        (
            "walls_x",
            {
                let mut a = room_quad([[-x, 0.0, -z], [-x, y, -z], [-x, y, z], [-x, 0.0, z]], 2.0);
                let b = room_quad([[x, 0.0, -z], [x, 0.0, z], [x, y, z], [x, y, -z]], 2.0);
                append(&mut a, &b);
                a
            },
            checker_texture([190, 210, 215], [185, 205, 210], 2),
        ),
        (
            "walls_z",
            {
                let mut a = room_quad([[-x, 0.0, -z], [x, 0.0, -z], [x, y, -z], [-x, y, -z]], 2.0);
                let b = room_quad([[-x, 0.0, z], [-x, y, z], [x, y, z], [x, 0.0, z]], 2.0);
                append(&mut a, &b);
                a
            },
            checker_texture([210, 215, 200], [205, 210, 195], 2),
        ),
        (
            "table",
            room_box([1.2, 0.45, 0.0], [0.8, 0.9, 2.0]),
            checker_texture([90, 110, 130], [80, 100, 120], 8),
        ),
        (
            "cabinet",
            room_box([-2.6, 1.0, -2.0], [0.6, 2.0, 0.8]),
            checker_texture([220, 220, 220], [160, 160, 160], 4),
        ),
    ];
    let mut meshes = Vec::new();
    for (name, mesh, tex) in parts {
        save_mesh(&mesh, &dir.join(format!("{name}.mesh.json")))?;
        save_png(&tex, &dir.join(format!("{name}.png")))?;
        meshes.push(RoomMesh {
            mesh: format!("{name}.mesh.json"),
            texture: format!("{name}.png"),
        });
    }
    let room = RoomFile {
        meshes,
        placement_polygon: vec![[-2.2, -1.8], [0.5, -1.8], [0.5, 1.8], [-2.2, 1.8]],
        ceiling_lights: vec![[-1.0, 2.9, -1.0], [1.0, 2.9, 1.0]],
        bounds_min: [-x, 0.0, -z],
        bounds_max: [x, y, z],
    };
    let path = dir.join("room.json");
    write_json(&path, &room)?;
    Ok(path)
}

fn append(a: &mut TemplateMesh, b: &TemplateMesh) {
    let base = a.vertices.len() as u32;
    a.vertices.extend(&b.vertices);
    a.normals.extend(&b.normals);
    a.uvs.extend(&b.uvs);
    a.triangles.extend(b.triangles.iter().map(|t| t.map(|i| i + base)));
}

/// Write a complete, self-consistent asset set and a randomization config
/// into `dir`. Returns the config path.
pub fn write_demo_assets(dir: &Path, opts: &DemoOptions) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let body = capsule_human_with(opts.resolution);
    body.save(&dir.join("body.json"))?;
    walk_clip(&body.skeleton, 8).save(&dir.join("clips/walk.json"))?;

    let mut human_textures = Vec::new();
    for (i, (tone, gender)) in SKIN_TONES.iter().enumerate() {
        let rel = format!("textures/skin_{i}.png");
        save_png(&skin_texture(*tone, opts.seed + i as u64), &dir.join(&rel))?;
        human_textures.push(HumanTexture {
            path: rel,
            gender: Some(gender.to_string()),
        });
    }

    let mut garments = GarmentRegistry::default();
    for (c, class) in GarmentClass::ALL.into_iter().enumerate() {
        for kind in opts.sources.kinds() {
            let kind_name = match kind {
                SourceKind::Scanned => "scanned",
                SourceKind::Designed => "designed",
            };
            let stem = format!("{class}_{kind_name}");
            let tex = fabric_texture(GARMENT_COLORS[c], kind, opts.seed + 100 + c as u64);
            save_png(&tex, &dir.join(format!("garments/{stem}.png")))?;
            let mesh = garment_mesh(class, kind, opts.resolution);
            ClothingAsset::save_unbound(&mesh, class, kind, &format!("{stem}.png"), &dir.join(format!("garments/{stem}.json")))?;
            garments.classes.entry(class).or_default().push(format!("garments/{stem}.json"));
        }
    }

    let mut backgrounds = Vec::new();
    let mut distractor_textures = Vec::new();
    let mut room = None;
    let mut shape_table = None;
    match opts.mode {
        Mode::Dr => {
            for i in 0..5 {
                let rel = format!("backgrounds/bg_{i}.png");
                save_png(&background_texture(i, opts.seed), &dir.join(&rel))?;
                backgrounds.push(rel);
            }
            let colors = [[200, 40, 40], [40, 40, 200], [230, 200, 40], [40, 160, 60]];
            for (i, c) in colors.iter().enumerate() {
                let rel = format!("distractors/tex_{i}.png");
                save_png(&checker_texture(*c, [240, 240, 240], 2 + i as u32), &dir.join(&rel))?;
                distractor_textures.push(rel);
            }
            if opts.shape_rows > 0 {
                let mut rng = seed::rng(opts.seed, seed::tags::SHAPE, u64::MAX);
                let table: Vec<Vec<f64>> = (0..opts.shape_rows)
                    .map(|_| {
                        (0..DEFAULT_NUM_COEFFS)
                            .map(|_| rng.sample::<f64, _>(StandardNormal).clamp(-3.0, 3.0))
                            .collect()
                    })
                    .collect();
                write_json(&dir.join("shape_table.json"), &table)?;
                shape_table = Some("shape_table.json".to_string());
            }
        }
        _ => {
            write_room(&dir.join("room"))?;
            room = Some("room/room.json".to_string());
        }
    }

    let config = ConfigFile {
        mode: opts.mode,
        body: "body.json".into(),
        shape_table,
        num_shape_coeffs: DEFAULT_NUM_COEFFS,
        human_textures,
        garments,
        backgrounds,
        distractors: DistractorSpec {
            textures: distractor_textures,
            ..DistractorSpec::default()
        },
        room,
        camera: CameraRanges::default(),
        lights: LightRanges::default(),
        animation_clips: vec!["clips/walk.json".into()],
        frames_per_character: None,
        characters_per_frame: 1,
        image: opts.image,
        palette: Default::default(),
        render: RenderSettings::default(),
    };
    if opts.mode != Mode::Dr {
        // No distractors outside DR.
        let mut c = config;
        c.distractors.count = [0, 0];
        return write_config(dir, &c);
    }
    write_config(dir, &config)
}

fn write_config(dir: &Path, config: &ConfigFile) -> Result<PathBuf> {
    let path = dir.join("config.json");
    write_json(&path, config)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body_model::{forward_kinematics, skin_mesh};

    #[test]
    fn capsule_human_fits_the_budget() {
        let body = capsule_human();
        assert!(body.mesh.vertex_count() <= 2000, "{}", body.mesh.vertex_count());
        assert!(body.skeleton.joint_count() >= 16);
        for side in ["l", "r"] {
            assert!(body.skeleton.find(&format!("{side}_finger1")).is_some());
            assert!(body.skeleton.find(&format!("{side}_finger2")).is_some());
        }
        body.mesh.validate().unwrap();
        body.weights.validate(body.skeleton.joint_count()).unwrap();
        let (lo, hi) = body.mesh.bounds().unwrap();
        assert!(lo.y > -0.05 && lo.y < 0.1, "feet near the floor: {}", lo.y);
        assert!(hi.y > 1.6 && hi.y < 1.9, "height {}", hi.y);
    }

    #[test]
    fn capsule_normals_point_away_from_bones() {
        let body = capsule_human();
        let fk = forward_kinematics(&body.skeleton, &Pose::identity(body.skeleton.joint_count())).unwrap();
        let centre = fk[2].translation.vector;
        // The chest's frontmost vertex faces forward.
        let front = body
            .mesh
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| (v.y - centre.y).abs() < 0.1)
            .max_by(|a, b| a.1.z.total_cmp(&b.1.z))
            .unwrap()
            .0;
        assert!(body.mesh.normals[front].z > 0.5);
    }

    #[test]
    fn walk_clip_is_cyclic_and_poses_the_body() {
        let body = capsule_human();
        let clip = walk_clip(&body.skeleton, 8);
        assert_eq!(clip.interval_count(), 8);
        let first = &clip.keyframes()[0].pose;
        let last = &clip.keyframes()[8].pose;
        assert_eq!(first.to_wxyz(), last.to_wxyz());
        let posed = skin_mesh(&body.mesh, &body.weights, &body.skeleton, &clip.keyframes()[2].pose).unwrap();
        let moved = posed.vertices.iter().zip(&body.mesh.vertices).filter(|(a, b)| (*a - *b).norm() > 1e-3).count();
        assert!(moved > 100);
    }

    #[test]
    fn garments_cover_their_body_parts() {
        for class in GarmentClass::ALL {
            for kind in [SourceKind::Scanned, SourceKind::Designed] {
                let m = garment_mesh(class, kind, Resolution::LOW);
                m.validate().unwrap();
                assert!(m.vertex_count() > 10);
            }
        }
        let hat = garment_mesh(GarmentClass::Hat, SourceKind::Designed, Resolution::LOW);
        assert!(hat.bounds().unwrap().0.y > 1.6);
        let gloves = garment_mesh(GarmentClass::Glove, SourceKind::Designed, Resolution::LOW);
        assert!(gloves.bounds().unwrap().1.y < 1.0);
    }
}
