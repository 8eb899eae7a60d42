use std::f64::consts::TAU;

use nalgebra::{UnitQuaternion, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{
    color_temperature_rgb, CameraModel, CharacterSpec, Distractor, Environment, FrameSpec, Light, LightKind, Mode,
    OutfitItem, Placement, PrimitiveKind, RandomizationConfig,
};
use crate::body_model::sample_animation;
use crate::clothing::{GarmentClass, PaletteColor};
use crate::seed::{self, tags};
use crate::{Error, Result};

/// Per-frame seed recorded in the frame spec and annotation.
pub fn frame_seed(master_seed: u64, frame_index: u64) -> u64 {
    seed::derive(master_seed, tags::FRAME, frame_index)
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, pool: &'a [T], name: &str) -> Result<(usize, &'a T)> {
    if pool.is_empty() {
        return Err(Error::Config(format!("pool '{name}' is empty")));
    }
    let i = rng.random_range(0..pool.len());
    Ok((i, &pool[i]))
}

fn random_rotation(rng: &mut ChaCha8Rng) -> UnitQuaternion<f64> {
    // Shoemake's uniform quaternion.
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    UnitQuaternion::new_normalize(nalgebra::Quaternion::new(
        b * (TAU * u3).cos(),
        a * (TAU * u2).sin(),
        a * (TAU * u2).cos(),
        b * (TAU * u3).sin(),
    ))
}

/// Texture, outfit and animation clip of one character.
fn sample_character(
    config: &RandomizationConfig,
    rng: &mut ChaCha8Rng,
    shape_index: Option<usize>,
    shape_coeffs: Vec<f64>,
) -> Result<CharacterSpec> {
    let f = &config.file;
    let (_, texture) = pick(rng, &f.human_textures, "human_textures")?;
    let outfit = GarmentClass::ALL
        .into_iter()
        .map(|class| {
            let (_, asset) = pick(rng, f.garments.assets(class), &format!("garments.{class}"))?;
            let palette = match rng.random_range(0..=PaletteColor::ALL.len()) {
                0 => None,
                i => Some(PaletteColor::ALL[i - 1]),
            };
            Ok(OutfitItem {
                class,
                asset: asset.clone(),
                palette,
                jitter_seed: rng.random(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (clip, _) = pick(rng, &config.clips, "animation_clips")?;
    Ok(CharacterSpec {
        shape_index,
        shape_coeffs,
        texture: texture.path.clone(),
        gender: texture.gender.clone(),
        outfit,
        clip,
        motion_time: 0.0,
        root_translation: [0.0; 3],
        rotations: Vec::new(),
        placement: Placement::ORIGIN,
    })
}

fn set_pose(config: &RandomizationConfig, character: &mut CharacterSpec, motion_time: f64) -> Result<()> {
    let pose = sample_animation(&config.clips[character.clip], motion_time)?;
    character.motion_time = motion_time;
    character.root_translation = pose.root_translation.into();
    character.rotations = pose.to_wxyz();
    Ok(())
}

fn jittered_target(rng: &mut ChaCha8Rng, target: Vector3<f64>, distance: f64, jitter_deg: f64) -> Vector3<f64> {
    let angle = uniform(rng, [0.0, jitter_deg]).to_radians();
    let dir = Vector3::new(
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
    );
    let n = dir.norm();
    if n < 1e-12 {
        return target;
    }
    target + dir / n * distance * angle.tan()
}

/// Compose a domain-randomized frame.
///
/// Shape, skin texture, outfit and clip belong to the character, which changes
/// every `frames_per_character` frames; within a character the clip advances
/// one keyframe interval per frame. Camera, lights, backdrop and distractors
/// are drawn per frame.
pub fn compose_dr(config: &RandomizationConfig, frame_index: u64, master_seed: u64) -> Result<FrameSpec> {
    let f = &config.file;
    if f.mode != Mode::Dr {
        return Err(Error::Config(format!("compose_dr called with {} config", f.mode.as_str())));
    }
    let fpc = config.frames_per_character() as u64;
    let character_index = frame_index / fpc;
    let local = frame_index % fpc;

    let (shape_index, shape_coeffs) = match &config.shape_table {
        Some(table) if !table.is_empty() => {
            let row = (character_index % table.len() as u64) as usize;
            (Some(row), table[row].clone())
        }
        Some(_) => return Err(Error::Config("pool 'shape_table' is empty".into())),
        None => {
            let mut srng = seed::rng(master_seed, tags::SHAPE, character_index);
            let coeffs = (0..f.num_shape_coeffs)
                .map(|_| srng.sample::<f64, _>(StandardNormal).clamp(-3.0, 3.0))
                .collect();
            (None, coeffs)
        }
    };
    let mut crng = seed::rng(master_seed, tags::CHARACTER, character_index);
    let mut character = sample_character(config, &mut crng, shape_index, shape_coeffs)?;
    set_pose(config, &mut character, local as f64 / fpc as f64)?;

    let mut rng = seed::rng(master_seed, tags::FRAME, frame_index);
    let cam = &f.camera;
    let target = Vector3::new(0.0, cam.target_height, 0.0);
    let radius = uniform(&mut rng, cam.radius);
    let elevation = uniform(&mut rng, cam.elevation_deg).to_radians();
    let azimuth = rng.random_range(0.0..TAU);
    let eye = target
        + Vector3::new(
            elevation.cos() * azimuth.sin(),
            elevation.sin(),
            elevation.cos() * azimuth.cos(),
        ) * radius;
    let look = jittered_target(&mut rng, target, radius, cam.look_at_jitter_deg);
    let fov = uniform(&mut rng, cam.vertical_fov_deg);
    let camera = CameraModel::look_at(eye, look, fov, f.image.width, f.image.height);

    let ambient = uniform(&mut rng, f.lights.ambient);
    let light_count = rng.random_range(f.lights.count[0]..=f.lights.count[1]);
    let lights = (0..light_count)
        .map(|_| {
            let az = rng.random_range(0.0..TAU);
            let el = uniform(&mut rng, [10.0, 80.0]).to_radians();
            let from = Vector3::new(el.cos() * az.sin(), el.sin(), el.cos() * az.cos());
            Light {
                kind: LightKind::Directional { direction: (-from).into() },
                color: color_temperature_rgb(uniform(&mut rng, f.lights.color_temperature)),
                intensity: uniform(&mut rng, f.lights.intensity),
            }
        })
        .collect();

    let (_, background) = pick(&mut rng, &f.backgrounds, "backgrounds")?;
    let environment = Environment::Backdrop {
        background: background.clone(),
    };

    let spec = &f.distractors;
    let count = rng.random_range(spec.count[0]..=spec.count[1]);
    let distractors = (0..count)
        .map(|_| {
            let shape = [PrimitiveKind::Box, PrimitiveKind::Sphere, PrimitiveKind::Cylinder][rng.random_range(0..3)];
            let angle = rng.random_range(0.0..TAU);
            let dist = uniform(&mut rng, spec.distance);
            let position = [dist * angle.cos(), uniform(&mut rng, [0.0, 2.0]), dist * angle.sin()];
            let q = random_rotation(&mut rng);
            let s = uniform(&mut rng, spec.scale);
            let scale = match shape {
                PrimitiveKind::Sphere => [s; 3],
                _ => [s, uniform(&mut rng, spec.scale), uniform(&mut rng, spec.scale)],
            };
            let (_, texture) = pick(&mut rng, &spec.textures, "distractors.textures")?;
            Ok(Distractor {
                shape,
                position,
                rotation: [q.w, q.i, q.j, q.k],
                scale,
                texture: texture.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(FrameSpec {
        frame_index,
        seed: frame_seed(master_seed, frame_index),
        mode: Mode::Dr,
        characters: vec![character],
        camera,
        ambient,
        lights,
        environment,
        distractors,
    })
}

/// Even-odd point in polygon test on `(x, z)` coordinates.
pub fn point_in_polygon(p: [f64; 2], polygon: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = polygon.len();
    for i in 0..n {
        let (a, b) = (polygon[i], polygon[(i + n - 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

const PLACEMENT_ATTEMPTS: usize = 10_000;
const CAMERA_ATTEMPTS: usize = 256;

/// Compose a structured domain-randomized frame inside the configured room.
///
/// Shape stays at the template; outfit, skin texture, placement and motion
/// time are drawn independently for every frame.
pub fn compose_sdr(config: &RandomizationConfig, frame_index: u64, master_seed: u64) -> Result<FrameSpec> {
    let f = &config.file;
    if f.mode != Mode::Sdr {
        return Err(Error::Config(format!("compose_sdr called with {} config", f.mode.as_str())));
    }
    let room = config
        .room
        .as_ref()
        .ok_or_else(|| Error::Config("SDR mode needs a room scene".into()))?;
    let polygon = &room.file.placement_polygon;
    if room.polygon_area() <= 0.0 {
        return Err(Error::Config(format!("placement region of room '{}' is empty", room.reference)));
    }
    let (lo, hi) = polygon.iter().fold(
        ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]),
        |(lo, hi), p| ([lo[0].min(p[0]), lo[1].min(p[1])], [hi[0].max(p[0]), hi[1].max(p[1])]),
    );

    let mut rng = seed::rng(master_seed, tags::FRAME, frame_index);
    let mut characters = Vec::with_capacity(f.characters_per_frame);
    for _ in 0..f.characters_per_frame {
        let mut c = sample_character(config, &mut rng, None, vec![0.0; f.num_shape_coeffs])?;
        let t = rng.random_range(0.0..=1.0);
        set_pose(config, &mut c, t)?;
        let spot = (0..PLACEMENT_ATTEMPTS)
            .map(|_| [uniform(&mut rng, [lo[0], hi[0]]), uniform(&mut rng, [lo[1], hi[1]])])
            .find(|&p| point_in_polygon(p, polygon))
            .ok_or_else(|| Error::Config(format!("could not place a character in room '{}'", room.reference)))?;
        c.placement = Placement {
            position: [spot[0], 0.0, spot[1]],
            yaw_degrees: rng.random_range(0.0..360.0),
        };
        characters.push(c);
    }

    let ambient = uniform(&mut rng, f.lights.ambient);
    let lights = room
        .file
        .ceiling_lights
        .iter()
        .map(|&position| {
            let base = 0.5 * (f.lights.intensity[0] + f.lights.intensity[1]);
            let j = f.lights.anchor_jitter;
            Light {
                kind: LightKind::Point { position },
                color: color_temperature_rgb(uniform(&mut rng, f.lights.color_temperature)),
                intensity: base * (1.0 + uniform(&mut rng, [-j, j])),
            }
        })
        .collect();

    let cam = &f.camera;
    let anchor = characters[0].placement.position;
    let target = Vector3::new(anchor[0], cam.target_height, anchor[2]);
    let (bmin, bmax) = (room.file.bounds_min, room.file.bounds_max);
    let margin = 0.25;
    let mut best: Option<(f64, Vector3<f64>)> = None;
    for _ in 0..CAMERA_ATTEMPTS {
        let eye = Vector3::new(
            uniform(&mut rng, [bmin[0] + margin, bmax[0] - margin]),
            uniform(&mut rng, cam.height).clamp(bmin[1] + margin, bmax[1] - margin),
            uniform(&mut rng, [bmin[2] + margin, bmax[2] - margin]),
        );
        let d = ((eye.x - target.x).powi(2) + (eye.z - target.z).powi(2)).sqrt();
        if best.is_none_or(|(bd, _)| d > bd) {
            best = Some((d, eye));
        }
        if d >= cam.radius[0] && d <= cam.radius[1] {
            best = Some((d, eye));
            break;
        }
    }
    let (dist, eye) = best.expect("at least one camera attempt");
    let look = jittered_target(&mut rng, target, dist, cam.look_at_jitter_deg);
    let fov = uniform(&mut rng, cam.vertical_fov_deg);
    let camera = CameraModel::look_at(eye, look, fov, f.image.width, f.image.height);

    Ok(FrameSpec {
        frame_index,
        seed: frame_seed(master_seed, frame_index),
        mode: Mode::Sdr,
        characters,
        camera,
        ambient,
        lights,
        environment: Environment::Room {
            room: room.reference.clone(),
        },
        distractors: Vec::new(),
    })
}

/// Compose with the composer matching the config's mode.
pub fn compose(config: &RandomizationConfig, frame_index: u64, master_seed: u64) -> Result<FrameSpec> {
    match config.mode() {
        Mode::Dr => compose_dr(config, frame_index, master_seed),
        Mode::Sdr => compose_sdr(config, frame_index, master_seed),
        m => Err(Error::Config(format!("cannot compose {} frames", m.as_str()))),
    }
}

/// Frame specs for indices `0..count`.
pub fn plan_dataset(config: &RandomizationConfig, count: usize, master_seed: u64) -> Result<Vec<FrameSpec>> {
    if count == 0 {
        return Err(Error::Config("frame count must be at least 1".into()));
    }
    plan_range(config, 0..count as u64, master_seed)
}

/// Frame specs for an explicit index range.
pub fn plan_range(config: &RandomizationConfig, frames: std::ops::Range<u64>, master_seed: u64) -> Result<Vec<FrameSpec>> {
    frames.map(|i| compose(config, i, master_seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_membership() {
        let square = [[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]];
        assert!(point_in_polygon([1.0, 1.0], &square));
        assert!(!point_in_polygon([3.0, 1.0], &square));
        let l_shape = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        assert!(point_in_polygon([0.5, 1.5], &l_shape));
        assert!(!point_in_polygon([1.5, 1.5], &l_shape));
    }

    #[test]
    fn random_rotation_is_unit() {
        let mut rng = seed::rng(1, 2, 3);
        for _ in 0..100 {
            let q = random_rotation(&mut rng);
            assert!((q.quaternion().norm() - 1.0).abs() < 1e-12);
        }
    }
}
