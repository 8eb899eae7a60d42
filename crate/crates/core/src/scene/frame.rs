use nalgebra::{Isometry3, Translation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::CameraModel;
use crate::body_model::Pose;
use crate::clothing::{GarmentClass, PaletteColor};
use crate::{Error, Result};

/// Dataset mode tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "DR")]
    Dr,
    #[serde(rename = "SDR")]
    Sdr,
    #[serde(rename = "MR")]
    Mr,
    #[serde(rename = "REAL")]
    Real,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Dr => "DR",
            Mode::Sdr => "SDR",
            Mode::Mr => "MR",
            Mode::Real => "REAL",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DR" => Some(Mode::Dr),
            "SDR" => Some(Mode::Sdr),
            "MR" => Some(Mode::Mr),
            "REAL" => Some(Mode::Real),
            _ => None,
        }
    }
}

/// One garment of an outfit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutfitItem {
    pub class: GarmentClass,
    pub asset: String,
    /// `None` keeps the asset's own texture.
    pub palette: Option<PaletteColor>,
    pub jitter_seed: u64,
}

/// Rigid placement of a character on the floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub position: [f64; 3],
    pub yaw_degrees: f64,
}

impl Placement {
    pub const ORIGIN: Placement = Placement {
        position: [0.0; 3],
        yaw_degrees: 0.0,
    };

    pub fn isometry(&self) -> Isometry3<f64> {
        Isometry3::from_parts(
            Translation3::new(self.position[0], self.position[1], self.position[2]),
            UnitQuaternion::from_axis_angle(&Vector3::y_axis(), self.yaw_degrees.to_radians()),
        )
    }
}

/// A fully resolved character: shape, skin, outfit, pose and placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterSpec {
    /// Row of the shape table, when one is configured.
    pub shape_index: Option<usize>,
    pub shape_coeffs: Vec<f64>,
    pub texture: String,
    pub gender: Option<String>,
    /// Exactly one item per garment class, in class order.
    pub outfit: Vec<OutfitItem>,
    pub clip: usize,
    pub motion_time: f64,
    pub root_translation: [f64; 3],
    /// Per-joint local rotations as `[w, x, y, z]`.
    pub rotations: Vec<[f64; 4]>,
    pub placement: Placement,
}

impl CharacterSpec {
    pub fn pose(&self) -> Result<Pose> {
        Pose::from_wxyz(&self.rotations, self.root_translation)
    }

    pub fn outfit_item(&self, class: GarmentClass) -> Option<&OutfitItem> {
        self.outfit.iter().find(|o| o.class == class)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum LightKind {
    /// Direction the light travels (from the light toward the scene).
    Directional { direction: [f64; 3] },
    Point { position: [f64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Light {
    #[serde(flatten)]
    pub kind: LightKind,
    /// Linear RGB, each channel in [0, 1].
    pub color: [f64; 3],
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Environment {
    /// Camera-facing backdrop image (DR).
    Backdrop { background: String },
    /// Static room geometry (SDR).
    Room { room: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveKind {
    Box,
    Sphere,
    Cylinder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distractor {
    pub shape: PrimitiveKind,
    pub position: [f64; 3],
    /// `[w, x, y, z]`.
    pub rotation: [f64; 4],
    pub scale: [f64; 3],
    pub texture: String,
}

/// Everything needed to render and annotate one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub frame_index: u64,
    pub seed: u64,
    pub mode: Mode,
    pub characters: Vec<CharacterSpec>,
    pub camera: CameraModel,
    pub ambient: f64,
    pub lights: Vec<Light>,
    pub environment: Environment,
    pub distractors: Vec<Distractor>,
}

impl FrameSpec {
    /// Check the outfit-completeness and camera invariants.
    pub fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        for (i, c) in self.characters.iter().enumerate() {
            let classes: Vec<_> = c.outfit.iter().map(|o| o.class).collect();
            if classes != GarmentClass::ALL {
                return Err(Error::Consistency(format!(
                    "character {i} outfit covers {classes:?}, expected one item per class"
                )));
            }
        }
        Ok(())
    }
}

/// Approximate RGB of a black body at `kelvin`, normalized so the largest
/// channel is 1.
pub fn color_temperature_rgb(kelvin: f64) -> [f64; 3] {
    let t = kelvin.clamp(1000.0, 40000.0) / 100.0;
    let r = if t <= 66.0 { 255.0 } else { 329.698_727_446 * (t - 60.0).powf(-0.133_204_759_2) };
    let g = if t <= 66.0 {
        99.470_802_586_1 * t.ln() - 161.119_568_166_1
    } else {
        288.122_169_528_3 * (t - 60.0).powf(-0.075_514_849_2)
    };
    let b = if t >= 66.0 {
        255.0
    } else if t <= 19.0 {
        0.0
    } else {
        138.517_731_223_1 * (t - 10.0).ln() - 305.044_792_730_7
    };
    let rgb = [r, g, b].map(|c: f64| c.clamp(0.0, 255.0));
    let max = rgb.iter().cloned().fold(f64::MIN, f64::max).max(1e-9);
    rgb.map(|c| c / max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_tags_serialize_uppercase() {
        assert_eq!(serde_json::to_string(&Mode::Sdr).unwrap(), "\"SDR\"");
        assert_eq!(Mode::parse("mr"), Some(Mode::Mr));
    }

    #[test]
    fn colour_temperature_is_warm_to_cool() {
        let warm = color_temperature_rgb(3000.0);
        let cool = color_temperature_rgb(9000.0);
        assert_eq!(warm[0], 1.0);
        assert!(warm[2] < warm[0]);
        assert!(cool[2] >= cool[0]);
        let d65 = color_temperature_rgb(6600.0);
        assert!(d65.iter().all(|&c| c > 0.95));
    }

    #[test]
    fn placement_yaw_rotates_about_up() {
        let p = Placement { position: [1.0, 0.0, 2.0], yaw_degrees: 90.0 };
        let v = p.isometry().transform_point(&nalgebra::Point3::new(0.0, 0.0, 1.0));
        assert!((v.coords - Vector3::new(2.0, 0.0, 2.0)).norm() < 1e-12);
    }
}
