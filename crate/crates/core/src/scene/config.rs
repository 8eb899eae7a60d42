use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Mode;
use crate::body_model::AnimationClip;
use crate::clothing::{GarmentRegistry, PaletteSpec};
use crate::error::read_json;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanTexture {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageSize {
    pub width: u32,
    pub height: u32,
}

impl Default for ImageSize {
    fn default() -> Self {
        ImageSize { width: 896, height: 896 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraRanges {
    /// Distance from the look-at target (DR shell radius; SDR minimum distance
    /// is the lower bound).
    pub radius: [f64; 2],
    pub elevation_deg: [f64; 2],
    pub vertical_fov_deg: [f64; 2],
    pub look_at_jitter_deg: f64,
    /// Height of the look-at point above the character origin.
    pub target_height: f64,
    /// SDR camera height above the floor.
    pub height: [f64; 2],
}

impl Default for CameraRanges {
    fn default() -> Self {
        CameraRanges {
            radius: [2.6, 4.2],
            elevation_deg: [-5.0, 30.0],
            vertical_fov_deg: [40.0, 55.0],
            look_at_jitter_deg: 4.0,
            target_height: 1.0,
            height: [1.5, 2.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LightRanges {
    pub count: [usize; 2],
    pub intensity: [f64; 2],
    pub color_temperature: [f64; 2],
    pub ambient: [f64; 2],
    /// Relative intensity jitter of ceiling lights (SDR).
    pub anchor_jitter: f64,
}

impl Default for LightRanges {
    fn default() -> Self {
        LightRanges {
            count: [1, 3],
            intensity: [0.4, 0.9],
            color_temperature: [3200.0, 7500.0],
            ambient: [0.25, 0.45],
            anchor_jitter: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistractorSpec {
    pub count: [usize; 2],
    pub scale: [f64; 2],
    /// Horizontal distance from the character.
    pub distance: [f64; 2],
    pub textures: Vec<String>,
}

impl Default for DistractorSpec {
    fn default() -> Self {
        DistractorSpec {
            count: [0, 8],
            scale: [0.1, 0.5],
            distance: [0.6, 2.0],
            textures: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderSettings {
    /// Outward offset of garment vertices along their normals, meters.
    pub garment_offset: f64,
    pub near_plane: f64,
    pub min_visibility: f64,
}

impl Default for RenderSettings {
    fn default() -> Self {
        RenderSettings {
            garment_offset: 0.002,
            near_plane: 0.05,
            min_visibility: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomMesh {
    /// Geometry file (vertices, triangles, uvs).
    pub mesh: String,
    pub texture: String,
}

/// Room description file. Paths are relative to the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomFile {
    pub meshes: Vec<RoomMesh>,
    /// Floor polygon `(x, z)` where characters may stand.
    pub placement_polygon: Vec<[f64; 2]>,
    pub ceiling_lights: Vec<[f64; 3]>,
    /// Interior volume available to the camera.
    pub bounds_min: [f64; 3],
    pub bounds_max: [f64; 3],
}

/// Loaded room: the file plus the directory its paths are relative to.
#[derive(Debug, Clone, PartialEq)]
pub struct RoomScene {
    pub reference: String,
    pub file: RoomFile,
    pub base_dir: PathBuf,
}

impl RoomScene {
    pub fn polygon_area(&self) -> f64 {
        let p = &self.file.placement_polygon;
        if p.len() < 3 {
            return 0.0;
        }
        let twice: f64 = (0..p.len())
            .map(|i| {
                let (a, b) = (p[i], p[(i + 1) % p.len()]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum();
        twice.abs() / 2.0
    }
}

/// Randomization config as stored on disk. Paths are relative to the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub mode: Mode,
    pub body: String,
    /// JSON file holding an N x num_coeffs table of shape coefficients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape_table: Option<String>,
    #[serde(default = "default_num_coeffs")]
    pub num_shape_coeffs: usize,
    pub human_textures: Vec<HumanTexture>,
    pub garments: GarmentRegistry,
    #[serde(default)]
    pub backgrounds: Vec<String>,
    #[serde(default)]
    pub distractors: DistractorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub room: Option<String>,
    #[serde(default)]
    pub camera: CameraRanges,
    #[serde(default)]
    pub lights: LightRanges,
    pub animation_clips: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frames_per_character: Option<usize>,
    #[serde(default = "default_characters")]
    pub characters_per_frame: usize,
    #[serde(default)]
    pub image: ImageSize,
    #[serde(default)]
    pub palette: PaletteSpec,
    #[serde(default)]
    pub render: RenderSettings,
}

fn default_num_coeffs() -> usize {
    crate::body_model::DEFAULT_NUM_COEFFS
}

fn default_characters() -> usize {
    1
}

/// Config with its referenced tables, clips and room loaded. This is the
/// composer's input.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizationConfig {
    pub file: ConfigFile,
    pub base_dir: PathBuf,
    pub shape_table: Option<Vec<Vec<f64>>>,
    pub clips: Vec<AnimationClip>,
    pub room: Option<RoomScene>,
}

impl RandomizationConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let file: ConfigFile = read_json(path)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        RandomizationConfig::from_file(file, base_dir)
    }

    pub fn from_file(file: ConfigFile, base_dir: PathBuf) -> Result<Self> {
        let shape_table = match &file.shape_table {
            Some(p) => Some(read_json::<Vec<Vec<f64>>>(&base_dir.join(p))?),
            None => None,
        };
        let clips = file
            .animation_clips
            .iter()
            .map(|p| AnimationClip::load(&base_dir.join(p)))
            .collect::<Result<Vec<_>>>()?;
        let room = match &file.room {
            Some(p) => {
                let path = base_dir.join(p);
                Some(RoomScene {
                    reference: p.clone(),
                    file: read_json(&path)?,
                    base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
                })
            }
            None => None,
        };
        let cfg = RandomizationConfig {
            file,
            base_dir,
            shape_table,
            clips,
            room,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn mode(&self) -> Mode {
        self.file.mode
    }

    pub fn resolve(&self, reference: &str) -> PathBuf {
        self.base_dir.join(reference)
    }

    /// Frames rendered per character before the next shape is chosen.
    /// Defaults to the number of keyframe intervals of the first clip.
    pub fn frames_per_character(&self) -> usize {
        self.file
            .frames_per_character
            .unwrap_or_else(|| self.clips.first().map_or(1, AnimationClip::interval_count))
            .max(1)
    }

    /// Every pool sampled by the active mode must be non-empty.
    pub fn check_pools(&self) -> Result<()> {
        let f = &self.file;
        let empty = |name: &str| Err(Error::Config(format!("pool '{name}' is empty")));
        if f.human_textures.is_empty() {
            return empty("human_textures");
        }
        f.garments.validate()?;
        match f.mode {
            Mode::Dr => {
                if f.backgrounds.is_empty() {
                    return empty("backgrounds");
                }
                if f.distractors.count[1] > 0 && f.distractors.textures.is_empty() {
                    return empty("distractors.textures");
                }
            }
            _ => match &self.room {
                None => return Err(Error::Config("SDR mode needs a room scene".into())),
                Some(room) if room.polygon_area() <= 0.0 => {
                    return Err(Error::Config(format!("placement region of room '{}' is empty", room.reference)));
                }
                Some(_) => {}
            },
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.file;
        if !matches!(f.mode, Mode::Dr | Mode::Sdr) {
            return Err(Error::Config(format!("generation mode must be DR or SDR, got {}", f.mode.as_str())));
        }
        if self.clips.is_empty() {
            return Err(Error::Config("pool 'animation_clips' is empty".into()));
        }
        if let Some(table) = &self.shape_table {
            if table.is_empty() {
                return Err(Error::Config("pool 'shape_table' is empty".into()));
            }
            if let Some(row) = table.iter().find(|r| r.len() != f.num_shape_coeffs) {
                return Err(Error::Dimension {
                    what: "shape table row",
                    expected: f.num_shape_coeffs,
                    got: row.len(),
                });
            }
        }
        self.check_pools()?;
        f.palette.validate()?;
        for (what, [lo, hi]) in [
            ("camera.radius", f.camera.radius),
            ("camera.elevation_deg", f.camera.elevation_deg),
            ("camera.vertical_fov_deg", f.camera.vertical_fov_deg),
            ("camera.height", f.camera.height),
            ("lights.intensity", f.lights.intensity),
            ("lights.color_temperature", f.lights.color_temperature),
            ("lights.ambient", f.lights.ambient),
            ("distractors.scale", f.distractors.scale),
            ("distractors.distance", f.distractors.distance),
        ] {
            if !(lo <= hi) {
                return Err(Error::Config(format!("{what} range [{lo}, {hi}] is inverted")));
            }
        }
        if f.lights.count[0] > f.lights.count[1] || f.distractors.count[0] > f.distractors.count[1] {
            return Err(Error::Config("count ranges must be [min, max]".into()));
        }
        if !(f.camera.vertical_fov_deg[0] > 0.0 && f.camera.vertical_fov_deg[1] < 180.0) {
            return Err(Error::Config("vertical field of view must lie in (0, 180)".into()));
        }
        if f.characters_per_frame == 0 {
            return Err(Error::Config("characters_per_frame must be at least 1".into()));
        }
        if f.mode == Mode::Dr && f.characters_per_frame != 1 {
            return Err(Error::Config("DR scenes hold exactly one character".into()));
        }
        if f.image.width == 0 || f.image.height == 0 {
            return Err(Error::Config("image size must be non-zero".into()));
        }
        Ok(())
    }
}
