use image::RgbImage;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed;

/// Garment colours of the clinical palette.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaletteColor {
    Blue,
    Green,
    LightPink,
}

impl PaletteColor {
    pub const ALL: [PaletteColor; 3] = [PaletteColor::Blue, PaletteColor::Green, PaletteColor::LightPink];
}

/// Recoloring targets and random ranges. Hues are in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PaletteSpec {
    pub blue_hue: f64,
    pub green_hue: f64,
    pub light_pink_hue: f64,
    /// Half-width of the uniform hue jitter.
    pub hue_jitter: f64,
    /// Range of the saturation multiplier.
    pub saturation_scale: [f64; 2],
    /// Saturation floor applied before scaling so grey input takes the hue.
    pub min_saturation: f64,
}

impl Default for PaletteSpec {
    fn default() -> Self {
        PaletteSpec {
            blue_hue: 210.0,
            green_hue: 140.0,
            light_pink_hue: 340.0,
            hue_jitter: 10.0,
            saturation_scale: [0.8, 1.2],
            min_saturation: 0.25,
        }
    }
}

impl PaletteSpec {
    pub fn hue(&self, color: PaletteColor) -> f64 {
        match color {
            PaletteColor::Blue => self.blue_hue,
            PaletteColor::Green => self.green_hue,
            PaletteColor::LightPink => self.light_pink_hue,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        for (what, h) in [
            ("blue hue", self.blue_hue),
            ("green hue", self.green_hue),
            ("light pink hue", self.light_pink_hue),
        ] {
            if !(0.0..360.0).contains(&h) {
                return Err(crate::Error::Config(format!("{what} {h} outside [0, 360)")));
            }
        }
        if !(self.hue_jitter >= 0.0) {
            return Err(crate::Error::Config(format!("hue jitter {} is negative", self.hue_jitter)));
        }
        let [lo, hi] = self.saturation_scale;
        if !(lo >= 0.0 && lo <= hi) {
            return Err(crate::Error::Config(format!("saturation scale [{lo}, {hi}] invalid")));
        }
        Ok(())
    }
}

/// RGB in [0, 255] to (hue degrees in [0, 360), saturation, value) with
/// saturation and value in [0, 1].
pub fn rgb_to_hsv([r, g, b]: [u8; 3]) -> (f64, f64, f64) {
    let (r, g, b) = (r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    if delta == 0.0 {
        return (0.0, s, max);
    }
    let h = if max == r {
        60.0 * ((g - b) / delta)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    (h.rem_euclid(360.0), s, max)
}

pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h = h.rem_euclid(360.0) / 60.0;
    let sector = (h.floor() as i32).rem_euclid(6);
    let f = h - h.floor();
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match sector {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [r, g, b].map(|c| (c * 255.0).round().clamp(0.0, 255.0) as u8)
}

/// Replace the hue of every pixel with `target_hue` plus a seeded jitter,
/// scale saturation by a seeded factor and keep the value channel.
pub fn recolor_texture(texture: &RgbImage, target_hue: f64, jitter_seed: u64, palette: &PaletteSpec) -> RgbImage {
    let mut rng = seed::rng(jitter_seed, seed::tags::PALETTE, 0);
    let jitter = if palette.hue_jitter > 0.0 {
        rng.random_range(-palette.hue_jitter..=palette.hue_jitter)
    } else {
        0.0
    };
    let [lo, hi] = palette.saturation_scale;
    let sat_scale = if hi > lo { rng.random_range(lo..=hi) } else { lo };
    let hue = (target_hue + jitter).rem_euclid(360.0);
    let mut out = texture.clone();
    for px in out.pixels_mut() {
        let (_, s, v) = rgb_to_hsv(px.0);
        let s = (s.max(palette.min_saturation) * sat_scale).clamp(0.0, 1.0);
        px.0 = hsv_to_rgb(hue, s, v);
    }
    out
}
