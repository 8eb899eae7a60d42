use image::RgbImage;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed::{self, tags};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GreenChannelConfig {
    pub probability: f64,
    pub factor_range: [f64; 2],
}

impl Default for GreenChannelConfig {
    fn default() -> Self {
        GreenChannelConfig {
            probability: 0.5,
            factor_range: [0.6, 1.4],
        }
    }
}

/// With probability `p`, multiply every green value by one factor drawn
/// uniformly from `[lo, hi]`, rounding and clamping to 8 bits. Red and blue
/// are never touched.
pub fn green_channel_aug(image: &RgbImage, seed: u64, p: f64, [lo, hi]: [f64; 2]) -> Result<RgbImage> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Range { what: "green augmentation probability", value: p });
    }
    if !(lo <= hi) || lo < 0.0 {
        return Err(Error::Range { what: "green augmentation factor lower bound", value: lo });
    }
    let mut rng = seed::rng(seed, tags::GREEN, 0);
    if !rng.random_bool(p) {
        return Ok(image.clone());
    }
    let factor = if hi > lo { rng.random_range(lo..=hi) } else { lo };
    let mut out = image.clone();
    if factor == 1.0 {
        return Ok(out);
    }
    for px in out.pixels_mut() {
        px.0[1] = (px.0[1] as f64 * factor).round().clamp(0.0, 255.0) as u8;
    }
    Ok(out)
}
