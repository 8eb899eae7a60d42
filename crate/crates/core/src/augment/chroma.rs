use image::{imageops, GrayImage, RgbImage};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChromaKeyConfig {
    /// Green must exceed both red and blue by this factor.
    pub dominance: f64,
    pub min_green: u8,
    /// Width in pixels of the blend band around keyed regions.
    pub softness: u32,
}

impl Default for ChromaKeyConfig {
    fn default() -> Self {
        ChromaKeyConfig {
            dominance: 1.15,
            min_green: 80,
            softness: 0,
        }
    }
}

impl ChromaKeyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dominance > 1.0) {
            return Err(Error::Range { what: "chroma dominance ratio", value: self.dominance });
        }
        Ok(())
    }

    pub fn is_screen(&self, [r, g, b]: [u8; 3]) -> bool {
        let g64 = g as f64;
        g64 > self.dominance * r as f64 && g64 > self.dominance * b as f64 && g >= self.min_green
    }
}

/// 255 where the foreground shows the screen.
pub fn key_mask(foreground: &RgbImage, cfg: &ChromaKeyConfig) -> GrayImage {
    GrayImage::from_fn(foreground.width(), foreground.height(), |x, y| {
        image::Luma([if cfg.is_screen(foreground.get_pixel(x, y).0) { 255 } else { 0 }])
    })
}

/// Chessboard distance of every pixel to the nearest keyed pixel, saturating
/// at `cap`.
fn key_distance(mask: &GrayImage, cap: u32) -> Vec<u32> {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let mut d: Vec<u32> = mask.as_raw().iter().map(|&m| if m != 0 { 0 } else { cap }).collect();
    let at = |x: usize, y: usize| y * w + x;
    for y in 0..h {
        for x in 0..w {
            let mut v = d[at(x, y)];
            if x > 0 {
                v = v.min(d[at(x - 1, y)] + 1);
            }
            if y > 0 {
                v = v.min(d[at(x, y - 1)] + 1);
                if x > 0 {
                    v = v.min(d[at(x - 1, y - 1)] + 1);
                }
                if x + 1 < w {
                    v = v.min(d[at(x + 1, y - 1)] + 1);
                }
            }
            d[at(x, y)] = v.min(cap);
        }
    }
    for y in (0..h).rev() {
        for x in (0..w).rev() {
            let mut v = d[at(x, y)];
            if x + 1 < w {
                v = v.min(d[at(x + 1, y)] + 1);
            }
            if y + 1 < h {
                v = v.min(d[at(x, y + 1)] + 1);
                if x + 1 < w {
                    v = v.min(d[at(x + 1, y + 1)] + 1);
                }
                if x > 0 {
                    v = v.min(d[at(x - 1, y + 1)] + 1);
                }
            }
            d[at(x, y)] = v.min(cap);
        }
    }
    d
}

/// Replace screen pixels of `foreground` by `background` (resampled to the
/// foreground size when needed). Unkeyed pixels within `softness` pixels of
/// a keyed one blend toward the background with weight
/// `1 - d / (softness + 1)`.
pub fn chroma_composite(foreground: &RgbImage, background: &RgbImage, cfg: &ChromaKeyConfig) -> Result<RgbImage> {
    cfg.validate()?;
    let (w, h) = foreground.dimensions();
    let resized;
    let bg = if background.dimensions() == (w, h) {
        background
    } else {
        resized = imageops::resize(background, w, h, imageops::FilterType::Triangle);
        &resized
    };
    let mask = key_mask(foreground, cfg);
    let cap = cfg.softness + 1;
    let dist = if cfg.softness > 0 {
        key_distance(&mask, cap)
    } else {
        mask.as_raw().iter().map(|&m| if m != 0 { 0 } else { cap }).collect()
    };
    let mut out = foreground.clone();
    for (i, (px, d)) in out.pixels_mut().zip(dist).enumerate() {
        if d >= cap {
            continue;
        }
        let b = bg.as_raw()[i * 3..i * 3 + 3].try_into().expect("rgb triple");
        if d == 0 {
            px.0 = b;
            continue;
        }
        let a = 1.0 - d as f64 / cap as f64;
        let f = px.0;
        px.0 = std::array::from_fn(|k| (f[k] as f64 * (1.0 - a) + b[k] as f64 * a).round() as u8);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_green_half_grey() {
        let fg = RgbImage::from_fn(8, 4, |x, _| image::Rgb(if x < 4 { [0, 255, 0] } else { [128, 128, 128] }));
        let bg = RgbImage::from_fn(8, 4, |x, y| image::Rgb([x as u8 * 10, y as u8 * 20, 77]));
        let out = chroma_composite(&fg, &bg, &ChromaKeyConfig::default()).unwrap();
        for (x, y, p) in out.enumerate_pixels() {
            let expect = if x < 4 { bg.get_pixel(x, y) } else { fg.get_pixel(x, y) };
            assert_eq!(p, expect);
        }
    }

    #[test]
    fn softness_blends_next_to_the_key() {
        let fg = RgbImage::from_fn(6, 1, |x, _| image::Rgb(if x == 0 { [0, 255, 0] } else { [100, 100, 100] }));
        let bg = RgbImage::from_pixel(6, 1, image::Rgb([200, 200, 200]));
        let cfg = ChromaKeyConfig { softness: 2, ..Default::default() };
        let out = chroma_composite(&fg, &bg, &cfg).unwrap();
        let row: Vec<u8> = out.pixels().map(|p| p.0[0]).collect();
        // Weights 1, 2/3, 1/3, 0.
        assert_eq!(row, [200, 167, 133, 100, 100, 100]);
    }

    #[test]
    fn background_is_resampled() {
        let fg = RgbImage::from_pixel(4, 4, image::Rgb([0, 255, 0]));
        let bg = RgbImage::from_pixel(2, 2, image::Rgb([9, 8, 7]));
        let out = chroma_composite(&fg, &bg, &ChromaKeyConfig::default()).unwrap();
        assert!(out.pixels().all(|p| p.0 == [9, 8, 7]));
    }
}
