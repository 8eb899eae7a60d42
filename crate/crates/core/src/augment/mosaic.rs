use image::RgbImage;
use rand::Rng;
use rand_distr::Beta;
use serde::{Deserialize, Serialize};

use crate::dataset_eval::Rect;
use crate::seed::{self, tags};
use crate::{Error, Result};

/// Boxes narrower or shorter than this after clipping are dropped.
pub const MIN_BOX_SIDE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MosaicConfig {
    /// Beta distribution parameters of the mosaic centre.
    pub alpha: f64,
    pub beta: f64,
    pub width: u32,
    pub height: u32,
}

impl Default for MosaicConfig {
    fn default() -> Self {
        MosaicConfig {
            alpha: 20.0,
            beta: 20.0,
            width: 896,
            height: 896,
        }
    }
}

impl MosaicConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::Range { what: "mosaic alpha", value: self.alpha });
        }
        if !(self.beta > 0.0) {
            return Err(Error::Range { what: "mosaic beta", value: self.beta });
        }
        if self.width < 2 || self.height < 2 {
            return Err(Error::Config(format!("mosaic size {}x{} is too small", self.width, self.height)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledBox {
    pub class_id: u8,
    pub bbox: Rect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledImage {
    pub image: RgbImage,
    pub boxes: Vec<LabeledBox>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MosaicOutput {
    pub image: RgbImage,
    pub boxes: Vec<LabeledBox>,
    /// Centre as fractions of the output size.
    pub center: [f64; 2],
}

/// Mosaic centre as fractions of the output size, one Beta draw per axis.
pub fn mosaic_center(cfg: &MosaicConfig, seed: u64) -> Result<[f64; 2]> {
    cfg.validate()?;
    let dist = Beta::new(cfg.alpha, cfg.beta).map_err(|_| Error::Range { what: "mosaic alpha", value: cfg.alpha })?;
    let mut rng = seed::rng(seed, tags::MOSAIC, 0);
    Ok([rng.sample(dist), rng.sample(dist)])
}

fn sample_clamped(img: &RgbImage, u: f64, v: f64) -> [u8; 3] {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let (x0, y0) = (u.floor(), v.floor());
    let (fx, fy) = (u - x0, v - y0);
    let px = |x: i64, y: i64| img.get_pixel(x.clamp(0, w - 1) as u32, y.clamp(0, h - 1) as u32).0;
    let (x0, y0) = (x0 as i64, y0 as i64);
    let (a, b, c, d) = (px(x0, y0), px(x0 + 1, y0), px(x0, y0 + 1), px(x0 + 1, y0 + 1));
    std::array::from_fn(|k| {
        let top = a[k] as f64 * (1.0 - fx) + b[k] as f64 * fx;
        let bottom = c[k] as f64 * (1.0 - fx) + d[k] as f64 * fx;
        (top * (1.0 - fy) + bottom * fy).round().clamp(0.0, 255.0) as u8
    })
}

/// Four-image mosaic around a Beta-distributed centre.
///
/// Quadrants are top-left, top-right, bottom-left, bottom-right in input
/// order. Each image is scaled uniformly to cover its quadrant with the
/// corner nearest the centre pinned to the centre; boxes follow the same
/// affine map, are clipped to the quadrant and dropped below
/// [`MIN_BOX_SIDE`] pixels in either dimension.
pub fn mosaic(inputs: &[LabeledImage], cfg: &MosaicConfig, seed: u64) -> Result<MosaicOutput> {
    if inputs.len() != 4 {
        return Err(Error::Arity { expected: 4, got: inputs.len() });
    }
    if let Some(i) = inputs.iter().position(|i| i.image.width() == 0 || i.image.height() == 0) {
        return Err(Error::Validation(format!("mosaic input {i} is empty")));
    }
    let center = mosaic_center(cfg, seed)?;
    let (w, h) = (cfg.width, cfg.height);
    let xc = ((center[0] * w as f64).round() as u32).clamp(1, w - 1);
    let yc = ((center[1] * h as f64).round() as u32).clamp(1, h - 1);

    let mut image = RgbImage::new(w, h);
    let mut boxes = Vec::new();
    for (q, input) in inputs.iter().enumerate() {
        let (right, bottom) = (q % 2 == 1, q >= 2);
        let (qx0, qx1) = if right { (xc, w) } else { (0, xc) };
        let (qy0, qy1) = if bottom { (yc, h) } else { (0, yc) };
        let (iw, ih) = (input.image.width() as f64, input.image.height() as f64);
        let s = ((qx1 - qx0) as f64 / iw).max((qy1 - qy0) as f64 / ih);
        let ox = if right { xc as f64 } else { xc as f64 - iw * s };
        let oy = if bottom { yc as f64 } else { yc as f64 - ih * s };
        for y in qy0..qy1 {
            let v = (y as f64 + 0.5 - oy) / s - 0.5;
            for x in qx0..qx1 {
                let u = (x as f64 + 0.5 - ox) / s - 0.5;
                image.put_pixel(x, y, image::Rgb(sample_clamped(&input.image, u, v)));
            }
        }
        for b in &input.boxes {
            let r = Rect::new(
                (ox + b.bbox.x_min * s).max(qx0 as f64),
                (oy + b.bbox.y_min * s).max(qy0 as f64),
                (ox + b.bbox.x_max * s).min(qx1 as f64),
                (oy + b.bbox.y_max * s).min(qy1 as f64),
            );
            if r.x_max - r.x_min >= MIN_BOX_SIDE && r.y_max - r.y_min >= MIN_BOX_SIDE {
                boxes.push(LabeledBox { class_id: b.class_id, bbox: r });
            }
        }
    }
    Ok(MosaicOutput { image, boxes, center })
}
