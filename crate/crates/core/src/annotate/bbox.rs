use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::render::{FrameBuffers, Gray16Image};
use crate::{Error, Result};

/// Pixel box with exclusive max corner, serialized as `[xmin, ymin, xmax, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundingBox2D {
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
}

impl BoundingBox2D {
    pub fn new(x_min: u32, y_min: u32, x_max: u32, y_max: u32) -> Result<Self> {
        if x_min >= x_max || y_min >= y_max {
            return Err(Error::Validation(format!(
                "box [{x_min}, {y_min}, {x_max}, {y_max}] is empty or inverted"
            )));
        }
        Ok(BoundingBox2D { x_min, y_min, x_max, y_max })
    }

    pub fn width(&self) -> u32 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> u32 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    /// `[x, y, w, h]`.
    pub fn to_xywh(&self) -> [u32; 4] {
        [self.x_min, self.y_min, self.width(), self.height()]
    }

    pub fn contains(&self, other: &BoundingBox2D) -> bool {
        self.x_min <= other.x_min && self.y_min <= other.y_min && self.x_max >= other.x_max && self.y_max >= other.y_max
    }

    pub fn fits(&self, width: u32, height: u32) -> bool {
        self.x_max <= width && self.y_max <= height
    }

    pub(crate) fn include(acc: &mut Option<BoundingBox2D>, x: u32, y: u32) {
        match acc {
            None => *acc = Some(BoundingBox2D { x_min: x, y_min: y, x_max: x + 1, y_max: y + 1 }),
            Some(b) => {
                b.x_min = b.x_min.min(x);
                b.y_min = b.y_min.min(y);
                b.x_max = b.x_max.max(x + 1);
                b.y_max = b.y_max.max(y + 1);
            }
        }
    }

    pub(crate) fn union(a: Option<BoundingBox2D>, b: Option<BoundingBox2D>) -> Option<BoundingBox2D> {
        match (a, b) {
            (Some(a), Some(b)) => Some(BoundingBox2D {
                x_min: a.x_min.min(b.x_min),
                y_min: a.y_min.min(b.y_min),
                x_max: a.x_max.max(b.x_max),
                y_max: a.y_max.max(b.y_max),
            }),
            (a, None) => a,
            (None, b) => b,
        }
    }
}

impl Serialize for BoundingBox2D {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x_min, self.y_min, self.x_max, self.y_max].serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundingBox2D {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c, e] = <[u32; 4]>::deserialize(d)?;
        BoundingBox2D::new(a, b, c, e).map_err(serde::de::Error::custom)
    }
}

/// Tight bounds of the pixels equal to `instance_id`.
pub fn bbox_from_mask(instance_seg: &Gray16Image, instance_id: u16) -> Option<BoundingBox2D> {
    let mut acc = None;
    for (x, y, p) in instance_seg.enumerate_pixels() {
        if p.0[0] == instance_id {
            BoundingBox2D::include(&mut acc, x, y);
        }
    }
    acc
}

/// Pixel count and bounds for every instance id present in the buffer.
pub(crate) fn scan_instances(buffers: &FrameBuffers) -> Vec<(u32, Option<BoundingBox2D>)> {
    let mut stats = vec![(0u32, None); u16::MAX as usize + 1];
    let w = buffers.width();
    for (i, &id) in buffers.instance_seg.as_raw().iter().enumerate() {
        if id != 0 {
            let s = &mut stats[id as usize];
            s.0 += 1;
            BoundingBox2D::include(&mut s.1, i as u32 % w, i as u32 / w);
        }
    }
    stats
}
