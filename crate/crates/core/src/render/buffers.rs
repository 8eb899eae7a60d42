use std::path::{Path, PathBuf};

use image::{GrayImage, ImageBuffer, Luma, RgbImage};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, BACKGROUND_CLASS};

pub type Gray16Image = ImageBuffer<Luma<u16>, Vec<u16>>;

/// Per-instance bookkeeping produced alongside the rasters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub instance_id: u16,
    pub class_id: u8,
    /// Character index for body and worn garments.
    pub group: Option<u16>,
    pub origin: [f64; 3],
    /// Pixels the instance covers when rendered alone.
    pub solo_pixels: u32,
}

/// Output rasters of one frame. Depth is in millimetres (0 = no hit); class
/// 255 and instance 0 mark background.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameBuffers {
    pub rgb: RgbImage,
    pub depth: Gray16Image,
    pub class_seg: GrayImage,
    pub instance_seg: Gray16Image,
    pub instances: Vec<InstanceInfo>,
    /// Pixels covered by each character group rendered alone, indexed by group.
    pub group_solo_pixels: Vec<u32>,
}

impl FrameBuffers {
    pub fn width(&self) -> u32 {
        self.rgb.width()
    }

    pub fn height(&self) -> u32 {
        self.rgb.height()
    }

    /// Check dimensions and the depth / class / instance sentinel coupling.
    pub fn check_coupling(&self) -> Result<()> {
        let dims = self.rgb.dimensions();
        if self.depth.dimensions() != dims || self.class_seg.dimensions() != dims || self.instance_seg.dimensions() != dims {
            return Err(Error::Consistency("frame buffers differ in size".into()));
        }
        for (i, ((d, c), n)) in self
            .depth
            .as_raw()
            .iter()
            .zip(self.class_seg.as_raw())
            .zip(self.instance_seg.as_raw())
            .enumerate()
        {
            let hits = [*d != 0, *c != BACKGROUND_CLASS, *n != 0];
            if hits[0] != hits[1] || hits[1] != hits[2] {
                return Err(Error::Consistency(format!(
                    "pixel {i}: depth {d}, class {c}, instance {n} disagree"
                )));
            }
        }
        Ok(())
    }

    /// File names `{frame:06}.{rgb|depth|cls|inst}.png` inside `dir`.
    pub fn file_paths(dir: &Path, frame_index: u64) -> [PathBuf; 4] {
        ["rgb", "depth", "cls", "inst"].map(|k| dir.join(format!("{frame_index:06}.{k}.png")))
    }

    pub fn write_pngs(&self, dir: &Path, frame_index: u64) -> Result<[PathBuf; 4]> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let paths = Self::file_paths(dir, frame_index);
        self.rgb.save(&paths[0]).map_err(|e| Error::image(&paths[0], e))?;
        self.depth.save(&paths[1]).map_err(|e| Error::image(&paths[1], e))?;
        self.class_seg.save(&paths[2]).map_err(|e| Error::image(&paths[2], e))?;
        self.instance_seg.save(&paths[3]).map_err(|e| Error::image(&paths[3], e))?;
        Ok(paths)
    }

    /// Read the four rasters back. Instance bookkeeping is not stored in the
    /// PNGs and comes back empty.
    pub fn read_pngs(dir: &Path, frame_index: u64) -> Result<Self> {
        let paths = Self::file_paths(dir, frame_index);
        let open = |p: &PathBuf| image::open(p).map_err(|e| Error::image(p, e));
        Ok(FrameBuffers {
            rgb: open(&paths[0])?.to_rgb8(),
            depth: open(&paths[1])?.to_luma16(),
            class_seg: open(&paths[2])?.to_luma8(),
            instance_seg: open(&paths[3])?.to_luma16(),
            instances: Vec::new(),
            group_solo_pixels: Vec::new(),
        })
    }
}
