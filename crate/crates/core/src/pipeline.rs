//! Frame generator: compose, skin, rasterize, annotate and write one frame.

use std::collections::BTreeMap;
use std::path::Path;

use crate::annotate::{annotate_frame, export_frame, FrameAnnotation};
use crate::assets::AssetStore;
use crate::dataset_eval::{ManifestEntry, Split};
use crate::render::{build_instances, rasterize, FrameBuffers};
use crate::scene::{compose, Environment, FrameSpec, RandomizationConfig};
use crate::Result;

/// Everything produced for one frame before it touches the disk.
#[derive(Debug, Clone)]
pub struct RenderedFrame {
    pub spec: FrameSpec,
    pub buffers: FrameBuffers,
    pub annotation: FrameAnnotation,
}

/// Loaded config plus assets, shared read-only by all worker threads.
pub struct Generator {
    config: RandomizationConfig,
    assets: AssetStore,
    master_seed: u64,
}

impl Generator {
    pub fn new(config: RandomizationConfig, assets: AssetStore, master_seed: u64) -> Self {
        Generator {
            config,
            assets,
            master_seed,
        }
    }

    /// Load the config at `path` and every asset it references.
    pub fn load(path: &Path, master_seed: u64) -> Result<Self> {
        let config = RandomizationConfig::load(path)?;
        let assets = AssetStore::load(&config)?;
        Ok(Self::new(config, assets, master_seed))
    }

    pub fn config(&self) -> &RandomizationConfig {
        &self.config
    }

    pub fn assets(&self) -> &AssetStore {
        &self.assets
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn compose(&self, frame_index: u64) -> Result<FrameSpec> {
        compose(&self.config, frame_index, self.master_seed)
    }

    /// Render an already composed frame.
    pub fn render_spec(&self, spec: FrameSpec) -> Result<RenderedFrame> {
        let settings = &self.config.file.render;
        let instances = build_instances(&spec, &self.assets, settings)?;
        let background = match &spec.environment {
            Environment::Backdrop { background } => Some(self.assets.texture(background)?),
            Environment::Room { .. } => None,
        };
        let buffers = rasterize(&instances, &spec, background.as_deref(), settings.near_plane)?;
        let annotation = annotate_frame(&buffers, &spec, settings.min_visibility)?;
        Ok(RenderedFrame {
            spec,
            buffers,
            annotation,
        })
    }

    pub fn render(&self, frame_index: u64) -> Result<RenderedFrame> {
        self.render_spec(self.compose(frame_index)?)
    }

    /// Write the four rasters and the annotation into `root/{split}/` and
    /// return the manifest entry with paths relative to `root`.
    pub fn write(&self, frame: &RenderedFrame, root: &Path, split: Split) -> Result<ManifestEntry> {
        let index = frame.spec.frame_index;
        let dir = root.join(split.as_str());
        frame.buffers.write_pngs(&dir, index)?;
        let stem = format!("{index:06}");
        export_frame(&frame.annotation, &dir.join(format!("{stem}.json")))?;
        let rel = |suffix: &str| format!("{}/{stem}{suffix}", split.as_str());
        let files: BTreeMap<String, String> = [
            ("rgb", rel(".rgb.png")),
            ("depth", rel(".depth.png")),
            ("cls", rel(".cls.png")),
            ("inst", rel(".inst.png")),
            ("annotation", rel(".json")),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        // Frames of one character share a group so grouped splits keep them together.
        let character = index / self.config.frames_per_character() as u64;
        Ok(ManifestEntry {
            frame: rel(""),
            frame_index: Some(index),
            split,
            mode: frame.spec.mode,
            group: Some(format!("character_{character}")),
            files,
        })
    }

    pub fn generate(&self, frame_index: u64, root: &Path, split: Split) -> Result<ManifestEntry> {
        let frame = self.render(frame_index)?;
        self.write(&frame, root, split)
    }
}
