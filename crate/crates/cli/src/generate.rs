use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::Args;
use clinsynth::annotate::{export_manifest, load_frame, ManifestFormat};
use clinsynth::dataset_eval::{DatasetManifest, Split};
use clinsynth::pipeline::Generator;
use rayon::prelude::*;

use crate::{IndexFormat, OutArgs, SeedArgs, ThreadArgs};

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Randomization config (JSON).
    #[arg(long, env = "CLINSYNTH_CONFIG")]
    pub config: PathBuf,
    #[command(flatten)]
    pub out: OutArgs,
    #[command(flatten)]
    pub seed: SeedArgs,
    /// Frames to render.
    #[arg(long, env = "CLINSYNTH_COUNT")]
    pub count: usize,
    #[command(flatten)]
    pub threads: ThreadArgs,
    /// Split the new frames are written to.
    #[arg(long, env = "CLINSYNTH_SPLIT", default_value = "train", value_parser = parse_split)]
    pub split: Split,
    /// First frame index; defaults to the next free index of an existing
    /// manifest in the output directory.
    #[arg(long, env = "CLINSYNTH_FIRST_INDEX")]
    pub first_index: Option<u64>,
    /// Dataset name stored in a new manifest.
    #[arg(long, env = "CLINSYNTH_NAME", default_value = "synthetic")]
    pub name: String,
    /// Also write `coco.json` next to the native manifest.
    #[arg(long, env = "CLINSYNTH_FORMAT", value_enum, default_value_t = IndexFormat::Native)]
    pub format: IndexFormat,
}

pub fn parse_split(s: &str) -> Result<Split, String> {
    Split::parse(s).ok_or_else(|| format!("unknown split '{s}' (train, val, test)"))
}

pub fn run(args: GenerateArgs) -> anyhow::Result<()> {
    if args.count == 0 {
        bail!("--count must be at least 1");
    }
    let out = &args.out.out;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let manifest_path = out.join("manifest.json");
    let mut manifest = if manifest_path.exists() {
        DatasetManifest::load(&manifest_path)?
    } else {
        DatasetManifest::new(&args.name)
    };
    let first = args.first_index.unwrap_or_else(|| manifest.next_frame_index());

    let generator = Generator::load(&args.config, args.seed.seed)?;
    let pool = args.threads.pool()?;
    let started = Instant::now();
    // Collecting an indexed parallel iterator keeps frame order.
    let entries = pool.install(|| {
        (first..first + args.count as u64)
            .into_par_iter()
            .map(|i| generator.generate(i, out, args.split).with_context(|| format!("frame {i}")))
            .collect::<anyhow::Result<Vec<_>>>()
    })?;
    let elapsed = started.elapsed().as_secs_f64();

    let mut batch = DatasetManifest::new(&manifest.name);
    batch.entries = entries;
    manifest.merge(batch)?;
    manifest.check_files(out)?;
    write_index(&manifest, out, args.format)?;
    eprintln!(
        "generated {} frames into {} ({:.2} frames/s)",
        args.count,
        out.display(),
        args.count as f64 / elapsed.max(1e-9)
    );
    Ok(())
}

/// Native manifest always; the COCO-like document on request.
pub fn write_index(manifest: &DatasetManifest, out: &Path, format: IndexFormat) -> anyhow::Result<()> {
    let frames = manifest
        .entries
        .iter()
        .filter_map(|e| e.files.get("annotation"))
        .map(|f| load_frame(&out.join(f)))
        .collect::<Result<Vec<_>, _>>()?;
    if frames.is_empty() {
        manifest.save(&out.join("manifest.json"))?;
        return Ok(());
    }
    export_manifest(manifest, &frames, ManifestFormat::Native, &out.join("manifest.json"))?;
    if format == IndexFormat::Coco {
        export_manifest(manifest, &frames, ManifestFormat::CocoLike, &out.join("coco.json"))?;
    }
    Ok(())
}
