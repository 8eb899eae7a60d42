use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use clinsynth::assets::load_rgb;
use clinsynth::augment::{chroma_composite, ChromaKeyConfig};
use clinsynth::dataset_eval::{DatasetManifest, ManifestEntry, Split};
use clinsynth::scene::Mode;
use clinsynth::seed::{self, tags};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{OutArgs, SeedArgs, ThreadArgs};

#[derive(Args, Debug)]
pub struct CompositeArgs {
    /// Directory of greenscreen frames (PNG). A sibling `{stem}.json` or
    /// `{stem}.txt` label file is copied through unchanged.
    #[arg(long, env = "CLINSYNTH_FOREGROUND")]
    pub foreground: PathBuf,
    /// Directory of background images (PNG).
    #[arg(long, env = "CLINSYNTH_BACKGROUNDS")]
    pub backgrounds: PathBuf,
    #[command(flatten)]
    pub out: OutArgs,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
    /// Green must exceed red and blue by this factor.
    #[arg(long, env = "CLINSYNTH_DOMINANCE", default_value_t = ChromaKeyConfig::default().dominance)]
    pub dominance: f64,
    #[arg(long, env = "CLINSYNTH_MIN_GREEN", default_value_t = ChromaKeyConfig::default().min_green)]
    pub min_green: u8,
    /// Blend band width in pixels.
    #[arg(long, env = "CLINSYNTH_SOFTNESS", default_value_t = ChromaKeyConfig::default().softness)]
    pub softness: u32,
    #[arg(long, env = "CLINSYNTH_NAME", default_value = "mixed_reality")]
    pub name: String,
}

/// Sorted PNG files directly inside `dir`.
pub fn png_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png")) && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Serialize)]
struct Pairing {
    foreground: String,
    background: String,
}

pub fn run(args: CompositeArgs) -> anyhow::Result<()> {
    let cfg = ChromaKeyConfig {
        dominance: args.dominance,
        min_green: args.min_green,
        softness: args.softness,
    };
    cfg.validate()?;
    let foregrounds = png_files(&args.foreground)?;
    let backgrounds = png_files(&args.backgrounds)?;
    if foregrounds.is_empty() {
        bail!("configuration error: no PNG foregrounds in {}", args.foreground.display());
    }
    if backgrounds.is_empty() {
        bail!("configuration error: no PNG backgrounds in {}", args.backgrounds.display());
    }
    let out = &args.out.out;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let pool = args.threads.pool()?;
    let results = pool.install(|| {
        foregrounds
            .par_iter()
            .enumerate()
            .map(|(i, fg_path)| -> anyhow::Result<(Pairing, ManifestEntry)> {
                let pick = seed::rng(args.seed.seed, tags::COMPOSITE, i as u64).random_range(0..backgrounds.len());
                let bg_path = &backgrounds[pick];
                let fg = load_rgb(fg_path)?;
                let bg = load_rgb(bg_path)?;
                let composed = chroma_composite(&fg, &bg, &cfg)?;
                let name = stem(fg_path);
                let rgb = format!("{name}.png");
                composed.save(out.join(&rgb)).with_context(|| format!("writing {rgb}"))?;
                let mut files = BTreeMap::from([("rgb".to_string(), rgb)]);
                for (ext, role) in [("json", "annotation"), ("txt", "labels")] {
                    let label = fg_path.with_extension(ext);
                    if label.is_file() {
                        let target = format!("{name}.{ext}");
                        std::fs::copy(&label, out.join(&target)).with_context(|| format!("copying {}", label.display()))?;
                        files.insert(role.to_string(), target);
                    }
                }
                // `person03_0001` belongs to person `person03`.
                let group = name.split_once('_').map(|(p, _)| p.to_string());
                let entry = ManifestEntry {
                    frame: name,
                    frame_index: Some(i as u64),
                    split: Split::Train,
                    mode: Mode::Mr,
                    group,
                    files,
                };
                let pairing = Pairing {
                    foreground: fg_path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                    background: bg_path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                };
                Ok((pairing, entry))
            })
            .collect::<anyhow::Result<Vec<_>>>()
    })?;

    let (pairings, entries): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let mut manifest = DatasetManifest::new(&args.name);
    manifest.entries = entries;
    manifest.validate()?;
    manifest.save(&out.join("manifest.json"))?;
    write_pretty(&out.join("pairings.json"), &pairings)?;
    eprintln!("composited {} frames into {}", pairings.len(), out.display());
    Ok(())
}

pub fn write_pretty<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}
