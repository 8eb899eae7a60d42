use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Subcommand, ValueEnum};
use clinsynth::annotate::FrameAnnotation;
use clinsynth::assets::load_rgb;
use clinsynth::augment::{green_channel_aug, mosaic, GreenChannelConfig, LabeledBox, LabeledImage, MosaicConfig};
use clinsynth::dataset_eval::{DatasetManifest, ManifestEntry, Rect, Split};
use clinsynth::scene::Mode;
use clinsynth::seed::{self, tags};
use rand::Rng;
use rayon::prelude::*;

use crate::composite::write_pretty;
use crate::generate::parse_split;
use crate::{OutArgs, SeedArgs, ThreadArgs};

#[derive(Subcommand, Debug)]
pub enum AugmentCommand {
    /// Four-image mosaic with transformed labels.
    Mosaic(MosaicArgs),
    /// Seeded gain on the green channel.
    Green(GreenArgs),
}

#[derive(Args, Debug)]
pub struct MosaicArgs {
    /// Exactly four images. Labels come from `--labels` or a sibling
    /// annotation (`x.rgb.png` → `x.json`, `x.png` → `x.json`).
    #[arg(long, value_delimiter = ',', conflicts_with = "manifest")]
    pub images: Vec<PathBuf>,
    /// Label files matching `--images`.
    #[arg(long, value_delimiter = ',')]
    pub labels: Vec<PathBuf>,
    /// Batch mode: draw inputs from this manifest instead.
    #[arg(long, env = "CLINSYNTH_MANIFEST")]
    pub manifest: Option<PathBuf>,
    #[arg(long, default_value = "train", value_parser = parse_split)]
    pub split: Split,
    /// Mosaics to produce in batch mode.
    #[arg(long, env = "CLINSYNTH_COUNT", default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = MosaicConfig::default().alpha)]
    pub alpha: f64,
    #[arg(long, default_value_t = MosaicConfig::default().beta)]
    pub beta: f64,
    #[arg(long, default_value_t = MosaicConfig::default().width)]
    pub width: u32,
    #[arg(long, default_value_t = MosaicConfig::default().height)]
    pub height: u32,
    #[command(flatten)]
    pub out: OutArgs,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Targets {
    /// Every entry.
    All,
    /// Greenscreen (MR) entries only.
    Mr,
    /// Everything except MR entries.
    Synthetic,
}

impl Targets {
    fn selects(self, mode: Mode) -> bool {
        match self {
            Targets::All => true,
            Targets::Mr => mode == Mode::Mr,
            Targets::Synthetic => mode != Mode::Mr,
        }
    }
}

#[derive(Args, Debug)]
pub struct GreenArgs {
    /// Input manifest; its files are copied to `--out` with the RGB of the
    /// targeted entries augmented.
    #[arg(long, env = "CLINSYNTH_MANIFEST")]
    pub manifest: PathBuf,
    /// Which entries get the augmentation.
    #[arg(long, value_enum)]
    pub targets: Targets,
    #[arg(long, default_value_t = GreenChannelConfig::default().probability)]
    pub probability: f64,
    #[arg(long, default_value_t = GreenChannelConfig::default().factor_range[0])]
    pub factor_min: f64,
    #[arg(long, default_value_t = GreenChannelConfig::default().factor_range[1])]
    pub factor_max: f64,
    #[command(flatten)]
    pub out: OutArgs,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
}

pub fn run(cmd: AugmentCommand) -> anyhow::Result<()> {
    match cmd {
        AugmentCommand::Mosaic(a) => run_mosaic(a),
        AugmentCommand::Green(a) => run_green(a),
    }
}

/// Boxes from a frame annotation or from a plain list of labeled boxes.
pub fn load_labels(path: &Path) -> anyhow::Result<Vec<LabeledBox>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(frame) = serde_json::from_str::<FrameAnnotation>(&text) {
        return Ok(frame
            .objects
            .iter()
            .map(|o| LabeledBox {
                class_id: o.class_id,
                bbox: Rect::from(o.bbox),
            })
            .collect());
    }
    serde_json::from_str(&text).with_context(|| format!("parsing labels {}", path.display()))
}

fn sibling_labels(image: &Path) -> PathBuf {
    let name = image.file_name().unwrap_or_default().to_string_lossy();
    let stem = name.strip_suffix(".rgb.png").or_else(|| name.strip_suffix(".png")).unwrap_or(&name);
    image.with_file_name(format!("{stem}.json"))
}

fn write_mosaic(
    inputs: &[LabeledImage],
    cfg: &MosaicConfig,
    seed_value: u64,
    out: &Path,
    stem: &str,
) -> anyhow::Result<BTreeMap<String, String>> {
    let m = mosaic(inputs, cfg, seed_value)?;
    let rgb = format!("{stem}.png");
    let labels = format!("{stem}.labels.json");
    m.image.save(out.join(&rgb)).with_context(|| format!("writing {rgb}"))?;
    write_pretty(&out.join(&labels), &m.boxes)?;
    Ok(BTreeMap::from([("rgb".to_string(), rgb), ("labels".to_string(), labels)]))
}

fn run_mosaic(args: MosaicArgs) -> anyhow::Result<()> {
    let cfg = MosaicConfig {
        alpha: args.alpha,
        beta: args.beta,
        width: args.width,
        height: args.height,
    };
    cfg.validate()?;
    let out = &args.out.out;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let Some(manifest_path) = &args.manifest else {
        if args.images.len() != 4 {
            bail!("mosaic needs exactly 4 images, got {}", args.images.len());
        }
        if !args.labels.is_empty() && args.labels.len() != 4 {
            bail!("--labels must list 4 files, got {}", args.labels.len());
        }
        let inputs = args
            .images
            .iter()
            .enumerate()
            .map(|(k, img)| {
                let labels = args.labels.get(k).cloned().unwrap_or_else(|| sibling_labels(img));
                Ok(LabeledImage {
                    image: load_rgb(img)?,
                    boxes: load_labels(&labels)?,
                })
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        write_mosaic(&inputs, &cfg, args.seed.seed, out, "mosaic")?;
        eprintln!("wrote mosaic into {}", out.display());
        return Ok(());
    };

    let manifest = DatasetManifest::load(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let pool_entries: Vec<&ManifestEntry> = manifest.entries_in(args.split).collect();
    if pool_entries.is_empty() {
        bail!("manifest has no {} entries", args.split.title());
    }
    let pool = args.threads.pool()?;
    let entries = pool.install(|| {
        (0..args.count)
            .into_par_iter()
            .map(|i| -> anyhow::Result<ManifestEntry> {
                let seed_i = seed::derive(args.seed.seed, tags::MOSAIC, i as u64);
                let mut rng = seed::rng(seed_i, tags::MOSAIC, 1);
                let chosen: Vec<&ManifestEntry> =
                    (0..4).map(|_| pool_entries[rng.random_range(0..pool_entries.len())]).collect();
                let inputs = chosen
                    .iter()
                    .map(|e| {
                        let rgb = e.files.get("rgb").with_context(|| format!("entry {} has no rgb file", e.frame))?;
                        let labels = e
                            .files
                            .get("annotation")
                            .or_else(|| e.files.get("labels"))
                            .with_context(|| format!("entry {} has no labels", e.frame))?;
                        Ok(LabeledImage {
                            image: load_rgb(&base.join(rgb))?,
                            boxes: load_labels(&base.join(labels))?,
                        })
                    })
                    .collect::<anyhow::Result<Vec<_>>>()?;
                let stem = format!("mosaic_{i:06}");
                let files = write_mosaic(&inputs, &cfg, seed_i, out, &stem)?;
                Ok(ManifestEntry {
                    frame: stem,
                    frame_index: Some(i as u64),
                    split: args.split,
                    mode: chosen[0].mode,
                    group: None,
                    files,
                })
            })
            .collect::<anyhow::Result<Vec<_>>>()
    })?;
    let mut augmented = DatasetManifest::new(format!("{}_mosaic", manifest.name));
    augmented.entries = entries;
    augmented.save(&out.join("manifest.json"))?;
    eprintln!("wrote {} mosaics into {}", args.count, out.display());
    Ok(())
}

fn run_green(args: GreenArgs) -> anyhow::Result<()> {
    let range = [args.factor_min, args.factor_max];
    let manifest = DatasetManifest::load(&args.manifest)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let out = &args.out.out;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let pool = args.threads.pool()?;
    let augmented = pool.install(|| {
        manifest
            .entries
            .par_iter()
            .enumerate()
            .map(|(i, e)| -> anyhow::Result<bool> {
                let target = args.targets.selects(e.mode);
                for (role, rel) in &e.files {
                    let (src, dst) = (base.join(rel), out.join(rel));
                    if let Some(dir) = dst.parent() {
                        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                    }
                    if target && role == "rgb" {
                        let img = load_rgb(&src)?;
                        let seed_i = seed::derive(args.seed.seed, tags::GREEN, i as u64);
                        green_channel_aug(&img, seed_i, args.probability, range)?
                            .save(&dst)
                            .with_context(|| format!("writing {}", dst.display()))?;
                    } else {
                        std::fs::copy(&src, &dst).with_context(|| format!("copying {}", src.display()))?;
                    }
                }
                Ok(target)
            })
            .collect::<anyhow::Result<Vec<_>>>()
    })?;
    manifest.save(&out.join("manifest.json"))?;
    eprintln!(
        "green-channel augmentation applied to {} of {} entries",
        augmented.iter().filter(|&&t| t).count(),
        augmented.len()
    );
    Ok(())
}
