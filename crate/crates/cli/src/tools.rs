use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use clinsynth::dataset_eval::{
    evaluate as run_eval, load_predictions, render_table, split as split_entries, DatasetManifest, EvalReport,
    EvalSettings, GroundTruth, Split, SplitSizes,
};
use clinsynth::fixtures::{write_demo_assets, DemoOptions, Resolution, SourceSelection};
use clinsynth::scene::{ImageSize, Mode};
use serde::Serialize;

use crate::composite::write_pretty;
use crate::generate::parse_split;
use crate::{OutArgs, SeedArgs};

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[arg(long, env = "CLINSYNTH_MANIFEST")]
    pub manifest: PathBuf,
    /// Output manifest path.
    #[arg(long, env = "CLINSYNTH_OUT")]
    pub out: PathBuf,
    /// Train, validation and test fractions.
    #[arg(long, value_delimiter = ',', conflicts_with = "counts")]
    pub ratios: Option<Vec<f64>>,
    /// Exact train, validation and test counts.
    #[arg(long, value_delimiter = ',')]
    pub counts: Option<Vec<usize>>,
    /// Keep entries with the same group key (e.g. recorded person) together.
    #[arg(long)]
    pub by_group: bool,
    #[command(flatten)]
    pub seed: SeedArgs,
}

pub fn split(args: SplitArgs) -> anyhow::Result<()> {
    let sizes = match (&args.ratios, &args.counts) {
        (Some(r), None) if r.len() != 3 => bail!("--ratios needs 3 values, got {}", r.len()),
        (None, Some(c)) if c.len() != 3 => bail!("--counts needs 3 values, got {}", c.len()),
        (Some(r), None) => SplitSizes::Ratios([r[0], r[1], r[2]]),
        (None, Some(c)) => SplitSizes::Counts([c[0], c[1], c[2]]),
        _ => bail!("give either --ratios or --counts"),
    };
    let manifest = DatasetManifest::load(&args.manifest)?;
    let result = split_entries(&manifest.name, manifest.entries, sizes, args.seed.seed, args.by_group)?;
    result.save(&args.out)?;
    let [tr, va, te] = result.counts();
    eprintln!("train {tr}, validation {va}, test {te}");
    Ok(())
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Manifest holding the ground-truth annotations.
    #[arg(long, env = "CLINSYNTH_MANIFEST")]
    pub manifest: PathBuf,
    /// Predictions (JSON lines); repeat for several experiments.
    #[arg(long, required = true)]
    pub predictions: Vec<PathBuf>,
    /// Row names for the predictions, in order; defaults to file stems.
    #[arg(long)]
    pub name: Vec<String>,
    #[arg(long, default_value = "test", value_parser = parse_split)]
    pub split: Split,
    #[arg(long, env = "CLINSYNTH_CONF_THRESHOLD", default_value_t = 0.2)]
    pub conf_threshold: f64,
    /// IoU threshold of the precision / recall operating point.
    #[arg(long, env = "CLINSYNTH_IOU_THRESHOLD", default_value_t = 0.5)]
    pub iou_threshold: f64,
    /// Also write the reports as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Serialize)]
struct NamedReport<'a> {
    name: &'a str,
    report: &'a EvalReport,
}

pub fn evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    if !(0.0..=1.0).contains(&args.conf_threshold) || !(0.0..=1.0).contains(&args.iou_threshold) {
        bail!("thresholds must lie in [0, 1]");
    }
    if !args.name.is_empty() && args.name.len() != args.predictions.len() {
        bail!("{} names for {} prediction files", args.name.len(), args.predictions.len());
    }
    let manifest = DatasetManifest::load(&args.manifest)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let gt = GroundTruth::from_manifest(&manifest, base, args.split)?;
    let settings = EvalSettings {
        conf_threshold: args.conf_threshold,
        pr_iou_threshold: args.iou_threshold,
        ..EvalSettings::default()
    };
    let mut reports = Vec::new();
    for (k, path) in args.predictions.iter().enumerate() {
        let name = args.name.get(k).cloned().unwrap_or_else(|| {
            path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        });
        let predictions = load_predictions(path)?;
        let report = run_eval(&gt, &predictions, &settings).with_context(|| format!("evaluating {}", path.display()))?;
        reports.push((name, report));
    }
    print!("{}", render_table(&reports));
    if let Some(json) = &args.json {
        let named: Vec<_> = reports.iter().map(|(name, report)| NamedReport { name, report }).collect();
        write_pretty(json, &named)?;
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// One row per manifest.
    #[arg(long, env = "CLINSYNTH_MANIFEST", required = true)]
    pub manifest: Vec<PathBuf>,
}

/// Per-split counts in the dataset-distribution layout; empty splits are `/`.
pub fn stats_table(rows: &[(String, [usize; 3])]) -> String {
    let cell = |n: usize| if n == 0 { "/".to_string() } else { n.to_string() };
    let name_w = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max("dataset name".len());
    let mut out = format!("{:<name_w$}  {:>8}  {:>10}  {:>8}\n", "dataset name", "train", "validation", "test");
    for (name, [tr, va, te]) in rows {
        out += &format!("{:<name_w$}  {:>8}  {:>10}  {:>8}\n", name, cell(*tr), cell(*va), cell(*te));
    }
    out
}

pub fn stats(args: StatsArgs) -> anyhow::Result<()> {
    let rows = args
        .manifest
        .iter()
        .map(|p| {
            let m = DatasetManifest::load(p)?;
            Ok((m.name.clone(), m.counts()))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    print!("{}", stats_table(&rows));
    Ok(())
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaffoldMode {
    Dr,
    Sdr,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sources {
    Scanned,
    Designed,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detail {
    Low,
    High,
}

#[derive(Args, Debug)]
pub struct ScaffoldArgs {
    #[command(flatten)]
    pub out: OutArgs,
    #[arg(long, value_enum, default_value_t = ScaffoldMode::Dr)]
    pub mode: ScaffoldMode,
    #[arg(long, value_enum, default_value_t = Sources::Both)]
    pub sources: Sources,
    /// Mesh tessellation; `high` gives roughly 10k-triangle scenes.
    #[arg(long, value_enum, default_value_t = Detail::High)]
    pub detail: Detail,
    #[arg(long, default_value_t = 896)]
    pub width: u32,
    #[arg(long, default_value_t = 896)]
    pub height: u32,
    #[command(flatten)]
    pub seed: SeedArgs,
}

pub fn scaffold(args: ScaffoldArgs) -> anyhow::Result<()> {
    let opts = DemoOptions {
        mode: match args.mode {
            ScaffoldMode::Dr => Mode::Dr,
            ScaffoldMode::Sdr => Mode::Sdr,
        },
        sources: match args.sources {
            Sources::Scanned => SourceSelection::Scanned,
            Sources::Designed => SourceSelection::Designed,
            Sources::Both => SourceSelection::Both,
        },
        resolution: match args.detail {
            Detail::Low => Resolution::LOW,
            Detail::High => Resolution::HIGH,
        },
        image: ImageSize {
            width: args.width,
            height: args.height,
        },
        seed: args.seed.seed,
        ..DemoOptions::default()
    };
    let config = write_demo_assets(&args.out.out, &opts)?;
    println!("{}", config.display());
    Ok(())
}
