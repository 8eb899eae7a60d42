use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metrics::{average_precision, match_detections, Rect};
use super::{DatasetManifest, Split};
use crate::annotate::load_frame;
use crate::{Error, Result, CLASS_NAMES, CLASS_TITLES};

/// One predicted box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub frame: String,
    pub class_id: u8,
    pub bbox: Rect,
    pub confidence: f64,
}

impl DetectionRecord {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::Validation(format!(
                "confidence {} of a detection in frame '{}' is outside [0, 1]",
                self.confidence, self.frame
            )));
        }
        if !self.bbox.is_valid() {
            return Err(Error::Validation(format!("invalid box in frame '{}'", self.frame)));
        }
        if self.class_id as usize >= CLASS_NAMES.len() {
            return Err(Error::Validation(format!("unknown class {} in frame '{}'", self.class_id, self.frame)));
        }
        Ok(())
    }
}

/// Read a JSON-lines predictions file.
pub fn load_predictions(path: &Path) -> Result<Vec<DetectionRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let d: DetectionRecord = serde_json::from_str(&line).map_err(|e| Error::json(path, e))?;
        d.validate()?;
        out.push(d);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GtBox {
    pub class_id: u8,
    pub bbox: Rect,
}

/// Ground truth boxes per frame reference.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    pub frames: BTreeMap<String, Vec<GtBox>>,
}

impl GroundTruth {
    pub fn insert(&mut self, frame: impl Into<String>, boxes: Vec<GtBox>) {
        self.frames.insert(frame.into(), boxes);
    }

    /// Boxes of every `split` entry, read from their `annotation` files.
    pub fn from_manifest(manifest: &DatasetManifest, base_dir: &Path, split: Split) -> Result<Self> {
        let mut gt = GroundTruth::default();
        for e in manifest.entries_in(split) {
            let rel = e
                .files
                .get("annotation")
                .ok_or_else(|| Error::AssetMissing(format!("annotation of frame '{}'", e.frame)))?;
            let a = load_frame(&base_dir.join(rel))?;
            gt.insert(
                e.frame.clone(),
                a.objects
                    .iter()
                    .map(|o| GtBox {
                        class_id: o.class_id,
                        bbox: o.bbox.into(),
                    })
                    .collect(),
            );
        }
        Ok(gt)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSettings {
    /// Operating point of the precision / recall columns.
    pub conf_threshold: f64,
    pub pr_iou_threshold: f64,
    /// IoU thresholds averaged by the mAP column; the first is the mAP50 one.
    pub iou_thresholds: Vec<f64>,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            conf_threshold: 0.2,
            pr_iou_threshold: 0.5,
            iou_thresholds: (0..10).map(|i| (50 + 5 * i) as f64 / 100.0).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub map: f64,
    pub map50: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class_id: u8,
    pub name: String,
    pub num_gt: usize,
    pub num_detections: usize,
    /// `None` when the class has neither ground truth nor detections.
    pub metrics: Option<MetricRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classes: Vec<ClassMetrics>,
    /// Unweighted mean over the classes with defined metrics.
    pub all: Option<MetricRow>,
    pub settings: EvalSettings,
}

/// True positive flags, in input order, for the detections of one class at
/// one IoU threshold. Detections are matched frame by frame.
fn class_flags(
    gt: &GroundTruth,
    dets: &[(usize, &DetectionRecord)],
    class_id: u8,
    iou_threshold: f64,
) -> Vec<bool> {
    let mut per_frame: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (k, (_, d)) in dets.iter().enumerate() {
        per_frame.entry(d.frame.as_str()).or_default().push(k);
    }
    let mut flags = vec![false; dets.len()];
    for (frame, ks) in per_frame {
        let truth: Vec<Rect> = gt.frames[frame]
            .iter()
            .filter(|g| g.class_id == class_id)
            .map(|g| g.bbox)
            .collect();
        let local: Vec<(Rect, f64)> = ks.iter().map(|&k| (dets[k].1.bbox, dets[k].1.confidence)).collect();
        let m = match_detections(&local, &truth, iou_threshold);
        for (&k, tp) in ks.iter().zip(m.true_positive) {
            flags[k] = tp;
        }
    }
    flags
}

/// Detection metrics of `predictions` against `gt`.
///
/// AP uses all predictions; precision and recall use those with confidence
/// at or above the threshold.
pub fn evaluate(gt: &GroundTruth, predictions: &[DetectionRecord], settings: &EvalSettings) -> Result<EvalReport> {
    if settings.iou_thresholds.is_empty() {
        return Err(Error::Config("at least one IoU threshold is required".into()));
    }
    for p in predictions {
        p.validate()?;
        if !gt.frames.contains_key(&p.frame) {
            return Err(Error::Validation(format!("prediction for unknown frame '{}'", p.frame)));
        }
    }
    let mut classes = Vec::with_capacity(CLASS_NAMES.len());
    for (c, name) in CLASS_NAMES.iter().enumerate() {
        let class_id = c as u8;
        let num_gt = gt.frames.values().flatten().filter(|g| g.class_id == class_id).count();
        let dets: Vec<(usize, &DetectionRecord)> =
            predictions.iter().enumerate().filter(|(_, p)| p.class_id == class_id).collect();
        let aps: Vec<Option<f64>> = settings
            .iou_thresholds
            .iter()
            .map(|&t| {
                let flags = class_flags(gt, &dets, class_id, t);
                let scored: Vec<(f64, bool)> = dets.iter().zip(flags).map(|((_, d), f)| (d.confidence, f)).collect();
                average_precision(&scored, num_gt)
            })
            .collect();
        let metrics = match aps[0] {
            None => None,
            Some(map50) => {
                let map = aps.iter().map(|a| a.unwrap_or(0.0)).sum::<f64>() / aps.len() as f64;
                let kept: Vec<(usize, &DetectionRecord)> = dets
                    .iter()
                    .copied()
                    .filter(|(_, d)| d.confidence >= settings.conf_threshold)
                    .collect();
                let flags = class_flags(gt, &kept, class_id, settings.pr_iou_threshold);
                let tp = flags.iter().filter(|&&f| f).count();
                let precision = if kept.is_empty() { 0.0 } else { tp as f64 / kept.len() as f64 };
                let recall = if num_gt == 0 { 0.0 } else { tp as f64 / num_gt as f64 };
                Some(MetricRow {
                    map,
                    map50,
                    precision,
                    recall,
                })
            }
        };
        classes.push(ClassMetrics {
            class_id,
            name: name.to_string(),
            num_gt,
            num_detections: dets.len(),
            metrics,
        });
    }
    let defined: Vec<MetricRow> = classes.iter().filter_map(|c| c.metrics).collect();
    let all = (!defined.is_empty()).then(|| {
        let n = defined.len() as f64;
        MetricRow {
            map: defined.iter().map(|m| m.map).sum::<f64>() / n,
            map50: defined.iter().map(|m| m.map50).sum::<f64>() / n,
            precision: defined.iter().map(|m| m.precision).sum::<f64>() / n,
            recall: defined.iter().map(|m| m.recall).sum::<f64>() / n,
        }
    });
    Ok(EvalReport {
        classes,
        all,
        settings: settings.clone(),
    })
}

fn fmt_row(out: &mut String, name: &str, row: Option<&MetricRow>, width: usize) {
    let cell = |v: f64| format!("{:.2}", v * 100.0);
    let cells = match row {
        Some(m) => [cell(m.map), cell(m.map50), cell(m.precision), cell(m.recall)],
        None => ["-".to_string(), "-".to_string(), "-".to_string(), "-".to_string()],
    };
    let _ = writeln!(out, "{name:<width$}  {:>8}  {:>8}  {:>8}  {:>8}", cells[0], cells[1], cells[2], cells[3]);
}

/// Aligned text table with one block per class ("all", then Body..Glove),
/// one row per experiment, values in percent.
pub fn render_table(reports: &[(String, EvalReport)]) -> String {
    let width = reports.iter().map(|(n, _)| n.len()).chain(["Experiment".len()]).max().unwrap_or(10);
    let total = width + 4 * 10;
    let rule = "-".repeat(total);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>8}  {:>8}  {:>8}  {:>8}", "Experiment", "mAP", "mAP50", "P", "R");
    let blocks = std::iter::once("all").chain(CLASS_TITLES);
    for (b, title) in blocks.enumerate() {
        let _ = writeln!(out, "{rule}");
        let _ = writeln!(out, "{title:^total$}");
        for (name, report) in reports {
            let row = if b == 0 {
                report.all.as_ref()
            } else {
                report.classes.get(b - 1).and_then(|c| c.metrics.as_ref())
            };
            fmt_row(&mut out, name, row, width);
        }
    }
    let _ = writeln!(out, "{rule}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(frame: &str, class_id: u8, bbox: [f64; 4], confidence: f64) -> DetectionRecord {
        DetectionRecord {
            frame: frame.into(),
            class_id,
            bbox: bbox.into(),
            confidence,
        }
    }

    #[test]
    fn recall_and_precision_at_operating_point() {
        let mut gt = GroundTruth::default();
        gt.insert(
            "a",
            vec![
                GtBox { class_id: 0, bbox: Rect::new(0.0, 0.0, 10.0, 10.0) },
                GtBox { class_id: 0, bbox: Rect::new(20.0, 20.0, 30.0, 30.0) },
            ],
        );
        let r = evaluate(&gt, &[det("a", 0, [0.0, 0.0, 10.0, 10.0], 0.9)], &EvalSettings::default()).unwrap();
        let body = r.classes[0].metrics.unwrap();
        assert_eq!((body.precision, body.recall), (1.0, 0.5));
        assert!(r.classes[1].metrics.is_none());
        assert_eq!(r.all.unwrap(), body);
    }

    #[test]
    fn unknown_frame_is_rejected() {
        let gt = GroundTruth::default();
        assert!(evaluate(&gt, &[det("zz", 0, [0.0, 0.0, 1.0, 1.0], 0.5)], &EvalSettings::default()).is_err());
    }

    #[test]
    fn table_lists_all_blocks_in_order() {
        let mut gt = GroundTruth::default();
        gt.insert("a", vec![GtBox { class_id: 2, bbox: Rect::new(0.0, 0.0, 4.0, 4.0) }]);
        let r = evaluate(&gt, &[det("a", 2, [0.0, 0.0, 4.0, 4.0], 1.0)], &EvalSettings::default()).unwrap();
        let t = render_table(&[("SDRcad".into(), r)]);
        let titles: Vec<&str> = t
            .lines()
            .map(str::trim)
            .filter(|l| ["all", "Body", "Gown", "Shirt", "Pants", "Hat", "Mask", "Glove"].contains(l))
            .collect();
        assert_eq!(titles, ["all", "Body", "Gown", "Shirt", "Pants", "Hat", "Mask", "Glove"]);
        assert!(t.contains("100.00"));
    }
}
