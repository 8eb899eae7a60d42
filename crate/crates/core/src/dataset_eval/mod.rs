//! Dataset manifests, splitting and detection metrics.

mod evaluate;
mod manifest;
mod metrics;
mod split;

pub use evaluate::{
    evaluate, load_predictions, render_table, ClassMetrics, DetectionRecord, EvalReport, EvalSettings, GroundTruth,
    GtBox, MetricRow,
};
pub use manifest::{DatasetManifest, ManifestEntry, Split};
pub use metrics::{average_precision, iou, match_detections, MatchResult, Rect, RECALL_POINTS};
pub use split::{split, SplitSizes};
