use serde::{Deserialize, Serialize};

use crate::annotate::BoundingBox2D;

/// Number of recall sample points of the interpolated PR curve.
pub const RECALL_POINTS: usize = 101;

/// Real-valued box `[xmin, ymin, xmax, ymax]`, max exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Rect { x_min, y_min, x_max, y_max }
    }

    pub fn is_valid(&self) -> bool {
        [self.x_min, self.y_min, self.x_max, self.y_max].iter().all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.y_min < self.y_max
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min).max(0.0) * (self.y_max - self.y_min).max(0.0)
    }
}

impl From<[f64; 4]> for Rect {
    fn from([a, b, c, d]: [f64; 4]) -> Self {
        Rect::new(a, b, c, d)
    }
}

impl From<Rect> for [f64; 4] {
    fn from(r: Rect) -> Self {
        [r.x_min, r.y_min, r.x_max, r.y_max]
    }
}

impl From<BoundingBox2D> for Rect {
    fn from(b: BoundingBox2D) -> Self {
        Rect::new(b.x_min as f64, b.y_min as f64, b.x_max as f64, b.y_max as f64)
    }
}

/// Intersection over union; 0 for disjoint boxes.
pub fn iou(a: &Rect, b: &Rect) -> f64 {
    let w = a.x_max.min(b.x_max) - a.x_min.max(b.x_min);
    let h = a.y_max.min(b.y_max) - a.y_min.max(b.y_min);
    if w <= 0.0 || h <= 0.0 {
        return 0.0;
    }
    let inter = w * h;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    /// True positive flag per detection, in input order.
    pub true_positive: Vec<bool>,
    /// Matched flag per ground truth box, in input order.
    pub gt_matched: Vec<bool>,
}

/// Detection indices by descending confidence, ties by input order.
pub(crate) fn confidence_order(confidences: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..confidences.len()).collect();
    order.sort_by(|&a, &b| confidences[b].total_cmp(&confidences[a]).then(a.cmp(&b)));
    order
}

/// Greedy one-to-one matching of one frame and class.
///
/// Detections are visited by descending confidence (ties by input order);
/// each takes the unmatched ground truth box of highest IoU, if that IoU
/// reaches `iou_threshold` (ties go to the lower ground truth index).
pub fn match_detections(detections: &[(Rect, f64)], ground_truth: &[Rect], iou_threshold: f64) -> MatchResult {
    let confidences: Vec<f64> = detections.iter().map(|d| d.1).collect();
    let mut true_positive = vec![false; detections.len()];
    let mut gt_matched = vec![false; ground_truth.len()];
    for d in confidence_order(&confidences) {
        let mut best: Option<(usize, f64)> = None;
        for (g, gt) in ground_truth.iter().enumerate() {
            if gt_matched[g] {
                continue;
            }
            let v = iou(&detections[d].0, gt);
            if v >= iou_threshold && best.is_none_or(|(_, b)| v > b) {
                best = Some((g, v));
            }
        }
        if let Some((g, _)) = best {
            gt_matched[g] = true;
            true_positive[d] = true;
        }
    }
    MatchResult {
        true_positive,
        gt_matched,
    }
}

/// 101-point interpolated average precision.
///
/// `scored` holds `(confidence, is_true_positive)` in input order; ranking
/// is by descending confidence with ties by input order. Returns `None` when
/// there is neither ground truth nor any detection, and 0 when only one of
/// them is present.
pub fn average_precision(scored: &[(f64, bool)], num_gt: usize) -> Option<f64> {
    if num_gt == 0 {
        return if scored.is_empty() { None } else { Some(0.0) };
    }
    let confidences: Vec<f64> = scored.iter().map(|s| s.0).collect();
    let order = confidence_order(&confidences);
    let mut precision = Vec::with_capacity(order.len());
    let mut recall = Vec::with_capacity(order.len());
    let (mut tp, mut fp) = (0usize, 0usize);
    for &i in &order {
        if scored[i].1 {
            tp += 1;
        } else {
            fp += 1;
        }
        precision.push(tp as f64 / (tp + fp) as f64);
        recall.push(tp as f64 / num_gt as f64);
    }
    // Precision envelope: best precision at this or any higher recall.
    for i in (0..precision.len().saturating_sub(1)).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    let mut sum = 0.0;
    let mut k = 0;
    for p in 0..RECALL_POINTS {
        let r = p as f64 / (RECALL_POINTS - 1) as f64;
        while k < recall.len() && recall[k] < r {
            k += 1;
        }
        if k == recall.len() {
            break;
        }
        sum += precision[k];
    }
    Some(sum / RECALL_POINTS as f64)
}
