use std::collections::BTreeMap;

use clinsynth::dataset_eval::{
    average_precision, evaluate, iou, match_detections, split, DatasetManifest, DetectionRecord, EvalSettings,
    GroundTruth, GtBox, ManifestEntry, Rect, Split, SplitSizes,
};
use clinsynth::scene::Mode;
use proptest::prelude::*;

fn rect() -> impl Strategy<Value = Rect> {
    (0u8..20, 0u8..20, 1u8..10, 1u8..10)
        .prop_map(|(x, y, w, h)| Rect::new(x as f64, y as f64, (x + w) as f64, (y + h) as f64))
}

/// Every injective partial assignment of detections to ground truth with
/// IoU at least `thr`; picks the one whose per-detection (matched IoU, lower
/// gt index) sequence, in confidence order, is lexicographically largest.
fn brute_force_match(dets: &[(Rect, f64)], gts: &[Rect], thr: f64) -> Vec<bool> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].1.total_cmp(&dets[a].1));
    type Key = Vec<(f64, i64)>;
    fn rec(
        k: usize,
        order: &[usize],
        dets: &[(Rect, f64)],
        gts: &[Rect],
        thr: f64,
        used: &mut Vec<bool>,
        chosen: &mut Vec<Option<usize>>,
        best: &mut Option<(Key, Vec<Option<usize>>)>,
    ) {
        if k == order.len() {
            let key: Key = chosen
                .iter()
                .zip(order)
                .map(|(c, &d)| match c {
                    Some(g) => (iou(&dets[d].0, &gts[*g]), -(*g as i64)),
                    None => (-1.0, 0),
                })
                .collect();
            let better = best.as_ref().is_none_or(|(b, _)| {
                key.iter().zip(b).find(|(x, y)| x != y).is_some_and(|(x, y)| x.0 > y.0 || (x.0 == y.0 && x.1 > y.1))
            });
            if better {
                *best = Some((key, chosen.clone()));
            }
            return;
        }
        chosen.push(None);
        rec(k + 1, order, dets, gts, thr, used, chosen, best);
        chosen.pop();
        for g in 0..gts.len() {
            if !used[g] && iou(&dets[order[k]].0, &gts[g]) >= thr {
                used[g] = true;
                chosen.push(Some(g));
                rec(k + 1, order, dets, gts, thr, used, chosen, best);
                chosen.pop();
                used[g] = false;
            }
        }
    }
    let mut best = None;
    rec(0, &order, dets, gts, thr, &mut vec![false; gts.len()], &mut Vec::new(), &mut best);
    let (_, chosen) = best.unwrap();
    let mut tp = vec![false; dets.len()];
    for (c, &d) in chosen.iter().zip(&order) {
        tp[d] = c.is_some();
    }
    tp
}

proptest! {
    #[test]
    fn iou_is_symmetric_and_bounded(a in rect(), b in rect()) {
        let (ab, ba) = (iou(&a, &b), iou(&b, &a));
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(ab == 1.0, a == b);
        prop_assert_eq!(iou(&a, &a), 1.0);
    }

    #[test]
    fn greedy_matching_equals_brute_force(
        dets in prop::collection::vec((rect(), 1u8..6), 0..5),
        gts in prop::collection::vec(rect(), 0..5),
        thr in prop::sample::select(vec![0.1, 0.3, 0.5, 0.75]),
    ) {
        let dets: Vec<(Rect, f64)> = dets.into_iter().map(|(r, c)| (r, c as f64 / 10.0)).collect();
        let m = match_detections(&dets, &gts, thr);
        prop_assert_eq!(&m.true_positive, &brute_force_match(&dets, &gts, thr));
        prop_assert_eq!(m.true_positive.iter().filter(|&&t| t).count(), m.gt_matched.iter().filter(|&&t| t).count());
    }

    #[test]
    fn ap_is_rank_invariant(flags in prop::collection::vec((1u32..100, any::<bool>()), 1..20), scale in 0.01f64..1.0) {
        let num_gt = flags.iter().filter(|f| f.1).count() + 1;
        let a: Vec<(f64, bool)> = flags.iter().map(|&(c, t)| (c as f64 / 100.0, t)).collect();
        let b: Vec<(f64, bool)> = a.iter().map(|&(c, t)| (c * scale, t)).collect();
        prop_assert_eq!(average_precision(&a, num_gt), average_precision(&b, num_gt));
    }

    #[test]
    fn top_true_positive_never_lowers_ap(flags in prop::collection::vec((1u32..100, any::<bool>()), 0..20), extra_gt in 1usize..4) {
        let a: Vec<(f64, bool)> = flags.iter().map(|&(c, t)| (c as f64 / 100.0, t)).collect();
        let num_gt = a.iter().filter(|f| f.1).count() + extra_gt;
        let mut b = a.clone();
        b.push((1.0, true));
        let before = average_precision(&a, num_gt).unwrap();
        let after = average_precision(&b, num_gt).unwrap();
        prop_assert!(after >= before - 1e-12, "{before} -> {after}");
        prop_assert!((0.0..=1.0).contains(&after));
    }

    #[test]
    fn split_partitions_every_entry(n in 1usize..300, seed in any::<u64>(), r0 in 0.0f64..1.0, r1f in 0.0f64..1.0) {
        let r1 = (1.0 - r0) * r1f;
        let ratios = [r0, r1, 1.0 - r0 - r1];
        let m = split("p", entries(n, |_| None), SplitSizes::Ratios(ratios), seed, false).unwrap();
        prop_assert_eq!(m.entries.len(), n);
        prop_assert_eq!(m.counts().iter().sum::<usize>(), n);
        let again = split("p", entries(n, |_| None), SplitSizes::Ratios(ratios), seed, false).unwrap();
        prop_assert_eq!(m, again);
    }
}

fn entries(n: usize, group: impl Fn(usize) -> Option<String>) -> Vec<ManifestEntry> {
    (0..n)
        .map(|i| ManifestEntry {
            frame: format!("f{i:05}"),
            frame_index: Some(i as u64),
            split: Split::Train,
            mode: Mode::Real,
            group: group(i),
            files: BTreeMap::new(),
        })
        .collect()
}

#[test]
fn klinikum_and_greenscreen_splits() {
    let m = split("klinikum", entries(1101, |_| None), SplitSizes::Ratios([0.6, 0.1, 0.3]), 1, false).unwrap();
    assert_eq!(m.counts(), [660, 110, 331]);
    let explicit = split("klinikum", entries(1101, |_| None), SplitSizes::Counts([660, 110, 331]), 1, false).unwrap();
    assert_eq!(explicit.counts(), [660, 110, 331]);
    let all_train = split("t", entries(17, |_| None), SplitSizes::Ratios([1.0, 0.0, 0.0]), 3, false).unwrap();
    assert_eq!(all_train.counts(), [17, 0, 0]);

    let mr = split("mr", entries(200, |i| Some(format!("person{}", i % 10))), SplitSizes::Ratios([0.8, 0.2, 0.0]), 9, true)
        .unwrap();
    let mut persons: BTreeMap<Split, std::collections::BTreeSet<String>> = BTreeMap::new();
    for e in &mr.entries {
        persons.entry(e.split).or_default().insert(e.group.clone().unwrap());
    }
    assert_eq!(persons[&Split::Train].len(), 8);
    assert_eq!(persons[&Split::Val].len(), 2);
    assert!(!persons.contains_key(&Split::Test));
}

#[test]
fn evaluation_examples() {
    let gt_box = Rect::new(10.0, 10.0, 50.0, 60.0);
    let mut gt = GroundTruth::default();
    for f in 0..5 {
        gt.insert(format!("f{f}"), vec![GtBox { class_id: 0, bbox: gt_box }, GtBox { class_id: 4, bbox: Rect::new(0.0, 0.0, 5.0, 5.0) }]);
    }
    let perfect: Vec<DetectionRecord> = gt
        .frames
        .iter()
        .flat_map(|(f, boxes)| boxes.iter().map(move |b| DetectionRecord { frame: f.clone(), class_id: b.class_id, bbox: b.bbox, confidence: 0.9 }))
        .collect();
    let r = evaluate(&gt, &perfect, &EvalSettings::default()).unwrap();
    let all = r.all.unwrap();
    assert_eq!([all.map, all.map50, all.precision, all.recall], [1.0; 4]);
    let defined: Vec<u8> = r.classes.iter().filter(|c| c.metrics.is_some()).map(|c| c.class_id).collect();
    assert_eq!(defined, [0, 4]);

    // One class, two GT, one TP at 0.9.
    let mut gt = GroundTruth::default();
    gt.insert("a", vec![GtBox { class_id: 2, bbox: gt_box }]);
    gt.insert("b", vec![GtBox { class_id: 2, bbox: gt_box }]);
    let preds = vec![DetectionRecord { frame: "a".into(), class_id: 2, bbox: gt_box, confidence: 0.9 }];
    let r = evaluate(&gt, &preds, &EvalSettings::default()).unwrap();
    let shirt = r.classes[2].metrics.unwrap();
    assert_eq!(shirt.recall, 0.5);
    assert_eq!(shirt.precision, 1.0);
    assert_eq!(r.all.unwrap(), shirt);

    // Predictions for unknown frames are rejected.
    let stray = vec![DetectionRecord { frame: "zzz".into(), class_id: 2, bbox: gt_box, confidence: 0.5 }];
    assert!(evaluate(&gt, &stray, &EvalSettings::default()).is_err());
}

#[test]
fn two_detections_on_one_gt() {
    let g = Rect::new(0.0, 0.0, 10.0, 10.0);
    let m = match_detections(&[(Rect::new(0.0, 0.0, 10.0, 9.0), 0.8), (g, 0.9)], &[g], 0.5);
    assert_eq!(m.true_positive, [false, true]);
    // TP then FP: precision 1 is reached at full recall.
    assert_eq!(average_precision(&[(0.9, true), (0.8, false)], 1), Some(1.0));
    assert_eq!(average_precision(&[], 3), Some(0.0));
}

#[test]
fn manifest_file_integrity() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = DatasetManifest::new("x");
    m.entries = entries(2, |_| None);
    m.entries[0].files.insert("rgb".into(), "a.png".into());
    assert!(m.check_files(dir.path()).is_err());
    std::fs::write(dir.path().join("a.png"), b"").unwrap();
    m.check_files(dir.path()).unwrap();
    let mut dup = m.clone();
    dup.entries.push(m.entries[0].clone());
    assert!(dup.validate().is_err());
}
