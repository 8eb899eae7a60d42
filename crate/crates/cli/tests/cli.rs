use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clinsynth::annotate::load_frame;
use clinsynth::dataset_eval::{DatasetManifest, ManifestEntry, Split};
use clinsynth::scene::Mode;
use image::{Rgb, RgbImage};

fn clinsynth(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_clinsynth"));
    cmd.args(args);
    for (k, _) in std::env::vars() {
        if k.starts_with("CLINSYNTH_") {
            cmd.env_remove(k);
        }
    }
    cmd
}

fn ok<C: std::borrow::BorrowMut<Command>>(mut cmd: C) -> Output {
    let cmd = cmd.borrow_mut();
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Small demo config (96×72, low detail).
fn scaffold(dir: &Path, mode: &str) -> PathBuf {
    let assets = dir.join(format!("assets_{mode}"));
    let out = ok(clinsynth(&["scaffold", "--out", p(&assets), "--mode", mode, "--detail", "low", "--width", "96", "--height", "72"]));
    let path = PathBuf::from(String::from_utf8(out.stdout).unwrap().trim());
    assert!(path.exists());
    path
}

#[test]
fn generate_writes_quadruples_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scaffold(dir.path(), "dr");
    let out = dir.path().join("out");
    ok(clinsynth(&["generate", "--config", p(&cfg), "--out", p(&out), "--seed", "3", "--count", "10", "--format", "coco"]));
    let m = DatasetManifest::load(&out.join("manifest.json")).unwrap();
    assert_eq!(m.entries.len(), 10);
    for i in 0..10 {
        for ext in ["rgb.png", "depth.png", "cls.png", "inst.png", "json"] {
            assert!(out.join(format!("train/{i:06}.{ext}")).exists(), "{i} {ext}");
        }
    }
    assert!(out.join("coco.json").exists());

    // A second run appends after the existing frames.
    ok(clinsynth(&["generate", "--config", p(&cfg), "--out", p(&out), "--seed", "3", "--count", "2", "--split", "val"]));
    let m = DatasetManifest::load(&out.join("manifest.json")).unwrap();
    assert_eq!(m.counts(), [10, 2, 0]);
    assert!(out.join("val/000011.rgb.png").exists());
}

#[test]
fn environment_variables_stand_in_for_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scaffold(dir.path(), "sdr");
    let out = dir.path().join("out");
    ok(clinsynth(&["generate"])
        .env("CLINSYNTH_CONFIG", &cfg)
        .env("CLINSYNTH_OUT", &out)
        .env("CLINSYNTH_COUNT", "2")
        .env("CLINSYNTH_SEED", "9"));
    let a = std::fs::read(out.join("train/000001.rgb.png")).unwrap();
    let again = dir.path().join("again");
    ok(clinsynth(&["generate", "--config", p(&cfg), "--out", p(&again), "--count", "2", "--seed", "9"]));
    assert_eq!(a, std::fs::read(again.join("train/000001.rgb.png")).unwrap());
}

fn greenscreen(dir: &Path, n: usize) -> PathBuf {
    let fg = dir.join("fg");
    std::fs::create_dir_all(&fg).unwrap();
    for i in 0..n {
        let img = RgbImage::from_fn(40, 30, |x, y| {
            if (10..30).contains(&x) && (5..25).contains(&y) { Rgb([180, 120, 90]) } else { Rgb([20, 230, 30]) }
        });
        img.save(fg.join(format!("person{}_{i:03}.png", i % 2))).unwrap();
    }
    fg
}

#[test]
fn composite_replaces_green_and_pairs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let fg = greenscreen(dir.path(), 5);
    let bg = dir.path().join("bg");
    std::fs::create_dir_all(&bg).unwrap();
    for k in 0..3u8 {
        RgbImage::from_pixel(64, 48, Rgb([k * 80, 0, 200])).save(bg.join(format!("b{k}.png"))).unwrap();
    }
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(clinsynth(&["composite", "--foreground", p(&fg), "--backgrounds", p(&bg), "--out", p(&out), "--seed", "4"]));
        out
    };
    let a = run("a");
    let b = run("b");
    let m = DatasetManifest::load(&a.join("manifest.json")).unwrap();
    assert_eq!(m.entries.len(), 5);
    assert!(m.entries.iter().all(|e| e.mode == Mode::Mr));
    let img = image::open(a.join("person0_000.png")).unwrap().to_rgb8();
    assert_eq!(img.dimensions(), (40, 30));
    assert_eq!(img.get_pixel(15, 10).0, [180, 120, 90]);
    assert_eq!(img.get_pixel(0, 0).0[2], 200);
    assert_eq!(std::fs::read(a.join("pairings.json")).unwrap(), std::fs::read(b.join("pairings.json")).unwrap());

    let empty = dir.path().join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let out = clinsynth(&["composite", "--foreground", p(&fg), "--backgrounds", p(&empty), "--out", p(&dir.path().join("c"))])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.starts_with("error:"));
}

fn flat_manifest(path: &Path, name: &str, n: usize) {
    let mut m = DatasetManifest::new(name);
    m.entries = (0..n)
        .map(|i| ManifestEntry {
            frame: format!("f{i:05}"),
            frame_index: Some(i as u64),
            split: Split::Train,
            mode: Mode::Real,
            group: None,
            files: BTreeMap::new(),
        })
        .collect();
    m.save(path).unwrap();
}

#[test]
fn split_then_stats() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.json");
    let split = dir.path().join("split.json");
    flat_manifest(&raw, "Klinikum", 1101);
    ok(clinsynth(&["split", "--manifest", p(&raw), "--out", p(&split), "--ratios", "0.6,0.1,0.3", "--seed", "2"]));
    let syn = dir.path().join("syn.json");
    flat_manifest(&syn, "synthetic", 12);
    let out = ok(clinsynth(&["stats", "--manifest", p(&split), "--manifest", p(&syn)]));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows[0], ["dataset", "name", "train", "validation", "test"]);
    assert_eq!(rows[1], ["Klinikum", "660", "110", "331"]);
    assert_eq!(rows[2], ["synthetic", "12", "/", "/"]);

    let bad = clinsynth(&["split", "--manifest", p(&raw), "--out", p(&split), "--ratios", "0.6,0.6,0.3"]).output().unwrap();
    assert!(!bad.status.success());
}

#[test]
fn evaluate_perfect_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scaffold(dir.path(), "dr");
    let out = dir.path().join("out");
    ok(clinsynth(&["generate", "--config", p(&cfg), "--out", p(&out), "--count", "4", "--split", "test"]));
    let m = DatasetManifest::load(&out.join("manifest.json")).unwrap();
    let mut lines = String::new();
    for e in &m.entries {
        let a = load_frame(&out.join(&e.files["annotation"])).unwrap();
        for o in &a.objects {
            let b = o.bbox;
            lines += &format!(
                "{{\"frame\":\"{}\",\"class_id\":{},\"bbox\":[{},{},{},{}],\"confidence\":0.9}}\n",
                e.frame, o.class_id, b.x_min, b.y_min, b.x_max, b.y_max
            );
        }
    }
    let preds = dir.path().join("perfect.jsonl");
    std::fs::write(&preds, lines).unwrap();
    let json = dir.path().join("report.json");
    let res = ok(clinsynth(&["evaluate", "--manifest", p(&out.join("manifest.json")), "--predictions", p(&preds), "--json", p(&json)]));
    let text = String::from_utf8(res.stdout).unwrap();
    let row: Vec<&str> = text.lines().find(|l| l.starts_with("perfect")).unwrap().split_whitespace().collect();
    assert_eq!(row, ["perfect", "100.00", "100.00", "100.00", "100.00"]);
    assert!(json.exists());

    let missing = clinsynth(&["evaluate", "--manifest", p(&out.join("manifest.json")), "--predictions", "/nonexistent.jsonl"])
        .output()
        .unwrap();
    assert!(!missing.status.success());
}

#[test]
fn mosaic_and_green_augmentation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scaffold(dir.path(), "dr");
    let out = dir.path().join("out");
    ok(clinsynth(&["generate", "--config", p(&cfg), "--out", p(&out), "--count", "4"]));
    let images: Vec<String> = (0..4).map(|i| p(&out.join(format!("train/{i:06}.rgb.png"))).to_string()).collect();
    let mo = dir.path().join("mosaic");
    ok(clinsynth(&["augment", "mosaic", "--images", &images.join(","), "--out", p(&mo), "--width", "64", "--height", "64"]));
    assert_eq!(image::open(mo.join("mosaic.png")).unwrap().to_rgb8().dimensions(), (64, 64));
    assert!(mo.join("mosaic.labels.json").exists());

    let three = clinsynth(&["augment", "mosaic", "--images", &images[..3].join(","), "--out", p(&mo)]).output().unwrap();
    assert!(!three.status.success());

    let batch = dir.path().join("batch");
    ok(clinsynth(&["augment", "mosaic", "--manifest", p(&out.join("manifest.json")), "--count", "3", "--out", p(&batch)]));
    assert_eq!(DatasetManifest::load(&batch.join("manifest.json")).unwrap().entries.len(), 3);

    let green = dir.path().join("green");
    ok(clinsynth(&["augment", "green", "--manifest", p(&out.join("manifest.json")), "--targets", "all", "--probability", "0", "--out", p(&green)]));
    for i in 0..4 {
        let f = format!("train/{i:06}.rgb.png");
        let a = image::open(out.join(&f)).unwrap().to_rgb8();
        let b = image::open(green.join(&f)).unwrap().to_rgb8();
        assert_eq!(a, b);
    }
}

#[test]
fn bad_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let missing = clinsynth(&["generate", "--config", "/nonexistent/config.json", "--out", p(dir.path()), "--count", "1"])
        .output()
        .unwrap();
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error:"));
    assert!(!clinsynth(&["nonsense"]).output().unwrap().status.success());
}
