use std::sync::Arc;

use clinsynth::annotate::{
    annotate_frame, bbox_from_mask, export_frame, export_manifest, load_frame, BoundingBox2D, CocoDocument,
    FrameAnnotation, ManifestFormat, ObjectAnnotation,
};
use clinsynth::body_model::TemplateMesh;
use clinsynth::dataset_eval::{DatasetManifest, ManifestEntry, Split};
use clinsynth::fixtures::{write_demo_assets, DemoOptions};
use clinsynth::pipeline::Generator;
use clinsynth::render::{rasterize, Gray16Image, RenderInstance};
use clinsynth::scene::{CameraModel, Environment, FrameSpec, ImageSize, Mode};
use image::{Luma, Rgb, RgbImage};
use nalgebra::{Matrix4, Vector3};
use proptest::prelude::*;

fn camera(w: u32, h: u32) -> CameraModel {
    let mut m = Matrix4::identity();
    m[(1, 1)] = -1.0;
    m[(2, 2)] = -1.0;
    m[(2, 3)] = 2.0;
    CameraModel { fx: 100.0, fy: 100.0, cx: w as f64 / 2.0, cy: h as f64 / 2.0, width: w, height: h, world_to_camera: m }
}

fn annotation(frame_index: u64, objects: Vec<ObjectAnnotation>) -> FrameAnnotation {
    FrameAnnotation { frame_index, mode: Mode::Sdr, seed: 99, camera: camera(64, 48), objects }
}

fn object(class_id: u8, instance_id: u16, bbox: [u32; 4]) -> ObjectAnnotation {
    ObjectAnnotation {
        class_id,
        class_name: clinsynth::class_name(class_id).unwrap().to_string(),
        instance_id,
        bbox: BoundingBox2D::new(bbox[0], bbox[1], bbox[2], bbox[3]).unwrap(),
        visible_pixels: 10,
        visibility: 0.75,
        world_position: [0.1, 0.2, 0.3],
    }
}

/// Brute-force scan: min/max over every pixel carrying `id`.
fn scan(mask: &Gray16Image, id: u16) -> Option<[u32; 4]> {
    let mut b: Option<[u32; 4]> = None;
    for (x, y, p) in mask.enumerate_pixels() {
        if p.0[0] == id {
            b = Some(match b {
                None => [x, y, x + 1, y + 1],
                Some([x0, y0, x1, y1]) => [x0.min(x), y0.min(y), x1.max(x + 1), y1.max(y + 1)],
            });
        }
    }
    b
}

proptest! {
    #[test]
    fn mask_boxes_are_tight(w in 1u32..24, h in 1u32..24, cells in prop::collection::vec((0u32..24, 0u32..24, 1u16..4), 0..30)) {
        let mut mask = Gray16Image::new(w, h);
        for (x, y, id) in cells {
            if x < w && y < h {
                mask.put_pixel(x, y, Luma([id]));
            }
        }
        for id in 1..4u16 {
            let got = bbox_from_mask(&mask, id);
            let want = scan(&mask, id);
            prop_assert_eq!(got.map(|b| [b.x_min, b.y_min, b.x_max, b.y_max]), want);
            if let Some(b) = got {
                prop_assert!(b.fits(w, h));
                // Every side touches an instance pixel.
                let hit = |x: u32, y: u32| mask.get_pixel(x, y).0[0] == id;
                prop_assert!((b.y_min..b.y_max).any(|y| hit(b.x_min, y)));
                prop_assert!((b.y_min..b.y_max).any(|y| hit(b.x_max - 1, y)));
                prop_assert!((b.x_min..b.x_max).any(|x| hit(x, b.y_min)));
                prop_assert!((b.x_min..b.x_max).any(|x| hit(x, b.y_max - 1)));
            }
        }
    }
}

#[test]
fn bbox_json_and_coco_forms() {
    let b = BoundingBox2D::new(2, 3, 6, 8).unwrap();
    assert_eq!(serde_json::to_string(&b).unwrap(), "[2,3,6,8]");
    assert_eq!(b.to_xywh(), [2, 3, 4, 5]);
    assert!(serde_json::from_str::<BoundingBox2D>("[6,3,2,8]").is_err());
}

#[test]
fn frame_export_round_trips_with_the_documented_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    let a = annotation(4, vec![object(0, 1, [2, 3, 6, 8]), object(5, 6, [3, 3, 5, 5])]);
    export_frame(&a, &path).unwrap();
    assert_eq!(load_frame(&path).unwrap(), a);

    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for key in ["frame_index", "mode", "seed", "camera", "objects"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    for key in ["fx", "fy", "cx", "cy", "width", "height", "world_to_camera"] {
        assert!(v["camera"].get(key).is_some(), "camera.{key}");
    }
    let o = &v["objects"][0];
    for key in ["class_id", "class_name", "instance_id", "bbox", "visibility", "world_position"] {
        assert!(o.get(key).is_some(), "objects.{key}");
    }
    assert_eq!(o["bbox"], serde_json::json!([2, 3, 6, 8]));

    let empty = annotation(5, vec![]);
    export_frame(&empty, &path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["objects"], serde_json::json!([]));
    assert_eq!(load_frame(&path).unwrap(), empty);
}

#[test]
fn loading_rejects_boxes_outside_the_image() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    export_frame(&annotation(1, vec![object(1, 2, [10, 10, 65, 20])]), &path).unwrap();
    assert!(load_frame(&path).is_err());
}

fn manifest_for(frames: &[FrameAnnotation]) -> DatasetManifest {
    let mut m = DatasetManifest::new("fixture");
    for f in frames {
        m.entries.push(ManifestEntry {
            frame: format!("test/{:06}", f.frame_index),
            frame_index: Some(f.frame_index),
            split: Split::Test,
            mode: f.mode,
            group: None,
            files: [("rgb".to_string(), format!("test/{:06}.rgb.png", f.frame_index))].into_iter().collect(),
        });
    }
    m
}

#[test]
fn coco_export_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coco.json");
    let frames = vec![annotation(0, vec![object(0, 1, [2, 3, 6, 8])]), annotation(1, vec![])];
    export_manifest(&manifest_for(&frames), &frames, ManifestFormat::CocoLike, &path).unwrap();
    let doc: CocoDocument = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let names: Vec<_> = doc.categories.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["body", "gown", "shirt", "pants", "hat", "mask", "glove"]);
    assert_eq!(doc.images.len(), 2);
    assert_eq!(doc.annotations.len(), 1);
    assert_eq!(doc.annotations[0].bbox, [2, 3, 4, 5]);
    assert_eq!(doc.annotations[0].area, 20);
    assert_eq!(doc.images[1].file_name, "test/000001.rgb.png");
}

#[test]
fn manifest_export_rules() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    assert!(export_manifest(&DatasetManifest::new("x"), &[], ManifestFormat::Native, &path).is_err());
    let frames = vec![annotation(3, vec![]), annotation(3, vec![])];
    assert!(export_manifest(&manifest_for(&frames[..1]), &frames, ManifestFormat::Native, &path).is_err());
    let m = manifest_for(&frames[..1]);
    export_manifest(&m, &frames[..1], ManifestFormat::Native, &path).unwrap();
    assert_eq!(DatasetManifest::load(&path).unwrap(), m);
}

fn quad(x0: f64, y0: f64, x1: f64, y1: f64, z: f64) -> TemplateMesh {
    TemplateMesh::new(
        vec![Vector3::new(x0, y0, z), Vector3::new(x1, y0, z), Vector3::new(x1, y1, z), Vector3::new(x0, y1, z)],
        vec![[0, 1, 2], [0, 2, 3]],
        vec![[0.0, 0.0]; 4],
    )
    .unwrap()
}

#[test]
fn min_visibility_drops_mostly_hidden_objects() {
    let tex = Arc::new(RgbImage::from_pixel(2, 2, Rgb([50, 50, 50])));
    let inst = |mesh, class_id, instance_id| RenderInstance { mesh, texture: tex.clone(), class_id, instance_id, group: None, origin: [0.0; 3] };
    // Far quad: 20 × 20 px. The occluder leaves its first column visible (5%).
    let spec = FrameSpec {
        frame_index: 0,
        seed: 0,
        mode: Mode::Dr,
        characters: vec![],
        camera: camera(64, 48),
        ambient: 1.0,
        lights: vec![],
        environment: Environment::Backdrop { background: "none".into() },
        distractors: vec![],
    };
    let b = rasterize(
        &[inst(quad(-0.2, -0.2, 0.2, 0.2, 0.0), 3, 1), inst(quad(-0.09, -0.1, 0.1, 0.1, 1.0), 4, 2)],
        &spec,
        None,
        0.01,
    )
    .unwrap();
    let keep = annotate_frame(&b, &spec, 0.04).unwrap();
    let far = keep.objects.iter().find(|o| o.instance_id == 1).unwrap();
    assert_eq!(far.visible_pixels, 20);
    assert!((far.visibility - 0.05).abs() < 1e-12);
    assert_eq!(far.bbox, BoundingBox2D::new(22, 14, 23, 34).unwrap());
    let drop = annotate_frame(&b, &spec, 0.06).unwrap();
    assert!(drop.objects.iter().all(|o| o.instance_id != 1));
}

#[test]
fn rendered_humans_contain_their_garments() {
    let dir = tempfile::tempdir().unwrap();
    let opts = DemoOptions { image: ImageSize { width: 200, height: 150 }, shape_rows: 4, ..DemoOptions::default() };
    let cfg = write_demo_assets(dir.path(), &opts).unwrap();
    let gen = Generator::load(&cfg, 5).unwrap();
    for i in 0..6 {
        let f = gen.render(i).unwrap();
        let human = f.annotation.objects.iter().find(|o| o.class_id == 0).expect("human visible");
        for g in f.annotation.objects.iter().filter(|o| o.class_id != 0) {
            assert!(human.bbox.contains(&g.bbox), "frame {i}: {:?} outside {:?}", g.bbox, human.bbox);
        }
        // Exported boxes equal the pixel scan of the instance mask (garments).
        for g in f.annotation.objects.iter().filter(|o| o.class_id != 0) {
            let want = scan(&f.buffers.instance_seg, g.instance_id).unwrap();
            assert_eq!([g.bbox.x_min, g.bbox.y_min, g.bbox.x_max, g.bbox.y_max], want);
        }
    }
}
