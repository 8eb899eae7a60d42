use clinsynth::clothing::GarmentClass;
use clinsynth::fixtures::{write_demo_assets, DemoOptions};
use clinsynth::scene::{compose, point_in_polygon, ConfigFile, Environment, ImageSize, Mode, RandomizationConfig};

fn demo(mode: Mode) -> (tempfile::TempDir, RandomizationConfig) {
    let dir = tempfile::tempdir().unwrap();
    let opts = DemoOptions { mode, image: ImageSize { width: 128, height: 96 }, shape_rows: 5, ..DemoOptions::default() };
    let path = write_demo_assets(dir.path(), &opts).unwrap();
    let cfg = RandomizationConfig::load(&path).unwrap();
    (dir, cfg)
}

#[test]
fn dr_characters_follow_the_shape_table() {
    let (_dir, cfg) = demo(Mode::Dr);
    let fpc = cfg.frames_per_character() as u64;
    let table = cfg.shape_table.clone().unwrap();
    for i in 0..40u64 {
        let f = compose(&cfg, i, 42).unwrap();
        f.validate().unwrap();
        let c = &f.characters[0];
        let row = ((i / fpc) % table.len() as u64) as usize;
        assert_eq!(c.shape_index, Some(row));
        assert_eq!(c.shape_coeffs, table[row]);
        assert_eq!(c.outfit.len(), GarmentClass::ALL.len());
        assert!((c.motion_time - (i % fpc) as f64 / fpc as f64).abs() < 1e-12);
        let [lo, hi] = cfg.file.distractors.count;
        assert!(f.distractors.len() >= lo && f.distractors.len() <= hi);
        assert!(matches!(f.environment, Environment::Backdrop { .. }));
    }
    // Frames of one character share texture and outfit.
    let a = compose(&cfg, fpc, 42).unwrap();
    let b = compose(&cfg, fpc + 1, 42).unwrap();
    assert_eq!(a.characters[0].texture, b.characters[0].texture);
    assert_eq!(a.characters[0].outfit, b.characters[0].outfit);
    assert_ne!(a.camera, b.camera);
}

#[test]
fn composition_is_a_pure_function_of_seed_and_index() {
    let (_dir, cfg) = demo(Mode::Dr);
    assert_eq!(compose(&cfg, 7, 1).unwrap(), compose(&cfg, 7, 1).unwrap());
    assert_ne!(compose(&cfg, 7, 1).unwrap(), compose(&cfg, 7, 2).unwrap());
    assert_ne!(compose(&cfg, 7, 1).unwrap().seed, compose(&cfg, 8, 1).unwrap().seed);
}

#[test]
fn sdr_places_characters_in_the_room() {
    let (_dir, cfg) = demo(Mode::Sdr);
    let room = cfg.room.clone().unwrap();
    for i in 0..30 {
        let f = compose(&cfg, i, 3).unwrap();
        assert!(f.distractors.is_empty());
        assert_eq!(f.lights.len(), room.file.ceiling_lights.len());
        let p = f.characters[0].placement.position;
        assert!(point_in_polygon([p[0], p[2]], &room.file.placement_polygon));
        assert_eq!(p[1], 0.0);
        // Camera inside the room.
        let m = f.camera.world_to_camera;
        let r = m.fixed_view::<3, 3>(0, 0).into_owned();
        let t = m.fixed_view::<3, 1>(0, 3).into_owned();
        let eye = -(r.transpose() * t);
        for k in 0..3 {
            assert!(eye[k] >= room.file.bounds_min[k] && eye[k] <= room.file.bounds_max[k], "{eye:?}");
        }
    }
}

#[test]
fn empty_pools_are_configuration_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_demo_assets(dir.path(), &DemoOptions { shape_rows: 0, ..DemoOptions::default() }).unwrap();
    let mut file: ConfigFile = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    file.backgrounds.clear();
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    assert!(RandomizationConfig::load(&path).is_err());
}
