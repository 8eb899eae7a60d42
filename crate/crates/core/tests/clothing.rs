use clinsynth::body_model::{apply_shape, skin_mesh, Pose};
use clinsynth::clothing::{recolor_texture, rgb_to_hsv, ClothingAsset, GarmentClass, PaletteColor, PaletteSpec, SourceKind};
use clinsynth::fixtures::{capsule_human, fabric_texture, garment_mesh, walk_clip, Resolution};
use nalgebra::{UnitQuaternion, Vector3};

fn bound(class: GarmentClass) -> (clinsynth::body_model::ParametricBody, ClothingAsset) {
    let body = capsule_human();
    let mesh = garment_mesh(class, SourceKind::Designed, Resolution::LOW);
    let tex = fabric_texture([150, 170, 190], SourceKind::Designed, 1);
    let asset = ClothingAsset::bind(mesh, class, SourceKind::Designed, tex, &body, &PaletteSpec::default()).unwrap();
    (body, asset)
}

#[test]
fn garments_move_rigidly_with_a_rotated_root() {
    let (body, g) = bound(GarmentClass::Gown);
    let mut pose = Pose::identity(body.skeleton.joint_count());
    let q = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), 1.1);
    pose.rotations[0] = q;
    let posed = skin_mesh(&g.mesh, &g.weights, &body.skeleton, &pose).unwrap();
    let pivot = body.skeleton.joints()[0].offset;
    for (p, r) in posed.vertices.iter().zip(&g.mesh.vertices) {
        assert!((p - (pivot + q * (r - pivot))).norm() < 1e-9);
    }
}

#[test]
fn gloves_follow_the_hands_through_the_walk() {
    let (body, g) = bound(GarmentClass::Glove);
    let clip = walk_clip(&body.skeleton, 8);
    for key in clip.keyframes() {
        let posed_body = skin_mesh(&body.mesh, &body.weights, &body.skeleton, &key.pose).unwrap();
        let posed_glove = skin_mesh(&g.mesh, &g.weights, &body.skeleton, &key.pose).unwrap();
        // Every glove vertex stays within a few centimetres of the posed body.
        for v in &posed_glove.vertices {
            let d = posed_body.vertices.iter().map(|b| (b - v).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 0.05, "glove vertex {d} m away from the body");
        }
    }
}

#[test]
fn garment_shape_follows_the_body_shape() {
    let (body, g) = bound(GarmentClass::Pants);
    let mut coeffs = vec![0.0; body.shape_basis.num_coeffs()];
    coeffs[0] = 2.0; // taller
    let shaped_body = apply_shape(&body.mesh, &body.shape_basis, &coeffs).unwrap();
    let shaped = apply_shape(&g.mesh, &g.shape_basis, &coeffs).unwrap();
    let body_drop = shaped_body.bounds().unwrap().0.y - body.mesh.bounds().unwrap().0.y;
    let garment_drop = shaped.bounds().unwrap().0.y - g.mesh.bounds().unwrap().0.y;
    assert!(garment_drop.abs() > 1e-4);
    assert!((garment_drop - body_drop).abs() < 0.02, "{garment_drop} vs {body_drop}");
}

#[test]
fn palette_variants_take_the_palette_hues() {
    let (_, g) = bound(GarmentClass::Shirt);
    let palette = PaletteSpec::default();
    assert_eq!(g.palette_variants.len(), PaletteColor::ALL.len());
    for (&c, img) in PaletteColor::ALL.iter().zip(&g.palette_variants) {
        let (h, s, _) = rgb_to_hsv(img.get_pixel(3, 3).0);
        if s > 0.05 {
            let d = (h - palette.hue(c)).abs();
            assert!(d.min(360.0 - d) < 6.0, "{c:?}: hue {h}");
        }
    }
    let again = recolor_texture(&g.base_texture, palette.hue(PaletteColor::ALL[0]), 0, &palette);
    assert_eq!(again, g.palette_variants[0]);
}
