use cervix_core::geometry::{mask_centroid, medial_skeleton, SkeletonParams};
use cervix_core::markers::{estimate_aca, estimate_cl, fit_anterior_wall, AnteriorConvention};
use cervix_core::raster::BinaryMask;
use cervix_core::synth::{oracle_suite, rasterize, ShapeKind, ShapeSpec};

fn shape(name: &str) -> BinaryMask {
    let spec = oracle_suite()
        .into_iter()
        .find(|(n, _)| n == name)
        .unwrap()
        .1;
    rasterize(&spec).unwrap().0
}

fn cl(m: &BinaryMask) -> f64 {
    estimate_cl(m, None).unwrap().value
}

#[test]
fn cl_survives_quarter_turns() {
    for name in ["rect_100x20", "rect_140x16", "band_120", "annulus_40_60_90"] {
        let m = shape(name);
        let (a, b) = (cl(&m), cl(&m.rotate90()));
        assert!((a - b).abs() / a < 0.01, "{name}: {a} vs {b}");
    }
}

#[test]
fn cl_scales_with_the_mask() {
    for name in ["rect_100x20", "band_135"] {
        let m = shape(name);
        let (a, b) = (cl(&m), cl(&m.upscale(2)));
        assert!((b - 2.0 * a).abs() / (2.0 * a) < 0.02, "{name}: {a} vs {b}");
    }
}

#[test]
fn aca_is_mirror_symmetric() {
    let conv = AnteriorConvention::default();
    for bend in [90.0, 120.0, 150.0] {
        let m = shape(&format!("band_{bend}"));
        let a = estimate_aca(&m, conv).unwrap();
        let b = estimate_aca(&m.flip_vertical(), conv.flipped_vertical()).unwrap();
        assert!((a - b).abs() < 1e-6, "bend {bend}: {a} vs {b}");
    }
}

#[test]
fn disk_skeleton_collapses_to_the_centre() {
    let spec = ShapeSpec::new(ShapeKind::Disk { radius: 30.0 }, 128, 128);
    let (m, _) = rasterize(&spec).unwrap();
    let c = mask_centroid(&m).unwrap();
    let g = medial_skeleton(&m, SkeletonParams::default()).unwrap();
    assert!(!g.is_empty());
    for p in g.nodes() {
        assert!(p.dist(c) <= 1.5, "node {p:?} far from {c:?}");
    }
    assert!(cl(&m) <= 3.0);
}

#[test]
fn wall_fit_follows_the_proximal_arm() {
    let conv = AnteriorConvention::default();
    for bend in [90.0f64, 105.0, 120.0, 135.0, 150.0, 165.0] {
        let m = shape(&format!("band_{bend}"));
        let wall = fit_anterior_wall(&m, conv, 0.4).unwrap();
        let alpha = (180.0 - bend) / 2.0;
        let tilt = wall
            .direction
            .y
            .abs()
            .atan2(wall.direction.x.abs())
            .to_degrees();
        assert!(
            (tilt - alpha).abs() < 2.0,
            "bend {bend}: wall tilt {tilt}, arm {alpha}"
        );
        // the fitted line sits over the proximal half
        assert!(wall.point.x < mask_centroid(&m).unwrap().x);
    }
}

#[test]
fn straight_shapes_read_as_straight() {
    for name in ["rect_100x20", "rect_160x24", "rect_100x20_rot30"] {
        let aca = estimate_aca(&shape(name), AnteriorConvention::default()).unwrap();
        assert!((aca - 180.0).abs() < 1.0, "{name}: {aca}");
    }
}

#[test]
fn skeleton_stays_inside_the_mask() {
    for name in ["rect_120x30", "band_90", "annulus_60_76_120"] {
        let m = shape(name);
        let g = medial_skeleton(&m, SkeletonParams::default()).unwrap();
        for p in g.nodes() {
            assert!(
                m.get_signed(p.x.round() as i64, p.y.round() as i64),
                "{name}: node {p:?} outside"
            );
        }
    }
}
