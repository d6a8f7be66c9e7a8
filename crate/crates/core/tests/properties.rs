use proptest::prelude::*;

use cervix_core::classify::{posterior_from_log, stratified_kfold, Gnb};
use cervix_core::evalmetrics::{dice, jaccard, pearson, roc_auc};
use cervix_core::geometry::split_at_centroid;
use cervix_core::geometry::Point;
use cervix_core::raster::{dilate, inpaint, rgb_to_hsv, BinaryMask, InpaintParams, RgbImage};

fn mask(w: usize, h: usize) -> impl Strategy<Value = BinaryMask> {
    proptest::collection::vec(any::<bool>(), w * h)
        .prop_map(move |b| BinaryMask::from_bits(w, h, b).unwrap())
}

fn sized_mask() -> impl Strategy<Value = BinaryMask> {
    (2usize..24, 2usize..24).prop_flat_map(|(w, h)| mask(w, h))
}

fn mask_pair() -> impl Strategy<Value = (BinaryMask, BinaryMask)> {
    (2usize..24, 2usize..24).prop_flat_map(|(w, h)| (mask(w, h), mask(w, h)))
}

fn image_and_hole() -> impl Strategy<Value = (RgbImage, BinaryMask)> {
    (3usize..20, 3usize..20).prop_flat_map(|(w, h)| {
        (
            proptest::collection::vec(any::<[u8; 3]>(), w * h),
            proptest::collection::vec(prop::bool::weighted(0.4), w * h),
        )
            .prop_map(move |(px, mut hole)| {
                hole[0] = false;
                (
                    RgbImage::new(w, h, px).unwrap(),
                    BinaryMask::from_bits(w, h, hole).unwrap(),
                )
            })
    })
}

fn union(a: &BinaryMask, b: &BinaryMask) -> BinaryMask {
    BinaryMask::from_fn(a.width(), a.height(), |x, y| a.get(x, y) || b.get(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dilation_is_extensive_monotone_and_composes((a, b) in mask_pair(), r1 in 0usize..4, r2 in 0usize..4) {
        let big = union(&a, &b);
        let da = dilate(&a, r1);
        prop_assert!(a.is_subset_of(&da));
        prop_assert!(da.is_subset_of(&dilate(&big, r1)));
        prop_assert_eq!(dilate(&da, r2), dilate(&a, r1 + r2));
    }

    #[test]
    fn inpaint_keeps_known_pixels_and_stays_in_range((img, hole) in image_and_hole()) {
        let out = inpaint(&img, &hole, InpaintParams::default()).unwrap();
        let (mut lo, mut hi) = ([255u8; 3], [0u8; 3]);
        for y in 0..img.height() {
            for x in 0..img.width() {
                if hole.get(x, y) {
                    continue;
                }
                prop_assert_eq!(out.get(x, y), img.get(x, y));
                for c in 0..3 {
                    lo[c] = lo[c].min(img.get(x, y)[c]);
                    hi[c] = hi[c].max(img.get(x, y)[c]);
                }
            }
        }
        for (x, y) in hole.foreground() {
            let v = out.get(x, y);
            prop_assert!((0..3).all(|c| v[c] >= lo[c] && v[c] <= hi[c]));
        }
    }

    #[test]
    fn overlap_scores_agree((a, b) in mask_pair()) {
        prop_assume!(!(a.is_empty() && b.is_empty()));
        let j = jaccard(&a, &b).unwrap();
        let d = dice(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&j) && (0.0..=1.0).contains(&d));
        prop_assert_eq!(j, jaccard(&b, &a).unwrap());
        prop_assert!((d - 2.0 * j / (1.0 + j)).abs() < 1e-12);
        prop_assert_eq!(jaccard(&a, &a).unwrap_or(1.0), 1.0);
    }

    #[test]
    fn auc_depends_only_on_order(
        pairs in proptest::collection::vec((-20i32..20, any::<bool>()), 4..60),
        scale in 0.1f64..5.0,
    ) {
        let mut labels: Vec<bool> = pairs.iter().map(|p| p.1).collect();
        labels[0] = true;
        labels[1] = false;
        let s: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let auc = roc_auc(&s, &labels).unwrap();
        let mono: Vec<f64> = s.iter().map(|v| v * v * v + scale * v + 3.0).collect();
        prop_assert_eq!(auc, roc_auc(&mono, &labels).unwrap());
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        prop_assert!((roc_auc(&neg, &labels).unwrap() - (1.0 - auc)).abs() < 1e-12);
    }

    #[test]
    fn pearson_is_affine_invariant(
        xy in proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 3..40),
        a in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0],
        b in -100.0f64..100.0,
    ) {
        let x: Vec<f64> = xy.iter().map(|p| p.0).collect();
        let y: Vec<f64> = xy.iter().map(|p| p.1).collect();
        let Ok(r) = pearson(&x, &y) else { return Ok(()) };
        let mapped: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let rm = pearson(&mapped, &y).unwrap();
        prop_assert!((rm - a.signum() * r).abs() < 1e-9);
        prop_assert!((-1.0..=1.0).contains(&r));
    }

    #[test]
    fn posteriors_are_a_distribution(
        l0 in -800.0f64..800.0,
        l1 in -800.0f64..800.0,
        shift in -500.0f64..500.0,
    ) {
        let (p0, p1) = posterior_from_log([l0, l1]);
        prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
        prop_assert!(p0 >= 0.0 && p1 >= 0.0);
        let (q0, q1) = posterior_from_log([l0 + shift, l1 + shift]);
        prop_assert!((p0 - q0).abs() < 1e-9 && (p1 - q1).abs() < 1e-9);
    }

    #[test]
    fn gnb_posteriors_sum_to_one(
        q in proptest::collection::vec(-1e3f64..1e3, 2),
    ) {
        let x = vec![vec![0.0, 1.0], vec![1.0, 0.5], vec![0.2, 0.1], vec![5.0, 4.0], vec![6.0, 5.5], vec![5.5, 4.5]];
        let y = [false, false, false, true, true, true];
        let g = Gnb::fit(&x, &y).unwrap();
        let (p0, p1) = g.posteriors(&q);
        prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stratified_folds_partition(
        labels in proptest::collection::vec(any::<bool>(), 10..120),
        k in 2usize..6,
        seed in any::<u64>(),
    ) {
        let n_pos = labels.iter().filter(|&&l| l).count();
        prop_assume!(n_pos >= k && labels.len() - n_pos >= k);
        let folds = stratified_kfold(&labels, k, seed).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort();
        prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
        let pos: Vec<usize> = folds.iter().map(|f| f.iter().filter(|&&i| labels[i]).count()).collect();
        prop_assert!(pos.iter().max().unwrap() - pos.iter().min().unwrap() <= 1);
        prop_assert_eq!(folds, stratified_kfold(&labels, k, seed).unwrap());
    }

    #[test]
    fn hsv_components_in_range(rgb in any::<[u8; 3]>()) {
        let p = rgb_to_hsv(rgb);
        prop_assert!((0.0..360.0).contains(&p.h));
        prop_assert!((0.0..=1.0).contains(&p.s) && (0.0..=1.0).contains(&p.v));
    }

    #[test]
    fn centroid_split_partitions(m in sized_mask(), angle in 0.0f64..std::f64::consts::TAU) {
        prop_assume!(m.count() >= 2);
        let axis = Point::new(angle.cos(), angle.sin());
        if let Ok((behind, ahead)) = split_at_centroid(&m, axis) {
            prop_assert_eq!(behind.count() + ahead.count(), m.count());
            prop_assert_eq!(union(&behind, &ahead), m);
        }
    }
}
