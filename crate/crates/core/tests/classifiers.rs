use cervix_core::classify::{cross_validate, FeatureView, Hyperparams, Knn, LinearSvm, SvmParams};
use cervix_core::evalmetrics::linreg;
use cervix_core::synth::{gen_cohort, CohortParams};

/// Regularised hinge objective with the bias penalised like a weight.
fn objective(w: f64, b: f64, x: &[f64], y: &[bool], lambda: f64) -> f64 {
    let hinge: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let s = if yi { 1.0 } else { -1.0 };
            (1.0 - s * (w * xi + b)).max(0.0)
        })
        .sum::<f64>()
        / x.len() as f64;
    0.5 * lambda * (w * w + b * b) + hinge
}

#[test]
fn svm_reaches_the_grid_optimum() {
    let x = [-2.0, -1.5, -1.0, -0.2, 0.3, 0.8, 1.2, 2.5];
    let y = [false, false, false, true, false, true, true, true];
    let lambda = 0.1;
    let mut best = f64::INFINITY;
    for i in -400..=400 {
        for j in -400..=400 {
            best = best.min(objective(i as f64 * 0.01, j as f64 * 0.01, &x, &y, lambda));
        }
    }
    let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
    let svm = LinearSvm::fit(
        &rows,
        &y,
        SvmParams {
            lambda,
            epochs: 3000,
            seed: 1,
        },
    )
    .unwrap();
    let got = objective(svm.weights[0], svm.bias, &x, &y, lambda);
    assert!(got <= best + 5e-3, "pegasos {got} vs grid {best}");
}

#[test]
fn one_neighbour_memorises_training_data() {
    let c = gen_cohort(80, &CohortParams::default(), 0.5, 2).unwrap();
    let x: Vec<Vec<f64>> = c.iter().map(|s| FeatureView::Both.features(s)).collect();
    let y: Vec<bool> = c.iter().map(|s| s.preterm).collect();
    let knn = Knn::fit(&x, &y, 1).unwrap();
    assert!(x.iter().zip(&y).all(|(q, &l)| knn.predict(q).0 == l));
}

#[test]
fn cross_validation_is_deterministic() {
    let c = gen_cohort(100, &CohortParams::default(), 0.4, 8).unwrap();
    for spec in Hyperparams::default().all() {
        let a = cross_validate(&c, FeatureView::I, spec, 5, 4).unwrap();
        let b = cross_validate(&c, FeatureView::I, spec, 5, 4).unwrap();
        assert_eq!(a.predictions, b.predictions);
        assert_eq!(a.cm.total(), 100);
    }
}

#[test]
fn line_fit_is_exact() {
    let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
    let f = linreg(&x, &y).unwrap();
    assert!((f.slope - 2.0).abs() < 1e-9 && (f.intercept - 1.0).abs() < 1e-9);
    assert!(f.rmse < 1e-9 && (f.pearson_r - 1.0).abs() < 1e-9);
}
