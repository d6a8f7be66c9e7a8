//! Segmentation overlap, regression and classification metrics.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::BinaryMask;

fn overlap_counts(a: &BinaryMask, b: &BinaryMask) -> Result<(usize, usize, usize)> {
    if !a.same_dims(b) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let (mut inter, mut na, mut nb) = (0, 0, 0);
    for (&x, &y) in a.bits().iter().zip(b.bits()) {
        na += x as usize;
        nb += y as usize;
        inter += (x && y) as usize;
    }
    if na + nb == 0 {
        return Err(Error::Undefined);
    }
    Ok((inter, na, nb))
}

/// Intersection over union.
pub fn jaccard(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    let (i, na, nb) = overlap_counts(a, b)?;
    Ok(i as f64 / (na + nb - i) as f64)
}

pub fn dice(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    let (i, na, nb) = overlap_counts(a, b)?;
    Ok(2.0 * i as f64 / (na + nb) as f64)
}

fn check_pair(x: &[f64], y: &[f64], min: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} values",
            x.len(),
            y.len()
        )));
    }
    if x.len() < min {
        return Err(Error::invalid(format!("need at least {min} values")));
    }
    Ok(())
}

pub fn rmse(est: &[f64], gt: &[f64]) -> Result<f64> {
    check_pair(est, gt, 1)?;
    let sse: f64 = est.iter().zip(gt).map(|(e, g)| (e - g) * (e - g)).sum();
    Ok((sse / est.len() as f64).sqrt())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Centred sums `(sxx, sxy, syy)`.
fn co_moments(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let (mx, my) = (mean(x), mean(y));
    x.iter()
        .zip(y)
        .fold((0.0, 0.0, 0.0), |(xx, xy, yy), (a, b)| {
            let (da, db) = (a - mx, b - my);
            (xx + da * da, xy + da * db, yy + db * db)
        })
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y, 2)?;
    let (sxx, sxy, syy) = co_moments(x, y);
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the residuals `y - (slope * x + intercept)`.
    pub rmse: f64,
    pub pearson_r: f64,
}

/// Ordinary least squares `y ~ slope * x + intercept`.
pub fn linreg(x: &[f64], y: &[f64]) -> Result<RegressionFit> {
    check_pair(x, y, 2)?;
    let (sxx, sxy, _) = co_moments(x, y);
    if sxx == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let slope = sxy / sxx;
    let intercept = mean(y) - slope * mean(x);
    let fitted: Vec<f64> = x.iter().map(|v| slope * v + intercept).collect();
    Ok(RegressionFit {
        slope,
        intercept,
        rmse: rmse(&fitted, y)?,
        pearson_r: pearson(x, y)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Sample standard deviation; 0 for a single value.
    pub sd: f64,
}

pub fn summary_stats(v: &[f64]) -> Result<Summary> {
    if v.is_empty() {
        return Err(Error::invalid("summary of an empty sequence"));
    }
    let m = mean(v);
    let sd = if v.len() < 2 {
        0.0
    } else {
        (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    Ok(Summary {
        mean: m,
        min: v.iter().copied().fold(f64::INFINITY, f64::min),
        max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        sd,
    })
}

/// Binary confusion matrix; the positive class is preterm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        Self { tp, fp, fn_, tn }
    }

    pub fn from_predictions(truth: &[bool], predicted: &[bool]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::DimensionMismatch("labels vs predictions".into()));
        }
        let mut cm = Self::default();
        for (&t, &p) in truth.iter().zip(predicted) {
            match (t, p) {
                (true, true) => cm.tp += 1,
                (false, true) => cm.fp += 1,
                (true, false) => cm.fn_ += 1,
                (false, false) => cm.tn += 1,
            }
        }
        Ok(cm)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    /// Absent when nothing was predicted positive.
    pub precision: Option<f64>,
    /// Absent when there are no actual positives.
    pub recall: Option<f64>,
    /// False negatives over all samples.
    pub fn_rate_total: f64,
    /// False positives over all samples.
    pub fp_rate_total: f64,
}

pub fn classification_metrics(cm: &ConfusionMatrix) -> Result<ClassificationMetrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::invalid("empty confusion matrix"));
    }
    let t = total as f64;
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    Ok(ClassificationMetrics {
        accuracy: (cm.tp + cm.tn) as f64 / t,
        precision: ratio(cm.tp, cm.tp + cm.fp),
        recall: ratio(cm.tp, cm.tp + cm.fn_),
        fn_rate_total: cm.fn_ as f64 / t,
        fp_rate_total: cm.fp as f64 / t,
    })
}

/// Probability that a random positive scores above a random negative, ties
/// counting one half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch("scores vs labels".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("NaN score"));
    }
    let pos: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l)
        .map(|(&s, _)| s)
        .collect();
    let neg: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| !l)
        .map(|(&s, _)| s)
        .collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::SingleClass);
    }
    // Count in halves so the sum stays an exact integer.
    let mut halves: u64 = 0;
    for &p in &pos {
        for &n in &neg {
            halves += match p.partial_cmp(&n).expect("no NaN") {
                std::cmp::Ordering::Greater => 2,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Less => 0,
            };
        }
    }
    Ok(halves as f64 / (2 * pos.len() * neg.len()) as f64)
}

/// Reference confusion matrix of the best reported classifier (naive Bayes,
/// both trimesters) and the accuracy its summary table lists for it.
pub const REFERENCE_CM: ConfusionMatrix = ConfusionMatrix {
    tp: 31,
    fp: 16,
    fn_: 21,
    tn: 46,
};
pub const REFERENCE_TABLE_ACCURACY: f64 = 0.775;

/// Footnote stating the reference arithmetic and its disagreement with the
/// tabulated accuracy.
pub fn reference_footnote() -> String {
    let m = classification_metrics(&REFERENCE_CM).expect("non-empty");
    format!(
        "note: reference confusion matrix tn={} fp={} fn={} tp={} gives accuracy {:.4} \
         (fn {:.4}, fp {:.4} of all samples), but the reference summary table lists \
         accuracy {:.3} for the same classifier (naive Bayes, I+II)",
        REFERENCE_CM.tn,
        REFERENCE_CM.fp,
        REFERENCE_CM.fn_,
        REFERENCE_CM.tp,
        m.accuracy,
        m.fn_rate_total,
        m.fp_rate_total,
        REFERENCE_TABLE_ACCURACY
    )
}

/// One row of a classifier comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub classifier: String,
    pub trimester: String,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub auc: Option<f64>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.4}"))
}

pub const RESULT_COLUMNS: [&str; 6] = [
    "classifier",
    "trimester",
    "accuracy",
    "precision",
    "recall",
    "auc",
];

pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut s = RESULT_COLUMNS.join(",");
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{:.4},{},{},{}",
            r.classifier,
            r.trimester,
            r.accuracy,
            opt(r.precision),
            opt(r.recall),
            opt(r.auc)
        );
    }
    s
}

/// Aligned plain-text table followed by the reference footnote.
pub fn results_table(rows: &[ResultRow]) -> String {
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.classifier.clone(),
                r.trimester.clone(),
                format!("{:.4}", r.accuracy),
                opt(r.precision),
                opt(r.recall),
                opt(r.auc),
            ]
        })
        .collect();
    let mut width = RESULT_COLUMNS.map(str::len);
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut s = String::new();
    let line = |s: &mut String, row: &[&str]| {
        let parts: Vec<String> = row
            .iter()
            .zip(width)
            .enumerate()
            .map(|(i, (c, w))| {
                if i < 2 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        let _ = writeln!(s, "{}", parts.join("  ").trim_end());
    };
    line(&mut s, &RESULT_COLUMNS);
    let rule: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
    let _ = writeln!(s, "{}", rule.join("  "));
    for row in &cells {
        line(&mut s, &row.iter().map(String::as_str).collect::<Vec<_>>());
    }
    s.push('\n');
    s.push_str(&reference_footnote());
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(bits: &[u8]) -> BinaryMask {
        BinaryMask::from_bits(bits.len(), 1, bits.iter().map(|&b| b == 1).collect()).unwrap()
    }

    #[test]
    fn overlap_examples() {
        let a = mask(&[1, 1, 1, 0]);
        let b = mask(&[1, 1, 0, 0]);
        assert!((jaccard(&a, &b).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((dice(&a, &b).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(jaccard(&a, &a).unwrap(), 1.0);
        assert_eq!(dice(&mask(&[1, 0]), &mask(&[0, 1])).unwrap(), 0.0);
        assert!(matches!(
            jaccard(&mask(&[0, 0]), &mask(&[0, 0])),
            Err(Error::Undefined)
        ));
        assert!(jaccard(&mask(&[1]), &mask(&[1, 0])).is_err());
    }

    #[test]
    fn rmse_examples() {
        assert!((rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(rmse(&[], &[]).is_err());
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[-1.0, -2.0, -3.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(
            pearson(&[1.0, 1.0], &[1.0, 2.0]),
            Err(Error::ZeroVariance)
        ));
    }

    #[test]
    fn linreg_examples() {
        let f = linreg(&[0.0, 1.0, 2.0], &[0.0, 1.0, 1.0]).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-15);
        assert!((f.intercept - 1.0 / 6.0).abs() < 1e-15);
        let g = linreg(&[2.0, 1.0, 0.0], &[1.0, 1.0, 0.0]).unwrap();
        assert!((f.slope - g.slope).abs() < 1e-15 && (f.intercept - g.intercept).abs() < 1e-15);
    }

    #[test]
    fn summary_examples() {
        let s = summary_stats(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.min, s.max, s.sd), (2.0, 1.0, 3.0, 1.0));
        let s = summary_stats(&[5.0]).unwrap();
        assert_eq!((s.mean, s.min, s.max, s.sd), (5.0, 5.0, 5.0, 0.0));
        assert!(summary_stats(&[]).is_err());
    }

    #[test]
    fn reference_counts() {
        let m = classification_metrics(&REFERENCE_CM).unwrap();
        assert_eq!(format!("{:.4}", m.fn_rate_total), "0.1842");
        assert_eq!(format!("{:.4}", m.fp_rate_total), "0.1404");
        assert!((m.accuracy - 77.0 / 114.0).abs() < 1e-15);
        assert!((m.precision.unwrap() - 31.0 / 47.0).abs() < 1e-15);
        assert!((m.recall.unwrap() - 31.0 / 52.0).abs() < 1e-15);
    }

    #[test]
    fn undefined_ratios_are_absent() {
        let m = classification_metrics(&ConfusionMatrix::new(0, 0, 3, 4)).unwrap();
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, Some(0.0));
        let m = classification_metrics(&ConfusionMatrix::new(0, 2, 0, 4)).unwrap();
        assert_eq!(m.recall, None);
        assert!(classification_metrics(&ConfusionMatrix::default()).is_err());
        let p = classification_metrics(&ConfusionMatrix::new(5, 0, 0, 5)).unwrap();
        assert_eq!(
            (p.accuracy, p.precision, p.recall),
            (1.0, Some(1.0), Some(1.0))
        );
    }

    #[test]
    fn auc_examples() {
        assert_eq!(
            roc_auc(&[0.9, 0.4, 0.6], &[true, false, true]).unwrap(),
            1.0
        );
        assert_eq!(
            roc_auc(&[0.3, 0.4, 0.6], &[true, false, true]).unwrap(),
            0.5
        );
        assert_eq!(
            roc_auc(&[1.0, 1.0, 1.0], &[true, false, true]).unwrap(),
            0.5
        );
        assert!(matches!(
            roc_auc(&[1.0, 2.0], &[true, true]),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn table_has_footnote() {
        let rows = vec![ResultRow {
            classifier: "gnb".into(),
            trimester: "I+II".into(),
            accuracy: 0.75,
            precision: None,
            recall: Some(0.5),
            auc: Some(0.8),
        }];
        let t = results_table(&rows);
        assert!(t.contains("0.6754") && t.contains("0.775"));
        assert!(t.lines().nth(2).unwrap().contains("NA"));
        assert_eq!(
            results_csv(&rows),
            "classifier,trimester,accuracy,precision,recall,auc\ngnb,I+II,0.7500,NA,0.5000,0.8000\n"
        );
    }
}
