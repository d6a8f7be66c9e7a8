//! Preterm vs control classification from per-trimester CL and ACA.

mod gnb;
mod knn;
mod svm;
mod tree;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use log::warn;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

pub use gnb::{posterior_from_log, Gnb, VARIANCE_FLOOR};
pub use knn::Knn;
pub use svm::{LinearSvm, SvmParams};
pub use tree::{Node, Tree};

use crate::error::{Error, Result};
use crate::evalmetrics::{
    classification_metrics, results_table, roc_auc, ConfusionMatrix, ResultRow,
};
use crate::rng::stream_rng;

#[derive(Debug, Clone, PartialEq)]
pub struct CohortSample {
    pub id: String,
    pub cl_t1: f64,
    pub aca_t1: f64,
    pub cl_t2: f64,
    pub aca_t2: f64,
    /// `true` for preterm.
    pub preterm: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureView {
    I,
    II,
    Both,
}

impl FeatureView {
    pub const ALL: [FeatureView; 3] = [FeatureView::I, FeatureView::II, FeatureView::Both];

    pub fn features(self, s: &CohortSample) -> Vec<f64> {
        match self {
            FeatureView::I => vec![s.cl_t1, s.aca_t1],
            FeatureView::II => vec![s.cl_t2, s.aca_t2],
            FeatureView::Both => vec![s.cl_t1, s.aca_t1, s.cl_t2, s.aca_t2],
        }
    }
}

impl fmt::Display for FeatureView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureView::I => "I",
            FeatureView::II => "II",
            FeatureView::Both => "I+II",
        })
    }
}

impl FromStr for FeatureView {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace(' ', "").as_str() {
            "I" | "1" => Ok(FeatureView::I),
            "II" | "2" => Ok(FeatureView::II),
            "I+II" | "BOTH" | "12" => Ok(FeatureView::Both),
            other => Err(Error::invalid(format!("unknown view {other:?}"))),
        }
    }
}

pub(crate) fn check_xy(x: &[Vec<f64>], y: &[bool]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch("features vs labels".into()));
    }
    let d = x[0].len();
    if d == 0 || x.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch("ragged feature rows".into()));
    }
    Ok(())
}

/// Per-feature z-score parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    /// Population standard deviation; 0 marks a constant feature.
    pub sd: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::invalid("empty training set"))?;
        let d = first.len();
        let n = rows.len() as f64;
        let mean: Vec<f64> = (0..d)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect();
        let sd: Vec<f64> = (0..d)
            .map(|j| (rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt())
            .collect();
        for (j, &s) in sd.iter().enumerate() {
            if s == 0.0 {
                warn!("feature {j} is constant in the training set; mapped to 0");
            }
        }
        Ok(Self { mean, sd })
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.sd))
            .map(|(v, (m, s))| if *s == 0.0 { 0.0 } else { (v - m) / s })
            .collect()
    }
}

pub struct Standardized {
    pub train: Vec<Vec<f64>>,
    pub test: Vec<Vec<f64>>,
    pub params: Standardizer,
}

/// Z-score both sets with statistics of `train` only.
pub fn standardize_fit_apply(
    train: &[CohortSample],
    test: &[CohortSample],
    view: FeatureView,
) -> Result<Standardized> {
    let raw: Vec<Vec<f64>> = train.iter().map(|s| view.features(s)).collect();
    let params = Standardizer::fit(&raw)?;
    Ok(Standardized {
        train: raw.iter().map(|r| params.apply(r)).collect(),
        test: test
            .iter()
            .map(|s| params.apply(&view.features(s)))
            .collect(),
        params,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassifierSpec {
    Gnb,
    Knn { k: usize },
    Tree { max_depth: usize, min_leaf: usize },
    Svm { lambda: f64, epochs: usize },
}

impl ClassifierSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierSpec::Gnb => "gnb",
            ClassifierSpec::Knn { .. } => "knn",
            ClassifierSpec::Tree { .. } => "tree",
            ClassifierSpec::Svm { .. } => "svm",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ClassifierSpec::Gnb => format!("gnb var_floor={VARIANCE_FLOOR:e}"),
            ClassifierSpec::Knn { k } => format!("knn k={k}"),
            ClassifierSpec::Tree {
                max_depth,
                min_leaf,
            } => {
                format!("tree max_depth={max_depth} min_leaf={min_leaf}")
            }
            ClassifierSpec::Svm { lambda, epochs } => {
                format!("svm lambda={lambda:e} epochs={epochs}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub k: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            k: 5,
            max_depth: 4,
            min_leaf: 5,
            lambda: 1e-3,
            epochs: 200,
        }
    }
}

impl Hyperparams {
    /// The four classifiers, in report order.
    pub fn all(&self) -> [ClassifierSpec; 4] {
        [
            ClassifierSpec::Svm {
                lambda: self.lambda,
                epochs: self.epochs,
            },
            ClassifierSpec::Knn { k: self.k },
            ClassifierSpec::Gnb,
            ClassifierSpec::Tree {
                max_depth: self.max_depth,
                min_leaf: self.min_leaf,
            },
        ]
    }

    pub fn by_name(&self, name: &str) -> Result<ClassifierSpec> {
        let all = self.all();
        let key = match name.trim().to_ascii_lowercase().as_str() {
            "linear_svm" => "svm".to_string(),
            "nb" | "bayes" => "gnb".to_string(),
            other => other.to_string(),
        };
        all.into_iter()
            .find(|c| c.name() == key)
            .ok_or_else(|| Error::invalid(format!("unknown model {name:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Gnb(Gnb),
    Knn(Knn),
    Tree(Tree),
    Svm(LinearSvm),
}

/// A fitted classifier together with its standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub model: Model,
    pub scaler: Standardizer,
    pub view: FeatureView,
}

impl TrainedModel {
    pub fn train(
        spec: ClassifierSpec,
        train: &[CohortSample],
        view: FeatureView,
        seed: u64,
    ) -> Result<Self> {
        let std = standardize_fit_apply(train, &[], view)?;
        let y: Vec<bool> = train.iter().map(|s| s.preterm).collect();
        let model = fit_model(spec, &std.train, &y, seed)?;
        Ok(Self {
            model,
            scaler: std.params,
            view,
        })
    }

    /// Label and score; the label is positive exactly when the score is
    /// above the model's threshold.
    pub fn predict(&self, s: &CohortSample) -> (bool, f64) {
        predict_model(&self.model, &self.scaler.apply(&self.view.features(s)))
    }
}

fn fit_model(spec: ClassifierSpec, x: &[Vec<f64>], y: &[bool], seed: u64) -> Result<Model> {
    Ok(match spec {
        ClassifierSpec::Gnb => Model::Gnb(Gnb::fit(x, y)?),
        ClassifierSpec::Knn { k } => Model::Knn(Knn::fit(x, y, k)?),
        ClassifierSpec::Tree {
            max_depth,
            min_leaf,
        } => Model::Tree(Tree::fit(x, y, max_depth, min_leaf)?),
        ClassifierSpec::Svm { lambda, epochs } => Model::Svm(LinearSvm::fit(
            x,
            y,
            SvmParams {
                lambda,
                epochs,
                seed,
            },
        )?),
    })
}

fn predict_model(m: &Model, x: &[f64]) -> (bool, f64) {
    match m {
        Model::Gnb(g) => g.predict(x),
        Model::Knn(k) => k.predict(x),
        Model::Tree(t) => t.predict(x),
        Model::Svm(s) => s.predict(x),
    }
}

/// Test-fold index lists for stratified k-fold cross-validation.
///
/// Each class is shuffled with its own seeded stream and dealt round-robin
/// over the folds; the dealing position carries over from one class to the
/// next so fold sizes differ by at most one.
pub fn stratified_kfold(labels: &[bool], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::invalid("need at least 2 folds"));
    }
    let mut folds = vec![Vec::new(); k];
    let mut pos = 0;
    for (class, stream) in [(false, "folds/control"), (true, "folds/preterm")] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < k {
            return Err(Error::ClassTooSmall {
                count: idx.len(),
                folds: k,
            });
        }
        idx.shuffle(&mut stream_rng(seed, stream));
        for i in idx {
            folds[pos % k].push(i);
            pos += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub index: usize,
    pub truth: bool,
    pub label: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub classifier: ClassifierSpec,
    pub view: FeatureView,
    pub folds: usize,
    pub seed: u64,
    pub cm: ConfusionMatrix,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    /// Pooled out-of-fold AUC.
    pub auc: f64,
    pub fold_accuracies: Vec<f64>,
    pub mean_fold_accuracy: f64,
    /// Out-of-fold predictions sorted by sample index.
    pub predictions: Vec<Prediction>,
}

impl EvalReport {
    pub fn row(&self) -> ResultRow {
        ResultRow {
            classifier: self.classifier.name().to_string(),
            trimester: self.view.to_string(),
            accuracy: self.accuracy,
            precision: self.precision,
            recall: self.recall,
            auc: Some(self.auc),
        }
    }
}

pub fn cross_validate(
    samples: &[CohortSample],
    view: FeatureView,
    spec: ClassifierSpec,
    k: usize,
    seed: u64,
) -> Result<EvalReport> {
    let labels: Vec<bool> = samples.iter().map(|s| s.preterm).collect();
    let folds = stratified_kfold(&labels, k, seed)?;
    let mut predictions = Vec::with_capacity(samples.len());
    let mut fold_accuracies = Vec::with_capacity(k);
    for (f, test_idx) in folds.iter().enumerate() {
        let mut in_test = vec![false; samples.len()];
        for &i in test_idx {
            in_test[i] = true;
        }
        let train: Vec<CohortSample> = (0..samples.len())
            .filter(|&i| !in_test[i])
            .map(|i| samples[i].clone())
            .collect();
        let test: Vec<CohortSample> = test_idx.iter().map(|&i| samples[i].clone()).collect();
        let model = TrainedModel::train(spec, &train, view, seed.wrapping_add(f as u64))?;
        let mut correct = 0;
        for (&i, s) in test_idx.iter().zip(&test) {
            let (label, score) = model.predict(s);
            correct += (label == s.preterm) as usize;
            predictions.push(Prediction {
                index: i,
                truth: s.preterm,
                label,
                score,
            });
        }
        fold_accuracies.push(correct as f64 / test_idx.len() as f64);
    }
    predictions.sort_by_key(|p| p.index);
    let truth: Vec<bool> = predictions.iter().map(|p| p.truth).collect();
    let predicted: Vec<bool> = predictions.iter().map(|p| p.label).collect();
    let scores: Vec<f64> = predictions.iter().map(|p| p.score).collect();
    let cm = ConfusionMatrix::from_predictions(&truth, &predicted)?;
    let m = classification_metrics(&cm)?;
    Ok(EvalReport {
        classifier: spec,
        view,
        folds: k,
        seed,
        cm,
        accuracy: m.accuracy,
        precision: m.precision,
        recall: m.recall,
        auc: roc_auc(&scores, &truth)?,
        mean_fold_accuracy: fold_accuracies.iter().sum::<f64>() / k as f64,
        fold_accuracies,
        predictions,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.4}"))
}

pub fn reports_csv(reports: &[EvalReport]) -> String {
    let mut s = String::from(
        "classifier,trimester,accuracy,precision,recall,auc,mean_fold_accuracy,tp,fp,fn,tn\n",
    );
    for r in reports {
        s.push_str(&format!(
            "{},{},{:.4},{},{},{:.4},{:.4},{},{},{},{}\n",
            r.classifier.name(),
            r.view,
            r.accuracy,
            opt(r.precision),
            opt(r.recall),
            r.auc,
            r.mean_fold_accuracy,
            r.cm.tp,
            r.cm.fp,
            r.cm.fn_,
            r.cm.tn
        ));
    }
    s
}

/// Plain-text report: run settings, result table, confusion matrices.
pub fn reports_text(reports: &[EvalReport], n_samples: usize) -> String {
    let mut s = String::new();
    if let Some(first) = reports.first() {
        s.push_str(&format!(
            "samples={} folds={} seed={} standardization=z-score(train folds)\n",
            n_samples, first.folds, first.seed
        ));
        let mut seen = Vec::new();
        for r in reports {
            let d = r.classifier.describe();
            if !seen.contains(&d) {
                s.push_str(&format!("model: {d}\n"));
                seen.push(d);
            }
        }
        s.push('\n');
    }
    let rows: Vec<ResultRow> = reports.iter().map(EvalReport::row).collect();
    s.push_str(&results_table(&rows));
    s.push_str("\nconfusion matrices (rows actual, columns predicted: control, preterm)\n");
    for r in reports {
        s.push_str(&format!(
            "{} {}: control [{} {}] preterm [{} {}]  fold accuracies [{}] mean {:.4}\n",
            r.classifier.name(),
            r.view,
            r.cm.tn,
            r.cm.fp,
            r.cm.fn_,
            r.cm.tp,
            r.fold_accuracies
                .iter()
                .map(|a| format!("{a:.4}"))
                .collect::<Vec<_>>()
                .join(" "),
            r.mean_fold_accuracy
        ));
    }
    s
}

#[derive(Debug, Serialize, Deserialize)]
struct CohortRow {
    id: String,
    cl_t1: f64,
    aca_t1: f64,
    cl_t2: f64,
    aca_t2: f64,
    label: String,
}

pub const COHORT_HEADER: &str = "id,cl_t1,aca_t1,cl_t2,aca_t2,label";

pub fn read_cohort_csv<R: Read>(input: R, origin: &str) -> Result<Vec<CohortSample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    let expected: Vec<&str> = COHORT_HEADER.split(',').collect();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse {
            path: origin.into(),
            line: 1,
            msg: format!("expected header {COHORT_HEADER}"),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<CohortRow>().enumerate() {
        let line = i + 2;
        let parse_err = |msg: String| Error::Parse {
            path: origin.into(),
            line,
            msg,
        };
        let r = rec.map_err(|e| parse_err(e.to_string()))?;
        let preterm = match r.label.to_ascii_lowercase().as_str() {
            "preterm" | "1" => true,
            "control" | "0" => false,
            other => return Err(parse_err(format!("unknown label {other:?}"))),
        };
        if ![r.cl_t1, r.aca_t1, r.cl_t2, r.aca_t2]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(parse_err("non-finite feature".into()));
        }
        out.push(CohortSample {
            id: r.id,
            cl_t1: r.cl_t1,
            aca_t1: r.aca_t1,
            cl_t2: r.cl_t2,
            aca_t2: r.aca_t2,
            preterm,
        });
    }
    Ok(out)
}

pub fn write_cohort_csv<W: Write>(samples: &[CohortSample], mut out: W) -> Result<()> {
    writeln!(out, "{COHORT_HEADER}")?;
    for s in samples {
        writeln!(
            out,
            "{},{:.4},{:.4},{:.4},{:.4},{}",
            s.id,
            s.cl_t1,
            s.aca_t1,
            s.cl_t2,
            s.aca_t2,
            if s.preterm { "preterm" } else { "control" }
        )?;
    }
    Ok(())
}
