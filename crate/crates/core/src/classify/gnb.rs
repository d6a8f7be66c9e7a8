use crate::error::{Error, Result};

pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Gaussian naive Bayes over standardized features.
#[derive(Debug, Clone, PartialEq)]
pub struct Gnb {
    /// Indexed by class: 0 control, 1 preterm.
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
    pub priors: [f64; 2],
}

impl Gnb {
    pub fn fit(x: &[Vec<f64>], y: &[bool]) -> Result<Self> {
        super::check_xy(x, y)?;
        let d = x[0].len();
        let mut means = [vec![0.0; d], vec![0.0; d]];
        let mut variances = [vec![0.0; d], vec![0.0; d]];
        let mut counts = [0usize; 2];
        for (row, &label) in x.iter().zip(y) {
            let c = label as usize;
            counts[c] += 1;
            for (m, v) in means[c].iter_mut().zip(row) {
                *m += v;
            }
        }
        if counts[0] == 0 || counts[1] == 0 {
            return Err(Error::SingleClass);
        }
        for c in 0..2 {
            for m in &mut means[c] {
                *m /= counts[c] as f64;
            }
        }
        for (row, &label) in x.iter().zip(y) {
            let c = label as usize;
            for j in 0..d {
                let dv = row[j] - means[c][j];
                variances[c][j] += dv * dv;
            }
        }
        for c in 0..2 {
            for v in &mut variances[c] {
                *v = (*v / counts[c] as f64).max(VARIANCE_FLOOR);
            }
        }
        let n = x.len() as f64;
        Ok(Self {
            means,
            variances,
            priors: [counts[0] as f64 / n, counts[1] as f64 / n],
        })
    }

    /// Log prior plus log likelihood of `x` for each class.
    pub fn log_joint(&self, x: &[f64]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (c, o) in out.iter_mut().enumerate() {
            let mut acc = self.priors[c].ln();
            for ((&v, &m), &var) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
                acc -= 0.5 * ((2.0 * std::f64::consts::PI * var).ln() + (v - m) * (v - m) / var);
            }
            *o = acc;
        }
        out
    }

    /// `(control, preterm)` posteriors.
    pub fn posteriors(&self, x: &[f64]) -> (f64, f64) {
        posterior_from_log(self.log_joint(x))
    }

    /// Label and preterm posterior; an exact tie goes to control.
    pub fn predict(&self, x: &[f64]) -> (bool, f64) {
        let (_, p1) = self.posteriors(x);
        (p1 > 0.5, p1)
    }
}

/// Normalised posteriors from unnormalised log joint probabilities.
pub fn posterior_from_log(l: [f64; 2]) -> (f64, f64) {
    let m = l[0].max(l[1]);
    let e0 = (l[0] - m).exp();
    let e1 = (l[1] - m).exp();
    let z = e0 + e1;
    (e0 / z, e1 / z)
}
