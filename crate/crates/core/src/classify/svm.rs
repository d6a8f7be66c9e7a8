use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Linear SVM trained with the Pegasos stochastic subgradient method. The
/// bias is an extra constant feature and is regularised with the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            lambda: 1e-3,
            epochs: 200,
            seed: 0,
        }
    }
}

impl LinearSvm {
    pub fn fit(x: &[Vec<f64>], y: &[bool], params: SvmParams) -> Result<Self> {
        super::check_xy(x, y)?;
        if !(params.lambda > 0.0) || params.epochs == 0 {
            return Err(Error::invalid(
                "svm needs lambda > 0 and at least one epoch",
            ));
        }
        if y.iter().all(|&l| l) || y.iter().all(|&l| !l) {
            return Err(Error::SingleClass);
        }
        let d = x[0].len();
        let lambda = params.lambda;
        let radius = 1.0 / lambda.sqrt();
        let mut w = vec![0.0; d + 1];
        let mut order: Vec<usize> = (0..x.len()).collect();
        let mut rng = stream_rng(params.seed, "svm");
        let mut t = 0u64;
        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (lambda * t as f64);
                let yi = if y[i] { 1.0 } else { -1.0 };
                let margin = yi * (dot(&w[..d], &x[i]) + w[d]);
                let shrink = 1.0 - eta * lambda;
                for v in &mut w {
                    *v *= shrink;
                }
                if margin < 1.0 {
                    for (wj, xj) in w.iter_mut().zip(&x[i]) {
                        *wj += eta * yi * xj;
                    }
                    w[d] += eta * yi;
                }
                let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > radius {
                    let s = radius / norm;
                    for v in &mut w {
                        *v *= s;
                    }
                }
            }
        }
        let bias = w.pop().expect("bias slot");
        Ok(Self { weights: w, bias })
    }

    /// Label and signed margin; a zero margin goes to control.
    pub fn predict(&self, q: &[f64]) -> (bool, f64) {
        let m = dot(&self.weights, q) + self.bias;
        (m > 0.0, m)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clusters() -> (Vec<Vec<f64>>, Vec<bool>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..10 {
            let o = i as f64 * 0.1;
            x.push(vec![-1.0 - o, -0.5 + o]);
            y.push(false);
            x.push(vec![1.0 + o, 0.5 - o]);
            y.push(true);
        }
        (x, y)
    }

    #[test]
    fn separable_and_deterministic() {
        let (x, y) = clusters();
        let p = SvmParams {
            seed: 3,
            ..Default::default()
        };
        let m = LinearSvm::fit(&x, &y, p).unwrap();
        assert!(x.iter().zip(&y).all(|(r, &l)| m.predict(r).0 == l));
        let again = LinearSvm::fit(&x, &y, p).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn rejects_single_class() {
        let (x, _) = clusters();
        assert!(matches!(
            LinearSvm::fit(&x, &vec![true; x.len()], SvmParams::default()),
            Err(Error::SingleClass)
        ));
    }
}
