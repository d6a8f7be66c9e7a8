use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Knn {
    pub k: usize,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<bool>,
}

impl Knn {
    pub fn fit(x: &[Vec<f64>], y: &[bool], k: usize) -> Result<Self> {
        super::check_xy(x, y)?;
        if k == 0 || k > x.len() {
            return Err(Error::invalid(format!(
                "k = {k} with {} training samples",
                x.len()
            )));
        }
        Ok(Self {
            k,
            x: x.to_vec(),
            y: y.to_vec(),
        })
    }

    /// Label and fraction of preterm votes among the `k` nearest training
    /// points. Distance ties go to the earlier training point; an even vote
    /// goes to control.
    pub fn predict(&self, q: &[f64]) -> (bool, f64) {
        let mut d: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, r)| {
                (
                    r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(),
                    i,
                )
            })
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let votes = d[..self.k].iter().filter(|&&(_, i)| self.y[i]).count();
        let frac = votes as f64 / self.k as f64;
        (frac > 0.5, frac)
    }
}
