use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};

use crate::classify::CohortSample;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Feature means and standard deviations of one class, in the order
/// `cl_t1, aca_t1, cl_t2, aca_t2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassParams {
    pub mean: [f64; 4],
    pub sd: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CohortParams {
    pub control: ClassParams,
    pub preterm: ClassParams,
}

impl Default for CohortParams {
    /// Overlapping classes: shorter canals and wider angles for preterm.
    fn default() -> Self {
        Self {
            control: ClassParams {
                mean: [38.0, 100.0, 37.0, 102.0],
                sd: [6.0, 14.0, 6.0, 14.0],
            },
            preterm: ClassParams {
                mean: [33.5, 109.0, 33.0, 110.0],
                sd: [6.5, 15.0, 7.0, 15.0],
            },
        }
    }
}

impl CohortParams {
    /// Widely separated classes with narrow spread.
    pub fn separable() -> Self {
        Self {
            control: ClassParams {
                mean: [40.0, 95.0, 40.0, 95.0],
                sd: [1.0, 2.0, 1.0, 2.0],
            },
            preterm: ClassParams {
                mean: [20.0, 140.0, 20.0, 140.0],
                sd: [1.0, 2.0, 1.0, 2.0],
            },
        }
    }
}

/// Seeded cohort with exactly `round(n * balance)` preterm samples in a
/// shuffled order.
pub fn gen_cohort(
    n: usize,
    params: &CohortParams,
    balance: f64,
    seed: u64,
) -> Result<Vec<CohortSample>> {
    if n < 2 {
        return Err(Error::invalid("cohort needs at least 2 samples"));
    }
    if !(balance > 0.0 && balance < 1.0) {
        return Err(Error::invalid("balance must be in (0, 1)"));
    }
    let dists = |c: &ClassParams| -> Result<Vec<Normal<f64>>> {
        c.mean
            .iter()
            .zip(&c.sd)
            .map(|(&m, &s)| {
                if !(s > 0.0 && s.is_finite() && m.is_finite()) {
                    return Err(Error::invalid(
                        "class sds must be positive and means finite",
                    ));
                }
                Normal::new(m, s).map_err(|e| Error::invalid(e.to_string()))
            })
            .collect()
    };
    let control = dists(&params.control)?;
    let preterm = dists(&params.preterm)?;

    let n_pre = (n as f64 * balance).round() as usize;
    let mut labels: Vec<bool> = (0..n).map(|i| i < n_pre).collect();
    labels.shuffle(&mut stream_rng(seed, "cohort/labels"));
    let mut rng = stream_rng(seed, "cohort/features");
    let width = n.to_string().len();
    Ok(labels
        .into_iter()
        .enumerate()
        .map(|(i, preterm_label)| {
            let d = if preterm_label { &preterm } else { &control };
            let f: Vec<f64> = d.iter().map(|x| x.sample(&mut rng)).collect();
            CohortSample {
                id: format!("s{:0width$}", i + 1),
                cl_t1: f[0],
                aca_t1: f[1],
                cl_t2: f[2],
                aca_t2: f[3],
                preterm: preterm_label,
            }
        })
        .collect())
}

/// Copy of `samples` with labels permuted by a seeded shuffle.
pub fn shuffle_labels(samples: &[CohortSample], seed: u64) -> Vec<CohortSample> {
    let mut labels: Vec<bool> = samples.iter().map(|s| s.preterm).collect();
    labels.shuffle(&mut stream_rng(seed, "cohort/label-shuffle"));
    samples
        .iter()
        .zip(labels)
        .map(|(s, l)| CohortSample {
            preterm: l,
            ..s.clone()
        })
        .collect()
}
