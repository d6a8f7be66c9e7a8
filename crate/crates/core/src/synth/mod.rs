//! Synthetic masks with analytic ground truth, and synthetic cohorts.

mod cohort;
mod shapes;

pub use cohort::{gen_cohort, shuffle_labels, ClassParams, CohortParams};
pub use shapes::{
    annulus_medial_length, oracle_suite, rasterize, GroundTruth, ShapeKind, ShapeSpec,
};
