//! Cervical length and anterior cervical angle from cervix segmentation
//! masks, plus the evaluation and classification stages around them.

pub mod classify;
pub mod error;
pub mod evalmetrics;
pub mod geometry;
pub mod markers;
pub mod raster;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
