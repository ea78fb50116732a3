//! Analytic rate-distortion model of block-based video coding with
//! spatio-temporal down-scaling.
//!
//! The library estimates second-order statistics of a raw grayscale video,
//! predicts the end-to-end mean-squared error of coding a down-scaled version
//! of it at a given bit-rate, and searches candidate down-scaling factors for
//! the one with the best predicted quality.
//!
//! The model chain: bits-per-slice drives the inter/skip coding-mode split,
//! the motion-compensated prediction residual is described by a separable
//! first-order Markov process whose variance folds in spatial-scaling and
//! compression noise, transform coding of the residual is priced coefficient
//! by coefficient, and discarded frames are charged with the error of
//! motion-compensated frame interpolation.

pub mod config;
pub mod error;
pub mod mode;
pub mod residual;
pub mod slicing;
pub mod spatial;
pub mod system;
pub mod transform;
pub mod video;

pub use config::ModelConfig;
pub use error::{Error, Result};
pub use slicing::{BitBudget, ScalingChoice, SlicingParams};
pub use system::RdPrediction;
pub use video::VideoStats;
