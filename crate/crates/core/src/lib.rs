//! Terrain classification from wearable depth point clouds.
//!
//! This crate builds and trains a direction-aware PointNet variant for
//! telling level ground, ascending stairs, and descending stairs apart in
//! gravity-stabilized point clouds. Because the cloud keeps its absolute
//! orientation (no learned spatial transformer and no normalization), the
//! network can use the one cue that separates up stairs from down stairs:
//! which way the ground goes as distance increases.
//!
//! Modules, in dependency order:
//!
//! - [`numcore`]: dense tensors, linear layers, softmax cross-entropy, Adam,
//!   and a finite-difference gradient oracle. Generic over [`Scalar`].
//! - [`geometry`]: point clouds, Euler-angle stabilization, seeded
//!   downsampling, box cropping.
//! - [`datagen`]: synthetic level-ground and staircase scans with sensor
//!   noise and interference outliers, plus a geometric label oracle and a
//!   reproducible on-disk dataset format.
//! - [`model`]: the classifier itself (shared per-point MLP, max pool,
//!   classifier head), hand-rolled backprop, the training loop, efficiency
//!   accounting, and checkpoints.
//! - [`analysis`]: critical-point extraction, upper-bound point sets, and the
//!   feature-length sweep.
//!
//! Design rules that hold everywhere: all learning math runs in `f64`
//! (dataset files store `f32` coordinates); every random draw flows from an
//! explicit seed through [`rng::DetRng`]; results are bit-reproducible for a
//! given seed regardless of worker count.

pub mod analysis;
pub mod datagen;
pub mod error;
pub mod geometry;
pub mod model;
pub mod numcore;
pub mod rng;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` tensor, the working type of the training pipeline.
pub type Tensor = numcore::Tensor2D<f64>;

/// `f64` point cloud, the working type of the data pipeline.
pub type Cloud = geometry::PointCloud<f64>;
