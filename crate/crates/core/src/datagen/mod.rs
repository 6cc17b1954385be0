//! Synthetic terrain scans: generation, corruption, labeling, persistence.
//!
//! Three terrain classes are generated directly in the ground frame (`z` up,
//! `x` forward, origin on the ground under the camera): a level-ground plane
//! and ascending/descending staircases built from horizontal treads and
//! vertical risers. Only faces that look toward the camera receive points,
//! reproducing the single-viewpoint character of a depth scan; descending
//! staircases therefore show treads only.
//!
//! Two regimes stand in for the mixed simulated/real corpus this data mimics:
//! `clean-sim` (no corruption) and `noisy-sim` (Gaussian jitter plus side-wall
//! and leg interference outliers). The regime is recorded per sample in the
//! manifest so downstream results never conflate the two.
//!
//! Everything is reproducible from the manifest alone: per-sample seeds drive
//! parameter draws, surface sampling, corruption, and downsampling, and the
//! stored coordinates are quantized to `f32` so rebuilt datasets are
//! byte-identical to saved ones.

mod dataset;
mod noise;
mod oracle;
mod terrain;

pub use dataset::{build_dataset, Dataset, DatasetSpec, Manifest, SampleRecord, Split};
pub use noise::add_noise_and_outliers;
pub use oracle::{label_oracle, label_oracle_with_threshold, ORACLE_MIN_POINTS, ORACLE_SLOPE_THRESHOLD};
pub use terrain::{gen_level_ground, gen_stairs, StairDirection};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::DetRng;

/// Concrete geometry for one generated sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerrainParams {
    /// Riser height, m.
    pub step_height: f64,
    /// Tread depth, m.
    pub step_depth: f64,
    /// Stair width, m.
    pub step_width: f64,
    /// Tread count (the approach floor is tread 0).
    pub num_steps: usize,
    /// Half-width of the level-ground square, m.
    pub extent: f64,
    /// Camera height above the ground underfoot, m (belt-worn).
    pub camera_height: f64,
    /// Surface points sampled before downsampling.
    pub points_raw: usize,
}

impl TerrainParams {
    /// Positivity checks; range membership is [`GenRanges::validate`]'s job.
    pub fn validate(&self) -> Result<()> {
        let all_positive = self.step_height > 0.0
            && self.step_depth > 0.0
            && self.step_width > 0.0
            && self.num_steps > 0
            && self.extent > 0.0
            && self.camera_height > 0.0
            && self.points_raw > 0;
        if !all_positive {
            return Err(Error::InvalidParam(format!(
                "terrain parameters must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Per-sample parameter ranges. These live in the manifest, not in code, so a
/// dataset documents the exact distribution it was drawn from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenRanges {
    pub step_height: (f64, f64),
    pub step_depth: (f64, f64),
    pub step_width: (f64, f64),
    /// Inclusive.
    pub num_steps: (usize, usize),
    pub extent: (f64, f64),
    pub camera_height: (f64, f64),
    pub points_raw: usize,
}

impl Default for GenRanges {
    /// Building-code-like stair dimensions and a belt-worn camera.
    fn default() -> Self {
        GenRanges {
            step_height: (0.10, 0.20),
            step_depth: (0.25, 0.35),
            step_width: (0.8, 1.5),
            num_steps: (3, 8),
            extent: (1.5, 3.0),
            camera_height: (0.8, 1.1),
            points_raw: 4096,
        }
    }
}

impl GenRanges {
    pub fn validate(&self) -> Result<()> {
        let ordered = self.step_height.0 > 0.0
            && self.step_height.0 <= self.step_height.1
            && self.step_depth.0 > 0.0
            && self.step_depth.0 <= self.step_depth.1
            && self.step_width.0 > 0.0
            && self.step_width.0 <= self.step_width.1
            && self.num_steps.0 > 0
            && self.num_steps.0 <= self.num_steps.1
            && self.extent.0 > 0.0
            && self.extent.0 <= self.extent.1
            && self.camera_height.0 > 0.0
            && self.camera_height.0 <= self.camera_height.1
            && self.points_raw > 0;
        if !ordered {
            return Err(Error::InvalidParam(format!(
                "generator ranges must be positive and ordered: {self:?}"
            )));
        }
        Ok(())
    }

    /// Draws one parameter set. Field order is fixed; changing it would break
    /// dataset reproducibility.
    pub fn sample(&self, rng: &mut DetRng) -> TerrainParams {
        let step_height = rng.uniform_in(self.step_height.0, self.step_height.1);
        let step_depth = rng.uniform_in(self.step_depth.0, self.step_depth.1);
        let step_width = rng.uniform_in(self.step_width.0, self.step_width.1);
        let num_steps = self.num_steps.0 + rng.index(self.num_steps.1 - self.num_steps.0 + 1);
        let extent = rng.uniform_in(self.extent.0, self.extent.1);
        let camera_height = rng.uniform_in(self.camera_height.0, self.camera_height.1);
        TerrainParams {
            step_height,
            step_depth,
            step_width,
            num_steps,
            extent,
            camera_height,
            points_raw: self.points_raw,
        }
    }
}

/// Sensor corruption description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Standard deviation of i.i.d. Gaussian jitter per coordinate, m.
    pub gaussian_sigma: f64,
    /// Fraction of points replaced by interference outliers, in `[0, 0.3)`.
    pub outlier_fraction: f64,
    pub outlier_kinds: Vec<OutlierKind>,
}

/// Interference sources seen by a belt-worn depth camera.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierKind {
    /// Vertical plane at the lateral edge of the scene.
    SideWall,
    /// Vertical cylinder near the camera (the wearer's leg).
    Leg,
}

impl NoiseParams {
    /// No corruption at all.
    pub fn clean() -> Self {
        NoiseParams {
            gaussian_sigma: 0.0,
            outlier_fraction: 0.0,
            outlier_kinds: vec![],
        }
    }

    /// Default noisy-sim regime: 2 cm jitter, 10% outliers of both kinds.
    pub fn noisy() -> Self {
        NoiseParams {
            gaussian_sigma: 0.02,
            outlier_fraction: 0.10,
            outlier_kinds: vec![OutlierKind::SideWall, OutlierKind::Leg],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gaussian_sigma >= 0.0 && self.gaussian_sigma.is_finite()) {
            return Err(Error::InvalidParam("gaussian_sigma must be finite and >= 0".into()));
        }
        if !(0.0..0.3).contains(&self.outlier_fraction) {
            return Err(Error::InvalidParam(
                "outlier_fraction must lie in [0, 0.3)".into(),
            ));
        }
        if self.outlier_fraction > 0.0 && self.outlier_kinds.is_empty() {
            return Err(Error::InvalidParam(
                "outlier_fraction > 0 needs at least one outlier kind".into(),
            ));
        }
        Ok(())
    }
}

/// Data regime tag, kept per sample in the manifest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "clean-sim")]
    CleanSim,
    #[serde(rename = "noisy-sim")]
    NoisySim,
}
