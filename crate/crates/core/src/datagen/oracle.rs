//! Ground-truth labeling from cloud geometry alone.
//!
//! The oracle estimates how height changes with distance ahead of the camera
//! and thresholds that slope. Distance is measured as `|x|`, not `x`, so the
//! verdict depends only on the terrain profile and not on which way along the
//! walking axis the cloud happens to face; a half-turn about any horizontal
//! axis (roll or pitch) negates every height and therefore swaps the
//! ascending and descending labels, while a turn about the vertical axis
//! changes nothing.
//!
//! Binned medians stand in for raw points so that interference outliers
//! (walls, legs) and riser points cannot drag the fit.

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, TerrainClass};

/// Slope magnitude below which terrain counts as level, m/m.
pub const ORACLE_SLOPE_THRESHOLD: f64 = 0.05;
/// Minimum cloud size the oracle accepts.
pub const ORACLE_MIN_POINTS: usize = 100;

const NUM_BINS: usize = 10;
const MIN_BIN_POINTS: usize = 5;

/// Labels a cloud with the default slope threshold.
pub fn label_oracle(cloud: &PointCloud<f64>) -> Result<TerrainClass> {
    label_oracle_with_threshold(cloud, ORACLE_SLOPE_THRESHOLD)
}

/// Labels a cloud: bins points by distance ahead `|x|` (5th..95th percentile
/// range, 10 bins), takes the median height per bin, fits a least-squares
/// line through the bin medians, and thresholds its slope. Degenerate
/// profiles (all points at one distance) count as level ground.
pub fn label_oracle_with_threshold(
    cloud: &PointCloud<f64>,
    threshold: f64,
) -> Result<TerrainClass> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::InvalidParam("oracle threshold must be finite and > 0".into()));
    }
    if cloud.len() < ORACLE_MIN_POINTS {
        return Err(Error::TooFewPoints {
            found: cloud.len(),
            required: ORACLE_MIN_POINTS,
        });
    }

    let mut rs: Vec<f64> = cloud.points().iter().map(|p| p[0].abs()).collect();
    rs.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let r_lo = rs[(0.05 * (rs.len() - 1) as f64).floor() as usize];
    let r_hi = rs[(0.95 * (rs.len() - 1) as f64).floor() as usize];
    if !(r_hi > r_lo) {
        return Ok(TerrainClass::LevelGround);
    }

    let width = (r_hi - r_lo) / NUM_BINS as f64;
    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); NUM_BINS];
    for p in cloud.points() {
        let r = p[0].abs();
        if (r_lo..=r_hi).contains(&r) {
            let b = (((r - r_lo) / width) as usize).min(NUM_BINS - 1);
            bins[b].push(p[2]);
        }
    }

    let mut centers = Vec::new();
    let mut medians = Vec::new();
    for (b, zs) in bins.iter_mut().enumerate() {
        if zs.len() < MIN_BIN_POINTS {
            continue;
        }
        zs.sort_by(|a, b| a.partial_cmp(b).expect("finite heights"));
        let mid = zs.len() / 2;
        let median = if zs.len() % 2 == 1 {
            zs[mid]
        } else {
            0.5 * (zs[mid - 1] + zs[mid])
        };
        centers.push(r_lo + (b as f64 + 0.5) * width);
        medians.push(median);
    }
    if centers.len() < 2 {
        return Ok(TerrainClass::LevelGround);
    }

    let c_mean = centers.iter().sum::<f64>() / centers.len() as f64;
    let m_mean = medians.iter().sum::<f64>() / medians.len() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..centers.len() {
        num += (centers[i] - c_mean) * (medians[i] - m_mean);
        den += (centers[i] - c_mean) * (centers[i] - c_mean);
    }
    if den == 0.0 {
        return Ok(TerrainClass::LevelGround);
    }
    let slope = num / den;

    Ok(if slope.abs() < threshold {
        TerrainClass::LevelGround
    } else if slope > 0.0 {
        TerrainClass::UpStairs
    } else {
        TerrainClass::DownStairs
    })
}
