//! Seeded downsampling and workspace cropping.

use crate::error::{Error, Result};
use crate::rng::DetRng;
use crate::scalar::Scalar;

use super::{Aabb, PointCloud};

/// Resizes a cloud to exactly `n` points, deterministically in `seed`.
///
/// With at least `n` points the result is a uniform sample without
/// replacement (a partial Fisher-Yates shuffle, so order is also seeded).
/// With fewer, every original point is kept in order and the remainder is
/// filled by uniform resampling with replacement.
pub fn downsample<T: Scalar>(cloud: &PointCloud<T>, n: usize, seed: u64) -> Result<PointCloud<T>> {
    if n == 0 {
        return Err(Error::InvalidParam("downsample target must be >= 1".into()));
    }
    if cloud.is_empty() {
        return Err(Error::Empty("downsample"));
    }
    let mut rng = DetRng::seed(seed);
    let src = cloud.points();
    let len = src.len();
    let points = if len >= n {
        let mut idx: Vec<usize> = (0..len).collect();
        for i in 0..n {
            let j = i + rng.index(len - i);
            idx.swap(i, j);
        }
        idx[..n].iter().map(|&i| src[i]).collect()
    } else {
        let mut points: Vec<[T; 3]> = src.to_vec();
        points.extend((len..n).map(|_| src[rng.index(len)]));
        points
    };
    Ok(PointCloud::new(points))
}

/// Keeps only points inside the closed box `bounds`.
pub fn crop_workspace<T: Scalar>(cloud: &PointCloud<T>, bounds: &Aabb<T>) -> Result<PointCloud<T>> {
    let kept: Vec<[T; 3]> = cloud
        .points()
        .iter()
        .filter(|p| bounds.contains(p))
        .copied()
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyAfterCrop);
    }
    Ok(PointCloud::new(kept))
}
