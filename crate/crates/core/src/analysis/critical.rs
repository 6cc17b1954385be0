//! Critical set extraction.

use crate::error::Result;
use crate::geometry::PointCloud;
use crate::model::{forward_one, ModelWeights};

use super::require_directional;

/// The points that determine a cloud's global feature.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSet {
    /// Indices into the source cloud, sorted ascending, deduplicated.
    pub indices: Vec<usize>,
    /// Coordinates of those points, in `indices` order.
    pub points: Vec<[f64; 3]>,
    /// Winning point index per feature dimension (length `N`); ties resolve
    /// to the lowest index.
    pub argmax: Vec<usize>,
}

impl CriticalSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The critical points as a cloud, suitable for re-running the model.
    pub fn to_cloud(&self) -> PointCloud<f64> {
        PointCloud::new(self.points.clone())
    }
}

/// Finds the pool winners. At most `min(N, n)` points emerge; every other
/// point could be deleted without moving the global feature.
pub fn critical_points(w: &ModelWeights, cloud: &PointCloud<f64>) -> Result<CriticalSet> {
    require_directional(w)?;
    let cache = forward_one(w, cloud)?;
    let mut indices = cache.argmax.clone();
    indices.sort_unstable();
    indices.dedup();
    let points = indices.iter().map(|&i| cloud.points()[i]).collect();
    Ok(CriticalSet {
        indices,
        points,
        argmax: cache.argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, forward, ModelSpec, Variant};
    use crate::rng::DetRng;

    fn tiny_spec() -> ModelSpec {
        ModelSpec {
            per_point_widths: vec![8, 8, 16],
            classifier_widths: vec![8, 3],
            variant: Variant::Directional,
        }
    }

    fn random_cloud(n: usize, seed: u64) -> PointCloud<f64> {
        let mut rng = DetRng::seed(seed);
        PointCloud::new(
            (0..n)
                .map(|_| {
                    [
                        rng.uniform_in(-1.0, 1.0),
                        rng.uniform_in(-1.0, 1.0),
                        rng.uniform_in(-1.0, 1.0),
                    ]
                })
                .collect(),
        )
    }

    #[test]
    fn critical_set_is_small_sorted_and_consistent() {
        let w = build_model(&tiny_spec(), 3).unwrap();
        let cloud = random_cloud(200, 9);
        let set = critical_points(&w, &cloud).unwrap();

        assert!(set.len() <= 16);
        assert!(set.len() >= 1);
        assert!(set.indices.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(set.argmax.len(), 16);
        for (i, &idx) in set.indices.iter().enumerate() {
            assert_eq!(set.points[i], cloud.points()[idx]);
        }
        for &win in &set.argmax {
            assert!(set.indices.binary_search(&win).is_ok());
        }
    }

    #[test]
    fn critical_subset_reproduces_the_global_feature_bitwise() {
        let w = build_model(&tiny_spec(), 3).unwrap();
        let cloud = random_cloud(200, 10);
        let set = critical_points(&w, &cloud).unwrap();
        let sub = set.to_cloud();

        let (g_full, l_full) = forward(&w, &[&cloud]).unwrap();
        let (g_sub, l_sub) = forward(&w, &[&sub]).unwrap();
        assert_eq!(g_full.data(), g_sub.data());
        assert_eq!(l_full.data(), l_sub.data());
    }

    #[test]
    fn removing_any_non_critical_point_changes_nothing() {
        let w = build_model(&tiny_spec(), 4).unwrap();
        let cloud = random_cloud(60, 11);
        let set = critical_points(&w, &cloud).unwrap();
        let (g_full, _) = forward(&w, &[&cloud]).unwrap();

        for drop in 0..cloud.len() {
            if set.indices.binary_search(&drop).is_ok() {
                continue;
            }
            let pruned = PointCloud::new(
                cloud
                    .points()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != drop)
                    .map(|(_, p)| *p)
                    .collect(),
            );
            let (g, _) = forward(&w, &[&pruned]).unwrap();
            assert_eq!(g_full.data(), g.data(), "dropping point {drop} moved the feature");
        }
    }

    #[test]
    fn extraction_is_deterministic() {
        let w = build_model(&tiny_spec(), 5).unwrap();
        let cloud = random_cloud(100, 12);
        let a = critical_points(&w, &cloud).unwrap();
        let b = critical_points(&w, &cloud).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn baseline_weights_are_rejected() {
        let w = build_model(&ModelSpec::baseline_tnet(), 1).unwrap();
        let cloud = random_cloud(50, 13);
        assert!(critical_points(&w, &cloud).is_err());
    }
}
