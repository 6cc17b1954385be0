//! Sensor corruption: Gaussian jitter plus interference outliers.

use std::f64::consts::TAU;

use crate::error::Result;
use crate::geometry::PointCloud;
use crate::rng::DetRng;

use super::{NoiseParams, OutlierKind};

/// Lateral clearance between the scene and an injected side wall, m.
const WALL_GAP: f64 = 0.05;
/// Height of an injected side wall above the lowest scene point, m.
const WALL_HEIGHT: f64 = 2.0;
/// Radius of the wearer's leg, m.
const LEG_RADIUS: f64 = 0.06;
/// Vertical extent of leg returns above the ground underfoot, m.
const LEG_HEIGHT: f64 = 0.8;

/// Applies jitter to every point, then replaces `round(outlier_fraction * n)`
/// distinct points with interference samples. Point count and point order are
/// preserved. With `gaussian_sigma == 0` and `outlier_fraction == 0` the
/// output is bitwise identical to the input.
///
/// Draw order is fixed (jitter, victim choice, scene placement, one outlier
/// per victim); changing it would break dataset reproducibility.
pub fn add_noise_and_outliers(
    cloud: &PointCloud<f64>,
    noise: &NoiseParams,
    seed: u64,
) -> Result<PointCloud<f64>> {
    noise.validate()?;
    let mut rng = DetRng::seed(seed);
    let mut points = cloud.points().to_vec();

    if noise.gaussian_sigma > 0.0 {
        for p in &mut points {
            for c in p.iter_mut() {
                *c += noise.gaussian_sigma * rng.normal();
            }
        }
    }

    let k = (noise.outlier_fraction * points.len() as f64).round() as usize;
    if k > 0 {
        let mut victims: Vec<usize> = (0..points.len()).collect();
        for j in 0..k {
            let swap = j + rng.index(points.len() - j);
            victims.swap(j, swap);
        }
        victims.truncate(k);

        let (mut min, mut max) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
        for p in &points {
            for a in 0..3 {
                min[a] = min[a].min(p[a]);
                max[a] = max[a].max(p[a]);
            }
        }
        let wall_side = if rng.index(2) == 0 { -1.0 } else { 1.0 };
        let wall_y = wall_side * (max[1].abs().max(min[1].abs()) + WALL_GAP);
        let leg_cx = rng.uniform_in(0.1, 0.3);
        let leg_side = if rng.index(2) == 0 { -1.0 } else { 1.0 };
        let leg_cy = leg_side * rng.uniform_in(0.05, 0.2);

        for &v in &victims {
            let kind = noise.outlier_kinds[rng.index(noise.outlier_kinds.len())];
            points[v] = match kind {
                OutlierKind::SideWall => [
                    rng.uniform_in(min[0], max[0]),
                    wall_y,
                    rng.uniform_in(min[2], min[2] + WALL_HEIGHT),
                ],
                OutlierKind::Leg => {
                    let theta = rng.uniform_in(0.0, TAU);
                    [
                        leg_cx + LEG_RADIUS * theta.cos(),
                        leg_cy + LEG_RADIUS * theta.sin(),
                        rng.uniform_in(0.0, LEG_HEIGHT),
                    ]
                }
            };
        }
    }

    Ok(PointCloud::new(points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{gen_level_ground, TerrainParams};

    fn base_cloud(n: usize) -> PointCloud<f64> {
        let params = TerrainParams {
            step_height: 0.15,
            step_depth: 0.3,
            step_width: 1.0,
            num_steps: 4,
            extent: 2.0,
            camera_height: 1.0,
            points_raw: n,
        };
        gen_level_ground(&params, 5).unwrap()
    }

    fn changed_rows(a: &PointCloud<f64>, b: &PointCloud<f64>) -> Vec<usize> {
        (0..a.len()).filter(|&i| a.points()[i] != b.points()[i]).collect()
    }

    #[test]
    fn clean_params_are_bitwise_identity() {
        let cloud = base_cloud(2000);
        let out = add_noise_and_outliers(&cloud, &NoiseParams::clean(), 9).unwrap();
        assert_eq!(cloud.points(), out.points());
    }

    #[test]
    fn outlier_count_is_rounded_fraction() {
        let cloud = base_cloud(2000);
        let noise = NoiseParams {
            gaussian_sigma: 0.0,
            outlier_fraction: 0.1,
            outlier_kinds: vec![OutlierKind::SideWall, OutlierKind::Leg],
        };
        let out = add_noise_and_outliers(&cloud, &noise, 9).unwrap();
        assert_eq!(out.len(), cloud.len());
        assert_eq!(changed_rows(&cloud, &out).len(), 200);
    }

    #[test]
    fn jitter_displacements_stay_small() {
        let cloud = base_cloud(2000);
        let noise = NoiseParams {
            gaussian_sigma: 0.01,
            ..NoiseParams::clean()
        };
        let out = add_noise_and_outliers(&cloud, &noise, 9).unwrap();
        let bound = 3.0 * 0.01 * 3f64.sqrt();
        let small = (0..cloud.len())
            .filter(|&i| {
                let (a, b) = (cloud.points()[i], out.points()[i]);
                let d2 = (0..3).map(|c| (a[c] - b[c]) * (a[c] - b[c])).sum::<f64>();
                d2.sqrt() < bound
            })
            .count();
        assert!(small as f64 >= 0.95 * cloud.len() as f64, "{small}/2000");
    }

    #[test]
    fn wall_outliers_sit_outside_the_scene() {
        let cloud = base_cloud(1000);
        let noise = NoiseParams {
            gaussian_sigma: 0.0,
            outlier_fraction: 0.2,
            outlier_kinds: vec![OutlierKind::SideWall],
        };
        let out = add_noise_and_outliers(&cloud, &noise, 3).unwrap();
        let rows = changed_rows(&cloud, &out);
        assert_eq!(rows.len(), 200);
        let max_y = cloud.points().iter().map(|p| p[1].abs()).fold(0.0, f64::max);
        for &i in &rows {
            let p = out.points()[i];
            assert!((p[1].abs() - (max_y + WALL_GAP)).abs() < 1e-12);
            assert!(p[2] >= 0.0 && p[2] <= WALL_HEIGHT);
        }
    }

    #[test]
    fn leg_outliers_form_a_cylinder() {
        let cloud = base_cloud(1000);
        let noise = NoiseParams {
            gaussian_sigma: 0.0,
            outlier_fraction: 0.2,
            outlier_kinds: vec![OutlierKind::Leg],
        };
        let out = add_noise_and_outliers(&cloud, &noise, 3).unwrap();
        let rows = changed_rows(&cloud, &out);
        let cx = rows.iter().map(|&i| out.points()[i][0]).sum::<f64>() / rows.len() as f64;
        let cy = rows.iter().map(|&i| out.points()[i][1]).sum::<f64>() / rows.len() as f64;
        for &i in &rows {
            let p = out.points()[i];
            let r = ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt();
            assert!((r - LEG_RADIUS).abs() < 0.02, "radius {r}");
            assert!(p[2] >= 0.0 && p[2] <= LEG_HEIGHT);
        }
    }

    #[test]
    fn corruption_is_seed_deterministic() {
        let cloud = base_cloud(500);
        let noise = NoiseParams::noisy();
        let a = add_noise_and_outliers(&cloud, &noise, 77).unwrap();
        let b = add_noise_and_outliers(&cloud, &noise, 77).unwrap();
        let c = add_noise_and_outliers(&cloud, &noise, 78).unwrap();
        assert_eq!(a.points(), b.points());
        assert_ne!(a.points(), c.points());
    }
}
