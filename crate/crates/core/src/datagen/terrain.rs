//! Surface generators for the three terrain classes.
//!
//! Each terrain is a set of axis-aligned rectangular faces. Points are drawn
//! face by face with probability proportional to face area, then uniformly
//! within the face, so point density is uniform over the visible surface. A
//! face receives points only if its outward normal has a positive component
//! toward the camera at `(0, 0, camera_height)`; this is what hides the
//! risers of a descending staircase from a walker standing at the top.

use crate::error::Result;
use crate::geometry::PointCloud;
use crate::rng::DetRng;

use super::TerrainParams;

/// Which way the staircase goes when walking in `+x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StairDirection {
    Up,
    Down,
}

/// Axis-aligned rectangle: `origin + u * span_u + v * span_v`, `u, v` in `[0, 1]`.
struct Face {
    origin: [f64; 3],
    span_u: [f64; 3],
    span_v: [f64; 3],
    normal: [f64; 3],
}

impl Face {
    fn area(&self) -> f64 {
        let nu = (self.span_u[0] * self.span_u[0]
            + self.span_u[1] * self.span_u[1]
            + self.span_u[2] * self.span_u[2])
            .sqrt();
        let nv = (self.span_v[0] * self.span_v[0]
            + self.span_v[1] * self.span_v[1]
            + self.span_v[2] * self.span_v[2])
            .sqrt();
        nu * nv
    }

    /// True when the face's outward side looks toward the camera.
    fn visible_from(&self, camera: [f64; 3]) -> bool {
        let to_camera = [
            camera[0] - self.origin[0],
            camera[1] - self.origin[1],
            camera[2] - self.origin[2],
        ];
        let dot = self.normal[0] * to_camera[0]
            + self.normal[1] * to_camera[1]
            + self.normal[2] * to_camera[2];
        dot > 0.0
    }

    fn sample(&self, rng: &mut DetRng) -> [f64; 3] {
        let u = rng.uniform();
        let v = rng.uniform();
        [
            self.origin[0] + u * self.span_u[0] + v * self.span_v[0],
            self.origin[1] + u * self.span_u[1] + v * self.span_v[1],
            self.origin[2] + u * self.span_u[2] + v * self.span_v[2],
        ]
    }
}

/// Draws `points_raw` points over the visible faces, area-proportionally.
fn sample_faces(faces: &[Face], camera: [f64; 3], count: usize, rng: &mut DetRng) -> PointCloud<f64> {
    let visible: Vec<&Face> = faces.iter().filter(|f| f.visible_from(camera)).collect();
    let areas: Vec<f64> = visible.iter().map(|f| f.area()).collect();
    let total: f64 = areas.iter().sum();
    assert!(total > 0.0, "terrain has no visible surface");
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let mut target = rng.uniform() * total;
        let mut chosen = visible.len() - 1;
        for (i, a) in areas.iter().enumerate() {
            if target < *a {
                chosen = i;
                break;
            }
            target -= a;
        }
        points.push(visible[chosen].sample(rng));
    }
    PointCloud::new(points)
}

/// Flat ground: the square `[-extent, extent]^2` at `z = 0`.
pub fn gen_level_ground(params: &TerrainParams, seed: u64) -> Result<PointCloud<f64>> {
    params.validate()?;
    let e = params.extent;
    let faces = [Face {
        origin: [-e, -e, 0.0],
        span_u: [2.0 * e, 0.0, 0.0],
        span_v: [0.0, 2.0 * e, 0.0],
        normal: [0.0, 0.0, 1.0],
    }];
    let camera = [0.0, 0.0, params.camera_height];
    let mut rng = DetRng::seed(seed);
    Ok(sample_faces(&faces, camera, params.points_raw, &mut rng))
}

/// Staircase ahead of the camera.
///
/// Tread `i` (0-based) spans `x` in `[i*d, (i+1)*d]` at height `sign * i * h`,
/// where `sign` is `+1` going up and `-1` going down. Riser `i` (1-based)
/// stands at `x = i*d` and joins the two adjacent tread heights. Up-stair
/// risers face the camera (`-x` normal); down-stair risers face away (`+x`)
/// and are occluded, so a descending scan contains treads only.
pub fn gen_stairs(
    params: &TerrainParams,
    direction: StairDirection,
    seed: u64,
) -> Result<PointCloud<f64>> {
    params.validate()?;
    let h = params.step_height;
    let d = params.step_depth;
    let w = params.step_width;
    let s = params.num_steps;
    let sign = match direction {
        StairDirection::Up => 1.0,
        StairDirection::Down => -1.0,
    };

    let mut faces = Vec::with_capacity(2 * s);
    for i in 0..s {
        let z = sign * i as f64 * h;
        faces.push(Face {
            origin: [i as f64 * d, -w / 2.0, z],
            span_u: [d, 0.0, 0.0],
            span_v: [0.0, w, 0.0],
            normal: [0.0, 0.0, 1.0],
        });
    }
    for i in 1..s {
        let x = i as f64 * d;
        let z_lo = sign * (i - 1) as f64 * h;
        let z_hi = sign * i as f64 * h;
        let (base, top) = if z_lo < z_hi { (z_lo, z_hi) } else { (z_hi, z_lo) };
        faces.push(Face {
            origin: [x, -w / 2.0, base],
            span_u: [0.0, 0.0, top - base],
            span_v: [0.0, w, 0.0],
            normal: [-sign, 0.0, 0.0],
        });
    }

    let camera = [0.0, 0.0, params.camera_height];
    let mut rng = DetRng::seed(seed);
    Ok(sample_faces(&faces, camera, params.points_raw, &mut rng))
}
