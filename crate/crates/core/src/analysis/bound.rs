//! Upper-bound shape extraction.
//!
//! A point whose per-point features sit at or below the global feature in
//! every dimension can be appended to the cloud without moving the pooled
//! maximum, so the classification is provably unchanged. Scanning a cube of
//! candidate positions for that property traces out the outer envelope of
//! shapes the model cannot tell apart from the input.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::model::{forward_one, ModelWeights};
use crate::numcore::{relu, Tensor2D};

use super::require_directional;

/// Grid vertices evaluated per parallel work unit.
const VERTEX_CHUNK: usize = 512;

/// Axis-aligned sampling cube for candidate points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubeSpec {
    /// Cube center; `None` centers on the cloud's bounding box.
    pub center: Option<[f64; 3]>,
    /// Side length.
    pub edge: f64,
    /// Vertices per axis, endpoints included. Odd values place a vertex
    /// exactly at the center.
    pub resolution: usize,
}

impl Default for CubeSpec {
    fn default() -> Self {
        CubeSpec {
            center: None,
            edge: 1.0,
            resolution: 40,
        }
    }
}

impl CubeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.edge > 0.0 && self.edge.is_finite()) {
            return Err(Error::InvalidParam("cube edge must be finite and positive".into()));
        }
        if self.resolution < 2 {
            return Err(Error::InvalidParam("cube resolution must be at least 2".into()));
        }
        if let Some(c) = self.center {
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParam("cube center must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.resolution * self.resolution * self.resolution
    }
}

fn bbox_center(cloud: &PointCloud<f64>) -> [f64; 3] {
    let mut lo = cloud.points()[0];
    let mut hi = lo;
    for p in cloud.points() {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    [
        (lo[0] + hi[0]) / 2.0,
        (lo[1] + hi[1]) / 2.0,
        (lo[2] + hi[2]) / 2.0,
    ]
}

/// Vertices in x-major, z-fastest order.
fn grid_vertices(center: [f64; 3], edge: f64, res: usize) -> Vec<[f64; 3]> {
    let axis = |c: f64, i: usize| c + edge * (i as f64 / (res - 1) as f64 - 0.5);
    let mut verts = Vec::with_capacity(res * res * res);
    for ix in 0..res {
        let x = axis(center[0], ix);
        for iy in 0..res {
            let y = axis(center[1], iy);
            for iz in 0..res {
                verts.push([x, y, axis(center[2], iz)]);
            }
        }
    }
    verts
}

/// Per-point features of a block of standalone points. Rows are independent,
/// so this matches what a full forward pass computes for each point, bit for
/// bit.
fn stack_features(w: &ModelWeights, block: &[[f64; 3]]) -> Result<Tensor2D<f64>> {
    let mut data = Vec::with_capacity(block.len() * 3);
    for p in block {
        data.extend_from_slice(p);
    }
    let mut a = Tensor2D::from_vec(block.len(), 3, data)?;
    for layer in &w.per_point {
        a = relu(&layer.forward(&a)?);
    }
    Ok(a)
}

/// Scans the cube and keeps every vertex dominated by the cloud's global
/// feature. The returned points preserve grid order; appending any subset of
/// them to the cloud reproduces its global feature exactly.
pub fn upper_bound_points(
    w: &ModelWeights,
    cloud: &PointCloud<f64>,
    cube: &CubeSpec,
) -> Result<PointCloud<f64>> {
    require_directional(w)?;
    cube.validate()?;
    let cache = forward_one(w, cloud)?;
    let global = cache.pooled.row(0);

    let center = cube.center.unwrap_or_else(|| bbox_center(cloud));
    let verts = grid_vertices(center, cube.edge, cube.resolution);

    let kept: Result<Vec<Vec<[f64; 3]>>> = verts
        .par_chunks(VERTEX_CHUNK)
        .map(|block| {
            let feats = stack_features(w, block)?;
            Ok(block
                .iter()
                .enumerate()
                .filter(|(i, _)| feats.row(*i).iter().zip(global).all(|(v, m)| v <= m))
                .map(|(_, p)| *p)
                .collect())
        })
        .collect();
    let points: Vec<[f64; 3]> = kept?.into_iter().flatten().collect();
    Ok(PointCloud::new(points))
}
