//! Point clouds and the rigid/sampling transforms applied before inference.
//!
//! The working frame ("ground frame") is right-handed with `z` up, `x`
//! pointing the way the wearer walks, and `y` left. Terrain classes are
//! meaningful only in this frame: ascending stairs gain height with forward
//! distance, descending stairs lose it.

mod rotation;
mod sampling;

pub use rotation::{rotate_cloud, rotation_from_orientation, stabilize, Mat3, Orientation};
pub use sampling::{crop_workspace, downsample};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::Tensor2D;
use crate::scalar::Scalar;

/// Terrain category. The discriminant doubles as the on-disk label byte.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum TerrainClass {
    LevelGround = 0,
    UpStairs = 1,
    DownStairs = 2,
}

/// Number of terrain classes.
pub const NUM_CLASSES: usize = 3;

impl TerrainClass {
    pub const ALL: [TerrainClass; NUM_CLASSES] = [
        TerrainClass::LevelGround,
        TerrainClass::UpStairs,
        TerrainClass::DownStairs,
    ];

    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(TerrainClass::LevelGround),
            1 => Ok(TerrainClass::UpStairs),
            2 => Ok(TerrainClass::DownStairs),
            _ => Err(Error::LabelOutOfRange {
                label: b as usize,
                num_classes: NUM_CLASSES,
            }),
        }
    }

    pub fn as_byte(self) -> u8 {
        self as u8
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            TerrainClass::LevelGround => "level-ground",
            TerrainClass::UpStairs => "up-stairs",
            TerrainClass::DownStairs => "down-stairs",
        }
    }
}

/// Unordered set of 3-D points.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud<T> {
    points: Vec<[T; 3]>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn new(points: Vec<[T; 3]>) -> Self {
        PointCloud { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[T; 3]] {
        &self.points
    }

    pub fn points_mut(&mut self) -> &mut [[T; 3]] {
        &mut self.points
    }

    pub fn push(&mut self, p: [T; 3]) {
        self.points.push(p);
    }

    /// Axis-aligned bounds, or `None` for an empty cloud.
    pub fn bounds(&self) -> Option<Aabb<T>> {
        let first = *self.points.first()?;
        let mut min = first;
        let mut max = first;
        for p in &self.points {
            for a in 0..3 {
                min[a] = min[a].min(p[a]);
                max[a] = max[a].max(p[a]);
            }
        }
        Some(Aabb { min, max })
    }

    /// Copies the cloud into an `n × 3` tensor (one row per point).
    pub fn to_tensor(&self) -> Tensor2D<T> {
        let mut data = Vec::with_capacity(self.points.len() * 3);
        for p in &self.points {
            data.extend_from_slice(p);
        }
        Tensor2D::from_vec(self.points.len(), 3, data).expect("3 columns per point")
    }
}

/// Closed axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb<T> {
    pub min: [T; 3],
    pub max: [T; 3],
}

impl<T: Scalar> Aabb<T> {
    /// Fails if any `min` coordinate exceeds its `max`.
    pub fn new(min: [T; 3], max: [T; 3]) -> Result<Self> {
        for a in 0..3 {
            if min[a] > max[a] {
                return Err(Error::InvalidParam(format!(
                    "box min exceeds max on axis {a}"
                )));
            }
        }
        Ok(Aabb { min, max })
    }

    /// Closed-interval membership on every axis.
    pub fn contains(&self, p: &[T; 3]) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    pub fn center(&self) -> [T; 3] {
        let half = T::from(0.5).unwrap();
        [
            (self.min[0] + self.max[0]) * half,
            (self.min[1] + self.max[1]) * half,
            (self.min[2] + self.max[2]) * half,
        ]
    }
}
