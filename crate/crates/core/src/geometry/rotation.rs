//! Euler-angle rotations and cloud stabilization.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::PointCloud;

/// Body orientation as intrinsic Z-Y-X Euler angles, radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orientation<T> {
    pub roll: T,
    pub pitch: T,
    pub yaw: T,
}

impl<T: Scalar> Orientation<T> {
    pub fn new(roll: T, pitch: T, yaw: T) -> Self {
        Orientation { roll, pitch, yaw }
    }
}

/// 3×3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3<T>(pub [[T; 3]; 3]);

impl<T: Scalar> Mat3<T> {
    pub fn identity() -> Self {
        let o = T::one();
        let z = T::zero();
        Mat3([[o, z, z], [z, o, z], [z, z, o]])
    }

    pub fn mul(&self, rhs: &Mat3<T>) -> Mat3<T> {
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                for k in 0..3 {
                    *v += self.0[i][k] * rhs.0[k][j];
                }
            }
        }
        Mat3(out)
    }

    pub fn transpose(&self) -> Mat3<T> {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn det(&self) -> T {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn apply(&self, p: &[T; 3]) -> [T; 3] {
        let m = &self.0;
        [
            m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2],
            m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2],
            m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2],
        ]
    }
}

/// Rotation matrix `R = Rz(yaw) · Ry(pitch) · Rx(roll)`.
pub fn rotation_from_orientation<T: Scalar>(o: &Orientation<T>) -> Mat3<T> {
    let z = T::zero();
    let one = T::one();
    let (sr, cr) = (o.roll.sin(), o.roll.cos());
    let (sp, cp) = (o.pitch.sin(), o.pitch.cos());
    let (sy, cy) = (o.yaw.sin(), o.yaw.cos());
    let rx = Mat3([[one, z, z], [z, cr, -sr], [z, sr, cr]]);
    let ry = Mat3([[cp, z, sp], [z, one, z], [-sp, z, cp]]);
    let rz = Mat3([[cy, -sy, z], [sy, cy, z], [z, z, one]]);
    rz.mul(&ry).mul(&rx)
}

/// Applies a matrix to every point.
pub fn rotate_cloud<T: Scalar>(cloud: &PointCloud<T>, m: &Mat3<T>) -> PointCloud<T> {
    PointCloud::new(cloud.points().iter().map(|p| m.apply(p)).collect())
}

/// Rotates a camera-frame cloud into the ground frame using the measured
/// orientation: `p_ground = R(orientation) · p_camera`. Rigid: distances and
/// angles are preserved; only the frame changes.
pub fn stabilize<T: Scalar>(cloud: &PointCloud<T>, o: &Orientation<T>) -> Result<PointCloud<T>> {
    if cloud.is_empty() {
        return Err(Error::Empty("stabilize"));
    }
    Ok(rotate_cloud(cloud, &rotation_from_orientation(o)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn assert_vec3_close(a: [f64; 3], b: [f64; 3], tol: f64) {
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn quarter_roll_sends_up_to_negative_y() {
        let o = Orientation::new(FRAC_PI_2, 0.0, 0.0);
        let r = rotation_from_orientation(&o);
        assert_vec3_close(r.apply(&[0.0, 0.0, 1.0]), [0.0, -1.0, 0.0], 1e-12);
    }

    #[test]
    fn quarter_yaw_sends_forward_to_left() {
        let o = Orientation::new(0.0, 0.0, FRAC_PI_2);
        let r = rotation_from_orientation(&o);
        assert_vec3_close(r.apply(&[1.0, 0.0, 0.0]), [0.0, 1.0, 0.0], 1e-12);
    }

    #[test]
    fn composition_applies_roll_before_yaw() {
        let o = Orientation::new(FRAC_PI_2, 0.0, FRAC_PI_2);
        let r = rotation_from_orientation(&o);
        // Rx maps z to -y, then Rz maps -y to x.
        assert_vec3_close(r.apply(&[0.0, 0.0, 1.0]), [1.0, 0.0, 0.0], 1e-12);
    }

    #[test]
    fn stabilize_undoes_an_inverse_rotation() {
        let cloud = PointCloud::new(vec![[1.0, 2.0, 3.0], [-0.5, 0.25, 1.5], [0.0, 0.0, 1.0]]);
        let o = Orientation::new(0.3, -0.7, 1.9);
        let r = rotation_from_orientation(&o);
        let tilted = rotate_cloud(&cloud, &r.transpose());
        let back = stabilize(&tilted, &o).unwrap();
        for (a, b) in back.points().iter().zip(cloud.points()) {
            assert_vec3_close(*a, *b, 1e-9);
        }
    }

    #[test]
    fn stabilize_rejects_empty_cloud() {
        let cloud: PointCloud<f64> = PointCloud::new(vec![]);
        let o = Orientation::new(0.0, 0.0, 0.0);
        assert!(matches!(stabilize(&cloud, &o), Err(Error::Empty(_))));
    }

    #[test]
    fn zero_orientation_is_identity() {
        let o = Orientation::new(0.0f64, 0.0, 0.0);
        let r = rotation_from_orientation(&o);
        assert_eq!(r, Mat3::identity());
    }

    #[test]
    fn works_in_f32() {
        let o = Orientation::new(0.5f32, -0.25, 1.0);
        let r = rotation_from_orientation(&o);
        assert!((r.det() - 1.0).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn rotations_are_orthonormal(
            roll in -PI..PI,
            pitch in -PI..PI,
            yaw in -PI..PI,
        ) {
            let r = rotation_from_orientation(&Orientation::new(roll, pitch, yaw));
            let should_be_identity = r.mul(&r.transpose());
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((should_be_identity.0[i][j] - want).abs() < 1e-12);
                }
            }
            prop_assert!((r.det() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn stabilization_is_rigid(
            roll in -PI..PI,
            pitch in -PI..PI,
            yaw in -PI..PI,
            px in -5.0..5.0,
            py in -5.0..5.0,
            pz in -5.0..5.0,
        ) {
            let cloud = PointCloud::new(vec![[px, py, pz], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
            let out = stabilize(&cloud, &Orientation::new(roll, pitch, yaw)).unwrap();
            for i in 0..cloud.len() {
                for j in (i + 1)..cloud.len() {
                    let d0 = dist(cloud.points()[i], cloud.points()[j]);
                    let d1 = dist(out.points()[i], out.points()[j]);
                    prop_assert!((d0 - d1).abs() < 1e-9);
                }
            }
        }
    }

    fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }
}
