// Copyright 2026 The graspbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::ops::Mul;

use nalgebra::{Matrix3, Unit};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::error::{Error, Result};

/// Tolerance used when validating orthonormality and determinant.
pub const ROTATION_TOLERANCE: f64 = 1e-6;

/// A proper rotation in 3D, stored as a 3×3 orthonormal matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 9]", into = "[f64; 9]")]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        RotationMatrix(Matrix3::identity())
    }

    /// Validates `m` and wraps it.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if !m.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("rotation has non-finite entries"));
        }
        let gram = m.transpose() * m;
        let off = (gram - Matrix3::identity()).abs().max();
        if off > ROTATION_TOLERANCE {
            return Err(Error::invalid(format!(
                "rotation is not orthonormal (max |RᵀR - I| = {off:e})"
            )));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > ROTATION_TOLERANCE {
            return Err(Error::invalid(format!(
                "rotation determinant is {det}, expected +1"
            )));
        }
        Ok(RotationMatrix(m))
    }

    /// Wraps a matrix known to be a rotation (products of rotations etc).
    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        RotationMatrix(m)
    }

    /// Row-major constructor.
    pub fn from_rows(rows: [f64; 9]) -> Result<Self> {
        Self::new(Matrix3::from_row_slice(&rows))
    }

    /// Builds a rotation from its three columns.
    pub fn from_columns(x: Vec3, y: Vec3, z: Vec3) -> Result<Self> {
        Self::new(Matrix3::from_columns(&[x, y, z]))
    }

    pub fn to_rows(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }

    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        let axis = Unit::new_normalize(*axis);
        let r = nalgebra::Rotation3::from_axis_angle(&axis, angle);
        RotationMatrix(*r.matrix())
    }

    pub fn rot_x(angle: f64) -> Self {
        Self::from_axis_angle(&Vec3::x(), angle)
    }

    pub fn rot_y(angle: f64) -> Self {
        Self::from_axis_angle(&Vec3::y(), angle)
    }

    pub fn rot_z(angle: f64) -> Self {
        Self::from_axis_angle(&Vec3::z(), angle)
    }

    /// Uniformly distributed random rotation (Shoemake's quaternion method).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
        let u3: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
        let a = (1.0 - u1).sqrt();
        let b = u1.sqrt();
        let q = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(
            a * u2.sin(),
            a * u2.cos(),
            b * u3.sin(),
            b * u3.cos(),
        ));
        RotationMatrix(*q.to_rotation_matrix().matrix())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn column(&self, i: usize) -> Vec3 {
        self.0.column(i).into_owned()
    }

    pub fn transpose(&self) -> Self {
        RotationMatrix(self.0.transpose())
    }

    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Applies the inverse rotation, i.e. expresses `v` in this frame.
    pub fn inverse_rotate(&self, v: &Vec3) -> Vec3 {
        self.0.tr_mul(v)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

impl Default for RotationMatrix {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

impl Mul<&RotationMatrix> for &RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

impl TryFrom<[f64; 9]> for RotationMatrix {
    type Error = Error;

    fn try_from(rows: [f64; 9]) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<RotationMatrix> for [f64; 9] {
    fn from(r: RotationMatrix) -> [f64; 9] {
        r.to_rows()
    }
}

/// Geodesic angle between two rotations, `arccos((tr(R1 R2ᵀ) - 1) / 2)`, in `[0, π]`.
pub fn rotation_distance(r1: &RotationMatrix, r2: &RotationMatrix) -> f64 {
    // tr(A Bᵀ) is the Frobenius inner product of A and B.
    let tr = r1.0.component_mul(&r2.0).sum();
    let c = ((tr - 1.0) * 0.5).clamp(-1.0, 1.0);
    c.acos()
}

/// Same angle as [`rotation_distance`], computed as `atan2(sin, cos)` from the
/// skew and trace parts of `R1 R2ᵀ`. Well conditioned near zero, where the
/// arccos form loses about half the significant digits.
pub fn geodesic_angle(r1: &RotationMatrix, r2: &RotationMatrix) -> f64 {
    let m = r1.0 * r2.0.transpose();
    let skew = Vec3::new(
        m[(2, 1)] - m[(1, 2)],
        m[(0, 2)] - m[(2, 0)],
        m[(1, 0)] - m[(0, 1)],
    );
    let sin = 0.5 * skew.norm();
    let cos = 0.5 * (m.trace() - 1.0);
    sin.atan2(cos)
}
