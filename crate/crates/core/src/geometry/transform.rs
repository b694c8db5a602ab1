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

use nalgebra::Matrix4;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{RotationMatrix, Vec3};

/// A rigid transform `x ↦ R x + t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidTransform {
    pub rotation: RotationMatrix,
    pub translation: Vec3,
}

impl RigidTransform {
    pub fn new(rotation: RotationMatrix, translation: Vec3) -> Self {
        RigidTransform {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(RotationMatrix::identity(), Vec3::zeros())
    }

    pub fn from_translation(t: Vec3) -> Self {
        Self::new(RotationMatrix::identity(), t)
    }

    pub fn from_rotation(r: RotationMatrix) -> Self {
        Self::new(r, Vec3::zeros())
    }

    /// Random rotation with translation drawn uniformly from `[-extent, extent]³`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, extent: f64) -> Self {
        let rotation = RotationMatrix::random(rng);
        let t = Vec3::new(
            rng.gen_range(-extent..=extent),
            rng.gen_range(-extent..=extent),
            rng.gen_range(-extent..=extent),
        );
        Self::new(rotation, t)
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation.rotate(p) + self.translation
    }

    pub fn apply_vector(&self, v: &Vec3) -> Vec3 {
        self.rotation.rotate(v)
    }

    /// Maps a world point into this transform's local frame (`Rᵀ (p - t)`).
    pub fn inverse_apply(&self, p: &Vec3) -> Vec3 {
        self.rotation.inverse_rotate(&(p - self.translation))
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(self.rotation.matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}

/// `compose(a, b)` applies `b` first, then `a`.
pub fn compose(a: &RigidTransform, b: &RigidTransform) -> RigidTransform {
    RigidTransform {
        rotation: RotationMatrix::from_matrix_unchecked(a.rotation.matrix() * b.rotation.matrix()),
        translation: a.rotation.rotate(&b.translation) + a.translation,
    }
}

pub fn invert(t: &RigidTransform) -> RigidTransform {
    let rt = t.rotation.transpose();
    RigidTransform {
        translation: -rt.rotate(&t.translation),
        rotation: rt,
    }
}

impl Mul for RigidTransform {
    type Output = RigidTransform;

    fn mul(self, rhs: RigidTransform) -> RigidTransform {
        compose(&self, &rhs)
    }
}

impl Mul<&RigidTransform> for &RigidTransform {
    type Output = RigidTransform;

    fn mul(self, rhs: &RigidTransform) -> RigidTransform {
        compose(self, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geodesic_angle, rotation_distance, translation_distance};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn identity_cases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let t = RigidTransform::random(&mut rng, 1.0);
        let id = RigidTransform::identity();
        assert_eq!(compose(&id, &t), t);
        assert_eq!(invert(&id), id);
        let p = compose(&t, &invert(&t));
        assert!(translation_distance(&p.translation, &Vec3::zeros()) < 1e-9);
        assert!(geodesic_angle(&p.rotation, &RotationMatrix::identity()) < 1e-9);
    }

    #[test]
    fn pure_translation_inverse() {
        let t = RigidTransform::from_translation(Vec3::new(1.0, 2.0, 3.0));
        let inv = invert(&t);
        assert_eq!(inv.translation, Vec3::new(-1.0, -2.0, -3.0));
        assert_eq!(inv.rotation, RotationMatrix::identity());
    }

    #[test]
    fn translate_after_rotate_matches_homogeneous_product() {
        let a = RigidTransform::from_translation(Vec3::new(1.0, 0.0, 0.0));
        let b = RigidTransform::from_rotation(RotationMatrix::rot_z(FRAC_PI_2));
        let c = compose(&a, &b);
        let p = c.apply(&Vec3::new(1.0, 0.0, 0.0));
        assert_relative_eq!(p, Vec3::new(1.0, 1.0, 0.0), epsilon = 1e-12);

        let h = a.to_homogeneous() * b.to_homogeneous() * nalgebra::Vector4::new(1.0, 0.0, 0.0, 1.0);
        assert_relative_eq!(p, h.xyz(), epsilon = 1e-12);
        assert_relative_eq!(c.to_homogeneous(), a.to_homogeneous() * b.to_homogeneous(), epsilon = 1e-12);
    }

    #[test]
    fn group_laws_on_random_transforms() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let mut worst_t: f64 = 0.0;
        let mut worst_r: f64 = 0.0;
        for _ in 0..1000 {
            let a = RigidTransform::random(&mut rng, 2.0);
            let b = RigidTransform::random(&mut rng, 2.0);
            let c = RigidTransform::random(&mut rng, 2.0);
            let id = compose(&a, &invert(&a));
            worst_t = worst_t.max(id.translation.norm());
            worst_r = worst_r.max(geodesic_angle(&id.rotation, &RotationMatrix::identity()));

            let twice = invert(&invert(&a));
            assert!((twice.translation - a.translation).norm() < 1e-9);
            assert!((twice.rotation.matrix() - a.rotation.matrix()).abs().max() < 1e-9);

            let l = compose(&compose(&a, &b), &c);
            let r = compose(&a, &compose(&b, &c));
            assert!((l.translation - r.translation).norm() < 1e-9);
            assert!(rotation_distance(&l.rotation, &r.rotation) < 1e-7);
        }
        assert!(worst_t < 1e-9, "{worst_t}");
        assert!(worst_r < 1e-9, "{worst_r}");
    }
}
