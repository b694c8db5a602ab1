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

//! Rigid transforms, rotation metrics and point-cloud primitives.

mod cloud;
mod index;
mod mesh;
mod rotation;
mod sphere;
mod transform;

pub use cloud::{estimate_normals, voxel_downsample, PointCloud};
pub use index::SpatialGrid;
pub use mesh::TriangleMesh;
pub use rotation::{geodesic_angle, rotation_distance, RotationMatrix, ROTATION_TOLERANCE};
pub use sphere::{sample_sphere_directions, view_to_rotation};
pub use transform::{compose, invert, RigidTransform};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Euclidean distance between two translations.
pub fn translation_distance(t1: &Vec3, t2: &Vec3) -> f64 {
    (t1 - t2).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn translation_distance_examples() {
        assert_eq!(translation_distance(&Vec3::zeros(), &Vec3::zeros()), 0.0);
        assert_eq!(translation_distance(&Vec3::zeros(), &Vec3::new(3.0, 4.0, 0.0)), 5.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let a = Vec3::new(rng.gen(), rng.gen(), rng.gen());
            let b = Vec3::new(rng.gen(), rng.gen(), rng.gen());
            let brute = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2)).sqrt();
            approx::assert_relative_eq!(translation_distance(&a, &b), brute, epsilon = 1e-15);
        }
    }
}
