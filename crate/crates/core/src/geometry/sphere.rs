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

use std::f64::consts::PI;

use nalgebra::Matrix3;

use super::{RotationMatrix, Vec3};

/// `v` near-uniform unit directions on a golden-angle (Fibonacci) lattice.
///
/// `v = 1` gives `+z`; `v = 2` gives the two poles. Larger counts use the
/// half-offset lattice. Output is deterministic for a given `v`.
pub fn sample_sphere_directions(v: usize) -> Vec<Vec3> {
    match v {
        0 => Vec::new(),
        1 => vec![Vec3::z()],
        2 => vec![Vec3::z(), -Vec3::z()],
        _ => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..v)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / v as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * i as f64;
                    Vec3::new(r * phi.cos(), r * phi.sin(), z).normalize()
                })
                .collect()
        }
    }
}

/// Gripper orientation for a view direction and an in-plane angle.
///
/// Columns are (approach, closing, height). The approach axis is `-view`, so
/// a gripper placed along `view` moves toward the object. The in-plane angle
/// rotates the closing and height axes about the approach axis.
pub fn view_to_rotation(view: &Vec3, in_plane_angle: f64) -> RotationMatrix {
    let approach = -view.normalize();
    let mut closing = Vec3::new(-approach.y, approach.x, 0.0);
    if closing.norm() < 1e-12 {
        closing = Vec3::y();
    }
    let closing = closing.normalize();
    let height = approach.cross(&closing);
    let (s, c) = in_plane_angle.sin_cos();
    let closing_rot = closing * c + height * s;
    let height_rot = -closing * s + height * c;
    RotationMatrix::from_matrix_unchecked(Matrix3::from_columns(&[approach, closing_rot, height_rot]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn small_counts() {
        assert_eq!(sample_sphere_directions(1), vec![Vec3::z()]);
        let two = sample_sphere_directions(2);
        assert_relative_eq!(two[0], -two[1]);
    }

    fn nearest_neighbor_angles(dirs: &[Vec3]) -> Vec<f64> {
        dirs.iter()
            .enumerate()
            .map(|(i, a)| {
                dirs.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, b)| a.dot(b).clamp(-1.0, 1.0).acos())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    #[test]
    fn lattice_is_near_uniform() {
        let dirs = sample_sphere_directions(300);
        assert_eq!(dirs.len(), 300);
        for d in &dirs {
            assert!((d.norm() - 1.0).abs() < 1e-9);
        }
        let nn = nearest_neighbor_angles(&dirs);
        let mean = nn.iter().sum::<f64>() / nn.len() as f64;
        let max = nn.iter().cloned().fold(f64::MIN, f64::max);
        let min = nn.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max - min) / mean < 0.5, "spread {}", (max - min) / mean);
        assert_eq!(dirs, sample_sphere_directions(300));
    }

    #[test]
    fn min_angle_against_packing_bound() {
        for v in [3usize, 10, 50, 120, 300, 1000] {
            let dirs = sample_sphere_directions(v);
            // Hexagonal packing estimate of the best achievable separation.
            let ideal = (8.0 * PI / (3f64.sqrt() * v as f64)).sqrt().min(PI);
            let min = nearest_neighbor_angles(&dirs).into_iter().fold(f64::MAX, f64::min);
            assert!(min > 0.5 * ideal, "v={v} min={min} ideal={ideal}");
        }
    }

    #[test]
    fn approach_axis_convention() {
        let r = view_to_rotation(&Vec3::z(), 0.0);
        assert_relative_eq!(r.column(0), Vec3::new(0.0, 0.0, -1.0));
        let q = view_to_rotation(&Vec3::z(), std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(q.column(0), r.column(0));
        assert_relative_eq!(q.column(1).dot(&r.column(1)), 0.0, epsilon = 1e-12);
        assert_relative_eq!(q.column(1), r.column(2), epsilon = 1e-12);
    }

    #[test]
    fn random_views_give_valid_rotations() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)).normalize();
            let r = view_to_rotation(&v, rng.gen_range(0.0..PI));
            RotationMatrix::new(*r.matrix()).unwrap();
            assert_relative_eq!(r.column(0), -v, epsilon = 1e-12);
        }
    }
}
