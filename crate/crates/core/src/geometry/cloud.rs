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

use std::collections::HashMap;

use nalgebra::{Matrix3, SymmetricEigen};

use super::{RigidTransform, SpatialGrid, Vec3};
use crate::error::{Error, Result};

/// Points in meters, with optional unit normals and per-point object ids.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vec3>,
    pub normals: Option<Vec<Vec3>>,
    pub object_ids: Option<Vec<u32>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Self {
        PointCloud {
            points,
            normals: None,
            object_ids: None,
        }
    }

    pub fn with_normals(points: Vec<Vec3>, normals: Vec<Vec3>) -> Result<Self> {
        let cloud = PointCloud {
            points,
            normals: Some(normals),
            object_ids: None,
        };
        cloud.validate()?;
        Ok(cloud)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn normal(&self, i: usize) -> Option<&Vec3> {
        self.normals.as_ref().map(|n| &n[i])
    }

    pub fn object_id(&self, i: usize) -> Option<u32> {
        self.object_ids.as_ref().map(|ids| ids[i])
    }

    /// Checks normal count/unit length and id count.
    pub fn validate(&self) -> Result<()> {
        if let Some(normals) = &self.normals {
            if normals.len() != self.points.len() {
                return Err(Error::invalid(format!(
                    "{} normals for {} points",
                    normals.len(),
                    self.points.len()
                )));
            }
            if let Some(i) = normals.iter().position(|n| (n.norm() - 1.0).abs() > 1e-6) {
                return Err(Error::invalid(format!("normal {i} is not unit length")));
            }
        }
        if let Some(ids) = &self.object_ids {
            if ids.len() != self.points.len() {
                return Err(Error::invalid(format!(
                    "{} object ids for {} points",
                    ids.len(),
                    self.points.len()
                )));
            }
        }
        Ok(())
    }

    pub fn transformed(&self, t: &RigidTransform) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|p| t.apply(p)).collect(),
            normals: self
                .normals
                .as_ref()
                .map(|ns| ns.iter().map(|n| t.apply_vector(n)).collect()),
            object_ids: self.object_ids.clone(),
        }
    }

    /// Keeps the points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            normals: self
                .normals
                .as_ref()
                .map(|ns| indices.iter().map(|&i| ns[i]).collect()),
            object_ids: self
                .object_ids
                .as_ref()
                .map(|ids| indices.iter().map(|&i| ids[i]).collect()),
        }
    }

    pub fn centroid(&self) -> Option<Vec3> {
        if self.points.is_empty() {
            return None;
        }
        let sum: Vec3 = self.points.iter().sum();
        Some(sum / self.points.len() as f64)
    }

    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let first = *self.points.first()?;
        Some(
            self.points
                .iter()
                .fold((first, first), |(lo, hi), p| (lo.inf(p), hi.sup(p))),
        )
    }
}

/// Voxel-grid downsampling. One output point per occupied voxel: the input
/// point nearest to that voxel's centroid (ties go to the lower index).
/// Output keeps input order, so it is a subsequence of the input.
pub fn voxel_downsample(cloud: &PointCloud, voxel: f64) -> Result<PointCloud> {
    if !(voxel > 0.0) || !voxel.is_finite() {
        return Err(Error::invalid(format!("voxel size must be positive, got {voxel}")));
    }
    let mut buckets: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in cloud.points.iter().enumerate() {
        let key = (
            (p.x / voxel).floor() as i64,
            (p.y / voxel).floor() as i64,
            (p.z / voxel).floor() as i64,
        );
        buckets.entry(key).or_default().push(i);
    }
    let mut keep: Vec<usize> = buckets
        .values()
        .map(|members| {
            let centroid: Vec3 =
                members.iter().map(|&i| cloud.points[i]).sum::<Vec3>() / members.len() as f64;
            let mut best = members[0];
            let mut best_d = f64::INFINITY;
            for &i in members {
                let d = (cloud.points[i] - centroid).norm_squared();
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            best
        })
        .collect();
    keep.sort_unstable();
    Ok(cloud.select(&keep))
}

/// PCA normals from the `k` nearest neighbors of each point, oriented away
/// from the cloud centroid.
pub fn estimate_normals(cloud: &PointCloud, k: usize) -> Result<PointCloud> {
    if k < 3 {
        return Err(Error::invalid(format!("k must be at least 3, got {k}")));
    }
    if cloud.len() < k {
        return Err(Error::InsufficientPoints {
            needed: k,
            got: cloud.len(),
        });
    }
    let grid = SpatialGrid::with_auto_cell(&cloud.points);
    let centroid = cloud.centroid().expect("non-empty");
    let normals = cloud
        .points
        .iter()
        .map(|p| {
            let nbrs = grid.knn(p, k);
            let mean: Vec3 = nbrs.iter().map(|&i| cloud.points[i]).sum::<Vec3>() / k as f64;
            let mut cov = Matrix3::zeros();
            for &i in &nbrs {
                let d = cloud.points[i] - mean;
                cov += d * d.transpose();
            }
            let eig = SymmetricEigen::new(cov);
            let (min_idx, _) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("3 eigenvalues");
            let mut n: Vec3 = eig.eigenvectors.column(min_idx).into_owned().normalize();
            if n.dot(&(p - centroid)) < 0.0 {
                n = -n;
            }
            n
        })
        .collect();
    Ok(PointCloud {
        points: cloud.points.clone(),
        normals: Some(normals),
        object_ids: cloud.object_ids.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::collections::HashSet;

    #[test]
    fn downsample_single_and_close_points() {
        let one = PointCloud::new(vec![Vec3::new(0.3, 0.2, 0.1)]);
        assert_eq!(voxel_downsample(&one, 0.7).unwrap(), one);

        let two = PointCloud::new(vec![Vec3::new(0.0101, 0.0101, 0.0101), Vec3::new(0.0111, 0.0101, 0.0101)]);
        assert_eq!(voxel_downsample(&two, 0.005).unwrap().len(), 1);
        assert!(voxel_downsample(&PointCloud::default(), 0.01).unwrap().is_empty());
        assert!(voxel_downsample(&one, 0.0).is_err());
    }

    #[test]
    fn downsample_grid_matches_bucket_count() {
        // 10×10×10 lattice at 1 cm spacing, offset so no point sits on a voxel face.
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                for k in 0..10 {
                    pts.push(Vec3::new(i as f64, j as f64, k as f64) * 0.01 + Vec3::repeat(0.0031));
                }
            }
        }
        let cloud = PointCloud::new(pts.clone());
        let out = voxel_downsample(&cloud, 0.02).unwrap();
        let buckets: HashSet<(i64, i64, i64)> = pts
            .iter()
            .map(|p| ((p.x / 0.02).floor() as i64, (p.y / 0.02).floor() as i64, (p.z / 0.02).floor() as i64))
            .collect();
        assert_eq!(out.len(), buckets.len());
        assert_eq!(out.len(), 125);
    }

    #[test]
    fn downsample_is_idempotent() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let pts: Vec<Vec3> = (0..5000)
            .map(|_| Vec3::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)))
            .collect();
        let cloud = PointCloud::new(pts);
        let once = voxel_downsample(&cloud, 0.013).unwrap();
        let twice = voxel_downsample(&once, 0.013).unwrap();
        assert_eq!(once, twice);
        assert!(once.len() <= cloud.len());
    }

    #[test]
    fn normals_on_plane() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<Vec3> = (0..400)
            .map(|_| Vec3::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1), 0.0))
            .collect();
        let out = estimate_normals(&PointCloud::new(pts), 8).unwrap();
        for n in out.normals.unwrap() {
            assert!(n.z.abs() >= 5f64.to_radians().cos());
            assert!((n.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn normals_on_sphere_are_radial() {
        let dirs = crate::geometry::sample_sphere_directions(2000);
        let pts: Vec<Vec3> = dirs.iter().map(|d| d * 0.05).collect();
        let out = estimate_normals(&PointCloud::new(pts.clone()), 10).unwrap();
        for (p, n) in pts.iter().zip(out.normals.unwrap()) {
            let radial = p.normalize();
            assert!(n.dot(&radial) >= 10f64.to_radians().cos(), "{}", n.dot(&radial));
        }
    }

    #[test]
    fn normals_need_enough_points() {
        let cloud = PointCloud::new(vec![Vec3::zeros(), Vec3::x()]);
        assert!(matches!(
            estimate_normals(&cloud, 3),
            Err(Error::InsufficientPoints { needed: 3, got: 2 })
        ));
    }
}
