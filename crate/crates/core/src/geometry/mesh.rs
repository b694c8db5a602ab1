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

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PointCloud, RigidTransform, Vec3};
use crate::error::{Error, Result};

/// Indexed triangle mesh in meters. Every triangle has positive area.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    face_normals: Vec<Vec3>,
}

impl TriangleMesh {
    /// Validates indices and rejects degenerate triangles.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let (mesh, dropped) = Self::new_dropping_degenerate(vertices, triangles)?;
        if let Some(&face) = dropped.first() {
            return Err(Error::invalid(format!("triangle {face} is degenerate")));
        }
        Ok(mesh)
    }

    /// Validates indices; zero-area triangles are removed and their input
    /// positions returned.
    pub fn new_dropping_degenerate(
        vertices: Vec<Vec3>,
        triangles: Vec<[u32; 3]>,
    ) -> Result<(Self, Vec<usize>)> {
        if let Some(i) = vertices.iter().position(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::invalid(format!("vertex {i} is not finite")));
        }
        let mut kept = Vec::with_capacity(triangles.len());
        let mut normals = Vec::with_capacity(triangles.len());
        let mut dropped = Vec::new();
        for (f, tri) in triangles.into_iter().enumerate() {
            for &idx in &tri {
                if idx as usize >= vertices.len() {
                    return Err(Error::IndexOutOfRange {
                        face: f,
                        index: idx as i64,
                        count: vertices.len(),
                    });
                }
            }
            let [a, b, c] = tri.map(|i| vertices[i as usize]);
            let e1 = b - a;
            let e2 = c - a;
            let cross = e1.cross(&e2);
            let scale = e1.norm() * e2.norm();
            if !(cross.norm() > 1e-12 * scale) || scale == 0.0 {
                dropped.push(f);
                continue;
            }
            kept.push(tri);
            normals.push(cross.normalize());
        }
        Ok((
            TriangleMesh {
                vertices,
                triangles: kept,
                face_normals: normals,
            },
            dropped,
        ))
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn face_normals(&self) -> &[Vec3] {
        &self.face_normals
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, f: usize) -> [Vec3; 3] {
        self.triangles[f].map(|i| self.vertices[i as usize])
    }

    pub fn triangle_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.triangle(f);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|f| self.triangle_area(f)).sum()
    }

    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let first = *self.vertices.first()?;
        Some(
            self.vertices
                .iter()
                .fold((first, first), |(lo, hi), p| (lo.inf(p), hi.sup(p))),
        )
    }

    pub fn transformed(&self, t: &RigidTransform) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| t.apply(v)).collect(),
            triangles: self.triangles.clone(),
            face_normals: self.face_normals.iter().map(|n| t.apply_vector(n)).collect(),
        }
    }

    /// Area-weighted random surface samples with the source triangle's normal.
    ///
    /// `density` is points per square meter; at least one point is drawn.
    pub fn sample_surface(&self, density: f64, seed: u64) -> Result<PointCloud> {
        if self.triangles.is_empty() {
            return Err(Error::EmptyMesh);
        }
        if !(density > 0.0) {
            return Err(Error::invalid(format!("sampling density must be positive, got {density}")));
        }
        let mut cumulative = Vec::with_capacity(self.triangles.len());
        let mut total = 0.0;
        for f in 0..self.triangles.len() {
            total += self.triangle_area(f);
            cumulative.push(total);
        }
        let count = ((total * density).round() as usize).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(count);
        let mut normals = Vec::with_capacity(count);
        for _ in 0..count {
            let target = rng.gen::<f64>() * total;
            let f = cumulative
                .partition_point(|&c| c <= target)
                .min(self.triangles.len() - 1);
            let [a, b, c] = self.triangle(f);
            let (mut u, mut v): (f64, f64) = (rng.gen(), rng.gen());
            if u + v > 1.0 {
                u = 1.0 - u;
                v = 1.0 - v;
            }
            points.push(a + (b - a) * u + (c - a) * v);
            normals.push(self.face_normals[f]);
        }
        Ok(PointCloud {
            points,
            normals: Some(normals),
            object_ids: None,
        })
    }
}
