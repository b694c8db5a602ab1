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

//! Uniform hash grid over a fixed point set.

use std::collections::HashMap;

use super::Vec3;

type Cell = (i64, i64, i64);

/// Bucketed point index supporting box, radius and k-nearest queries.
///
/// Built once; all queries take `&self` and can run concurrently.
#[derive(Clone, Debug)]
pub struct SpatialGrid {
    cell: f64,
    points: Vec<Vec3>,
    cells: HashMap<Cell, Vec<u32>>,
    lo: Cell,
    hi: Cell,
}

impl SpatialGrid {
    /// Builds a grid with the given cell size (meters).
    pub fn new(points: &[Vec3], cell: f64) -> Self {
        assert!(cell > 0.0, "cell size must be positive");
        let mut cells: HashMap<Cell, Vec<u32>> = HashMap::new();
        let mut lo = (i64::MAX, i64::MAX, i64::MAX);
        let mut hi = (i64::MIN, i64::MIN, i64::MIN);
        for (i, p) in points.iter().enumerate() {
            let c = cell_of(p, cell);
            lo = (lo.0.min(c.0), lo.1.min(c.1), lo.2.min(c.2));
            hi = (hi.0.max(c.0), hi.1.max(c.1), hi.2.max(c.2));
            cells.entry(c).or_default().push(i as u32);
        }
        SpatialGrid {
            cell,
            points: points.to_vec(),
            cells,
            lo,
            hi,
        }
    }

    /// Picks a cell size giving a few points per occupied cell for typical surface clouds.
    pub fn with_auto_cell(points: &[Vec3]) -> Self {
        if points.is_empty() {
            return Self::new(points, 1.0);
        }
        let (mut min, mut max) = (points[0], points[0]);
        for p in points {
            min = min.inf(p);
            max = max.sup(p);
        }
        let ext = max - min;
        // Surface clouds scale with area: aim for ~16 points per occupied cell.
        let area = 2.0 * (ext.x * ext.y + ext.y * ext.z + ext.x * ext.z);
        let cell = (16.0 * area / points.len() as f64).sqrt().max(1e-4);
        Self::new(points, cell)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    /// Indices of all points inside the closed axis-aligned box, ascending.
    pub fn query_aabb(&self, min: &Vec3, max: &Vec3) -> Vec<usize> {
        let mut out = Vec::new();
        if self.points.is_empty() {
            return out;
        }
        let a = cell_of(min, self.cell);
        let b = cell_of(max, self.cell);
        let a = (a.0.max(self.lo.0), a.1.max(self.lo.1), a.2.max(self.lo.2));
        let b = (b.0.min(self.hi.0), b.1.min(self.hi.1), b.2.min(self.hi.2));
        if a.0 > b.0 || a.1 > b.1 || a.2 > b.2 {
            return out;
        }
        let span = ((b.0 - a.0 + 1) * (b.1 - a.1 + 1) * (b.2 - a.2 + 1)) as usize;
        if span > self.cells.len() {
            for bucket in self.cells.values() {
                self.collect_in_box(bucket, min, max, &mut out);
            }
        } else {
            for i in a.0..=b.0 {
                for j in a.1..=b.1 {
                    for k in a.2..=b.2 {
                        if let Some(bucket) = self.cells.get(&(i, j, k)) {
                            self.collect_in_box(bucket, min, max, &mut out);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn collect_in_box(&self, bucket: &[u32], min: &Vec3, max: &Vec3, out: &mut Vec<usize>) {
        for &idx in bucket {
            let p = &self.points[idx as usize];
            if p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z && p.z <= max.z {
                out.push(idx as usize);
            }
        }
    }

    /// Indices of points within `radius` of `center` (inclusive), ascending.
    pub fn query_radius(&self, center: &Vec3, radius: f64) -> Vec<usize> {
        let r = Vec3::repeat(radius);
        let r2 = radius * radius;
        let mut out = self.query_aabb(&(center - r), &(center + r));
        out.retain(|&i| (self.points[i] - center).norm_squared() <= r2);
        out
    }

    /// The `k` nearest points to `query`, sorted by distance (ties by index).
    pub fn knn(&self, query: &Vec3, k: usize) -> Vec<usize> {
        let k = k.min(self.points.len());
        if k == 0 {
            return Vec::new();
        }
        let c = cell_of(query, self.cell);
        let max_ring = [
            (c.0 - self.lo.0).abs(),
            (c.0 - self.hi.0).abs(),
            (c.1 - self.lo.1).abs(),
            (c.1 - self.hi.1).abs(),
            (c.2 - self.lo.2).abs(),
            (c.2 - self.hi.2).abs(),
        ]
        .into_iter()
        .max()
        .unwrap_or(0);
        let mut found: Vec<(f64, usize)> = Vec::new();
        let mut ring = 0i64;
        loop {
            self.visit_shell(c, ring, |idx| {
                found.push(((self.points[idx] - query).norm_squared(), idx));
            });
            // Every point outside the visited cube is farther than `ring * cell`.
            if found.len() >= k {
                found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let kth = found[k - 1].0.sqrt();
                if kth <= ring as f64 * self.cell || ring >= max_ring {
                    break;
                }
            }
            if ring >= max_ring {
                found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                break;
            }
            ring += 1;
        }
        found.truncate(k);
        found.into_iter().map(|(_, i)| i).collect()
    }

    fn visit_shell(&self, c: Cell, ring: i64, mut f: impl FnMut(usize)) {
        let mut visit = |cell: Cell| {
            if let Some(bucket) = self.cells.get(&cell) {
                for &idx in bucket {
                    f(idx as usize);
                }
            }
        };
        if ring == 0 {
            visit(c);
            return;
        }
        for i in -ring..=ring {
            for j in -ring..=ring {
                if i.abs() == ring || j.abs() == ring {
                    for k in -ring..=ring {
                        visit((c.0 + i, c.1 + j, c.2 + k));
                    }
                } else {
                    visit((c.0 + i, c.1 + j, c.2 - ring));
                    visit((c.0 + i, c.1 + j, c.2 + ring));
                }
            }
        }
    }
}

fn cell_of(p: &Vec3, cell: f64) -> Cell {
    (
        (p.x / cell).floor() as i64,
        (p.y / cell).floor() as i64,
        (p.z / cell).floor() as i64,
    )
}
