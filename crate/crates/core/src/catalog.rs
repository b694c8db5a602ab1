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

//! Primitive meshes and the built-in object catalog.

use std::collections::HashMap;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{TriangleMesh, Vec3};

/// Builds a mesh from a convex vertex set's faces, flipping any triangle
/// whose normal points toward the centroid.
fn convex_mesh(vertices: Vec<Vec3>, mut triangles: Vec<[u32; 3]>) -> TriangleMesh {
    let centroid: Vec3 = vertices.iter().sum::<Vec3>() / vertices.len() as f64;
    for t in &mut triangles {
        let [a, b, c] = t.map(|i| vertices[i as usize]);
        let n = (b - a).cross(&(c - a));
        if n.dot(&((a + b + c) / 3.0 - centroid)) < 0.0 {
            t.swap(1, 2);
        }
    }
    TriangleMesh::new(vertices, triangles).expect("primitive meshes are well formed")
}

/// Axis-aligned box centered at the origin.
pub fn box_mesh(size: Vec3) -> TriangleMesh {
    let h = size * 0.5;
    let vertices: Vec<Vec3> = (0..8)
        .map(|i| {
            Vec3::new(
                if i & 1 == 0 { -h.x } else { h.x },
                if i & 2 == 0 { -h.y } else { h.y },
                if i & 4 == 0 { -h.z } else { h.z },
            )
        })
        .collect();
    let quads = [
        [0, 2, 6, 4],
        [1, 5, 7, 3],
        [0, 4, 5, 1],
        [2, 3, 7, 6],
        [0, 1, 3, 2],
        [4, 6, 7, 5],
    ];
    let triangles = quads
        .iter()
        .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
        .collect();
    convex_mesh(vertices, triangles)
}

/// Icosahedron subdivided `subdivisions` times and projected onto the sphere.
pub fn icosphere(radius: f64, subdivisions: usize) -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut mid = |a: u32, b: u32, vertices: &mut Vec<Vec3>| {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                vertices.push(((vertices[a as usize] + vertices[b as usize]) * 0.5).normalize());
                (vertices.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let vertices = vertices.into_iter().map(|v| v * radius).collect();
    convex_mesh(vertices, faces)
}

/// Frustum (cylinder when radii match) along z, centered at the origin.
pub fn frustum(bottom_radius: f64, top_radius: f64, height: f64, segments: usize) -> TriangleMesh {
    let ring = |r: f64| -> Vec<(f64, f64)> {
        (0..segments)
            .map(|i| {
                let a = TAU * i as f64 / segments as f64;
                (r * a.cos(), r * a.sin())
            })
            .collect()
    };
    let bottom = ring(bottom_radius);
    let top = ring(top_radius);
    extrude_rings(&bottom, &top, height)
}

pub fn cylinder(radius: f64, height: f64, segments: usize) -> TriangleMesh {
    frustum(radius, radius, height, segments)
}

/// Straight prism over a convex polygon (counter-clockwise, in the xy plane).
pub fn prism(polygon: &[(f64, f64)], height: f64) -> TriangleMesh {
    extrude_rings(polygon, polygon, height)
}

/// Regular `n`-gon prism with circumradius `radius`.
pub fn regular_prism(n: usize, radius: f64, height: f64) -> TriangleMesh {
    let poly: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let a = TAU * i as f64 / n as f64;
            (radius * a.cos(), radius * a.sin())
        })
        .collect();
    prism(&poly, height)
}

fn extrude_rings(bottom: &[(f64, f64)], top: &[(f64, f64)], height: f64) -> TriangleMesh {
    let n = bottom.len();
    let h = height * 0.5;
    let mut vertices: Vec<Vec3> = bottom.iter().map(|&(x, y)| Vec3::new(x, y, -h)).collect();
    vertices.extend(top.iter().map(|&(x, y)| Vec3::new(x, y, h)));
    let cb = vertices.len() as u32;
    vertices.push(Vec3::new(0.0, 0.0, -h));
    let ct = vertices.len() as u32;
    vertices.push(Vec3::new(0.0, 0.0, h));
    let mut triangles = Vec::new();
    for i in 0..n as u32 {
        let j = (i + 1) % n as u32;
        let (bi, bj, ti, tj) = (i, j, i + n as u32, j + n as u32);
        triangles.push([bi, bj, tj]);
        triangles.push([bi, tj, ti]);
        triangles.push([cb, bj, bi]);
        triangles.push([ct, ti, tj]);
    }
    convex_mesh(vertices, triangles)
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: u32,
    pub name: String,
    pub mesh: TriangleMesh,
}

/// Objects available for scene synthesis and annotation, keyed by id.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn new(mut entries: Vec<CatalogEntry>) -> Result<Self> {
        entries.sort_by_key(|e| e.id);
        for w in entries.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::invalid(format!("duplicate object id {}", w[0].id)));
            }
        }
        if entries.iter().any(|e| e.id == 0) {
            return Err(Error::invalid("object id 0 is reserved for the table"));
        }
        Ok(Catalog { entries })
    }

    /// Ten desk-scale convex primitives, ids 1 through 10.
    pub fn builtin() -> Self {
        let cm = 0.01;
        let e = |id: u32, name: &str, mesh: TriangleMesh| CatalogEntry {
            id,
            name: name.to_string(),
            mesh,
        };
        let tri_side = 6.0 * cm;
        let tri = [
            (0.0, tri_side / 3f64.sqrt()),
            (-tri_side / 2.0, -tri_side / (2.0 * 3f64.sqrt())),
            (tri_side / 2.0, -tri_side / (2.0 * 3f64.sqrt())),
        ];
        Catalog::new(vec![
            e(1, "box-small", box_mesh(Vec3::new(4.0, 4.0, 4.0) * cm)),
            e(2, "box-flat", box_mesh(Vec3::new(8.0, 5.0, 2.5) * cm)),
            e(3, "box-tall", box_mesh(Vec3::new(3.0, 5.0, 9.0) * cm)),
            e(4, "cylinder-thin", cylinder(1.5 * cm, 10.0 * cm, 48)),
            e(5, "cylinder-wide", cylinder(3.5 * cm, 5.0 * cm, 64)),
            e(6, "sphere", icosphere(3.0 * cm, 4)),
            e(7, "sphere-small", icosphere(2.0 * cm, 4)),
            e(8, "prism-tri", prism(&tri, 5.0 * cm)),
            e(9, "prism-hex", regular_prism(6, 3.0 * cm, 6.0 * cm)),
            e(10, "frustum", frustum(3.5 * cm, 2.0 * cm, 7.0 * cm, 64)),
        ])
        .expect("builtin ids are unique")
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, id: u32) -> Option<&CatalogEntry> {
        self.entries
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn by_name(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Resolves an id or a name.
    pub fn resolve(&self, key: &str) -> Result<&CatalogEntry> {
        let found = match key.parse::<u32>() {
            Ok(id) => self.get(id),
            Err(_) => self.by_name(key),
        };
        found.ok_or_else(|| Error::invalid(format!("unknown object {key:?}")))
    }
}
