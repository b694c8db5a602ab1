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

//! ASCII OBJ and PLY meshes.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{TriangleMesh, Vec3};

use super::{read_text, write_bytes};

/// A parsed mesh and the input positions of degenerate faces that were
/// dropped (after polygon fan triangulation).
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedMesh {
    pub mesh: TriangleMesh,
    pub degenerate_faces: Vec<usize>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(line, format!("bad number {tok:?}")))
}

fn finish(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<LoadedMesh> {
    if triangles.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let (mesh, degenerate_faces) = TriangleMesh::new_dropping_degenerate(vertices, triangles)?;
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    Ok(LoadedMesh { mesh, degenerate_faces })
}

fn fan(polygon: &[u32], out: &mut Vec<[u32; 3]>) {
    for i in 1..polygon.len() - 1 {
        out.push([polygon[0], polygon[i], polygon[i + 1]]);
    }
}

/// Parses `v` and `f` records; polygons are fan-triangulated. Face indices
/// are 1-based, negative indices count back from the last vertex. Other
/// record types are ignored.
pub fn parse_obj(text: &str) -> Result<LoadedMesh> {
    let mut vertices = Vec::new();
    let mut faces: Vec<(usize, Vec<i64>, usize)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("");
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("v") => {
                let coords: Vec<&str> = toks.collect();
                if coords.len() < 3 {
                    return Err(parse_err(line_no, "vertex needs three coordinates"));
                }
                vertices.push(Vec3::new(
                    parse_f64(coords[0], line_no)?,
                    parse_f64(coords[1], line_no)?,
                    parse_f64(coords[2], line_no)?,
                ));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for tok in toks {
                    let head = tok.split('/').next().unwrap_or("");
                    let i: i64 = head
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad face index {tok:?}")))?;
                    if i == 0 {
                        return Err(parse_err(line_no, "face index 0 (indices are 1-based)"));
                    }
                    idx.push(i);
                }
                if idx.len() < 3 {
                    return Err(parse_err(line_no, "face needs at least three vertices"));
                }
                faces.push((line_no, idx, vertices.len()));
            }
            _ => {}
        }
    }
    let count = vertices.len();
    let mut triangles = Vec::new();
    for (_, idx, seen) in faces {
        let mut polygon = Vec::with_capacity(idx.len());
        for i in idx {
            let resolved = if i > 0 { i - 1 } else { seen as i64 + i };
            if resolved < 0 || resolved as usize >= count {
                return Err(Error::IndexOutOfRange {
                    face: triangles.len(),
                    index: i,
                    count,
                });
            }
            polygon.push(resolved as u32);
        }
        fan(&polygon, &mut triangles);
    }
    finish(vertices, triangles)
}

pub fn write_obj(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        out.push_str(&format!("v {:?} {:?} {:?}\n", v.x, v.y, v.z));
    }
    for t in mesh.triangles() {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    out
}

struct PlyElement {
    name: String,
    count: usize,
    /// Scalar property names, or `None` for a list property.
    props: Vec<Option<String>>,
}

/// Parses ASCII PLY with a `vertex` element (`x`, `y`, `z` properties) and
/// a `face` element holding a vertex index list.
pub fn parse_ply(text: &str) -> Result<LoadedMesh> {
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(parse_err(1, "missing ply magic")),
    }
    let mut elements: Vec<PlyElement> = Vec::new();
    let mut ended = false;
    for (n, line) in lines.by_ref() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["format", "ascii", _] => {}
            ["format", other, ..] => return Err(parse_err(n, format!("unsupported PLY format {other}"))),
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => elements.push(PlyElement {
                name: name.to_string(),
                count: count
                    .parse()
                    .map_err(|_| parse_err(n, format!("bad element count {count:?}")))?,
                props: Vec::new(),
            }),
            ["property", "list", _, _, _] => elements
                .last_mut()
                .ok_or_else(|| parse_err(n, "property before element"))?
                .props
                .push(None),
            ["property", _, name] => elements
                .last_mut()
                .ok_or_else(|| parse_err(n, "property before element"))?
                .props
                .push(Some(name.to_string())),
            ["end_header"] => {
                ended = true;
                break;
            }
            _ => return Err(parse_err(n, format!("unexpected header line {line:?}"))),
        }
    }
    if !ended {
        return Err(parse_err(0, "missing end_header"));
    }
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut body = lines.filter(|(_, l)| !l.is_empty());
    for el in &elements {
        let pos = |name: &str| el.props.iter().position(|p| p.as_deref() == Some(name));
        for _ in 0..el.count {
            let (n, line) = body
                .next()
                .ok_or_else(|| parse_err(0, format!("file ends inside element {}", el.name)))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            match el.name.as_str() {
                "vertex" => {
                    let (Some(x), Some(y), Some(z)) = (pos("x"), pos("y"), pos("z")) else {
                        return Err(parse_err(n, "vertex element lacks x, y or z"));
                    };
                    if el.props.iter().any(|p| p.is_none()) {
                        return Err(parse_err(n, "list properties on vertices are not supported"));
                    }
                    if toks.len() != el.props.len() {
                        return Err(parse_err(n, format!("expected {} values", el.props.len())));
                    }
                    vertices.push(Vec3::new(
                        parse_f64(toks[x], n)?,
                        parse_f64(toks[y], n)?,
                        parse_f64(toks[z], n)?,
                    ));
                }
                "face" => {
                    if el.props.len() != 1 || el.props[0].is_some() {
                        return Err(parse_err(n, "face element must hold one index list"));
                    }
                    let k: usize = toks
                        .first()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| parse_err(n, "bad face list length"))?;
                    if k < 3 || toks.len() != k + 1 {
                        return Err(parse_err(n, format!("face list has {} entries", toks.len().saturating_sub(1))));
                    }
                    let mut polygon = Vec::with_capacity(k);
                    for t in &toks[1..] {
                        let i: i64 = t.parse().map_err(|_| parse_err(n, format!("bad index {t:?}")))?;
                        if i < 0 || i as usize >= el_count(&elements, "vertex") {
                            return Err(Error::IndexOutOfRange {
                                face: triangles.len(),
                                index: i,
                                count: el_count(&elements, "vertex"),
                            });
                        }
                        polygon.push(i as u32);
                    }
                    fan(&polygon, &mut triangles);
                }
                _ => {}
            }
        }
    }
    finish(vertices, triangles)
}

fn el_count(elements: &[PlyElement], name: &str) -> usize {
    elements.iter().find(|e| e.name == name).map_or(0, |e| e.count)
}

pub fn write_ply(mesh: &TriangleMesh) -> String {
    let mut out = format!(
        "ply\nformat ascii 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertices().len(),
        mesh.triangles().len()
    );
    for v in mesh.vertices() {
        out.push_str(&format!("{:?} {:?} {:?}\n", v.x, v.y, v.z));
    }
    for t in mesh.triangles() {
        out.push_str(&format!("3 {} {} {}\n", t[0], t[1], t[2]));
    }
    out
}

fn is_ply(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("ply"))
}

/// Loads `.ply` files as PLY and anything else as OBJ.
pub fn load_mesh(path: &Path) -> Result<LoadedMesh> {
    let text = read_text(path)?;
    if is_ply(path) {
        parse_ply(&text)
    } else {
        parse_obj(&text)
    }
}

pub fn save_mesh(mesh: &TriangleMesh, path: &Path) -> Result<()> {
    let text = if is_ply(path) { write_ply(mesh) } else { write_obj(mesh) };
    write_bytes(path, text.as_bytes())
}
