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

//! Whitespace-separated point cloud text: `x y z [nx ny nz] [object_id]`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, Vec3};

use super::{read_text, write_bytes};

/// Parses one point per line. Every line must have the same column count:
/// 3 (points), 4 (points and ids), 6 (points and normals) or 7 (all).
/// Blank lines and `#` comments are skipped.
pub fn parse_cloud(text: &str) -> Result<PointCloud> {
    let mut points = Vec::new();
    let mut normals = Vec::new();
    let mut ids = Vec::new();
    let mut columns = None;
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let cols = *columns.get_or_insert(toks.len());
        let err = |message: String| Error::Parse { line: line_no, message };
        if toks.len() != cols {
            return Err(err(format!("expected {cols} columns, found {}", toks.len())));
        }
        if !matches!(cols, 3 | 4 | 6 | 7) {
            return Err(err(format!("unsupported column count {cols}")));
        }
        let num = |i: usize| {
            toks[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("bad number {:?}", toks[i])))
        };
        points.push(Vec3::new(num(0)?, num(1)?, num(2)?));
        if cols >= 6 {
            normals.push(Vec3::new(num(3)?, num(4)?, num(5)?));
        }
        if cols == 4 || cols == 7 {
            let t = toks[cols - 1];
            ids.push(t.parse::<u32>().map_err(|_| err(format!("bad object id {t:?}")))?);
        }
    }
    let cols = columns.unwrap_or(3);
    let cloud = PointCloud {
        points,
        normals: (cols >= 6).then_some(normals),
        object_ids: (cols == 4 || cols == 7).then_some(ids),
    };
    cloud.validate()?;
    Ok(cloud)
}

pub fn write_cloud(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for (i, p) in cloud.points.iter().enumerate() {
        out.push_str(&format!("{:?} {:?} {:?}", p.x, p.y, p.z));
        if let Some(n) = cloud.normal(i) {
            out.push_str(&format!(" {:?} {:?} {:?}", n.x, n.y, n.z));
        }
        if let Some(id) = cloud.object_id(i) {
            out.push_str(&format!(" {id}"));
        }
        out.push('\n');
    }
    out
}

pub fn load_cloud(path: &Path) -> Result<PointCloud> {
    parse_cloud(&read_text(path)?)
}

pub fn save_cloud(cloud: &PointCloud, path: &Path) -> Result<()> {
    write_bytes(path, write_cloud(cloud).as_bytes())
}
