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

//! Label files.
//!
//! Binary layout (little endian):
//!
//! ```text
//! magic      4 bytes  "GBLB"
//! major      u16
//! minor      u16
//! header_len u32
//! header     header_len bytes of JSON (the label header plus num_points)
//! 5 arrays   grasp_points f64 [N,3], grasp_normals f64 [N,3],
//!            scores f32 [N,V,A,D], widths f32 [N,V,A,D], flags u8 [N,V,A,D]
//! ```
//!
//! Each array is `dtype: u8` (1 = f64, 2 = f32, 3 = u8), `ndim: u8`,
//! `ndim` u32 dimensions, then the packed elements.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annotation::{GraspLabelSet, LabelFlag, LabelHeader};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

use super::{check_format, check_version, write_bytes, FORMAT_MAJOR, FORMAT_VERSION};

pub const LABEL_MAGIC: &[u8; 4] = b"GBLB";
const MINOR: u16 = 0;
const FORMAT_NAME: &str = "graspbench-labels";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelFormat {
    Json,
    Binary,
}

impl LabelFormat {
    /// `.json` selects JSON; everything else is binary.
    pub fn from_path(path: &Path) -> Self {
        if path.extension().is_some_and(|e| e == "json") {
            LabelFormat::Json
        } else {
            LabelFormat::Binary
        }
    }
}

impl std::str::FromStr for LabelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(LabelFormat::Json),
            "binary" | "bin" => Ok(LabelFormat::Binary),
            other => Err(Error::invalid(format!("unknown label format {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonLabels {
    format: String,
    version: String,
    header: LabelHeader,
    shape: [usize; 4],
    grasp_points: Vec<Vec3>,
    grasp_normals: Vec<Vec3>,
    scores: Vec<f32>,
    widths: Vec<f32>,
    flags: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BinaryHeader {
    format: String,
    version: String,
    num_points: usize,
    header: LabelHeader,
}

fn decode_flags(raw: Vec<u8>) -> Result<Vec<LabelFlag>> {
    raw.into_iter()
        .enumerate()
        .map(|(i, v)| LabelFlag::from_u8(v).ok_or_else(|| Error::format(format!("cell {i}: unknown flag {v}"))))
        .collect()
}

pub fn encode_labels_json(labels: &GraspLabelSet) -> String {
    let doc = JsonLabels {
        format: FORMAT_NAME.into(),
        version: FORMAT_VERSION.into(),
        header: labels.header.clone(),
        shape: labels.shape(),
        grasp_points: labels.grasp_points.clone(),
        grasp_normals: labels.grasp_normals.clone(),
        scores: labels.scores.clone(),
        widths: labels.widths.clone(),
        flags: labels.flags.iter().map(|&f| f as u8).collect(),
    };
    serde_json::to_string(&doc).expect("labels serialize") + "\n"
}

pub fn decode_labels_json(text: &str) -> Result<GraspLabelSet> {
    let doc: JsonLabels = serde_json::from_str(text)?;
    check_format(&doc.format, FORMAT_NAME)?;
    check_version(&doc.version)?;
    let labels = GraspLabelSet {
        header: doc.header,
        grasp_points: doc.grasp_points,
        grasp_normals: doc.grasp_normals,
        scores: doc.scores,
        widths: doc.widths,
        flags: decode_flags(doc.flags)?,
    };
    if labels.shape() != doc.shape {
        return Err(Error::format(format!(
            "shape {:?} disagrees with header {:?}",
            doc.shape,
            labels.shape()
        )));
    }
    labels.validate(None)?;
    Ok(labels)
}

const F64: u8 = 1;
const F32: u8 = 2;
const U8: u8 = 3;

fn put_array_header(out: &mut Vec<u8>, dtype: u8, dims: &[usize]) {
    out.push(dtype);
    out.push(dims.len() as u8);
    for &d in dims {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
}

pub fn encode_labels_binary(labels: &GraspLabelSet) -> Vec<u8> {
    let header = BinaryHeader {
        format: FORMAT_NAME.into(),
        version: FORMAT_VERSION.into(),
        num_points: labels.num_points(),
        header: labels.header.clone(),
    };
    let header = serde_json::to_vec(&header).expect("header serializes");
    let shape = labels.shape();
    let mut out = Vec::with_capacity(64 + header.len() + labels.scores.len() * 9 + labels.num_points() * 48);
    out.extend_from_slice(LABEL_MAGIC);
    out.extend_from_slice(&(FORMAT_MAJOR as u16).to_le_bytes());
    out.extend_from_slice(&MINOR.to_le_bytes());
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(&header);
    for vs in [&labels.grasp_points, &labels.grasp_normals] {
        put_array_header(&mut out, F64, &[vs.len(), 3]);
        for v in vs.iter() {
            for c in v.iter() {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
    }
    for vs in [&labels.scores, &labels.widths] {
        put_array_header(&mut out, F32, &shape);
        for v in vs.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    put_array_header(&mut out, U8, &shape);
    out.extend(labels.flags.iter().map(|&f| f as u8));
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::format(format!("truncated label file while reading {what}")))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    /// Reads an array header and checks it against the expected type and shape;
    /// returns the raw element bytes.
    fn array(&mut self, what: &str, dtype: u8, dims: &[usize]) -> Result<&'a [u8]> {
        let t = self.u8(what)?;
        let nd = self.u8(what)? as usize;
        if t != dtype || nd != dims.len() {
            return Err(Error::format(format!("{what}: unexpected dtype {t} / ndim {nd}")));
        }
        for &d in dims {
            let got = self.u32(what)? as usize;
            if got != d {
                return Err(Error::format(format!("{what}: dimension {got} disagrees with header ({d})")));
            }
        }
        let size = match dtype {
            F64 => 8,
            F32 => 4,
            _ => 1,
        };
        let count = dims
            .iter()
            .try_fold(size, |acc: usize, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::format(format!("{what}: size overflows")))?;
        self.take(count, what)
    }
}

fn vec3s(bytes: &[u8]) -> Vec<Vec3> {
    bytes
        .chunks_exact(24)
        .map(|c| {
            let f = |i: usize| f64::from_le_bytes(c[i * 8..i * 8 + 8].try_into().unwrap());
            Vec3::new(f(0), f(1), f(2))
        })
        .collect()
}

fn f32s(bytes: &[u8]) -> Vec<f32> {
    bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect()
}

pub fn decode_labels_binary(bytes: &[u8]) -> Result<GraspLabelSet> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4, "magic")? != LABEL_MAGIC {
        return Err(Error::format("not a label file (bad magic)"));
    }
    let major = r.u16("version")?;
    let minor = r.u16("version")?;
    if u32::from(major) != FORMAT_MAJOR {
        return Err(Error::Version {
            found: format!("{major}.{minor}"),
            supported: FORMAT_MAJOR,
        });
    }
    let len = r.u32("header length")? as usize;
    let header: BinaryHeader = serde_json::from_slice(r.take(len, "header")?)?;
    check_format(&header.format, FORMAT_NAME)?;
    check_version(&header.version)?;
    let n = header.num_points;
    let shape = [n, header.header.views, header.header.angles.len(), header.header.depths.len()];
    let grasp_points = vec3s(r.array("grasp_points", F64, &[n, 3])?);
    let grasp_normals = vec3s(r.array("grasp_normals", F64, &[n, 3])?);
    let scores = f32s(r.array("scores", F32, &shape)?);
    let widths = f32s(r.array("widths", F32, &shape)?);
    let flags = decode_flags(r.array("flags", U8, &shape)?.to_vec())?;
    if r.pos != bytes.len() {
        return Err(Error::format(format!("{} trailing bytes after label data", bytes.len() - r.pos)));
    }
    let labels = GraspLabelSet {
        header: header.header,
        grasp_points,
        grasp_normals,
        scores,
        widths,
        flags,
    };
    labels.validate(None)?;
    Ok(labels)
}

pub fn save_labels(labels: &GraspLabelSet, path: &Path, format: LabelFormat) -> Result<()> {
    match format {
        LabelFormat::Json => write_bytes(path, encode_labels_json(labels).as_bytes()),
        LabelFormat::Binary => write_bytes(path, &encode_labels_binary(labels)),
    }
}

/// Detects the encoding from the content.
pub fn load_labels(path: &Path) -> Result<GraspLabelSet> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(LABEL_MAGIC) {
        return decode_labels_binary(&bytes);
    }
    let text = std::str::from_utf8(&bytes).map_err(|_| Error::format("not a label file (bad magic)"))?;
    if text.trim_start().starts_with('{') {
        decode_labels_json(text)
    } else {
        Err(Error::format("not a label file (bad magic)"))
    }
}
