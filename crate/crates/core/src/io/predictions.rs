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

//! Prediction files and evaluation reports.
//!
//! A prediction is a rotation (9 floats, row-major), a translation (the
//! center of the closing region, meters), an opening width and a confidence.
//! JSON files hold an array of such records; CSV files hold the same 14
//! values per row with an optional header row.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::EvalReport;
use crate::geometry::{RotationMatrix, Vec3};
use crate::gripper::{GraspPose, GripperModel};

use super::{check_format, check_version, read_text, write_bytes, FORMAT_VERSION};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub rotation: RotationMatrix,
    pub translation: Vec3,
    pub width: f64,
    pub confidence: f64,
}

impl Prediction {
    /// The grasp this prediction describes; the closing region is centered
    /// on the translation.
    pub fn to_grasp(&self, m: &GripperModel) -> GraspPose {
        let mut g = GraspPose::new(self.rotation, self.translation, self.width, 0.5 * m.finger_length);
        g.confidence = self.confidence;
        g
    }

    pub fn from_grasp(g: &GraspPose, m: &GripperModel) -> Self {
        Prediction {
            rotation: g.rotation,
            translation: g.region_center(m),
            width: g.width,
            confidence: g.confidence,
        }
    }

    fn validate_scalars(&self, index: usize) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::invalid(format!("prediction {index}: width must be positive")));
        }
        if !self.confidence.is_finite() || !self.translation.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid(format!("prediction {index}: non-finite value")));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PredictionDoc {
    rotation: Vec<f64>,
    translation: [f64; 3],
    width: f64,
    confidence: f64,
}

fn build(index: usize, rotation: &[f64], translation: [f64; 3], width: f64, confidence: f64) -> Result<Prediction> {
    let rows: [f64; 9] = rotation
        .try_into()
        .map_err(|_| Error::invalid(format!("prediction {index}: rotation needs 9 values, got {}", rotation.len())))?;
    let rotation = RotationMatrix::from_rows(rows)
        .map_err(|e| Error::invalid(format!("prediction {index}: {e}")))?;
    let p = Prediction {
        rotation,
        translation: Vec3::from(translation),
        width,
        confidence,
    };
    p.validate_scalars(index)?;
    Ok(p)
}

pub fn parse_predictions_json(text: &str) -> Result<Vec<Prediction>> {
    let docs: Vec<PredictionDoc> = serde_json::from_str(text)?;
    docs.iter()
        .enumerate()
        .map(|(i, d)| build(i, &d.rotation, d.translation, d.width, d.confidence))
        .collect()
}

pub fn write_predictions_json(preds: &[Prediction]) -> String {
    let docs: Vec<PredictionDoc> = preds
        .iter()
        .map(|p| PredictionDoc {
            rotation: p.rotation.to_rows().to_vec(),
            translation: p.translation.into(),
            width: p.width,
            confidence: p.confidence,
        })
        .collect();
    serde_json::to_string_pretty(&docs).expect("predictions serialize") + "\n"
}

const CSV_HEADER: &str = "r00,r01,r02,r10,r11,r12,r20,r21,r22,tx,ty,tz,width,confidence";

pub fn parse_predictions_csv(text: &str) -> Result<Vec<Prediction>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if out.is_empty() && n == 0 && cells.first().is_some_and(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        let err = |message: String| Error::Parse { line: n + 1, message };
        if cells.len() != 14 {
            return Err(err(format!("expected 14 columns, found {}", cells.len())));
        }
        let v = cells
            .iter()
            .map(|c| c.parse::<f64>().map_err(|_| err(format!("bad number {c:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        out.push(build(out.len(), &v[..9], [v[9], v[10], v[11]], v[12], v[13])?);
    }
    Ok(out)
}

pub fn write_predictions_csv(preds: &[Prediction]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for p in preds {
        let mut cells: Vec<String> = p.rotation.to_rows().iter().map(|v| format!("{v:?}")).collect();
        cells.extend(p.translation.iter().map(|v| format!("{v:?}")));
        cells.push(format!("{:?}", p.width));
        cells.push(format!("{:?}", p.confidence));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredictionFormat {
    Json,
    Csv,
}

impl PredictionFormat {
    pub fn from_path(path: &Path) -> Self {
        if path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
        {
            PredictionFormat::Csv
        } else {
            PredictionFormat::Json
        }
    }
}

/// Reads JSON or CSV, chosen by the first non-blank character.
pub fn load_predictions(path: &Path) -> Result<Vec<Prediction>> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('[') {
        parse_predictions_json(&text)
    } else {
        parse_predictions_csv(&text)
    }
}

pub fn save_predictions(preds: &[Prediction], path: &Path) -> Result<()> {
    let text = match PredictionFormat::from_path(path) {
        PredictionFormat::Json => write_predictions_json(preds),
        PredictionFormat::Csv => write_predictions_csv(preds),
    };
    write_bytes(path, text.as_bytes())
}

const REPORT_FORMAT: &str = "graspbench-report";

#[derive(Serialize, Deserialize)]
struct ReportDoc {
    format: String,
    version: String,
    #[serde(flatten)]
    report: EvalReport,
}

pub fn encode_report(report: &EvalReport) -> String {
    let doc = ReportDoc {
        format: REPORT_FORMAT.into(),
        version: FORMAT_VERSION.into(),
        report: report.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
}

pub fn decode_report(text: &str) -> Result<EvalReport> {
    let doc: ReportDoc = serde_json::from_str(text)?;
    check_format(&doc.format, REPORT_FORMAT)?;
    check_version(&doc.version)?;
    Ok(doc.report)
}

pub fn save_report(report: &EvalReport, path: &Path) -> Result<()> {
    write_bytes(path, encode_report(report).as_bytes())
}

pub fn load_report(path: &Path) -> Result<EvalReport> {
    decode_report(&read_text(path)?)
}
