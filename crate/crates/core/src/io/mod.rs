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

//! File formats: meshes, point clouds, labels, scenes, predictions,
//! reports, gripper profiles and manifests.
//!
//! Every JSON document carries `"format"` and `"version"` fields; loaders
//! reject versions whose major number they do not know.

mod cloud;
mod labels;
mod manifest;
mod mesh;
mod predictions;
mod scene;

pub use cloud::{load_cloud, parse_cloud, save_cloud, write_cloud};
pub use labels::{
    decode_labels_binary, decode_labels_json, encode_labels_binary, encode_labels_json, load_labels, save_labels,
    LabelFormat, LABEL_MAGIC,
};
pub use manifest::{load_manifest, parse_manifest, save_manifest, Manifest, ObjectEntry, SceneEntry};
pub use mesh::{load_mesh, parse_obj, parse_ply, save_mesh, write_obj, write_ply, LoadedMesh};
pub use predictions::{
    decode_report, encode_report, load_predictions, load_report, parse_predictions_csv, parse_predictions_json, save_predictions, save_report,
    write_predictions_csv, write_predictions_json, Prediction, PredictionFormat,
};
pub use scene::{
    decode_scene, decode_scene_grasps, encode_scene, encode_scene_grasps, load_scene, load_scene_grasps, save_scene,
    save_scene_grasps,
};

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gripper::GripperModel;

/// Major version understood by the loaders.
pub const FORMAT_MAJOR: u32 = 1;
/// Version written into every file.
pub const FORMAT_VERSION: &str = "1.0";

/// Environment variable naming a default gripper profile file.
pub const PROFILE_ENV: &str = "GRASPBENCH_PROFILE";

pub(crate) fn check_version(found: &str) -> Result<()> {
    let major = found.split('.').next().and_then(|m| m.parse::<u32>().ok());
    if major == Some(FORMAT_MAJOR) {
        Ok(())
    } else {
        Err(Error::Version {
            found: found.to_string(),
            supported: FORMAT_MAJOR,
        })
    }
}

pub(crate) fn check_format(found: &str, expected: &str) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::format(format!("expected a {expected} document, found {found:?}")))
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

const GRIPPER_KEYS: [&str; 6] = [
    "max_width",
    "finger_length",
    "finger_height",
    "finger_thickness",
    "base_depth",
    "width_clearance",
];

fn gripper_values(m: &GripperModel) -> [f64; 6] {
    [
        m.max_width,
        m.finger_length,
        m.finger_height,
        m.finger_thickness,
        m.base_depth,
        m.width_clearance,
    ]
}

/// `key = value` lines in a fixed key order.
pub fn write_gripper_profile(m: &GripperModel) -> String {
    GRIPPER_KEYS
        .iter()
        .zip(gripper_values(m))
        .map(|(k, v)| format!("{k} = {v:?}\n"))
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GripperDoc {
    #[serde(default)]
    format: Option<String>,
    #[serde(default)]
    version: Option<String>,
    max_width: f64,
    finger_length: f64,
    finger_height: f64,
    finger_thickness: f64,
    base_depth: f64,
    width_clearance: f64,
}

/// JSON form of a gripper profile.
pub fn gripper_profile_json(m: &GripperModel) -> String {
    let doc = GripperDoc {
        format: Some("gripper".into()),
        version: Some(FORMAT_VERSION.into()),
        max_width: m.max_width,
        finger_length: m.finger_length,
        finger_height: m.finger_height,
        finger_thickness: m.finger_thickness,
        base_depth: m.base_depth,
        width_clearance: m.width_clearance,
    };
    serde_json::to_string_pretty(&doc).expect("gripper profile serializes") + "\n"
}

/// Parses a gripper profile given as JSON or as `key = value` lines
/// (`#` starts a comment). All six keys are required.
pub fn parse_gripper_profile(text: &str) -> Result<GripperModel> {
    let m = if text.trim_start().starts_with('{') {
        let doc: GripperDoc = serde_json::from_str(text)?;
        if let Some(f) = &doc.format {
            check_format(f, "gripper")?;
        }
        if let Some(v) = &doc.version {
            check_version(v)?;
        }
        let f = doc;
        GripperModel {
            max_width: f.max_width,
            finger_length: f.finger_length,
            finger_height: f.finger_height,
            finger_thickness: f.finger_thickness,
            base_depth: f.base_depth,
            width_clearance: f.width_clearance,
        }
    } else {
        let mut values: [Option<f64>; 6] = [None; 6];
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: n + 1, message };
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| parse_err(format!("expected key = value, got {line:?}")))?;
            let key = key.trim();
            let slot = GRIPPER_KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| parse_err(format!("unknown gripper key {key:?}")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad number {:?}", value.trim())))?;
            if values[slot].replace(v).is_some() {
                return Err(parse_err(format!("duplicate key {key:?}")));
            }
        }
        let get = |i: usize| {
            values[i].ok_or_else(|| Error::invalid(format!("gripper profile is missing {}", GRIPPER_KEYS[i])))
        };
        GripperModel {
            max_width: get(0)?,
            finger_length: get(1)?,
            finger_height: get(2)?,
            finger_thickness: get(3)?,
            base_depth: get(4)?,
            width_clearance: get(5)?,
        }
    };
    m.validate()?;
    Ok(m)
}

pub fn load_gripper_profile(path: &Path) -> Result<GripperModel> {
    parse_gripper_profile(&read_text(path)?)
}

/// Writes JSON when the path ends in `.json`, key-value text otherwise.
pub fn save_gripper_profile(m: &GripperModel, path: &Path) -> Result<()> {
    let text = if path.extension().is_some_and(|e| e == "json") {
        gripper_profile_json(m)
    } else {
        write_gripper_profile(m)
    };
    write_bytes(path, text.as_bytes())
}

/// First 16 hex digits of the SHA-256 of the key-value form.
pub fn gripper_profile_hash(m: &GripperModel) -> String {
    let digest = Sha256::digest(write_gripper_profile(m).as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_gripper(rng: &mut impl Rng) -> GripperModel {
        let ft = rng.gen_range(0.001..0.02);
        GripperModel {
            max_width: 2.0 * ft + rng.gen_range(0.01..0.2),
            finger_length: rng.gen_range(0.01..0.1),
            finger_height: rng.gen_range(0.005..0.05),
            finger_thickness: ft,
            base_depth: rng.gen_range(0.005..0.05),
            width_clearance: rng.gen_range(1e-4..0.02),
        }
    }

    #[test]
    fn profile_round_trips() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let m = random_gripper(&mut rng);
            assert_eq!(parse_gripper_profile(&write_gripper_profile(&m)).unwrap(), m);
            assert_eq!(parse_gripper_profile(&gripper_profile_json(&m)).unwrap(), m);
        }
    }

    #[test]
    fn profile_errors() {
        let text = write_gripper_profile(&GripperModel::default());
        let missing: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert!(parse_gripper_profile(&missing).is_err());
        let unknown = format!("{text}colour = 1\n");
        assert!(matches!(parse_gripper_profile(&unknown), Err(Error::Parse { line: 7, .. })));
        let negative = text.replace("base_depth = 0.02", "base_depth = -0.02");
        assert!(parse_gripper_profile(&negative).is_err());
        let future = gripper_profile_json(&GripperModel::default()).replace("\"1.0\"", "\"2.0\"");
        assert!(matches!(parse_gripper_profile(&future), Err(Error::Version { .. })));
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let m = GripperModel::default();
        let h = gripper_profile_hash(&m);
        assert_eq!(h.len(), 16);
        assert_eq!(h, gripper_profile_hash(&m));
        let other = GripperModel {
            width_clearance: 0.011,
            ..m
        };
        assert_ne!(h, gripper_profile_hash(&other));
    }
}
