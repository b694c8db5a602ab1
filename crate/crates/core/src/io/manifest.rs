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

//! Manifest tying a catalog of meshes and labels to scenes and a gripper profile.
//!
//! Relative paths in a manifest are resolved against `catalog_root`, which
//! is itself relative to the manifest file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{check_format, check_version, read_text, write_bytes, FORMAT_VERSION};

const MANIFEST_FORMAT: &str = "graspbench-manifest";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectEntry {
    pub id: u32,
    pub mesh: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneEntry {
    pub id: String,
    pub path: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: String,
    pub version: String,
    pub catalog_root: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gripper_profile: Option<String>,
    pub objects: Vec<ObjectEntry>,
    #[serde(default)]
    pub scenes: Vec<SceneEntry>,
}

impl Manifest {
    pub fn new(catalog_root: impl Into<String>) -> Self {
        Manifest {
            format: MANIFEST_FORMAT.into(),
            version: FORMAT_VERSION.into(),
            catalog_root: catalog_root.into(),
            gripper_profile: None,
            objects: Vec::new(),
            scenes: Vec::new(),
        }
    }

    /// Absolute location of a manifest-relative path, given the manifest's directory.
    pub fn resolve(&self, manifest_dir: &Path, rel: &str) -> PathBuf {
        manifest_dir.join(&self.catalog_root).join(rel)
    }

    fn referenced(&self) -> impl Iterator<Item = &str> {
        self.objects
            .iter()
            .flat_map(|o| std::iter::once(o.mesh.as_str()).chain(o.labels.as_deref()))
            .chain(self.scenes.iter().map(|s| s.path.as_str()))
            .chain(self.gripper_profile.as_deref())
    }

    pub fn object(&self, id: u32) -> Option<&ObjectEntry> {
        self.objects.iter().find(|o| o.id == id)
    }
}

pub fn parse_manifest(text: &str) -> Result<Manifest> {
    let m: Manifest = serde_json::from_str(text)?;
    check_format(&m.format, MANIFEST_FORMAT)?;
    check_version(&m.version)?;
    let mut ids: Vec<u32> = m.objects.iter().map(|o| o.id).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("manifest lists an object id twice"));
    }
    Ok(m)
}

/// Loads a manifest and checks that every referenced file exists.
pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let m = parse_manifest(&read_text(path)?)?;
    let dir = path.parent().unwrap_or(Path::new(""));
    for rel in m.referenced() {
        let p = m.resolve(dir, rel);
        if !p.is_file() {
            return Err(Error::invalid(format!("manifest references missing file {}", p.display())));
        }
    }
    Ok(m)
}

pub fn save_manifest(m: &Manifest, path: &Path) -> Result<()> {
    write_bytes(path, (serde_json::to_string_pretty(m)? + "\n").as_bytes())
}
