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

//! Scene and scene-grasp files.
//!
//! A scene is a JSON document plus a point cloud text file (7 columns:
//! point, normal, object id) referenced by a path relative to the JSON file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annotation::LabelFlag;
use crate::error::{Error, Result};
use crate::geometry::{PointCloud, RigidTransform, RotationMatrix, Vec3};
use crate::gripper::GraspPose;
use crate::scene::{ObjectInstance, Scene, SceneGrasp, SceneGraspSet, SplitTag};

use super::cloud::{load_cloud, save_cloud};
use super::{check_format, check_version, read_text, write_bytes, FORMAT_VERSION};

const SCENE_FORMAT: &str = "graspbench-scene";
const GRASPS_FORMAT: &str = "graspbench-scene-grasps";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    object_id: u32,
    name: String,
    /// Row-major world-from-object rotation.
    rotation: RotationMatrix,
    translation: Vec3,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    format: String,
    version: String,
    split_tag: SplitTag,
    /// Cloud file, relative to the scene file.
    cloud: String,
    instances: Vec<InstanceDoc>,
    /// World-from-camera poses.
    camera_poses: Vec<RigidTransform>,
}

/// JSON for `scene`, pointing at `cloud_file` for the fused cloud.
pub fn encode_scene(scene: &Scene, cloud_file: &str) -> String {
    let doc = SceneDoc {
        format: SCENE_FORMAT.into(),
        version: FORMAT_VERSION.into(),
        split_tag: scene.split_tag,
        cloud: cloud_file.into(),
        instances: scene
            .instances
            .iter()
            .map(|i| InstanceDoc {
                object_id: i.object_id,
                name: i.name.clone(),
                rotation: i.pose.rotation,
                translation: i.pose.translation,
            })
            .collect(),
        camera_poses: scene.camera_poses.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("scene serializes") + "\n"
}

/// Parses scene JSON; `load_cloud` receives the referenced cloud path.
pub fn decode_scene(text: &str, load_cloud: impl FnOnce(&str) -> Result<PointCloud>) -> Result<Scene> {
    let doc: SceneDoc = serde_json::from_str(text)?;
    check_format(&doc.format, SCENE_FORMAT)?;
    check_version(&doc.version)?;
    let cloud = load_cloud(&doc.cloud)?;
    let instances = doc
        .instances
        .into_iter()
        .map(|i| ObjectInstance {
            object_id: i.object_id,
            name: i.name,
            pose: RigidTransform::new(i.rotation, i.translation),
        })
        .collect();
    Scene::new(instances, doc.camera_poses, cloud, doc.split_tag)
}

fn cloud_file_name(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scene");
    format!("{stem}.cloud.txt")
}

/// Writes `path` and the cloud file `<stem>.cloud.txt` next to it.
pub fn save_scene(scene: &Scene, path: &Path) -> Result<()> {
    let cloud_name = cloud_file_name(path);
    let dir = path.parent().unwrap_or(Path::new(""));
    save_cloud(&scene.scene_cloud, &dir.join(&cloud_name))?;
    write_bytes(path, encode_scene(scene, &cloud_name).as_bytes())
}

pub fn load_scene(path: &Path) -> Result<Scene> {
    let text = read_text(path)?;
    let dir = path.parent().unwrap_or(Path::new(""));
    decode_scene(&text, |cloud| load_cloud(&dir.join(cloud)))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraspDoc {
    object_id: u32,
    rotation: RotationMatrix,
    center: Vec3,
    width: f64,
    depth: f64,
    score: f64,
    flag: LabelFlag,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraspsDoc {
    format: String,
    version: String,
    grasps: Vec<GraspDoc>,
}

pub fn encode_scene_grasps(set: &SceneGraspSet) -> Result<String> {
    let grasps = set
        .grasps
        .iter()
        .enumerate()
        .map(|(i, g)| {
            Ok(GraspDoc {
                object_id: g
                    .grasp
                    .object_id
                    .ok_or_else(|| Error::invalid(format!("scene grasp {i} has no object id")))?,
                rotation: g.grasp.rotation,
                center: g.grasp.center,
                width: g.grasp.width,
                depth: g.grasp.depth,
                score: g.grasp.score,
                flag: g.flag,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let doc = GraspsDoc {
        format: GRASPS_FORMAT.into(),
        version: FORMAT_VERSION.into(),
        grasps,
    };
    Ok(serde_json::to_string(&doc).expect("grasps serialize") + "\n")
}

/// Confidence of a decoded grasp is its score.
pub fn decode_scene_grasps(text: &str) -> Result<SceneGraspSet> {
    let doc: GraspsDoc = serde_json::from_str(text)?;
    check_format(&doc.format, GRASPS_FORMAT)?;
    check_version(&doc.version)?;
    Ok(SceneGraspSet {
        grasps: doc
            .grasps
            .into_iter()
            .map(|d| SceneGrasp {
                grasp: GraspPose {
                    rotation: d.rotation,
                    center: d.center,
                    width: d.width,
                    depth: d.depth,
                    score: d.score,
                    confidence: d.score,
                    object_id: Some(d.object_id),
                },
                flag: d.flag,
            })
            .collect(),
    })
}

pub fn save_scene_grasps(set: &SceneGraspSet, path: &Path) -> Result<()> {
    write_bytes(path, encode_scene_grasps(set)?.as_bytes())
}

pub fn load_scene_grasps(path: &Path) -> Result<SceneGraspSet> {
    decode_scene_grasps(&read_text(path)?)
}
