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

//! Clustered scenes: pose propagation, grasp projection into the world
//! frame, scene-level collision filtering and synthetic scene generation.
//!
//! The world frame is the table frame: z up, table surface at z = 0.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::{object_cloud, AnnotationParams, GraspLabelSet, LabelFlag};
use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::geometry::{compose, invert, PointCloud, RigidTransform, RotationMatrix, SpatialGrid, Vec3};
use crate::gripper::{gripper_hull, local, GraspPose, GripperModel, BOUNDARY_EPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTag {
    Train,
    Seen,
    Similar,
    Novel,
}

impl std::str::FromStr for SplitTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(SplitTag::Train),
            "seen" => Ok(SplitTag::Seen),
            "similar" => Ok(SplitTag::Similar),
            "novel" => Ok(SplitTag::Novel),
            other => Err(Error::invalid(format!(
                "unknown split {other:?} (expected train, seen, similar or novel)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObjectInstance {
    pub object_id: u32,
    pub name: String,
    /// World-from-object pose.
    pub pose: RigidTransform,
}

/// Object id used for table points in a scene cloud.
pub const TABLE_ID: u32 = 0;

#[derive(Debug, Clone)]
pub struct Scene {
    pub instances: Vec<ObjectInstance>,
    /// World-from-camera poses, one per frame.
    pub camera_poses: Vec<RigidTransform>,
    /// Fused world-frame cloud with normals and per-point object ids.
    pub scene_cloud: PointCloud,
    pub split_tag: SplitTag,
    index: OnceLock<SpatialGrid>,
}

impl PartialEq for Scene {
    fn eq(&self, other: &Self) -> bool {
        self.instances == other.instances
            && self.camera_poses == other.camera_poses
            && self.scene_cloud == other.scene_cloud
            && self.split_tag == other.split_tag
    }
}

impl Scene {
    pub fn new(
        instances: Vec<ObjectInstance>,
        camera_poses: Vec<RigidTransform>,
        scene_cloud: PointCloud,
        split_tag: SplitTag,
    ) -> Result<Self> {
        scene_cloud.validate()?;
        if scene_cloud.normals.is_none() {
            return Err(Error::invalid("scene cloud needs normals"));
        }
        let ids = scene_cloud
            .object_ids
            .as_ref()
            .ok_or_else(|| Error::invalid("scene cloud needs per-point object ids"))?;
        let mut known: Vec<u32> = instances.iter().map(|i| i.object_id).collect();
        known.sort_unstable();
        if known.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("scene has duplicate object ids"));
        }
        if let Some(bad) = ids
            .iter()
            .find(|&&id| id != TABLE_ID && known.binary_search(&id).is_err())
        {
            return Err(Error::invalid(format!("scene cloud references unknown object {bad}")));
        }
        Ok(Scene {
            instances,
            camera_poses,
            scene_cloud,
            split_tag,
            index: OnceLock::new(),
        })
    }

    pub fn instance(&self, object_id: u32) -> Option<&ObjectInstance> {
        self.instances.iter().find(|i| i.object_id == object_id)
    }

    pub fn object_ids(&self) -> &[u32] {
        self.scene_cloud.object_ids.as_deref().unwrap_or(&[])
    }

    pub fn normals(&self) -> &[Vec3] {
        self.scene_cloud.normals.as_deref().unwrap_or(&[])
    }

    pub fn index(&self) -> &SpatialGrid {
        self.index
            .get_or_init(|| SpatialGrid::with_auto_cell(&self.scene_cloud.points))
    }

    /// Ascending indices of scene points that may touch the gripper (hull AABB).
    pub fn points_near(&self, g: &GraspPose, m: &GripperModel) -> Vec<usize> {
        let corners = gripper_hull(g, m).corners();
        let (mut lo, mut hi) = (corners[0], corners[0]);
        for c in &corners[1..] {
            lo = lo.inf(c);
            hi = hi.sup(c);
        }
        let pad = Vec3::repeat(1e-6);
        self.index().query_aabb(&(lo - pad), &(hi + pad))
    }

    /// Points of one object.
    pub fn object_points(&self, object_id: u32) -> PointCloud {
        let keep: Vec<usize> = self
            .object_ids()
            .iter()
            .enumerate()
            .filter(|(_, &id)| id == object_id)
            .map(|(i, _)| i)
            .collect();
        self.scene_cloud.select(&keep)
    }
}

/// Lowest z over the gripper's solid bodies. The hull's corners are all
/// corners of a finger or the back plate.
pub fn gripper_min_z(g: &GraspPose, m: &GripperModel) -> f64 {
    gripper_hull(g, m)
        .corners()
        .iter()
        .map(|c| c.z)
        .fold(f64::INFINITY, f64::min)
}

/// True iff a gripper body reaches below the table plane.
pub fn table_collision(g: &GraspPose, m: &GripperModel) -> bool {
    gripper_min_z(g, m) < -BOUNDARY_EPS
}

/// Object pose in camera frame `i` from its pose in frame 0:
/// `cam_i⁻¹ · cam_0 · P_0`.
pub fn propagate_pose(cam_i: &RigidTransform, cam_0: &RigidTransform, p0: &RigidTransform) -> RigidTransform {
    compose(&invert(cam_i), &compose(cam_0, p0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SceneGrasp {
    pub grasp: GraspPose,
    pub flag: LabelFlag,
}

/// World-frame grasps for a scene, each tagged with its source object.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SceneGraspSet {
    pub grasps: Vec<SceneGrasp>,
}

impl SceneGraspSet {
    pub fn len(&self) -> usize {
        self.grasps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grasps.is_empty()
    }

    pub fn validate(&self, scene: &Scene) -> Result<()> {
        for (i, g) in self.grasps.iter().enumerate() {
            match g.grasp.object_id {
                Some(id) if scene.instance(id).is_some() => {}
                other => {
                    return Err(Error::invalid(format!(
                        "grasp {i} references object {other:?} which is not in the scene"
                    )))
                }
            }
        }
        Ok(())
    }
}

/// Maps the label cells accepted by `keep` into the world frame.
pub fn project_labels(
    p_world: &RigidTransform,
    labels: &GraspLabelSet,
    keep: impl Fn(LabelFlag, f32) -> bool,
) -> Vec<SceneGrasp> {
    let rotations = labels.rotations();
    (0..labels.flags.len())
        .filter(|&i| keep(labels.flags[i], labels.scores[i]))
        .map(|i| SceneGrasp {
            grasp: labels.grasp_at(i, &rotations).transformed(p_world),
            flag: labels.flags[i],
        })
        .collect()
}

/// Positive grasps with `score ≥ min_score`, mapped into the world frame.
/// Rotation becomes `P.R · R`, center becomes `P(center)`; score and width are kept.
pub fn project_grasps(p_world: &RigidTransform, labels: &GraspLabelSet, min_score: f64) -> Vec<GraspPose> {
    project_labels(p_world, labels, |flag, score| {
        flag == LabelFlag::Positive && f64::from(score) >= min_score
    })
    .into_iter()
    .map(|g| g.grasp)
    .collect()
}

/// Whether a grasp survives in the scene: no gripper body touches another
/// object's point or the table, and no other object's point sits between
/// the fingers.
pub fn grasp_fits_scene(g: &GraspPose, scene: &Scene, m: &GripperModel) -> bool {
    if table_collision(g, m) {
        return false;
    }
    let own = g.object_id;
    let ids = scene.object_ids();
    scene.points_near(g, m).into_iter().all(|i| {
        if Some(ids[i]) == own {
            return true;
        }
        let l = g.to_local(&scene.scene_cloud.points[i]);
        !local::in_body(&l, g.width, g.depth, m) && !local::in_region(&l, g.width, g.depth, m)
    })
}

/// Drops grasps that collide with other objects or the table, or that would
/// squeeze a neighboring object. Order is preserved.
pub fn scene_collision_filter(grasps: &SceneGraspSet, scene: &Scene, m: &GripperModel) -> SceneGraspSet {
    let keep: Vec<bool> = grasps
        .grasps
        .par_iter()
        .map(|g| grasp_fits_scene(&g.grasp, scene, m))
        .collect();
    SceneGraspSet {
        grasps: grasps
            .grasps
            .iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(g, _)| *g)
            .collect(),
    }
}

/// Projects every instance's labels and filters them against the scene.
/// Only positive cells with `score ≥ min_score` are kept unless
/// `include_negatives` is set, in which case negative cells are kept too.
pub fn annotate_scene(
    scene: &Scene,
    labels: &HashMap<u32, GraspLabelSet>,
    m: &GripperModel,
    min_score: f64,
    include_negatives: bool,
) -> Result<SceneGraspSet> {
    let mut all = Vec::new();
    for inst in &scene.instances {
        let l = labels
            .get(&inst.object_id)
            .ok_or_else(|| Error::invalid(format!("no labels for object {}", inst.object_id)))?;
        if l.header.object_id != inst.object_id {
            return Err(Error::invalid(format!(
                "label file for object {} is tagged with object {}",
                inst.object_id, l.header.object_id
            )));
        }
        all.extend(project_labels(&inst.pose, l, |flag, score| match flag {
            LabelFlag::Positive => f64::from(score) >= min_score,
            LabelFlag::Negative => include_negatives,
            _ => false,
        }));
    }
    Ok(scene_collision_filter(&SceneGraspSet { grasps: all }, scene, m))
}

/// Camera positions on a quarter sphere (90° of azimuth, elevation between
/// 15° and 75°) around the table center, each looking at the center.
///
/// Camera frame: +z forward (toward the center), +x right, +y down.
pub fn camera_trajectory(n: usize, radius: f64) -> Vec<RigidTransform> {
    let (lo, hi) = (15f64.to_radians().sin(), 75f64.to_radians().sin());
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let sin_el = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
            let cos_el = (1.0 - sin_el * sin_el).sqrt();
            let az = (golden * i as f64).rem_euclid(FRAC_PI_2);
            let position = Vec3::new(cos_el * az.cos(), cos_el * az.sin(), sin_el) * radius;
            look_at(&position, &Vec3::zeros())
        })
        .collect()
}

/// World-from-camera pose at `position` looking at `target`, world z up.
pub fn look_at(position: &Vec3, target: &Vec3) -> RigidTransform {
    let forward = (target - position).normalize();
    let right = forward.cross(&Vec3::z()).normalize();
    let down = forward.cross(&right);
    RigidTransform::new(
        RotationMatrix::from_matrix_unchecked(nalgebra::Matrix3::from_columns(&[right, down, forward])),
        *position,
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneParams {
    /// Half side of the square table region objects must stay inside (m).
    pub region_half: f64,
    /// Minimum gap between different objects' surface points (m).
    pub clearance: f64,
    pub max_attempts: usize,
    pub cameras: usize,
    pub camera_radius: f64,
    pub split_tag: SplitTag,
    /// Cloud sampling; must match the annotation parameters for exact re-scoring.
    pub cloud: AnnotationParams,
}

impl Default for SceneParams {
    fn default() -> Self {
        SceneParams {
            region_half: 0.25,
            clearance: 0.003,
            max_attempts: 1000,
            cameras: 256,
            camera_radius: 0.6,
            split_tag: SplitTag::Train,
            cloud: AnnotationParams::default(),
        }
    }
}

/// Places catalog objects on the table at random yaw, resting on their
/// lowest vertex, without overlap. Deterministic for a fixed seed.
pub fn synthesize_scene(object_ids: &[u32], seed: u64, catalog: &Catalog, params: &SceneParams) -> Result<Scene> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::new();
    let mut fused = PointCloud {
        points: Vec::new(),
        normals: Some(Vec::new()),
        object_ids: Some(Vec::new()),
    };
    let mut placed_bounds: Vec<(Vec3, Vec3)> = Vec::new();
    let mut seen = Vec::new();
    for &id in object_ids {
        if seen.contains(&id) {
            return Err(Error::invalid(format!("object {id} listed twice")));
        }
        seen.push(id);
        let entry = catalog
            .get(id)
            .ok_or_else(|| Error::invalid(format!("object {id} is not in the catalog")))?;
        let cloud = object_cloud(&entry.mesh, &params.cloud)?;
        let grid = SpatialGrid::with_auto_cell(&fused.points);
        let mut placed = None;
        for _ in 0..params.max_attempts {
            let yaw = rng.gen_range(0.0..TAU);
            let rot = RotationMatrix::rot_z(yaw);
            let rotated: Vec<Vec3> = entry.mesh.vertices().iter().map(|v| rot.rotate(v)).collect();
            let (lo, hi) = bounds(&rotated);
            let (x0, x1) = (-params.region_half - lo.x, params.region_half - hi.x);
            let (y0, y1) = (-params.region_half - lo.y, params.region_half - hi.y);
            if x0 > x1 || y0 > y1 {
                continue;
            }
            let t = Vec3::new(rng.gen_range(x0..=x1), rng.gen_range(y0..=y1), -lo.z);
            let pose = RigidTransform::new(rot, t);
            let world = cloud.transformed(&pose);
            let (wlo, whi) = bounds(&world.points);
            let pad = Vec3::repeat(params.clearance);
            let overlaps = placed_bounds.iter().any(|(plo, phi)| {
                (wlo - pad).x <= phi.x
                    && (whi + pad).x >= plo.x
                    && (wlo - pad).y <= phi.y
                    && (whi + pad).y >= plo.y
                    && (wlo - pad).z <= phi.z
                    && (whi + pad).z >= plo.z
            });
            if overlaps
                && world
                    .points
                    .iter()
                    .any(|p| !grid.query_radius(p, params.clearance).is_empty())
            {
                continue;
            }
            placed = Some((pose, world, (wlo, whi)));
            break;
        }
        let (pose, world, b) = placed.ok_or(Error::SceneTooCrowded {
            object_id: id,
            attempts: params.max_attempts,
        })?;
        placed_bounds.push(b);
        let n = world.len();
        fused.points.extend(world.points);
        if let (Some(dst), Some(src)) = (fused.normals.as_mut(), world.normals) {
            dst.extend(src);
        }
        if let Some(ids) = fused.object_ids.as_mut() {
            ids.extend(std::iter::repeat(id).take(n));
        }
        instances.push(ObjectInstance {
            object_id: id,
            name: entry.name.clone(),
            pose,
        });
    }
    let cameras = camera_trajectory(params.cameras, params.camera_radius);
    Scene::new(instances, cameras, fused, params.split_tag)
}

fn bounds(points: &[Vec3]) -> (Vec3, Vec3) {
    points
        .iter()
        .fold((Vec3::repeat(f64::INFINITY), Vec3::repeat(f64::NEG_INFINITY)), |(lo, hi), p| {
            (lo.inf(p), hi.sup(p))
        })
}
