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

//! Dense per-object grasp labels over grasp point × view × angle × depth.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forceclosure::{score_local, FrictionGrid};
use crate::geometry::{
    sample_sphere_directions, view_to_rotation, voxel_downsample, PointCloud, RotationMatrix, SpatialGrid,
    TriangleMesh, Vec3,
};
use crate::gripper::{width_search_local, GraspPose, GripperModel, WidthOutcome};

/// Surface samples per square meter for an object's contact/collision cloud (100 per cm²).
pub const DEFAULT_CLOUD_DENSITY: f64 = 1e6;

const CULL_SLACK: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationParams {
    /// Grasp-point spacing (m).
    pub voxel: f64,
    pub views: usize,
    /// In-plane angles (rad), each in `[0, π)`.
    pub angles: Vec<f64>,
    /// Gripper depths (m).
    pub depths: Vec<f64>,
    pub friction: FrictionGrid,
    /// Object cloud density (points / m²).
    pub cloud_density: f64,
    pub cloud_seed: u64,
}

impl Default for AnnotationParams {
    fn default() -> Self {
        AnnotationParams {
            voxel: 0.005,
            views: 300,
            angles: uniform_angles(12),
            depths: vec![0.01, 0.02, 0.03, 0.04],
            friction: FrictionGrid::default(),
            cloud_density: DEFAULT_CLOUD_DENSITY,
            cloud_seed: 0,
        }
    }
}

/// `n` angles evenly spaced over `[0, π)`.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 * PI / n as f64).collect()
}

impl AnnotationParams {
    pub fn validate(&self, m: &GripperModel) -> Result<()> {
        if !(self.voxel > 0.0) {
            return Err(Error::invalid("voxel must be positive"));
        }
        if self.views == 0 {
            return Err(Error::invalid("at least one view is required"));
        }
        if self.angles.is_empty() || self.angles.iter().any(|&a| !(0.0..PI).contains(&a)) {
            return Err(Error::invalid("angles must be non-empty and lie in [0, π)"));
        }
        if self.depths.is_empty() || self.depths.iter().any(|&d| !(d > 0.0 && d <= m.finger_length)) {
            return Err(Error::invalid("depths must be non-empty, positive and at most the finger length"));
        }
        if !(self.cloud_density > 0.0) {
            return Err(Error::invalid("cloud density must be positive"));
        }
        Ok(())
    }

    pub fn candidates_per_point(&self) -> usize {
        self.views * self.angles.len() * self.depths.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum LabelFlag {
    Negative = 0,
    Positive = 1,
    Collision = 2,
    Empty = 3,
}

impl LabelFlag {
    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(LabelFlag::Negative),
            1 => Some(LabelFlag::Positive),
            2 => Some(LabelFlag::Collision),
            3 => Some(LabelFlag::Empty),
            _ => None,
        }
    }
}

/// Identifies what a label tensor was computed from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelHeader {
    pub object_id: u32,
    pub views: usize,
    pub angles: Vec<f64>,
    pub depths: Vec<f64>,
    pub friction: Vec<f64>,
    pub gripper_hash: String,
    pub cloud_density: f64,
    pub cloud_seed: u64,
}

/// Object-frame labels. Cell `(n, v, a, d)` lives at
/// `((n * V + v) * A + a) * D + d`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraspLabelSet {
    pub header: LabelHeader,
    pub grasp_points: Vec<Vec3>,
    pub grasp_normals: Vec<Vec3>,
    pub scores: Vec<f32>,
    pub widths: Vec<f32>,
    pub flags: Vec<LabelFlag>,
}

impl GraspLabelSet {
    pub fn num_points(&self) -> usize {
        self.grasp_points.len()
    }

    pub fn shape(&self) -> [usize; 4] {
        [
            self.grasp_points.len(),
            self.header.views,
            self.header.angles.len(),
            self.header.depths.len(),
        ]
    }

    pub fn index(&self, n: usize, v: usize, a: usize, d: usize) -> usize {
        let [_, nv, na, nd] = self.shape();
        ((n * nv + v) * na + a) * nd + d
    }

    /// Splits a flat index back into `(n, v, a, d)`.
    pub fn unravel(&self, i: usize) -> (usize, usize, usize, usize) {
        let [_, nv, na, nd] = self.shape();
        (i / (nv * na * nd), (i / (na * nd)) % nv, (i / nd) % na, i % nd)
    }

    /// Checks tensor lengths and the score/flag/width invariants.
    pub fn validate(&self, max_width: Option<f64>) -> Result<()> {
        let cells: usize = self.shape().iter().product();
        if self.grasp_normals.len() != self.grasp_points.len() {
            return Err(Error::format("grasp normal count does not match grasp point count"));
        }
        if self.scores.len() != cells || self.widths.len() != cells || self.flags.len() != cells {
            return Err(Error::format(format!(
                "tensor length mismatch: expected {cells} cells, got scores {}, widths {}, flags {}",
                self.scores.len(),
                self.widths.len(),
                self.flags.len()
            )));
        }
        for i in 0..cells {
            let positive = self.flags[i] == LabelFlag::Positive;
            if positive != (self.scores[i] > 0.0) {
                return Err(Error::format(format!("cell {i}: score/flag disagree")));
            }
            if let (true, Some(mw)) = (positive, max_width) {
                if f64::from(self.widths[i]) > mw {
                    return Err(Error::format(format!("cell {i}: width exceeds gripper opening")));
                }
            }
        }
        Ok(())
    }

    /// Rotations indexed by `[v * A + a]`.
    pub fn rotations(&self) -> Vec<RotationMatrix> {
        candidate_rotations(self.header.views, &self.header.angles)
    }

    /// The object-frame grasp stored in cell `i`.
    pub fn grasp_at(&self, i: usize, rotations: &[RotationMatrix]) -> GraspPose {
        let (n, v, a, d) = self.unravel(i);
        let na = self.header.angles.len();
        GraspPose {
            rotation: rotations[v * na + a],
            center: self.grasp_points[n],
            width: f64::from(self.widths[i]),
            depth: self.header.depths[d],
            score: f64::from(self.scores[i]),
            confidence: f64::from(self.scores[i]),
            object_id: Some(self.header.object_id),
        }
    }
}

pub(crate) fn candidate_rotations(views: usize, angles: &[f64]) -> Vec<RotationMatrix> {
    let dirs = sample_sphere_directions(views);
    dirs.iter()
        .flat_map(|v| angles.iter().map(move |&a| view_to_rotation(v, a)))
        .collect()
}

/// Dense contact/collision cloud of an object (area-weighted, seeded).
pub fn object_cloud(mesh: &TriangleMesh, params: &AnnotationParams) -> Result<PointCloud> {
    mesh.sample_surface(params.cloud_density, params.cloud_seed)
}

/// Voxel-uniform grasp points with their source triangle normals.
pub fn sample_grasp_points(mesh: &TriangleMesh, voxel: f64) -> Result<PointCloud> {
    let params = AnnotationParams::default();
    let dense = object_cloud(mesh, &params)?;
    voxel_downsample(&dense, voxel)
}

/// All candidates anchored at a grasp point, ordered view-major, then angle,
/// then depth. Each candidate's center is the grasp point itself; depth sets
/// how far the fingertips reach past it. Widths are left at zero.
pub fn generate_candidates(point: &Vec3, params: &AnnotationParams) -> Vec<GraspPose> {
    let rotations = candidate_rotations(params.views, &params.angles);
    rotations
        .iter()
        .flat_map(|r| {
            params
                .depths
                .iter()
                .map(move |&d| GraspPose::new(*r, *point, 0.0, d))
        })
        .collect()
}

struct Block {
    scores: Vec<f32>,
    widths: Vec<f32>,
    flags: Vec<LabelFlag>,
}

/// Labels every candidate of every grasp point of `mesh`.
pub fn annotate_object(
    mesh: &TriangleMesh,
    object_id: u32,
    m: &GripperModel,
    params: &AnnotationParams,
) -> Result<GraspLabelSet> {
    m.validate()?;
    params.validate(m)?;
    let cloud = object_cloud(mesh, params)?;
    let grasp_points = voxel_downsample(&cloud, params.voxel)?;
    annotate_cloud(&cloud, &grasp_points, object_id, m, params)
}

/// [`annotate_object`] on an already sampled object cloud and grasp points.
pub fn annotate_cloud(
    cloud: &PointCloud,
    grasp_points: &PointCloud,
    object_id: u32,
    m: &GripperModel,
    params: &AnnotationParams,
) -> Result<GraspLabelSet> {
    let normals = cloud
        .normals
        .as_ref()
        .ok_or_else(|| Error::invalid("object cloud has no normals"))?;
    let gp_normals = grasp_points
        .normals
        .clone()
        .ok_or_else(|| Error::invalid("grasp points have no normals"))?;
    let grid = SpatialGrid::with_auto_cell(&cloud.points);
    let rotations = candidate_rotations(params.views, &params.angles);
    let d_max = params.depths.iter().cloned().fold(f64::MIN, f64::max);
    let d_min = params.depths.iter().cloned().fold(f64::MAX, f64::min);
    let reach = m.reach(d_max, d_min);
    // Points outside the gripper hull for every depth never affect a label.
    let z_cut = 0.5 * m.finger_height + CULL_SLACK;
    let x_lo = d_min - m.finger_length - m.base_depth - CULL_SLACK;
    let x_hi = d_max + CULL_SLACK;

    let blocks: Vec<Block> = grasp_points
        .points
        .par_iter()
        .map(|p| {
            let nbr = grid.query_radius(p, reach);
            let pts: Vec<Vec3> = nbr.iter().map(|&i| cloud.points[i] - p).collect();
            let cells = rotations.len() * params.depths.len();
            let mut block = Block {
                scores: Vec::with_capacity(cells),
                widths: Vec::with_capacity(cells),
                flags: Vec::with_capacity(cells),
            };
            let mut local = Vec::with_capacity(pts.len());
            let mut idx = Vec::with_capacity(pts.len());
            for r in &rotations {
                let axes = r.matrix();
                let (ax, az) = (axes.column(0).into_owned(), axes.column(2).into_owned());
                local.clear();
                idx.clear();
                for (d, &i) in pts.iter().zip(&nbr) {
                    if d.dot(&az).abs() > z_cut {
                        continue;
                    }
                    let x = d.dot(&ax);
                    if x < x_lo || x > x_hi {
                        continue;
                    }
                    local.push(r.inverse_rotate(d));
                    idx.push(i);
                }
                for &depth in &params.depths {
                    let (flag, width, score) = match width_search_local(&local, depth, m) {
                        WidthOutcome::Empty => (LabelFlag::Empty, 0.0, 0.0),
                        WidthOutcome::Collision => (LabelFlag::Collision, 0.0, 0.0),
                        WidthOutcome::Width(w) => {
                            let g = GraspPose::new(*r, *p, w, depth);
                            let s = score_local(&g, &local, normals, &idx, m, &params.friction);
                            let flag = if s > 0.0 { LabelFlag::Positive } else { LabelFlag::Negative };
                            (flag, w as f32, s as f32)
                        }
                    };
                    block.flags.push(flag);
                    block.widths.push(width);
                    block.scores.push(score);
                }
            }
            block
        })
        .collect();

    let mut labels = GraspLabelSet {
        header: LabelHeader {
            object_id,
            views: params.views,
            angles: params.angles.clone(),
            depths: params.depths.clone(),
            friction: params.friction.values().to_vec(),
            gripper_hash: crate::io::gripper_profile_hash(m),
            cloud_density: params.cloud_density,
            cloud_seed: params.cloud_seed,
        },
        grasp_points: grasp_points.points.clone(),
        grasp_normals: gp_normals,
        scores: Vec::new(),
        widths: Vec::new(),
        flags: Vec::new(),
    };
    for b in blocks {
        labels.scores.extend(b.scores);
        labels.widths.extend(b.widths);
        labels.flags.extend(b.flags);
    }
    Ok(labels)
}

/// Ratio of positive to negative labels; infinite when there are no negatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LabelRatio {
    Finite(f64),
    Infinite,
}

impl std::fmt::Display for LabelRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelRatio::Finite(r) => write!(f, "{r:.4}"),
            LabelRatio::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabelStats {
    pub positive: usize,
    pub negative: usize,
    pub collision: usize,
    pub empty: usize,
    pub ratio: LabelRatio,
}

impl LabelStats {
    pub fn total(&self) -> usize {
        self.positive + self.negative + self.collision + self.empty
    }

    /// Accumulates counts from several label sets.
    pub fn combine(stats: &[LabelStats]) -> LabelStats {
        let mut out = LabelStats::from_counts(0, 0, 0, 0);
        for s in stats {
            out = LabelStats::from_counts(
                out.positive + s.positive,
                out.negative + s.negative,
                out.collision + s.collision,
                out.empty + s.empty,
            );
        }
        out
    }

    fn from_counts(positive: usize, negative: usize, collision: usize, empty: usize) -> LabelStats {
        let ratio = if negative == 0 {
            LabelRatio::Infinite
        } else {
            LabelRatio::Finite(positive as f64 / negative as f64)
        };
        LabelStats {
            positive,
            negative,
            collision,
            empty,
            ratio,
        }
    }
}

pub fn label_stats(labels: &GraspLabelSet) -> LabelStats {
    let mut counts = [0usize; 4];
    for f in &labels.flags {
        counts[*f as usize] += 1;
    }
    LabelStats::from_counts(
        counts[LabelFlag::Positive as usize],
        counts[LabelFlag::Negative as usize],
        counts[LabelFlag::Collision as usize],
        counts[LabelFlag::Empty as usize],
    )
}
