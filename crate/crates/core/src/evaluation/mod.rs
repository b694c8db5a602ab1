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

//! Scoring predicted grasps against a scene: association, force-closure
//! classification, pose-NMS, Precision@k and AP.

mod nms;
mod rectangle;

pub use nms::{pose_nms, pose_nms_indices, NmsParams};
pub use rectangle::{rectangle_iou, rectangle_metric, RectangleGrasp};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::forceclosure::{contacts_local, cone_angles, local_contacts, passes, FrictionGrid};
use crate::geometry::Vec3;
use crate::gripper::{local, GraspPose, GripperModel};
use crate::scene::{table_collision, Scene, SceneGrasp, SceneGraspSet, TABLE_ID};

/// Friction coefficients the benchmark reports.
pub const EVAL_MUS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];

/// Precision@k is reported for k = 1..=TOP_K.
pub const TOP_K: usize = 50;

/// Object the grasp is holding: the plurality owner of the scene points in
/// its closing region, table points excluded.
///
/// Ties go to the object whose in-region centroid is nearest the region
/// center, then to the smaller id.
pub fn associate(g: &GraspPose, scene: &Scene, m: &GripperModel) -> Option<u32> {
    let ids = scene.object_ids();
    let points = &scene.scene_cloud.points;
    // (id, count, sum of points)
    let mut tally: Vec<(u32, usize, Vec3)> = Vec::new();
    for i in scene.points_near(g, m) {
        let id = ids[i];
        if id == TABLE_ID || !local::in_region(&g.to_local(&points[i]), g.width, g.depth, m) {
            continue;
        }
        match tally.iter_mut().find(|t| t.0 == id) {
            Some(t) => {
                t.1 += 1;
                t.2 += points[i];
            }
            None => tally.push((id, 1, points[i])),
        }
    }
    let center = g.region_center(m);
    let dist = |t: &(u32, usize, Vec3)| (t.2 / t.1 as f64 - center).norm();
    tally
        .iter()
        .max_by(|a, b| {
            a.1.cmp(&b.1)
                .then_with(|| dist(b).total_cmp(&dist(a)))
                .then_with(|| b.0.cmp(&a.0))
        })
        .map(|t| t.0)
}

/// True iff a gripper body touches any scene point or the table.
pub fn scene_collision(g: &GraspPose, scene: &Scene, m: &GripperModel) -> bool {
    if table_collision(g, m) {
        return true;
    }
    let points = &scene.scene_cloud.points;
    scene
        .points_near(g, m)
        .into_iter()
        .any(|i| local::in_body(&g.to_local(&points[i]), g.width, g.depth, m))
}

/// Per-grasp evaluation record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraspAudit {
    /// Position after NMS and sorting by confidence.
    pub rank: usize,
    /// Position in the submitted prediction list.
    pub input_index: usize,
    pub confidence: f64,
    pub object_id: Option<u32>,
    pub collision: bool,
    /// Smallest coefficient on the 0.1..1.0 grid at which the contacts are antipodal.
    pub mu_star: Option<f64>,
    /// Verdict at each reported coefficient.
    pub verdicts: Vec<bool>,
}

/// Associates, collision-checks and sweeps the friction coefficients in `mus`.
pub fn audit_grasp(g: &GraspPose, scene: &Scene, m: &GripperModel, mus: &[f64]) -> GraspAudit {
    let object_id = associate(g, scene, m);
    let collision = object_id.is_some() && scene_collision(g, scene, m);
    let worst = match object_id {
        Some(id) if !collision => worst_cone_angle(g, scene, m, id),
        _ => None,
    };
    let grid = FrictionGrid::default();
    GraspAudit {
        rank: 0,
        input_index: 0,
        confidence: g.confidence,
        object_id,
        collision,
        mu_star: worst.and_then(|w| grid.values().iter().copied().find(|&mu| passes(w, mu))),
        verdicts: mus.iter().map(|&mu| worst.is_some_and(|w| passes(w, mu))).collect(),
    }
}

/// Larger of the two cone angles for the contacts on one object's points.
fn worst_cone_angle(g: &GraspPose, scene: &Scene, m: &GripperModel, object_id: u32) -> Option<f64> {
    let ids = scene.object_ids();
    let idx: Vec<usize> = scene
        .points_near(g, m)
        .into_iter()
        .filter(|&i| ids[i] == object_id)
        .collect();
    let local: Vec<Vec3> = idx.iter().map(|&i| g.to_local(&scene.scene_cloud.points[i])).collect();
    let pair = contacts_local(&local, g.width, g.depth, m)?;
    let (c1, c2) = local_contacts(g, &local, scene.normals(), &idx, pair);
    let (a1, a2) = cone_angles(&c1, &c2).ok()?;
    Some(a1.max(a2))
}

/// Whether the grasp is a true positive at friction `mu`: it holds some
/// object, no gripper body collides, and its contacts on that object are
/// antipodal at `mu`.
pub fn classify_grasp(g: &GraspPose, scene: &Scene, m: &GripperModel, mu: f64) -> bool {
    audit_grasp(g, scene, m, &[mu]).verdicts[0]
}

/// True verdicts among the first `k` divided by `k`; missing ranks count as false.
pub fn precision_at_k(verdicts: &[bool], k: usize) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    verdicts.iter().take(k).filter(|&&v| v).count() as f64 / k as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuReport {
    pub mu: f64,
    /// Entry `k - 1` holds Precision@k.
    pub precision_at_k: Vec<f64>,
    pub ap: f64,
}

impl MuReport {
    /// Precision@1..=TOP_K and their mean for confidence-ordered verdicts.
    pub fn from_verdicts(mu: f64, verdicts: &[bool]) -> Self {
        let precision_at_k: Vec<f64> = (1..=TOP_K).map(|k| precision_at_k(verdicts, k)).collect();
        let ap = precision_at_k.iter().sum::<f64>() / TOP_K as f64;
        MuReport { mu, precision_at_k, ap }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub num_predictions: usize,
    pub num_after_nms: usize,
    pub per_mu: Vec<MuReport>,
    /// Mean of the per-μ AP values.
    pub ap: f64,
    pub audit: Vec<GraspAudit>,
}

impl EvalReport {
    pub fn ap_at(&self, mu: f64) -> Option<f64> {
        self.per_mu.iter().find(|r| r.mu == mu).map(|r| r.ap)
    }

    /// Plain-text table of AP per friction coefficient.
    pub fn summary(&self) -> String {
        let mut out = String::from("mu    AP\n");
        for r in &self.per_mu {
            out.push_str(&format!("{:.1}   {:.4}\n", r.mu, r.ap));
        }
        out.push_str(&format!("mean  {:.4}\n", self.ap));
        out
    }
}

/// Mean AP over several scenes; 0 for none.
pub fn mean_ap(reports: &[EvalReport]) -> f64 {
    if reports.is_empty() {
        return 0.0;
    }
    reports.iter().map(|r| r.ap).sum::<f64>() / reports.len() as f64
}

/// Builds a report from audits already in rank order.
pub fn report_from_audits(num_predictions: usize, audit: Vec<GraspAudit>, mus: &[f64]) -> EvalReport {
    let per_mu: Vec<MuReport> = mus
        .iter()
        .enumerate()
        .map(|(j, &mu)| {
            let verdicts: Vec<bool> = audit.iter().map(|a| a.verdicts[j]).collect();
            MuReport::from_verdicts(mu, &verdicts)
        })
        .collect();
    let ap = if per_mu.is_empty() {
        0.0
    } else {
        per_mu.iter().map(|r| r.ap).sum::<f64>() / per_mu.len() as f64
    };
    EvalReport {
        num_predictions,
        num_after_nms: audit.len(),
        per_mu,
        ap,
        audit,
    }
}

/// Pose-NMS, then ranks the survivors by confidence (stable) and classifies
/// each at μ = 0.1..0.5.
pub fn evaluate_scene(preds: &[GraspPose], scene: &Scene, m: &GripperModel, params: &NmsParams) -> EvalReport {
    let mut kept = pose_nms_indices(preds, scene, params, m);
    kept.sort_by(|&a, &b| preds[b].confidence.total_cmp(&preds[a].confidence).then(a.cmp(&b)));
    let audit: Vec<GraspAudit> = kept
        .par_iter()
        .enumerate()
        .map(|(rank, &i)| GraspAudit {
            rank,
            input_index: i,
            ..audit_grasp(&preds[i], scene, m, &EVAL_MUS)
        })
        .collect();
    report_from_audits(preds.len(), audit, &EVAL_MUS)
}

/// Up to `n` grasps from a scene grasp set, ranked by score and thinned
/// with pose-NMS. Confidence is set to the score.
pub fn top_grasps(
    set: &SceneGraspSet,
    scene: &Scene,
    m: &GripperModel,
    params: &NmsParams,
    n: usize,
    keep: impl Fn(&SceneGrasp) -> bool,
) -> Vec<GraspPose> {
    let mut pool: Vec<GraspPose> = set
        .grasps
        .iter()
        .filter(|g| keep(g))
        .map(|g| GraspPose {
            confidence: g.grasp.score,
            ..g.grasp
        })
        .collect();
    pool.sort_by(|a, b| b.score.total_cmp(&a.score));
    let mut kept = pose_nms(&pool, scene, params, m);
    kept.truncate(n);
    kept
}
