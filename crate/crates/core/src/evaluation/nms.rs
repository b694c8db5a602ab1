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

//! Greedy pose non-maximum suppression.

use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::associate;
use crate::error::{Error, Result};
use crate::geometry::{rotation_distance, translation_distance, Vec3};
use crate::gripper::{GraspPose, GripperModel};
use crate::scene::Scene;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NmsParams {
    /// Translation threshold (m).
    pub th_d: f64,
    /// Rotation threshold (rad).
    pub th_alpha: f64,
    /// Grasps kept per object.
    pub k: usize,
}

impl Default for NmsParams {
    fn default() -> Self {
        NmsParams {
            th_d: 0.01,
            th_alpha: 5f64.to_radians(),
            k: 10,
        }
    }
}

impl NmsParams {
    pub fn new(th_d: f64, th_alpha: f64, k: usize) -> Result<Self> {
        if !(th_d > 0.0 && th_d.is_finite()) || !(th_alpha > 0.0 && th_alpha.is_finite()) || k == 0 {
            return Err(Error::invalid(format!(
                "NMS thresholds must be positive (got {th_d}, {th_alpha}, {k})"
            )));
        }
        Ok(NmsParams { th_d, th_alpha, k })
    }
}

/// Parses `th_d,th_alpha,K`; the angle is radians unless suffixed with `deg`.
impl FromStr for NmsParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [d, a, k] = parts[..] else {
            return Err(Error::invalid(format!("expected th_d,th_alpha,K but got {s:?}")));
        };
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad number {t:?} in NMS parameters")))
        };
        let th_alpha = match a.strip_suffix("deg") {
            Some(deg) => num(deg.trim())?.to_radians(),
            None => num(a)?,
        };
        let k = k
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("bad K {k:?} in NMS parameters")))?;
        NmsParams::new(num(d)?, th_alpha, k)
    }
}

fn cell_of(p: &Vec3, size: f64) -> (i64, i64, i64) {
    let c = p / size;
    (c.x.floor() as i64, c.y.floor() as i64, c.z.floor() as i64)
}

/// Indices of the grasps that survive NMS, in descending confidence
/// (equal confidences keep input order).
///
/// A grasp is suppressed when a kept grasp is closer than `th_d` between
/// closing-region centers and closer than `th_alpha` in rotation. Afterwards
/// each object keeps only its `k` most confident grasps; grasps that hold no
/// object are not capped.
pub fn pose_nms_indices(preds: &[GraspPose], scene: &Scene, params: &NmsParams, m: &GripperModel) -> Vec<usize> {
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| preds[b].confidence.total_cmp(&preds[a].confidence).then(a.cmp(&b)));
    let centers: Vec<Vec3> = preds.iter().map(|g| g.region_center(m)).collect();

    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let mut survivors = Vec::new();
    for i in order {
        let (cx, cy, cz) = cell_of(&centers[i], params.th_d);
        let suppressed = (-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                (-1..=1).any(|dz| {
                    grid.get(&(cx + dx, cy + dy, cz + dz)).is_some_and(|kept| {
                        kept.iter().any(|&j| {
                            translation_distance(&centers[i], &centers[j]) < params.th_d
                                && rotation_distance(&preds[i].rotation, &preds[j].rotation) < params.th_alpha
                        })
                    })
                })
            })
        });
        if !suppressed {
            grid.entry((cx, cy, cz)).or_default().push(i);
            survivors.push(i);
        }
    }

    let mut per_object: HashMap<u32, usize> = HashMap::new();
    survivors
        .into_iter()
        .filter(|&i| match associate(&preds[i], scene, m) {
            Some(id) => {
                let n = per_object.entry(id).or_insert(0);
                *n += 1;
                *n <= params.k
            }
            None => true,
        })
        .collect()
}

/// [`pose_nms_indices`] returning the surviving grasps.
pub fn pose_nms(preds: &[GraspPose], scene: &Scene, params: &NmsParams, m: &GripperModel) -> Vec<GraspPose> {
    pose_nms_indices(preds, scene, params, m)
        .into_iter()
        .map(|i| preds[i])
        .collect()
}
