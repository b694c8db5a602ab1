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

//! Two-contact antipodal force-closure test and the friction-sweep score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, Vec3};
use crate::gripper::{local, to_local_all, GraspPose, GripperModel};

/// Distance below which two contacts are considered the same point, and the
/// band within which points tie for the extreme coordinate along the closing axis.
pub const CONTACT_EPS: f64 = 1e-6;

/// Slack on the friction-cone boundary so that `angle == atan(μ)` passes
/// despite rounding.
pub const CONE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contact {
    pub point: Vec3,
    /// Outward surface normal.
    pub normal: Vec3,
}

/// Ordered friction coefficients tried from smallest to largest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrictionGrid {
    mu_values: Vec<f64>,
}

impl Default for FrictionGrid {
    fn default() -> Self {
        FrictionGrid {
            mu_values: (1..=10).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

impl FrictionGrid {
    pub fn new(mu_values: Vec<f64>) -> Result<Self> {
        if mu_values.is_empty() {
            return Err(Error::invalid("friction grid is empty"));
        }
        if mu_values.iter().any(|&m| !(m > 0.0 && m <= 1.0)) {
            return Err(Error::invalid("friction coefficients must lie in (0, 1]"));
        }
        if mu_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("friction coefficients must be strictly increasing"));
        }
        Ok(FrictionGrid { mu_values })
    }

    /// Parses `start:step:stop` (inclusive stop), e.g. `0.1:0.1:1.0`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, step, stop] = parts.as_slice() else {
            return Err(Error::invalid(format!("expected start:step:stop, got {spec:?}")));
        };
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad number {s:?} in friction grid")))
        };
        let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
        if !(step > 0.0) {
            return Err(Error::invalid("friction grid step must be positive"));
        }
        let count = ((stop - start) / step + 1e-9).floor();
        if !(count >= 0.0) || count > 1e6 {
            return Err(Error::invalid(format!("bad friction grid range {spec:?}")));
        }
        let values = (0..=count as usize)
            .map(|i| round_to(start + i as f64 * step, 1e9))
            .collect();
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.mu_values
    }
}

fn round_to(v: f64, scale: f64) -> f64 {
    (v * scale).round() / scale
}

/// Score for the smallest passing friction coefficient: `1.1 - μ`, rounded
/// to six decimals so grid values land on their decimal representation.
pub fn score_for_mu(mu: f64) -> f64 {
    round_to(1.1 - mu, 1e6)
}

/// Positions (into `local`) of the two contacts: the extreme points along
/// -y and +y among the points inside the closing region.
///
/// Points within [`CONTACT_EPS`] of an extreme tie; ties go to the point
/// closest to the closing line, then to the lower position.
pub(crate) fn contacts_local(
    local: &[Vec3],
    width: f64,
    depth: f64,
    m: &GripperModel,
) -> Option<(usize, usize)> {
    let mut inside = Vec::new();
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, l) in local.iter().enumerate() {
        if local::in_region(l, width, depth, m) {
            inside.push(i);
            y_min = y_min.min(l.y);
            y_max = y_max.max(l.y);
        }
    }
    if inside.len() < 2 {
        return None;
    }
    let cx = depth - 0.5 * m.finger_length;
    let line_dist = |i: usize| {
        let l = &local[i];
        (l.x - cx).powi(2) + l.z.powi(2)
    };
    let pick = |in_band: &dyn Fn(f64) -> bool| {
        inside
            .iter()
            .copied()
            .filter(|&i| in_band(local[i].y))
            .min_by(|&a, &b| line_dist(a).total_cmp(&line_dist(b)).then(a.cmp(&b)))
    };
    let lo = pick(&|y| y <= y_min + CONTACT_EPS)?;
    let hi = pick(&|y| y >= y_max - CONTACT_EPS)?;
    if (local[hi] - local[lo]).norm() < CONTACT_EPS {
        return None;
    }
    Some((lo, hi))
}

/// Contacts of a grasp on an object cloud with normals, or `None` when fewer
/// than two object points lie in the closing region or the extremes coincide.
pub fn extract_contacts(
    g: &GraspPose,
    object: &PointCloud,
    m: &GripperModel,
) -> Result<Option<(Contact, Contact)>> {
    let normals = object
        .normals
        .as_ref()
        .ok_or_else(|| Error::invalid("object cloud has no normals"))?;
    let local = to_local_all(g, &object.points);
    Ok(contacts_local(&local, g.width, g.depth, m).map(|(a, b)| {
        (
            Contact {
                point: object.points[a],
                normal: normals[a],
            },
            Contact {
                point: object.points[b],
                normal: normals[b],
            },
        )
    }))
}

/// Half-angles each friction cone must open to contain the contact line.
pub fn cone_angles(c1: &Contact, c2: &Contact) -> Result<(f64, f64)> {
    let d = c2.point - c1.point;
    let len = d.norm();
    if !(len >= CONTACT_EPS) {
        return Err(Error::DegenerateContact);
    }
    let u = d / len;
    let angle = |a: Vec3, b: &Vec3| (a.dot(b) / b.norm()).clamp(-1.0, 1.0).acos();
    Ok((angle(u, &-c1.normal), angle(-u, &-c2.normal)))
}

/// True iff the line between the contacts lies inside both friction cones
/// of half-angle `atan(mu)` (boundary inclusive).
pub fn antipodal_check(c1: &Contact, c2: &Contact, mu: f64) -> Result<bool> {
    if !(mu > 0.0) {
        return Err(Error::invalid(format!("friction coefficient must be positive, got {mu}")));
    }
    let (a1, a2) = cone_angles(c1, c2)?;
    Ok(passes(a1.max(a2), mu))
}

#[inline]
pub(crate) fn passes(angle: f64, mu: f64) -> bool {
    angle <= mu.atan() + CONE_EPS
}

/// Index into `grid` of the smallest coefficient at which the pair is antipodal.
pub fn min_friction_index(c1: &Contact, c2: &Contact, grid: &FrictionGrid) -> Option<usize> {
    let (a1, a2) = cone_angles(c1, c2).ok()?;
    let worst = a1.max(a2);
    grid.values().iter().position(|&mu| passes(worst, mu))
}

/// Contacts expressed in the gripper frame of `g`.
pub(crate) fn local_contacts(
    g: &GraspPose,
    local: &[Vec3],
    normals: &[Vec3],
    idx: &[usize],
    pair: (usize, usize),
) -> (Contact, Contact) {
    let mk = |i: usize| Contact {
        point: local[i],
        normal: g.rotation.inverse_rotate(&normals[idx[i]]),
    };
    (mk(pair.0), mk(pair.1))
}

/// `1.1 - μ*` where μ* is the smallest grid value at which the grasp's
/// contacts are antipodal; 0 when there is no contact pair or no grid value passes.
pub fn friction_sweep_score(
    g: &GraspPose,
    object: &PointCloud,
    m: &GripperModel,
    grid: &FrictionGrid,
) -> Result<f64> {
    let normals = object
        .normals
        .as_ref()
        .ok_or_else(|| Error::invalid("object cloud has no normals"))?;
    let idx: Vec<usize> = (0..object.len()).collect();
    let local = to_local_all(g, &object.points);
    Ok(score_local(g, &local, normals, &idx, m, grid))
}

/// Score from gripper-frame points; `idx[i]` maps local position `i` to its normal.
pub(crate) fn score_local(
    g: &GraspPose,
    local: &[Vec3],
    normals: &[Vec3],
    idx: &[usize],
    m: &GripperModel,
    grid: &FrictionGrid,
) -> f64 {
    mu_index_local(g, local, normals, idx, m, grid)
        .map(|k| score_for_mu(grid.values()[k]))
        .unwrap_or(0.0)
}

pub(crate) fn mu_index_local(
    g: &GraspPose,
    local: &[Vec3],
    normals: &[Vec3],
    idx: &[usize],
    m: &GripperModel,
    grid: &FrictionGrid,
) -> Option<usize> {
    let pair = contacts_local(local, g.width, g.depth, m)?;
    let (c1, c2) = local_contacts(g, local, normals, idx, pair);
    min_friction_index(&c1, &c2, grid)
}
