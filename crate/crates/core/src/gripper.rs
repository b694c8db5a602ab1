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

//! Parallel-jaw gripper geometry.
//!
//! Gripper frame: +x approach, +y closing, +z finger height. A grasp's
//! `center` is the reference point on the object; the fingertips sit `depth`
//! past it along the approach axis, so the closing region spans
//! `x ∈ [depth - finger_length, depth]`, `|y| ≤ width / 2`,
//! `|z| ≤ finger_height / 2`. The fingers flank that region in `y`, and the
//! back plate sits behind it in `x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, RigidTransform, RotationMatrix, Vec3};

/// Slack applied to closing-region faces, so points that sit on a face up
/// to floating-point noise count as inside the region rather than the body.
pub const BOUNDARY_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GripperModel {
    pub max_width: f64,
    pub finger_length: f64,
    pub finger_height: f64,
    pub finger_thickness: f64,
    pub base_depth: f64,
    pub width_clearance: f64,
}

impl Default for GripperModel {
    fn default() -> Self {
        GripperModel {
            max_width: 0.10,
            finger_length: 0.04,
            finger_height: 0.02,
            finger_thickness: 0.01,
            base_depth: 0.02,
            width_clearance: 0.01,
        }
    }
}

impl GripperModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("max_width", self.max_width),
            ("finger_length", self.finger_length),
            ("finger_height", self.finger_height),
            ("finger_thickness", self.finger_thickness),
            ("base_depth", self.base_depth),
            ("width_clearance", self.width_clearance),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("gripper {name} must be positive, got {v}")));
            }
        }
        if self.max_width <= 2.0 * self.finger_thickness {
            return Err(Error::invalid("gripper max_width must exceed twice the finger thickness"));
        }
        Ok(())
    }

    /// Radius around a grasp center that encloses every gripper body for
    /// depths up to `max_depth`.
    pub fn reach(&self, max_depth: f64, min_depth: f64) -> f64 {
        let back = (min_depth - self.finger_length - self.base_depth).abs();
        let x = max_depth.abs().max(back);
        let y = 0.5 * self.max_width + self.finger_thickness;
        let z = 0.5 * self.finger_height;
        (x * x + y * y + z * z).sqrt()
    }
}

/// A 6-DoF parallel-jaw grasp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraspPose {
    pub rotation: RotationMatrix,
    pub center: Vec3,
    pub width: f64,
    pub depth: f64,
    /// Analytic quality `1.1 - μ*`; 0 marks a negative or invalid grasp.
    pub score: f64,
    /// Predictor-assigned ranking value, unrelated to `score`.
    pub confidence: f64,
    pub object_id: Option<u32>,
}

impl GraspPose {
    pub fn new(rotation: RotationMatrix, center: Vec3, width: f64, depth: f64) -> Self {
        GraspPose {
            rotation,
            center,
            width,
            depth,
            score: 0.0,
            confidence: 0.0,
            object_id: None,
        }
    }

    pub fn approach(&self) -> Vec3 {
        self.rotation.column(0)
    }

    pub fn closing_axis(&self) -> Vec3 {
        self.rotation.column(1)
    }

    pub fn frame(&self) -> RigidTransform {
        RigidTransform::new(self.rotation, self.center)
    }

    /// Gripper-frame coordinates of a world point.
    pub fn to_local(&self, p: &Vec3) -> Vec3 {
        self.rotation.inverse_rotate(&(p - self.center))
    }

    /// Applies a rigid transform to the pose, keeping all other fields.
    pub fn transformed(&self, t: &RigidTransform) -> GraspPose {
        GraspPose {
            rotation: t.rotation * self.rotation,
            center: t.apply(&self.center),
            ..*self
        }
    }

    /// Center of the closing region in world coordinates.
    pub fn region_center(&self, m: &GripperModel) -> Vec3 {
        self.center + self.approach() * (self.depth - 0.5 * m.finger_length)
    }

    /// Same physical gripper placement re-expressed with the closing-region
    /// center as reference point (`depth = finger_length / 2`).
    pub fn canonical(&self, m: &GripperModel) -> GraspPose {
        GraspPose {
            center: self.region_center(m),
            depth: 0.5 * m.finger_length,
            ..*self
        }
    }
}

/// Box with a rigid pose and positive half extents along its local axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedBox {
    pub pose: RigidTransform,
    pub half_extents: Vec3,
}

impl OrientedBox {
    /// Closed containment test.
    pub fn contains(&self, p: &Vec3) -> bool {
        let l = self.pose.inverse_apply(p);
        l.x.abs() <= self.half_extents.x && l.y.abs() <= self.half_extents.y && l.z.abs() <= self.half_extents.z
    }

    pub fn corners(&self) -> [Vec3; 8] {
        let h = self.half_extents;
        let mut out = [Vec3::zeros(); 8];
        for (i, c) in out.iter_mut().enumerate() {
            let s = Vec3::new(
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            );
            *c = self.pose.apply(&h.component_mul(&s));
        }
        out
    }

    pub fn transformed(&self, t: &RigidTransform) -> OrientedBox {
        OrientedBox {
            pose: crate::geometry::compose(t, &self.pose),
            half_extents: self.half_extents,
        }
    }
}

fn local_box(g: &GraspPose, center: Vec3, half: Vec3) -> OrientedBox {
    OrientedBox {
        pose: RigidTransform::new(g.rotation, g.center + g.rotation.rotate(&center)),
        half_extents: half,
    }
}

/// The volume between the fingers.
pub fn closing_region(g: &GraspPose, m: &GripperModel) -> OrientedBox {
    local_box(
        g,
        Vec3::new(g.depth - 0.5 * m.finger_length, 0.0, 0.0),
        Vec3::new(0.5 * m.finger_length, 0.5 * g.width, 0.5 * m.finger_height),
    )
}

/// The solid parts of the gripper: left finger, right finger, back plate.
pub fn gripper_bodies(g: &GraspPose, m: &GripperModel) -> [OrientedBox; 3] {
    let fx = g.depth - 0.5 * m.finger_length;
    let fy = 0.5 * g.width + 0.5 * m.finger_thickness;
    let finger_half = Vec3::new(0.5 * m.finger_length, 0.5 * m.finger_thickness, 0.5 * m.finger_height);
    [
        local_box(g, Vec3::new(fx, -fy, 0.0), finger_half),
        local_box(g, Vec3::new(fx, fy, 0.0), finger_half),
        local_box(
            g,
            Vec3::new(g.depth - m.finger_length - 0.5 * m.base_depth, 0.0, 0.0),
            Vec3::new(
                0.5 * m.base_depth,
                0.5 * g.width + m.finger_thickness,
                0.5 * m.finger_height,
            ),
        ),
    ]
}

/// Box enclosing every gripper body and the closing region.
pub fn gripper_hull(g: &GraspPose, m: &GripperModel) -> OrientedBox {
    let back = g.depth - m.finger_length - m.base_depth;
    local_box(
        g,
        Vec3::new(0.5 * (back + g.depth), 0.0, 0.0),
        Vec3::new(
            0.5 * (g.depth - back),
            0.5 * g.width + m.finger_thickness,
            0.5 * m.finger_height,
        ),
    )
}

/// Indices of the points inside `b` (closed), ascending.
pub fn points_in_box(cloud: &PointCloud, b: &OrientedBox) -> Vec<usize> {
    cloud
        .points
        .iter()
        .enumerate()
        .filter(|(_, p)| b.contains(p))
        .map(|(i, _)| i)
        .collect()
}

/// Local-frame predicates shared by annotation, scoring and evaluation.
pub(crate) mod local {
    use super::{GripperModel, BOUNDARY_EPS};
    use crate::geometry::Vec3;

    /// Inside the closing region of the given width, with face slack.
    #[inline]
    pub fn in_region(l: &Vec3, width: f64, depth: f64, m: &GripperModel) -> bool {
        l.x >= depth - m.finger_length - BOUNDARY_EPS
            && l.x <= depth + BOUNDARY_EPS
            && l.y.abs() <= 0.5 * width + BOUNDARY_EPS
            && l.z.abs() <= 0.5 * m.finger_height + BOUNDARY_EPS
    }

    /// Inside a finger or the back plate (hull minus closing region).
    #[inline]
    pub fn in_body(l: &Vec3, width: f64, depth: f64, m: &GripperModel) -> bool {
        let in_hull = l.x >= depth - m.finger_length - m.base_depth
            && l.x <= depth
            && l.y.abs() <= 0.5 * width + m.finger_thickness
            && l.z.abs() <= 0.5 * m.finger_height;
        in_hull && !in_region(l, width, depth, m)
    }

    pub fn collides(local: &[Vec3], width: f64, depth: f64, m: &GripperModel) -> bool {
        local.iter().any(|l| in_body(l, width, depth, m))
    }
}

/// Why a candidate received no width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WidthOutcome {
    Width(f64),
    /// Nothing between the fully opened fingers.
    Empty,
    /// The required opening exceeds `max_width`, or the fingers hit the object.
    Collision,
}

/// Width search on gripper-frame points.
pub(crate) fn width_search_local(local: &[Vec3], depth: f64, m: &GripperModel) -> WidthOutcome {
    let mut max_y: Option<f64> = None;
    for l in local {
        if local::in_region(l, m.max_width, depth, m) {
            let y = l.y.abs();
            max_y = Some(max_y.map_or(y, |v: f64| v.max(y)));
        }
    }
    let Some(max_y) = max_y else {
        return WidthOutcome::Empty;
    };
    // Widths are stored as f32; decide collisions with the stored value.
    let width = (2.0 * max_y + m.width_clearance) as f32 as f64;
    if width > m.max_width {
        return WidthOutcome::Collision;
    }
    if local::collides(local, width, depth, m) {
        return WidthOutcome::Collision;
    }
    WidthOutcome::Width(width)
}

pub(crate) fn to_local_all<'a>(g: &GraspPose, points: impl IntoIterator<Item = &'a Vec3>) -> Vec<Vec3> {
    points.into_iter().map(|p| g.to_local(p)).collect()
}

/// True iff some point lies inside a finger or the back plate. Points inside
/// the closing region never count.
pub fn gripper_collision(g: &GraspPose, m: &GripperModel, cloud: &PointCloud) -> bool {
    cloud
        .points
        .iter()
        .any(|p| local::in_body(&g.to_local(p), g.width, g.depth, m))
}

/// Opening width for a grasp whose width is not yet known.
///
/// Takes the object points between the fully opened fingers; the width is
/// twice their largest `|y|` plus the clearance. Returns `None` ("empty")
/// when no points are between the fingers, when the required opening exceeds
/// `max_width`, or when the fingers would intersect the object.
pub fn determine_width(g: &GraspPose, m: &GripperModel, object: &PointCloud) -> Option<f64> {
    match determine_width_detailed(g, m, object) {
        WidthOutcome::Width(w) => Some(w),
        _ => None,
    }
}

/// [`determine_width`] keeping the reason for rejection.
pub fn determine_width_detailed(g: &GraspPose, m: &GripperModel, object: &PointCloud) -> WidthOutcome {
    let local = to_local_all(g, &object.points);
    width_search_local(&local, g.depth, m)
}
