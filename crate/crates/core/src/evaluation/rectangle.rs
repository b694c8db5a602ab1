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

//! Planar rectangle grasps and the rotation/IoU match rule.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Oriented rectangle in the image plane. `width` runs along `angle`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleGrasp {
    pub center: [f64; 2],
    pub angle: f64,
    pub width: f64,
    pub height: f64,
}

impl RectangleGrasp {
    pub fn new(center: [f64; 2], angle: f64, width: f64, height: f64) -> Self {
        RectangleGrasp {
            center,
            angle,
            width,
            height,
        }
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [[f64; 2]; 4] {
        let (s, c) = self.angle.sin_cos();
        let (hw, hh) = (0.5 * self.width, 0.5 * self.height);
        [(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)].map(|(u, v)| {
            [self.center[0] + c * u - s * v, self.center[1] + s * u + c * v]
        })
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        .abs()
        * 0.5
}

/// Clips `subject` by the convex counter-clockwise polygon `clip`.
fn clip_convex(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out = subject.to_vec();
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % clip.len()]);
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let (p, q) = (input[j], input[(j + 1) % input.len()]);
            let (dp, dq) = (cross(a, b, p), cross(a, b, q));
            if dp >= 0.0 {
                out.push(p);
            }
            if (dp >= 0.0) != (dq >= 0.0) {
                let t = dp / (dp - dq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
    }
    out
}

/// Intersection over union of two rotated rectangles.
pub fn rectangle_iou(a: &RectangleGrasp, b: &RectangleGrasp) -> f64 {
    let inter = polygon_area(&clip_convex(&a.corners(), &b.corners()));
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Angle between two grasp directions, in `[0, π/2]`.
fn angle_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// True iff some ground truth is within 30° of the prediction's angle and
/// overlaps it with IoU above 0.25.
pub fn rectangle_metric(pred: &RectangleGrasp, gts: &[RectangleGrasp]) -> bool {
    gts.iter().any(|gt| {
        angle_difference(pred.angle, gt.angle) < 30f64.to_radians() && rectangle_iou(pred, gt) > 0.25
    })
}
