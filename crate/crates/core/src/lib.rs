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

//! Analytic 6-DoF parallel-jaw grasp annotation and representation-agnostic
//! grasp evaluation.
//!
//! Objects are labeled densely over grasp point × view × in-plane angle ×
//! depth with a friction-cone sweep; labels are projected into clustered
//! scenes and predicted grasps are scored with pose-NMS and Precision@k.

pub mod annotation;
pub mod catalog;
pub mod error;
pub mod evaluation;
pub mod forceclosure;
pub mod geometry;
pub mod gripper;
pub mod io;
pub mod scene;

pub use annotation::{annotate_object, AnnotationParams, GraspLabelSet, LabelFlag};
pub use error::{Error, Result};
pub use evaluation::{evaluate_scene, pose_nms, EvalReport, NmsParams};
pub use forceclosure::FrictionGrid;
pub use geometry::{PointCloud, RigidTransform, RotationMatrix, TriangleMesh, Vec3};
pub use gripper::{GraspPose, GripperModel};
pub use scene::{Scene, SceneGraspSet};
