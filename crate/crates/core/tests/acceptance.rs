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

//! Acceptance suite. Run with `cargo test --release --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::collections::HashMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use graspbench::annotation::{
    annotate_object, label_stats, object_cloud, uniform_angles, AnnotationParams, GraspLabelSet, LabelFlag,
    LabelHeader, LabelRatio, LabelStats,
};
use graspbench::catalog::{self, Catalog};
use graspbench::evaluation::{
    evaluate_scene, pose_nms, pose_nms_indices, rectangle_metric, scene_collision, top_grasps, associate,
    EvalReport, GraspAudit, NmsParams, RectangleGrasp, EVAL_MUS, TOP_K,
};
use graspbench::forceclosure::friction_sweep_score;
use graspbench::geometry::{compose, geodesic_angle, PointCloud, RigidTransform, RotationMatrix, TriangleMesh, Vec3};
use graspbench::io;
use graspbench::scene::{
    annotate_scene, project_labels, propagate_pose, synthesize_scene, ObjectInstance, Scene, SceneGrasp,
    SceneGraspSet, SceneParams, SplitTag,
};
use graspbench::{FrictionGrid, GraspPose, GripperModel};

type Check = Result<String, String>;

/// Writes past the test harness's output capture so results show in plain `cargo test` runs.
fn say(line: String) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

struct Outcome {
    name: &'static str,
    pass: bool,
    soft: bool,
    detail: String,
}

fn run(name: &'static str, soft: bool, f: impl FnOnce() -> Check) -> Outcome {
    let (pass, detail) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    let tag = match (pass, soft) {
        (true, _) => "PASS",
        (false, true) => "WARN",
        (false, false) => "FAIL",
    };
    say(format!("[{tag}] {name}: {detail}"));
    Outcome {
        name,
        pass,
        soft,
        detail,
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(
        elapsed.as_secs_f64() < limit_s,
        format!("{what} took {:.1} s (limit {limit_s} s)", elapsed.as_secs_f64()),
    )
}

/// Two planar faces `y = ±(hw - x·tanθ)` for `x, z ∈ [-half, half]` on a
/// regular grid, with outward normals `(sinθ, ±cosθ, 0)`.
fn wedge_faces(theta: f64, hw: f64, half: f64, steps: usize, offset: Vec3) -> PointCloud {
    let (s, c) = theta.sin_cos();
    let t = theta.tan();
    let mut points = Vec::new();
    let mut normals = Vec::new();
    for i in 0..=steps {
        let x = -half + 2.0 * half * i as f64 / steps as f64;
        for k in 0..=steps {
            let z = -half + 2.0 * half * k as f64 / steps as f64;
            let y = hw - x * t;
            points.push(offset + Vec3::new(x, -y, z));
            normals.push(Vec3::new(s, -c, 0.0));
            points.push(offset + Vec3::new(x, y, z));
            normals.push(Vec3::new(s, c, 0.0));
        }
    }
    PointCloud::with_normals(points, normals).unwrap()
}

/// Grid index of the first passing coefficient for a face tilt θ, from the
/// closed form: ⌈10·tanθ⌉, at least 1.
fn closed_form_mu_index(theta_deg: f64) -> usize {
    ((10.0 * theta_deg.to_radians().tan()).ceil() as usize).max(1)
}

fn wedge_scores() -> Check {
    let start = Instant::now();
    let m = GripperModel::default();
    let grid = FrictionGrid::default();
    let mut got = Vec::new();
    for deg in [0.0, 10.0, 20.0, 30.0, 40.0] {
        let cloud = wedge_faces(f64::to_radians(deg), 0.02, 0.03, 120, Vec3::zeros());
        let g = GraspPose::new(RotationMatrix::identity(), Vec3::zeros(), 0.09, 0.02);
        let s = friction_sweep_score(&g, &cloud, &m, &grid).map_err(|e| e.to_string())?;
        let expected = (11 - closed_form_mu_index(deg)) as f64 / 10.0;
        ensure(s == expected, format!("θ = {deg}°: score {s}, closed form {expected}"))?;
        got.push(format!("{deg}°→{s}"));
    }
    within(start.elapsed(), 5.0, "wedge family")?;
    Ok(format!("{} in {:.2} s", got.join(" "), start.elapsed().as_secs_f64()))
}

fn sphere_scores() -> Check {
    let start = Instant::now();
    let m = GripperModel {
        finger_length: 0.08,
        ..GripperModel::default()
    };
    let params = AnnotationParams {
        voxel: 0.01,
        views: 300,
        angles: uniform_angles(4),
        depths: vec![0.03, 0.07],
        cloud_density: 2e5,
        ..AnnotationParams::default()
    };
    let mesh = catalog::icosphere(0.03, 4);
    let labels = annotate_object(&mesh, 1, &m, &params).map_err(|e| e.to_string())?;
    let rotations = labels.rotations();
    let (mut through, mut perfect) = (0usize, 0usize);
    for i in 0..labels.flags.len() {
        if !matches!(labels.flags[i], LabelFlag::Positive | LabelFlag::Negative) {
            continue;
        }
        let g = labels.grasp_at(i, &rotations);
        let c = g.region_center(&m);
        let y = g.closing_axis();
        if (c - y * c.dot(&y)).norm() <= 1e-3 {
            through += 1;
            if labels.scores[i] == 1.0 {
                perfect += 1;
            }
        }
    }
    within(start.elapsed(), 10.0, "sphere annotation")?;
    ensure(through >= 20, format!("only {through} candidates pass within 1 mm of the center"))?;
    let frac = perfect as f64 / through as f64;
    ensure(frac >= 0.99, format!("{perfect}/{through} score 1.0"))?;
    Ok(format!(
        "{perfect}/{through} ({:.2}%) score 1.0 in {:.2} s",
        100.0 * frac,
        start.elapsed().as_secs_f64()
    ))
}

fn pose_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let (mut worst_t, mut worst_r) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let cam0 = RigidTransform::random(&mut rng, 1.0);
        let cami = RigidTransform::random(&mut rng, 1.0);
        let p0 = RigidTransform::random(&mut rng, 1.0);
        let pi = propagate_pose(&cami, &cam0, &p0);
        let a = compose(&cami, &pi);
        let b = compose(&cam0, &p0);
        worst_t = worst_t.max((a.translation - b.translation).norm());
        worst_r = worst_r.max(geodesic_angle(&a.rotation, &b.rotation));
    }
    ensure(worst_t < 1e-9 && worst_r < 1e-9, format!("max error {worst_t:e} m / {worst_r:e} rad"))?;
    Ok(format!("1000 triples, max error {worst_t:.1e} m / {worst_r:.1e} rad"))
}

fn frame_invariance() -> Check {
    let m = GripperModel::default();
    let params = AnnotationParams {
        voxel: 0.01,
        views: 30,
        angles: uniform_angles(4),
        depths: vec![0.02, 0.04],
        cloud_density: 2e5,
        ..AnnotationParams::default()
    };
    let catalog = Catalog::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut checked = 0usize;
    for name in ["box-small", "cylinder-thin", "prism-tri"] {
        let entry = catalog.by_name(name).unwrap();
        let labels = annotate_object(&entry.mesh, entry.id, &m, &params).map_err(|e| e.to_string())?;
        let cloud = object_cloud(&entry.mesh, &params).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let pose = RigidTransform::random(&mut rng, 0.5);
            let world = cloud.transformed(&pose);
            let grasps = project_labels(&pose, &labels, |f, _| matches!(f, LabelFlag::Positive | LabelFlag::Negative));
            for g in &grasps {
                let s = friction_sweep_score(&g.grasp, &world, &m, &params.friction).map_err(|e| e.to_string())?;
                ensure(
                    s as f32 == g.grasp.score as f32,
                    format!("{name}: re-scored {s} vs stored {}", g.grasp.score),
                )?;
                checked += 1;
            }
        }
    }
    ensure(checked > 1000, format!("only {checked} grasps checked"))?;
    Ok(format!("{checked} projected grasps re-scored exactly"))
}

fn grasp_at(x: f64, y: f64, conf: f64) -> GraspPose {
    let mut g = GraspPose::new(RotationMatrix::identity(), Vec3::new(x, y, 0.5), 0.05, 0.02);
    g.confidence = conf;
    g
}

fn cloud_scene(points: Vec<Vec3>, ids: Vec<u32>) -> Scene {
    let n = points.len();
    let mut known: Vec<u32> = ids.iter().copied().filter(|&i| i != 0).collect();
    known.sort_unstable();
    known.dedup();
    let instances = known
        .into_iter()
        .map(|id| ObjectInstance {
            object_id: id,
            name: format!("object-{id}"),
            pose: RigidTransform::identity(),
        })
        .collect();
    let cloud = PointCloud {
        points,
        normals: Some(vec![Vec3::z(); n]),
        object_ids: Some(ids),
    };
    Scene::new(instances, vec![], cloud, SplitTag::Seen).unwrap()
}

fn nms_contract(scene: &Scene) -> Check {
    let m = GripperModel::default();
    let p = NmsParams::default();
    ensure(p.th_d == 0.01 && p.th_alpha == 5f64.to_radians() && p.k == 10, "default thresholds")?;
    let empty = cloud_scene(vec![], vec![]);

    let dup = pose_nms(&[grasp_at(0.0, 0.0, 0.5), grasp_at(0.0, 0.0, 0.5)], &empty, &p, &m);
    ensure(dup.len() == 1, format!("duplicates kept {}", dup.len()))?;

    let apart = pose_nms(&[grasp_at(0.0, 0.0, 0.9), grasp_at(0.02, 0.0, 0.8)], &empty, &p, &m);
    ensure(apart.len() == 2, "2 cm separated grasps suppressed")?;

    let rod: Vec<Vec3> = (0..300).map(|i| Vec3::new(i as f64 * 0.001 - 0.15, 0.0, 0.5)).collect();
    let rod_scene = cloud_scene(rod, vec![4; 300]);
    let fifteen: Vec<GraspPose> = (0..15)
        .map(|i| grasp_at(i as f64 * 0.015 - 0.1, 0.0, (i * 7 % 15) as f64 / 15.0))
        .collect();
    let capped = pose_nms_indices(&fifteen, &rod_scene, &p, &m);
    let mut by_conf: Vec<usize> = (0..15).collect();
    by_conf.sort_by(|&a, &b| fifteen[b].confidence.total_cmp(&fifteen[a].confidence));
    ensure(capped == by_conf[..10], format!("K cap kept {capped:?}"))?;

    // Idempotence on random grasps around a cluttered scene.
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let pts = &scene.scene_cloud.points;
    let preds: Vec<GraspPose> = (0..10_000)
        .map(|_| {
            let anchor = pts[rng.gen_range(0..pts.len())];
            let jitter = Vec3::new(rng.gen_range(-0.02..0.02), rng.gen_range(-0.02..0.02), rng.gen_range(-0.02..0.02));
            let mut g = GraspPose::new(
                RotationMatrix::random(&mut rng),
                anchor + jitter,
                rng.gen_range(0.02..0.1),
                rng.gen_range(0.01..0.04),
            );
            g.confidence = (rng.gen_range(0..100) as f64) / 100.0;
            g
        })
        .collect();
    let once = pose_nms(&preds, scene, &p, &m);
    let twice = pose_nms(&once, scene, &p, &m);
    ensure(once == twice, "NMS is not idempotent")?;
    ensure(once.len() <= preds.len(), "NMS grew the list")?;
    let mut per_object: HashMap<u32, usize> = HashMap::new();
    for g in &once {
        if let Some(id) = associate(g, scene, &m) {
            *per_object.entry(id).or_default() += 1;
        }
    }
    ensure(per_object.values().all(|&c| c <= 10), "per-object count above K")?;
    Ok(format!(
        "duplicate, 2 cm and K = 10 cases hold; 10000 → {} grasps, idempotent",
        once.len()
    ))
}

struct Pipeline {
    scene: Scene,
    labels: HashMap<u32, GraspLabelSet>,
    set: SceneGraspSet,
    elapsed: Duration,
}

fn e2e_params() -> AnnotationParams {
    AnnotationParams {
        voxel: 0.01,
        views: 60,
        angles: uniform_angles(6),
        cloud_density: 2e5,
        ..AnnotationParams::default()
    }
}

fn build_pipeline() -> Pipeline {
    let start = Instant::now();
    let m = GripperModel::default();
    let params = e2e_params();
    let catalog = Catalog::builtin();
    let ids: Vec<u32> = catalog.entries().iter().map(|e| e.id).collect();
    let scene_params = SceneParams {
        cloud: params.clone(),
        split_tag: SplitTag::Seen,
        ..SceneParams::default()
    };
    let scene = synthesize_scene(&ids, 7, &catalog, &scene_params).unwrap();
    let labels: HashMap<u32, GraspLabelSet> = ids
        .iter()
        .map(|&id| (id, annotate_object(&catalog.get(id).unwrap().mesh, id, &m, &params).unwrap()))
        .collect();
    let set = annotate_scene(&scene, &labels, &m, 0.0, true).unwrap();
    Pipeline {
        scene,
        labels,
        set,
        elapsed: start.elapsed(),
    }
}

/// Predictions pass through the JSON prediction format, as a user would submit them.
fn as_submitted(grasps: &[GraspPose], m: &GripperModel) -> Vec<GraspPose> {
    let preds: Vec<io::Prediction> = grasps.iter().map(|g| io::Prediction::from_grasp(g, m)).collect();
    io::parse_predictions_json(&io::write_predictions_json(&preds))
        .unwrap()
        .iter()
        .map(|p| p.to_grasp(m))
        .collect()
}

fn self_evaluation(p: &Pipeline, reports: &mut Vec<EvalReport>) -> Check {
    let start = Instant::now();
    let m = GripperModel::default();
    let nms = NmsParams::default();
    let gt = top_grasps(&p.set, &p.scene, &m, &nms, 50, |g| {
        g.flag == LabelFlag::Positive && g.grasp.score >= 0.6
    });
    ensure(gt.len() == 50, format!("only {} ground-truth grasps available", gt.len()))?;
    ensure(gt.iter().all(|g| !scene_collision(g, &p.scene, &m)), "a ground-truth grasp collides")?;
    let good = evaluate_scene(&as_submitted(&gt, &m), &p.scene, &m, &nms);
    let neg = top_grasps(&p.set, &p.scene, &m, &nms, 50, |g| g.flag == LabelFlag::Negative);
    ensure(!neg.is_empty(), "no negative grasps")?;
    let bad = evaluate_scene(&as_submitted(&neg, &m), &p.scene, &m, &nms);
    let total = p.elapsed + start.elapsed();
    let ok = good.ap == 1.0 && bad.ap == 0.0;
    let detail = format!(
        "ground truth AP = {}, {} negatives AP = {}, end to end {:.1} s",
        good.ap,
        neg.len(),
        bad.ap,
        total.as_secs_f64()
    );
    reports.push(good);
    reports.push(bad);
    ensure(ok, detail.clone())?;
    within(total, 300.0, "end-to-end pipeline")?;
    Ok(detail)
}

fn ap_oracle(reports: &mut Vec<EvalReport>) -> Check {
    let m = GripperModel::default();
    // Face tilts and the resulting first passing grid index; None = no object.
    let kinds: [Option<f64>; 7] = [Some(0.0), Some(10.0), Some(15.0), Some(20.0), Some(25.0), Some(40.0), None];
    let slots = 50;
    let origin = |slot: usize, kind: usize| Vec3::new(slot as f64 * 0.2, kind as f64 * 0.2, 0.5);
    let mut points = Vec::new();
    let mut normals = Vec::new();
    let mut ids = Vec::new();
    let mut instances = Vec::new();
    for slot in 0..slots {
        for (kind, deg) in kinds.iter().enumerate() {
            let Some(deg) = deg else { continue };
            let id = (slot * kinds.len() + kind + 1) as u32;
            let w = wedge_faces(deg.to_radians(), 0.02, 0.015, 20, origin(slot, kind));
            ids.extend(std::iter::repeat(id).take(w.len()));
            points.extend(w.points);
            normals.extend(w.normals.unwrap());
            instances.push(ObjectInstance {
                object_id: id,
                name: format!("wedge-{deg}"),
                pose: RigidTransform::from_translation(origin(slot, kind)),
            });
        }
    }
    let cloud = PointCloud {
        points,
        normals: Some(normals),
        object_ids: Some(ids),
    };
    let scene = Scene::new(instances, vec![], cloud, SplitTag::Novel).unwrap();
    let pass_index = |kind: usize| kinds[kind].map(closed_form_mu_index);

    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    for case in 0..200 {
        let n = rng.gen_range(0..=slots);
        let mut preds = Vec::with_capacity(n);
        let mut kind_of = Vec::with_capacity(n);
        for slot in 0..n {
            let kind = rng.gen_range(0..kinds.len());
            let mut g = GraspPose::new(RotationMatrix::identity(), origin(slot, kind), 0.08, 0.02);
            g.confidence = rng.gen();
            preds.push(g);
            kind_of.push(kind);
        }
        let report = evaluate_scene(&preds, &scene, &m, &NmsParams::default());

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| preds[b].confidence.partial_cmp(&preds[a].confidence).unwrap().then(a.cmp(&b)));
        let mut ap_sum = 0.0;
        for (j, mu) in EVAL_MUS.iter().enumerate() {
            let verdicts: Vec<bool> = order
                .iter()
                .map(|&i| pass_index(kind_of[i]).is_some_and(|k| k <= j + 1))
                .collect();
            let mut sum = 0.0;
            for k in 1..=TOP_K {
                let hits = verdicts.iter().take(k).filter(|&&v| v).count();
                sum += hits as f64 / k as f64;
            }
            let ap_mu = sum / TOP_K as f64;
            ensure(
                report.per_mu[j].ap == ap_mu,
                format!("case {case}, μ = {mu}: AP {} vs oracle {ap_mu}", report.per_mu[j].ap),
            )?;
            ap_sum += ap_mu;
        }
        let ap = ap_sum / EVAL_MUS.len() as f64;
        ensure(report.ap == ap, format!("case {case}: AP {} vs oracle {ap}", report.ap))?;
        reports.push(report);
    }
    Ok("200 random prediction sets match direct summation exactly".into())
}

fn mu_monotonicity(p: &Pipeline, reports: &mut Vec<EvalReport>) -> Check {
    let m = GripperModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    // Perturbed ground truth gives a mix of verdicts.
    let gt: Vec<&SceneGrasp> = p.set.grasps.iter().filter(|g| g.flag == LabelFlag::Positive).collect();
    for _ in 0..5 {
        let preds: Vec<GraspPose> = (0..400)
            .map(|_| {
                let base = gt[rng.gen_range(0..gt.len())].grasp;
                let nudge = RotationMatrix::from_axis_angle(&Vec3::new(rng.gen(), rng.gen(), rng.gen()).normalize(), rng.gen_range(0.0..0.3));
                GraspPose {
                    rotation: nudge * base.rotation,
                    center: base.center + Vec3::new(rng.gen_range(-0.005..0.005), rng.gen_range(-0.005..0.005), rng.gen_range(-0.005..0.005)),
                    confidence: rng.gen(),
                    ..base
                }
            })
            .collect();
        reports.push(evaluate_scene(&preds, &p.scene, &m, &NmsParams::default()));
    }
    for (i, r) in reports.iter().enumerate() {
        let aps: Vec<f64> = r.per_mu.iter().map(|x| x.ap).collect();
        ensure(aps.windows(2).all(|w| w[0] <= w[1]), format!("report {i}: AP by μ {aps:?}"))?;
    }
    let last = reports.last().unwrap();
    Ok(format!(
        "{} evaluated scenes monotone (perturbed set: {})",
        reports.len(),
        last.per_mu.iter().map(|x| format!("{:.3}", x.ap)).collect::<Vec<_>>().join(" ≤ ")
    ))
}

fn label_ratio(p: &Pipeline) -> Check {
    let stats: Vec<LabelStats> = p.labels.values().map(label_stats).collect();
    let total = LabelStats::combine(&stats);
    let detail = format!("{} positive / {} negative, ratio {}", total.positive, total.negative, total.ratio);
    match total.ratio {
        LabelRatio::Finite(r) if (0.2..=1.5).contains(&r) => Ok(detail),
        _ => Err(format!("{detail} outside [0.2, 1.5]")),
    }
}

fn rectangles() -> Check {
    let r = RectangleGrasp::new([0.3, -0.2], 0.4, 0.08, 0.03);
    ensure(rectangle_metric(&r, &[r]), "identical rectangles rejected")?;
    let turned = RectangleGrasp {
        angle: r.angle + 45f64.to_radians(),
        ..r
    };
    ensure(!rectangle_metric(&r, &[turned]), "45° rotation accepted")?;
    let (s, c) = r.angle.sin_cos();
    // Shift along the width axis so the overlap is a 0.4 fraction: IoU = 0.4 / 1.6 = 0.25.
    let shift = 0.6 * r.width;
    let edge = RectangleGrasp {
        center: [r.center[0] + c * shift, r.center[1] + s * shift],
        ..r
    };
    let further = RectangleGrasp {
        center: [r.center[0] + c * 0.062, r.center[1] + s * 0.062],
        ..r
    };
    let disjoint = RectangleGrasp {
        center: [r.center[0] + 1.0, r.center[1]],
        ..r
    };
    ensure(!rectangle_metric(&r, &[further]), "IoU below 0.25 accepted")?;
    ensure(!rectangle_metric(&r, &[disjoint]), "disjoint rectangles accepted")?;
    let iou = graspbench::evaluation::rectangle_iou(&r, &edge);
    ensure((iou - 0.25).abs() < 1e-12, format!("boundary IoU {iou}"))?;
    Ok(format!("identical → true, 45° → false, IoU ≤ 0.25 → false (boundary IoU {iou:.6})"))
}

fn random_mesh(rng: &mut ChaCha8Rng) -> TriangleMesh {
    loop {
        let nv = rng.gen_range(3..30);
        let v: Vec<Vec3> = (0..nv).map(|_| Vec3::new(rng.gen(), rng.gen(), rng.gen())).collect();
        let t: Vec<[u32; 3]> = (0..rng.gen_range(1..40))
            .map(|_| {
                let a = rng.gen_range(0..nv as u32);
                [a, (a + 1) % nv as u32, (a + 2) % nv as u32]
            })
            .collect();
        if let Ok((mesh, _)) = TriangleMesh::new_dropping_degenerate(v, t) {
            if !mesh.is_empty() {
                return mesh;
            }
        }
    }
}

fn random_labels(rng: &mut ChaCha8Rng) -> GraspLabelSet {
    let n = rng.gen_range(0..15);
    let views = rng.gen_range(1..4);
    let angles = uniform_angles(rng.gen_range(1..4));
    let depths: Vec<f64> = (0..rng.gen_range(1..4)).map(|i| 0.01 * (i + 1) as f64).collect();
    let cells = n * views * angles.len() * depths.len();
    let flags: Vec<LabelFlag> = (0..cells).map(|_| LabelFlag::from_u8(rng.gen_range(0..4)).unwrap()).collect();
    GraspLabelSet {
        header: LabelHeader {
            object_id: rng.gen_range(1..50),
            views,
            angles,
            depths,
            friction: FrictionGrid::default().values().to_vec(),
            gripper_hash: io::gripper_profile_hash(&GripperModel::default()),
            cloud_density: 1e6,
            cloud_seed: rng.gen(),
        },
        grasp_points: (0..n).map(|_| Vec3::new(rng.gen(), rng.gen(), rng.gen())).collect(),
        grasp_normals: (0..n).map(|_| Vec3::new(rng.gen(), rng.gen(), 1.0).normalize()).collect(),
        scores: flags
            .iter()
            .map(|&f| if f == LabelFlag::Positive { rng.gen_range(1..=10) as f32 / 10.0 } else { 0.0 })
            .collect(),
        widths: (0..cells).map(|_| rng.gen::<f32>() * 0.1).collect(),
        flags,
    }
}

fn codecs() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1011);
    let e = |x: graspbench::Error| x.to_string();
    let mut formats = Vec::new();
    for i in 0..100 {
        let mesh = random_mesh(&mut rng);
        ensure(io::parse_obj(&io::write_obj(&mesh)).map_err(e)?.mesh == mesh, "OBJ")?;
        ensure(io::parse_ply(&io::write_ply(&mesh)).map_err(e)?.mesh == mesh, "PLY")?;

        let n = rng.gen_range(1..40);
        let cloud = PointCloud {
            points: (0..n).map(|_| Vec3::new(rng.gen(), rng.gen(), rng.gen())).collect(),
            normals: Some((0..n).map(|_| Vec3::new(rng.gen(), 1.0, rng.gen()).normalize()).collect()),
            object_ids: Some((0..n).map(|_| rng.gen_range(0..4)).collect()),
        };
        ensure(io::parse_cloud(&io::write_cloud(&cloud)).map_err(e)? == cloud, "point cloud")?;

        let labels = random_labels(&mut rng);
        let bin = io::decode_labels_binary(&io::encode_labels_binary(&labels)).map_err(e)?;
        let json = io::decode_labels_json(&io::encode_labels_json(&labels)).map_err(e)?;
        let bits = |l: &GraspLabelSet| {
            (
                l.scores.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                l.widths.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            )
        };
        ensure(bin == labels && bits(&bin) == bits(&labels), "binary labels")?;
        ensure(json == labels && bits(&json) == bits(&labels), "JSON labels")?;

        let instances: Vec<ObjectInstance> = (1..=3)
            .map(|id| ObjectInstance {
                object_id: id,
                name: format!("o{id}"),
                pose: RigidTransform::random(&mut rng, 0.3),
            })
            .collect();
        let cams = (0..rng.gen_range(0..5)).map(|_| RigidTransform::random(&mut rng, 1.0)).collect();
        let scene = Scene::new(instances, cams, cloud.clone(), SplitTag::Similar).map_err(e)?;
        let path = dir.path().join(format!("scene{i}.json"));
        io::save_scene(&scene, &path).map_err(e)?;
        ensure(io::load_scene(&path).map_err(e)? == scene, "scene")?;

        let set = SceneGraspSet {
            grasps: (0..rng.gen_range(0..20))
                .map(|_| {
                    let mut g = GraspPose::new(
                        RotationMatrix::random(&mut rng),
                        Vec3::new(rng.gen(), rng.gen(), rng.gen()),
                        rng.gen::<f32>() as f64 * 0.1,
                        0.02,
                    );
                    g.score = rng.gen_range(1..=10) as f64 / 10.0;
                    g.confidence = g.score;
                    g.object_id = Some(rng.gen_range(1..4));
                    SceneGrasp {
                        grasp: g,
                        flag: LabelFlag::Positive,
                    }
                })
                .collect(),
        };
        ensure(io::decode_scene_grasps(&io::encode_scene_grasps(&set).map_err(e)?).map_err(e)? == set, "scene grasps")?;

        let preds: Vec<io::Prediction> = (0..rng.gen_range(0..30))
            .map(|_| io::Prediction {
                rotation: RotationMatrix::random(&mut rng),
                translation: Vec3::new(rng.gen(), rng.gen(), rng.gen()),
                width: rng.gen_range(0.01..0.1),
                confidence: rng.gen(),
            })
            .collect();
        ensure(io::parse_predictions_json(&io::write_predictions_json(&preds)).map_err(e)? == preds, "JSON predictions")?;
        ensure(io::parse_predictions_csv(&io::write_predictions_csv(&preds)).map_err(e)? == preds, "CSV predictions")?;

        let audit: Vec<GraspAudit> = (0..rng.gen_range(0..60))
            .map(|rank| {
                let star = rng.gen_range(1..=11);
                GraspAudit {
                    rank,
                    input_index: rank,
                    confidence: rng.gen(),
                    object_id: Some(rng.gen_range(1..5)),
                    collision: false,
                    mu_star: (star <= 10).then_some(star as f64 / 10.0),
                    verdicts: (1..=5).map(|k| star <= k).collect(),
                }
            })
            .collect();
        let report = graspbench::evaluation::report_from_audits(audit.len(), audit, &EVAL_MUS);
        ensure(io::decode_report(&io::encode_report(&report)).map_err(e)? == report, "report")?;

        let ft = rng.gen_range(0.002..0.02);
        let gripper = GripperModel {
            max_width: 2.0 * ft + rng.gen_range(0.01..0.2),
            finger_length: rng.gen_range(0.01..0.1),
            finger_height: rng.gen_range(0.005..0.05),
            finger_thickness: ft,
            base_depth: rng.gen_range(0.005..0.05),
            width_clearance: rng.gen_range(0.001..0.02),
        };
        ensure(io::parse_gripper_profile(&io::write_gripper_profile(&gripper)).map_err(e)? == gripper, "gripper text")?;
        ensure(io::parse_gripper_profile(&io::gripper_profile_json(&gripper)).map_err(e)? == gripper, "gripper JSON")?;

        let mut manifest = io::Manifest::new(".");
        let mesh_name = format!("mesh{i}.obj");
        io::save_mesh(&mesh, &dir.path().join(&mesh_name)).map_err(e)?;
        manifest.objects.push(io::ObjectEntry {
            id: rng.gen_range(1..100),
            mesh: mesh_name,
            labels: None,
        });
        manifest.scenes.push(io::SceneEntry {
            id: format!("scene-{i}"),
            path: format!("scene{i}.json"),
        });
        let mpath = dir.path().join(format!("manifest{i}.json"));
        io::save_manifest(&manifest, &mpath).map_err(e)?;
        ensure(io::load_manifest(&mpath).map_err(e)? == manifest, "manifest")?;
    }
    formats.extend([
        "OBJ", "PLY", "cloud", "labels.bin", "labels.json", "scene", "scene grasps", "predictions.json",
        "predictions.csv", "report", "gripper", "manifest",
    ]);
    Ok(format!("100 random instances each: {}", formats.join(", ")))
}

#[test]
fn acceptance() {
    say(String::new());
    let mut outcomes = Vec::new();
    outcomes.push(run("force-closure wedge closed form", false, wedge_scores));
    outcomes.push(run("sphere through-center score", false, sphere_scores));
    outcomes.push(run("pose propagation round trip", false, pose_round_trip));
    outcomes.push(run("label frame invariance", false, frame_invariance));

    let pipeline = build_pipeline();
    let mut reports = Vec::new();
    outcomes.push(run("NMS contract", false, || nms_contract(&pipeline.scene)));
    outcomes.push(run("self-evaluation", false, || self_evaluation(&pipeline, &mut reports)));
    outcomes.push(run("AP oracle equivalence", false, || ap_oracle(&mut reports)));
    outcomes.push(run("mu monotonicity", false, || mu_monotonicity(&pipeline, &mut reports)));
    outcomes.push(run("label ratio (soft)", true, || label_ratio(&pipeline)));
    outcomes.push(run("rectangle metric", false, rectangles));
    outcomes.push(run("codec round trips", false, codecs));

    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass && !o.soft).map(|o| o.name).collect();
    let warned = outcomes.iter().filter(|o| !o.pass && o.soft).count();
    say(format!(
        "acceptance: {} passed, {} failed, {} warnings",
        outcomes.iter().filter(|o| o.pass).count(),
        failed.len(),
        warned
    ));
    for o in outcomes.iter().filter(|o| !o.pass) {
        eprintln!("{}: {}", o.name, o.detail);
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
