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

//! `graspbench` command-line tool.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use graspbench::annotation::{annotate_object, label_stats, uniform_angles, AnnotationParams, LabelFlag, LabelStats};
use graspbench::catalog::Catalog;
use graspbench::evaluation::{evaluate_scene, pose_nms, top_grasps, NmsParams};
use graspbench::io::{self, LabelFormat, Prediction};
use graspbench::scene::{annotate_scene, synthesize_scene, SceneParams, SplitTag};
use graspbench::{Error, FrictionGrid, GraspLabelSet, GripperModel, Result};

#[derive(Parser)]
#[command(name = "graspbench", version, about = "Analytic grasp annotation and grasp evaluation")]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Friction grid as start:step:stop.
    #[arg(long, global = true, default_value = "0.1:0.1:1.0")]
    mu_grid: String,
    /// Gripper profile (JSON or key = value); defaults to $GRASPBENCH_PROFILE.
    #[arg(long, global = true, env = "GRASPBENCH_PROFILE")]
    gripper: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label every grasp candidate of one object.
    AnnotateObject(AnnotateObjectArgs),
    /// Project object labels into a scene and drop colliding grasps.
    AnnotateScene(AnnotateSceneArgs),
    /// Place catalog objects on a table.
    SynthScene(SynthSceneArgs),
    /// Score predicted grasps on a scene.
    Evaluate(EvaluateArgs),
    /// Apply pose-NMS to a prediction file.
    Nms(NmsArgs),
    /// Label counts and positive:negative ratio.
    Stats(StatsArgs),
}

#[derive(Args, Clone)]
struct SamplingArgs {
    /// Grasp-point voxel size (m).
    #[arg(long, default_value_t = 0.005)]
    voxel: f64,
    /// Approach views.
    #[arg(long, default_value_t = 300)]
    views: usize,
    /// In-plane angles over [0, π).
    #[arg(long, default_value_t = 12)]
    angles: usize,
    /// Gripper depths (m), comma separated.
    #[arg(long, default_value = "0.01,0.02,0.03,0.04", value_delimiter = ',')]
    depths: Vec<f64>,
    /// Object cloud density (points per m²).
    #[arg(long, default_value_t = 1e6)]
    density: f64,
    /// Seed of the object cloud sampler.
    #[arg(long, default_value_t = 0)]
    cloud_seed: u64,
}

#[derive(Args)]
struct AnnotateObjectArgs {
    /// Mesh file (.obj or .ply).
    #[arg(long, conflicts_with = "object", required_unless_present = "object")]
    mesh: Option<PathBuf>,
    /// Built-in catalog object (id or name).
    #[arg(long)]
    object: Option<String>,
    /// Object id written into the labels (defaults to the catalog id, or 1).
    #[arg(long)]
    id: Option<u32>,
    #[arg(long)]
    out: PathBuf,
    /// json or binary; defaults from the file extension.
    #[arg(long)]
    format: Option<String>,
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Args)]
struct AnnotateSceneArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Label files; objects without one are annotated from the catalog.
    #[arg(long, value_delimiter = ',')]
    labels: Vec<PathBuf>,
    /// Directory to write computed object labels to.
    #[arg(long)]
    labels_out: Option<PathBuf>,
    /// Scene grasp set output.
    #[arg(long)]
    out: PathBuf,
    /// Keep positive grasps with at least this score.
    #[arg(long, default_value_t = 0.0)]
    min_score: f64,
    /// Also keep flagged-negative grasps.
    #[arg(long)]
    include_negatives: bool,
    /// Write the top positive grasps (by score, after NMS) as predictions.
    #[arg(long)]
    export_predictions: Option<PathBuf>,
    /// Write flagged-negative grasps (after NMS) as predictions.
    #[arg(long)]
    export_negatives: Option<PathBuf>,
    /// Number of grasps to export.
    #[arg(long, default_value_t = 50)]
    export_count: usize,
    /// Minimum score of exported positives.
    #[arg(long, default_value_t = 0.6)]
    export_min_score: f64,
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Args)]
struct SynthSceneArgs {
    /// Catalog objects (ids or names), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    objects: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    /// train, seen, similar or novel.
    #[arg(long, default_value = "train")]
    split: String,
    #[arg(long, default_value_t = 256)]
    cameras: usize,
    /// Camera distance from the table center (m).
    #[arg(long, default_value_t = 0.6)]
    camera_radius: f64,
    /// Object cloud density (points per m²).
    #[arg(long, default_value_t = 1e6)]
    density: f64,
    /// Seed of the object cloud sampler.
    #[arg(long, default_value_t = 0)]
    cloud_seed: u64,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Predictions (JSON or CSV).
    #[arg(long)]
    pred: PathBuf,
    /// th_d,th_alpha,K; append `deg` for degrees.
    #[arg(long, default_value = "0.01,5deg,10")]
    nms: String,
    /// Report output (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the AP table.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct NmsArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, default_value = "0.01,5deg,10")]
    nms: String,
    /// Output predictions (JSON or CSV by extension).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    /// Label files.
    #[arg(required = true)]
    labels: Vec<PathBuf>,
}

fn gripper(cli: &Cli) -> Result<GripperModel> {
    match &cli.gripper {
        Some(p) => io::load_gripper_profile(p),
        None => Ok(GripperModel::default()),
    }
}

fn annotation_params(s: &SamplingArgs, friction: FrictionGrid) -> AnnotationParams {
    AnnotationParams {
        voxel: s.voxel,
        views: s.views,
        angles: uniform_angles(s.angles),
        depths: s.depths.clone(),
        friction,
        cloud_density: s.density,
        cloud_seed: s.cloud_seed,
    }
}

fn print_stats(name: &str, s: &LabelStats) {
    println!(
        "{name}: positive {} negative {} collision {} empty {} ratio {}",
        s.positive, s.negative, s.collision, s.empty, s.ratio
    );
}

fn annotate_object_cmd(cli: &Cli, a: &AnnotateObjectArgs) -> Result<()> {
    let m = gripper(cli)?;
    let params = annotation_params(&a.sampling, FrictionGrid::parse(&cli.mu_grid)?);
    let (mesh, default_id) = match (&a.mesh, &a.object) {
        (Some(path), _) => {
            let loaded = io::load_mesh(path)?;
            if !loaded.degenerate_faces.is_empty() {
                eprintln!(
                    "warning: dropped {} degenerate faces: {:?}",
                    loaded.degenerate_faces.len(),
                    loaded.degenerate_faces
                );
            }
            (loaded.mesh, 1)
        }
        (None, Some(key)) => {
            let catalog = Catalog::builtin();
            let entry = catalog.resolve(key)?;
            (entry.mesh.clone(), entry.id)
        }
        (None, None) => return Err(Error::InvalidInput("either --mesh or --object is required".into())),
    };
    let labels = annotate_object(&mesh, a.id.unwrap_or(default_id), &m, &params)?;
    let format = match &a.format {
        Some(f) => f.parse()?,
        None => LabelFormat::from_path(&a.out),
    };
    io::save_labels(&labels, &a.out, format)?;
    print_stats(&a.out.display().to_string(), &label_stats(&labels));
    Ok(())
}

fn annotate_scene_cmd(cli: &Cli, a: &AnnotateSceneArgs) -> Result<()> {
    let m = gripper(cli)?;
    let params = annotation_params(&a.sampling, FrictionGrid::parse(&cli.mu_grid)?);
    let scene = io::load_scene(&a.scene)?;
    let mut labels: HashMap<u32, GraspLabelSet> = HashMap::new();
    for p in &a.labels {
        let l = io::load_labels(p)?;
        labels.insert(l.header.object_id, l);
    }
    let catalog = Catalog::builtin();
    for inst in &scene.instances {
        if labels.contains_key(&inst.object_id) {
            continue;
        }
        let entry = catalog.get(inst.object_id).ok_or_else(|| {
            Error::InvalidInput(format!("no labels given for object {} and it is not in the catalog", inst.object_id))
        })?;
        let l = annotate_object(&entry.mesh, entry.id, &m, &params)?;
        if let Some(dir) = &a.labels_out {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            io::save_labels(&l, &dir.join(format!("{}.labels", entry.id)), LabelFormat::Binary)?;
        }
        print_stats(&format!("object {} ({})", entry.id, entry.name), &label_stats(&l));
        labels.insert(inst.object_id, l);
    }
    let include_negatives = a.include_negatives || a.export_negatives.is_some();
    let set = annotate_scene(&scene, &labels, &m, a.min_score, include_negatives)?;
    io::save_scene_grasps(&set, &a.out)?;
    println!("{} scene grasps written to {}", set.len(), a.out.display());

    let nms = NmsParams::default();
    if let Some(path) = &a.export_predictions {
        let min = a.export_min_score;
        let top = top_grasps(&set, &scene, &m, &nms, a.export_count, |g| {
            g.flag == LabelFlag::Positive && g.grasp.score >= min
        });
        write_predictions(&top, &m, path)?;
    }
    if let Some(path) = &a.export_negatives {
        let top = top_grasps(&set, &scene, &m, &nms, a.export_count, |g| g.flag == LabelFlag::Negative);
        write_predictions(&top, &m, path)?;
    }
    Ok(())
}

fn write_predictions(grasps: &[graspbench::GraspPose], m: &GripperModel, path: &Path) -> Result<()> {
    let preds: Vec<Prediction> = grasps.iter().map(|g| Prediction::from_grasp(g, m)).collect();
    io::save_predictions(&preds, path)?;
    println!("{} predictions written to {}", preds.len(), path.display());
    Ok(())
}

fn synth_scene_cmd(cli: &Cli, a: &SynthSceneArgs) -> Result<()> {
    let catalog = Catalog::builtin();
    let ids = a
        .objects
        .iter()
        .map(|k| catalog.resolve(k).map(|e| e.id))
        .collect::<Result<Vec<u32>>>()?;
    let params = SceneParams {
        cameras: a.cameras,
        camera_radius: a.camera_radius,
        split_tag: a.split.parse::<SplitTag>()?,
        cloud: AnnotationParams {
            cloud_density: a.density,
            cloud_seed: a.cloud_seed,
            ..AnnotationParams::default()
        },
        ..SceneParams::default()
    };
    let scene = synthesize_scene(&ids, cli.seed, &catalog, &params)?;
    io::save_scene(&scene, &a.out)?;
    println!(
        "scene with {} objects and {} points written to {}",
        scene.instances.len(),
        scene.scene_cloud.len(),
        a.out.display()
    );
    Ok(())
}

fn load_grasps(path: &Path, m: &GripperModel) -> Result<Vec<graspbench::GraspPose>> {
    Ok(io::load_predictions(path)?.iter().map(|p| p.to_grasp(m)).collect())
}

fn evaluate_cmd(cli: &Cli, a: &EvaluateArgs) -> Result<()> {
    let m = gripper(cli)?;
    let nms: NmsParams = a.nms.parse()?;
    let scene = io::load_scene(&a.scene)?;
    let preds = load_grasps(&a.pred, &m)?;
    let report = evaluate_scene(&preds, &scene, &m, &nms);
    if let Some(out) = &a.out {
        io::save_report(&report, out)?;
    }
    if a.summary {
        print!("{}", report.summary());
    } else {
        println!("AP {:.4}", report.ap);
    }
    Ok(())
}

fn nms_cmd(cli: &Cli, a: &NmsArgs) -> Result<()> {
    let m = gripper(cli)?;
    let nms: NmsParams = a.nms.parse()?;
    let scene = io::load_scene(&a.scene)?;
    let preds = load_grasps(&a.pred, &m)?;
    let kept = pose_nms(&preds, &scene, &nms, &m);
    write_predictions(&kept, &m, &a.out)
}

fn stats_cmd(a: &StatsArgs) -> Result<()> {
    let mut all = Vec::new();
    for p in &a.labels {
        let s = label_stats(&io::load_labels(p)?);
        print_stats(&p.display().to_string(), &s);
        all.push(s);
    }
    if all.len() > 1 {
        print_stats("total", &LabelStats::combine(&all));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    FrictionGrid::parse(&cli.mu_grid)?;
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    match &cli.command {
        Command::AnnotateObject(a) => annotate_object_cmd(cli, a),
        Command::AnnotateScene(a) => annotate_scene_cmd(cli, a),
        Command::SynthScene(a) => synth_scene_cmd(cli, a),
        Command::Evaluate(a) => evaluate_cmd(cli, a),
        Command::Nms(a) => nms_cmd(cli, a),
        Command::Stats(a) => stats_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
