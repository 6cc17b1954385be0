//! Subcommand implementations. Each returns `Err` for the caller to map to
//! an exit code; files that must survive a failure (partial training history)
//! are written before the error propagates.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use terrain_pointnet::analysis::{critical_points, upper_bound_points, CubeSpec};
use terrain_pointnet::datagen::{build_dataset, Dataset, Split};
use terrain_pointnet::geometry::{PointCloud, TerrainClass, NUM_CLASSES};
use terrain_pointnet::model::{
    evaluate, forward, load_checkpoint, predict, save_checkpoint, train, EvalReport, ModelSpec,
    ModelWeights, TrainConfig, TrainHistory,
};
use terrain_pointnet::{Error, Result};

use crate::ply::write_ply;
use crate::{
    AnalyzeArgs, EvalArgs, ExportArgs, GenerateArgs, SplitArg, SweepArgs, TrainArgs, VariantArg,
};

const COLOR_BASE: [u8; 3] = [128, 128, 128];
const COLOR_CRITICAL: [u8; 3] = [255, 0, 0];
const COLOR_BOUND: [u8; 3] = [70, 130, 180];

fn class_color(class: TerrainClass) -> [u8; 3] {
    match class {
        TerrainClass::LevelGround => [60, 180, 75],
        TerrainClass::UpStairs => [230, 25, 75],
        TerrainClass::DownStairs => [0, 130, 200],
    }
}

/// Missing inputs are argument errors (exit 2), not I/O failures, so they are
/// rejected before any file handle is opened.
fn require_dir(path: &Path, what: &str) -> Result<()> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!(
            "{what} directory not found: {}",
            path.display()
        )))
    }
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!(
            "{what} file not found: {}",
            path.display()
        )))
    }
}

fn load_dataset(dir: &Path) -> Result<Dataset> {
    require_dir(dir, "dataset")?;
    require_file(&dir.join("manifest.json"), "dataset manifest")?;
    Dataset::load(dir)
}

fn sample_in_range(data: &Dataset, index: usize) -> Result<()> {
    if index < data.len() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!(
            "sample index {index} out of range for {} samples",
            data.len()
        )))
    }
}

pub fn generate(args: GenerateArgs) -> Result<()> {
    let mut spec = args.profile.dataset_spec(args.seed);
    if let Some(n) = args.samples {
        spec.num_samples = n;
    }
    if let Some(p) = args.points {
        spec.points_per_sample = p;
    }
    let data = build_dataset(&spec)?;
    data.save(&args.out)?;

    let mut per_class = [0usize; NUM_CLASSES];
    let mut train_count = 0;
    for i in 0..data.len() {
        per_class[data.class(i).index()] += 1;
        if data.split(i) == Split::Train {
            train_count += 1;
        }
    }
    println!(
        "wrote {} samples of {} points to {}",
        data.len(),
        data.points_per_sample(),
        args.out.display()
    );
    println!("split: {} train / {} test", train_count, data.len() - train_count);
    for class in TerrainClass::ALL {
        println!("  {}: {}", class.name(), per_class[class.index()]);
    }
    Ok(())
}

fn build_config(
    epochs: usize,
    batch_size: usize,
    lr: f64,
    seed: u64,
    early_stop: Option<f64>,
) -> TrainConfig {
    let mut cfg = TrainConfig::new(epochs, seed);
    cfg.batch_size = batch_size;
    cfg.initial_lr = lr;
    cfg.early_stop_acc = early_stop;
    cfg
}

fn write_history(path: &Path, history: &TrainHistory) -> Result<()> {
    fs::write(path, history.to_csv())?;
    Ok(())
}

fn history_summary(history: &TrainHistory) -> String {
    let final_acc = history.final_test_acc().unwrap_or(f64::NAN);
    match history.first_epoch_reaching(0.95) {
        Some(e) => format!(
            "{} epochs, final test accuracy {final_acc}, reached 0.95 at epoch {e}",
            history.epochs.len()
        ),
        None => format!(
            "{} epochs, final test accuracy {final_acc}, never reached 0.95",
            history.epochs.len()
        ),
    }
}

pub fn train_cmd(args: TrainArgs) -> Result<()> {
    let data = load_dataset(&args.data)?;
    let spec = match args.variant {
        VariantArg::Directional => ModelSpec::directional(args.feature_length),
        VariantArg::Baseline => ModelSpec::baseline_tnet(),
    };
    let epochs = args.epochs.unwrap_or_else(|| args.profile.default_epochs());
    let cfg = build_config(epochs, args.batch_size, args.lr, args.seed, args.early_stop);

    fs::create_dir_all(&args.out)?;
    let started = Instant::now();
    match train(&spec, &data, &cfg) {
        Ok(outcome) => {
            save_checkpoint(&outcome.weights, &args.out.join("checkpoint.bin"))?;
            write_history(&args.out.join("history.csv"), &outcome.history)?;
            eprintln!("wall time: {:.1}s", started.elapsed().as_secs_f64());
            println!("trained: {}", history_summary(&outcome.history));
            println!("wrote checkpoint.bin and history.csv to {}", args.out.display());
            Ok(())
        }
        Err(Error::Diverged { epoch, history }) => {
            write_history(&args.out.join("history.csv"), &history)?;
            eprintln!(
                "training diverged at epoch {epoch}; partial history saved to {}",
                args.out.display()
            );
            Err(Error::Diverged { epoch, history })
        }
        Err(e) => Err(e),
    }
}

fn print_report(report: &EvalReport, split: SplitArg, count: usize) {
    let split_name = match split {
        SplitArg::Train => "train",
        SplitArg::Test => "test",
        SplitArg::All => "all",
    };
    println!("split: {split_name} ({count} samples)");
    println!("accuracy: {}", report.accuracy);
    println!("mean loss: {}", report.mean_loss);
    println!("confusion (rows true, columns predicted):");
    print!("{:>14}", "");
    for class in TerrainClass::ALL {
        print!("{:>14}", class.name());
    }
    println!();
    for class in TerrainClass::ALL {
        print!("{:>14}", class.name());
        for pred in TerrainClass::ALL {
            print!("{:>14}", report.confusion[class.index()][pred.index()]);
        }
        println!();
    }
}

pub fn eval(args: EvalArgs) -> Result<()> {
    let data = load_dataset(&args.data)?;
    require_file(&args.checkpoint, "checkpoint")?;
    let weights = load_checkpoint(&args.checkpoint)?;
    let (clouds, labels) = match args.split {
        SplitArg::Train => data.split_view(Split::Train),
        SplitArg::Test => data.split_view(Split::Test),
        SplitArg::All => (
            (0..data.len()).map(|i| data.cloud(i)).collect(),
            (0..data.len()).map(|i| data.class(i)).collect(),
        ),
    };
    let report = evaluate(&weights, &clouds, &labels)?;
    print_report(&report, args.split, clouds.len());
    Ok(())
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    if args.lengths.is_empty() {
        return Err(Error::InvalidParam("sweep needs at least one feature length".into()));
    }
    if let Some(bad) = args.lengths.iter().find(|&&n| n == 0) {
        return Err(Error::InvalidParam(format!("feature length must be positive, got {bad}")));
    }
    let data = load_dataset(&args.data)?;
    let epochs = args.epochs.unwrap_or_else(|| args.profile.default_epochs());
    let cfg = build_config(epochs, args.batch_size, args.lr, args.seed, args.early_stop);
    fs::create_dir_all(&args.out)?;

    let entries = terrain_pointnet::analysis::sweep_feature_length(&args.lengths, &data, &cfg)?;
    let mut first_diverged = None;
    for entry in entries {
        let path = args.out.join(format!("history_{}.csv", entry.feature_length));
        match entry.outcome {
            Ok(outcome) => {
                write_history(&path, &outcome.history)?;
                println!("length {}: {}", entry.feature_length, history_summary(&outcome.history));
            }
            Err(Error::Diverged { epoch, history }) => {
                write_history(&path, &history)?;
                eprintln!(
                    "length {}: diverged at epoch {epoch}; partial history saved",
                    entry.feature_length
                );
                if first_diverged.is_none() {
                    first_diverged = Some(Error::Diverged { epoch, history });
                }
            }
            Err(e) => return Err(e),
        }
    }
    match first_diverged {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct AnalysisReport {
    sample_index: usize,
    true_class: String,
    predicted_class: String,
    cloud_points: usize,
    feature_length: usize,
    critical_count: usize,
    /// Whether the critical subset alone reproduces the global feature
    /// bit for bit.
    feature_identity: bool,
    cube_edge: f64,
    cube_resolution: usize,
    cube_vertices: usize,
    upper_bound_count: usize,
}

fn bitwise_equal(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

/// Recomputes the global feature from the critical subset and compares it
/// bit for bit against the full cloud's feature. Runs through the public
/// batch path, independent of how the critical set was extracted.
fn check_feature_identity(
    w: &ModelWeights,
    cloud: &PointCloud<f64>,
    subset: &PointCloud<f64>,
) -> Result<bool> {
    let (full, _) = forward(w, &[cloud])?;
    let (reduced, _) = forward(w, &[subset])?;
    Ok(bitwise_equal(full.row(0), reduced.row(0)))
}

pub fn analyze(args: AnalyzeArgs) -> Result<()> {
    let data = load_dataset(&args.data)?;
    require_file(&args.checkpoint, "checkpoint")?;
    let weights = load_checkpoint(&args.checkpoint)?;
    sample_in_range(&data, args.sample)?;
    let cloud = data.cloud(args.sample);

    let critical = critical_points(&weights, cloud)?;
    let feature_identity = check_feature_identity(&weights, cloud, &critical.to_cloud())?;
    let cube = CubeSpec {
        center: None,
        edge: args.cube_edge,
        resolution: args.cube_resolution,
    };
    let bound = upper_bound_points(&weights, cloud, &cube)?;
    let predicted = predict(&weights, cloud)?;

    fs::create_dir_all(&args.out)?;
    let mut is_critical = vec![false; cloud.len()];
    for &i in &critical.indices {
        is_critical[i] = true;
    }
    let critical_vertices: Vec<([f64; 3], [u8; 3])> = cloud
        .points()
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, if is_critical[i] { COLOR_CRITICAL } else { COLOR_BASE }))
        .collect();
    write_ply(&args.out.join("critical.ply"), &critical_vertices)?;

    let mut bound_vertices: Vec<([f64; 3], [u8; 3])> =
        cloud.points().iter().map(|&p| (p, COLOR_BASE)).collect();
    bound_vertices.extend(bound.points().iter().map(|&p| (p, COLOR_BOUND)));
    write_ply(&args.out.join("upper_bound.ply"), &bound_vertices)?;

    let report = AnalysisReport {
        sample_index: args.sample,
        true_class: data.class(args.sample).name().to_string(),
        predicted_class: predicted.name().to_string(),
        cloud_points: cloud.len(),
        feature_length: weights.spec.feature_length(),
        critical_count: critical.len(),
        feature_identity,
        cube_edge: args.cube_edge,
        cube_resolution: args.cube_resolution,
        cube_vertices: cube.num_vertices(),
        upper_bound_count: bound.len(),
    };
    let mut json = serde_json::to_vec_pretty(&report)?;
    json.push(b'\n');
    fs::write(args.out.join("report.json"), json)?;

    println!(
        "sample {}: true {}, predicted {}",
        args.sample,
        data.class(args.sample).name(),
        predicted.name()
    );
    println!("critical points: {} of {}", critical.len(), cloud.len());
    println!("feature identity: {}", if feature_identity { "pass" } else { "fail" });
    println!("upper-bound points: {} of {} cube vertices", bound.len(), cube.num_vertices());
    println!(
        "wrote critical.ply, upper_bound.ply, report.json to {}",
        args.out.display()
    );
    Ok(())
}

pub fn export(args: ExportArgs) -> Result<()> {
    let data = load_dataset(&args.data)?;
    sample_in_range(&data, args.sample)?;
    let cloud = data.cloud(args.sample);
    let class = data.class(args.sample);
    let vertices: Vec<([f64; 3], [u8; 3])> =
        cloud.points().iter().map(|&p| (p, class_color(class))).collect();
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    write_ply(&args.out, &vertices)?;
    println!(
        "wrote {} points ({}) to {}",
        cloud.len(),
        class.name(),
        args.out.display()
    );
    Ok(())
}
