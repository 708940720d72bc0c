use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use diffwitness::bench::{
    generate_tasks, run_ablation, run_batch, run_sweep, summarize, BenchScene, MetricSummary,
    SweepAxis,
};
use diffwitness::bench::resolve_workers;
use diffwitness::config::ExperimentConfig;
use diffwitness::gradcheck::{run_gradcheck, BLOCK_NAMES};
use diffwitness::io::{load_shape, parse_pose_arg, PoseJson};
use diffwitness::report;
use diffwitness_core::narrowphase::composite_witness;

#[derive(Parser)]
#[command(
    name = "diffwitness",
    about = "Differentiable collision detection: witness points, pose gradients, and the target-point-matching benchmark",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (overrides config and DIFFWITNESS_THREADS).
    #[arg(long)]
    workers: Option<usize>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// One forward collision query; prints the witness result as JSON.
    /// Exits 0 when separated, 10 when penetrating, 2 on load errors.
    Detect {
        shape1: String,
        shape2: String,
        /// Pose of shape 1 as JSON {"R":[9 floats],"t":[3 floats]}.
        #[arg(long)]
        pose1: Option<String>,
        #[arg(long)]
        pose2: Option<String>,
        /// Normalization diagonal for bundled shapes.
        #[arg(long, default_value_t = diffwitness::shapes::DEFAULT_DIAG)]
        diag: f64,
    },
    /// Run the target-point-matching benchmark from a config file.
    Bench(RunArgs),
    /// Run a margin, step-size, or ablation sweep from a config file.
    Sweep(RunArgs),
    /// Verify analytic Jacobians against the finite-difference oracle and
    /// the gradient-transport identity.
    Gradcheck {
        shape1: String,
        shape2: String,
        #[arg(long, default_value_t = 100)]
        probes: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = diffwitness::shapes::DEFAULT_DIAG)]
        diag: f64,
        /// Deliberately corrupt a cross-term block (self-test hook).
        #[arg(long, hide = true)]
        corrupt_cross: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Detect {
            shape1,
            shape2,
            pose1,
            pose2,
            diag,
        } => match cmd_detect(&shape1, &shape2, pose1.as_deref(), pose2.as_deref(), diag) {
            Ok(code) => code,
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::from(2)
            }
        },
        Command::Bench(args) => match cmd_bench(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::from(2)
            }
        },
        Command::Sweep(args) => match cmd_sweep(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::from(2)
            }
        },
        Command::Gradcheck {
            shape1,
            shape2,
            probes,
            seed,
            diag,
            corrupt_cross,
        } => match cmd_gradcheck(&shape1, &shape2, probes, seed, diag, corrupt_cross) {
            Ok(code) => code,
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::from(2)
            }
        },
    }
}

fn cmd_detect(
    shape1: &str,
    shape2: &str,
    pose1: Option<&str>,
    pose2: Option<&str>,
    diag: f64,
) -> Result<ExitCode> {
    let s1 = load_shape(shape1, diag)?;
    let s2 = load_shape(shape2, diag)?;
    let t1 = parse_pose_arg(pose1)?;
    let t2 = parse_pose_arg(pose2)?;
    let w = composite_witness(&s1, &t1, &s2, &t2);
    let out = json!({
        "x1_world": w.x1_world.to_array(),
        "x2_world": w.x2_world.to_array(),
        "x1_local": w.x1_local.to_array(),
        "x2_local": w.x2_local.to_array(),
        "piece1": w.piece1,
        "piece2": w.piece2,
        "signed_distance": w.signed_distance,
        "penetrating": w.penetrating,
        "normal": w.normal.to_array(),
        "converged": w.converged,
        "pose1": PoseJson::from(&t1),
        "pose2": PoseJson::from(&t2),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if w.penetrating {
        ExitCode::from(10)
    } else {
        ExitCode::SUCCESS
    })
}

fn load_scene(cfg: &ExperimentConfig, seed: u64) -> Result<BenchScene> {
    let shape1 = load_shape(&cfg.shape1, cfg.target_diag)?;
    let shape2 = load_shape(&cfg.shape2, cfg.target_diag2.unwrap_or(cfg.target_diag))?;
    Ok(BenchScene::new(
        shape1,
        shape2,
        &cfg.shape1,
        &cfg.shape2,
        cfg.bank_samples,
        seed,
    ))
}

fn cmd_bench(args: &RunArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let workers = resolve_workers(args.workers.or(cfg.workers));
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.out_dir));
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    let scene = load_scene(&cfg, seed)?;
    let tasks = generate_tasks(&scene, cfg.tasks, seed);

    let mut all_records = Vec::new();
    let mut rows: Vec<(String, MetricSummary)> = Vec::new();
    for method in cfg.parsed_methods() {
        let opt = cfg.optimizer_config(method)?;
        let records = run_batch(&scene, &tasks, &opt, workers);
        rows.push((method.label().to_string(), summarize(&records)));
        all_records.extend(records);
    }

    report::write_csv(&out_dir.join("results.csv"), &all_records)?;
    report::write_json(
        &out_dir.join("summary.json"),
        &report::bench_summary_json(&rows),
    )?;
    print!("{}", report::format_metric_table(&rows));
    println!(
        "wrote {} and {}",
        out_dir.join("results.csv").display(),
        out_dir.join("summary.json").display()
    );
    Ok(())
}

fn cmd_sweep(args: &RunArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let sweep = cfg
        .sweep
        .as_ref()
        .context("config must declare a `sweep` section for the sweep command")?;
    let axis = SweepAxis::parse(&sweep.axis).context("unknown sweep axis")?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let workers = resolve_workers(args.workers.or(cfg.workers));
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.out_dir));
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    let scene = load_scene(&cfg, seed)?;
    let tasks = generate_tasks(&scene, cfg.tasks, seed);
    let methods = cfg.parsed_methods();

    let cells = match axis {
        SweepAxis::Ablation => {
            let base = cfg.optimizer_config(methods[0])?;
            run_ablation(&scene, &tasks, &base, workers)
        }
        _ => {
            let configs = methods
                .iter()
                .map(|&m| cfg.optimizer_config(m))
                .collect::<Result<Vec<_>>>()?;
            run_sweep(&scene, &tasks, &configs, axis, &sweep.grid, workers)
        }
    };

    let rows: Vec<(String, MetricSummary)> = cells
        .iter()
        .map(|c| (format!("{}@{}", c.method, c.axis_value), c.summary))
        .collect();
    report::write_json(
        &out_dir.join("sweep.json"),
        &report::sweep_summary_json(axis.label(), &cells),
    )?;
    print!("{}", report::format_metric_table(&rows));
    println!("wrote {}", out_dir.join("sweep.json").display());
    Ok(())
}

fn cmd_gradcheck(
    shape1: &str,
    shape2: &str,
    probes: usize,
    seed: u64,
    diag: f64,
    corrupt_cross: bool,
) -> Result<ExitCode> {
    let s1 = load_shape(shape1, diag)?;
    let s2 = load_shape(shape2, diag)?;
    let report = run_gradcheck(&s1, &s2, probes, seed, corrupt_cross);
    if report.vacuous {
        eprintln!("warning: 0 probes requested; nothing was checked");
        println!("gradcheck: vacuous pass");
        return Ok(ExitCode::SUCCESS);
    }
    for (name, err) in BLOCK_NAMES.iter().zip(report.block_errors.iter()) {
        println!("{name:<10} max relative error {err:.3e}");
    }
    println!(
        "transport identity max residual {:.3e}",
        report.max_transport_residual
    );
    println!(
        "gradcheck: {} over {} probes",
        if report.pass { "PASS" } else { "FAIL" },
        report.probes_run
    );
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
