//! Sweep drivers: contact margin, step size, and the ablation grid.

use diffwitness_core::gradient::LossConfig;
use diffwitness_core::smoothing::SamplingConfig;

use super::{run_batch, summarize, BenchScene, Method, MetricSummary, OptimizerConfig, TaskSpec};


#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Margin,
    StepSize,
    Ablation,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Option<SweepAxis> {
        Some(match s {
            "margin" => SweepAxis::Margin,
            "step_size" | "step-size" => SweepAxis::StepSize,
            "ablation" => SweepAxis::Ablation,
            _ => return None,
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            SweepAxis::Margin => "margin",
            SweepAxis::StepSize => "step_size",
            SweepAxis::Ablation => "ablation",
        }
    }
}

/// One sweep grid cell with its summary (and the raw final losses so
/// downstream significance tests can resample them).
#[derive(Clone, Debug)]
pub struct SweepCell {
    pub axis_value: String,
    pub method: String,
    pub summary: MetricSummary,
    pub final_losses: Vec<f64>,
}

/// Scalar-axis sweeps; the same task list is reused for every grid point
/// and each method keeps its own optimizer profile.
pub fn run_sweep(
    scene: &BenchScene,
    tasks: &[TaskSpec],
    method_configs: &[OptimizerConfig],
    axis: SweepAxis,
    grid: &[f64],
    workers: usize,
) -> Vec<SweepCell> {
    assert!(!grid.is_empty(), "sweep grid must be nonempty");
    let mut cells = Vec::new();
    for base in method_configs {
        for &value in grid {
            let mut cfg = base.clone();
            match axis {
                SweepAxis::Margin => cfg.loss = LossConfig { beta: value },
                SweepAxis::StepSize => cfg = cfg.with_initial_step(value),
                SweepAxis::Ablation => panic!("ablation sweep uses run_ablation"),
            }
            let records = run_batch(scene, tasks, &cfg, workers);
            cells.push(SweepCell {
                axis_value: format!("{value}"),
                method: base.method.label().to_string(),
                summary: summarize(&records),
                final_losses: records.iter().map(|r| r.final_loss).collect(),
            });
        }
    }
    cells
}

/// One row of the ablation grid.
#[derive(Clone, Debug)]
pub struct AblationVariant {
    pub label: &'static str,
    pub method: Method,
    pub sampling: SamplingConfig,
    pub use_eg: bool,
    pub optimize_t1: bool,
}

/// Smoothing × sampling block plus the gradient-transport block.
pub fn ablation_variants(fixed_alpha: f64) -> Vec<AblationVariant> {
    let neighbor = SamplingConfig::neighbor(5, 15);
    let fixed = SamplingConfig::fixed(fixed_alpha);
    let adaptive = SamplingConfig::adaptive();
    vec![
        AblationVariant {
            label: "dir+neighbor",
            method: Method::Rs1Dir,
            sampling: neighbor,
            use_eg: true,
            optimize_t1: false,
        },
        AblationVariant {
            label: "dir+fixed",
            method: Method::Rs1Dir,
            sampling: fixed,
            use_eg: true,
            optimize_t1: false,
        },
        AblationVariant {
            label: "dir+adaptive",
            method: Method::Rs1Dir,
            sampling: adaptive,
            use_eg: true,
            optimize_t1: false,
        },
        AblationVariant {
            label: "dist+neighbor",
            method: Method::Ours,
            sampling: neighbor,
            use_eg: true,
            optimize_t1: false,
        },
        AblationVariant {
            label: "dist+fixed",
            method: Method::Ours,
            sampling: fixed,
            use_eg: true,
            optimize_t1: false,
        },
        AblationVariant {
            label: "dist+adaptive",
            method: Method::Ours,
            sampling: adaptive,
            use_eg: true,
            optimize_t1: false,
        },
        AblationVariant {
            label: "dist+joint_t1_t2",
            method: Method::Ours,
            sampling: adaptive,
            use_eg: false,
            optimize_t1: true,
        },
        AblationVariant {
            label: "dist+t2_no_eg",
            method: Method::Ours,
            sampling: adaptive,
            use_eg: false,
            optimize_t1: false,
        },
        AblationVariant {
            label: "dist+t2_eg",
            method: Method::Ours,
            sampling: adaptive,
            use_eg: true,
            optimize_t1: false,
        },
    ]
}

pub fn run_ablation(
    scene: &BenchScene,
    tasks: &[TaskSpec],
    base: &OptimizerConfig,
    workers: usize,
) -> Vec<SweepCell> {
    // Fixed-α default: a twentieth of the mean diagonal.
    let alpha = 0.05 * scene.diag_sum() * 0.5;
    ablation_variants(alpha)
        .into_iter()
        .map(|variant| {
            let mut cfg = base.clone();
            cfg.method = variant.method;
            cfg.sampling = variant.sampling;
            cfg.use_eg = variant.use_eg;
            cfg.optimize_t1 = variant.optimize_t1;
            let records = run_batch(scene, tasks, &cfg, workers);
            SweepCell {
                axis_value: variant.label.to_string(),
                method: variant.method.label().to_string(),
                summary: summarize(&records),
                final_losses: records.iter().map(|r| r.final_loss).collect(),
            }
        })
        .collect()
}
