//! Target-point-matching benchmark: task generation, the gradient-descent
//! optimizer with the decaying step schedule, metrics, sweeps, and the
//! task-parallel runner.

mod metrics;
mod optimizer;
mod runner;
mod sweep;
mod tasks;

pub use metrics::{bootstrap_acc_diff_quantile, quantile_lower, summarize, MetricSummary};
pub use optimizer::{optimize_task, GradNorm, Method, OptimizerConfig, RunRecord, TaskRun};
pub use runner::{measure_runtime, resolve_workers, run_batch, RuntimeReport};
pub use sweep::{run_ablation, run_sweep, AblationVariant, SweepAxis, SweepCell};
pub use tasks::{generate_tasks, TaskSpec};

use diffwitness_core::geom::{CompositeShape, SurfacePointBank};

/// A shape pair with its pre-sampled candidate banks; everything a batch of
/// tasks shares.
pub struct BenchScene {
    pub shape1: CompositeShape,
    pub shape2: CompositeShape,
    pub bank1: SurfacePointBank,
    pub bank2: SurfacePointBank,
    pub shape1_id: String,
    pub shape2_id: String,
}

impl BenchScene {
    pub fn new(
        shape1: CompositeShape,
        shape2: CompositeShape,
        shape1_id: &str,
        shape2_id: &str,
        bank_samples: usize,
        seed: u64,
    ) -> Self {
        let bank1 = shape1.surface_bank(bank_samples, diffwitness_core::random::derive_seed(seed, 101));
        let bank2 = shape2.surface_bank(bank_samples, diffwitness_core::random::derive_seed(seed, 202));
        BenchScene {
            shape1,
            shape2,
            bank1,
            bank2,
            shape1_id: shape1_id.to_string(),
            shape2_id: shape2_id.to_string(),
        }
    }

    /// Combined scale used for shell radii and translation steps.
    pub fn diag_sum(&self) -> f64 {
        self.shape1.diag + self.shape2.diag
    }
}
