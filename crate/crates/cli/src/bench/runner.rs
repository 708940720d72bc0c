//! Task-parallel execution and runtime measurement.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::{optimize_task, BenchScene, OptimizerConfig, RunRecord, TaskRun, TaskSpec};

/// Worker count: explicit argument, else `DIFFWITNESS_THREADS`, else the
/// machine's parallelism.
pub fn resolve_workers(requested: Option<usize>) -> usize {
    if let Some(n) = requested {
        return n.max(1);
    }
    if let Ok(env) = std::env::var("DIFFWITNESS_THREADS") {
        if let Ok(n) = env.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Run every task, `workers`-wide. Results come back indexed by task order
/// regardless of scheduling, so worker count never changes the content. A
/// panicking task is recorded as failed (infinite loss) and the batch
/// continues.
pub fn run_batch(
    scene: &BenchScene,
    tasks: &[TaskSpec],
    cfg: &OptimizerConfig,
    workers: usize,
) -> Vec<RunRecord> {
    let slots: Vec<Mutex<Option<RunRecord>>> =
        tasks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..workers.max(1) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= tasks.len() {
                    break;
                }
                let task = &tasks[idx];
                let record = catch_unwind(AssertUnwindSafe(|| optimize_task(scene, task, cfg)))
                    .unwrap_or_else(|_| RunRecord::failed(task.id, cfg.method.label()));
                *slots[idx].lock().unwrap() = Some(record);
            });
        }
    });

    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("all tasks executed"))
        .collect()
}

/// Median per-iteration wall time per phase, in microseconds.
#[derive(Clone, Copy, Debug)]
pub struct RuntimeReport {
    pub forward_us: f64,
    pub backward_us: f64,
    pub iterations_sampled: usize,
}

/// Drive the optimizer directly and collect per-iteration timing samples,
/// excluding `warmup` iterations per task.
pub fn measure_runtime(
    scene: &BenchScene,
    tasks: &[TaskSpec],
    cfg: &OptimizerConfig,
    iterations: usize,
    warmup: usize,
) -> RuntimeReport {
    let mut fwd: Vec<u64> = Vec::new();
    let mut bwd: Vec<u64> = Vec::new();
    for task in tasks {
        let mut run = TaskRun::new(scene, task, cfg);
        for iter in 0..iterations {
            let info = run.step();
            if iter >= warmup {
                fwd.push(info.fwd_nanos);
                bwd.push(info.bwd_nanos);
            }
        }
    }
    let median = |v: &mut Vec<u64>| -> f64 {
        if v.is_empty() {
            return 0.0;
        }
        v.sort_unstable();
        v[v.len() / 2] as f64 / 1000.0
    };
    let n = fwd.len();
    RuntimeReport {
        forward_us: median(&mut fwd),
        backward_us: median(&mut bwd),
        iterations_sampled: n,
    }
}
