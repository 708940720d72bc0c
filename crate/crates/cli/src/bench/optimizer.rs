//! Gradient descent over object-2 pose (optionally both poses) with the
//! decaying step schedule and normalized updates.

use std::time::Instant;

use diffwitness_core::gradient::{
    grad_analytical_at, grad_finite_difference, grad_rs0, grad_smoothed_at, LossConfig, SceneTask,
    TaskGradient, TauMode, FD_ROT_STEP, RS0_SAMPLES, RS0_SIGMA,
};
use diffwitness_core::math::Vec3;
use diffwitness_core::random::derive_seed;
use diffwitness_core::se3::{exp_map, Pose, Twist};
use diffwitness_core::smoothing::{SamplingConfig, ScoreKind, SmoothingConfig};

use super::{BenchScene, TaskSpec};

/// Gradient estimator under benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Distance-based first-order smoothing (the primary scheme).
    Ours,
    /// Vertex–face analytical derivatives at the forward witnesses.
    Analytical,
    /// Central finite differences through full forward queries.
    FiniteDifference,
    /// Zeroth-order Gaussian randomized smoothing.
    Rs0,
    /// Direction-based first-order smoothing (prior-work baseline).
    Rs1Dir,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Ours => "ours",
            Method::Analytical => "analytical",
            Method::FiniteDifference => "fd",
            Method::Rs0 => "rs0",
            Method::Rs1Dir => "rs1_dir",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Some(match s {
            "ours" => Method::Ours,
            "analytical" => Method::Analytical,
            "fd" | "finite_difference" => Method::FiniteDifference,
            "rs0" => Method::Rs0,
            "rs1_dir" | "rs1-dir" => Method::Rs1Dir,
            _ => return None,
        })
    }

    fn score(&self) -> ScoreKind {
        match self {
            Method::Rs1Dir => ScoreKind::Direction,
            _ => ScoreKind::Distance,
        }
    }
}

/// How raw gradient twists become update steps.
///
/// Early iterations see gradients far above the reference scale and get
/// unit-normalized steps (the exploration the decaying schedule is built
/// around); near convergence the gradient falls below the reference and the
/// update degrades gracefully into plain gradient descent, so steps shrink
/// with the residual instead of dithering at the schedule floor. Full
/// normalization (always-unit) is kept for ablation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GradNorm {
    /// Per-block normalization against reference magnitudes: scale to unit
    /// when `‖g‖ > reference`, otherwise apply `g / reference`.
    ClipScaled { omega_ref: f64, v_ref: f64 },
    /// Always scale ω and v each to unit norm.
    UnitSplit,
    /// Always scale the joint 6-vector to unit norm.
    UnitJoint,
}

impl Default for GradNorm {
    fn default() -> Self {
        GradNorm::ClipScaled {
            omega_ref: DEFAULT_OMEGA_REF,
            v_ref: DEFAULT_V_REF,
        }
    }
}

/// Reference gradient magnitudes separating the exploration regime from the
/// descent regime.
pub const DEFAULT_OMEGA_REF: f64 = 1e-3;
pub const DEFAULT_V_REF: f64 = 1e-1;

impl GradNorm {
    pub fn label(&self) -> &'static str {
        match self {
            GradNorm::ClipScaled { .. } => "clip",
            GradNorm::UnitSplit => "unit_split",
            GradNorm::UnitJoint => "unit_joint",
        }
    }

    pub fn parse(s: &str) -> Option<GradNorm> {
        Some(match s {
            "clip" => GradNorm::default(),
            "unit_split" | "unit" => GradNorm::UnitSplit,
            "unit_joint" => GradNorm::UnitJoint,
            _ => return None,
        })
    }

    fn apply(&self, xi: Twist) -> (Vec3, Vec3) {
        const TINY: f64 = 1e-12;
        match *self {
            GradNorm::ClipScaled { omega_ref, v_ref } => {
                let wn = xi.omega.norm();
                let vn = xi.v.norm();
                (
                    xi.omega / flt_max(wn, omega_ref),
                    xi.v / flt_max(vn, v_ref),
                )
            }
            GradNorm::UnitSplit => {
                let wn = xi.omega.norm();
                let vn = xi.v.norm();
                (
                    if wn > TINY { xi.omega / wn } else { xi.omega },
                    if vn > TINY { xi.v / vn } else { xi.v },
                )
            }
            GradNorm::UnitJoint => {
                let n = xi.norm();
                if n > TINY {
                    (xi.omega / n, xi.v / n)
                } else {
                    (xi.omega, xi.v)
                }
            }
        }
    }
}

fn flt_max(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

#[derive(Clone, Debug)]
pub struct OptimizerConfig {
    pub iterations: usize,
    /// `(start_iteration, rotation_step)` breakpoints, ascending.
    pub schedule: Vec<(usize, f64)>,
    /// `s_t = translation_ratio · s_r`.
    pub translation_ratio: f64,
    pub method: Method,
    pub sampling: SamplingConfig,
    pub use_eg: bool,
    pub optimize_t1: bool,
    pub loss: LossConfig,
    pub tau_mode: TauMode,
    pub normalization: GradNorm,
    pub fd_h_rot: f64,
    pub rs0_sigma: f64,
    pub rs0_samples: usize,
    pub early_exit_loss: f64,
    /// Fixed direction-score temperature for the rs1_dir baseline, as a
    /// fraction of the mean shape diagonal.
    pub direction_tau_scale: f64,
    /// Below this loss, steps shrink by `√(loss/threshold)` so a converged
    /// state is a fixed point of the iteration rather than something the
    /// schedule-floor steps kick back out of. Zero disables the damp.
    pub plateau_damp_loss: f64,
}

impl OptimizerConfig {
    /// Paper-protocol defaults: 2000 iterations, rotation step 10 → 1 → 0.1
    /// at 200 and 1800, translation at 1/100 of rotation.
    pub fn for_method(method: Method) -> Self {
        let sampling = match method {
            Method::Rs1Dir => SamplingConfig::neighbor(5, 15),
            _ => SamplingConfig::adaptive(),
        };
        OptimizerConfig {
            iterations: 2000,
            schedule: vec![(0, 10.0), (200, 1.0), (1800, 0.1)],
            translation_ratio: 0.01,
            method,
            sampling,
            use_eg: true,
            optimize_t1: false,
            loss: LossConfig::default(),
            tau_mode: TauMode::StopGradient,
            normalization: GradNorm::default(),
            fd_h_rot: FD_ROT_STEP,
            rs0_sigma: RS0_SIGMA,
            rs0_samples: RS0_SAMPLES,
            early_exit_loss: 1e-14,
            direction_tau_scale: 0.005,
            // The damp stabilizes the primary method's endgame at flat
            // contacts; the reference baselines have no analogous mechanism
            // and run the pure schedule so their documented sensitivities
            // stay observable.
            plateau_damp_loss: match method {
                Method::Ours => 1e-5,
                _ => 0.0,
            },
        }
    }

    pub fn rotation_step(&self, iter: usize) -> f64 {
        let mut step = self
            .schedule
            .first()
            .map(|&(_, s)| s)
            .unwrap_or(1.0);
        for &(start, s) in &self.schedule {
            if iter >= start {
                step = s;
            }
        }
        step
    }

    /// Rescale the schedule to a different initial rotation step, keeping
    /// the decay factors.
    pub fn with_initial_step(&self, s_r: f64) -> Self {
        let base = self.schedule.first().map(|&(_, s)| s).unwrap_or(1.0);
        let mut out = self.clone();
        for (_, s) in &mut out.schedule {
            *s *= s_r / base;
        }
        out
    }
}

/// Per-task optimization trace.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub task_id: usize,
    pub method: &'static str,
    pub final_loss: f64,
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub fwd_nanos: u64,
    pub bwd_nanos: u64,
    pub converged: bool,
    pub forward_failures: usize,
}

impl RunRecord {
    pub fn failed(task_id: usize, method: &'static str) -> Self {
        RunRecord {
            task_id,
            method,
            final_loss: f64::INFINITY,
            trace: Vec::new(),
            iterations: 0,
            fwd_nanos: 0,
            bwd_nanos: 0,
            converged: false,
            forward_failures: 0,
        }
    }
}

/// Outcome of one optimizer step (timings in nanoseconds).
pub struct StepInfo {
    pub loss: f64,
    pub fwd_nanos: u64,
    pub bwd_nanos: u64,
    pub forward_converged: bool,
}

/// Live optimizer state; `measure_runtime` drives it directly for
/// per-iteration timing samples.
pub struct TaskRun<'a> {
    pub scene: &'a BenchScene,
    pub cfg: &'a OptimizerConfig,
    pub task: &'a TaskSpec,
    pub t1: Pose,
    pub t2: Pose,
    pub iter: usize,
}

impl<'a> TaskRun<'a> {
    pub fn new(scene: &'a BenchScene, task: &'a TaskSpec, cfg: &'a OptimizerConfig) -> Self {
        TaskRun {
            scene,
            cfg,
            task,
            t1: task.t1,
            t2: task.t2_init,
            iter: 0,
        }
    }

    fn scene_task(&self) -> SceneTask<'a> {
        SceneTask {
            shape1: &self.scene.shape1,
            shape2: &self.scene.shape2,
            bank1: &self.scene.bank1,
            bank2: &self.scene.bank2,
            target1_local: self.task.target1_local,
            target2_local: self.task.target2_local,
            loss: self.cfg.loss,
        }
    }

    /// Loss at the current poses (forward witnesses, no smoothing).
    pub fn current_loss(&self) -> f64 {
        self.scene_task().forward_loss(&self.t1, &self.t2)
    }

    /// One forward + backward + update cycle.
    pub fn step(&mut self) -> StepInfo {
        let cfg = self.cfg;
        let task = self.scene_task();
        let mut s_r = cfg.rotation_step(self.iter);
        let mut s_t = s_r * cfg.translation_ratio;

        let fwd_start = Instant::now();
        let forward = task.forward(&self.t1, &self.t2);
        let (tw1, tw2) = task.targets_world(&self.t1, &self.t2);
        let (loss_val, _, _) = diffwitness_core::gradient::loss(
            forward.x1_world,
            forward.x2_world,
            tw1,
            tw2,
            &cfg.loss,
        );
        let fwd_nanos = fwd_start.elapsed().as_nanos() as u64;

        if cfg.plateau_damp_loss > 0.0 && loss_val < cfg.plateau_damp_loss {
            let damp = (loss_val / cfg.plateau_damp_loss).sqrt();
            s_r *= damp;
            s_t *= damp;
        }

        let bwd_start = Instant::now();
        let grad = self.estimate_gradient(&task, &forward);
        let bwd_nanos = bwd_start.elapsed().as_nanos() as u64;

        if let Some(grad) = grad {
            if grad.is_finite() {
                if cfg.optimize_t1 {
                    self.t1 = apply_step(&self.t1, grad.xi1, s_r, s_t, cfg.normalization);
                    self.t2 = apply_step(&self.t2, grad.xi2, s_r, s_t, cfg.normalization);
                } else {
                    self.t2 = apply_step(&self.t2, grad.xi2_total, s_r, s_t, cfg.normalization);
                }
            }
        }
        self.iter += 1;

        StepInfo {
            loss: loss_val,
            fwd_nanos,
            bwd_nanos,
            forward_converged: forward.converged,
        }
    }

    fn estimate_gradient(
        &self,
        task: &SceneTask<'a>,
        forward: &diffwitness_core::narrowphase::WitnessResult,
    ) -> Option<TaskGradient> {
        let cfg = self.cfg;
        match cfg.method {
            Method::Ours | Method::Rs1Dir => {
                let smooth_cfg = SmoothingConfig {
                    sampling: cfg.sampling,
                    score: cfg.method.score(),
                    seed: derive_seed(self.task.seed, 0x60_0000 + self.iter as u64),
                    direction_tau: match cfg.method {
                        Method::Rs1Dir => {
                            Some(cfg.direction_tau_scale * self.scene.diag_sum() * 0.5)
                        }
                        _ => None,
                    },
                };
                grad_smoothed_at(
                    task,
                    &self.t1,
                    &self.t2,
                    forward,
                    &smooth_cfg,
                    cfg.tau_mode,
                    cfg.use_eg,
                    cfg.optimize_t1,
                )
                .ok()
                .map(|(g, _)| g)
            }
            Method::Analytical => Some(
                grad_analytical_at(task, &self.t1, &self.t2, forward, cfg.use_eg, cfg.optimize_t1)
                    .0,
            ),
            Method::FiniteDifference => {
                let h_trans = cfg.fd_h_rot * self.scene.diag_sum() * 0.5;
                Some(grad_finite_difference(
                    task,
                    &self.t1,
                    &self.t2,
                    cfg.fd_h_rot,
                    h_trans,
                    cfg.use_eg,
                    cfg.optimize_t1,
                ))
            }
            Method::Rs0 => Some(grad_rs0(
                task,
                &self.t1,
                &self.t2,
                cfg.rs0_sigma,
                cfg.rs0_samples,
                derive_seed(self.task.seed, 0x50_0000 + self.iter as u64),
                cfg.use_eg,
                cfg.optimize_t1,
            )),
        }
    }
}

fn apply_step(pose: &Pose, xi: Twist, s_r: f64, s_t: f64, norm: GradNorm) -> Pose {
    let (omega, v) = norm.apply(xi);
    let step = Twist::new(omega * -s_r, v * -s_t);
    pose.compose(&exp_map(step))
}

/// Run one task to completion.
pub fn optimize_task(scene: &BenchScene, task: &TaskSpec, cfg: &OptimizerConfig) -> RunRecord {
    let mut run = TaskRun::new(scene, task, cfg);
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    let mut fwd_nanos = 0u64;
    let mut bwd_nanos = 0u64;
    let mut forward_failures = 0usize;
    let mut steps = 0usize;

    for _ in 0..cfg.iterations {
        let info = run.step();
        trace.push(info.loss);
        fwd_nanos += info.fwd_nanos;
        bwd_nanos += info.bwd_nanos;
        if !info.forward_converged {
            forward_failures += 1;
        }
        steps += 1;
        if info.loss < cfg.early_exit_loss {
            break;
        }
    }
    let final_loss = run.current_loss();
    trace.push(final_loss);

    RunRecord {
        task_id: task.id,
        method: cfg.method.label(),
        final_loss,
        trace,
        iterations: steps,
        fwd_nanos,
        bwd_nanos,
        converged: final_loss < 1e-6,
        forward_failures,
    }
}
