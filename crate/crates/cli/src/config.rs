//! Declarative experiment configuration (single JSON file).

use anyhow::{bail, Context, Result};
use diffwitness_core::gradient::{LossConfig, TauMode};
use diffwitness_core::smoothing::{SamplingConfig, SamplingStrategy};
use serde::Deserialize;
use std::path::Path;

use crate::bench::{GradNorm, Method, OptimizerConfig, SweepAxis};

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Shape source: bundled name, `.obj` path, or composite directory.
    pub shape1: String,
    pub shape2: String,
    /// Normalization target for bundled shapes (meters).
    pub target_diag: f64,
    /// Optional distinct diagonal for shape 2 (defaults to `target_diag`).
    pub target_diag2: Option<f64>,
    /// Surface samples added to each candidate bank.
    pub bank_samples: usize,
    pub tasks: usize,
    pub seed: u64,
    pub methods: Vec<String>,
    pub iterations: usize,
    /// `(start_iteration, rotation_step)` breakpoints.
    pub schedule: Vec<(usize, f64)>,
    pub translation_ratio: f64,
    pub sampling: Option<SamplingSpec>,
    pub use_eg: bool,
    pub optimize_t1: bool,
    /// Contact margin β (meters).
    pub beta: f64,
    /// Differentiate through the adaptive temperature.
    pub tau_propagate: bool,
    /// `clip`, `unit_split`, or `unit_joint`.
    pub normalization: String,
    /// Reference gradient magnitudes for `clip` normalization.
    pub clip_omega_ref: Option<f64>,
    pub clip_v_ref: Option<f64>,
    pub fd_h_rot: f64,
    pub rs0_sigma: f64,
    pub rs0_samples: usize,
    /// Fixed direction-score temperature for the rs1_dir baseline
    /// (fraction of the mean diagonal).
    pub direction_tau_scale: f64,
    pub early_exit_loss: f64,
    /// Loss level below which steps shrink proportionally (0 disables;
    /// omit for per-method defaults).
    pub plateau_damp_loss: Option<f64>,
    pub sweep: Option<SweepSpec>,
    pub workers: Option<usize>,
    pub out_dir: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            shape1: "icosahedron".into(),
            shape2: "sphere162".into(),
            target_diag: crate::shapes::DEFAULT_DIAG,
            target_diag2: None,
            bank_samples: 512,
            tasks: 256,
            seed: 7,
            methods: vec!["ours".into()],
            iterations: 2000,
            schedule: vec![(0, 10.0), (200, 1.0), (1800, 0.1)],
            translation_ratio: 0.01,
            sampling: None,
            use_eg: true,
            optimize_t1: false,
            beta: 0.0,
            tau_propagate: false,
            normalization: "clip".into(),
            clip_omega_ref: None,
            clip_v_ref: None,
            fd_h_rot: diffwitness_core::gradient::FD_ROT_STEP,
            rs0_sigma: diffwitness_core::gradient::RS0_SIGMA,
            rs0_samples: diffwitness_core::gradient::RS0_SAMPLES,
            direction_tau_scale: 0.005,
            early_exit_loss: 1e-14,
            plateau_damp_loss: None,
            sweep: None,
            workers: None,
            out_dir: "results".into(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub strategy: String,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub k_ring: Option<usize>,
    #[serde(default)]
    pub subsample: Option<usize>,
    #[serde(default)]
    pub max_candidates: Option<usize>,
}

impl SamplingSpec {
    pub fn to_config(&self) -> Result<SamplingConfig> {
        let strategy = match self.strategy.as_str() {
            "fixed" => SamplingStrategy::Fixed {
                alpha: self.alpha.context("fixed sampling needs `alpha`")?,
            },
            "adaptive" => SamplingStrategy::Adaptive {
                epsilon: self
                    .epsilon
                    .unwrap_or(diffwitness_core::smoothing::DEFAULT_ADAPTIVE_EPSILON),
            },
            "neighbor" => SamplingStrategy::Neighbor {
                k_ring: self.k_ring.unwrap_or(5),
                subsample: self.subsample.unwrap_or(15),
            },
            other => bail!("unknown sampling strategy `{other}`"),
        };
        let mut cfg = SamplingConfig {
            strategy,
            max_candidates: self.max_candidates.unwrap_or(16),
        };
        if cfg.max_candidates < 2 {
            cfg.max_candidates = 2;
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: String,
    #[serde(default)]
    pub grid: Vec<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks == 0 {
            bail!("`tasks` must be ≥ 1");
        }
        if self.methods.is_empty() {
            bail!("`methods` must be nonempty");
        }
        for m in &self.methods {
            if Method::parse(m).is_none() {
                bail!("unknown method `{m}`");
            }
        }
        let mut last = None;
        for &(iter, step) in &self.schedule {
            if step <= 0.0 {
                bail!("schedule steps must be positive");
            }
            if let Some(prev) = last {
                if iter <= prev {
                    bail!("schedule iterations must be strictly increasing");
                }
            }
            last = Some(iter);
        }
        if GradNorm::parse(&self.normalization).is_none() {
            bail!("unknown normalization `{}`", self.normalization);
        }
        if let Some(sweep) = &self.sweep {
            let axis = SweepAxis::parse(&sweep.axis)
                .with_context(|| format!("unknown sweep axis `{}`", sweep.axis))?;
            if axis != SweepAxis::Ablation && sweep.grid.is_empty() {
                bail!("sweep grid must be nonempty");
            }
        }
        if self.beta < 0.0 {
            bail!("`beta` must be ≥ 0");
        }
        Ok(())
    }

    pub fn parsed_methods(&self) -> Vec<Method> {
        self.methods
            .iter()
            .map(|m| Method::parse(m).expect("validated"))
            .collect()
    }

    /// Full optimizer configuration for one method.
    pub fn optimizer_config(&self, method: Method) -> Result<OptimizerConfig> {
        let mut cfg = OptimizerConfig::for_method(method);
        cfg.iterations = self.iterations;
        cfg.schedule = self.schedule.clone();
        cfg.translation_ratio = self.translation_ratio;
        if let Some(spec) = &self.sampling {
            cfg.sampling = spec.to_config()?;
        }
        cfg.use_eg = self.use_eg;
        cfg.optimize_t1 = self.optimize_t1;
        cfg.loss = LossConfig { beta: self.beta };
        cfg.tau_mode = if self.tau_propagate {
            TauMode::Propagate
        } else {
            TauMode::StopGradient
        };
        cfg.normalization = GradNorm::parse(&self.normalization).expect("validated");
        if let GradNorm::ClipScaled { omega_ref, v_ref } = &mut cfg.normalization {
            if let Some(w) = self.clip_omega_ref {
                *omega_ref = w;
            }
            if let Some(v) = self.clip_v_ref {
                *v_ref = v;
            }
        }
        cfg.fd_h_rot = self.fd_h_rot;
        cfg.rs0_sigma = self.rs0_sigma;
        cfg.rs0_samples = self.rs0_samples;
        cfg.direction_tau_scale = self.direction_tau_scale;
        cfg.early_exit_loss = self.early_exit_loss;
        if let Some(damp) = self.plateau_damp_loss {
            cfg.plateau_damp_loss = damp;
        }
        Ok(cfg)
    }
}
