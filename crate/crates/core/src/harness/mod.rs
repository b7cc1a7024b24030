//! Experiment harness: declarative benchmark specs, seeded trial runs with
//! validation-based model selection, and report assembly.
//!
//! A run follows one protocol: per trial, draw a fresh stratified split,
//! corrupt the train and validation labels (never the test labels), pick
//! each method's hyperparameters by accuracy on the noisy validation part,
//! and score the selected model on the clean test part. Every random choice
//! derives from `base_seed`, so a spec reproduces bit for bit.

mod report;
mod reproduce;

pub use report::{emit, emit_table, EmitFormat, MethodResult, TableReport, TableRow, TrialOutcome, TrialReport};
pub use reproduce::{reproduce_table, ReproduceOptions, TableName};

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{self, Dataset, LoadOptions, Normalizer, SplitSpec};
use crate::dc::{train_ramp_dc, train_svm, DcConfig};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linear::{accuracy, train_sgd, SgdConfig};
use crate::loss::{Loss, LossKind};
use crate::noise::{NoiseKind, NoiseModel};
use crate::seed::{self, streams};

/// Declarative description of one benchmark experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default = "default_name")]
    pub name: String,
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Rescale features to `[-1, 1]` per trial, fitted on the noisy train
    /// split only. Recommended for kernel methods.
    #[serde(default)]
    pub normalize: bool,
}

fn default_name() -> String {
    "experiment".into()
}

fn default_trials() -> usize {
    10
}

/// Train/validation fractions of the per-trial split (seeds are derived).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SplitConfig {
    pub train_frac: f64,
    pub validation_frac_of_train: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { train_frac: 0.75, validation_frac_of_train: 0.33 }
    }
}

/// Where the samples come from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    Synth1 { n: usize },
    Synth2 { n_per_class: usize },
    Synth3 { n_neg: usize, n_pos: usize },
    Synth4 { n_neg: usize, n_pos: usize },
    Synth5 { n: usize },
    File {
        path: PathBuf,
        label_column: usize,
        positive_token: String,
        #[serde(default = "default_delimiter")]
        delimiter: char,
        #[serde(default)]
        skip_header: bool,
    },
}

fn default_delimiter() -> char {
    ','
}

impl DatasetSpec {
    pub fn materialize(&self, gen_seed: u64) -> Result<Dataset<f64>> {
        Ok(match self {
            DatasetSpec::Synth1 { n } => data::gen_synth1(*n, gen_seed),
            DatasetSpec::Synth2 { n_per_class } => data::gen_synth2(*n_per_class, gen_seed),
            DatasetSpec::Synth3 { n_neg, n_pos } => data::gen_synth3(*n_neg, *n_pos, gen_seed),
            DatasetSpec::Synth4 { n_neg, n_pos } => data::gen_synth4(*n_neg, *n_pos, gen_seed),
            DatasetSpec::Synth5 { n } => data::gen_synth5(*n, gen_seed),
            DatasetSpec::File { path, label_column, positive_token, delimiter, skip_header } => {
                data::load_delimited(
                    path,
                    &LoadOptions {
                        delimiter: *delimiter,
                        label_column: *label_column,
                        positive_token: positive_token.clone(),
                        skip_header: *skip_header,
                    },
                )?
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            DatasetSpec::Synth1 { n } => format!("synth1(n={n})"),
            DatasetSpec::Synth2 { n_per_class } => format!("synth2(n={})", 2 * n_per_class),
            DatasetSpec::Synth3 { n_neg, n_pos } => format!("synth3({n_neg}/{n_pos})"),
            DatasetSpec::Synth4 { n_neg, n_pos } => format!("synth4({n_neg}/{n_pos})"),
            DatasetSpec::Synth5 { n } => format!("synth5(n={n})"),
            DatasetSpec::File { path, .. } => {
                format!("file({})", path.file_name().map(|f| f.to_string_lossy()).unwrap_or_default())
            }
        }
    }
}

/// Noise applied to train and validation labels.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    #[default]
    None,
    Uniform { rate: f64 },
    ClassConditional { eta_pos: f64, eta_neg: f64 },
    Quadrant { rates: [f64; 4] },
}

impl NoiseSpec {
    fn model(&self, seed: u64) -> Result<Option<NoiseModel<f64>>> {
        Ok(match *self {
            NoiseSpec::None => None,
            NoiseSpec::Uniform { rate } => Some(NoiseModel::uniform(rate, seed)?),
            NoiseSpec::ClassConditional { eta_pos, eta_neg } => {
                Some(NoiseModel::class_conditional(eta_pos, eta_neg, seed)?)
            }
            NoiseSpec::Quadrant { rates } => {
                Some(NoiseModel::new(NoiseKind::Quadrant { rates }, seed)?)
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            NoiseSpec::None => "none".into(),
            NoiseSpec::Uniform { rate } => format!("uniform({rate:.2})"),
            NoiseSpec::ClassConditional { eta_pos, eta_neg } => {
                format!("cc({eta_pos:.2}/{eta_neg:.2})")
            }
            NoiseSpec::Quadrant { rates } => format!(
                "quadrant({:.2},{:.2},{:.2},{:.2})",
                rates[0], rates[1], rates[2], rates[3]
            ),
        }
    }
}

/// One entrant in the benchmark: a trainer, its loss or kernel, and the
/// hyperparameter grid searched on the validation part.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MethodSpec {
    pub name: String,
    pub trainer: TrainerKind,
    /// Loss minimized by the SGD trainer.
    #[serde(default)]
    pub loss: Option<LossKind>,
    /// Steepness grid for beta losses; ascending, ties go to the smaller value.
    #[serde(default)]
    pub beta_grid: Vec<f64>,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    /// Regularization grid for the kernel trainers.
    #[serde(default)]
    pub c_grid: Vec<f64>,
    #[serde(default)]
    pub sgd: SgdParams,
    /// Inner dual tolerance override for the kernel trainers.
    #[serde(default)]
    pub qp_tolerance: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainerKind {
    Sgd,
    Svm,
    RampDc,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SgdParams {
    pub epochs: usize,
    pub restarts: usize,
    pub initial_step: f64,
    pub momentum: f64,
}

impl Default for SgdParams {
    fn default() -> Self {
        Self { epochs: 200, restarts: 3, initial_step: 0.1, momentum: 0.9 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    Linear,
    Quadratic,
    Polynomial { degree: u32, coef0: f64 },
    Gaussian {
        /// Bandwidth; defaults to `1/dim` of the training data.
        #[serde(default)]
        gamma: Option<f64>,
    },
}

impl KernelSpec {
    fn resolve(&self, dim: usize) -> Result<Kernel<f64>> {
        Ok(match *self {
            KernelSpec::Linear => Kernel::linear(),
            KernelSpec::Quadratic => Kernel::quadratic(),
            KernelSpec::Polynomial { degree, coef0 } => Kernel::polynomial(degree, coef0)?,
            KernelSpec::Gaussian { gamma: Some(g) } => Kernel::gaussian(g)?,
            KernelSpec::Gaussian { gamma: None } => Kernel::gaussian_for_dim(dim)?,
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Quadratic => "quadratic",
            KernelSpec::Polynomial { .. } => "polynomial",
            KernelSpec::Gaussian { .. } => "gaussian",
        }
    }
}

/// Default grids from the benchmark protocol.
pub const DEFAULT_C_GRID: [f64; 4] = [10.0, 100.0, 500.0, 1000.0];
pub const BETA_GRID_UNIFORM: [f64; 2] = [2.0, 4.0];
pub const BETA_GRID_NONUNIFORM: [f64; 3] = [4.0, 8.0, 12.0];

/// The beta grid matching a noise regime: `{2, 4}` under uniform noise,
/// `{4, 8, 12}` under class-conditional or quadrant noise.
pub fn beta_grid_for(noise: &NoiseSpec) -> Vec<f64> {
    match noise {
        NoiseSpec::None | NoiseSpec::Uniform { .. } => BETA_GRID_UNIFORM.to_vec(),
        _ => BETA_GRID_NONUNIFORM.to_vec(),
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("methods list must be nonempty".into()));
        }
        for m in &self.methods {
            match m.trainer {
                TrainerKind::Sgd => {
                    let Some(kind) = m.loss else {
                        return Err(Error::InvalidParameter(format!(
                            "method {:?}: sgd trainer requires a loss",
                            m.name
                        )));
                    };
                    if kind == LossKind::ZeroOne {
                        return Err(Error::InvalidParameter(format!(
                            "method {:?}: zero-one loss cannot be trained by sgd",
                            m.name
                        )));
                    }
                    if kind.uses_beta() && m.beta_grid.is_empty() {
                        return Err(Error::InvalidParameter(format!(
                            "method {:?}: beta grid must be nonempty for {}",
                            m.name,
                            kind.name()
                        )));
                    }
                }
                TrainerKind::Svm | TrainerKind::RampDc => {
                    if m.c_grid.is_empty() {
                        return Err(Error::InvalidParameter(format!(
                            "method {:?}: C grid must be nonempty",
                            m.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Stable content hash of the spec for report provenance.
    pub fn hash(&self) -> Result<String> {
        let json = serde_json::to_string(self)?;
        let digest = Sha256::digest(json.as_bytes());
        Ok(hex_string(&digest))
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs every trial of the experiment and aggregates accuracies.
///
/// Trials execute in parallel; each derives its split, noise and trainer
/// seeds from `base_seed` and the trial index, so the report is identical
/// regardless of scheduling. Trainer failures are recorded in the affected
/// trial's outcome and do not abort the run.
pub fn run(spec: &ExperimentSpec) -> Result<TrialReport> {
    spec.validate()?;
    let ds = spec.dataset.materialize(seed::derive(spec.base_seed, streams::GEN, 0))?;

    let trial_rows: Vec<Vec<TrialOutcome>> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| run_trial(spec, &ds, trial))
        .collect::<Result<_>>()?;

    let methods = spec
        .methods
        .iter()
        .enumerate()
        .map(|(mi, m)| {
            let outcomes: Vec<TrialOutcome> =
                trial_rows.iter().map(|row| row[mi].clone()).collect();
            MethodResult::aggregate(m.name.clone(), outcomes)
        })
        .collect();

    Ok(TrialReport {
        schema_version: report::SCHEMA_VERSION,
        name: spec.name.clone(),
        spec_hash: spec.hash()?,
        base_seed: spec.base_seed,
        trials: spec.trials,
        dataset: spec.dataset.label(),
        noise: spec.noise.label(),
        methods,
    })
}

fn run_trial(spec: &ExperimentSpec, ds: &Dataset<f64>, trial: usize) -> Result<Vec<TrialOutcome>> {
    let split_spec = SplitSpec {
        train_frac: spec.split.train_frac,
        validation_frac_of_train: spec.split.validation_frac_of_train,
        seed: seed::derive(spec.base_seed, streams::TRIAL, trial as u64),
    };
    let (train, val, test) = data::split(ds, &split_spec)?;

    // Noise touches the train and validation parts only; the test labels
    // stay clean by construction.
    let (train, val) = match spec.noise.model(0)? {
        Some(model) => {
            let t = seed::derive(spec.base_seed, streams::NOISE, 2 * trial as u64);
            let v = seed::derive(spec.base_seed, streams::NOISE, 2 * trial as u64 + 1);
            let (ntrain, _) = model.with_seed(t).inject(&train)?;
            let (nval, _) = model.with_seed(v).inject(&val)?;
            (ntrain, nval)
        }
        None => (train, val),
    };

    let (train, val, test) = if spec.normalize {
        let norm = Normalizer::fit(&train);
        (norm.transform(&train)?, norm.transform(&val)?, norm.transform(&test)?)
    } else {
        (train, val, test)
    };

    spec.methods
        .iter()
        .enumerate()
        .map(|(mi, method)| {
            let t0 = Instant::now();
            let trainer_seed = seed::derive(
                spec.base_seed,
                streams::TRAINER,
                (trial as u64) << 16 | mi as u64,
            );
            let outcome = run_method(method, &train, &val, &test, trainer_seed);
            Ok(match outcome {
                Ok((acc, selected)) => TrialOutcome {
                    trial,
                    accuracy: Some(acc),
                    selected,
                    error: None,
                    seconds: t0.elapsed().as_secs_f64(),
                },
                Err(e) => TrialOutcome {
                    trial,
                    accuracy: None,
                    selected: String::new(),
                    error: Some(e.to_string()),
                    seconds: t0.elapsed().as_secs_f64(),
                },
            })
        })
        .collect()
}

/// Trains over the method's grid, selects by noisy-validation accuracy
/// (strict improvement, so earlier = smaller grid values win ties) and
/// returns the clean-test accuracy of the selected model.
fn run_method(
    method: &MethodSpec,
    train: &Dataset<f64>,
    val: &Dataset<f64>,
    test: &Dataset<f64>,
    trainer_seed: u64,
) -> Result<(f64, String)> {
    match method.trainer {
        TrainerKind::Sgd => {
            let kind = method
                .loss
                .ok_or_else(|| Error::InvalidParameter("sgd method without a loss".into()))?;
            let grid: Vec<Option<f64>> = if kind.uses_beta() {
                method.beta_grid.iter().map(|&b| Some(b)).collect()
            } else {
                vec![None]
            };
            let mut best: Option<(f64, f64, String)> = None;
            for (gi, beta) in grid.iter().enumerate() {
                let loss = Loss::new(kind, *beta)?;
                let cfg = SgdConfig {
                    initial_step: method.sgd.initial_step,
                    decay: None,
                    momentum: method.sgd.momentum,
                    epochs: method.sgd.epochs,
                    restarts: method.sgd.restarts,
                    seed: seed::derive(trainer_seed, streams::TRAINER, gi as u64),
                };
                let model = train_sgd(train, &loss, &cfg)?;
                let va = accuracy(&model, val)?;
                if best.as_ref().is_none_or(|(b, _, _)| va > *b) {
                    let ta = accuracy(&model, test)?;
                    let label = beta.map_or_else(|| "-".into(), |b| format!("beta={b}"));
                    best = Some((va, ta, label));
                }
            }
            let (_, test_acc, selected) = best.expect("nonempty grid");
            Ok((test_acc, selected))
        }
        TrainerKind::Svm | TrainerKind::RampDc => {
            let kernel_spec = method.kernel.unwrap_or(KernelSpec::Linear);
            let kernel = kernel_spec.resolve(train.dim())?;
            let mut best: Option<(f64, f64, String)> = None;
            for &c in &method.c_grid {
                let mut cfg = DcConfig::new(c, kernel)?;
                cfg.qp_tolerance = method.qp_tolerance.unwrap_or(1e-3);
                let model = match method.trainer {
                    TrainerKind::Svm => train_svm(train, &cfg)?,
                    _ => train_ramp_dc(train, &cfg)?,
                };
                let va = model.accuracy(val)?;
                if best.as_ref().is_none_or(|(b, _, _)| va > *b) {
                    let ta = model.accuracy(test)?;
                    best = Some((va, ta, format!("C={c}")));
                }
            }
            let (_, test_acc, selected) = best.expect("nonempty grid");
            Ok((test_acc, selected))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec() -> ExperimentSpec {
        ExperimentSpec {
            name: "tiny".into(),
            dataset: DatasetSpec::Synth3 { n_neg: 90, n_pos: 30 },
            noise: NoiseSpec::Uniform { rate: 0.2 },
            methods: vec![
                MethodSpec {
                    name: "sigmoid-sgd".into(),
                    trainer: TrainerKind::Sgd,
                    loss: Some(LossKind::Sigmoid),
                    beta_grid: vec![2.0, 4.0],
                    kernel: None,
                    c_grid: vec![],
                    sgd: SgdParams { epochs: 40, ..SgdParams::default() },
                    qp_tolerance: None,
                },
                MethodSpec {
                    name: "svm".into(),
                    trainer: TrainerKind::Svm,
                    loss: None,
                    beta_grid: vec![],
                    kernel: Some(KernelSpec::Linear),
                    c_grid: vec![10.0, 100.0],
                    sgd: SgdParams::default(),
                    qp_tolerance: None,
                },
            ],
            split: SplitConfig::default(),
            trials: 2,
            base_seed: 7,
            normalize: false,
        }
    }

    #[test]
    fn run_is_deterministic() {
        let spec = tiny_spec();
        let a = run(&spec).unwrap();
        let b = run(&spec).unwrap();
        // Byte-identical emitted reports; wall-clock timings are in-memory
        // only and excluded from serialization.
        assert_eq!(
            emit(&a, EmitFormat::Json).unwrap(),
            emit(&b, EmitFormat::Json).unwrap()
        );
        assert_eq!(a.methods.len(), 2);
        for m in &a.methods {
            assert_eq!(m.completed_trials, 2);
            assert!(m.mean_accuracy > 0.5, "{}: {}", m.name, m.mean_accuracy);
            assert!(m.std_accuracy >= 0.0);
        }
    }

    #[test]
    fn different_seed_changes_outcomes() {
        let mut spec = tiny_spec();
        let a = run(&spec).unwrap();
        spec.base_seed = 8;
        let b = run(&spec).unwrap();
        assert_ne!(a.spec_hash, b.spec_hash);
        let pick = |r: &TrialReport| {
            r.methods[0].outcomes.iter().map(|o| o.accuracy).collect::<Vec<_>>()
        };
        // Accuracies on this noisy problem are overwhelmingly unlikely to
        // coincide across seeds for every trial.
        assert_ne!(pick(&a), pick(&b));
    }

    #[test]
    fn validation_catches_bad_specs() {
        let mut spec = tiny_spec();
        spec.methods[0].loss = None;
        assert!(run(&spec).is_err());

        let mut spec = tiny_spec();
        spec.methods[1].c_grid.clear();
        assert!(run(&spec).is_err());

        let mut spec = tiny_spec();
        spec.trials = 0;
        assert!(run(&spec).is_err());

        let mut spec = tiny_spec();
        spec.methods[0].loss = Some(LossKind::ZeroOne);
        assert!(run(&spec).is_err());
    }

    #[test]
    fn trainer_failures_are_recorded_not_fatal() {
        let mut spec = tiny_spec();
        // A negative rate is caught by spec validation? No: rates are checked
        // at model construction inside the run, which surfaces as a run error.
        spec.methods[0].sgd.momentum = 2.0;
        let report = run(&spec).unwrap();
        let m = &report.methods[0];
        assert_eq!(m.completed_trials, 0);
        assert!(m.outcomes.iter().all(|o| o.error.is_some()));
        // The well-formed method still completed.
        assert_eq!(report.methods[1].completed_trials, 2);
    }

    #[test]
    fn spec_round_trips_through_toml_shaped_json() {
        let spec = tiny_spec();
        let json = serde_json::to_string(&spec).unwrap();
        let back: ExperimentSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec.hash().unwrap(), back.hash().unwrap());
    }
}
