//! Linear classifiers: decision values, empirical risk, exact flip-averaged
//! risk, and stochastic gradient training with momentum and multiple starts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};
use crate::kernel::dot;
use crate::loss::{CorrectedLoss, Loss, LossKind, Margin};
use crate::noise::NoiseModel;
use crate::scalar::Real;
use crate::seed::{self, streams};

/// Affine discriminant `f(x) = w . x + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel<S> {
    pub w: Vec<S>,
    pub b: S,
}

impl<S: Real> LinearModel<S> {
    pub fn new(w: Vec<S>, b: S) -> Result<Self> {
        if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(Error::NonFinite("linear model parameters"));
        }
        Ok(Self { w, b })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { w: vec![S::zero(); dim], b: S::zero() }
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn decision(&self, x: &[S]) -> Result<S> {
        if x.len() != self.w.len() {
            return Err(Error::DimensionMismatch { expected: self.w.len(), got: x.len() });
        }
        Ok(dot(&self.w, x) + self.b)
    }

    /// Predicted label; a zero decision value yields `None`.
    pub fn predict(&self, x: &[S]) -> Result<Option<Label>> {
        Ok(Label::from_sign(self.decision(x)?))
    }
}

/// Mean loss over the dataset under the labels it carries.
pub fn empirical_risk<S: Real>(model: &LinearModel<S>, ds: &Dataset<S>, loss: &Loss<S>) -> Result<S> {
    let mut total = S::zero();
    for s in ds.iter() {
        total += loss.evaluate(Margin::of(model.decision(&s.x)?, s.y)?);
    }
    Ok(total / S::of(ds.len() as f64))
}

/// Fraction of samples with a strictly positive margin; a zero decision
/// value counts as a misclassification, matching the zero-one convention.
pub fn accuracy<S: Real>(model: &LinearModel<S>, ds: &Dataset<S>) -> Result<S> {
    let mut correct = 0usize;
    for s in ds.iter() {
        if model.decision(&s.x)? * s.y.signum::<S>() > S::zero() {
            correct += 1;
        }
    }
    Ok(S::of(correct as f64 / ds.len() as f64))
}

/// Risk under exact averaging over the label-flip distribution: each sample
/// contributes `(1 - eta_x) L(u) + eta_x L(-u)`. No sampling is involved;
/// the noise model's seed is ignored.
pub fn noisy_risk_exact<S: Real>(
    model: &LinearModel<S>,
    ds: &Dataset<S>,
    loss: &Loss<S>,
    noise: &NoiseModel<S>,
) -> Result<S> {
    let mut total = S::zero();
    for s in ds.iter() {
        let eta = noise.rate_at(s)?;
        let margin = Margin::of(model.decision(&s.x)?, s.y)?;
        total += (S::one() - eta) * loss.evaluate(margin) + eta * loss.evaluate(margin.flipped());
    }
    Ok(total / S::of(ds.len() as f64))
}

/// Exact class-conditional noisy risk of a corrected loss: each sample
/// contributes `(1 - eta_y) l(u, y) + eta_y l(-u, -y)` with the rate of its
/// clean class.
pub fn cc_noisy_risk_exact<S: Real>(
    model: &LinearModel<S>,
    ds: &Dataset<S>,
    corrected: &CorrectedLoss<S>,
    eta_pos: S,
    eta_neg: S,
) -> Result<S> {
    let mut total = S::zero();
    for s in ds.iter() {
        let eta = match s.y {
            Label::Pos => eta_pos,
            Label::Neg => eta_neg,
        };
        let margin = Margin::of(model.decision(&s.x)?, s.y)?;
        total += (S::one() - eta) * corrected.evaluate(margin, s.y)
            + eta * corrected.evaluate(margin.flipped(), s.y.flipped());
    }
    Ok(total / S::of(ds.len() as f64))
}

/// Configuration for [`train_sgd`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SgdConfig<S> {
    /// Step size at the first update.
    pub initial_step: S,
    /// Decay horizon of the schedule `step_t = initial_step / (1 + t/decay)`;
    /// `None` uses the number of training samples.
    pub decay: Option<S>,
    /// Momentum coefficient in `[0, 1)`.
    pub momentum: S,
    /// Passes over the data (each pass draws `n` samples with replacement).
    pub epochs: usize,
    /// Independent restarts; the best final iterate wins.
    pub restarts: usize,
    pub seed: u64,
}

impl<S: Real> Default for SgdConfig<S> {
    fn default() -> Self {
        Self {
            initial_step: S::of(0.1),
            decay: None,
            momentum: S::of(0.9),
            epochs: 200,
            restarts: 3,
            seed: 0,
        }
    }
}

impl<S: Real> SgdConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_step.is_finite() && self.initial_step > S::zero()) {
            return Err(Error::InvalidParameter("initial_step must be positive".into()));
        }
        if let Some(d) = self.decay {
            if !(d.is_finite() && d > S::zero()) {
                return Err(Error::InvalidParameter("decay must be positive".into()));
            }
        }
        if !(self.momentum >= S::zero() && self.momentum < S::one()) {
            return Err(Error::InvalidParameter("momentum must lie in [0, 1)".into()));
        }
        if self.restarts < 1 {
            return Err(Error::InvalidParameter("restarts must be >= 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Incremental gradient descent on the empirical risk of `loss` with a
/// decaying step size and a momentum term. Samples are drawn uniformly with
/// replacement; each restart starts from a fresh random model and the
/// iterate with the lowest final empirical risk (never worse than the best
/// initial model) is returned. Deterministic given the seed.
pub fn train_sgd<S: Real>(
    ds: &Dataset<S>,
    loss: &Loss<S>,
    cfg: &SgdConfig<S>,
) -> Result<LinearModel<S>> {
    cfg.validate()?;
    if loss.kind() == LossKind::ZeroOne {
        return Err(Error::GradientUndefined("zero-one"));
    }
    let n = ds.len();
    let d = ds.dim();
    let decay = cfg.decay.unwrap_or_else(|| S::of(n as f64));

    let mut best: Option<(S, LinearModel<S>)> = None;
    let consider = |risk: S, model: &LinearModel<S>, best: &mut Option<(S, LinearModel<S>)>| {
        if best.as_ref().is_none_or(|(r, _)| risk < *r) {
            *best = Some((risk, model.clone()));
        }
    };

    for restart in 0..cfg.restarts {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, streams::TRAINER, restart as u64));
        let scale = 1.0 / (d as f64).sqrt();
        let w: Vec<S> = (0..d)
            .map(|_| S::of(rng.random_range(-1.0..1.0) * scale))
            .collect();
        let mut model = LinearModel::new(w, S::zero())?;
        consider(empirical_risk(&model, ds, loss)?, &model, &mut best);

        let mut vel_w = vec![S::zero(); d];
        let mut vel_b = S::zero();
        let mut t = 0u64;
        for _ in 0..cfg.epochs.saturating_mul(n) {
            let i = rng.random_range(0..n);
            let x = ds.features(i);
            let y = ds.label(i).signum::<S>();
            let u = Margin::new(y * (dot(&model.w, x) + model.b))?;
            let g = loss.gradient(u)? * y;
            let step = cfg.initial_step / (S::one() + S::of(t as f64) / decay);
            for j in 0..d {
                vel_w[j] = cfg.momentum * vel_w[j] - step * g * x[j];
                model.w[j] += vel_w[j];
            }
            vel_b = cfg.momentum * vel_b - step * g;
            model.b += vel_b;
            t += 1;
        }
        if model.w.iter().all(|v| v.is_finite()) && model.b.is_finite() {
            consider(empirical_risk(&model, ds, loss)?, &model, &mut best);
        }
    }
    Ok(best.expect("at least one restart").1)
}
