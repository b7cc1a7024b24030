//! Label-noise injection: uniform, class-conditional and quadrant-based
//! non-uniform flip models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, LabeledSample};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seed::{self, streams};

/// Flip-probability specification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind<S> {
    /// Same flip rate everywhere.
    Uniform { eta: S },
    /// Per-class rates: `eta_pos` applies to `+1` labels, `eta_neg` to `-1`.
    ClassConditional { eta_pos: S, eta_neg: S },
    /// Rate chosen by the quadrant of the first two features, indexed
    /// counterclockwise: `rates[0]` for `x1 > 0, x2 > 0`, `rates[1]` for
    /// `x1 <= 0, x2 > 0`, `rates[2]` for `x1 <= 0, x2 <= 0`, `rates[3]` for
    /// `x1 > 0, x2 <= 0`. Axis points belong to the closed (`<=`) side.
    Quadrant { rates: [S; 4] },
}

impl<S: Real> NoiseKind<S> {
    fn rates(&self) -> Vec<S> {
        match self {
            NoiseKind::Uniform { eta } => vec![*eta],
            NoiseKind::ClassConditional { eta_pos, eta_neg } => vec![*eta_pos, *eta_neg],
            NoiseKind::Quadrant { rates } => rates.to_vec(),
        }
    }

    pub fn max_rate(&self) -> S {
        self.rates()
            .into_iter()
            .fold(S::zero(), |a, b| if b > a { b } else { a })
    }
}

/// A noise kind plus the seed driving its flip draws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel<S> {
    kind: NoiseKind<S>,
    pub seed: u64,
}

impl<S: Real> NoiseModel<S> {
    pub fn new(kind: NoiseKind<S>, seed: u64) -> Result<Self> {
        let half = S::of(0.5);
        for eta in kind.rates() {
            if !(eta >= S::zero() && eta < half) {
                return Err(Error::InvalidParameter(format!(
                    "noise rate must lie in [0, 0.5), got {eta}"
                )));
            }
        }
        Ok(Self { kind, seed })
    }

    pub fn uniform(eta: S, seed: u64) -> Result<Self> {
        Self::new(NoiseKind::Uniform { eta }, seed)
    }

    pub fn class_conditional(eta_pos: S, eta_neg: S, seed: u64) -> Result<Self> {
        Self::new(NoiseKind::ClassConditional { eta_pos, eta_neg }, seed)
    }

    pub fn quadrant(rates: [S; 4], seed: u64) -> Result<Self> {
        Self::new(NoiseKind::Quadrant { rates }, seed)
    }

    pub fn kind(&self) -> &NoiseKind<S> {
        &self.kind
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The flip rate the injector applies to this sample.
    pub fn rate_at(&self, sample: &LabeledSample<S>) -> Result<S> {
        match &self.kind {
            NoiseKind::Uniform { eta } => Ok(*eta),
            NoiseKind::ClassConditional { eta_pos, eta_neg } => Ok(match sample.y {
                crate::data::Label::Pos => *eta_pos,
                crate::data::Label::Neg => *eta_neg,
            }),
            NoiseKind::Quadrant { rates } => {
                if sample.x.len() < 2 {
                    return Err(Error::DimensionMismatch { expected: 2, got: sample.x.len() });
                }
                Ok(rates[quadrant_index(sample.x[0], sample.x[1])])
            }
        }
    }

    /// Flips each label independently with its rate; features untouched.
    /// The returned mask records which labels were flipped.
    pub fn inject(&self, ds: &Dataset<S>) -> Result<(Dataset<S>, Vec<bool>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(self.seed, streams::NOISE, 0));
        let mut labels = Vec::with_capacity(ds.len());
        let mut mask = Vec::with_capacity(ds.len());
        for sample in ds.iter() {
            let eta = self.rate_at(sample)?.as_f64();
            let flip = rng.random_range(0.0..1.0) < eta;
            mask.push(flip);
            labels.push(if flip { sample.y.flipped() } else { sample.y });
        }
        Ok((ds.with_labels(labels)?, mask))
    }
}

fn quadrant_index<S: Real>(x1: S, x2: S) -> usize {
    let z = S::zero();
    match (x1 > z, x2 > z) {
        (true, true) => 0,
        (false, true) => 1,
        (false, false) => 2,
        (true, false) => 3,
    }
}
