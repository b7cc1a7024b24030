//! Margin losses, their gradients, the symmetry condition, and the
//! class-conditional correction.
//!
//! Every loss here is a function of the margin `u = y * f(x)` alone. A loss
//! is *symmetric* when `L(u) + L(-u) = K` for a fixed constant `K`; risk
//! minimization under such a loss is unaffected by uniform label flips,
//! which is what makes these losses noise tolerant. The bounded non-convex
//! kinds (sigmoid, ramp, probit) carry a steepness `beta` controlling how
//! closely they approximate the 0-1 step.

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// The supported loss shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    ZeroOne,
    Sigmoid,
    Ramp,
    Probit,
    Hinge,
    Square,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::ZeroOne => "zero-one",
            LossKind::Sigmoid => "sigmoid",
            LossKind::Ramp => "ramp",
            LossKind::Probit => "probit",
            LossKind::Hinge => "hinge",
            LossKind::Square => "square",
        }
    }

    /// Whether this kind takes a steepness parameter.
    pub fn uses_beta(self) -> bool {
        matches!(self, LossKind::Sigmoid | LossKind::Ramp | LossKind::Probit)
    }
}

/// Validated margin value, guaranteed finite.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Margin<S>(S);

impl<S: Real> Margin<S> {
    pub fn new(u: S) -> Result<Self> {
        if u.is_finite() {
            Ok(Margin(u))
        } else {
            Err(Error::NonFinite("margin"))
        }
    }

    /// Margin of a sample: `y * f(x)`.
    pub fn of(decision: S, y: Label) -> Result<Self> {
        Self::new(y.signum::<S>() * decision)
    }

    pub fn value(self) -> S {
        self.0
    }

    /// The margin the same decision value has under the opposite label.
    pub fn flipped(self) -> Self {
        Margin(-self.0)
    }
}

/// A margin loss with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Loss<S> {
    kind: LossKind,
    /// Steepness; meaningful for sigmoid/ramp/probit, fixed to 1 otherwise.
    beta: S,
}

impl<S: Real> Loss<S> {
    pub fn new(kind: LossKind, beta: Option<S>) -> Result<Self> {
        let beta = match (kind.uses_beta(), beta) {
            (true, Some(b)) => {
                if !(b.is_finite() && b > S::zero()) {
                    return Err(Error::InvalidParameter(format!(
                        "beta must be a positive finite real, got {b}"
                    )));
                }
                b
            }
            (true, None) => {
                return Err(Error::InvalidParameter(format!(
                    "{} loss requires beta",
                    kind.name()
                )))
            }
            (false, _) => S::one(),
        };
        Ok(Self { kind, beta })
    }

    pub fn zero_one() -> Self {
        Self { kind: LossKind::ZeroOne, beta: S::one() }
    }

    pub fn sigmoid(beta: S) -> Result<Self> {
        Self::new(LossKind::Sigmoid, Some(beta))
    }

    pub fn ramp(beta: S) -> Result<Self> {
        Self::new(LossKind::Ramp, Some(beta))
    }

    pub fn probit(beta: S) -> Result<Self> {
        Self::new(LossKind::Probit, Some(beta))
    }

    pub fn hinge() -> Self {
        Self { kind: LossKind::Hinge, beta: S::one() }
    }

    pub fn square() -> Self {
        Self { kind: LossKind::Square, beta: S::one() }
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn beta(&self) -> S {
        self.beta
    }

    /// Loss value at a margin.
    ///
    /// Zero-one counts a margin of exactly zero as a full loss, so a zero
    /// decision value is an error for both labels.
    pub fn evaluate(&self, margin: Margin<S>) -> S {
        let u = margin.value();
        match self.kind {
            LossKind::ZeroOne => {
                if u <= S::zero() {
                    S::one()
                } else {
                    S::zero()
                }
            }
            LossKind::Sigmoid => S::one() / (S::one() + (self.beta * u).exp()),
            LossKind::Ramp => {
                let v = self.beta * u;
                pos_part(S::one() - v) - pos_part(-S::one() - v)
            }
            LossKind::Probit => S::one() - (self.beta * u).normal_cdf(),
            LossKind::Hinge => pos_part(S::one() - u),
            LossKind::Square => {
                let d = S::one() - u;
                d * d
            }
        }
    }

    /// Derivative of the loss with respect to the margin.
    ///
    /// Hinge and ramp return the midpoint subgradient at their kinks, which
    /// keeps stochastic training deterministic. Zero-one has no usable
    /// gradient and errors.
    pub fn gradient(&self, margin: Margin<S>) -> Result<S> {
        let u = margin.value();
        match self.kind {
            LossKind::ZeroOne => Err(Error::GradientUndefined("zero-one")),
            LossKind::Sigmoid => {
                let l = self.evaluate(margin);
                Ok(-self.beta * l * (S::one() - l))
            }
            LossKind::Ramp => {
                let v = self.beta * u;
                let half = S::of(0.5);
                Ok(if v.abs() < S::one() {
                    -self.beta
                } else if v.abs() == S::one() {
                    -self.beta * half
                } else {
                    S::zero()
                })
            }
            LossKind::Probit => Ok(-self.beta * (self.beta * u).normal_pdf()),
            LossKind::Hinge => {
                let half = S::of(0.5);
                Ok(if u < S::one() {
                    -S::one()
                } else if u == S::one() {
                    -half
                } else {
                    S::zero()
                })
            }
            LossKind::Square => Ok(-S::of(2.0) * (S::one() - u)),
        }
    }

    /// The constant `K` with `L(u) + L(-u) = K`, when one exists.
    pub fn symmetry_constant(&self) -> Option<S> {
        match self.kind {
            LossKind::ZeroOne | LossKind::Sigmoid | LossKind::Probit => Some(S::one()),
            LossKind::Ramp => Some(S::of(2.0)),
            LossKind::Hinge | LossKind::Square => None,
        }
    }

    /// Checks `L(u) + L(-u) = K` on every probe margin. Losses without a
    /// symmetry constant return false.
    pub fn verify_symmetry(&self, probe_margins: &[S], tol: S) -> bool {
        assert!(!probe_margins.is_empty(), "probe margin list must be nonempty");
        assert!(tol > S::zero(), "tolerance must be positive");
        let Some(k) = self.symmetry_constant() else {
            return false;
        };
        probe_margins.iter().all(|&u| {
            let (Ok(m), Ok(fm)) = (Margin::new(u), Margin::new(-u)) else {
                return false;
            };
            (self.evaluate(m) + self.evaluate(fm) - k).abs() <= tol
        })
    }
}

fn pos_part<S: Real>(a: S) -> S {
    if a > S::zero() {
        a
    } else {
        S::zero()
    }
}

/// Loss reweighted for class-conditional noise: the negative-label branch
/// is scaled by `k = (1 - eta_pos + eta_neg) / (1 - eta_neg + eta_pos)`, so
/// that minimizing the reweighted risk on data with per-class flip rates
/// `(eta_pos, eta_neg)` recovers the clean-risk minimizer of the base loss.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectedLoss<S> {
    base: Loss<S>,
    k: S,
}

impl<S: Real> CorrectedLoss<S> {
    pub fn base(&self) -> &Loss<S> {
        &self.base
    }

    /// The negative-branch weight.
    pub fn k(&self) -> S {
        self.k
    }

    /// `l(f(x), y)` expressed through the margin of `(f(x), y)`.
    pub fn evaluate(&self, margin: Margin<S>, label: Label) -> S {
        match label {
            Label::Pos => self.base.evaluate(margin),
            Label::Neg => self.k * self.base.evaluate(margin),
        }
    }
}

/// Builds the class-conditional corrected loss for flip rates
/// `eta_pos` (on `+1` labels) and `eta_neg` (on `-1` labels).
pub fn cc_correct<S: Real>(base: Loss<S>, eta_pos: S, eta_neg: S) -> Result<CorrectedLoss<S>> {
    if base.symmetry_constant().is_none() {
        return Err(Error::NotSymmetric(base.kind().name()));
    }
    let half = S::of(0.5);
    for (name, eta) in [("eta_pos", eta_pos), ("eta_neg", eta_neg)] {
        if !(eta >= S::zero() && eta < half) {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie in [0, 0.5), got {eta}"
            )));
        }
    }
    if eta_pos + eta_neg >= S::one() {
        return Err(Error::InvalidParameter(format!(
            "eta_pos + eta_neg must be below 1, got {}",
            eta_pos + eta_neg
        )));
    }
    let k = (S::one() - eta_pos + eta_neg) / (S::one() - eta_neg + eta_pos);
    Ok(CorrectedLoss { base, k })
}
