//! Noise-tolerant risk minimization for binary classification.
//!
//! Label noise breaks most convex-loss learners: hinge and squared-error
//! minimizers drift when training labels are flipped, while losses
//! satisfying the symmetry condition `L(u) + L(-u) = K` (zero-one, sigmoid,
//! ramp, probit) keep their clean-risk minimizer under uniform flips, and
//! with enough steepness under non-uniform flips too. This crate provides:
//!
//! - the symmetric losses with gradients and a symmetry checker ([`loss`]),
//!   plus the class-conditional reweighting that restores the clean
//!   minimizer when per-class flip rates are known;
//! - label-noise injectors for uniform, class-conditional and
//!   quadrant-based flip models ([`noise`]);
//! - synthetic dataset generators, delimited-file ingestion and stratified
//!   splitting ([`data`]);
//! - linear training by multi-start momentum SGD ([`linear`]) and kernel
//!   training of the ramp loss by a difference-of-convex loop over
//!   shifted-box dual QPs ([`dc`], [`qp`]), whose first step is the
//!   hinge-loss SVM baseline;
//! - a benchmark harness with seeded, reproducible experiment runs and
//!   side-by-side comparison tables ([`harness`]).
//!
//! Numeric code is generic over the scalar type via [`Real`] (`f32` or
//! `f64`); the aliases below pin the common double-precision case.

pub mod data;
pub mod dc;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod linear;
pub mod loss;
pub mod noise;
pub mod qp;
pub mod scalar;
pub mod seed;

pub use data::{Dataset, Label, LabeledSample, SplitSpec};
pub use error::{Error, Result};
pub use scalar::Real;

pub type Loss64 = loss::Loss<f64>;
pub type Dataset64 = data::Dataset<f64>;
pub type Kernel64 = kernel::Kernel<f64>;
pub type NoiseModel64 = noise::NoiseModel<f64>;
pub type LinearModel64 = linear::LinearModel<f64>;
pub type KernelModel64 = dc::KernelModel<f64>;
