//! Kernel functions and Gram-matrix construction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Positive-semidefinite kernel `k(x, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel<S> {
    Linear,
    Polynomial { degree: u32, coef0: S },
    Gaussian { gamma: S },
}

impl<S: Real> Kernel<S> {
    pub fn linear() -> Self {
        Kernel::Linear
    }

    pub fn polynomial(degree: u32, coef0: S) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidParameter("polynomial degree must be >= 1".into()));
        }
        if !coef0.is_finite() {
            return Err(Error::NonFinite("polynomial coef0"));
        }
        Ok(Kernel::Polynomial { degree, coef0 })
    }

    /// The inhomogeneous quadratic kernel `(x . z + 1)^2`.
    pub fn quadratic() -> Self {
        Kernel::Polynomial { degree: 2, coef0: S::one() }
    }

    pub fn gaussian(gamma: S) -> Result<Self> {
        if !(gamma.is_finite() && gamma > S::zero()) {
            return Err(Error::InvalidParameter(format!(
                "gaussian gamma must be a positive finite real, got {gamma}"
            )));
        }
        Ok(Kernel::Gaussian { gamma })
    }

    /// Gaussian kernel with the default bandwidth `gamma = 1/d`.
    pub fn gaussian_for_dim(dim: usize) -> Result<Self> {
        Self::gaussian(S::of(1.0 / dim.max(1) as f64))
    }

    pub fn eval(&self, x: &[S], z: &[S]) -> Result<S> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: z.len() });
        }
        Ok(match *self {
            Kernel::Linear => dot(x, z),
            Kernel::Polynomial { degree, coef0 } => (dot(x, z) + coef0).powi(degree as i32),
            Kernel::Gaussian { gamma } => {
                let mut d2 = S::zero();
                for (&a, &b) in x.iter().zip(z) {
                    let d = a - b;
                    d2 += d * d;
                }
                (-gamma * d2).exp()
            }
        })
    }
}

pub fn dot<S: Real>(x: &[S], z: &[S]) -> S {
    debug_assert_eq!(x.len(), z.len());
    let mut s = S::zero();
    for (&a, &b) in x.iter().zip(z) {
        s += a * b;
    }
    s
}

/// Dense symmetric kernel matrix over a dataset.
#[derive(Clone, Debug)]
pub struct Gram<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Real> Gram<S> {
    /// Wraps a dense row-major `n x n` matrix; must be square and symmetric.
    pub fn from_flat(n: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: data.len() });
        }
        for i in 0..n {
            for j in 0..i {
                if (data[i * n + j] - data[j * n + i]).abs() > S::of(1e-9) {
                    return Err(Error::InvalidParameter(format!(
                        "gram matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// `G[i][j] = k(x_i, x_j)`, rows computed in parallel.
pub fn gram<S: Real>(kernel: &Kernel<S>, samples: &Dataset<S>) -> Result<Gram<S>> {
    let n = samples.len();
    let rows: Result<Vec<Vec<S>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| kernel.eval(samples.features(i), samples.features(j)))
                .collect()
        })
        .collect();
    let data = rows?.into_iter().flatten().collect();
    Ok(Gram { n, data })
}
