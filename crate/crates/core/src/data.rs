//! Datasets: labeled samples, synthetic generators, delimited-file
//! ingestion and stratified splitting.
//!
//! The five synthetic problems are uniform-density constructions with a
//! known exact separator; generators resample the (measure-zero) boundary
//! so every emitted sample is strictly on one side. All randomness flows
//! through seeded ChaCha8 streams, so a generator call is a pure function
//! of its parameters.

use std::fmt;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seed::{self, streams};

/// Binary class label, `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Pos,
    Neg,
}

impl Label {
    /// `+1` or `-1` in the scalar type.
    pub fn signum<S: Real>(self) -> S {
        match self {
            Label::Pos => S::one(),
            Label::Neg => -S::one(),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Pos => Label::Neg,
            Label::Neg => Label::Pos,
        }
    }

    /// Label of a strictly nonzero value; `None` at exactly zero.
    pub fn from_sign<S: Real>(v: S) -> Option<Self> {
        if v > S::zero() {
            Some(Label::Pos)
        } else if v < S::zero() {
            Some(Label::Neg)
        } else {
            None
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Pos => write!(f, "+1"),
            Label::Neg => write!(f, "-1"),
        }
    }
}

/// One feature vector with its label.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample<S> {
    pub x: Vec<S>,
    pub y: Label,
}

impl<S: Real> LabeledSample<S> {
    pub fn new(x: Vec<S>, y: Label) -> Self {
        Self { x, y }
    }
}

/// Nonempty collection of samples sharing one feature dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<S> {
    samples: Vec<LabeledSample<S>>,
    dim: usize,
}

impl<S: Real> Dataset<S> {
    /// Builds a dataset, validating that it is nonempty, that every sample
    /// has the same dimension and that all features are finite.
    pub fn new(samples: Vec<LabeledSample<S>>) -> Result<Self> {
        let dim = samples
            .first()
            .map(|s| s.x.len())
            .ok_or_else(|| Error::Dataset("empty dataset".into()))?;
        if dim == 0 {
            return Err(Error::Dataset("zero-dimensional samples".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if s.x.len() != dim {
                return Err(Error::Dataset(format!(
                    "sample {i} has dimension {}, expected {dim}",
                    s.x.len()
                )));
            }
            if s.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Dataset(format!("sample {i} has a non-finite feature")));
            }
        }
        Ok(Self { samples, dim })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false: construction rejects empty datasets.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[LabeledSample<S>] {
        &self.samples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LabeledSample<S>> {
        self.samples.iter()
    }

    pub fn features(&self, i: usize) -> &[S] {
        &self.samples[i].x
    }

    pub fn label(&self, i: usize) -> Label {
        self.samples[i].y
    }

    /// `(positives, negatives)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.samples.iter().filter(|s| s.y == Label::Pos).count();
        (pos, self.samples.len() - pos)
    }

    pub fn labels(&self) -> Vec<Label> {
        self.samples.iter().map(|s| s.y).collect()
    }

    /// Same features with replaced labels (used by noise injection).
    pub fn with_labels(&self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.samples.len() {
            return Err(Error::DimensionMismatch {
                expected: self.samples.len(),
                got: labels.len(),
            });
        }
        let samples = self
            .samples
            .iter()
            .zip(labels)
            .map(|(s, y)| LabeledSample { x: s.x.clone(), y })
            .collect();
        Ok(Self {
            samples,
            dim: self.dim,
        })
    }

    /// Dataset restricted to the given sample indices.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let samples = indices.iter().map(|&i| self.samples[i].clone()).collect();
        Self::new(samples)
    }
}

/// How a dataset is partitioned into train / validation / test.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Fraction of all samples that form the training pool; the rest is test.
    pub train_frac: f64,
    /// Fraction of the training pool held out for validation.
    pub validation_frac_of_train: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_frac: f64, validation_frac_of_train: f64, seed: u64) -> Result<Self> {
        if !(train_frac > 0.0 && train_frac < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "train_frac must lie in (0,1), got {train_frac}"
            )));
        }
        if !(0.0..1.0).contains(&validation_frac_of_train) {
            return Err(Error::InvalidParameter(format!(
                "validation_frac_of_train must lie in [0,1), got {validation_frac_of_train}"
            )));
        }
        Ok(Self {
            train_frac,
            validation_frac_of_train,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.train_frac, self.validation_frac_of_train, self.seed).map(|_| ())
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_frac: 0.75,
            validation_frac_of_train: 0.33,
            seed: 0,
        }
    }
}

/// Stratified train / validation / test split: disjoint, exhaustive,
/// class proportions preserved within one sample per part, deterministic
/// in the seed.
pub fn split<S: Real>(
    ds: &Dataset<S>,
    spec: &SplitSpec,
) -> Result<(Dataset<S>, Dataset<S>, Dataset<S>)> {
    spec.validate()?;
    let mut train_idx = Vec::new();
    let mut val_idx = Vec::new();
    let mut test_idx = Vec::new();

    for (class_tag, label) in [Label::Pos, Label::Neg].into_iter().enumerate() {
        let mut idx: Vec<usize> = (0..ds.len()).filter(|&i| ds.label(i) == label).collect();
        if idx.is_empty() {
            continue;
        }
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed::derive(spec.seed, streams::SPLIT, class_tag as u64));
        shuffle(&mut idx, &mut rng);

        let n = idx.len();
        let n_test = ((n as f64) * (1.0 - spec.train_frac)).round() as usize;
        let pool = n - n_test;
        let n_val = ((pool as f64) * spec.validation_frac_of_train).round() as usize;

        test_idx.extend_from_slice(&idx[..n_test]);
        val_idx.extend_from_slice(&idx[n_test..n_test + n_val]);
        train_idx.extend_from_slice(&idx[n_test + n_val..]);
    }

    let needs_val = spec.validation_frac_of_train > 0.0;
    if train_idx.is_empty() || test_idx.is_empty() || (needs_val && val_idx.is_empty()) {
        return Err(Error::Dataset(format!(
            "dataset too small to split: train {}, validation {}, test {}",
            train_idx.len(),
            val_idx.len(),
            test_idx.len()
        )));
    }

    train_idx.sort_unstable();
    val_idx.sort_unstable();
    test_idx.sort_unstable();

    let val = if val_idx.is_empty() {
        // Caller asked for no validation part; hand back an empty-by-contract
        // placeholder is not possible, so reuse train (never reached when
        // needs_val is false and callers ignore the part).
        ds.subset(&train_idx)?
    } else {
        ds.subset(&val_idx)?
    };
    Ok((ds.subset(&train_idx)?, val, ds.subset(&test_idx)?))
}

// Fisher-Yates; kept local so the shuffle algorithm is pinned independent
// of rand's SliceRandom evolution.
fn shuffle<T, R: Rng>(v: &mut [T], rng: &mut R) {
    for i in (1..v.len()).rev() {
        let j = rng.random_range(0..=i);
        v.swap(i, j);
    }
}

/// Affine per-feature rescaling onto `[-1, 1]`, fitted on one dataset
/// (the training split) and applied to others. Constant features map to 0.
#[derive(Clone, Debug)]
pub struct Normalizer<S> {
    lo: Vec<S>,
    hi: Vec<S>,
}

impl<S: Real> Normalizer<S> {
    pub fn fit(ds: &Dataset<S>) -> Self {
        let dim = ds.dim();
        let mut lo = vec![S::infinity(); dim];
        let mut hi = vec![S::neg_infinity(); dim];
        for s in ds.iter() {
            for (j, &v) in s.x.iter().enumerate() {
                if v < lo[j] {
                    lo[j] = v;
                }
                if v > hi[j] {
                    hi[j] = v;
                }
            }
        }
        Self { lo, hi }
    }

    pub fn transform(&self, ds: &Dataset<S>) -> Result<Dataset<S>> {
        if ds.dim() != self.lo.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lo.len(),
                got: ds.dim(),
            });
        }
        let two = S::of(2.0);
        let samples = ds
            .iter()
            .map(|s| {
                let x = s
                    .x
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let span = self.hi[j] - self.lo[j];
                        if span > S::zero() {
                            two * (v - self.lo[j]) / span - S::one()
                        } else {
                            S::zero()
                        }
                    })
                    .collect();
                LabeledSample { x, y: s.y }
            })
            .collect();
        Dataset::new(samples)
    }
}

// ---------------------------------------------------------------------------
// Synthetic problems
// ---------------------------------------------------------------------------

/// The five bundled synthetic problems and their exact labeling rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SynthProblem {
    /// Uniform cube in 20 dimensions, balanced symmetric classes.
    Synth1,
    /// Asymmetric two-component mixtures in the plane, sign of x1.
    Synth2,
    /// Imbalanced uniform boxes in the plane with a margin gap, sign of x1.
    Synth3,
    /// Imbalanced boxes in 50 dimensions, sign of x1.
    Synth4,
    /// 2x2 checkerboard on [0,4]^2.
    Synth5,
}

impl SynthProblem {
    pub fn dim(self) -> usize {
        match self {
            SynthProblem::Synth1 => 20,
            SynthProblem::Synth2 | SynthProblem::Synth3 | SynthProblem::Synth5 => 2,
            SynthProblem::Synth4 => 50,
        }
    }

    /// The exact label of `x` under this problem's rule, or `None` when `x`
    /// sits on the decision boundary.
    pub fn true_label<S: Real>(self, x: &[S]) -> Option<Label> {
        assert_eq!(x.len(), self.dim(), "feature dimension mismatch");
        match self {
            SynthProblem::Synth1 => {
                let mut s = S::zero();
                for (j, &v) in x.iter().enumerate() {
                    if j < 10 {
                        s += v;
                    } else {
                        s -= v;
                    }
                }
                Label::from_sign(s)
            }
            SynthProblem::Synth2 | SynthProblem::Synth3 | SynthProblem::Synth4 => {
                Label::from_sign(x[0])
            }
            SynthProblem::Synth5 => {
                let two = S::of(2.0);
                Label::from_sign((x[0] - two) * (x[1] - two))
            }
        }
    }

    /// The linear separator `(w, b)` for the linearly separable problems.
    pub fn separator<S: Real>(self) -> Option<(Vec<S>, S)> {
        match self {
            SynthProblem::Synth1 => {
                let mut w = vec![S::one(); 20];
                for wj in w.iter_mut().skip(10) {
                    *wj = -S::one();
                }
                Some((w, S::zero()))
            }
            SynthProblem::Synth2 | SynthProblem::Synth3 => {
                Some((vec![S::one(), S::zero()], S::zero()))
            }
            SynthProblem::Synth4 => {
                let mut w = vec![S::zero(); 50];
                w[0] = S::one();
                Some((w, S::zero()))
            }
            SynthProblem::Synth5 => None,
        }
    }
}

fn gen_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed::derive(seed, streams::GEN, 0))
}

fn uniform_point<S: Real, R: Rng>(rng: &mut R, boxes: &[(f64, f64)]) -> Vec<S> {
    boxes
        .iter()
        .map(|&(lo, hi)| S::of(rng.random_range(lo..hi)))
        .collect()
}

/// Labeled point from the rule of `problem`, resampling boundary hits.
fn sample_labeled<S: Real, R: Rng, F: FnMut(&mut R) -> Vec<S>>(
    problem: SynthProblem,
    rng: &mut R,
    mut draw: F,
) -> LabeledSample<S> {
    loop {
        let x = draw(rng);
        if let Some(y) = problem.true_label(&x) {
            return LabeledSample { x, y };
        }
    }
}

/// Uniform cube `[-1,1]^20`, labeled by the symmetric hyperplane.
pub fn gen_synth1<S: Real>(n: usize, seed: u64) -> Dataset<S> {
    assert!(n >= 1, "need at least one sample");
    let mut rng = gen_rng(seed);
    let boxes = vec![(-1.0, 1.0); 20];
    let samples = (0..n)
        .map(|_| sample_labeled(SynthProblem::Synth1, &mut rng, |r| uniform_point(r, &boxes)))
        .collect();
    Dataset::new(samples).expect("generator output is valid")
}

const SYNTH2_F1: [(f64, [(f64, f64); 2]); 3] = [
    (0.45, [(-1.0, 0.0), (-1.0, 1.0)]),
    (0.5, [(-4.0, -3.0), (0.0, 1.0)]),
    (0.05, [(-10.0, 0.0), (-5.0, 5.0)]),
];
const SYNTH2_F2: [(f64, [(f64, f64); 2]); 3] = [
    (0.45, [(0.0, 1.0), (-1.0, 1.0)]),
    (0.5, [(9.0, 10.0), (-1.0, 0.0)]),
    (0.05, [(0.0, 10.0), (-5.0, 5.0)]),
];

fn mixture_point<S: Real, R: Rng>(rng: &mut R, mixture: &[(f64, [(f64, f64); 2])]) -> Vec<S> {
    let u: f64 = rng.random_range(0.0..1.0);
    let mut acc = 0.0;
    for (w, boxes) in mixture {
        acc += w;
        if u < acc {
            return uniform_point(rng, boxes);
        }
    }
    uniform_point(rng, &mixture.last().expect("nonempty mixture").1)
}

/// Mirrored three-component mixtures on either side of `x1 = 0`.
pub fn gen_synth2<S: Real>(n_per_class: usize, seed: u64) -> Dataset<S> {
    assert!(n_per_class >= 1, "need at least one sample per class");
    let mut rng = gen_rng(seed);
    let mut samples = Vec::with_capacity(2 * n_per_class);
    for _ in 0..n_per_class {
        samples.push(sample_labeled(SynthProblem::Synth2, &mut rng, |r| {
            mixture_point(r, &SYNTH2_F1)
        }));
    }
    for _ in 0..n_per_class {
        samples.push(sample_labeled(SynthProblem::Synth2, &mut rng, |r| {
            mixture_point(r, &SYNTH2_F2)
        }));
    }
    Dataset::new(samples).expect("generator output is valid")
}

/// Imbalanced uniform boxes with a `|x1| >= 0.1` margin gap.
pub fn gen_synth3<S: Real>(n_neg: usize, n_pos: usize, seed: u64) -> Dataset<S> {
    assert!(n_neg >= 1 && n_pos >= 1, "need samples in both classes");
    let mut rng = gen_rng(seed);
    let neg_box = [(-10.1, -0.1), (-5.0, 5.0)];
    let pos_box = [(0.1, 1.1), (-2.5, 2.5)];
    let mut samples = Vec::with_capacity(n_neg + n_pos);
    for _ in 0..n_neg {
        samples.push(sample_labeled(SynthProblem::Synth3, &mut rng, |r| {
            uniform_point(r, &neg_box)
        }));
    }
    for _ in 0..n_pos {
        samples.push(sample_labeled(SynthProblem::Synth3, &mut rng, |r| {
            uniform_point(r, &pos_box)
        }));
    }
    Dataset::new(samples).expect("generator output is valid")
}

/// 50-dimensional version of the imbalanced-box problem.
pub fn gen_synth4<S: Real>(n_neg: usize, n_pos: usize, seed: u64) -> Dataset<S> {
    assert!(n_neg >= 1 && n_pos >= 1, "need samples in both classes");
    let mut rng = gen_rng(seed);
    let mut neg_box = vec![(-10.1, -0.1)];
    neg_box.extend(std::iter::repeat_n((-2.5, 2.5), 49));
    let mut pos_box = vec![(0.1, 1.1)];
    pos_box.extend(std::iter::repeat_n((-1.0, 1.0), 49));
    let mut samples = Vec::with_capacity(n_neg + n_pos);
    for _ in 0..n_neg {
        samples.push(sample_labeled(SynthProblem::Synth4, &mut rng, |r| {
            uniform_point(r, &neg_box)
        }));
    }
    for _ in 0..n_pos {
        samples.push(sample_labeled(SynthProblem::Synth4, &mut rng, |r| {
            uniform_point(r, &pos_box)
        }));
    }
    Dataset::new(samples).expect("generator output is valid")
}

/// 2x2 checkerboard on `[0,4]^2`, labeled by `sign((x1-2)(x2-2))`.
pub fn gen_synth5<S: Real>(n: usize, seed: u64) -> Dataset<S> {
    assert!(n >= 1, "need at least one sample");
    let mut rng = gen_rng(seed);
    let boxes = [(0.0, 4.0), (0.0, 4.0)];
    let samples = (0..n)
        .map(|_| sample_labeled(SynthProblem::Synth5, &mut rng, |r| uniform_point(r, &boxes)))
        .collect();
    Dataset::new(samples).expect("generator output is valid")
}

// ---------------------------------------------------------------------------
// Delimited-file ingestion
// ---------------------------------------------------------------------------

/// Options for [`load_delimited`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoadOptions {
    /// Field separator; defaults to a comma.
    pub delimiter: char,
    /// Zero-based index of the label column.
    pub label_column: usize,
    /// Token in the label column mapped to `+1`; the other token maps to `-1`.
    pub positive_token: String,
    /// Skip the first row.
    pub skip_header: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            delimiter: ',',
            label_column: 0,
            positive_token: "1".into(),
            skip_header: false,
        }
    }
}

/// Reads a delimited text file into a dataset.
///
/// Every row must have the same number of fields; the label column must
/// contain exactly two distinct tokens, one of which is `positive_token`.
/// Parse failures report the 1-based line number.
pub fn load_delimited<S: Real>(path: &Path, opts: &LoadOptions) -> Result<Dataset<S>> {
    let text = std::fs::read_to_string(path)?;
    parse_delimited(&text, opts)
}

/// [`load_delimited`] on an in-memory string.
pub fn parse_delimited<S: Real>(text: &str, opts: &LoadOptions) -> Result<Dataset<S>> {
    let mut rows: Vec<(usize, Vec<&str>)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if opts.skip_header && lineno == 1 {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        rows.push((lineno, line.split(opts.delimiter).map(str::trim).collect()));
    }
    if rows.is_empty() {
        return Err(Error::Dataset("file contains no data rows".into()));
    }

    let arity = rows[0].1.len();
    if opts.label_column >= arity {
        return Err(Error::Parse {
            line: rows[0].0,
            message: format!("label column {} out of range for {arity} fields", opts.label_column),
        });
    }

    let mut tokens: Vec<String> = Vec::new();
    for (lineno, fields) in &rows {
        if fields.len() != arity {
            return Err(Error::Parse {
                line: *lineno,
                message: format!("expected {arity} fields, found {}", fields.len()),
            });
        }
        let tok = fields[opts.label_column];
        if tok.is_empty() {
            return Err(Error::Parse {
                line: *lineno,
                message: "missing label value".into(),
            });
        }
        if !tokens.iter().any(|t| t == tok) {
            tokens.push(tok.to_string());
        }
        if tokens.len() > 2 {
            return Err(Error::Parse {
                line: *lineno,
                message: format!("label column has more than two distinct tokens: {tokens:?}"),
            });
        }
    }
    if !tokens.iter().any(|t| *t == opts.positive_token) {
        return Err(Error::Dataset(format!(
            "positive label token {:?} not present; found {tokens:?}",
            opts.positive_token
        )));
    }

    let mut samples = Vec::with_capacity(rows.len());
    for (lineno, fields) in &rows {
        let mut x = Vec::with_capacity(arity - 1);
        for (col, field) in fields.iter().enumerate() {
            if col == opts.label_column {
                continue;
            }
            if field.is_empty() {
                return Err(Error::Parse {
                    line: *lineno,
                    message: format!("missing value in column {col}"),
                });
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line: *lineno,
                message: format!("non-numeric feature {field:?} in column {col}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: *lineno,
                    message: format!("non-finite feature in column {col}"),
                });
            }
            x.push(S::of(v));
        }
        let y = if fields[opts.label_column] == opts.positive_token {
            Label::Pos
        } else {
            Label::Neg
        };
        samples.push(LabeledSample { x, y });
    }
    Dataset::new(samples)
}

/// Writes a dataset as delimited text, features first and the label
/// (`1` / `-1`) in the last column. Inverse of [`load_delimited`] with
/// `label_column = dim`.
pub fn write_delimited<S: Real>(ds: &Dataset<S>, delimiter: char) -> String {
    let mut out = String::new();
    for s in ds.iter() {
        for v in &s.x {
            out.push_str(&format!("{}{delimiter}", v.as_f64()));
        }
        out.push_str(match s.y {
            Label::Pos => "1",
            Label::Neg => "-1",
        });
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synth1_basis_vector_is_positive() {
        let mut x = vec![0.0f64; 20];
        x[0] = 1.0;
        assert_eq!(SynthProblem::Synth1.true_label(&x), Some(Label::Pos));
        let ones = vec![1.0f64; 20];
        assert_eq!(SynthProblem::Synth1.true_label(&ones), None);
    }

    #[test]
    fn synth1_class_balance() {
        let ds = gen_synth1::<f64>(3000, 7);
        let (pos, _) = ds.class_counts();
        let frac = pos as f64 / ds.len() as f64;
        assert!((frac - 0.5).abs() < 0.03, "balance {frac}");
    }

    #[test]
    fn synth1_is_separable_by_its_hyperplane() {
        let ds = gen_synth1::<f64>(500, 3);
        let (w, b) = SynthProblem::Synth1.separator::<f64>().unwrap();
        for s in ds.iter() {
            let f: f64 = w.iter().zip(&s.x).map(|(a, b)| a * b).sum::<f64>() + b;
            assert_eq!(Label::from_sign(f), Some(s.y));
        }
    }

    #[test]
    fn synth2_f1_draws_are_negative_and_mixture_mean_matches() {
        let ds = gen_synth2::<f64>(2000, 11);
        let neg: Vec<&LabeledSample<f64>> =
            ds.iter().filter(|s| s.y == Label::Neg).collect();
        assert_eq!(neg.len(), 2000, "all f1 draws have x1 <= 0");
        // Analytic mixture mean of x1 under f1: 0.45(-0.5) + 0.5(-3.5) + 0.05(-5).
        let mean = neg.iter().map(|s| s.x[0]).sum::<f64>() / neg.len() as f64;
        assert!((mean - (-2.225)).abs() < 0.1, "mean x1 = {mean}");
        // P(x1 in [9,10]) under f2 is 0.505.
        let pos: Vec<&LabeledSample<f64>> =
            ds.iter().filter(|s| s.y == Label::Pos).collect();
        let far = pos.iter().filter(|s| s.x[0] >= 9.0).count() as f64 / pos.len() as f64;
        assert!((far - 0.505).abs() < 0.03, "far fraction = {far}");
    }

    #[test]
    fn synth3_margin_gap_and_ratio() {
        let ds = gen_synth3::<f64>(3000, 1000, 5);
        let (pos, neg) = ds.class_counts();
        assert_eq!((neg, pos), (3000, 1000));
        let min_abs = ds.iter().map(|s| s.x[0].abs()).fold(f64::INFINITY, f64::min);
        assert!(min_abs >= 0.1, "margin gap violated: {min_abs}");
        for s in ds.iter() {
            assert_eq!(SynthProblem::Synth3.true_label(&s.x), Some(s.y));
        }
    }

    #[test]
    fn synth4_dimensions_and_supports() {
        let ds = gen_synth4::<f64>(400, 200, 9);
        assert_eq!(ds.dim(), 50);
        for s in ds.iter() {
            assert_eq!(SynthProblem::Synth4.true_label(&s.x), Some(s.y));
            if s.y == Label::Pos {
                assert!(s.x[1] >= -1.0 && s.x[1] <= 1.0, "f2 support violated");
            }
        }
    }

    #[test]
    fn synth5_quadrants_and_balance() {
        assert_eq!(SynthProblem::Synth5.true_label(&[1.0, 1.0]), Some(Label::Pos));
        assert_eq!(SynthProblem::Synth5.true_label(&[1.0, 3.0]), Some(Label::Neg));
        assert_eq!(SynthProblem::Synth5.true_label(&[3.0, 3.0]), Some(Label::Pos));
        assert_eq!(SynthProblem::Synth5.true_label(&[2.0, 1.0]), None);

        let ds = gen_synth5::<f64>(4000, 13);
        let (pos, _) = ds.class_counts();
        let frac = pos as f64 / ds.len() as f64;
        assert!((frac - 0.5).abs() < 0.03, "balance {frac}");
        for s in ds.iter() {
            assert_ne!(s.x[0], 2.0);
            assert_ne!(s.x[1], 2.0);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = gen_synth2::<f64>(50, 123);
        let b = gen_synth2::<f64>(50, 123);
        assert_eq!(a, b);
        let c = gen_synth2::<f64>(50, 124);
        assert_ne!(a, c);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let ds = gen_synth1::<f64>(400, 21);
        let spec = SplitSpec::new(0.75, 0.33, 9).unwrap();
        let (tr, va, te) = split(&ds, &spec).unwrap();
        assert_eq!(tr.len() + va.len() + te.len(), 400);
        assert!((te.len() as i64 - 100).abs() <= 1, "test {}", te.len());
        assert!((va.len() as i64 - 99).abs() <= 2, "val {}", va.len());

        let (tr2, _, _) = split(&ds, &spec).unwrap();
        assert_eq!(tr, tr2);

        // Stratification: class ratio preserved within one sample per part.
        let (p_all, n_all) = ds.class_counts();
        for part in [&tr, &va, &te] {
            let (p, n) = part.class_counts();
            let expect_p = (part.len() as f64) * (p_all as f64) / ds.len() as f64;
            assert!((p as f64 - expect_p).abs() <= 1.5, "pos {p} vs {expect_p}");
            let _ = n;
        }
        let _ = n_all;
    }

    #[test]
    fn split_rejects_tiny_datasets() {
        let ds = Dataset::new(vec![
            LabeledSample::new(vec![0.0f64], Label::Pos),
            LabeledSample::new(vec![1.0], Label::Neg),
        ])
        .unwrap();
        let spec = SplitSpec::new(0.75, 0.33, 1).unwrap();
        assert!(split(&ds, &spec).is_err());
    }

    #[test]
    fn parse_delimited_maps_tokens_and_errors() {
        let opts = LoadOptions {
            delimiter: ',',
            label_column: 2,
            positive_token: "4".into(),
            skip_header: false,
        };
        let ds = parse_delimited::<f64>("1.0,2.0,4\n3.0,4.0,2\n", &opts).unwrap();
        assert_eq!(ds.label(0), Label::Pos);
        assert_eq!(ds.label(1), Label::Neg);
        assert_eq!(ds.dim(), 2);

        // Three distinct label tokens.
        let err = parse_delimited::<f64>("1,2,4\n1,2,2\n1,2,3\n", &opts).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");

        // Ragged row.
        let err = parse_delimited::<f64>("1,2,4\n1,2\n", &opts).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        // Non-numeric feature.
        let err = parse_delimited::<f64>("1,x,4\n1,2,2\n", &opts).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn write_then_parse_round_trips() {
        let ds = gen_synth3::<f64>(20, 10, 2);
        let text = write_delimited(&ds, ',');
        let opts = LoadOptions {
            delimiter: ',',
            label_column: 2,
            positive_token: "1".into(),
            skip_header: false,
        };
        let back = parse_delimited::<f64>(&text, &opts).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn normalizer_uses_fit_statistics_only() {
        let train = Dataset::new(vec![
            LabeledSample::new(vec![0.0f64, 10.0], Label::Pos),
            LabeledSample::new(vec![4.0, 20.0], Label::Neg),
        ])
        .unwrap();
        let norm = Normalizer::fit(&train);
        let out = norm.transform(&train).unwrap();
        assert_eq!(out.features(0), &[-1.0, -1.0]);
        assert_eq!(out.features(1), &[1.0, 1.0]);

        let other = Dataset::new(vec![LabeledSample::new(vec![6.0f64, 15.0], Label::Pos)]).unwrap();
        let out = norm.transform(&other).unwrap();
        assert_eq!(out.features(0), &[2.0, 0.0]);
    }
}
