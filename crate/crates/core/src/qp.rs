//! Dual quadratic program solver.
//!
//! Maximizes `sum(lambda) - 1/2 || sum(lambda_i y_i phi(x_i)) ||^2` subject
//! to `sum(lambda_i y_i) = 0` and per-sample boxes `low_i <= lambda_i <=
//! high_i`, by pairwise working-set updates (generalized sequential minimal
//! optimization). The working pair is the maximal-KKT-violation pair; the
//! equality constraint is preserved exactly by the pair geometry and
//! re-balanced once at the end to remove accumulated rounding.

use crate::data::Label;
use crate::error::{Error, Result};
use crate::kernel::Gram;
use crate::scalar::Real;

/// Output of [`solve_qp`].
#[derive(Clone, Debug)]
pub struct QpSolution<S> {
    pub lambda: Vec<S>,
    /// Pairwise updates performed.
    pub iterations: usize,
    /// Final maximal violating-pair gap `m - M`; at or below the requested
    /// tolerance when the solver converged.
    pub kkt_gap: S,
    /// Gradient of the minimization form `1/2 l'Ql - sum(l)` at the solution,
    /// with `Q_ij = y_i y_j K_ij`. `y_i * (gradient_i + 1)` recovers the
    /// margin term `w . phi(x_i)`.
    pub gradient: Vec<S>,
}

impl<S: Real> QpSolution<S> {
    /// Dual objective value `sum(lambda) - 1/2 lambda' Q lambda`.
    pub fn objective(&self) -> S {
        let mut obj = S::zero();
        // g = Q l - 1  =>  l'Ql = l'(g + 1) and sum(l) = l'1.
        for (&l, &g) in self.lambda.iter().zip(&self.gradient) {
            obj += l - S::of(0.5) * l * (g + S::one());
        }
        obj
    }
}

/// Solves the box- and equality-constrained dual QP from a zero start.
///
/// `gram` holds plain kernel values `K_ij`; labels enter through the
/// equality constraint and curvature internally. Errors when a box is
/// empty, when no box point satisfies the equality constraint, or when the
/// gram matrix exhibits negative pair curvature beyond tolerance.
pub fn solve_qp<S: Real>(
    gram: &Gram<S>,
    labels: &[Label],
    box_low: &[S],
    box_high: &[S],
    qp_tolerance: S,
) -> Result<QpSolution<S>> {
    solve_qp_from(gram, labels, box_low, box_high, qp_tolerance, None)
}

/// [`solve_qp`] with an optional warm-start point, which is projected into
/// the boxes and repaired onto the equality constraint before optimizing.
pub fn solve_qp_from<S: Real>(
    gram: &Gram<S>,
    labels: &[Label],
    box_low: &[S],
    box_high: &[S],
    qp_tolerance: S,
    warm_start: Option<&[S]>,
) -> Result<QpSolution<S>> {
    let n = gram.n();
    if labels.len() != n || box_low.len() != n || box_high.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: labels.len() });
    }
    if !(qp_tolerance > S::zero()) {
        return Err(Error::InvalidParameter("qp_tolerance must be positive".into()));
    }
    if let Some(w) = warm_start {
        if w.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: w.len() });
        }
    }
    for i in 0..n {
        if !(box_low[i].is_finite() && box_high[i].is_finite()) {
            return Err(Error::NonFinite("box bounds"));
        }
        if box_low[i] > box_high[i] {
            return Err(Error::Infeasible(format!(
                "empty box at {i}: [{}, {}]",
                box_low[i], box_high[i]
            )));
        }
    }
    let y: Vec<S> = labels.iter().map(|l| l.signum::<S>()).collect();

    let mut lambda = feasible_start(&y, box_low, box_high, warm_start)?;

    // Gradient of the minimization form; lambda = 0 gives -1 everywhere.
    let mut grad: Vec<S> = if lambda.iter().all(|&l| l == S::zero()) {
        vec![-S::one(); n]
    } else {
        (0..n)
            .map(|i| {
                let row = gram.row(i);
                let mut s = -S::one();
                for j in 0..n {
                    s += y[i] * y[j] * row[j] * lambda[j];
                }
                s
            })
            .collect()
    };

    let diag: Vec<S> = (0..n).map(|i| gram.get(i, i)).collect();
    let mut max_diag = S::zero();
    for &d in &diag {
        max_diag = max_diag.max(d);
    }
    let curvature_floor = S::of(1e-12) * (S::one() + max_diag);
    let psd_tolerance = S::of(1e-8) * (S::one() + max_diag);

    let max_iterations = 2_000_000;
    let mut iterations = 0usize;
    let mut gap;

    loop {
        // First index: maximal KKT violation over the ascent set. The stop
        // test uses the classic violating-pair gap.
        let mut m_val = S::neg_infinity();
        let mut m_idx = usize::MAX;
        let mut low_min = S::infinity();
        for t in 0..n {
            let score = -y[t] * grad[t];
            let in_up = (y[t] > S::zero() && lambda[t] < box_high[t])
                || (y[t] < S::zero() && lambda[t] > box_low[t]);
            let in_low = (y[t] > S::zero() && lambda[t] > box_low[t])
                || (y[t] < S::zero() && lambda[t] < box_high[t]);
            if in_up && score > m_val {
                m_val = score;
                m_idx = t;
            }
            if in_low && score < low_min {
                low_min = score;
            }
        }
        if m_idx == usize::MAX || low_min == S::infinity() {
            gap = S::zero();
            break;
        }
        gap = m_val - low_min;
        if gap <= qp_tolerance {
            gap = gap.max(S::zero());
            break;
        }
        if iterations >= max_iterations {
            break;
        }

        // Second index: among violating descent candidates, the one with
        // the largest second-order objective decrease (d^2 / 2a).
        let i = m_idx;
        let row_i = gram.row(i);
        let mut j = usize::MAX;
        let mut best_gain = S::neg_infinity();
        let mut a_best = curvature_floor;
        for t in 0..n {
            let score = -y[t] * grad[t];
            let in_low = (y[t] > S::zero() && lambda[t] > box_low[t])
                || (y[t] < S::zero() && lambda[t] < box_high[t]);
            if !in_low || score >= m_val {
                continue;
            }
            let a_raw = diag[i] + diag[t] - S::of(2.0) * row_i[t];
            if a_raw < -psd_tolerance {
                return Err(Error::NotPsd(format!(
                    "negative curvature {a_raw} on pair ({i}, {t})"
                )));
            }
            let a = a_raw.max(curvature_floor);
            let d = m_val - score;
            let gain = d * d / a;
            if gain > best_gain {
                best_gain = gain;
                j = t;
                a_best = a;
            }
        }
        if j == usize::MAX {
            break;
        }

        // Direction d_i = y_i, d_j = -y_j keeps the equality constraint.
        let cap_i = if y[i] > S::zero() { box_high[i] - lambda[i] } else { lambda[i] - box_low[i] };
        let cap_j = if y[j] > S::zero() { lambda[j] - box_low[j] } else { box_high[j] - lambda[j] };
        let pair_gap = m_val - (-y[j] * grad[j]);
        let step = (pair_gap / a_best).min(cap_i).min(cap_j);
        if !(step > S::zero()) {
            break;
        }

        lambda[i] = clamp(lambda[i] + y[i] * step, box_low[i], box_high[i]);
        lambda[j] = clamp(lambda[j] - y[j] * step, box_low[j], box_high[j]);

        let row_j = gram.row(j);
        for t in 0..n {
            grad[t] += step * y[t] * (row_i[t] - row_j[t]);
        }
        iterations += 1;
    }

    rebalance(&mut lambda, &y, box_low, box_high);
    Ok(QpSolution { lambda, iterations, kkt_gap: gap, gradient: grad })
}

fn clamp<S: Real>(v: S, lo: S, hi: S) -> S {
    v.max(lo).min(hi)
}

/// The warm-start point (or zero) projected into the boxes, then repaired
/// to satisfy the equality constraint; errors when the constraint cannot be
/// met inside the boxes.
fn feasible_start<S: Real>(
    y: &[S],
    low: &[S],
    high: &[S],
    warm_start: Option<&[S]>,
) -> Result<Vec<S>> {
    let n = y.len();
    let mut lambda: Vec<S> = (0..n)
        .map(|i| clamp(warm_start.map_or(S::zero(), |w| w[i]), low[i], high[i]))
        .collect();
    let mut residual = S::zero();
    for i in 0..n {
        residual += y[i] * lambda[i];
    }
    for i in 0..n {
        if residual == S::zero() {
            break;
        }
        // Moving lambda_i by delta changes the residual by y_i * delta.
        let target = lambda[i] - y[i] * residual;
        let new = clamp(target, low[i], high[i]);
        residual += y[i] * (new - lambda[i]);
        lambda[i] = new;
    }
    let mut scale = S::one();
    for i in 0..n {
        scale = scale.max(low[i].abs()).max(high[i].abs());
    }
    if residual.abs() > S::of(1e-9) * scale {
        return Err(Error::Infeasible(format!(
            "equality constraint unreachable inside boxes (residual {residual})"
        )));
    }
    Ok(lambda)
}

/// Absorbs accumulated floating-point drift of the equality constraint into
/// the most interior variable. Variables sitting on a bound are never moved:
/// nudging them inside would masquerade as free support vectors downstream.
fn rebalance<S: Real>(lambda: &mut [S], y: &[S], low: &[S], high: &[S]) {
    let mut residual = S::zero();
    for i in 0..lambda.len() {
        residual += y[i] * lambda[i];
    }
    if residual == S::zero() {
        return;
    }
    let mut best: Option<(usize, S)> = None;
    for i in 0..lambda.len() {
        let room = (lambda[i] - low[i]).min(high[i] - lambda[i]);
        let target = lambda[i] - y[i] * residual;
        if room > S::zero() && target >= low[i] && target <= high[i] {
            if best.is_none_or(|(_, r)| room > r) {
                best = Some((i, room));
            }
        }
    }
    if let Some((k, _)) = best {
        lambda[k] = lambda[k] - y[k] * residual;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Dataset, LabeledSample};
    use crate::kernel::{gram, Kernel};

    fn two_point_problem(c: f64) -> (Gram<f64>, Vec<Label>, Vec<f64>, Vec<f64>) {
        let ds = Dataset::new(vec![
            LabeledSample::new(vec![1.0, 0.0], Label::Pos),
            LabeledSample::new(vec![-1.0, 0.0], Label::Neg),
        ])
        .unwrap();
        let g = gram(&Kernel::linear(), &ds).unwrap();
        (g, vec![Label::Pos, Label::Neg], vec![0.0, 0.0], vec![c, c])
    }

    #[test]
    fn two_point_closed_form() {
        // Analytic solution: lambda_1 = lambda_2 = min(2 / ||x1 - x2||^2, C).
        let (g, y, lo, hi) = two_point_problem(10.0);
        let sol = solve_qp(&g, &y, &lo, &hi, 1e-8).unwrap();
        assert!((sol.lambda[0] - 0.5).abs() < 1e-8, "{:?}", sol.lambda);
        assert!((sol.lambda[1] - 0.5).abs() < 1e-8);

        // Clipped at a small C.
        let (g, y, lo, hi) = two_point_problem(0.2);
        let sol = solve_qp(&g, &y, &lo, &hi, 1e-8).unwrap();
        assert!((sol.lambda[0] - 0.2).abs() < 1e-12);
        assert!((sol.lambda[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_box_returns_zero() {
        let (g, y, _, _) = two_point_problem(1.0);
        let sol = solve_qp(&g, &y, &[0.0, 0.0], &[0.0, 0.0], 1e-8).unwrap();
        assert_eq!(sol.lambda, vec![0.0, 0.0]);
        assert_eq!(sol.kkt_gap, 0.0);
    }

    #[test]
    fn infeasible_and_invalid_boxes_error() {
        let (g, y, _, _) = two_point_problem(1.0);
        // low > high.
        assert!(solve_qp(&g, &y, &[1.0, 0.0], &[0.0, 1.0], 1e-8).is_err());
        // Equality constraint unreachable: both variables forced positive
        // with the same label sign contribution.
        let err = solve_qp(&g, &y, &[1.0, -2.0], &[2.0, -1.0], 1e-8).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)), "{err}");
    }

    #[test]
    fn non_psd_gram_is_detected() {
        // An indefinite "gram" matrix with eigenvalues 3 and -1 in its
        // leading block.
        let data = vec![1.0, 2.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let g = Gram::from_flat(3, data).unwrap();
        let y = vec![Label::Pos, Label::Neg, Label::Pos];
        let err = solve_qp(&g, &y, &[0.0; 3], &[10.0; 3], 1e-8).unwrap_err();
        assert!(matches!(err, Error::NotPsd(_)), "{err}");
    }

    #[test]
    fn equality_constraint_holds_tightly() {
        let (g, y, lo, hi) = two_point_problem(5.0);
        let sol = solve_qp(&g, &y, &lo, &hi, 1e-10).unwrap();
        let r: f64 = sol
            .lambda
            .iter()
            .zip(&y)
            .map(|(&l, lab)| l * lab.signum::<f64>())
            .sum();
        assert!(r.abs() <= 1e-10, "residual {r}");
    }
}
