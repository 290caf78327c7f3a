//! Least-squares fit of `Q(N) = Q∞ + B·exp(-C·N)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const C_MIN: f64 = 1e-4;
const C_MAX: f64 = 0.5;
const GRID: usize = 512;
const GOLDEN_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub q_infinity: f64,
    pub b: f64,
    pub c: f64,
    /// Sum of squared residuals.
    pub residual_sum: f64,
}

impl ScalingFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.q_infinity + self.b * (-self.c * n).exp()
    }
}

/// Best `(Q∞, B)` for fixed `C` by linear least squares.
fn linear_fit(points: &[(f64, f64)], c: f64) -> ScalingFit {
    let m = points.len() as f64;
    let u: Vec<f64> = points.iter().map(|&(n, _)| (-c * n).exp()).collect();
    let u_mean = u.iter().sum::<f64>() / m;
    let q_mean = points.iter().map(|p| p.1).sum::<f64>() / m;
    let suu: f64 = u.iter().map(|v| (v - u_mean).powi(2)).sum();
    let suq: f64 = u.iter().zip(points).map(|(v, p)| (v - u_mean) * (p.1 - q_mean)).sum();
    let b = if suu > 0.0 { suq / suu } else { 0.0 };
    let q_infinity = q_mean - b * u_mean;
    let residual_sum = u
        .iter()
        .zip(points)
        .map(|(v, p)| (p.1 - q_infinity - b * v).powi(2))
        .sum();
    ScalingFit {
        q_infinity,
        b,
        c,
        residual_sum,
    }
}

/// Grid search over log-spaced `C ∈ [1e-4, 0.5]`, then golden-section
/// refinement between the grid neighbours of the best value.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { found: points.len() });
    }
    if points.iter().any(|(n, q)| !n.is_finite() || !q.is_finite()) {
        return Err(Error::NonFinite("scaling points"));
    }
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    if ns.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("scaling points need distinct N_q".into()));
    }
    let ratio = (C_MAX / C_MIN).ln();
    let grid: Vec<f64> = (0..GRID)
        .map(|i| C_MIN * (ratio * i as f64 / (GRID - 1) as f64).exp())
        .collect();
    let (best_i, _) = grid
        .iter()
        .map(|&c| linear_fit(points, c).residual_sum)
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, r)| if r < acc.1 { (i, r) } else { acc });
    let mut lo = grid[best_i.saturating_sub(1)];
    let mut hi = grid[(best_i + 1).min(GRID - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let f = |c: f64| linear_fit(points, c).residual_sum;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let candidates = [linear_fit(points, 0.5 * (lo + hi)), linear_fit(points, grid[best_i])];
    Ok(candidates
        .into_iter()
        .min_by(|a, b| a.residual_sum.total_cmp(&b.residual_sum))
        .expect("two candidates"))
}
