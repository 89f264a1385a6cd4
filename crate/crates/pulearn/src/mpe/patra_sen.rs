//! Isotonic-projection estimator: how far the rescaled remainder
//! `(G_n - (1-gamma) G_{L,n}) / gamma` is from the nearest valid CDF, swept
//! over a gamma grid, with elbow or threshold selection.

use super::{AlphaEstimate, Method};
use crate::classifier::ScoreSet;
use crate::empirical::{d_n, ecdf, StepCdf};
use crate::error::{Error, Result};
use crate::isotonic::pava_project;

/// Default gamma grid resolution.
pub const DEFAULT_GRID_STEP: f64 = 0.005;

/// A curve identically zero below this is treated as the alpha0 = 0 case.
const FLAT_CURVE_EPS: f64 = 1e-12;

/// The scaled distances `gamma * d_n(remainder, projection)` on a uniform
/// gamma grid ending at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceCurve {
    pub gammas: Vec<f64>,
    pub values: Vec<f64>,
    pub step: f64,
}

impl DistanceCurve {
    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// Central second difference at interior index `i`, divided by step^2.
    pub fn second_difference(&self, i: usize) -> Option<f64> {
        if i == 0 || i + 1 >= self.values.len() {
            return None;
        }
        Some((self.values[i + 1] - 2.0 * self.values[i] + self.values[i - 1]) / (self.step * self.step))
    }
}

/// Shared evaluation grid: the jump points of `G_n` with their masses, plus
/// both empirical CDFs evaluated there. Every gamma reuses this.
pub(crate) struct ScoreGrid {
    g_n: Vec<f64>,
    g_ln: Vec<f64>,
    weights: Vec<f64>,
}

impl ScoreGrid {
    pub(crate) fn new(scores: &ScoreSet) -> Result<Self> {
        let g_n = ecdf(&scores.p0)?;
        let g_ln: StepCdf = ecdf(&scores.p1)?;
        let g_ln_vals = g_n.support().iter().map(|&t| g_ln.eval(t)).collect();
        Ok(Self { g_n: g_n.cum().to_vec(), g_ln: g_ln_vals, weights: g_n.masses() })
    }

    /// `d_n` between the rescaled remainder at `gamma` and its isotonic
    /// projection onto valid CDFs.
    fn distance(&self, gamma: f64) -> Result<f64> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Domain(format!("gamma must lie in (0,1], got {gamma}")));
        }
        let remainder: Vec<f64> = self
            .g_n
            .iter()
            .zip(&self.g_ln)
            .map(|(&g, &gl)| (g - (1.0 - gamma) * gl) / gamma)
            .collect();
        let projection = pava_project(&remainder, &self.weights)?;
        d_n(&remainder, &projection, &self.weights)
    }
}

/// Distance at a single gamma (builds the grid each call; use
/// [`distance_curve`] for sweeps).
pub fn distance_at_gamma(scores: &ScoreSet, gamma: f64) -> Result<f64> {
    ScoreGrid::new(scores)?.distance(gamma)
}

fn grid_cells(grid_step: f64) -> Result<usize> {
    if !(grid_step > 0.0 && grid_step <= 0.5) {
        return Err(Error::Config(format!("grid step must lie in (0, 0.5], got {grid_step}")));
    }
    Ok((1.0 / grid_step).round().max(2.0) as usize)
}

/// Sweeps `gamma * d_n(gamma)` over the uniform grid `{1/k, 2/k, ..., 1}`
/// with `k = round(1 / grid_step)`. Refining the grid keeps shared points
/// bit-identical.
pub fn distance_curve(scores: &ScoreSet, grid_step: f64) -> Result<DistanceCurve> {
    let cells = grid_cells(grid_step)?;
    let grid = ScoreGrid::new(scores)?;
    let mut gammas = Vec::with_capacity(cells);
    let mut values = Vec::with_capacity(cells);
    for i in 1..=cells {
        let gamma = i as f64 / cells as f64;
        gammas.push(gamma);
        values.push(gamma * grid.distance(gamma)?);
    }
    Ok(DistanceCurve { gammas, values, step: 1.0 / cells as f64 })
}

/// Elbow rule: the grid gamma maximizing the second finite difference of the
/// scaled distance curve. Boundary points are excluded from the argmax; an
/// identically zero curve yields 0 with a `flat_curve` diagnostic.
pub fn elbow_select(curve: &DistanceCurve) -> Result<AlphaEstimate> {
    if curve.len() < 5 {
        return Err(Error::Domain(format!(
            "elbow selection needs at least 5 grid points, got {}",
            curve.len()
        )));
    }
    if curve.values.iter().all(|v| v.abs() <= FLAT_CURVE_EPS) {
        return Ok(AlphaEstimate::new(0.0, Method::PatraSenElbow)
            .with("flat_curve", 1.0)
            .with("grid_step", curve.step));
    }
    let mut best_idx = 1;
    let mut best = f64::NEG_INFINITY;
    for i in 1..curve.len() - 1 {
        let d2 = curve.second_difference(i).expect("interior point");
        // Strict improvement keeps the smallest gamma on ties.
        if d2 > best {
            best = d2;
            best_idx = i;
        }
    }
    Ok(AlphaEstimate::new(curve.gammas[best_idx], Method::PatraSenElbow)
        .with("elbow_gamma", curve.gammas[best_idx])
        .with("second_difference_max", best)
        .with("grid_step", curve.step))
}

/// Threshold rule: the smallest grid gamma whose scaled distance falls below
/// `c_n / n^(beta - eta)` with `c_n = c0 * ln(n)`. The feasible set is an
/// upper interval of the grid (the scaled curve is convex and hits 0 at
/// gamma = 1), so a single scan suffices.
pub fn threshold_select(
    scores: &ScoreSet,
    c0: f64,
    beta_eta: f64,
    grid_step: f64,
) -> Result<AlphaEstimate> {
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::Config(format!("c0 must be positive, got {c0}")));
    }
    if !(beta_eta > 0.0 && beta_eta < 0.5) {
        return Err(Error::Config(format!("beta-eta must lie in (0, 1/2), got {beta_eta}")));
    }
    let curve = distance_curve(scores, grid_step)?;
    let n = scores.p0.len() as f64;
    let c_n = c0 * n.ln();
    let threshold = c_n / n.powf(beta_eta);

    let feasible = curve.values.iter().position(|&v| v <= threshold);
    let estimate = match feasible {
        Some(i) => AlphaEstimate::new(curve.gammas[i], Method::PatraSenCn),
        None => AlphaEstimate::new(1.0, Method::PatraSenCn).with("no_feasible_gamma", 1.0),
    };
    Ok(estimate
        .with("c_n", c_n)
        .with("threshold", threshold)
        .with("grid_step", curve.step))
}
