//! Empirical CDFs of classifier scores and the weighted L2 distance between
//! grid functions, integrated against the unlabeled empirical measure.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Right-continuous empirical step CDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCdf {
    support: Vec<f64>,
    cum: Vec<f64>,
    n_obs: usize,
}

impl StepCdf {
    /// Jump locations, strictly increasing.
    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// CDF values immediately after each jump; the last entry is 1.
    pub fn cum(&self) -> &[f64] {
        &self.cum
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    /// Right-continuous evaluation: fraction of observations `<= t`.
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.support.partition_point(|&s| s <= t);
        if idx == 0 {
            0.0
        } else {
            self.cum[idx - 1]
        }
    }

    /// Mass carried by each jump; ties in the input aggregate here.
    pub fn masses(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cum
            .iter()
            .map(|&c| {
                let m = c - prev;
                prev = c;
                m
            })
            .collect()
    }

    /// Generalized inverse `inf { t : F(t) >= p }`.
    ///
    /// `p = 0` returns the smallest jump point, `p = 1` the largest.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("quantile level {p} outside [0,1]")));
        }
        if p == 0.0 {
            return Ok(self.support[0]);
        }
        let idx = self.cum.partition_point(|&c| c < p);
        Ok(self.support[idx.min(self.support.len() - 1)])
    }
}

/// Empirical CDF of a nonempty score sample with all values in `[0,1]`.
pub fn ecdf(scores: &[f64]) -> Result<StepCdf> {
    if scores.is_empty() {
        return Err(Error::Domain("empty sample has no empirical CDF".into()));
    }
    if scores.iter().any(|&s| !s.is_finite() || !(0.0..=1.0).contains(&s)) {
        return Err(Error::Domain("scores must lie in [0,1]".into()));
    }
    let n = scores.len();
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));

    let mut support = Vec::new();
    let mut cum = Vec::new();
    let mut seen = 0usize;
    let mut i = 0;
    while i < n {
        let v = sorted[i];
        let mut j = i;
        while j < n && sorted[j] == v {
            j += 1;
        }
        seen += j - i;
        support.push(v);
        cum.push(seen as f64 / n as f64);
        i = j;
    }
    // Counting gives an exact 1 at the top jump regardless of rounding.
    *cum.last_mut().expect("nonempty") = 1.0;
    Ok(StepCdf { support, cum, n_obs: n })
}

/// The rescaled remainder `(G_n(t) - (1-gamma) G_{L,n}(t)) / gamma`,
/// evaluated on the jump points of `G_n` (the support of `dG_n`).
///
/// Not constrained to be a CDF: it can decrease or leave `[0,1]`, and how far
/// it does so is exactly what the distance curve measures.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderFn {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub gamma: f64,
}

pub fn remainder(g_n: &StepCdf, g_ln: &StepCdf, gamma: f64) -> Result<RemainderFn> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Domain(format!("gamma must lie in (0,1], got {gamma}")));
    }
    let grid = g_n.support().to_vec();
    let values = grid
        .iter()
        .zip(g_n.cum())
        .map(|(&t, &g)| (g - (1.0 - gamma) * g_ln.eval(t)) / gamma)
        .collect();
    Ok(RemainderFn { grid, values, gamma })
}

/// Weighted L2 distance `sqrt( sum_i w_i (f_i - h_i)^2 )` between two grid
/// functions sharing a grid whose weights sum to one.
pub fn d_n(f: &[f64], h: &[f64], weights: &[f64]) -> Result<f64> {
    if f.len() != h.len() || f.len() != weights.len() {
        return Err(Error::Contract(format!(
            "grid mismatch: {} vs {} values on {} weights",
            f.len(),
            h.len(),
            weights.len()
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Contract(format!("weights sum to {total}, expected 1")));
    }
    let sq: f64 = f
        .iter()
        .zip(h)
        .zip(weights)
        .map(|((a, b), w)| w * (a - b) * (a - b))
        .sum();
    Ok(sq.max(0.0).sqrt())
}
