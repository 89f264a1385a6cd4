//! Storey-family estimators: the ratio `k(t)` at a quantile cutoff, and its
//! supremum over the ROC curve.

use super::{AlphaEstimate, Method};
use crate::classifier::ScoreSet;
use crate::empirical::{ecdf, StepCdf};
use crate::error::{Error, Result};

/// `k_n(t) = (G_n(t) - G_{L,n}(t)) / (1 - G_{L,n}(t))`, clamped to `[0,1]`.
///
/// Only defined strictly below the top of the labeled score distribution.
pub fn storey_k(g_n: &StepCdf, g_ln: &StepCdf, t: f64) -> Result<f64> {
    let gl = g_ln.eval(t);
    if gl >= 1.0 {
        return Err(Error::Domain(format!(
            "k(t) undefined at t = {t}: labeled CDF already reached 1"
        )));
    }
    Ok(raw_k(g_n.eval(t), gl).clamp(0.0, 1.0))
}

fn raw_k(g: f64, gl: f64) -> f64 {
    (g - gl) / (1.0 - gl)
}

/// Cutoff estimator: evaluates `k_n` at
/// `t_hat = quantile(G_{L,n}, 1 - m^(-q)) - 1/n`,
/// a labeled quantile converging to the top of the labeled scores slowly
/// enough to keep the denominator stable.
pub fn storey_cutoff_estimate(scores: &ScoreSet, q: f64) -> Result<AlphaEstimate> {
    if !(q > 0.0 && q < 0.5) {
        return Err(Error::Config(format!("q must lie in (0, 1/2), got {q}")));
    }
    let g_ln = ecdf(&scores.p1)?;
    let g_n = ecdf(&scores.p0)?;
    let m = scores.p1.len() as f64;
    let n = scores.p0.len() as f64;

    let level = 1.0 - m.powf(-q);
    let t_hat = g_ln.quantile(level)? - 1.0 / n;

    let gl = g_ln.eval(t_hat);
    let g = g_n.eval(t_hat);
    if gl >= 1.0 {
        return Err(Error::Domain(format!("degenerate cutoff t_hat = {t_hat}")));
    }
    let raw = raw_k(g, gl);
    let mut est = AlphaEstimate::new(raw.clamp(0.0, 1.0), Method::StoreyCutoff)
        .with("t_hat", t_hat)
        .with("g_n_at_t_hat", g)
        .with("g_ln_at_t_hat", gl)
        .with("k_raw", raw)
        .with("q", q);
    if g == 0.0 {
        est = est.with("t_hat_below_all_unlabeled", 1.0);
    }
    Ok(est)
}

/// ROC-supremum estimator: `sup_t k_n(t)` over every observed score value
/// whose labeled tail still holds at least `denom_floor` points.
pub fn roc_sup_estimate(scores: &ScoreSet, denom_floor: usize) -> Result<AlphaEstimate> {
    if denom_floor == 0 {
        return Err(Error::Config("denom_floor must be at least 1".into()));
    }
    let g_ln = ecdf(&scores.p1)?;
    let g_n = ecdf(&scores.p0)?;
    let m = scores.p1.len() as f64;

    let mut candidates: Vec<f64> = scores.p0.iter().chain(&scores.p1).copied().collect();
    candidates.sort_by(|a, b| a.total_cmp(b));
    candidates.dedup();

    let mut best: Option<(f64, f64)> = None; // (raw k, t)
    let mut admissible = 0usize;
    for &t in &candidates {
        let gl = g_ln.eval(t);
        // Count floor on the labeled tail keeps the denominator away from 0.
        if m * (1.0 - gl) < denom_floor as f64 - 1e-9 {
            continue;
        }
        admissible += 1;
        let k = raw_k(g_n.eval(t), gl);
        if best.map_or(true, |(b, _)| k > b) {
            best = Some((k, t));
        }
    }

    match best {
        Some((raw, t_star)) => Ok(AlphaEstimate::new(raw.clamp(0.0, 1.0), Method::RocSup)
            .with("t_star", t_star)
            .with("k_raw", raw)
            .with("denom_floor", denom_floor as f64)
            .with("admissible_cutoffs", admissible as f64)),
        None => Ok(AlphaEstimate::new(0.0, Method::RocSup)
            .with("no_admissible_t", 1.0)
            .with("denom_floor", denom_floor as f64)),
    }
}

/// One point of the empirical ROC parameterization at score cutoff `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub t: f64,
    pub g_ln: f64,
    pub g_n: f64,
}

/// The empirical ROC curve `(G_{L,n}(t), G_n(t))` at every observed score.
pub fn roc_points(scores: &ScoreSet) -> Result<Vec<RocPoint>> {
    let g_ln = ecdf(&scores.p1)?;
    let g_n = ecdf(&scores.p0)?;
    let mut ts: Vec<f64> = scores.p0.iter().chain(&scores.p1).copied().collect();
    ts.sort_by(|a, b| a.total_cmp(b));
    ts.dedup();
    Ok(ts
        .into_iter()
        .map(|t| RocPoint { t, g_ln: g_ln.eval(t), g_n: g_n.eval(t) })
        .collect())
}
