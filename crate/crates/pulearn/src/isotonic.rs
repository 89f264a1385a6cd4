//! Weighted isotonic regression via pool-adjacent-violators, with the box
//! constraint that turns the fit into a projection onto valid CDF values.

use crate::error::{Error, Result};

/// Weighted least-squares isotonic fit (no box constraint).
///
/// Returns the non-decreasing vector minimizing `sum w_i (y_i - v_i)^2`.
/// Each pooled block carries the weighted mean of the observations it merged.
pub fn pava(y: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    if y.is_empty() {
        return Err(Error::Domain("isotonic regression needs at least one point".into()));
    }
    if y.len() != w.len() {
        return Err(Error::Contract(format!(
            "length mismatch: {} values vs {} weights",
            y.len(),
            w.len()
        )));
    }
    if w.iter().any(|&wi| !(wi > 0.0) || !wi.is_finite()) {
        return Err(Error::Domain("weights must be positive and finite".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite value in isotonic input".into()));
    }

    // Blocks of (weighted sum, weight, count), merged while out of order.
    let mut sums: Vec<f64> = Vec::with_capacity(y.len());
    let mut weights: Vec<f64> = Vec::with_capacity(y.len());
    let mut counts: Vec<usize> = Vec::with_capacity(y.len());
    for (&yi, &wi) in y.iter().zip(w) {
        sums.push(yi * wi);
        weights.push(wi);
        counts.push(1);
        while sums.len() > 1 {
            let k = sums.len();
            let mean_last = sums[k - 1] / weights[k - 1];
            let mean_prev = sums[k - 2] / weights[k - 2];
            if mean_prev <= mean_last {
                break;
            }
            sums[k - 2] += sums[k - 1];
            weights[k - 2] += weights[k - 1];
            counts[k - 2] += counts[k - 1];
            sums.pop();
            weights.pop();
            counts.pop();
        }
    }

    let mut out = Vec::with_capacity(y.len());
    for ((s, w), c) in sums.iter().zip(&weights).zip(&counts) {
        let mean = s / w;
        out.extend(std::iter::repeat(mean).take(*c));
    }
    Ok(out)
}

/// Projection onto the set of non-decreasing vectors with entries in `[0,1]`:
/// pool-adjacent-violators followed by clamping.
///
/// On a finite grid this is exactly the nearest valid CDF in the weighted L2
/// sense, which is what the distance-curve construction minimizes over.
pub fn pava_project(y: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    let mut v = pava(y, w)?;
    for x in &mut v {
        *x = x.clamp(0.0, 1.0);
    }
    Ok(v)
}
