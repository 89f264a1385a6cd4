//! Plug-in posterior upper bound and classification of the unlabeled set.

use serde::{Deserialize, Serialize};

use crate::classifier::ScoreSet;
use crate::error::{Error, Result};

/// Upper bound on the probability that an unlabeled observation with
/// classifier score `score` came from the positive component:
/// `((1-pi)/pi) * (score/(1-score)) * (1 - alpha0_hat)`, clamped to `[0,1]`.
/// A score of 1 maps to 1.
pub fn posterior_upper_bound(score: f64, pi: f64, alpha0_hat: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&score));
    debug_assert!(pi > 0.0 && pi < 1.0);
    debug_assert!((0.0..=1.0).contains(&alpha0_hat));
    if score >= 1.0 {
        return 1.0;
    }
    let odds = score / (1.0 - score);
    ((1.0 - pi) / pi * odds * (1.0 - alpha0_hat)).clamp(0.0, 1.0)
}

/// Labels each unlabeled row 1 when its posterior upper bound strictly
/// exceeds 1/2.
pub fn classify_unlabeled(scores: &ScoreSet, alpha0_hat: f64) -> Vec<u8> {
    scores
        .p0
        .iter()
        .map(|&s| u8::from(posterior_upper_bound(s, scores.pi, alpha0_hat) > 0.5))
        .collect()
}

/// Binary classification metrics with label 1 as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn metrics(predicted: &[u8], truth: &[u8]) -> Result<Metrics> {
    if predicted.is_empty() {
        return Err(Error::Domain("metrics need at least one prediction".into()));
    }
    if predicted.len() != truth.len() {
        return Err(Error::Contract(format!(
            "{} predictions vs {} truth labels",
            predicted.len(),
            truth.len()
        )));
    }
    let mut tp = 0.0;
    let mut fp = 0.0;
    let mut fne = 0.0;
    let mut agree = 0.0;
    for (&p, &t) in predicted.iter().zip(truth) {
        if p == t {
            agree += 1.0;
        }
        match (p, t) {
            (1, 1) => tp += 1.0,
            (1, 0) => fp += 1.0,
            (0, 1) => fne += 1.0,
            _ => {}
        }
    }
    let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
    let recall = if tp + fne > 0.0 { tp / (tp + fne) } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Metrics { accuracy: agree / predicted.len() as f64, precision, recall, f1 })
}
