//! SPY baseline: plant labeled rows inside the unlabeled set, calibrate a
//! reliable-negative threshold from how the classifier scores those spies,
//! and report the negative fraction as the mixture proportion estimate.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::classifier::{oob_scores, train_logistic, ClassifierKind, ForestModel};
use crate::dataset::PuDataset;
use crate::empirical::ecdf;
use crate::error::{Error, Result};
use crate::mpe::{AlphaEstimate, Method};
use crate::seeding;

#[derive(Debug, Clone)]
pub struct SpyConfig {
    /// Fraction of positive rows planted as spies, in (0, 0.5].
    pub spy_fraction: f64,
    /// Spy-score quantile used as the reliable-negative threshold, in (0, 0.5).
    pub noise_level: f64,
    pub classifier: ClassifierKind,
}

impl Default for SpyConfig {
    fn default() -> Self {
        Self {
            spy_fraction: 0.1,
            noise_level: 0.15,
            classifier: ClassifierKind::Forest(Default::default()),
        }
    }
}

/// Estimate plus the induced classification of the original unlabeled rows
/// (1 = kept positive, 0 = reliable negative).
#[derive(Debug, Clone)]
pub struct SpyOutcome {
    pub estimate: AlphaEstimate,
    pub labels: Vec<u8>,
}

pub fn spy_estimate(data: &PuDataset, config: &SpyConfig, seed: u64) -> Result<SpyOutcome> {
    if !(config.spy_fraction > 0.0 && config.spy_fraction <= 0.5) {
        return Err(Error::Config(format!(
            "spy fraction must lie in (0, 0.5], got {}",
            config.spy_fraction
        )));
    }
    if !(config.noise_level > 0.0 && config.noise_level < 0.5) {
        return Err(Error::Config(format!(
            "noise level must lie in (0, 0.5), got {}",
            config.noise_level
        )));
    }

    let m = data.m();
    let n = data.n();
    let n_spies = (config.spy_fraction * m as f64).ceil() as usize;
    if n_spies >= m {
        return Err(Error::Domain(format!(
            "{n_spies} spies would leave no labeled rows (m = {m})"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive(seed, 0x5059_0001));
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng);
    let mut spy_rows = order[..n_spies].to_vec();
    let mut keep_rows = order[n_spies..].to_vec();
    spy_rows.sort_unstable();
    keep_rows.sort_unstable();

    // Spies move to the end of the augmented unlabeled sample.
    let positives = data.positives().select_rows(&keep_rows)?;
    let spies = data.positives().select_rows(&spy_rows)?;
    let augmented_unlabeled = data.unlabeled().vstack(&spies)?;
    let augmented = PuDataset::new(positives, augmented_unlabeled, None)?;

    // Score the augmented unlabeled block: out-of-bag for forests, in-sample
    // for the logistic model.
    let u_scores: Vec<f64> = match &config.classifier {
        ClassifierKind::Forest(cfg) => {
            let (x, y) = augmented.stacked()?;
            let model = ForestModel::fit(&x, &y, cfg, seeding::derive(seed, 0x5059_0002))?;
            let (scores, _) = oob_scores(&model, &augmented)?;
            scores.p0
        }
        ClassifierKind::Logistic(cfg) => {
            let model = train_logistic(&augmented, cfg)?;
            model.score_rows(augmented.unlabeled())
        }
    };
    let (original_scores, spy_scores) = u_scores.split_at(n);

    let threshold = ecdf(spy_scores)?.quantile(config.noise_level)?;
    let degenerate = spy_scores.iter().all(|&s| s == spy_scores[0]);

    let labels: Vec<u8> = original_scores.iter().map(|&s| u8::from(s >= threshold)).collect();
    let negatives = labels.iter().filter(|&&l| l == 0).count();
    let alpha0_hat = negatives as f64 / n as f64;

    let mut estimate = AlphaEstimate::new(alpha0_hat, Method::Spy)
        .with("threshold", threshold)
        .with("n_spies", n_spies as f64)
        .with("spy_fraction", config.spy_fraction)
        .with("noise_level", config.noise_level);
    if degenerate {
        estimate = estimate.with("degenerate_threshold", 1.0);
    }
    Ok(SpyOutcome { estimate, labels })
}
