//! Ridge-regularized logistic regression fit by damped Newton iteration.
//! The intercept is unpenalized, so in the flat-ridge limit scores collapse
//! to the training label mean.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ScoreSet;
use crate::dataset::{FeatureMatrix, PuDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    /// L2 penalty on the weights (not the intercept).
    pub l2: f64,
    pub max_iter: usize,
    /// Convergence threshold on the gradient infinity norm.
    pub tol: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self { l2: 1e-3, max_iter: 100, tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    weights: Vec<f64>,
    intercept: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn log1p_exp(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl LogisticModel {
    pub fn fit(features: &FeatureMatrix, labels: &[u8], config: &LogisticConfig) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::Contract("one label per row required".into()));
        }
        if !(config.l2 >= 0.0) || !config.l2.is_finite() {
            return Err(Error::Config(format!("l2 must be >= 0, got {}", config.l2)));
        }
        if config.tol <= 0.0 {
            return Err(Error::Config("tol must be positive".into()));
        }

        let n = features.rows();
        let p = features.cols();
        let d = p + 1; // weights + intercept, intercept last

        // Design matrix with appended intercept column.
        let mut a = DMatrix::<f64>::zeros(n, d);
        for i in 0..n {
            for j in 0..p {
                a[(i, j)] = features.get(i, j);
            }
            a[(i, p)] = 1.0;
        }
        let y = DVector::<f64>::from_iterator(n, labels.iter().map(|&v| v as f64));

        let penalty = |beta: &DVector<f64>| {
            0.5 * config.l2 * beta.rows(0, p).iter().map(|v| v * v).sum::<f64>()
        };
        let loss = |beta: &DVector<f64>| -> Result<f64> {
            let z = &a * beta;
            let nll: f64 = z
                .iter()
                .zip(y.iter())
                .map(|(&zi, &yi)| log1p_exp(zi) - yi * zi)
                .sum();
            let value = nll / n as f64 + penalty(beta);
            if !value.is_finite() {
                return Err(Error::Numeric("logistic loss is not finite".into()));
            }
            Ok(value)
        };

        let mut beta = DVector::<f64>::zeros(d);
        let mut current = loss(&beta)?;

        for _ in 0..config.max_iter {
            let z = &a * &beta;
            let s = z.map(sigmoid);
            let residual = &s - &y;

            let mut grad = a.tr_mul(&residual) / n as f64;
            for j in 0..p {
                grad[j] += config.l2 * beta[j];
            }
            if grad.amax() < config.tol {
                break;
            }

            // H = A' diag(s(1-s)) A / n + l2 * diag(1..1, 0)
            let weights_diag = s.map(|si| si * (1.0 - si));
            let mut aw = a.clone();
            for i in 0..n {
                let w = weights_diag[i];
                for j in 0..d {
                    aw[(i, j)] *= w;
                }
            }
            let mut hessian = a.tr_mul(&aw) / n as f64;
            for j in 0..p {
                hessian[(j, j)] += config.l2;
            }

            let step = solve_spd(hessian, &grad)?;

            // Backtrack on the penalized loss; pure Newton almost always
            // passes on the first try.
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let candidate = &beta - scale * &step;
                let value = loss(&candidate)?;
                if value <= current + 1e-12 {
                    beta = candidate;
                    current = value;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted {
                break;
            }
        }

        Ok(Self {
            weights: beta.rows(0, p).iter().copied().collect(),
            intercept: beta[p],
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn score_rows(&self, features: &FeatureMatrix) -> Vec<f64> {
        (0..features.rows())
            .map(|i| {
                let z: f64 = features
                    .row(i)
                    .iter()
                    .zip(&self.weights)
                    .map(|(x, w)| x * w)
                    .sum::<f64>()
                    + self.intercept;
                sigmoid(z)
            })
            .collect()
    }
}

fn solve_spd(mut h: DMatrix<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
    for jitter in [0.0, 1e-10, 1e-6] {
        let mut hj = h.clone();
        for i in 0..hj.nrows() {
            hj[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(hj) {
            return Ok(chol.solve(g));
        }
    }
    // Last resort: LU.
    for i in 0..h.nrows() {
        h[(i, i)] += 1e-6;
    }
    h.lu()
        .solve(g)
        .ok_or_else(|| Error::Numeric("singular Hessian in logistic fit".into()))
}

/// Fits on the stacked P-vs-U problem (pseudo-label 1 for P).
pub fn train_logistic(data: &PuDataset, config: &LogisticConfig) -> Result<LogisticModel> {
    let (features, labels) = data.stacked()?;
    LogisticModel::fit(&features, &labels, config)
}

/// Convenience: in-sample scores of the stacked data as a [`ScoreSet`].
pub fn logistic_scores(data: &PuDataset, config: &LogisticConfig) -> Result<ScoreSet> {
    let model = train_logistic(data, config)?;
    let p1 = model.score_rows(data.positives());
    let p0 = model.score_rows(data.unlabeled());
    ScoreSet::new(p1, p0, data.pi())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::simulate_gaussian;

    #[test]
    fn symmetric_distributions_score_near_pi() {
        // P and U identically distributed: the optimal score is constant pi.
        let ds = simulate_gaussian(0.0, 300, 600, 3, 0.0, 5).unwrap();
        let cfg = LogisticConfig { l2: 1e-2, ..Default::default() };
        let s = logistic_scores(&ds, &cfg).unwrap();
        let mean: f64 = s.p0.iter().sum::<f64>() / s.p0.len() as f64;
        assert!((mean - ds.pi()).abs() < 0.05, "mean {mean} vs pi {}", ds.pi());
        for v in s.p0.iter().chain(&s.p1) {
            assert!((v - ds.pi()).abs() < 0.2);
        }
    }

    #[test]
    fn separable_scores_have_perfect_auc() {
        let m = 40;
        let p = FeatureMatrix::new(m, 1, (0..m).map(|i| 1.0 + i as f64 / m as f64).collect())
            .unwrap();
        let u = FeatureMatrix::new(m, 1, (0..m).map(|i| -1.0 - i as f64 / m as f64).collect())
            .unwrap();
        let ds = PuDataset::new(p, u, None).unwrap();
        let cfg = LogisticConfig { l2: 1e-4, max_iter: 200, tol: 1e-10 };
        let s = logistic_scores(&ds, &cfg).unwrap();
        let min_p1 = s.p1.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_p0 = s.p0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(min_p1 > max_p0, "AUC < 1: {min_p1} vs {max_p0}");
    }

    #[test]
    fn huge_ridge_collapses_to_intercept() {
        let ds = simulate_gaussian(0.5, 50, 100, 2, 3.0, 9).unwrap();
        let cfg = LogisticConfig { l2: 1e9, max_iter: 200, tol: 1e-12 };
        let model = train_logistic(&ds, &cfg).unwrap();
        for w in model.weights() {
            assert!(w.abs() < 1e-6, "weight {w}");
        }
        let expect = ds.pi();
        let s = model.score_rows(ds.unlabeled());
        for v in &s {
            assert!((v - expect).abs() < 1e-3, "score {v} vs {expect}");
        }
    }

    #[test]
    fn label_swap_symmetry() {
        let ds = simulate_gaussian(0.5, 20, 25, 2, 2.0, 3).unwrap();
        let cfg = LogisticConfig { l2: 1e-3, max_iter: 60, tol: 1e-10 };
        let s = logistic_scores(&ds, &cfg).unwrap();

        let swapped = PuDataset::new(ds.unlabeled().clone(), ds.positives().clone(), None).unwrap();
        let t = logistic_scores(&swapped, &cfg).unwrap();

        // New labeled sample is the old unlabeled one; scores flip.
        for (a, b) in t.p1.iter().zip(&s.p0) {
            assert!((a - (1.0 - b)).abs() < 1e-12, "{a} vs 1-{b}");
        }
        for (a, b) in t.p0.iter().zip(&s.p1) {
            assert!((a - (1.0 - b)).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_ridge_rejected() {
        let ds = simulate_gaussian(0.5, 5, 5, 1, 1.0, 1).unwrap();
        let cfg = LogisticConfig { l2: -1.0, ..Default::default() };
        assert!(matches!(train_logistic(&ds, &cfg), Err(Error::Config(_))));
    }
}
