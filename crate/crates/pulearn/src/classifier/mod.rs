//! Probabilistic P-vs-U classifiers producing the one-dimensional scores the
//! estimators run on.

mod forest;
mod logistic;

pub use forest::{oob_scores, train_forest, ForestConfig, ForestModel, OobDiagnostics};
pub use logistic::{train_logistic, LogisticConfig, LogisticModel};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureMatrix, PuDataset};
use crate::error::{Error, Result};
use crate::seeding;

/// Classifier scores of the labeled (`p1`) and unlabeled (`p0`) rows, plus
/// the known labeled fraction. This is the whole one-dimensional problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSet {
    pub p1: Vec<f64>,
    pub p0: Vec<f64>,
    pub pi: f64,
}

impl ScoreSet {
    pub fn new(p1: Vec<f64>, p0: Vec<f64>, pi: f64) -> Result<Self> {
        if p1.is_empty() || p0.is_empty() {
            return Err(Error::Domain("score vectors must be nonempty".into()));
        }
        let ok = |v: &[f64]| v.iter().all(|&s| s.is_finite() && (0.0..=1.0).contains(&s));
        if !ok(&p1) || !ok(&p0) {
            return Err(Error::Domain("scores must lie in [0,1]".into()));
        }
        if !(pi > 0.0 && pi < 1.0) {
            return Err(Error::Domain(format!("pi must lie in (0,1), got {pi}")));
        }
        Ok(Self { p1, p0, pi })
    }
}

/// Classifier choice plus hyperparameters, used wherever a model has to be
/// trained on caller-provided pseudo-labels (cross-fitting, spies, splits).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierKind {
    Forest(ForestConfig),
    Logistic(LogisticConfig),
}

/// A trained model of either kind; self-describing under serde.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedClassifier {
    Forest(ForestModel),
    Logistic(LogisticModel),
}

impl ClassifierKind {
    pub fn fit(&self, features: &FeatureMatrix, labels: &[u8], seed: u64) -> Result<FittedClassifier> {
        match self {
            ClassifierKind::Forest(cfg) => {
                Ok(FittedClassifier::Forest(ForestModel::fit(features, labels, cfg, seed)?))
            }
            ClassifierKind::Logistic(cfg) => {
                Ok(FittedClassifier::Logistic(LogisticModel::fit(features, labels, cfg)?))
            }
        }
    }
}

impl FittedClassifier {
    /// Probability of pseudo-label 1 per row.
    pub fn score_rows(&self, features: &FeatureMatrix) -> Result<Vec<f64>> {
        match self {
            FittedClassifier::Forest(m) => m.score_rows(features),
            FittedClassifier::Logistic(m) => Ok(m.score_rows(features)),
        }
    }
}

fn fold_assignment(len: usize, folds: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..len).collect();
    idx.shuffle(rng);
    let mut fold = vec![0usize; len];
    for (pos, &row) in idx.iter().enumerate() {
        fold[row] = pos % folds;
    }
    fold
}

/// Out-of-fold scores: the stacked data is split into folds stratified by
/// pseudo-label and every row is scored by the model trained on the other
/// folds. The fallback scoring route for classifiers without out-of-bag
/// structure.
pub fn cross_fit_scores(
    data: &PuDataset,
    kind: &ClassifierKind,
    folds: usize,
    seed: u64,
) -> Result<ScoreSet> {
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    if folds > data.m().min(data.n()) {
        return Err(Error::Domain(format!(
            "{} folds cannot be stratified over m={} and n={}",
            folds,
            data.m(),
            data.n()
        )));
    }

    let mut rng_p = ChaCha8Rng::seed_from_u64(seeding::derive(seed, 0xF01D_0001));
    let mut rng_u = ChaCha8Rng::seed_from_u64(seeding::derive(seed, 0xF01D_0002));
    let pos_fold = fold_assignment(data.m(), folds, &mut rng_p);
    let unl_fold = fold_assignment(data.n(), folds, &mut rng_u);

    cross_fit_with_assignment(data, kind, &pos_fold, &unl_fold, folds, seed)
}

/// Cross-fitting with an explicit fold assignment; exposed for tests that
/// need to control the partition.
pub fn cross_fit_with_assignment(
    data: &PuDataset,
    kind: &ClassifierKind,
    pos_fold: &[usize],
    unl_fold: &[usize],
    folds: usize,
    seed: u64,
) -> Result<ScoreSet> {
    if pos_fold.len() != data.m() || unl_fold.len() != data.n() {
        return Err(Error::Contract("fold assignment length mismatch".into()));
    }

    let mut p1 = vec![f64::NAN; data.m()];
    let mut p0 = vec![f64::NAN; data.n()];
    for k in 0..folds {
        let train_pos: Vec<usize> =
            (0..data.m()).filter(|&i| pos_fold[i] != k).collect();
        let train_unl: Vec<usize> =
            (0..data.n()).filter(|&i| unl_fold[i] != k).collect();
        let held_pos: Vec<usize> = (0..data.m()).filter(|&i| pos_fold[i] == k).collect();
        let held_unl: Vec<usize> = (0..data.n()).filter(|&i| unl_fold[i] == k).collect();
        if train_pos.is_empty() || train_unl.is_empty() {
            return Err(Error::Domain(format!("fold {k} leaves an empty training class")));
        }

        let x_pos = data.positives().select_rows(&train_pos)?;
        let x_unl = data.unlabeled().select_rows(&train_unl)?;
        let x = x_pos.vstack(&x_unl)?;
        let mut y = vec![1u8; train_pos.len()];
        y.extend(std::iter::repeat(0u8).take(train_unl.len()));

        let model = kind.fit(&x, &y, seeding::derive(seed, 0xF17F_0000 + k as u64))?;
        if !held_pos.is_empty() {
            let scores = model.score_rows(&data.positives().select_rows(&held_pos)?)?;
            for (&i, s) in held_pos.iter().zip(scores) {
                p1[i] = s;
            }
        }
        if !held_unl.is_empty() {
            let scores = model.score_rows(&data.unlabeled().select_rows(&held_unl)?)?;
            for (&i, s) in held_unl.iter().zip(scores) {
                p0[i] = s;
            }
        }
    }

    ScoreSet::new(p1, p0, data.pi())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::simulate_gaussian;

    fn logistic_kind() -> ClassifierKind {
        ClassifierKind::Logistic(LogisticConfig { l2: 1e-3, max_iter: 50, tol: 1e-8 })
    }

    #[test]
    fn score_set_validates() {
        assert!(ScoreSet::new(vec![0.5], vec![0.5], 0.5).is_ok());
        assert!(ScoreSet::new(vec![], vec![0.5], 0.5).is_err());
        assert!(ScoreSet::new(vec![1.2], vec![0.5], 0.5).is_err());
        assert!(ScoreSet::new(vec![0.5], vec![0.5], 1.0).is_err());
    }

    #[test]
    fn cross_fit_rejects_bad_folds() {
        let ds = simulate_gaussian(0.5, 4, 10, 2, 3.0, 1).unwrap();
        assert!(matches!(
            cross_fit_scores(&ds, &logistic_kind(), 1, 0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            cross_fit_scores(&ds, &logistic_kind(), 5, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn every_row_scored_exactly_once() {
        let ds = simulate_gaussian(0.5, 12, 20, 2, 3.0, 2).unwrap();
        let s = cross_fit_scores(&ds, &logistic_kind(), 2, 7).unwrap();
        assert_eq!(s.p1.len(), 12);
        assert_eq!(s.p0.len(), 20);
        assert!(s.p1.iter().chain(&s.p0).all(|v| v.is_finite()));
    }

    #[test]
    fn permuting_rows_permutes_scores() {
        // With the fold assignment held fixed, relabeling rows permutes the
        // scores identically (logistic training is order-invariant up to
        // float roundoff).
        let ds = simulate_gaussian(0.5, 8, 10, 2, 4.0, 3).unwrap();
        let pos_fold: Vec<usize> = (0..8).map(|i| i % 2).collect();
        let unl_fold: Vec<usize> = (0..10).map(|i| i % 2).collect();
        let base =
            cross_fit_with_assignment(&ds, &logistic_kind(), &pos_fold, &unl_fold, 2, 5).unwrap();

        // Reverse the unlabeled rows along with their fold labels.
        let perm: Vec<usize> = (0..10).rev().collect();
        let ds2 = PuDataset::new(
            ds.positives().clone(),
            ds.unlabeled().select_rows(&perm).unwrap(),
            None,
        )
        .unwrap();
        let unl_fold2: Vec<usize> = perm.iter().map(|&i| unl_fold[i]).collect();
        let permuted =
            cross_fit_with_assignment(&ds2, &logistic_kind(), &pos_fold, &unl_fold2, 2, 5).unwrap();

        for (new_pos, &old_pos) in perm.iter().enumerate() {
            assert!(
                (permuted.p0[new_pos] - base.p0[old_pos]).abs() < 1e-9,
                "row {old_pos}"
            );
        }
    }

    #[test]
    fn separable_data_separates_scores() {
        let ds = simulate_gaussian(1.0, 150, 150, 2, 8.0, 4).unwrap();
        let s = cross_fit_scores(&ds, &logistic_kind(), 5, 9).unwrap();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(mean(&s.p1) - mean(&s.p0) > 0.8);
    }
}
