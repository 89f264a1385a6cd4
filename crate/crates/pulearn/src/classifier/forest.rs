//! Random forest of Gini-grown CART trees with out-of-bag probabilities.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ScoreSet;
use crate::dataset::{FeatureMatrix, PuDataset};
use crate::error::{Error, Result};
use crate::seeding;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features tried per split; `None` means `ceil(sqrt(p))`.
    pub mtry: Option<usize>,
    pub min_leaf: usize,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self { n_trees: 500, mtry: None, min_leaf: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Node {
    /// Split feature, or -1 for a leaf.
    feature: i32,
    threshold: f64,
    left: u32,
    right: u32,
    /// Class-1 fraction of the node's bootstrap rows.
    value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            let node = &self.nodes[at];
            if node.feature < 0 {
                return node.value;
            }
            at = if row[node.feature as usize] <= node.threshold {
                node.left as usize
            } else {
                node.right as usize
            };
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    trees: Vec<Tree>,
    /// Sorted out-of-bag row indices per tree (complement of the bootstrap).
    oob_sets: Vec<Vec<u32>>,
    pub n_trees: usize,
    pub mtry: usize,
    pub min_leaf: usize,
    pub seed: u64,
    n_train_rows: usize,
    importances: Vec<f64>,
}

/// Diagnostics from out-of-bag scoring.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OobDiagnostics {
    /// Rows that were in-bag for every tree and fell back to the all-tree
    /// average.
    pub rows_without_oob: usize,
}

/// Bootstrap draw for one tree; deterministic given (seed, tree index).
fn bootstrap_rows(rng: &mut ChaCha8Rng, n_rows: usize) -> (Vec<u32>, Vec<u32>) {
    let mut rows = Vec::with_capacity(n_rows);
    let mut in_bag = vec![false; n_rows];
    for _ in 0..n_rows {
        let r = rng.random_range(0..n_rows);
        rows.push(r as u32);
        in_bag[r] = true;
    }
    let oob = (0..n_rows as u32).filter(|&i| !in_bag[i as usize]).collect();
    (rows, oob)
}

struct TreeBuilder<'a> {
    features: &'a FeatureMatrix,
    labels: &'a [u8],
    mtry: usize,
    min_leaf: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
    scratch: Vec<(f64, u8)>,
    feat_pool: Vec<u32>,
    importance: Vec<f64>,
}

impl<'a> TreeBuilder<'a> {
    /// Children cost `n_l * gini_l + n_r * gini_r` uses counts only:
    /// `n * gini = n - (pos^2 + neg^2) / n`.
    fn side_cost(pos: f64, total: f64) -> f64 {
        let neg = total - pos;
        total - (pos * pos + neg * neg) / total
    }

    fn best_split(&mut self, rows: &[u32]) -> Option<(u32, f64, f64)> {
        let len = rows.len();
        let p = self.features.cols();

        // Partial Fisher-Yates; candidates evaluated in ascending feature
        // order so Gini ties resolve to the lowest feature index.
        for i in 0..self.mtry {
            let j = self.rng.random_range(i..p);
            self.feat_pool.swap(i, j);
        }
        let mut candidates: Vec<u32> = self.feat_pool[..self.mtry].to_vec();
        candidates.sort_unstable();

        let mut best: Option<(f64, u32, f64)> = None;
        for &f in &candidates {
            self.scratch.clear();
            for &r in rows {
                self.scratch
                    .push((self.features.get(r as usize, f as usize), self.labels[r as usize]));
            }
            self.scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

            let mut pos_left = 0.0f64;
            let total_pos: f64 = self.scratch.iter().map(|&(_, y)| y as f64).sum();
            for k in 1..len {
                pos_left += self.scratch[k - 1].1 as f64;
                if k < self.min_leaf || len - k < self.min_leaf {
                    continue;
                }
                let (lo, hi) = (self.scratch[k - 1].0, self.scratch[k].0);
                if lo == hi {
                    continue;
                }
                let cost = Self::side_cost(pos_left, k as f64)
                    + Self::side_cost(total_pos - pos_left, (len - k) as f64);
                // Strict improvement keeps the lowest threshold on ties.
                if best.map_or(true, |(c, _, _)| cost < c) {
                    best = Some((cost, f, (lo + hi) / 2.0));
                }
            }
        }
        best.map(|(cost, f, thr)| (f, thr, cost))
    }

    /// Grows the tree over `rows[start..end]`, partitioning in place.
    fn grow(&mut self, rows: &mut Vec<u32>) {
        // (node id, start, end) work list; bounded depth without recursion.
        let mut stack = vec![(0usize, 0usize, rows.len())];
        self.nodes.push(Node { feature: -1, threshold: 0.0, left: 0, right: 0, value: 0.0 });

        while let Some((node_id, start, end)) = stack.pop() {
            let slice = &rows[start..end];
            let len = end - start;
            let pos: f64 = slice.iter().map(|&r| self.labels[r as usize] as f64).sum();
            self.nodes[node_id].value = pos / len as f64;

            if pos == 0.0 || pos == len as f64 || len < 2 * self.min_leaf {
                continue;
            }
            let Some((feature, threshold, cost)) = self.best_split(&rows[start..end]) else {
                continue;
            };

            self.importance[feature as usize] +=
                Self::side_cost(pos, len as f64) - cost;

            // Two-pointer partition: left of the boundary goes <= threshold.
            let slice = &mut rows[start..end];
            let mut lo = 0usize;
            let mut hi = len;
            while lo < hi {
                if self.features.get(slice[lo] as usize, feature as usize) <= threshold {
                    lo += 1;
                } else {
                    hi -= 1;
                    slice.swap(lo, hi);
                }
            }
            debug_assert!(lo >= self.min_leaf && len - lo >= self.min_leaf);

            let left = self.nodes.len() as u32;
            let right = left + 1;
            self.nodes.push(Node { feature: -1, threshold: 0.0, left: 0, right: 0, value: 0.0 });
            self.nodes.push(Node { feature: -1, threshold: 0.0, left: 0, right: 0, value: 0.0 });
            let node = &mut self.nodes[node_id];
            node.feature = feature as i32;
            node.threshold = threshold;
            node.left = left;
            node.right = right;
            stack.push((left as usize, start, start + lo));
            stack.push((right as usize, start + lo, end));
        }
    }
}

fn fit_one_tree(
    features: &FeatureMatrix,
    labels: &[u8],
    mtry: usize,
    min_leaf: usize,
    tree_seed: u64,
) -> (Tree, Vec<u32>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
    let (mut rows, oob) = bootstrap_rows(&mut rng, features.rows());
    let mut builder = TreeBuilder {
        features,
        labels,
        mtry,
        min_leaf,
        rng,
        nodes: Vec::new(),
        scratch: Vec::with_capacity(features.rows()),
        feat_pool: (0..features.cols() as u32).collect(),
        importance: vec![0.0; features.cols()],
    };
    builder.grow(&mut rows);
    (Tree { nodes: builder.nodes }, oob, builder.importance)
}

impl ForestModel {
    /// Fits `n_trees` CART trees on bootstraps of the given rows. Trees are
    /// grown in parallel from per-tree RNG streams, so parallel and serial
    /// runs produce the same model.
    pub fn fit(
        features: &FeatureMatrix,
        labels: &[u8],
        config: &ForestConfig,
        seed: u64,
    ) -> Result<Self> {
        if config.n_trees == 0 {
            return Err(Error::Config("forest needs at least one tree".into()));
        }
        if config.min_leaf == 0 {
            return Err(Error::Config("min_leaf must be at least 1".into()));
        }
        if labels.len() != features.rows() {
            return Err(Error::Contract("one label per row required".into()));
        }
        if features.rows() < 2 {
            return Err(Error::Domain("need at least two rows to fit a forest".into()));
        }
        let p = features.cols();
        let mtry = match config.mtry {
            Some(m) if m == 0 || m > p => {
                return Err(Error::Config(format!("mtry {m} outside [1, {p}]")));
            }
            Some(m) => m,
            None => (p as f64).sqrt().ceil() as usize,
        };

        let fitted: Vec<(Tree, Vec<u32>, Vec<f64>)> = (0..config.n_trees)
            .into_par_iter()
            .map(|t| fit_one_tree(features, labels, mtry, config.min_leaf, seeding::derive(seed, t as u64)))
            .collect();

        let n = features.rows() as f64;
        let mut importances = vec![0.0; p];
        for (_, _, imp) in &fitted {
            for (acc, v) in importances.iter_mut().zip(imp) {
                *acc += v / n;
            }
        }
        let total: f64 = importances.iter().sum();
        if total > 0.0 {
            for v in &mut importances {
                *v /= total;
            }
        }

        let mut trees = Vec::with_capacity(config.n_trees);
        let mut oob_sets = Vec::with_capacity(config.n_trees);
        for (tree, oob, _) in fitted {
            trees.push(tree);
            oob_sets.push(oob);
        }
        Ok(Self {
            trees,
            oob_sets,
            n_trees: config.n_trees,
            mtry,
            min_leaf: config.min_leaf,
            seed,
            n_train_rows: features.rows(),
            importances,
        })
    }

    /// All-tree average probability per row.
    pub fn score_rows(&self, features: &FeatureMatrix) -> Result<Vec<f64>> {
        if features.cols() == 0 {
            return Err(Error::Contract("empty feature matrix".into()));
        }
        Ok((0..features.rows())
            .into_par_iter()
            .map(|i| {
                let row = features.row(i);
                let sum: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
                sum / self.trees.len() as f64
            })
            .collect())
    }

    /// Normalized mean decrease in Gini impurity per feature.
    pub fn feature_importances(&self) -> &[f64] {
        &self.importances
    }

    pub fn n_train_rows(&self) -> usize {
        self.n_train_rows
    }

    /// Out-of-bag row indices per tree.
    pub fn oob_sets(&self) -> &[Vec<u32>] {
        &self.oob_sets
    }

    /// Out-of-bag score per training row: the average leaf probability over
    /// the trees whose bootstrap excluded the row. Rows in-bag everywhere
    /// fall back to the all-tree average and are counted in the diagnostics.
    pub fn oob_score_rows(&self, features: &FeatureMatrix) -> Result<(Vec<f64>, OobDiagnostics)> {
        if features.rows() != self.n_train_rows {
            return Err(Error::Contract(format!(
                "model was trained on {} rows, got {}",
                self.n_train_rows,
                features.rows()
            )));
        }
        let n = features.rows();
        let mut sums = vec![0.0f64; n];
        let mut counts = vec![0u32; n];
        for (tree, oob) in self.trees.iter().zip(&self.oob_sets) {
            for &i in oob {
                sums[i as usize] += tree.predict(features.row(i as usize));
                counts[i as usize] += 1;
            }
        }
        let mut diagnostics = OobDiagnostics::default();
        let mut scores = Vec::with_capacity(n);
        for i in 0..n {
            if counts[i] == 0 {
                diagnostics.rows_without_oob += 1;
                let all: f64 = self.trees.iter().map(|t| t.predict(features.row(i))).sum();
                scores.push(all / self.trees.len() as f64);
            } else {
                scores.push(sums[i] / counts[i] as f64);
            }
        }
        Ok((scores, diagnostics))
    }
}

/// Fits a forest on the stacked P-vs-U problem (pseudo-label 1 for P).
pub fn train_forest(data: &PuDataset, config: &ForestConfig, seed: u64) -> Result<ForestModel> {
    let (features, labels) = data.stacked()?;
    ForestModel::fit(&features, &labels, config, seed)
}

/// Out-of-bag [`ScoreSet`] for the dataset the model was trained on.
pub fn oob_scores(model: &ForestModel, data: &PuDataset) -> Result<(ScoreSet, OobDiagnostics)> {
    let (features, _) = data.stacked()?;
    let (scores, diagnostics) = model.oob_score_rows(&features)?;
    let (p1, p0) = scores.split_at(data.m());
    Ok((ScoreSet::new(p1.to_vec(), p0.to_vec(), data.pi())?, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::simulate_gaussian;

    fn one_d_separated(m: usize, n: usize) -> PuDataset {
        let p = FeatureMatrix::new(m, 1, vec![1.0; m]).unwrap();
        let u = FeatureMatrix::new(n, 1, vec![0.0; n]).unwrap();
        PuDataset::new(p, u, None).unwrap()
    }

    #[test]
    fn separated_singletons_score_exactly() {
        let ds = one_d_separated(20, 20);
        let cfg = ForestConfig { n_trees: 50, mtry: None, min_leaf: 1 };
        let model = train_forest(&ds, &cfg, 3).unwrap();
        let (features, _) = ds.stacked().unwrap();
        let scores = model.score_rows(&features).unwrap();
        for (i, s) in scores.iter().enumerate() {
            let want = if i < 20 { 1.0 } else { 0.0 };
            assert_eq!(*s, want, "row {i}");
        }
    }

    #[test]
    fn zero_trees_is_config_error() {
        let ds = one_d_separated(5, 5);
        let cfg = ForestConfig { n_trees: 0, mtry: None, min_leaf: 1 };
        assert!(matches!(train_forest(&ds, &cfg, 0), Err(Error::Config(_))));
    }

    #[test]
    fn mtry_out_of_range_rejected() {
        let ds = one_d_separated(5, 5);
        let cfg = ForestConfig { n_trees: 2, mtry: Some(2), min_leaf: 1 };
        assert!(matches!(train_forest(&ds, &cfg, 0), Err(Error::Config(_))));
    }

    #[test]
    fn same_seed_same_model() {
        let ds = simulate_gaussian(0.5, 30, 40, 3, 2.0, 9).unwrap();
        let cfg = ForestConfig { n_trees: 25, mtry: None, min_leaf: 2 };
        let a = train_forest(&ds, &cfg, 11).unwrap();
        let b = train_forest(&ds, &cfg, 11).unwrap();
        assert_eq!(a, b);
        let c = train_forest(&ds, &cfg, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_identical_rows_become_leaves() {
        // All rows identical with mixed labels: no split exists, every tree
        // is a single leaf at the pooled class fraction.
        let p = FeatureMatrix::new(3, 2, vec![1.0; 6]).unwrap();
        let u = FeatureMatrix::new(6, 2, vec![1.0; 12]).unwrap();
        let ds = PuDataset::new(p, u, None).unwrap();
        let cfg = ForestConfig { n_trees: 20, mtry: None, min_leaf: 1 };
        let model = train_forest(&ds, &cfg, 1).unwrap();
        let (features, _) = ds.stacked().unwrap();
        let scores = model.score_rows(&features).unwrap();
        // Every tree predicts its bootstrap's positive fraction; the average
        // stays strictly inside (0,1) and is identical across rows.
        for s in &scores {
            assert!((*s - scores[0]).abs() < 1e-15);
        }
        assert!(scores[0] > 0.0 && scores[0] < 1.0);
    }

    #[test]
    fn oob_rows_never_in_own_bootstrap() {
        let ds = simulate_gaussian(0.4, 25, 35, 2, 2.0, 5).unwrap();
        let cfg = ForestConfig { n_trees: 10, mtry: None, min_leaf: 2 };
        let model = train_forest(&ds, &cfg, 21).unwrap();
        // Re-derive each tree's bootstrap from the same seed stream and
        // check the stored OOB set is exactly the complement.
        for t in 0..model.n_trees {
            let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive(21, t as u64));
            let (rows, oob) = bootstrap_rows(&mut rng, 60);
            assert_eq!(&oob, &model.oob_sets()[t]);
            for &i in &oob {
                assert!(!rows.contains(&i), "tree {t} row {i}");
            }
        }
    }

    #[test]
    fn oob_mean_value_matches_hand_average() {
        // A row that is OOB for trees predicting {0.2, 0.6} must score 0.4.
        // Build that situation synthetically by averaging two known trees.
        let tree_a = Tree {
            nodes: vec![Node { feature: -1, threshold: 0.0, left: 0, right: 0, value: 0.2 }],
        };
        let tree_b = Tree {
            nodes: vec![Node { feature: -1, threshold: 0.0, left: 0, right: 0, value: 0.6 }],
        };
        let model = ForestModel {
            trees: vec![tree_a, tree_b],
            oob_sets: vec![vec![0], vec![0]],
            n_trees: 2,
            mtry: 1,
            min_leaf: 1,
            seed: 0,
            n_train_rows: 1,
            importances: vec![0.0],
        };
        let features = FeatureMatrix::new(1, 1, vec![0.5]).unwrap();
        let (scores, diag) = model.oob_score_rows(&features).unwrap();
        assert!((scores[0] - 0.4).abs() < 1e-15);
        assert_eq!(diag.rows_without_oob, 0);
    }

    #[test]
    fn single_tree_oob_fraction_near_e_inv() {
        let ds = simulate_gaussian(0.5, 500, 500, 2, 1.0, 8).unwrap();
        let cfg = ForestConfig { n_trees: 1, mtry: None, min_leaf: 5 };
        let model = train_forest(&ds, &cfg, 17).unwrap();
        let frac = model.oob_sets()[0].len() as f64 / 1000.0;
        assert!((frac - 0.368).abs() < 0.05, "OOB fraction {frac}");
        let (_, diag) = oob_scores(&model, &ds).unwrap();
        assert_eq!(diag.rows_without_oob, 1000 - model.oob_sets()[0].len());
    }

    #[test]
    fn separable_oob_gap() {
        let ds = simulate_gaussian(1.0, 200, 200, 2, 8.0, 13).unwrap();
        let cfg = ForestConfig { n_trees: 200, mtry: None, min_leaf: 5 };
        let model = train_forest(&ds, &cfg, 31).unwrap();
        let (scores, _) = oob_scores(&model, &ds).unwrap();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(mean(&scores.p1) - mean(&scores.p0) > 0.8);
    }

    #[test]
    fn model_round_trips_through_json() {
        let ds = simulate_gaussian(0.5, 10, 12, 2, 3.0, 2).unwrap();
        let cfg = ForestConfig { n_trees: 5, mtry: None, min_leaf: 2 };
        let model = train_forest(&ds, &cfg, 77).unwrap();
        let text = serde_json::to_string(&model).unwrap();
        let back: ForestModel = serde_json::from_str(&text).unwrap();
        assert_eq!(model, back);
    }
}
