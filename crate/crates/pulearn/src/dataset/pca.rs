//! PCA by symmetric eigendecomposition of the sample covariance.

use nalgebra::{DMatrix, DVector};

use super::FeatureMatrix;
use crate::error::{Error, Result};

/// Fitted PCA basis: centering vector, orthonormal component rows, and the
/// fraction of total variance each component explains.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: Vec<f64>,
    components: FeatureMatrix,
    explained_variance_ratio: Vec<f64>,
}

impl PcaModel {
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// `k x p` matrix with one component per row.
    pub fn components(&self) -> &FeatureMatrix {
        &self.components
    }

    pub fn explained_variance_ratio(&self) -> &[f64] {
        &self.explained_variance_ratio
    }
}

/// Top-`k` principal components of the centered data.
///
/// Signs are fixed by making the first nonzero loading of every component
/// positive, so fits are reproducible across runs.
pub fn pca_fit(data: &FeatureMatrix, k: usize) -> Result<PcaModel> {
    let (rows, cols) = (data.rows(), data.cols());
    if k == 0 || k > cols || rows < 2 || k > rows - 1 {
        return Err(Error::Domain(format!(
            "k = {k} not in [1, min(rows-1, cols)] for {rows}x{cols} data"
        )));
    }

    let mean: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|i| data.get(i, j)).sum::<f64>() / rows as f64)
        .collect();

    let mut centered = DMatrix::<f64>::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            centered[(i, j)] = data.get(i, j) - mean[j];
        }
    }
    let cov = centered.tr_mul(&centered) / (rows as f64 - 1.0);

    let eig = cov.symmetric_eigen();
    let total: f64 = eig.eigenvalues.iter().map(|&l| l.max(0.0)).sum();

    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });

    let mut components = Vec::with_capacity(k * cols);
    let mut ratios = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let col: DVector<f64> = eig.eigenvectors.column(idx).into();
        let sign = col
            .iter()
            .find(|v| v.abs() > 1e-12)
            .map_or(1.0, |v| v.signum());
        components.extend(col.iter().map(|v| v * sign));
        let lambda = eig.eigenvalues[idx].max(0.0);
        ratios.push(if total > 0.0 { lambda / total } else { 0.0 });
    }

    Ok(PcaModel {
        mean,
        components: FeatureMatrix::new(k, cols, components)?,
        explained_variance_ratio: ratios,
    })
}

/// Projects centered rows onto the fitted components.
pub fn pca_transform(model: &PcaModel, data: &FeatureMatrix) -> Result<FeatureMatrix> {
    let p = model.components.cols();
    if data.cols() != p {
        return Err(Error::Schema(format!(
            "data has {} columns, model expects {p}",
            data.cols()
        )));
    }
    let k = model.components.rows();
    let mut out = Vec::with_capacity(data.rows() * k);
    for i in 0..data.rows() {
        let row = data.row(i);
        for c in 0..k {
            let comp = model.components.row(c);
            let z: f64 = row
                .iter()
                .zip(comp)
                .zip(model.mean())
                .map(|((x, w), mu)| (x - mu) * w)
                .sum();
            out.push(z);
        }
    }
    FeatureMatrix::new(data.rows(), k, out)
}
