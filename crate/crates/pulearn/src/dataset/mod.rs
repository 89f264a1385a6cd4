//! Data containers, CSV ingestion, PCA preprocessing, and the synthetic
//! generators used by the benchmark sweeps.

mod io;
mod pca;
mod simulate;

pub use io::{load_csv_pair, load_csv_single, write_dataset_csv};
pub use pca::{pca_fit, pca_transform, PcaModel};
pub use simulate::{simulate_gaussian, simulate_waveform, simulate_waveform_with_noise, waveform_bases};

use crate::error::{Error, Result};

/// Dense row-major feature matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain(format!("matrix must be non-empty, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Contract(format!(
                "buffer holds {} values, expected {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("matrix contains NaN or infinite entries".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &FeatureMatrix) -> Result<FeatureMatrix> {
        if self.cols != other.cols {
            return Err(Error::Schema(format!(
                "cannot stack {} columns onto {}",
                other.cols, self.cols
            )));
        }
        let mut data = Vec::with_capacity((self.rows + other.rows) * self.cols);
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        FeatureMatrix::new(self.rows + other.rows, self.cols, data)
    }

    /// New matrix keeping only the given columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Result<FeatureMatrix> {
        if keep.is_empty() {
            return Err(Error::Domain("no columns selected".into()));
        }
        if let Some(&bad) = keep.iter().find(|&&j| j >= self.cols) {
            return Err(Error::Contract(format!("column {bad} out of range ({} cols)", self.cols)));
        }
        let mut data = Vec::with_capacity(self.rows * keep.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(keep.iter().map(|&j| row[j]));
        }
        FeatureMatrix::new(self.rows, keep.len(), data)
    }

    /// New matrix keeping only the given rows, in the given order.
    pub fn select_rows(&self, keep: &[usize]) -> Result<FeatureMatrix> {
        if keep.is_empty() {
            return Err(Error::Domain("no rows selected".into()));
        }
        if let Some(&bad) = keep.iter().find(|&&i| i >= self.rows) {
            return Err(Error::Contract(format!("row {bad} out of range ({} rows)", self.rows)));
        }
        let mut data = Vec::with_capacity(keep.len() * self.cols);
        for &i in keep {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix::new(keep.len(), self.cols, data)
    }
}

/// A positive sample and an unlabeled mixture sample over the same features.
///
/// `truth` carries the hidden per-unlabeled-row class (1 = positive
/// component) when the data came from a simulator or a ground-truth column;
/// it is only ever read by evaluation code.
#[derive(Debug, Clone, PartialEq)]
pub struct PuDataset {
    positives: FeatureMatrix,
    unlabeled: FeatureMatrix,
    truth: Option<Vec<u8>>,
    pi: f64,
}

impl PuDataset {
    pub fn new(
        positives: FeatureMatrix,
        unlabeled: FeatureMatrix,
        truth: Option<Vec<u8>>,
    ) -> Result<Self> {
        if positives.cols() != unlabeled.cols() {
            return Err(Error::Schema(format!(
                "positive rows have {} columns, unlabeled rows have {}",
                positives.cols(),
                unlabeled.cols()
            )));
        }
        if let Some(t) = &truth {
            if t.len() != unlabeled.rows() {
                return Err(Error::Schema(format!(
                    "truth has {} labels for {} unlabeled rows",
                    t.len(),
                    unlabeled.rows()
                )));
            }
            if t.iter().any(|&v| v > 1) {
                return Err(Error::Schema("truth labels must be 0 or 1".into()));
            }
        }
        let m = positives.rows() as f64;
        let n = unlabeled.rows() as f64;
        let pi = m / (m + n);
        Ok(Self { positives, unlabeled, truth, pi })
    }

    pub fn positives(&self) -> &FeatureMatrix {
        &self.positives
    }

    pub fn unlabeled(&self) -> &FeatureMatrix {
        &self.unlabeled
    }

    pub fn truth(&self) -> Option<&[u8]> {
        self.truth.as_deref()
    }

    pub fn m(&self) -> usize {
        self.positives.rows()
    }

    pub fn n(&self) -> usize {
        self.unlabeled.rows()
    }

    /// Known labeled fraction `m / (m + n)`.
    pub fn pi(&self) -> f64 {
        self.pi
    }

    /// Positive rows stacked over unlabeled rows with pseudo-labels
    /// (1 for P, 0 for U).
    pub fn stacked(&self) -> Result<(FeatureMatrix, Vec<u8>)> {
        let features = self.positives.vstack(&self.unlabeled)?;
        let mut labels = vec![1u8; self.m()];
        labels.extend(std::iter::repeat(0u8).take(self.n()));
        Ok((features, labels))
    }

    /// Restrict both samples to a feature subset.
    pub fn select_features(&self, keep: &[usize]) -> Result<PuDataset> {
        PuDataset::new(
            self.positives.select_columns(keep)?,
            self.unlabeled.select_columns(keep)?,
            self.truth.clone(),
        )
    }
}
