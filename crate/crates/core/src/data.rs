//! Sample matrices with optional ground-truth labels.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

/// `N × d` samples, one row per sample, plus optional class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    samples: Array2<f64>,
    labels: Option<Vec<usize>>,
}

impl DataMatrix {
    pub fn new(samples: Array2<f64>, labels: Option<Vec<usize>>) -> Result<Self> {
        let (n, d) = samples.dim();
        if n == 0 || d == 0 {
            return Err(Error::InvalidData(format!(
                "data must have at least one sample and one feature, got {n}x{d}"
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("data matrix"));
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::LengthMismatch(labels.len(), n));
            }
        }
        Ok(Self { samples, labels })
    }

    /// Builds an unlabeled matrix from row vectors.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension("rows have differing lengths".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let samples = Array2::from_shape_vec((rows.len(), d), flat)
            .map_err(|e| Error::InvalidData(e.to_string()))?;
        Self::new(samples, None)
    }

    pub fn with_labels(self, labels: Vec<usize>) -> Result<Self> {
        Self::new(self.samples, Some(labels))
    }

    pub fn samples(&self) -> ArrayView2<'_, f64> {
        self.samples.view()
    }

    pub fn sample(&self, j: usize) -> ArrayView1<'_, f64> {
        self.samples.row(j)
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn sample_count(&self) -> usize {
        self.samples.nrows()
    }

    pub fn feature_count(&self) -> usize {
        self.samples.ncols()
    }

    /// Number of pairwise distinct samples (bitwise comparison).
    pub fn distinct_count(&self) -> usize {
        let mut keys: Vec<Vec<u64>> = self
            .samples
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|v| (v + 0.0).to_bits()).collect())
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    }

    /// Mean of the per-feature population variances.
    pub fn mean_feature_variance(&self) -> f64 {
        self.samples.var_axis(Axis(0), 0.0).mean().unwrap_or(0.0)
    }

    /// Standardizes every feature to zero mean and unit variance.
    /// Constant features are centered but left unscaled.
    pub fn zscored(&self) -> Self {
        let mean = self.samples.mean_axis(Axis(0)).expect("non-empty");
        let std = self.samples.std_axis(Axis(0), 0.0);
        let mut samples = &self.samples - &mean;
        for (mut col, s) in samples.columns_mut().into_iter().zip(std.iter()) {
            if *s > 0.0 {
                col /= *s;
            }
        }
        Self {
            samples,
            labels: self.labels.clone(),
        }
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            samples: &self.samples * factor,
            labels: self.labels.clone(),
        }
    }
}
