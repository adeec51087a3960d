//! Cluster prototypes: centers, hyperplanes and subspace weights, and the
//! tagged knowledge bundle carried over from a source domain.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

pub const UNIT_NORM_TOL: f64 = 1e-10;
pub const ROW_SUM_TOL: f64 = 1e-12;

/// `C × d` cluster centers.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterSet {
    centers: Array2<f64>,
}

impl CenterSet {
    pub fn new(centers: Array2<f64>) -> Result<Self> {
        if centers.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("centers"));
        }
        Ok(Self { centers })
    }

    pub fn centers(&self) -> ArrayView2<'_, f64> {
        self.centers.view()
    }

    pub fn center(&self, i: usize) -> ArrayView1<'_, f64> {
        self.centers.row(i)
    }

    pub fn count(&self) -> usize {
        self.centers.nrows()
    }

    pub fn dim(&self) -> usize {
        self.centers.ncols()
    }
}

/// `K` hyperplanes `{x : x·v_i + b_i = 0}` with unit-norm directions.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSet {
    directions: Array2<f64>,
    biases: Array1<f64>,
}

impl PlaneSet {
    pub fn new(directions: Array2<f64>, biases: Array1<f64>) -> Result<Self> {
        if directions.nrows() != biases.len() {
            return Err(Error::Dimension(format!(
                "{} directions but {} biases",
                directions.nrows(),
                biases.len()
            )));
        }
        if directions.iter().chain(biases.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("planes"));
        }
        for (i, row) in directions.rows().into_iter().enumerate() {
            let norm = row.dot(&row).sqrt();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::Invariant(format!(
                    "direction {i} has norm {norm}, expected 1"
                )));
            }
        }
        Ok(Self { directions, biases })
    }

    pub fn directions(&self) -> ArrayView2<'_, f64> {
        self.directions.view()
    }

    pub fn direction(&self, i: usize) -> ArrayView1<'_, f64> {
        self.directions.row(i)
    }

    pub fn biases(&self) -> ArrayView1<'_, f64> {
        self.biases.view()
    }

    pub fn count(&self) -> usize {
        self.directions.nrows()
    }

    pub fn dim(&self) -> usize {
        self.directions.ncols()
    }

    /// Signed residual `x·v_i + b_i`.
    pub fn residual(&self, i: usize, x: ArrayView1<'_, f64>) -> f64 {
        x.dot(&self.directions.row(i)) + self.biases[i]
    }
}

/// `C × d` feature weights; each row is a probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceWeightSet {
    weights: Array2<f64>,
}

impl SubspaceWeightSet {
    pub fn new(weights: Array2<f64>) -> Result<Self> {
        for (i, row) in weights.rows().into_iter().enumerate() {
            if row.iter().any(|w| !(0.0..=1.0).contains(w)) {
                return Err(Error::Invariant(format!("weight row {i} has entries outside [0,1]")));
            }
            let sum = row.sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::Invariant(format!("weight row {i} sums to {sum}")));
            }
        }
        Ok(Self { weights })
    }

    pub fn uniform(clusters: usize, features: usize) -> Self {
        Self {
            weights: Array2::from_elem((clusters, features), 1.0 / features as f64),
        }
    }

    pub(crate) fn from_raw(weights: Array2<f64>) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> ArrayView2<'_, f64> {
        self.weights.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.weights.row(i)
    }

    pub fn count(&self) -> usize {
        self.weights.nrows()
    }

    pub fn dim(&self) -> usize {
        self.weights.ncols()
    }

    /// Indices of the `k` largest weights of row `i`, heaviest first
    /// (ties keep the lower feature index first).
    pub fn top_features(&self, i: usize, k: usize) -> Vec<usize> {
        let row = self.weights.row(i);
        let mut idx: Vec<usize> = (0..row.len()).collect();
        idx.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
        idx.truncate(k);
        idx
    }
}

/// Centers plus feature weights of a subspace clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceKnowledge {
    pub centers: CenterSet,
    pub weights: SubspaceWeightSet,
}

impl SubspaceKnowledge {
    pub fn new(centers: CenterSet, weights: SubspaceWeightSet) -> Result<Self> {
        if centers.centers.dim() != weights.weights.dim() {
            return Err(Error::Dimension(format!(
                "centers {:?} vs weights {:?}",
                centers.centers.dim(),
                weights.weights.dim()
            )));
        }
        Ok(Self { centers, weights })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KnowledgeKind {
    Centers,
    Planes,
    Subspace,
}

impl KnowledgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KnowledgeKind::Centers => "centers",
            KnowledgeKind::Planes => "planes",
            KnowledgeKind::Subspace => "subspace",
        }
    }
}

impl fmt::Display for KnowledgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KnowledgeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centers" => Ok(KnowledgeKind::Centers),
            "planes" => Ok(KnowledgeKind::Planes),
            "subspace" => Ok(KnowledgeKind::Subspace),
            other => Err(Error::InvalidConfig(format!("unknown knowledge kind `{other}`"))),
        }
    }
}

/// Prototypes induced on a source domain. Row `i` guides target cluster `i`.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceKnowledge {
    Centers(CenterSet),
    Planes(PlaneSet),
    Subspace(SubspaceKnowledge),
}

impl SourceKnowledge {
    pub fn kind(&self) -> KnowledgeKind {
        match self {
            SourceKnowledge::Centers(_) => KnowledgeKind::Centers,
            SourceKnowledge::Planes(_) => KnowledgeKind::Planes,
            SourceKnowledge::Subspace(_) => KnowledgeKind::Subspace,
        }
    }

    pub fn cluster_count(&self) -> usize {
        match self {
            SourceKnowledge::Centers(c) => c.count(),
            SourceKnowledge::Planes(p) => p.count(),
            SourceKnowledge::Subspace(s) => s.centers.count(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SourceKnowledge::Centers(c) => c.dim(),
            SourceKnowledge::Planes(p) => p.dim(),
            SourceKnowledge::Subspace(s) => s.centers.dim(),
        }
    }
}

/// The prototypes a fit ends with.
#[derive(Debug, Clone, PartialEq)]
pub enum Prototypes {
    Centers(CenterSet),
    Planes(PlaneSet),
    Subspace {
        centers: CenterSet,
        weights: SubspaceWeightSet,
    },
}

impl Prototypes {
    pub fn centers(&self) -> Option<&CenterSet> {
        match self {
            Prototypes::Centers(c) | Prototypes::Subspace { centers: c, .. } => Some(c),
            Prototypes::Planes(_) => None,
        }
    }

    pub fn planes(&self) -> Option<&PlaneSet> {
        match self {
            Prototypes::Planes(p) => Some(p),
            _ => None,
        }
    }

    pub fn weights(&self) -> Option<&SubspaceWeightSet> {
        match self {
            Prototypes::Subspace { weights, .. } => Some(weights),
            _ => None,
        }
    }

    /// Reinterprets the prototypes as transferable knowledge.
    pub fn into_knowledge(self) -> SourceKnowledge {
        match self {
            Prototypes::Centers(c) => SourceKnowledge::Centers(c),
            Prototypes::Planes(p) => SourceKnowledge::Planes(p),
            Prototypes::Subspace { centers, weights } => {
                SourceKnowledge::Subspace(SubspaceKnowledge { centers, weights })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn plane_directions_must_be_unit() {
        assert!(PlaneSet::new(array![[1.0, 0.0]], array![0.0]).is_ok());
        assert!(matches!(
            PlaneSet::new(array![[1.0, 1.0]], array![0.0]),
            Err(Error::Invariant(_))
        ));
        assert!(matches!(
            PlaneSet::new(array![[1.0, 0.0]], array![0.0, 1.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn weight_rows_must_be_stochastic() {
        assert!(SubspaceWeightSet::new(array![[0.25, 0.75]]).is_ok());
        assert!(SubspaceWeightSet::new(array![[0.5, 0.6]]).is_err());
        assert!(SubspaceWeightSet::new(array![[1.5, -0.5]]).is_err());
    }

    #[test]
    fn top_features_orders_by_weight() {
        let w = SubspaceWeightSet::new(array![[0.1, 0.4, 0.1, 0.4]]).unwrap();
        assert_eq!(w.top_features(0, 3), vec![1, 3, 0]);
    }

    #[test]
    fn kind_round_trips_through_str() {
        for k in [KnowledgeKind::Centers, KnowledgeKind::Planes, KnowledgeKind::Subspace] {
            assert_eq!(k.as_str().parse::<KnowledgeKind>().unwrap(), k);
        }
        assert!("lines".parse::<KnowledgeKind>().is_err());
    }
}
