//! Versioned JSON form of [`SourceKnowledge`].

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prototypes::{CenterSet, KnowledgeKind, PlaneSet, SourceKnowledge, SubspaceKnowledge, SubspaceWeightSet};

pub const KNOWLEDGE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnowledgeFile {
    pub version: u32,
    pub kind: String,
    #[serde(rename = "C")]
    pub clusters: usize,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub biases: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<f64>>>,
}

fn rows(a: ndarray::ArrayView2<'_, f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn matrix(name: &str, rows: Option<Vec<Vec<f64>>>, c: usize, d: usize) -> Result<Array2<f64>> {
    let rows = rows.ok_or_else(|| Error::InvalidData(format!("knowledge is missing `{name}`")))?;
    if rows.len() != c || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Dimension(format!("`{name}` must be {c} rows of {d} values")));
    }
    Ok(Array2::from_shape_vec((c, d), rows.into_iter().flatten().collect()).expect("shape checked"))
}

impl From<&SourceKnowledge> for KnowledgeFile {
    fn from(k: &SourceKnowledge) -> Self {
        let mut f = KnowledgeFile {
            version: KNOWLEDGE_VERSION,
            kind: k.kind().as_str().to_string(),
            clusters: k.cluster_count(),
            d: k.dim(),
            centers: None,
            directions: None,
            biases: None,
            weights: None,
        };
        match k {
            SourceKnowledge::Centers(v) => f.centers = Some(rows(v.centers())),
            SourceKnowledge::Planes(p) => {
                f.directions = Some(rows(p.directions()));
                f.biases = Some(p.biases().to_vec());
            }
            SourceKnowledge::Subspace(s) => {
                f.centers = Some(rows(s.centers.centers()));
                f.weights = Some(rows(s.weights.weights()));
            }
        }
        f
    }
}

impl TryFrom<KnowledgeFile> for SourceKnowledge {
    type Error = Error;

    fn try_from(f: KnowledgeFile) -> Result<Self> {
        if f.version != KNOWLEDGE_VERSION {
            return Err(Error::InvalidData(format!(
                "unsupported knowledge version {} (expected {KNOWLEDGE_VERSION})",
                f.version
            )));
        }
        let kind: KnowledgeKind = f.kind.parse()?;
        let (c, d) = (f.clusters, f.d);
        let unexpected = |name: &str, present: bool| -> Result<()> {
            if present {
                Err(Error::InvalidData(format!("`{name}` does not belong to {kind} knowledge")))
            } else {
                Ok(())
            }
        };
        Ok(match kind {
            KnowledgeKind::Centers => {
                unexpected("directions", f.directions.is_some())?;
                unexpected("biases", f.biases.is_some())?;
                unexpected("weights", f.weights.is_some())?;
                SourceKnowledge::Centers(CenterSet::new(matrix("centers", f.centers, c, d)?)?)
            }
            KnowledgeKind::Planes => {
                unexpected("centers", f.centers.is_some())?;
                unexpected("weights", f.weights.is_some())?;
                let biases = f.biases.ok_or_else(|| Error::InvalidData("knowledge is missing `biases`".into()))?;
                if biases.len() != c {
                    return Err(Error::Dimension(format!("`biases` must have {c} values")));
                }
                let dirs = matrix("directions", f.directions, c, d)?;
                SourceKnowledge::Planes(PlaneSet::new(dirs, Array1::from(biases))?)
            }
            KnowledgeKind::Subspace => {
                unexpected("directions", f.directions.is_some())?;
                unexpected("biases", f.biases.is_some())?;
                SourceKnowledge::Subspace(SubspaceKnowledge::new(
                    CenterSet::new(matrix("centers", f.centers, c, d)?)?,
                    SubspaceWeightSet::new(matrix("weights", f.weights, c, d)?)?,
                )?)
            }
        })
    }
}

pub fn save_knowledge(path: &Path, k: &SourceKnowledge) -> Result<()> {
    let text = serde_json::to_string_pretty(&KnowledgeFile::from(k)).expect("plain data serializes");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_knowledge(path: &Path) -> Result<SourceKnowledge> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: KnowledgeFile = serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
    SourceKnowledge::try_from(file).map_err(|e| Error::parse(path, e))
}
