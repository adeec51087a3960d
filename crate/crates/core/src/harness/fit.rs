//! Algorithm dispatch, scoring and the JSON report of a single fit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines;
use crate::config::AlgoConfig;
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::metrics::{self, XbMode};
use crate::prototypes::{KnowledgeKind, Prototypes, SourceKnowledge};
use crate::solver::RunResult;
use crate::transfer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Fcm,
    Fkpc,
    Fsc,
    Tfcm,
    Tfkpc,
    Tfsc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Fcm,
        Algorithm::Fkpc,
        Algorithm::Fsc,
        Algorithm::Tfcm,
        Algorithm::Tfkpc,
        Algorithm::Tfsc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Fcm => "fcm",
            Algorithm::Fkpc => "fkpc",
            Algorithm::Fsc => "fsc",
            Algorithm::Tfcm => "tfcm",
            Algorithm::Tfkpc => "tfkpc",
            Algorithm::Tfsc => "tfsc",
        }
    }

    /// Prototype family, which is also the knowledge kind a transfer variant needs.
    pub fn kind(self) -> KnowledgeKind {
        match self {
            Algorithm::Fcm | Algorithm::Tfcm => KnowledgeKind::Centers,
            Algorithm::Fkpc | Algorithm::Tfkpc => KnowledgeKind::Planes,
            Algorithm::Fsc | Algorithm::Tfsc => KnowledgeKind::Subspace,
        }
    }

    pub fn is_transfer(self) -> bool {
        matches!(self, Algorithm::Tfcm | Algorithm::Tfkpc | Algorithm::Tfsc)
    }

    /// Name of the validity index reported for this algorithm.
    pub fn xb_name(self) -> &'static str {
        match self.kind() {
            KnowledgeKind::Centers => "xb",
            KnowledgeKind::Planes => "xb_fkpc",
            KnowledgeKind::Subspace => "xb_fsc",
        }
    }

    /// Balance parameters the algorithm reads.
    pub fn balance_params(self) -> &'static [&'static str] {
        match self {
            Algorithm::Tfcm | Algorithm::Tfsc => &["lambda1", "lambda2"],
            Algorithm::Tfkpc => &["lambda"],
            _ => &[],
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm {s:?}")))
    }
}

/// Runs `algorithm`, enforcing that knowledge is present exactly for the
/// transfer variants and is of the matching kind.
pub fn run_algorithm(
    algorithm: Algorithm,
    x: &DataMatrix,
    knowledge: Option<&SourceKnowledge>,
    cfg: &AlgoConfig,
) -> Result<RunResult> {
    if !algorithm.is_transfer() {
        if knowledge.is_some() {
            return Err(Error::InvalidConfig(format!("{algorithm} does not take source knowledge")));
        }
        return baselines::baseline_fit(algorithm.kind(), x, cfg);
    }
    let k = knowledge.ok_or_else(|| Error::InvalidConfig(format!("{algorithm} requires source knowledge")))?;
    if k.kind() != algorithm.kind() {
        return Err(Error::KindMismatch {
            algorithm: algorithm.to_string(),
            expected: algorithm.kind().to_string(),
            found: k.kind().to_string(),
        });
    }
    match k {
        SourceKnowledge::Centers(v) => transfer::tfcm_fit(x, v, cfg),
        SourceKnowledge::Planes(p) => transfer::tfkpc_fit(x, p, cfg),
        SourceKnowledge::Subspace(s) => transfer::tfsc_fit(x, s, cfg),
    }
}

/// The validity index matching the fit's prototypes. `None` when the
/// prototypes coincide and the index is undefined.
pub fn validity_index(x: &DataMatrix, r: &RunResult, cfg: &AlgoConfig) -> Result<Option<f64>> {
    let value = match &r.prototypes {
        Prototypes::Centers(v) => metrics::xb(x, &r.partition, v, cfg.m, XbMode::Classic),
        Prototypes::Planes(p) => metrics::xb_fkpc(x, &r.partition, p, cfg.m),
        Prototypes::Subspace { centers, weights } => {
            metrics::xb_fsc(x, &r.partition, centers, weights, cfg.m, cfg.tau)
        }
    };
    match value {
        Ok(v) => Ok(Some(v)),
        Err(Error::DegenerateSeparation(..)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// External and internal scores of one fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub rand_index: Option<f64>,
    pub nmi: Option<f64>,
    pub xb: Option<f64>,
}

pub fn score(x: &DataMatrix, r: &RunResult, cfg: &AlgoConfig) -> Result<Scores> {
    let pred = r.labels();
    let (rand_index, nmi) = match x.labels() {
        Some(truth) => (Some(metrics::rand_index(&pred, truth)?), Some(metrics::nmi(&pred, truth)?)),
        None => (None, None),
    };
    Ok(Scores {
        rand_index,
        nmi,
        xb: validity_index(x, r, cfg)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrototypeReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub biases: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<f64>>>,
}

impl From<&Prototypes> for PrototypeReport {
    fn from(p: &Prototypes) -> Self {
        let k = super::knowledge::KnowledgeFile::from(&p.clone().into_knowledge());
        PrototypeReport {
            centers: k.centers,
            directions: k.directions,
            biases: k.biases,
            weights: k.weights,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
    pub reseeds: usize,
    pub objective_trace: Vec<f64>,
    pub labels: Vec<usize>,
    pub prototypes: PrototypeReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rand_index: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nmi: Option<f64>,
    pub xb_index: &'static str,
    pub xb: Option<f64>,
}

pub fn fit_report(algorithm: Algorithm, x: &DataMatrix, r: &RunResult, cfg: &AlgoConfig) -> Result<FitReport> {
    let scores = score(x, r, cfg)?;
    Ok(FitReport {
        algorithm,
        seed: cfg.seed,
        iterations: r.iterations,
        converged: r.converged,
        reseeds: r.reseeds,
        objective_trace: r.objective_trace.clone(),
        labels: r.labels(),
        prototypes: PrototypeReport::from(&r.prototypes),
        rand_index: scores.rand_index,
        nmi: scores.nmi,
        xb_index: algorithm.xb_name(),
        xb: scores.xb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prototypes::{CenterSet, PlaneSet};
    use ndarray::array;

    fn toy() -> DataMatrix {
        DataMatrix::from_rows(&[vec![0.0, 0.0], vec![0.1, 0.0], vec![5.0, 5.0], vec![5.1, 5.0]])
            .unwrap()
            .with_labels(vec![0, 0, 1, 1])
            .unwrap()
    }

    #[test]
    fn knowledge_rules() {
        let x = toy();
        let cfg = AlgoConfig::new(2);
        let centers = SourceKnowledge::Centers(CenterSet::new(array![[0.0, 0.0], [5.0, 5.0]]).unwrap());
        let planes = SourceKnowledge::Planes(PlaneSet::new(array![[1.0, 0.0], [1.0, 0.0]], array![0.0, -5.0]).unwrap());
        assert!(matches!(run_algorithm(Algorithm::Fcm, &x, Some(&centers), &cfg), Err(Error::InvalidConfig(_))));
        assert!(matches!(run_algorithm(Algorithm::Tfcm, &x, None, &cfg), Err(Error::InvalidConfig(_))));
        assert!(matches!(
            run_algorithm(Algorithm::Tfkpc, &x, Some(&centers), &cfg),
            Err(Error::KindMismatch { .. })
        ));
        assert!(run_algorithm(Algorithm::Tfkpc, &x, Some(&planes), &cfg).is_ok());
        let r = run_algorithm(Algorithm::Tfcm, &x, Some(&centers), &cfg.clone().with_lambdas(1.0, 1.0)).unwrap();
        let rep = fit_report(Algorithm::Tfcm, &x, &r, &cfg).unwrap();
        assert_eq!(rep.rand_index, Some(1.0));
        assert_eq!(rep.xb_index, "xb");
        assert!(rep.xb.unwrap() < 0.01);
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("kmeans".parse::<Algorithm>().is_err());
    }
}
