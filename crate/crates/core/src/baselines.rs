//! Non-transfer FCM, FKPC and FSC, and induction of source knowledge.
//!
//! Each baseline is the matching transfer fit with every balance parameter
//! set to zero and a placeholder knowledge bundle, so the two share one code
//! path.

use ndarray::{Array1, Array2};
use rayon::prelude::*;

use crate::config::AlgoConfig;
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::prototypes::{
    CenterSet, KnowledgeKind, PlaneSet, SourceKnowledge, SubspaceKnowledge, SubspaceWeightSet,
};
use crate::solver::{Observer, RunResult};
use crate::transfer;

pub const DEFAULT_RESTARTS: usize = 10;

fn without_transfer(cfg: &AlgoConfig) -> AlgoConfig {
    AlgoConfig {
        lambda1: 0.0,
        lambda2: 0.0,
        lambda: 0.0,
        ..cfg.clone()
    }
}

fn null_centers(c: usize, d: usize) -> CenterSet {
    CenterSet::new(Array2::zeros((c, d))).expect("zeros are finite")
}

fn null_planes(c: usize, d: usize) -> PlaneSet {
    let mut dirs = Array2::zeros((c, d));
    dirs.column_mut(0).fill(1.0);
    PlaneSet::new(dirs, Array1::zeros(c)).expect("axis directions are unit")
}

fn null_subspace(c: usize, d: usize) -> SubspaceKnowledge {
    SubspaceKnowledge {
        centers: null_centers(c, d),
        weights: SubspaceWeightSet::uniform(c, d),
    }
}

pub fn fcm_fit(x: &DataMatrix, cfg: &AlgoConfig) -> Result<RunResult> {
    fcm_fit_observed(x, cfg, None)
}

pub fn fcm_fit_observed(x: &DataMatrix, cfg: &AlgoConfig, observer: Option<Observer<'_>>) -> Result<RunResult> {
    let k = null_centers(cfg.clusters, x.feature_count());
    transfer::tfcm_fit_observed(x, &k, &without_transfer(cfg), observer)
}

pub fn fkpc_fit(x: &DataMatrix, cfg: &AlgoConfig) -> Result<RunResult> {
    fkpc_fit_observed(x, cfg, None)
}

pub fn fkpc_fit_observed(x: &DataMatrix, cfg: &AlgoConfig, observer: Option<Observer<'_>>) -> Result<RunResult> {
    let k = null_planes(cfg.clusters, x.feature_count());
    transfer::tfkpc_fit_observed(x, &k, &without_transfer(cfg), observer)
}

/// FSC with the fuzzy partition relaxation.
pub fn fsc_fit(x: &DataMatrix, cfg: &AlgoConfig) -> Result<RunResult> {
    fsc_fit_observed(x, cfg, None)
}

pub fn fsc_fit_observed(x: &DataMatrix, cfg: &AlgoConfig, observer: Option<Observer<'_>>) -> Result<RunResult> {
    let k = null_subspace(cfg.clusters, x.feature_count());
    transfer::tfsc_fit_observed(x, &k, &without_transfer(cfg), observer)
}

/// Baseline fit matching a knowledge kind.
pub fn baseline_fit(kind: KnowledgeKind, x: &DataMatrix, cfg: &AlgoConfig) -> Result<RunResult> {
    match kind {
        KnowledgeKind::Centers => fcm_fit(x, cfg),
        KnowledgeKind::Planes => fkpc_fit(x, cfg),
        KnowledgeKind::Subspace => fsc_fit(x, cfg),
    }
}

/// Knowledge plus the restart bookkeeping behind it.
#[derive(Debug, Clone)]
pub struct Induction {
    pub knowledge: SourceKnowledge,
    /// Final objective of every restart, in restart order.
    pub objectives: Vec<f64>,
    pub best: usize,
}

/// Clusters the source data with the baseline matching `kind` and keeps the
/// prototypes of the lowest-objective restart out of [`DEFAULT_RESTARTS`].
pub fn induce_knowledge(source: &DataMatrix, kind: KnowledgeKind, cfg: &AlgoConfig) -> Result<SourceKnowledge> {
    Ok(induce_with_restarts(source, kind, cfg, DEFAULT_RESTARTS)?.knowledge)
}

/// Restart `r` uses seed `cfg.seed + r`. Restarts run in parallel; the
/// selection is made in restart order, first minimum wins.
pub fn induce_with_restarts(
    source: &DataMatrix,
    kind: KnowledgeKind,
    cfg: &AlgoConfig,
    restarts: usize,
) -> Result<Induction> {
    if restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be positive".into()));
    }
    let distinct = source.distinct_count();
    if distinct < cfg.clusters {
        return Err(Error::DegenerateData {
            distinct,
            clusters: cfg.clusters,
        });
    }
    let runs: Vec<RunResult> = (0..restarts)
        .into_par_iter()
        .map(|r| baseline_fit(kind, source, &cfg.clone().with_seed(cfg.seed.wrapping_add(r as u64))))
        .collect::<Result<_>>()?;

    let objectives: Vec<f64> = runs.iter().map(RunResult::final_objective).collect();
    let mut best = 0;
    for (r, &obj) in objectives.iter().enumerate() {
        if obj < objectives[best] {
            best = r;
        }
    }
    let knowledge = runs
        .into_iter()
        .nth(best)
        .expect("restart exists")
        .prototypes
        .into_knowledge();
    Ok(Induction {
        knowledge,
        objectives,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fcm_rejects_single_cluster() {
        let x = DataMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(fcm_fit(&x, &AlgoConfig::new(1)), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn identical_points_are_degenerate() {
        let x = DataMatrix::from_rows(&vec![vec![1.0, 1.0]; 10]).unwrap();
        let err = induce_knowledge(&x, KnowledgeKind::Centers, &AlgoConfig::new(3)).unwrap_err();
        assert!(matches!(err, Error::DegenerateData { distinct: 1, clusters: 3 }));
    }

    #[test]
    fn fsc_finds_the_constant_feature() {
        // Feature 0 is constant within each cluster, features 1..4 are noise.
        // The gap is kept below the noise spread: a wide gap makes the first
        // weight step, taken at near-uniform memberships, drown feature 0.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut rows = Vec::new();
        for c in 0..2 {
            for _ in 0..30 {
                let mut r = vec![4.0 * c as f64];
                r.extend((0..4).map(|_| rng.random_range(0.0..10.0)));
                rows.push(r);
            }
        }
        let x = DataMatrix::from_rows(&rows).unwrap();
        let cfg = AlgoConfig::new(2);
        let best = (0..20)
            .map(|s| fsc_fit(&x, &cfg.clone().with_seed(s)).unwrap())
            .min_by(|a, b| a.final_objective().total_cmp(&b.final_objective()))
            .unwrap();
        let w = best.prototypes.weights().unwrap();
        for i in 0..2 {
            assert_eq!(w.top_features(i, 1), vec![0], "{:?}", w.row(i));
        }
    }

    #[test]
    fn large_tau_flattens_weights() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|_| (0..3).map(|_| rng.random_range(0.0..10.0)).collect())
            .collect();
        let x = DataMatrix::from_rows(&rows).unwrap();
        let cfg = AlgoConfig { tau: 100.0, ..AlgoConfig::new(2) };
        let r = fsc_fit(&x, &cfg).unwrap();
        let w = r.prototypes.weights().unwrap();
        assert!(w.weights().iter().all(|&z| (z - 1.0 / 3.0).abs() < 1e-3), "{w:?}");
    }
}
