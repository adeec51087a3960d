//! Transfer fuzzy c-means: FCM plus a pull of each sample toward the source
//! center of its cluster (`λ₁`) and of each target center toward its source
//! counterpart (`λ₂`).

use ndarray::{Array2, ArrayView1};

use crate::config::AlgoConfig;
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::partition::{memberships_from_distances, FuzzyPartition};
use crate::prototypes::{CenterSet, Prototypes};
use crate::solver::{self, cluster_mass, Model, Observer, RunResult, EMPTY_CLUSTER};

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(p, q)| (p - q) * (p - q)).sum()
}

fn check_shapes(x: &DataMatrix, clusters: usize, centers: &[&CenterSet]) -> Result<()> {
    for c in centers {
        if c.dim() != x.feature_count() {
            return Err(Error::Dimension(format!(
                "centers have {} features, data has {}",
                c.dim(),
                x.feature_count()
            )));
        }
        if c.count() != clusters {
            return Err(Error::Dimension(format!(
                "{} centers for {clusters} clusters",
                c.count()
            )));
        }
    }
    Ok(())
}

/// `Σ_ij u^m ‖x_j - v_i‖² + λ₁ Σ_ij u^m ‖x_j - ṽ_i‖² + λ₂ Σ_i (Σ_j u^m) ‖ṽ_i - v_i‖²`.
pub fn tfcm_objective(
    x: &DataMatrix,
    u: &FuzzyPartition,
    v: &CenterSet,
    k: &CenterSet,
    m: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<f64> {
    if u.sample_count() != x.sample_count() {
        return Err(Error::Dimension("partition and data sample counts differ".into()));
    }
    check_shapes(x, u.cluster_count(), &[v, k])?;
    let (mut fit, mut assign, mut matching) = (0.0, 0.0, 0.0);
    for i in 0..u.cluster_count() {
        let mut mass = 0.0;
        for j in 0..x.sample_count() {
            let w = u.get(i, j).powf(m);
            mass += w;
            fit += w * sq_dist(x.sample(j), v.center(i));
            assign += w * sq_dist(x.sample(j), k.center(i));
        }
        matching += mass * sq_dist(k.center(i), v.center(i));
    }
    Ok(fit + lambda1 * assign + lambda2 * matching)
}

/// Center numerators/denominators; empty clusters are returned separately
/// and keep their row of `previous` (zeros if none).
fn centers_from_powered(
    x: &DataMatrix,
    powered: &Array2<f64>,
    k: &CenterSet,
    lambda2: f64,
    previous: Option<&Array2<f64>>,
) -> (Array2<f64>, Vec<usize>) {
    let (c, d) = (powered.nrows(), x.feature_count());
    let mass = cluster_mass(powered);
    let weighted = powered.dot(&x.samples());
    let mut v = previous.cloned().unwrap_or_else(|| Array2::zeros((c, d)));
    let mut empty = Vec::new();
    for i in 0..c {
        if mass[i] <= EMPTY_CLUSTER {
            empty.push(i);
            continue;
        }
        let denom = (1.0 + lambda2) * mass[i];
        for f in 0..d {
            v[[i, f]] = (weighted[[i, f]] + lambda2 * k.center(i)[f] * mass[i]) / denom;
        }
    }
    (v, empty)
}

/// `v_i = (Σ_j u^m x_j + λ₂ ṽ_i Σ_j u^m) / ((1 + λ₂) Σ_j u^m)`.
pub fn tfcm_center_update(
    x: &DataMatrix,
    u: &FuzzyPartition,
    k: &CenterSet,
    m: f64,
    lambda2: f64,
) -> Result<CenterSet> {
    check_shapes(x, u.cluster_count(), &[k])?;
    let (v, empty) = centers_from_powered(x, &u.powered(m), k, lambda2, None);
    if let Some(&cluster) = empty.first() {
        return Err(Error::DegenerateCluster { cluster });
    }
    CenterSet::new(v)
}

fn distances(x: &DataMatrix, v: &Array2<f64>, k: &CenterSet, lambda1: f64, lambda2: f64) -> Array2<f64> {
    let c = v.nrows();
    Array2::from_shape_fn((c, x.sample_count()), |(i, j)| {
        let vi = v.row(i);
        let ki = k.center(i);
        sq_dist(x.sample(j), vi) + lambda1 * sq_dist(x.sample(j), ki) + lambda2 * sq_dist(ki, vi)
    })
}

/// Membership rule with `D_ij = ‖x_j - v_i‖² + λ₁‖x_j - ṽ_i‖² + λ₂‖ṽ_i - v_i‖²`.
pub fn tfcm_membership_update(
    x: &DataMatrix,
    v: &CenterSet,
    k: &CenterSet,
    m: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<FuzzyPartition> {
    check_shapes(x, v.count(), &[v, k])?;
    let d = distances(x, &v.centers().to_owned(), k, lambda1, lambda2);
    Ok(memberships_from_distances(&d, m))
}

struct Tfcm<'k> {
    knowledge: &'k CenterSet,
    lambda1: f64,
    lambda2: f64,
    centers: Option<Array2<f64>>,
}

impl Model for Tfcm<'_> {
    fn update_prototypes(&mut self, x: &DataMatrix, powered: &Array2<f64>) -> Result<Vec<usize>> {
        let (v, empty) =
            centers_from_powered(x, powered, self.knowledge, self.lambda2, self.centers.as_ref());
        self.centers = Some(v);
        Ok(empty)
    }

    fn reseed(&mut self, x: &DataMatrix, cluster: usize, sample: usize) {
        if let Some(v) = self.centers.as_mut() {
            v.row_mut(cluster).assign(&x.sample(sample));
        }
    }

    fn distances(&self, x: &DataMatrix) -> Array2<f64> {
        let v = self.centers.as_ref().expect("centers updated before distances");
        distances(x, v, self.knowledge, self.lambda1, self.lambda2)
    }

    fn prototypes(&self) -> Prototypes {
        let v = self.centers.clone().expect("centers updated before use");
        Prototypes::Centers(CenterSet::new(v).expect("finite centers"))
    }
}

/// Runs TFCM: random `U(0)`, then center and membership updates until
/// `‖ΔU‖_F < ε` or `max_iter` sweeps.
pub fn tfcm_fit(x: &DataMatrix, k: &CenterSet, cfg: &AlgoConfig) -> Result<RunResult> {
    tfcm_fit_observed(x, k, cfg, None)
}

pub fn tfcm_fit_observed(
    x: &DataMatrix,
    k: &CenterSet,
    cfg: &AlgoConfig,
    observer: Option<Observer<'_>>,
) -> Result<RunResult> {
    check_shapes(x, cfg.clusters, &[k])?;
    let model = Tfcm {
        knowledge: k,
        lambda1: cfg.lambda1,
        lambda2: cfg.lambda2,
        centers: None,
    };
    solver::run(x, cfg, model, observer)
}
