//! The alternating-minimization loop shared by all fits.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::AlgoConfig;
use crate::data::DataMatrix;
use crate::error::Result;
use crate::partition::{self, FuzzyPartition};
use crate::prototypes::Prototypes;

/// Clusters whose `Σ_j u_ij^m` is at or below this are reseeded.
pub const EMPTY_CLUSTER: f64 = 1e-12;

/// Outcome of a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub partition: FuzzyPartition,
    pub prototypes: Prototypes,
    /// Full objective after each sweep (sampled after the membership step).
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    /// Whether `‖U(t) - U(t-1)‖_F < ε` fired before `max_iter`.
    pub converged: bool,
    /// Number of empty-cluster reseeds performed.
    pub reseeds: usize,
}

impl RunResult {
    pub fn labels(&self) -> Vec<usize> {
        partition::harden(&self.partition)
    }

    pub fn final_objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(f64::NAN)
    }
}

/// State after one sweep, handed to fit observers.
#[derive(Debug)]
pub struct SweepState<'a> {
    pub iteration: usize,
    pub partition: &'a FuzzyPartition,
    pub prototypes: Prototypes,
    pub objective: f64,
}

pub type Observer<'o> = &'o mut dyn FnMut(&SweepState<'_>);

/// One algorithm's prototype block and its coupling to the memberships.
pub(crate) trait Model {
    /// Minimizes the objective over the prototypes given `u^m`. Returns the
    /// clusters that were empty and need reseeding.
    fn update_prototypes(&mut self, x: &DataMatrix, powered: &Array2<f64>) -> Result<Vec<usize>>;

    /// Moves prototype `cluster` onto sample `sample`.
    fn reseed(&mut self, x: &DataMatrix, cluster: usize, sample: usize);

    /// Composite distances `D_ij` driving the membership update.
    fn distances(&self, x: &DataMatrix) -> Array2<f64>;

    /// Objective terms that do not multiply a membership (`σ Σ w^τ`).
    fn constant_term(&self) -> f64 {
        0.0
    }

    fn prototypes(&self) -> Prototypes;
}

/// Cluster sizes `Σ_j u_ij^m`.
pub(crate) fn cluster_mass(powered: &Array2<f64>) -> Vec<f64> {
    powered.rows().into_iter().map(|r| r.sum()).collect()
}

pub(crate) fn run<M: Model>(
    x: &DataMatrix,
    cfg: &AlgoConfig,
    mut model: M,
    mut observer: Option<Observer<'_>>,
) -> Result<RunResult> {
    cfg.validate(x.sample_count())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut u = partition::init_partition_with(&mut rng, cfg.clusters, x.sample_count())?;

    let mut trace = Vec::with_capacity(cfg.max_iter);
    let mut converged = false;
    let mut reseeds = 0;
    for t in 1..=cfg.max_iter {
        let powered = u.powered(cfg.m);
        for cluster in model.update_prototypes(x, &powered)? {
            let sample = rng.random_range(0..x.sample_count());
            model.reseed(x, cluster, sample);
            reseeds += 1;
        }

        let distances = model.distances(x);
        let next = partition::memberships_from_distances(&distances, cfg.m);
        let objective = next
            .memberships()
            .iter()
            .zip(distances.iter())
            .map(|(&uij, &dij)| uij.powf(cfg.m) * dij)
            .sum::<f64>()
            + model.constant_term();
        trace.push(objective);

        let delta = partition::partition_delta(&next, &u)?;
        u = next;
        if let Some(obs) = observer.as_mut() {
            obs(&SweepState {
                iteration: t,
                partition: &u,
                prototypes: model.prototypes(),
                objective,
            });
        }
        if delta < cfg.epsilon {
            converged = true;
            break;
        }
    }

    Ok(RunResult {
        partition: u,
        prototypes: model.prototypes(),
        iterations: trace.len(),
        objective_trace: trace,
        converged,
        reseeds,
    })
}
