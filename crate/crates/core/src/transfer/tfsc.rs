//! Transfer fuzzy subspace clustering.
//!
//! Each cluster carries a center and a feature-weight vector. The source
//! knowledge contributes centers `ṽ_i` and weights `w̃_i`: samples are pulled
//! toward the source centers in the source subspace (`λ₁`), and target
//! centers toward source centers in the same subspace (`λ₂`).

use ndarray::Array2;

use crate::config::AlgoConfig;
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::partition::{memberships_from_distances, FuzzyPartition, ZERO_DISTANCE};
use crate::prototypes::{CenterSet, Prototypes, SubspaceKnowledge, SubspaceWeightSet};
use crate::solver::{self, cluster_mass, Model, Observer, RunResult, EMPTY_CLUSTER};

fn check_shapes(x: &DataMatrix, clusters: usize, k: &SubspaceKnowledge) -> Result<()> {
    if k.centers.dim() != x.feature_count() || k.weights.dim() != x.feature_count() {
        return Err(Error::Dimension(format!(
            "knowledge has {} features, data has {}",
            k.centers.dim(),
            x.feature_count()
        )));
    }
    if k.centers.count() != clusters || k.weights.count() != clusters {
        return Err(Error::Dimension(format!(
            "knowledge has {} clusters, expected {clusters}",
            k.centers.count()
        )));
    }
    Ok(())
}

fn check_matrix(name: &str, a: (usize, usize), clusters: usize, d: usize) -> Result<()> {
    if a != (clusters, d) {
        return Err(Error::Dimension(format!("{name} is {a:?}, expected ({clusters}, {d})")));
    }
    Ok(())
}

/// Full TFSC objective:
/// `Σ u^m Σ_k w^τ (x - v)² + σ Σ w^τ + λ₁ Σ u^m Σ_k w̃^τ (x - ṽ)² + λ₂ Σ_i (Σ_j u^m) Σ_k w̃^τ (ṽ - v)²`.
#[allow(clippy::too_many_arguments)]
pub fn tfsc_objective(
    x: &DataMatrix,
    u: &FuzzyPartition,
    v: &CenterSet,
    w: &SubspaceWeightSet,
    k: &SubspaceKnowledge,
    m: f64,
    tau: f64,
    sigma: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<f64> {
    let (c, d) = (u.cluster_count(), x.feature_count());
    if u.sample_count() != x.sample_count() {
        return Err(Error::Dimension("partition and data sample counts differ".into()));
    }
    check_shapes(x, c, k)?;
    check_matrix("centers", v.centers().dim(), c, d)?;
    check_matrix("weights", w.weights().dim(), c, d)?;

    let (mut fit, mut reg, mut assign, mut matching) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..c {
        let wt = w.row(i).mapv(|z| z.powf(tau));
        let kwt = k.weights.row(i).mapv(|z| z.powf(tau));
        reg += wt.sum();
        let mut mass = 0.0;
        for j in 0..x.sample_count() {
            let um = u.get(i, j).powf(m);
            mass += um;
            let xj = x.sample(j);
            for f in 0..d {
                fit += um * wt[f] * (xj[f] - v.center(i)[f]).powi(2);
                assign += um * kwt[f] * (xj[f] - k.centers.center(i)[f]).powi(2);
            }
        }
        for f in 0..d {
            matching += mass * kwt[f] * (k.centers.center(i)[f] - v.center(i)[f]).powi(2);
        }
    }
    Ok(fit + sigma * reg + lambda1 * assign + lambda2 * matching)
}

/// Stationary point of the objective in `v` given `U` and `W`.
/// Coordinates where both `w_ik` and `w̃_ik` vanish keep `previous`
/// (or the `u^m`-weighted mean when there is no previous value).
fn centers_from_powered(
    x: &DataMatrix,
    powered: &Array2<f64>,
    weights: &Array2<f64>,
    k: &SubspaceKnowledge,
    tau: f64,
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
        for f in 0..d {
            let wt = weights[[i, f]].powf(tau);
            let kwt = k.weights.row(i)[f].powf(tau);
            let num = wt * weighted[[i, f]] + lambda2 * kwt * k.centers.center(i)[f] * mass[i];
            let den = wt * mass[i] + lambda2 * kwt * mass[i];
            if den > 0.0 {
                v[[i, f]] = num / den;
            } else if previous.is_none() {
                v[[i, f]] = weighted[[i, f]] / mass[i];
            }
        }
    }
    (v, empty)
}

/// Center rule:
/// `v_ik = (w_ik^τ Σ_j u^m x_jk + λ₂ w̃_ik^τ ṽ_ik Σ_j u^m) / (w_ik^τ Σ_j u^m + λ₂ w̃_ik^τ Σ_j u^m)`.
#[allow(clippy::too_many_arguments)]
pub fn tfsc_center_update(
    x: &DataMatrix,
    u: &FuzzyPartition,
    w: &SubspaceWeightSet,
    k: &SubspaceKnowledge,
    m: f64,
    tau: f64,
    lambda2: f64,
) -> Result<CenterSet> {
    let c = u.cluster_count();
    check_shapes(x, c, k)?;
    check_matrix("weights", w.weights().dim(), c, x.feature_count())?;
    let (v, empty) = centers_from_powered(
        x,
        &u.powered(m),
        &w.weights().to_owned(),
        k,
        tau,
        lambda2,
        None,
    );
    if let Some(&cluster) = empty.first() {
        return Err(Error::DegenerateCluster { cluster });
    }
    CenterSet::new(v)
}

fn weights_from_powered(x: &DataMatrix, powered: &Array2<f64>, v: &Array2<f64>, tau: f64, sigma: f64) -> Array2<f64> {
    let (c, d) = v.dim();
    let exponent = 1.0 / (tau - 1.0);
    let mut w = Array2::zeros((c, d));
    for i in 0..c {
        let mut disp = vec![sigma; d];
        for (j, xj) in x.samples().rows().into_iter().enumerate() {
            let um = powered[[i, j]];
            for f in 0..d {
                let diff = xj[f] - v[[i, f]];
                disp[f] += um * diff * diff;
            }
        }
        let mut row = w.row_mut(i);
        let hits = disp.iter().filter(|&&e| e <= ZERO_DISTANCE).count();
        if hits > 0 {
            let share = 1.0 / hits as f64;
            for (wf, &e) in row.iter_mut().zip(&disp) {
                *wf = if e <= ZERO_DISTANCE { share } else { 0.0 };
            }
            continue;
        }
        let emin = disp.iter().copied().fold(f64::INFINITY, f64::min);
        for (wf, &e) in row.iter_mut().zip(&disp) {
            *wf = (emin / e).powf(exponent);
        }
        let sum = row.sum();
        row /= sum;
    }
    w
}

/// Weight rule: `w_ik ∝ E_ik^{-1/(τ-1)}` with `E_ik = Σ_j u^m (x_jk - v_ik)² + σ`.
/// Rows with zero-dispersion features put all weight on them.
pub fn tfsc_weight_update(
    x: &DataMatrix,
    u: &FuzzyPartition,
    v: &CenterSet,
    m: f64,
    tau: f64,
    sigma: f64,
) -> Result<SubspaceWeightSet> {
    check_matrix("centers", v.centers().dim(), u.cluster_count(), x.feature_count())?;
    if u.sample_count() != x.sample_count() {
        return Err(Error::Dimension("partition and data sample counts differ".into()));
    }
    if !(tau > 1.0) || !(sigma >= 0.0) {
        return Err(Error::InvalidConfig(format!("need tau > 1 and sigma >= 0, got {tau}, {sigma}")));
    }
    let w = weights_from_powered(x, &u.powered(m), &v.centers().to_owned(), tau, sigma);
    Ok(SubspaceWeightSet::from_raw(w))
}

fn distances(
    x: &DataMatrix,
    v: &Array2<f64>,
    w: &Array2<f64>,
    k: &SubspaceKnowledge,
    tau: f64,
    lambda1: f64,
    lambda2: f64,
) -> Array2<f64> {
    let (c, d) = v.dim();
    let wt = w.mapv(|z| z.powf(tau));
    let kwt = k.weights.weights().mapv(|z| z.powf(tau));
    let kc = k.centers.centers();
    let matching: Vec<f64> = (0..c)
        .map(|i| (0..d).map(|f| kwt[[i, f]] * (kc[[i, f]] - v[[i, f]]).powi(2)).sum())
        .collect();
    Array2::from_shape_fn((c, x.sample_count()), |(i, j)| {
        let xj = x.sample(j);
        let (mut own, mut src) = (0.0, 0.0);
        for f in 0..d {
            own += wt[[i, f]] * (xj[f] - v[[i, f]]).powi(2);
            src += kwt[[i, f]] * (xj[f] - kc[[i, f]]).powi(2);
        }
        own + lambda1 * src + lambda2 * matching[i]
    })
}

/// Membership rule with composite distance
/// `d_ij = Σ_k w_ik^τ (x_jk - v_ik)² + λ₁ Σ_k w̃_ik^τ (x_jk - ṽ_ik)² + λ₂ Σ_k w̃_ik^τ (ṽ_ik - v_ik)²`.
#[allow(clippy::too_many_arguments)]
pub fn tfsc_membership_update(
    x: &DataMatrix,
    v: &CenterSet,
    w: &SubspaceWeightSet,
    k: &SubspaceKnowledge,
    m: f64,
    tau: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<FuzzyPartition> {
    let c = v.count();
    check_shapes(x, c, k)?;
    check_matrix("centers", v.centers().dim(), c, x.feature_count())?;
    check_matrix("weights", w.weights().dim(), c, x.feature_count())?;
    let d = distances(
        x,
        &v.centers().to_owned(),
        &w.weights().to_owned(),
        k,
        tau,
        lambda1,
        lambda2,
    );
    Ok(memberships_from_distances(&d, m))
}

struct Tfsc<'k> {
    knowledge: &'k SubspaceKnowledge,
    tau: f64,
    sigma: f64,
    lambda1: f64,
    lambda2: f64,
    centers: Option<Array2<f64>>,
    weights: Array2<f64>,
}

impl Model for Tfsc<'_> {
    fn update_prototypes(&mut self, x: &DataMatrix, powered: &Array2<f64>) -> Result<Vec<usize>> {
        let (v, empty) = centers_from_powered(
            x,
            powered,
            &self.weights,
            self.knowledge,
            self.tau,
            self.lambda2,
            self.centers.as_ref(),
        );
        self.weights = weights_from_powered(x, powered, &v, self.tau, self.sigma);
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
        distances(
            x,
            v,
            &self.weights,
            self.knowledge,
            self.tau,
            self.lambda1,
            self.lambda2,
        )
    }

    fn constant_term(&self) -> f64 {
        self.sigma * self.weights.iter().map(|w| w.powf(self.tau)).sum::<f64>()
    }

    fn prototypes(&self) -> Prototypes {
        Prototypes::Subspace {
            centers: CenterSet::new(self.centers.clone().expect("centers updated before use"))
                .expect("finite centers"),
            weights: SubspaceWeightSet::from_raw(self.weights.clone()),
        }
    }
}

/// Runs TFSC: center, weight and membership updates per sweep. Weights start
/// uniform; `σ` defaults to a tenth of the data's mean feature variance.
pub fn tfsc_fit(x: &DataMatrix, k: &SubspaceKnowledge, cfg: &AlgoConfig) -> Result<RunResult> {
    tfsc_fit_observed(x, k, cfg, None)
}

pub fn tfsc_fit_observed(
    x: &DataMatrix,
    k: &SubspaceKnowledge,
    cfg: &AlgoConfig,
    observer: Option<Observer<'_>>,
) -> Result<RunResult> {
    check_shapes(x, cfg.clusters, k)?;
    let model = Tfsc {
        knowledge: k,
        tau: cfg.tau,
        sigma: cfg.resolved_sigma(x),
        lambda1: cfg.lambda1,
        lambda2: cfg.lambda2,
        centers: None,
        weights: SubspaceWeightSet::uniform(cfg.clusters, x.feature_count())
            .weights()
            .to_owned(),
    };
    solver::run(x, cfg, model, observer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn knowledge(centers: Array2<f64>, weights: Array2<f64>) -> SubspaceKnowledge {
        SubspaceKnowledge::new(
            CenterSet::new(centers).unwrap(),
            SubspaceWeightSet::new(weights).unwrap(),
        )
        .unwrap()
    }

    fn line(xs: &[f64]) -> DataMatrix {
        DataMatrix::from_rows(&xs.iter().map(|&v| vec![v]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn objective_hand_value() {
        let x = line(&[0.0, 4.0]);
        let u = FuzzyPartition::from_labels(&[0, 1], 2).unwrap();
        let v = CenterSet::new(array![[0.0], [4.0]]).unwrap();
        let w = SubspaceWeightSet::new(array![[1.0], [1.0]]).unwrap();
        let k = knowledge(array![[1.0], [3.0]], array![[1.0], [1.0]]);
        let j = tfsc_objective(&x, &u, &v, &w, &k, 2.0, 2.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(j, 4.0);
    }

    #[test]
    fn objective_on_exact_fit_is_regularizer() {
        let x = DataMatrix::from_rows(&[vec![1.0, 2.0], vec![5.0, 0.0]]).unwrap();
        let u = FuzzyPartition::from_labels(&[0, 1], 2).unwrap();
        let v = CenterSet::new(array![[1.0, 2.0], [5.0, 0.0]]).unwrap();
        let w = SubspaceWeightSet::new(array![[0.5, 0.5], [0.25, 0.75]]).unwrap();
        let k = knowledge(array![[1.0, 2.0], [5.0, 0.0]], array![[0.5, 0.5], [0.5, 0.5]]);
        let j = tfsc_objective(&x, &u, &v, &w, &k, 2.0, 2.0, 3.0, 1.0, 1.0).unwrap();
        let reg = 3.0 * (0.25 + 0.25 + 0.0625 + 0.5625);
        assert!((j - reg).abs() < 1e-15);
    }

    #[test]
    fn center_update_hand_value_and_limits() {
        let x = line(&[0.0, 1.0]);
        let u = FuzzyPartition::new(array![[1.0, 1.0], [0.0, 0.0]]).unwrap();
        let w = SubspaceWeightSet::new(array![[1.0], [1.0]]).unwrap();
        let k = knowledge(array![[2.0], [0.0]], array![[1.0], [1.0]]);
        // second cluster empty
        assert!(tfsc_center_update(&x, &u, &w, &k, 2.0, 2.0, 1.0).is_err());

        let x = line(&[0.0, 1.0, 8.0]);
        let u = FuzzyPartition::from_labels(&[0, 0, 1], 2).unwrap();
        let v = tfsc_center_update(&x, &u, &w, &k, 2.0, 2.0, 1.0).unwrap();
        assert!((v.center(0)[0] - 1.25).abs() < 1e-15);

        let big = tfsc_center_update(&x, &u, &w, &k, 2.0, 2.0, 1e12).unwrap();
        assert!((big.center(0)[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn center_update_without_transfer_ignores_weights() {
        let x = DataMatrix::from_rows(&[vec![0.0, 3.0], vec![2.0, 5.0], vec![4.0, 1.0]]).unwrap();
        let u = FuzzyPartition::new(array![[0.8, 0.5, 0.1], [0.2, 0.5, 0.9]]).unwrap();
        let k = knowledge(array![[9.0, 9.0], [9.0, 9.0]], array![[0.5, 0.5], [0.5, 0.5]]);
        let w1 = SubspaceWeightSet::new(array![[0.9, 0.1], [0.3, 0.7]]).unwrap();
        let w2 = SubspaceWeightSet::new(array![[0.2, 0.8], [0.6, 0.4]]).unwrap();
        let a = tfsc_center_update(&x, &u, &w1, &k, 2.0, 2.0, 0.0).unwrap();
        let b = tfsc_center_update(&x, &u, &w2, &k, 2.0, 2.0, 0.0).unwrap();
        for (p, q) in a.centers().iter().zip(b.centers().iter()) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn weight_update_cases() {
        // Dispersions (1, 3) with σ = 0: one sample at distance 1 and sqrt(3).
        let x = DataMatrix::from_rows(&[vec![1.0, 3f64.sqrt()]]).unwrap();
        let u = FuzzyPartition::from_labels(&[0], 1).unwrap();
        let v = CenterSet::new(array![[0.0, 0.0]]).unwrap();
        let w = tfsc_weight_update(&x, &u, &v, 2.0, 2.0, 0.0).unwrap();
        assert!((w.row(0)[0] - 0.75).abs() < 1e-12 && (w.row(0)[1] - 0.25).abs() < 1e-12);

        let x = DataMatrix::from_rows(&[vec![2.0, -2.0, 2.0]]).unwrap();
        let v = CenterSet::new(array![[0.0, 0.0, 0.0]]).unwrap();
        let w = tfsc_weight_update(&x, &u, &v, 2.0, 2.0, 0.0).unwrap();
        assert!(w.row(0).iter().all(|&z| (z - 1.0 / 3.0).abs() < 1e-15));

        let x = DataMatrix::from_rows(&[vec![1.0, 30.0]]).unwrap();
        let v = CenterSet::new(array![[0.0, 0.0]]).unwrap();
        let w = tfsc_weight_update(&x, &u, &v, 2.0, 2.0, 1e9).unwrap();
        assert!((w.row(0)[0] - 0.5).abs() < 1e-3);

        // zero dispersion with σ = 0 puts all weight there
        let x = DataMatrix::from_rows(&[vec![0.0, 1.0, 0.0]]).unwrap();
        let w = tfsc_weight_update(&x, &u, &CenterSet::new(array![[0.0, 0.0, 0.0]]).unwrap(), 2.0, 2.0, 0.0).unwrap();
        assert_eq!(w.row(0).to_vec(), vec![0.5, 0.0, 0.5]);
    }

    #[test]
    fn membership_update_cases() {
        let x = DataMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let v = CenterSet::new(array![[1.0, 1.0], [3.0, 3.0]]).unwrap();
        let w = SubspaceWeightSet::new(array![[0.5, 0.5], [0.5, 0.5]]).unwrap();
        let k = knowledge(array![[0.0, 0.0], [0.0, 0.0]], array![[0.5, 0.5], [0.5, 0.5]]);
        let u = tfsc_membership_update(&x, &v, &w, &k, 2.0, 2.0, 0.0, 0.0).unwrap();
        assert_eq!(u.get(0, 0), 1.0);
        // sample 2: d1 = 0.25*2 = 0.5, d2 = 0.25*18 = 4.5 -> u = (0.9, 0.1)
        assert!((u.get(0, 1) - 0.9).abs() < 1e-15);
    }
}
