//! Fuzzy partition matrices: random initialization, the convergence norm,
//! the shared membership rule and hardening into crisp labels.

use ndarray::{Array2, ArrayView2, Axis};
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Composite distances at or below this value are treated as exact hits.
pub const ZERO_DISTANCE: f64 = 1e-12;

/// Column-sum tolerance accepted by [`FuzzyPartition::new`].
pub const COLUMN_SUM_TOL: f64 = 1e-12;

/// A `C × N` membership matrix whose columns are probability vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyPartition {
    memberships: Array2<f64>,
}

impl FuzzyPartition {
    pub fn new(memberships: Array2<f64>) -> Result<Self> {
        let (c, n) = memberships.dim();
        if c == 0 || n == 0 {
            return Err(Error::InvalidData("empty partition".into()));
        }
        for (j, col) in memberships.columns().into_iter().enumerate() {
            if col.iter().any(|u| !(0.0..=1.0).contains(u)) {
                return Err(Error::Invariant(format!("column {j} has entries outside [0,1]")));
            }
            let sum: f64 = col.sum();
            if (sum - 1.0).abs() > COLUMN_SUM_TOL {
                return Err(Error::Invariant(format!("column {j} sums to {sum}")));
            }
        }
        Ok(Self { memberships })
    }

    /// Crisp partition from labels in `0..clusters`.
    pub fn from_labels(labels: &[usize], clusters: usize) -> Result<Self> {
        let mut u = Array2::zeros((clusters, labels.len()));
        for (j, &l) in labels.iter().enumerate() {
            if l >= clusters {
                return Err(Error::InvalidData(format!("label {l} >= {clusters}")));
            }
            u[[l, j]] = 1.0;
        }
        Self::new(u)
    }

    pub(crate) fn from_raw(memberships: Array2<f64>) -> Self {
        debug_assert!(memberships
            .columns()
            .into_iter()
            .all(|c| (c.sum() - 1.0).abs() <= COLUMN_SUM_TOL));
        Self { memberships }
    }

    pub fn memberships(&self) -> ArrayView2<'_, f64> {
        self.memberships.view()
    }

    pub fn cluster_count(&self) -> usize {
        self.memberships.nrows()
    }

    pub fn sample_count(&self) -> usize {
        self.memberships.ncols()
    }

    pub fn get(&self, cluster: usize, sample: usize) -> f64 {
        self.memberships[[cluster, sample]]
    }

    /// `u_ij^m` for every entry.
    pub fn powered(&self, m: f64) -> Array2<f64> {
        self.memberships.mapv(|u| u.powf(m))
    }
}

/// Random initial partition: `C` open-interval uniforms per column, normalized.
pub fn init_partition(seed: u64, clusters: usize, samples: usize) -> Result<FuzzyPartition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    init_partition_with(&mut rng, clusters, samples)
}

pub(crate) fn init_partition_with(
    rng: &mut impl Rng,
    clusters: usize,
    samples: usize,
) -> Result<FuzzyPartition> {
    if clusters < 2 || clusters > samples {
        return Err(Error::InvalidConfig(format!(
            "cluster count must satisfy 2 <= C <= N, got C={clusters}, N={samples}"
        )));
    }
    let mut u = Array2::zeros((clusters, samples));
    for mut col in u.columns_mut() {
        for v in col.iter_mut() {
            *v = rng.sample::<f64, _>(Open01);
        }
        let sum = col.sum();
        col /= sum;
    }
    Ok(FuzzyPartition::from_raw(u))
}

/// Frobenius norm of `u_new - u_old`.
pub fn partition_delta(u_new: &FuzzyPartition, u_old: &FuzzyPartition) -> Result<f64> {
    if u_new.memberships.dim() != u_old.memberships.dim() {
        return Err(Error::Dimension(format!(
            "partition shapes {:?} and {:?}",
            u_new.memberships.dim(),
            u_old.memberships.dim()
        )));
    }
    Ok(u_new
        .memberships
        .iter()
        .zip(u_old.memberships.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Per-column argmax; ties go to the lowest cluster index.
pub fn harden(u: &FuzzyPartition) -> Vec<usize> {
    u.memberships
        .columns()
        .into_iter()
        .map(|col| {
            let mut best = 0;
            for (i, &v) in col.iter().enumerate().skip(1) {
                if v > col[best] {
                    best = i;
                }
            }
            best
        })
        .collect()
}

/// The membership rule shared by every algorithm:
/// `u_ij = D_ij^{-1/(m-1)} / sum_k D_kj^{-1/(m-1)}`.
///
/// Columns with one or more distances `<= ZERO_DISTANCE` become crisp, split
/// uniformly among the zero-distance clusters.
pub fn memberships_from_distances(distances: &Array2<f64>, m: f64) -> FuzzyPartition {
    let exponent = 1.0 / (m - 1.0);
    let mut u = Array2::zeros(distances.dim());
    for (dcol, mut ucol) in distances
        .axis_iter(Axis(1))
        .zip(u.axis_iter_mut(Axis(1)))
    {
        let hits = dcol.iter().filter(|&&d| d <= ZERO_DISTANCE).count();
        if hits > 0 {
            let share = 1.0 / hits as f64;
            for (uv, &dv) in ucol.iter_mut().zip(dcol.iter()) {
                *uv = if dv <= ZERO_DISTANCE { share } else { 0.0 };
            }
            continue;
        }
        // Scale by the column minimum so every term lies in (0, 1].
        let dmin = dcol.iter().copied().fold(f64::INFINITY, f64::min);
        for (uv, &dv) in ucol.iter_mut().zip(dcol.iter()) {
            *uv = (dmin / dv).powf(exponent);
        }
        let sum = ucol.sum();
        ucol /= sum;
    }
    FuzzyPartition::from_raw(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn init_is_column_stochastic() {
        let u = init_partition(7, 2, 3).unwrap();
        assert_eq!(u.memberships().dim(), (2, 3));
        for col in u.memberships().columns() {
            assert!((col.sum() - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn init_is_deterministic() {
        let a = init_partition(7, 2, 3).unwrap();
        let b = init_partition(7, 2, 3).unwrap();
        let bits = |u: &FuzzyPartition| u.memberships().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&init_partition(8, 2, 3).unwrap()));
    }

    #[test]
    fn init_matches_draw_and_normalize() {
        let u = init_partition(7, 3, 5).unwrap();
        // Replay the documented procedure independently.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for j in 0..5 {
            let draws: Vec<f64> = (0..3).map(|_| rng.sample::<f64, _>(Open01)).collect();
            let s: f64 = draws.iter().sum();
            for (i, d) in draws.iter().enumerate() {
                assert_eq!(u.get(i, j), d / s);
            }
        }
        assert!(u.memberships().iter().all(|&v| v > 0.0 && v < 1.0));
        for col in u.memberships().columns() {
            assert!((col.sum() - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn init_rejects_bad_cluster_counts() {
        assert!(matches!(init_partition(1, 1, 5), Err(Error::InvalidConfig(_))));
        assert!(matches!(init_partition(1, 6, 5), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn delta_cases() {
        let u = FuzzyPartition::new(array![[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let swapped = FuzzyPartition::new(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(partition_delta(&u, &u).unwrap(), 0.0);
        assert_eq!(partition_delta(&u, &swapped).unwrap(), 2.0);

        let base = FuzzyPartition::new(array![[0.6, 0.3], [0.4, 0.7]]).unwrap();
        let bumped = FuzzyPartition::new(array![[0.601, 0.3], [0.399, 0.7]]).unwrap();
        let d = partition_delta(&bumped, &base).unwrap();
        assert!((d - 2f64.sqrt() * 1e-3).abs() < 1e-14);

        let wide = FuzzyPartition::new(array![[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]).unwrap();
        assert!(matches!(partition_delta(&u, &wide), Err(Error::Dimension(_))));
    }

    #[test]
    fn harden_argmax_and_ties() {
        let u = FuzzyPartition::new(array![[0.9, 0.2, 0.5], [0.1, 0.8, 0.5]]).unwrap();
        assert_eq!(harden(&u), vec![0, 1, 0]);
        let crisp = FuzzyPartition::from_labels(&[2, 0, 1, 2], 3).unwrap();
        assert_eq!(harden(&crisp), vec![2, 0, 1, 2]);
    }

    #[test]
    fn membership_rule_hand_values() {
        let u = memberships_from_distances(&array![[1.0], [3.0]], 2.0);
        assert!((u.get(0, 0) - 0.75).abs() < 1e-15);
        assert!((u.get(1, 0) - 0.25).abs() < 1e-15);

        let u = memberships_from_distances(&array![[1.0], [4.0]], 2.0);
        assert!((u.get(0, 0) - 0.8).abs() < 1e-15);

        let u = memberships_from_distances(&array![[2.0], [2.0]], 2.0);
        assert_eq!(u.get(0, 0), 0.5);
    }

    #[test]
    fn membership_rule_singularity() {
        let u = memberships_from_distances(&array![[0.0, 0.0], [5.0, 0.0], [1.0, 2.0]], 2.0);
        assert_eq!(u.memberships().column(0).to_vec(), vec![1.0, 0.0, 0.0]);
        assert_eq!(u.memberships().column(1).to_vec(), vec![0.5, 0.5, 0.0]);
    }

    proptest! {
        #[test]
        fn membership_rule_is_homogeneous(
            d in proptest::collection::vec(1e-6f64..1e6, 2..6),
            scale in 1e-3f64..1e3,
            m in 1.1f64..4.0,
        ) {
            let c = d.len();
            let a = Array2::from_shape_vec((c, 1), d.clone()).unwrap();
            let b = a.mapv(|v| v * scale);
            let ua = memberships_from_distances(&a, m);
            let ub = memberships_from_distances(&b, m);
            for i in 0..c {
                prop_assert!((ua.get(i, 0) - ub.get(i, 0)).abs() < 1e-12);
            }
            prop_assert!((ua.memberships().sum() - 1.0).abs() <= 1e-12);
        }
    }
}
