//! External (RI, NMI) and internal (Xie-Beni family) validity indices.

use std::collections::BTreeMap;

use ndarray::Array2;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::partition::FuzzyPartition;
use crate::prototypes::{CenterSet, PlaneSet, SubspaceWeightSet};

/// Separations at or below this are treated as coincident prototypes.
pub const MIN_SEPARATION: f64 = 1e-12;

/// Cluster-by-class counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Array2<u64>,
}

impl ContingencyTable {
    /// Rows follow the sorted distinct predicted labels, columns the sorted
    /// distinct true labels.
    pub fn new(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::LengthMismatch(pred.len(), truth.len()));
        }
        let rows = dense_ids(pred);
        let cols = dense_ids(truth);
        let mut counts = Array2::zeros((rows.len(), cols.len()));
        for (p, t) in pred.iter().zip(truth) {
            counts[[rows[p], cols[t]]] += 1;
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &Array2<u64> {
        &self.counts
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.rows().into_iter().map(|r| r.sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        self.counts.columns().into_iter().map(|c| c.sum()).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.sum()
    }
}

fn dense_ids(labels: &[usize]) -> BTreeMap<usize, usize> {
    let mut ids: BTreeMap<usize, usize> = labels.iter().map(|&l| (l, 0)).collect();
    for (k, v) in ids.values_mut().enumerate() {
        *v = k;
    }
    ids
}

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// `(f00 + f11) / (N(N-1)/2)` from exact pair counts.
pub fn rand_index(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    let n = table.total();
    if n < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: n as usize,
        });
    }
    let total = pairs(n);
    let f11: u64 = table.counts.iter().map(|&c| pairs(c)).sum();
    let same_cluster: u64 = table.row_sums().into_iter().map(pairs).sum();
    let same_class: u64 = table.col_sums().into_iter().map(pairs).sum();
    let f00 = total + f11 - same_cluster - same_class;
    Ok((f00 + f11) as f64 / total as f64)
}

/// Mutual information over the geometric mean of the two entropies
/// (natural log, `0 log 0 = 0`). Single-cluster labelings score 0 unless both
/// sides are single-cluster, which scores 1.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    let n = table.total() as f64;
    if table.total() == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let rows = table.row_sums();
    let cols = table.col_sums();
    let entropy_term = |s: &[u64]| -> f64 {
        s.iter()
            .filter(|&&c| c > 0)
            .map(|&c| c as f64 * (c as f64 / n).ln())
            .sum()
    };
    let h_pred = entropy_term(&rows);
    let h_true = entropy_term(&cols);
    if rows.len() == 1 || cols.len() == 1 {
        return Ok(if rows.len() == 1 && cols.len() == 1 { 1.0 } else { 0.0 });
    }
    let mut mi = 0.0;
    for ((i, j), &c) in table.counts.indexed_iter() {
        if c > 0 {
            let c = c as f64;
            mi += c * (n * c / (rows[i] as f64 * cols[j] as f64)).ln();
        }
    }
    let value = mi / (h_pred * h_true).sqrt();
    Ok(value.clamp(0.0, 1.0))
}

/// Which membership exponent the Xie-Beni compactness uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XbMode {
    /// Classical index: `u_ij²`.
    Classic,
    /// `u_ij^m` with the fit's fuzzifier.
    Fuzzifier,
}

fn check_partition(x: &DataMatrix, u: &FuzzyPartition, prototypes: usize, d: usize) -> Result<()> {
    if u.sample_count() != x.sample_count() || u.cluster_count() != prototypes || d != x.feature_count() {
        return Err(Error::Dimension("partition, prototypes and data disagree".into()));
    }
    if prototypes < 2 {
        return Err(Error::InvalidConfig("validity indices need at least 2 clusters".into()));
    }
    Ok(())
}

/// Smallest value of `sep(i, j)` over ordered pairs `i != j`.
fn min_separation(c: usize, sep: impl Fn(usize, usize) -> f64) -> Result<f64> {
    let mut best = (f64::INFINITY, 0, 1);
    for i in 0..c {
        for j in 0..c {
            if i != j {
                let s = sep(i, j);
                if s < best.0 {
                    best = (s, i, j);
                }
            }
        }
    }
    if best.0 <= MIN_SEPARATION {
        return Err(Error::DegenerateSeparation(best.1.min(best.2), best.1.max(best.2)));
    }
    Ok(best.0)
}

/// Xie-Beni: `(1/N) Σ u^e ‖x_j - v_i‖² / min_{i≠j} ‖v_i - v_j‖²`,
/// `e = 2` or `e = m` per `mode`.
pub fn xb(x: &DataMatrix, u: &FuzzyPartition, v: &CenterSet, m: f64, mode: XbMode) -> Result<f64> {
    check_partition(x, u, v.count(), v.dim())?;
    let e = match mode {
        XbMode::Classic => 2.0,
        XbMode::Fuzzifier => m,
    };
    let mut compact = 0.0;
    for i in 0..v.count() {
        for j in 0..x.sample_count() {
            let diff = &x.sample(j) - &v.center(i);
            compact += u.get(i, j).powf(e) * diff.dot(&diff);
        }
    }
    let sep = min_separation(v.count(), |i, j| {
        let diff = &v.center(i) - &v.center(j);
        diff.dot(&diff)
    })?;
    Ok(compact / x.sample_count() as f64 / sep)
}

/// Plane variant: `(1/N) Σ u^m (x_j·v_i + b_i)² / min_{i≠j} (‖v_i - v_j‖ + |b_i - b_j|)`.
pub fn xb_fkpc(x: &DataMatrix, u: &FuzzyPartition, p: &PlaneSet, m: f64) -> Result<f64> {
    check_partition(x, u, p.count(), p.dim())?;
    let mut compact = 0.0;
    for i in 0..p.count() {
        for j in 0..x.sample_count() {
            compact += u.get(i, j).powf(m) * p.residual(i, x.sample(j)).powi(2);
        }
    }
    let sep = min_separation(p.count(), |i, j| {
        let diff = &p.direction(i) - &p.direction(j);
        diff.dot(&diff).sqrt() + (p.biases()[i] - p.biases()[j]).abs()
    })?;
    Ok(compact / x.sample_count() as f64 / sep)
}

/// Subspace variant:
/// `(1/N) Σ u^m Σ_k w_ik^τ (x_jk - v_ik)² / min_{i≠j} Σ_k w_ik^τ (v_ik - v_jk)²`.
pub fn xb_fsc(
    x: &DataMatrix,
    u: &FuzzyPartition,
    v: &CenterSet,
    w: &SubspaceWeightSet,
    m: f64,
    tau: f64,
) -> Result<f64> {
    check_partition(x, u, v.count(), v.dim())?;
    if w.weights().dim() != v.centers().dim() {
        return Err(Error::Dimension("weights and centers disagree".into()));
    }
    let wt = w.weights().mapv(|z| z.powf(tau));
    let mut compact = 0.0;
    for i in 0..v.count() {
        for j in 0..x.sample_count() {
            let diff = &x.sample(j) - &v.center(i);
            let weighted: f64 = diff.iter().zip(wt.row(i)).map(|(d, w)| w * d * d).sum();
            compact += u.get(i, j).powf(m) * weighted;
        }
    }
    let sep = min_separation(v.count(), |i, j| {
        let diff = &v.center(i) - &v.center(j);
        diff.iter().zip(wt.row(i)).map(|(d, w)| w * d * d).sum()
    })?;
    Ok(compact / x.sample_count() as f64 / sep)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Matches predicted clusters to classes with the permutation maximizing
/// agreement. Returns `assignment[class] = cluster`.
pub fn match_clusters(pred: &[usize], truth: &[usize], clusters: usize) -> Result<Vec<usize>> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch(pred.len(), truth.len()));
    }
    if clusters > 8 {
        return Err(Error::InvalidConfig("cluster matching supports at most 8 clusters".into()));
    }
    let mut counts = Array2::<u64>::zeros((clusters, clusters));
    for (&p, &t) in pred.iter().zip(truth) {
        if p >= clusters || t >= clusters {
            return Err(Error::InvalidData(format!("label out of range 0..{clusters}")));
        }
        counts[[p, t]] += 1;
    }
    let best = permutations(clusters)
        .into_iter()
        .max_by_key(|perm| perm.iter().enumerate().map(|(t, &p)| counts[[p, t]]).sum::<u64>())
        .expect("at least one permutation");
    Ok(best)
}

/// Feature-subspace recovery: for each class `c` with important set `S_c`,
/// counts how many of the `|S_c|` heaviest features of the matched cluster's
/// weight row fall in `S_c`. Returns `(recovered, Σ |S_c|)`.
pub fn subspace_recovery(
    weights: &SubspaceWeightSet,
    pred: &[usize],
    truth: &[usize],
    important: &[Vec<usize>],
) -> Result<(usize, usize)> {
    let assignment = match_clusters(pred, truth, weights.count())?;
    if important.len() != weights.count() {
        return Err(Error::Dimension(format!(
            "{} important sets for {} clusters",
            important.len(),
            weights.count()
        )));
    }
    let mut found = 0;
    let mut total = 0;
    for (class, set) in important.iter().enumerate() {
        let top = weights.top_features(assignment[class], set.len());
        found += top.iter().filter(|f| set.contains(f)).count();
        total += set.len();
    }
    Ok((found, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn rand_index_cases() {
        assert_eq!(rand_index(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(rand_index(&[0, 1, 0, 1], &[0, 0, 1, 1]).unwrap(), 1.0 / 3.0);
        assert!(matches!(rand_index(&[0], &[0]), Err(Error::TooFewSamples { .. })));
        assert!(matches!(rand_index(&[0, 1], &[0]), Err(Error::LengthMismatch(2, 1))));
    }

    #[test]
    fn nmi_cases() {
        assert!((nmi(&[0, 0, 1, 1, 2], &[1, 1, 0, 0, 2]).unwrap() - 1.0).abs() < 1e-15);
        assert!(nmi(&[0, 1, 0, 1], &[0, 0, 1, 1]).unwrap().abs() < 1e-15);
        assert_eq!(nmi(&[0, 0, 0], &[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(nmi(&[0, 0, 0], &[0, 1, 1]).unwrap(), 0.0);
    }

    #[test]
    fn nmi_direct_evaluation() {
        // truth [0,0,1,1], pred [0,0,0,1]: N_00 = 2, N_01 = 1, N_11 = 1.
        let n: f64 = 4.0;
        let mi = 2.0 * (n * 2.0 / (3.0 * 2.0)).ln() + (n / (3.0 * 2.0)).ln() + (n / (1.0 * 2.0)).ln();
        let hp = 3.0 * (3.0 / n).ln() + (1.0 / n).ln();
        let ht = 2.0 * 2.0 * (2.0 / n).ln();
        let expected = mi / (hp * ht).sqrt();
        assert!((nmi(&[0, 0, 0, 1], &[0, 0, 1, 1]).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn xb_cases() {
        let x = DataMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let u = FuzzyPartition::from_labels(&[0, 1], 2).unwrap();
        let v = CenterSet::new(array![[0.0], [1.0]]).unwrap();
        assert_eq!(xb(&x, &u, &v, 2.0, XbMode::Classic).unwrap(), 0.0);

        // x = {0, 2}, v = (0, 1), U columns (0.8, 0.2), (0.2, 0.8)
        let x = DataMatrix::from_rows(&[vec![0.0], vec![2.0]]).unwrap();
        let u = FuzzyPartition::new(array![[0.8, 0.2], [0.2, 0.8]]).unwrap();
        let compact = 0.64 * 0.0 + 0.04 * 4.0 + 0.04 * 1.0 + 0.64 * 1.0;
        let expected = compact / 2.0 / 1.0;
        assert!((xb(&x, &u, &v, 2.0, XbMode::Classic).unwrap() - expected).abs() < 1e-15);
        let m3 = (0.8f64.powi(3) * 0.0 + 0.2f64.powi(3) * 4.0 + 0.2f64.powi(3) + 0.8f64.powi(3)) / 2.0;
        assert!((xb(&x, &u, &v, 3.0, XbMode::Fuzzifier).unwrap() - m3).abs() < 1e-15);

        let same = CenterSet::new(array![[1.0], [1.0]]).unwrap();
        assert!(matches!(
            xb(&x, &u, &same, 2.0, XbMode::Classic),
            Err(Error::DegenerateSeparation(0, 1))
        ));
    }

    #[test]
    fn xb_fkpc_cases() {
        let x = DataMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 3.0]]).unwrap();
        let crisp = FuzzyPartition::from_labels(&[0, 1], 2).unwrap();
        let p = PlaneSet::new(array![[0.0, 1.0], [0.0, 1.0]], array![-1.0, -3.0]).unwrap();
        assert_eq!(xb_fkpc(&x, &crisp, &p, 2.0).unwrap(), 0.0);

        // residuals: plane 0 -> (0, 2), plane 1 -> (-2, 0); sep = 0 + 2
        let u = FuzzyPartition::new(array![[0.75, 0.5], [0.25, 0.5]]).unwrap();
        let compact = 0.25 * 4.0 + 0.0625 * 4.0;
        let expected = compact / 2.0 / 2.0;
        assert!((xb_fkpc(&x, &u, &p, 2.0).unwrap() - expected).abs() < 1e-15);

        let twin = PlaneSet::new(array![[0.0, 1.0], [0.0, 1.0]], array![1.0, 1.0]).unwrap();
        assert!(xb_fkpc(&x, &u, &twin, 2.0).is_err());
    }

    #[test]
    fn xb_fsc_cases() {
        let x = DataMatrix::from_rows(&[vec![0.0, 0.0], vec![2.0, 4.0]]).unwrap();
        let crisp = FuzzyPartition::from_labels(&[0, 1], 2).unwrap();
        let v = CenterSet::new(array![[0.0, 0.0], [2.0, 4.0]]).unwrap();
        let w = SubspaceWeightSet::new(array![[0.5, 0.5], [0.25, 0.75]]).unwrap();
        assert_eq!(xb_fsc(&x, &crisp, &v, &w, 2.0, 2.0).unwrap(), 0.0);

        let u = FuzzyPartition::new(array![[0.5, 0.5], [0.5, 0.5]]).unwrap();
        // cluster 0: 0.25*(0 + 0.25*4 + 0.25*16) ; cluster 1: 0.25*(0.0625*4 + 0.5625*16)
        let compact = 0.25 * (0.25 * 4.0 + 0.25 * 16.0) + 0.25 * (0.0625 * 4.0 + 0.5625 * 16.0);
        // sep(0,1) = 0.25*4 + 0.25*16 = 5; sep(1,0) = 0.0625*4 + 0.5625*16 = 9.25
        let expected = compact / 2.0 / 5.0;
        assert!((xb_fsc(&x, &u, &v, &w, 2.0, 2.0).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn recovery_counts_matched_top_features() {
        let w = SubspaceWeightSet::new(array![[0.1, 0.1, 0.4, 0.4], [0.4, 0.4, 0.1, 0.1]]).unwrap();
        // predicted cluster 1 is class 0
        let (found, total) =
            subspace_recovery(&w, &[1, 1, 0, 0], &[0, 0, 1, 1], &[vec![0, 1], vec![2]]).unwrap();
        assert_eq!((found, total), (3, 3));
    }

    proptest! {
        #[test]
        fn symmetric_and_relabel_invariant(
            labels in proptest::collection::vec((0usize..4, 0usize..3), 2..40),
            shift in 1usize..7,
        ) {
            let a: Vec<usize> = labels.iter().map(|p| p.0).collect();
            let b: Vec<usize> = labels.iter().map(|p| p.1).collect();
            let relabeled: Vec<usize> = a.iter().map(|&l| (l * 3 + shift) % 17 + 100).collect();
            let ri = rand_index(&a, &b).unwrap();
            prop_assert_eq!(ri, rand_index(&b, &a).unwrap());
            prop_assert_eq!(ri, rand_index(&relabeled, &b).unwrap());
            prop_assert!((0.0..=1.0).contains(&ri));
            let n = nmi(&a, &b).unwrap();
            prop_assert!((n - nmi(&b, &a).unwrap()).abs() < 1e-12);
            prop_assert!((n - nmi(&relabeled, &b).unwrap()).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&n));
        }
    }
}
