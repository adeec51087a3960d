//! Transfer fuzzy k-plane clustering. Knowledge enters only through the
//! membership distances: the source term of the objective does not depend on
//! the target planes, so directions and biases are the plain FKPC updates.

use ndarray::{Array1, Array2};

use crate::config::AlgoConfig;
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::linalg::{default_psd_tol, min_nonneg_eigvec, weighted_scatter_powered};
use crate::partition::{memberships_from_distances, FuzzyPartition};
use crate::prototypes::{PlaneSet, Prototypes};
use crate::solver::{self, cluster_mass, Model, Observer, RunResult, EMPTY_CLUSTER};

fn check_planes(x: &DataMatrix, clusters: usize, planes: &[&PlaneSet]) -> Result<()> {
    for p in planes {
        if p.dim() != x.feature_count() {
            return Err(Error::Dimension(format!(
                "planes live in {} dimensions, data has {}",
                p.dim(),
                x.feature_count()
            )));
        }
        if p.count() != clusters {
            return Err(Error::Dimension(format!("{} planes for {clusters} clusters", p.count())));
        }
    }
    Ok(())
}

/// `Σ_ij u^m (x_j·v_i + b_i)² + λ Σ_ij u^m (x_j·ṽ_i + b̃_i)²`.
pub fn tfkpc_objective(
    x: &DataMatrix,
    u: &FuzzyPartition,
    p: &PlaneSet,
    k: &PlaneSet,
    m: f64,
    lambda: f64,
) -> Result<f64> {
    if u.sample_count() != x.sample_count() {
        return Err(Error::Dimension("partition and data sample counts differ".into()));
    }
    check_planes(x, u.cluster_count(), &[p, k])?;
    let (mut fit, mut source) = (0.0, 0.0);
    for i in 0..u.cluster_count() {
        for j in 0..x.sample_count() {
            let w = u.get(i, j).powf(m);
            fit += w * p.residual(i, x.sample(j)).powi(2);
            source += w * k.residual(i, x.sample(j)).powi(2);
        }
    }
    Ok(fit + lambda * source)
}

fn directions_from_powered(
    x: &DataMatrix,
    powered: &Array2<f64>,
    previous: &Array2<f64>,
) -> Result<(Array2<f64>, Vec<usize>)> {
    let mass = cluster_mass(powered);
    let mut dirs = previous.clone();
    let mut empty = Vec::new();
    for (i, &mi) in mass.iter().enumerate() {
        if mi <= EMPTY_CLUSTER {
            empty.push(i);
            continue;
        }
        let scatter = weighted_scatter_powered(x.samples(), powered.row(i), i)?;
        let (v, _) = min_nonneg_eigvec(&scatter, default_psd_tol(&scatter))?;
        dirs.row_mut(i).assign(&v);
    }
    Ok((dirs, empty))
}

fn biases_from_powered(x: &DataMatrix, powered: &Array2<f64>, directions: &Array2<f64>) -> Array1<f64> {
    let mass = cluster_mass(powered);
    // projections[i, j] = v_i · x_j
    let projections = directions.dot(&x.samples().t());
    Array1::from_shape_fn(directions.nrows(), |i| {
        if mass[i] <= EMPTY_CLUSTER {
            return 0.0;
        }
        -powered.row(i).dot(&projections.row(i)) / mass[i]
    })
}

fn first_axis(clusters: usize, d: usize) -> Array2<f64> {
    let mut a = Array2::zeros((clusters, d));
    a.column_mut(0).fill(1.0);
    a
}

/// Unit normal of each cluster's best-fitting hyperplane: the eigenvector of
/// the smallest eigenvalue of `X (D_i - S_i) X^T`.
pub fn tfkpc_direction_update(x: &DataMatrix, u: &FuzzyPartition, m: f64) -> Result<Array2<f64>> {
    if u.sample_count() != x.sample_count() {
        return Err(Error::Dimension("partition and data sample counts differ".into()));
    }
    let c = u.cluster_count();
    let (dirs, empty) = directions_from_powered(x, &u.powered(m), &first_axis(c, x.feature_count()))?;
    match empty.first() {
        Some(&cluster) => Err(Error::DegenerateCluster { cluster }),
        None => Ok(dirs),
    }
}

/// `b_i = -Σ_j u^m v_i·x_j / Σ_j u^m`, the exact minimizer over `b_i`.
pub fn tfkpc_bias_update(
    x: &DataMatrix,
    u: &FuzzyPartition,
    directions: &Array2<f64>,
    m: f64,
) -> Result<Array1<f64>> {
    if directions.nrows() != u.cluster_count() || directions.ncols() != x.feature_count() {
        return Err(Error::Dimension("directions do not match partition and data".into()));
    }
    let powered = u.powered(m);
    if let Some(cluster) = cluster_mass(&powered).iter().position(|&mi| mi <= EMPTY_CLUSTER) {
        return Err(Error::DegenerateCluster { cluster });
    }
    Ok(biases_from_powered(x, &powered, directions))
}

fn distances(x: &DataMatrix, dirs: &Array2<f64>, biases: &Array1<f64>, k: &PlaneSet, lambda: f64) -> Array2<f64> {
    let own = dirs.dot(&x.samples().t());
    let src = k.directions().dot(&x.samples().t());
    Array2::from_shape_fn(own.dim(), |(i, j)| {
        let r = own[[i, j]] + biases[i];
        let s = src[[i, j]] + k.biases()[i];
        r * r + lambda * s * s
    })
}

/// Membership rule with `D_ij = (x_j·v_i + b_i)² + λ (x_j·ṽ_i + b̃_i)²`.
pub fn tfkpc_membership_update(
    x: &DataMatrix,
    p: &PlaneSet,
    k: &PlaneSet,
    m: f64,
    lambda: f64,
) -> Result<FuzzyPartition> {
    check_planes(x, p.count(), &[p, k])?;
    let d = distances(x, &p.directions().to_owned(), &p.biases().to_owned(), k, lambda);
    Ok(memberships_from_distances(&d, m))
}

struct Tfkpc<'k> {
    knowledge: &'k PlaneSet,
    lambda: f64,
    directions: Array2<f64>,
    biases: Array1<f64>,
}

impl Model for Tfkpc<'_> {
    fn update_prototypes(&mut self, x: &DataMatrix, powered: &Array2<f64>) -> Result<Vec<usize>> {
        let (dirs, empty) = directions_from_powered(x, powered, &self.directions)?;
        let mut biases = biases_from_powered(x, powered, &dirs);
        for &i in &empty {
            biases[i] = self.biases[i];
        }
        self.directions = dirs;
        self.biases = biases;
        Ok(empty)
    }

    fn reseed(&mut self, x: &DataMatrix, cluster: usize, sample: usize) {
        // Keep the direction, move the plane through the chosen sample.
        self.biases[cluster] = -self.directions.row(cluster).dot(&x.sample(sample));
    }

    fn distances(&self, x: &DataMatrix) -> Array2<f64> {
        distances(x, &self.directions, &self.biases, self.knowledge, self.lambda)
    }

    fn prototypes(&self) -> Prototypes {
        Prototypes::Planes(
            PlaneSet::new(self.directions.clone(), self.biases.clone()).expect("unit directions"),
        )
    }
}

/// Runs TFKPC: direction, bias and membership updates per sweep.
pub fn tfkpc_fit(x: &DataMatrix, k: &PlaneSet, cfg: &AlgoConfig) -> Result<RunResult> {
    tfkpc_fit_observed(x, k, cfg, None)
}

pub fn tfkpc_fit_observed(
    x: &DataMatrix,
    k: &PlaneSet,
    cfg: &AlgoConfig,
    observer: Option<Observer<'_>>,
) -> Result<RunResult> {
    check_planes(x, cfg.clusters, &[k])?;
    let model = Tfkpc {
        knowledge: k,
        lambda: cfg.lambda,
        directions: first_axis(cfg.clusters, x.feature_count()),
        biases: Array1::zeros(cfg.clusters),
    };
    solver::run(x, cfg, model, observer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn pts(rows: &[[f64; 2]]) -> DataMatrix {
        DataMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn objective_hand_value() {
        let x = pts(&[[1.0, 1.0]]);
        let u = FuzzyPartition::from_labels(&[0], 1).unwrap();
        let p = PlaneSet::new(array![[0.0, 1.0]], array![-1.0]).unwrap();
        let k = PlaneSet::new(array![[0.0, 1.0]], array![0.0]).unwrap();
        assert_eq!(tfkpc_objective(&x, &u, &p, &k, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(tfkpc_objective(&x, &u, &p, &k, 2.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn flat_cluster_gets_vertical_normal() {
        let x = pts(&[[-2.0, 3.0], [0.0, 3.0], [1.5, 3.0], [4.0, 3.0]]);
        let u = FuzzyPartition::new(array![[0.5; 4], [0.5; 4]]).unwrap();
        let dirs = tfkpc_direction_update(&x, &u, 2.0).unwrap();
        for i in 0..2 {
            assert!(dirs[[i, 0]].abs() < 1e-12 && (dirs[[i, 1]] - 1.0).abs() < 1e-12);
        }
        let b = tfkpc_bias_update(&x, &u, &dirs, 2.0).unwrap();
        assert!((b[0] + 3.0).abs() < 1e-12);
        for j in 0..4 {
            assert!((x.sample(j).dot(&dirs.row(0)) + b[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn isotropic_cloud_is_deterministic_unit() {
        let x = pts(&[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]);
        let u = FuzzyPartition::new(array![[0.5; 4], [0.5; 4]]).unwrap();
        let a = tfkpc_direction_update(&x, &u, 2.0).unwrap();
        let b = tfkpc_direction_update(&x, &u, 2.0).unwrap();
        assert_eq!(a, b);
        for row in a.rows() {
            assert!((row.dot(&row).sqrt() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn bias_single_point_and_translation() {
        let x = pts(&[[2.0, 5.0]]);
        let u = FuzzyPartition::from_labels(&[0], 1).unwrap();
        let v = array![[0.6, 0.8]];
        let b = tfkpc_bias_update(&x, &u, &v, 2.0).unwrap();
        assert!((b[0] + 0.6 * 2.0 + 0.8 * 5.0).abs() < 1e-12);

        let x = pts(&[[1.0, 2.0], [3.0, -1.0], [0.5, 0.5]]);
        let shift = [4.0, -7.0];
        let moved = pts(&[[5.0, -5.0], [7.0, -8.0], [4.5, -6.5]]);
        let u = FuzzyPartition::new(array![[0.9, 0.2, 0.6], [0.1, 0.8, 0.4]]).unwrap();
        let v = array![[0.6, 0.8], [1.0, 0.0]];
        let b0 = tfkpc_bias_update(&x, &u, &v, 2.0).unwrap();
        let b1 = tfkpc_bias_update(&moved, &u, &v, 2.0).unwrap();
        for i in 0..2 {
            let expected = b0[i] - (v[[i, 0]] * shift[0] + v[[i, 1]] * shift[1]);
            assert!((b1[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn membership_update_cases() {
        let x = pts(&[[0.0, 1.0], [0.0, 0.5]]);
        let p = PlaneSet::new(array![[0.0, 1.0], [0.0, 1.0]], array![-1.0, 0.0]).unwrap();
        let u = tfkpc_membership_update(&x, &p, &p, 2.0, 0.0).unwrap();
        assert_eq!(u.get(0, 0), 1.0);
        // second point: residuals 0.5 and 0.5
        assert_eq!(u.get(0, 1), 0.5);
    }

    #[test]
    fn fits_two_exact_lines() {
        let mut rows = Vec::new();
        for t in 0..8 {
            let s = t as f64;
            rows.push([s, 0.5 * s + 1.0]);
            rows.push([s, -2.0 * s + 20.0]);
        }
        let x = pts(&rows);
        let k = PlaneSet::new(array![[1.0, 0.0], [1.0, 0.0]], array![0.0, 0.0]).unwrap();
        let best = (0..10)
            .map(|seed| tfkpc_fit(&x, &k, &AlgoConfig::new(2).with_seed(seed)).unwrap())
            .map(|r| r.final_objective())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-10, "{best}");
    }
}
