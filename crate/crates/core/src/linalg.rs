//! Dense symmetric eigendecomposition and the membership-weighted scatter
//! matrix whose smallest eigenvector is the best-fitting hyperplane normal.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// A square matrix symmetric to within `1e-12` relative.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(Array2<f64>);

impl SymmetricMatrix {
    pub fn new(a: Array2<f64>) -> Result<Self> {
        let (r, c) = a.dim();
        if r != c {
            return Err(Error::Dimension(format!("{r}x{c} matrix is not square")));
        }
        for p in 0..r {
            for q in (p + 1)..r {
                let (x, y) = (a[[p, q]], a[[q, p]]);
                if (x - y).abs() > 1e-12 * x.abs().max(1.0) {
                    return Err(Error::Invariant(format!("entries ({p},{q}) and ({q},{p}) differ")));
                }
            }
        }
        Ok(Self(a))
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.diag().sum()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Array1<f64>,
    pub vectors: Array2<f64>,
}

/// `X (D_i - S_i) X^T` for one cluster, with `D_i = diag(u_ij^m)` and
/// `S_i = u u^T / (u^T e)`. Evaluated as the equivalent centered sum
/// `Σ_j u_ij^m (x_j - x̄)(x_j - x̄)^T` around the `u^m`-weighted mean.
pub fn weighted_scatter(
    x: &DataMatrix,
    row_memberships: ArrayView1<'_, f64>,
    m: f64,
) -> Result<SymmetricMatrix> {
    let n = x.sample_count();
    if row_memberships.len() != n {
        return Err(Error::Dimension(format!(
            "{} memberships for {n} samples",
            row_memberships.len()
        )));
    }
    if row_memberships.iter().any(|&u| u < 0.0) {
        return Err(Error::InvalidData("memberships must be nonnegative".into()));
    }
    let weights = row_memberships.mapv(|u| u.powf(m));
    weighted_scatter_powered(x.samples(), weights.view(), 0)
}

/// Same as [`weighted_scatter`] but takes `u_ij^m` directly; `cluster` is only
/// used for error reporting.
pub(crate) fn weighted_scatter_powered(
    samples: ArrayView2<'_, f64>,
    weights: ArrayView1<'_, f64>,
    cluster: usize,
) -> Result<SymmetricMatrix> {
    let d = samples.ncols();
    let total: f64 = weights.sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateCluster { cluster });
    }
    let mean = weights.dot(&samples) / total;
    let mut scatter = Array2::<f64>::zeros((d, d));
    let mut centered = Array1::<f64>::zeros(d);
    for (row, &w) in samples.rows().into_iter().zip(weights.iter()) {
        if w == 0.0 {
            continue;
        }
        centered.assign(&row);
        centered -= &mean;
        for p in 0..d {
            let wp = w * centered[p];
            for q in p..d {
                scatter[[p, q]] += wp * centered[q];
            }
        }
    }
    for p in 0..d {
        for q in 0..p {
            scatter[[p, q]] = scatter[[q, p]];
        }
    }
    Ok(SymmetricMatrix(scatter))
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
pub fn sym_eigen(a: &SymmetricMatrix) -> Result<Eigen> {
    if a.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("symmetric matrix"));
    }
    let d = a.dim();
    let dm = DMatrix::from_fn(d, d, |r, c| a.0[[r, c]]);
    let eig = SymmetricEigen::new(dm);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));

    let values = Array1::from_iter(order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = Array2::from_shape_fn((d, d), |(r, c)| eig.eigenvectors[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

/// `1e-9 × trace(A)`, the default negativity allowance for a PSD matrix.
pub fn default_psd_tol(a: &SymmetricMatrix) -> f64 {
    1e-9 * a.trace().abs()
}

/// Unit eigenvector of the smallest eigenvalue of a PSD matrix, with its
/// eigenvalue clamped at zero.
///
/// The sign is fixed so the first nonzero component is positive. Among
/// eigenvalues tied with the minimum (within `tol`), the vector is projected
/// onto the tied eigenspace starting from the lowest coordinate axis, so
/// degenerate spectra still give a reproducible answer.
pub fn min_nonneg_eigvec(a: &SymmetricMatrix, tol: f64) -> Result<(Array1<f64>, f64)> {
    let eig = sym_eigen(a)?;
    let lambda_min = eig.values[0];
    if lambda_min < -tol {
        return Err(Error::NotPsd {
            eigenvalue: lambda_min,
            tol,
        });
    }
    let tied = eig
        .values
        .iter()
        .take_while(|&&v| v - lambda_min <= tol.max(f64::EPSILON * lambda_min.abs()))
        .count();
    let mut v = if tied > 1 {
        canonical_in_span(&eig.vectors, tied)
    } else {
        eig.vectors.column(0).to_owned()
    };
    if let Some(first) = v.iter().copied().find(|c| c.abs() > 1e-12) {
        if first < 0.0 {
            v.mapv_inplace(|c| -c);
        }
    }
    Ok((v, lambda_min.max(0.0)))
}

/// Projection of the first coordinate axis with a nonzero component onto the
/// span of the first `k` columns, normalized.
fn canonical_in_span(vectors: &Array2<f64>, k: usize) -> Array1<f64> {
    let d = vectors.nrows();
    let basis = vectors.slice(ndarray::s![.., ..k]);
    for axis in 0..d {
        // P e_axis = B (B^T e_axis) = B · (row `axis` of B)
        let coeffs = basis.row(axis);
        let proj = basis.dot(&coeffs);
        let norm = proj.dot(&proj).sqrt();
        if norm > 1e-8 {
            return proj / norm;
        }
    }
    vectors.column(0).to_owned()
}
