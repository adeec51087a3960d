//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use tpfc::partition::init_partition;
use tpfc::{CenterSet, DataMatrix, FuzzyPartition, PlaneSet, SubspaceKnowledge, SubspaceWeightSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mean and sample standard deviation.
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn random_data(r: &mut ChaCha8Rng, n: usize, d: usize, scale: f64) -> DataMatrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| scale * r.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    DataMatrix::from_rows(&rows).unwrap()
}

pub fn random_partition(r: &mut ChaCha8Rng, c: usize, n: usize) -> FuzzyPartition {
    init_partition(r.random(), c, n).unwrap()
}

pub fn random_centers(r: &mut ChaCha8Rng, c: usize, d: usize, scale: f64) -> CenterSet {
    CenterSet::new(Array2::from_shape_fn((c, d), |_| scale * r.sample::<f64, _>(StandardNormal))).unwrap()
}

pub fn random_unit(r: &mut ChaCha8Rng, d: usize) -> Array1<f64> {
    loop {
        let v = Array1::from_shape_fn(d, |_| r.sample::<f64, _>(StandardNormal));
        let n = v.dot(&v).sqrt();
        if n > 1e-3 {
            return v / n;
        }
    }
}

pub fn random_planes(r: &mut ChaCha8Rng, c: usize, d: usize) -> PlaneSet {
    let mut dirs = Array2::zeros((c, d));
    for i in 0..c {
        dirs.row_mut(i).assign(&random_unit(r, d));
    }
    let biases = Array1::from_shape_fn(c, |_| r.sample::<f64, _>(StandardNormal));
    PlaneSet::new(dirs, biases).unwrap()
}

pub fn random_weights(r: &mut ChaCha8Rng, c: usize, d: usize) -> SubspaceWeightSet {
    let mut w = Array2::from_shape_fn((c, d), |_| r.random_range(0.05..1.0));
    for mut row in w.rows_mut() {
        let s = row.sum();
        row /= s;
    }
    SubspaceWeightSet::new(w).unwrap()
}

pub fn random_subspace(r: &mut ChaCha8Rng, c: usize, d: usize, scale: f64) -> SubspaceKnowledge {
    SubspaceKnowledge::new(random_centers(r, c, d, scale), random_weights(r, c, d)).unwrap()
}

/// Zero-sum direction of Euclidean norm `size` that keeps `p + δ` inside
/// the probability simplex; components at the boundary may only grow.
pub fn simplex_perturbation(r: &mut ChaCha8Rng, p: &[f64], size: f64) -> Option<Vec<f64>> {
    for _ in 0..100 {
        let mut delta: Vec<f64> = p.iter().map(|_| r.sample::<f64, _>(StandardNormal)).collect();
        let mean = delta.iter().sum::<f64>() / delta.len() as f64;
        delta.iter_mut().for_each(|x| *x -= mean);
        let norm = delta.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-9 {
            continue;
        }
        delta.iter_mut().for_each(|x| *x *= size / norm);
        if p.iter().zip(&delta).all(|(a, b)| (0.0..=1.0).contains(&(a + b))) {
            return Some(delta);
        }
    }
    None
}

/// Replaces column `j` of `u` by `u_j + δ`.
pub fn perturb_column(u: &FuzzyPartition, j: usize, delta: &[f64]) -> FuzzyPartition {
    let mut m = u.memberships().to_owned();
    for (i, d) in delta.iter().enumerate() {
        m[[i, j]] += d;
    }
    // Re-normalize away the rounding of the addition.
    let s: f64 = m.column(j).sum();
    m.column_mut(j).mapv_inplace(|x| x / s);
    FuzzyPartition::new(m).unwrap()
}

/// Angle between two lines through the origin, in radians.
pub fn line_angle(a: ndarray::ArrayView1<'_, f64>, b: ndarray::ArrayView1<'_, f64>) -> f64 {
    let c = a.dot(&b).abs() / (a.dot(&a).sqrt() * b.dot(&b).sqrt());
    c.min(1.0).acos()
}

/// Golden-section minimizer of a unimodal function on `[lo, hi]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// Normal angle of a 2-D line minimizing `Σ u^m (x·n(θ) + b*(θ))²`, where
/// `n(θ) = (cos θ, sin θ)` and `b*` is the best bias for that normal. A
/// 1-degree grid over `[0, π)` picks the bracket, golden-section search
/// refines it.
pub fn grid_search_normal(x: &DataMatrix, weights: &[f64]) -> f64 {
    let cost = |theta: f64| -> f64 {
        let n = [theta.cos(), theta.sin()];
        let proj: Vec<f64> = (0..x.sample_count())
            .map(|j| n[0] * x.samples()[[j, 0]] + n[1] * x.samples()[[j, 1]])
            .collect();
        let wsum: f64 = weights.iter().sum();
        let b = -proj.iter().zip(weights).map(|(p, w)| p * w).sum::<f64>() / wsum;
        proj.iter().zip(weights).map(|(p, w)| w * (p + b).powi(2)).sum()
    };
    let step = std::f64::consts::PI / 180.0;
    let best = (0..180)
        .min_by(|&a, &b| cost(a as f64 * step).total_cmp(&cost(b as f64 * step)))
        .unwrap() as f64
        * step;
    golden_section(cost, best - step, best + step, 1e-12)
}
