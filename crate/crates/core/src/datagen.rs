//! Seeded generators for the three synthetic benchmark families, each in a
//! source and a target flavor.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::data::DataMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Source,
    Target,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Source => "source",
            Domain::Target => "target",
        }
    }

    fn stream(self) -> u64 {
        match self {
            Domain::Source => 0,
            Domain::Target => 1,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(Domain::Source),
            "target" => Ok(Domain::Target),
            other => Err(Error::InvalidConfig(format!(
                "unknown domain {other:?} (expected source or target)"
            ))),
        }
    }
}

fn rng_for(domain: Domain, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(domain.stream());
    rng
}

/// Per-cluster sizes, remainder handed out round-robin from cluster 0.
pub fn split_counts(total: usize, clusters: usize) -> Vec<usize> {
    (0..clusters)
        .map(|c| total / clusters + usize::from(c < total % clusters))
        .collect()
}

/// Axis-aligned Gaussian blob.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianClusterSpec {
    pub mean: Vec<f64>,
    /// Diagonal of the covariance.
    pub variances: Vec<f64>,
    pub count: usize,
}

impl GaussianClusterSpec {
    pub fn validate(&self) -> Result<()> {
        if self.mean.len() != self.variances.len() {
            return Err(Error::Dimension("mean and covariance lengths differ".into()));
        }
        if self.variances.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidConfig("covariance diagonal must be positive".into()));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut impl Rng, out: &mut Vec<Vec<f64>>) -> Result<()> {
        self.validate()?;
        let dists: Vec<Normal<f64>> = self
            .mean
            .iter()
            .zip(&self.variances)
            .map(|(&mu, &var)| Normal::new(mu, var.sqrt()).expect("validated"))
            .collect();
        for _ in 0..self.count {
            out.push(dists.iter().map(|n| n.sample(rng)).collect());
        }
        Ok(())
    }
}

/// Noisy segment of the line `v·x + b = 0` in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneClusterSpec {
    pub direction: [f64; 2],
    pub bias: f64,
    /// Standard deviation of the residual `v·x + b`.
    pub noise_sigma: f64,
    pub x1_range: [f64; 2],
    pub count: usize,
}

impl PlaneClusterSpec {
    pub fn validate(&self) -> Result<()> {
        let [v1, v2] = self.direction;
        if ((v1 * v1 + v2 * v2).sqrt() - 1.0).abs() > 1e-4 {
            return Err(Error::InvalidConfig("plane direction must be unit length".into()));
        }
        if v2.abs() <= 1e-9 {
            return Err(Error::InvalidConfig("plane cannot be solved for x2".into()));
        }
        if !(self.x1_range[0] < self.x1_range[1]) {
            return Err(Error::InvalidConfig("x1 range must satisfy lo < hi".into()));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::InvalidConfig("noise sigma must be non-negative".into()));
        }
        Ok(())
    }

    /// The noise goes on `x2` alone, scaled so the residual has std `noise_sigma`.
    fn sample(&self, rng: &mut impl Rng, out: &mut Vec<Vec<f64>>) -> Result<()> {
        self.validate()?;
        let [v1, v2] = self.direction;
        let x1_dist = Uniform::new_inclusive(self.x1_range[0], self.x1_range[1]).expect("validated");
        let noise = Normal::new(0.0, self.noise_sigma / v2.abs()).expect("validated");
        for _ in 0..self.count {
            let x1 = x1_dist.sample(rng);
            let e = noise.sample(rng);
            out.push(vec![x1, -(self.bias + v1 * x1) / v2 + e]);
        }
        Ok(())
    }
}

/// Uniform background with a narrow signal band on a block of features.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceClusterSpec {
    /// Zero-based, inclusive.
    pub important: [usize; 2],
    pub count: usize,
    pub dim: usize,
    pub background: [f64; 2],
    pub signal: [f64; 2],
}

impl SubspaceClusterSpec {
    pub fn important_features(&self) -> Vec<usize> {
        (self.important[0]..=self.important[1]).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.important[0] > self.important[1] || self.important[1] >= self.dim {
            return Err(Error::InvalidConfig("important interval outside the feature range".into()));
        }
        if self.count == 0 {
            return Err(Error::InvalidConfig("cluster size must be positive".into()));
        }
        if !(self.background[0] < self.background[1] && self.signal[0] < self.signal[1]) {
            return Err(Error::InvalidConfig("value ranges must satisfy lo < hi".into()));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut impl Rng, out: &mut Vec<Vec<f64>>) -> Result<()> {
        self.validate()?;
        let bg = Uniform::new_inclusive(self.background[0], self.background[1]).expect("validated");
        let sig = Uniform::new_inclusive(self.signal[0], self.signal[1]).expect("validated");
        let [lo, hi] = self.important;
        for _ in 0..self.count {
            out.push(
                (0..self.dim)
                    .map(|k| if (lo..=hi).contains(&k) { sig.sample(rng) } else { bg.sample(rng) })
                    .collect(),
            );
        }
        Ok(())
    }
}

fn domain_size(domain: Domain, source: usize, target: usize) -> usize {
    match domain {
        Domain::Source => source,
        Domain::Target => target,
    }
}

pub fn d1_specs(domain: Domain) -> Vec<GaussianClusterSpec> {
    let (means, vars) = match domain {
        Domain::Source => (
            [[-1.0, 8.0], [15.0, 8.0], [9.0, 27.0]],
            [[10.0, 10.0], [25.0, 7.0], [30.0, 20.0]],
        ),
        Domain::Target => (
            [[-1.0, 12.0], [15.0, 13.0], [9.0, 25.0]],
            [[9.5, 9.0], [23.0, 7.5], [28.0, 21.0]],
        ),
    };
    let counts = split_counts(domain_size(domain, 600, 80), 3);
    (0..3)
        .map(|c| GaussianClusterSpec {
            mean: means[c].to_vec(),
            variances: vars[c].to_vec(),
            count: counts[c],
        })
        .collect()
}

pub fn d2_specs(domain: Domain) -> Vec<PlaneClusterSpec> {
    let (dirs, biases, sigmas, ranges) = match domain {
        Domain::Source => (
            [[0.9487, 0.3162], [-0.9487, 0.3162], [-0.9487, 0.3162]],
            [-6.9570, 3.4785, -5.3759],
            [0.3162, 0.3162, 0.3162],
            [[-0.05, 10.0], [0.05, 10.0], [-10.0, 5.0]],
        ),
        Domain::Target => (
            [[0.9615, 0.2747], [-0.9285, 0.3714], [-0.9285, 0.3714]],
            [-4.9450, 3.3425, -7.0564],
            [0.2747, 0.3714, 0.3714],
            [[-2.0, 8.0], [0.05, 12.0], [-10.0, 5.0]],
        ),
    };
    let counts = split_counts(domain_size(domain, 600, 60), 3);
    (0..3)
        .map(|c| PlaneClusterSpec {
            direction: dirs[c],
            bias: biases[c],
            noise_sigma: sigmas[c],
            x1_range: ranges[c],
            count: counts[c],
        })
        .collect()
}

pub const D3_DIM: usize = 200;

pub fn d3_specs(domain: Domain) -> Vec<SubspaceClusterSpec> {
    // one-based inclusive intervals
    let intervals = match domain {
        Domain::Source => [[1, 31], [10, 40], [20, 55]],
        Domain::Target => [[1, 32], [25, 40], [35, 55]],
    };
    let counts = split_counts(domain_size(domain, 600, 60), 3);
    (0..3)
        .map(|c| SubspaceClusterSpec {
            important: [intervals[c][0] - 1, intervals[c][1] - 1],
            count: counts[c],
            dim: D3_DIM,
            background: [0.0, 100.0],
            signal: [30.0 * c as f64, 30.0 * c as f64 + 10.0],
        })
        .collect()
}

/// Zero-based important feature indices of each D3 cluster.
pub fn d3_important(domain: Domain) -> Vec<Vec<usize>> {
    d3_specs(domain).iter().map(SubspaceClusterSpec::important_features).collect()
}

fn assemble(rows: Vec<Vec<f64>>, counts: impl Iterator<Item = usize>) -> Result<DataMatrix> {
    let labels: Vec<usize> = counts.enumerate().flat_map(|(c, n)| std::iter::repeat_n(c, n)).collect();
    let d = rows.first().map_or(0, Vec::len);
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let samples = Array2::from_shape_vec((labels.len(), d), flat)
        .map_err(|e| Error::Dimension(e.to_string()))?;
    DataMatrix::new(samples, Some(labels))
}

pub fn gen_gaussian(specs: &[GaussianClusterSpec], seed: u64, domain: Domain) -> Result<DataMatrix> {
    let mut rng = rng_for(domain, seed);
    let mut rows = Vec::new();
    for s in specs {
        s.sample(&mut rng, &mut rows)?;
    }
    assemble(rows, specs.iter().map(|s| s.count))
}

pub fn gen_planes(specs: &[PlaneClusterSpec], seed: u64, domain: Domain) -> Result<DataMatrix> {
    let mut rng = rng_for(domain, seed);
    let mut rows = Vec::new();
    for s in specs {
        s.sample(&mut rng, &mut rows)?;
    }
    assemble(rows, specs.iter().map(|s| s.count))
}

pub fn gen_subspace(specs: &[SubspaceClusterSpec], seed: u64, domain: Domain) -> Result<DataMatrix> {
    let mut rng = rng_for(domain, seed);
    let mut rows = Vec::new();
    for s in specs {
        s.sample(&mut rng, &mut rows)?;
    }
    assemble(rows, specs.iter().map(|s| s.count))
}

/// Three Gaussian clusters in 2-D; 600 source or 80 target samples.
pub fn gen_d1(domain: Domain, seed: u64) -> DataMatrix {
    gen_gaussian(&d1_specs(domain), seed, domain).expect("built-in specs are valid")
}

/// Three noisy line segments in 2-D; 600 source or 60 target samples.
pub fn gen_d2(domain: Domain, seed: u64) -> DataMatrix {
    gen_d2_scaled(domain, seed, 1.0)
}

/// [`gen_d2`] with every noise level multiplied by `noise_scale`; 0 puts each
/// sample exactly on its line.
pub fn gen_d2_scaled(domain: Domain, seed: u64, noise_scale: f64) -> DataMatrix {
    let specs: Vec<PlaneClusterSpec> = d2_specs(domain)
        .into_iter()
        .map(|s| PlaneClusterSpec { noise_sigma: s.noise_sigma * noise_scale, ..s })
        .collect();
    gen_planes(&specs, seed, domain).expect("built-in specs are valid")
}

/// Three subspace clusters in 200-D; 600 source or 60 target samples.
pub fn gen_d3(domain: Domain, seed: u64) -> DataMatrix {
    gen_subspace(&d3_specs(domain), seed, domain).expect("built-in specs are valid")
}
