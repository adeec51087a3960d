use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// Names accepted by [`AlgoConfig::set_param`], in canonical order.
pub const PARAM_NAMES: [&str; 9] = [
    "clusters", "m", "tau", "sigma", "lambda1", "lambda2", "lambda", "epsilon", "max_iter",
];

/// Parameters shared by every fit. Fields an algorithm does not use are
/// ignored by it (`tau`/`sigma` outside the subspace family, `lambda1`/
/// `lambda2` for TFKPC, `lambda` for TFCM/TFSC).
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoConfig {
    pub clusters: usize,
    /// Membership fuzzifier `m > 1`.
    pub m: f64,
    /// Feature-weight fuzzifier `τ > 1`.
    pub tau: f64,
    /// Weight regularizer `σ >= 0`. `None` means `0.1 ×` the mean
    /// per-feature variance of the data being clustered.
    pub sigma: Option<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        Self {
            clusters: 2,
            m: 2.0,
            tau: 2.0,
            sigma: None,
            lambda1: 0.0,
            lambda2: 0.0,
            lambda: 0.0,
            epsilon: 1e-5,
            max_iter: 100,
            seed: 0,
        }
    }
}

impl AlgoConfig {
    pub fn new(clusters: usize) -> Self {
        Self {
            clusters,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_lambdas(mut self, lambda1: f64, lambda2: f64) -> Self {
        self.lambda1 = lambda1;
        self.lambda2 = lambda2;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    /// Sets a parameter by name. `clusters` and `max_iter` must be whole
    /// numbers; `sigma` switches off the data-derived default.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let whole = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v <= usize::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidConfig(format!("{name} must be a non-negative integer, got {v}")))
            }
        };
        match name {
            "clusters" => self.clusters = whole(value)?,
            "m" => self.m = value,
            "tau" => self.tau = value,
            "sigma" => self.sigma = Some(value),
            "lambda1" => self.lambda1 = value,
            "lambda2" => self.lambda2 = value,
            "lambda" => self.lambda = value,
            "epsilon" => self.epsilon = value,
            "max_iter" => self.max_iter = whole(value)?,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown parameter {other:?} (expected one of {})",
                    PARAM_NAMES.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Checks every field against its documented range and `2 <= C <= N`.
    pub fn validate(&self, samples: usize) -> Result<()> {
        let mut bad = Vec::new();
        if self.clusters < 2 || self.clusters > samples {
            bad.push(format!(
                "cluster count must satisfy 2 <= C <= N (C={}, N={samples})",
                self.clusters
            ));
        }
        if !(self.m > 1.0 && self.m.is_finite()) {
            bad.push(format!("m must be > 1 (got {})", self.m));
        }
        if !(self.tau > 1.0 && self.tau.is_finite()) {
            bad.push(format!("tau must be > 1 (got {})", self.tau));
        }
        if let Some(s) = self.sigma {
            if !(s >= 0.0 && s.is_finite()) {
                bad.push(format!("sigma must be >= 0 (got {s})"));
            }
        }
        for (name, v) in [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda", self.lambda),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                bad.push(format!("{name} must be >= 0 (got {v})"));
            }
        }
        if !(self.epsilon > 0.0) {
            bad.push(format!("epsilon must be > 0 (got {})", self.epsilon));
        }
        if self.max_iter == 0 {
            bad.push("max_iter must be positive".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(bad.join("; ")))
        }
    }

    pub fn resolved_sigma(&self, x: &DataMatrix) -> f64 {
        self.sigma.unwrap_or_else(|| 0.1 * x.mean_feature_variance())
    }
}
