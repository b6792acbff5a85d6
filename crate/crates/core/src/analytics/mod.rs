//! Exact and Monte Carlo checks of the combinatorial and probabilistic facts
//! the algorithms rely on.
//!
//! Monte Carlo verdicts use one rule throughout: an observed frequency is
//! accepted against an upper bound when `estimate ≤ bound + 4·SE`, and
//! against an exact value when `|estimate − exact| ≤ 4·SE`.

pub mod indep;
pub mod lists;
pub mod montecarlo;
pub mod omega;

use serde::Serialize;
use thiserror::Error;

use crate::pca::PcaError;

pub use indep::{
    check_lmu, check_shearer_count, count_independent_sets, independence_polynomial,
    median_independent_set_size, LmuVerdict, ShearerCheck, SmallGraph,
};
pub use lists::{
    expected_lv, exp_rho_lower_bound, lv_distribution, negative_correlation_exact, rho, sum_rho,
    uniform_lower_bound, LvDistribution, NegCorrReport, WeightedBits,
};
pub use montecarlo::{
    chernoff_grid, chernoff_validator, chi_square_uniform, lv_lower_tail, mc_flaw_probability, mc_mean_lv,
    ChernoffFamily, FlawProbabilityReport, ListModel, Tail,
};
pub use omega::{injection_check, kernel_stationarity, resampling_walk, sampler_uniformity, InjectionReport, UniformityReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalyticsError {
    #[error("enumeration budget exceeded: {size} > {budget}")]
    BudgetExceeded { size: u128, budget: u128 },
    #[error("graph has {0} vertices; exact counting supports at most 64")]
    TooManyVertices(usize),
    #[error("graph contains a K_{0}")]
    NotKrFree(usize),
    #[error("r must be at least {min}, got {r}")]
    InvalidR { r: usize, min: usize },
    #[error("the graph is empty")]
    EmptyGraph,
    #[error("at least {min} trials are required, got {got}")]
    TooFewTrials { got: usize, min: usize },
    #[error(transparent)]
    Pca(#[from] PcaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub trials: usize,
    /// Sample standard deviation over `√trials`.
    pub std_error: f64,
    pub bound: f64,
    pub verdict: Verdict,
}

impl EstimateReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Verdict for "the true value is at most `bound`".
    pub fn upper(mut self) -> Self {
        self.verdict = if self.estimate <= self.bound + 4.0 * self.std_error {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    /// Verdict for "the true value equals `bound`".
    pub fn agrees(mut self) -> Self {
        self.verdict = if (self.estimate - self.bound).abs() <= 4.0 * self.std_error {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }
}

/// Running first and second moments.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    pub(crate) fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub(crate) fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    pub(crate) fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }

    pub(crate) fn report(&self, bound: f64) -> EstimateReport {
        EstimateReport {
            estimate: self.mean(),
            trials: self.n,
            std_error: self.std_error(),
            bound,
            verdict: Verdict::Inconclusive,
        }
    }
}
