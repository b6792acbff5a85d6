//! Monte Carlo estimates: flaw probabilities under the independent and the
//! uniform-Ω recolouring models, the lower tail of `|L_v|`, and Chernoff
//! tails for negatively correlated indicator families.

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::lists::{expected_lv, ratio_to_f64};
use super::{AnalyticsError, EstimateReport, Moments, Verdict};
use crate::color_set::Color;
use crate::flaw::FlawParams;
use crate::neighborhood::Neighborhood;
use crate::pca::PcaSpace;
use crate::rng;

/// Fewest trials accepted by the flaw-probability estimator.
pub const MIN_TRIALS: usize = 1000;

/// How `N_v` is recoloured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ListModel {
    /// Each neighbour independently takes a uniform element of its list.
    Independent,
    /// A uniform partial colour assignment of `N_v`.
    Omega { palette_size: usize, budget: u128 },
}

fn draw_independent<R: Rng + ?Sized>(nb: &Neighborhood, rng: &mut R, out: &mut [Option<Color>]) {
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = nb.choice(i, rng.gen_range(0..nb.list_len(i)));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlawProbabilityReport {
    pub model: ListModel,
    pub b: EstimateReport,
    pub z: EstimateReport,
    /// Exact probabilities by enumeration, when within budget.
    pub exact_b: Option<f64>,
    pub exact_z: Option<f64>,
    /// `Δ^{−4}` with `Δ = |N_v|`; reported only.
    pub delta_pow_minus4: f64,
}

/// Frequencies of `B_v` and `Z_v` after recolouring `N_v`. With
/// `exact_budget`, small spaces are also enumerated and each estimate must
/// agree with its exact value within 4 SE; otherwise the verdicts are
/// inconclusive and the asymptotic `Δ^{−4}` is reported alongside.
pub fn mc_flaw_probability(
    nb: &Neighborhood,
    params: &FlawParams,
    model: ListModel,
    trials: usize,
    seed: u64,
    exact_budget: Option<u128>,
) -> Result<FlawProbabilityReport, AnalyticsError> {
    if trials < MIN_TRIALS {
        return Err(AnalyticsError::TooFewTrials {
            got: trials,
            min: MIN_TRIALS,
        });
    }
    let mut space = match model {
        ListModel::Independent => None,
        ListModel::Omega { palette_size, budget } => Some(PcaSpace::new(nb.clone(), palette_size, budget)?),
    };
    let mut rng = rng::stream(seed, rng::LAB, 0);
    let (mut b, mut z) = (Moments::default(), Moments::default());
    let mut assign = vec![None; nb.len()];
    for _ in 0..trials {
        match space.as_mut() {
            None => draw_independent(nb, &mut rng, &mut assign),
            Some(s) => assign = s.sample(&mut rng).assignment,
        }
        b.push(nb.b_holds(&assign, params.threshold) as u8 as f64);
        z.push(nb.z_holds(&assign, params) as u8 as f64);
    }

    let exact = match exact_budget {
        None => None,
        Some(budget) => {
            let (mut nb_hits, mut nz_hits, mut total) = (0u128, 0u128, 0u128);
            let mut tally = |a: &[Option<Color>]| {
                total += 1;
                nb_hits += nb.b_holds(a, params.threshold) as u128;
                nz_hits += nb.z_holds(a, params) as u128;
            };
            match space.as_mut() {
                None => {
                    let size = nb.product_size().unwrap_or(u128::MAX);
                    if size > budget {
                        return Err(AnalyticsError::BudgetExceeded { size, budget });
                    }
                    nb.for_each_product(|a| {
                        tally(a);
                        true
                    });
                }
                Some(s) => s.enumerate(budget)?.iter().for_each(|w| tally(&w.assignment)),
            }
            let p = |k: u128| ratio_to_f64(&num_rational::Ratio::new(k, total));
            Some((p(nb_hits), p(nz_hits)))
        }
    };

    let delta = nb.len() as f64;
    let delta_pow_minus4 = delta.powi(-4);
    let judge = |m: &Moments, exact: Option<f64>| match exact {
        Some(p) => {
            let mut r = m.report(p);
            // a rare event may not be seen at all; use the exact SE as a floor
            r.std_error = r.std_error.max((p * (1.0 - p) / trials as f64).sqrt());
            r.agrees()
        }
        None => m.report(delta_pow_minus4),
    };
    Ok(FlawProbabilityReport {
        model,
        b: judge(&b, exact.map(|e| e.0)),
        z: judge(&z, exact.map(|e| e.1)),
        exact_b: exact.map(|e| e.0),
        exact_z: exact.map(|e| e.1),
        delta_pow_minus4,
    })
}

/// Sample mean of `|L_v|` under independent draws, judged against the exact
/// expectation.
pub fn mc_mean_lv(nb: &Neighborhood, trials: usize, seed: u64) -> EstimateReport {
    let mut rng = rng::stream(seed, rng::LAB, 1);
    let mut m = Moments::default();
    let mut assign = vec![None; nb.len()];
    for _ in 0..trials {
        draw_independent(nb, &mut rng, &mut assign);
        m.push(nb.available_len(&assign) as f64);
    }
    m.report(expected_lv(nb)).agrees()
}

/// Frequency of `|L_v| < E/2` against `e^{−E/8}`, `E = E|L_v|`.
pub fn lv_lower_tail(nb: &Neighborhood, trials: usize, seed: u64) -> EstimateReport {
    let e = expected_lv(nb);
    let mut rng = rng::stream(seed, rng::LAB, 2);
    let mut m = Moments::default();
    let mut assign = vec![None; nb.len()];
    for _ in 0..trials {
        draw_independent(nb, &mut rng, &mut assign);
        m.push(((nb.available_len(&assign) as f64) < e / 2.0) as u8 as f64);
    }
    m.report((-e / 8.0).exp()).upper()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// `Pr(X > E + t) < e^{−t²/3E}`, needs the `X_i` negatively correlated.
    Upper,
    /// `Pr(X < E − t) < e^{−t²/2E}`, needs the `1 − X_i` negatively correlated.
    Lower,
}

impl Tail {
    pub fn bound(self, e: f64, t: f64) -> f64 {
        match self {
            Tail::Upper => (-t * t / (3.0 * e)).exp(),
            Tail::Lower => (-t * t / (2.0 * e)).exp(),
        }
    }
}

/// A family of 0/1 indicators with `X` their sum.
#[derive(Debug, Clone, PartialEq)]
pub enum ChernoffFamily {
    /// Independent Bernoulli variables with these means.
    Independent(Vec<f64>),
    /// `X_c = [c ∈ L_v]` for `c ∈ C_v`; only the complements are known to be
    /// negatively correlated, so only the lower tail applies.
    ListIndicators(Neighborhood),
    /// `X_i = [i-th draw is marked]` when drawing `draws` of `total` items,
    /// `marked` of them marked, without replacement.
    WithoutReplacement { total: usize, marked: usize, draws: usize },
}

impl ChernoffFamily {
    pub fn expectation(&self) -> f64 {
        match self {
            ChernoffFamily::Independent(p) => p.iter().sum(),
            ChernoffFamily::ListIndicators(nb) => expected_lv(nb) - 1.0,
            ChernoffFamily::WithoutReplacement { total, marked, draws } => {
                if *total == 0 {
                    0.0
                } else {
                    *draws as f64 * *marked as f64 / *total as f64
                }
            }
        }
    }

    pub fn tails(&self) -> &'static [Tail] {
        match self {
            ChernoffFamily::ListIndicators(_) => &[Tail::Lower],
            _ => &[Tail::Upper, Tail::Lower],
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, scratch: &mut Vec<Option<Color>>) -> f64 {
        match self {
            ChernoffFamily::Independent(p) => p.iter().filter(|&&pi| rng.gen_bool(pi.clamp(0.0, 1.0))).count() as f64,
            ChernoffFamily::ListIndicators(nb) => {
                scratch.resize(nb.len(), None);
                draw_independent(nb, rng, scratch);
                (nb.available_len(scratch) - 1) as f64
            }
            ChernoffFamily::WithoutReplacement { total, marked, draws } => sample(rng, *total, (*draws).min(*total))
                .into_iter()
                .filter(|&i| i < *marked)
                .count() as f64,
        }
    }
}

/// Empirical `Pr(X > E + t)` or `Pr(X < E − t)` against the matching bound.
/// A family with `E(X) = 0` is vacuous and reported inconclusive.
pub fn chernoff_validator(family: &ChernoffFamily, tail: Tail, t: f64, trials: usize, seed: u64) -> EstimateReport {
    let e = family.expectation();
    if e <= 0.0 {
        return EstimateReport {
            estimate: 0.0,
            trials: 0,
            std_error: 0.0,
            bound: 1.0,
            verdict: Verdict::Inconclusive,
        };
    }
    let index = match tail {
        Tail::Upper => 0,
        Tail::Lower => 1,
    } + t.to_bits().wrapping_mul(2);
    let mut rng = rng::stream(seed, rng::LAB, index);
    let mut m = Moments::default();
    let mut scratch = Vec::new();
    for _ in 0..trials {
        let x = family.sample(&mut rng, &mut scratch);
        let hit = match tail {
            Tail::Upper => x > e + t,
            Tail::Lower => x < e - t,
        };
        m.push(hit as u8 as f64);
    }
    m.report(tail.bound(e, t)).upper()
}

/// [`chernoff_validator`] over `t ∈ {0.25, 0.5, 1}·E(X)` and every tail
/// that applies to the family.
pub fn chernoff_grid(family: &ChernoffFamily, trials: usize, seed: u64) -> Vec<(Tail, f64, EstimateReport)> {
    let e = family.expectation();
    let mut out = Vec::new();
    for frac in [0.25, 0.5, 1.0] {
        for &tail in family.tails() {
            let t = frac * e;
            out.push((tail, t, chernoff_validator(family, tail, t, trials, seed)));
        }
    }
    out
}

/// Pearson's statistic for uniformity over `counts.len()` cells and its
/// p-value.
pub fn chi_square_uniform(counts: &[u64]) -> (f64, f64) {
    let k = counts.len();
    let n: u64 = counts.iter().sum();
    if k < 2 || n == 0 {
        return (0.0, 1.0);
    }
    let expected = n as f64 / k as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((k - 1) as f64).expect("positive degrees of freedom");
    (stat, dist.sf(stat))
}
