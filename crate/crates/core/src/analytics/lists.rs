//! The list model around one vertex `v`: every neighbour `u` independently
//! draws a uniform element of `L_u` (Blank included), and `L_v` is what is
//! left of `C_v`. A [`Neighborhood`] carries the non-Blank parts of the
//! `L_u` and `C_v` as `own_list`.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use super::AnalyticsError;
use crate::color_set::{Color, ColorSet};
use crate::neighborhood::Neighborhood;

/// Outcome spaces up to this size are enumerated by default.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// `ρ(c) = Σ_{u: c ∈ L_u} 1/(|L_u| − 1)`.
pub fn rho(nb: &Neighborhood, c: Color) -> f64 {
    nb.lists
        .iter()
        .filter(|l| l.binary_search(&c).is_ok())
        .map(|l| 1.0 / l.len() as f64)
        .sum()
}

/// `Σ_c ρ(c)` over every non-Blank colour in some list; at most `|N_v|`.
pub fn sum_rho(nb: &Neighborhood) -> f64 {
    let colours: ColorSet = nb.lists.iter().flatten().copied().collect();
    colours.iter().map(|c| rho(nb, c)).sum()
}

/// `E|L_v| = 1 + Σ_{c ∈ C_v} ∏_{u: c ∈ L_u} (1 − 1/|L_u|)`.
pub fn expected_lv(nb: &Neighborhood) -> f64 {
    1.0 + nb
        .own_list
        .iter()
        .map(|c| {
            (0..nb.len())
                .filter(|&i| nb.lists[i].binary_search(&c).is_ok())
                .map(|i| 1.0 - 1.0 / nb.list_len(i) as f64)
                .product::<f64>()
        })
        .sum::<f64>()
}

/// `Σ_{c ∈ C_v} e^{−ρ(c)}`, strictly below [`expected_lv`].
pub fn exp_rho_lower_bound(nb: &Neighborhood) -> f64 {
    nb.own_list.iter().map(|c| (-rho(nb, c)).exp()).sum()
}

/// `q·e^{−Δ/q}`.
pub fn uniform_lower_bound(q: usize, delta: usize) -> f64 {
    if q == 0 {
        return 0.0;
    }
    q as f64 * (-(delta as f64) / q as f64).exp()
}

/// Colours of `C_v` that appear in some list, ascending. Only these can
/// leave `L_v`.
fn relevant_colours(nb: &Neighborhood) -> Vec<Color> {
    nb.own_list
        .iter()
        .filter(|&c| nb.lists.iter().any(|l| l.binary_search(&c).is_ok()))
        .collect()
}

/// Runs over every outcome of the product space, passing the set of
/// relevant colours taken by some neighbour (bit `k` = `relevant[k]`) and
/// how many there are.
fn for_each_outcome(
    nb: &Neighborhood,
    relevant: &[Color],
    budget: u128,
    mut f: impl FnMut(u64, usize),
) -> Result<u128, AnalyticsError> {
    let size = nb.product_size().unwrap_or(u128::MAX);
    if size > budget {
        return Err(AnalyticsError::BudgetExceeded { size, budget });
    }
    // per neighbour, per choice: index into `relevant` (Blank last)
    let digits: Vec<Vec<Option<usize>>> = nb
        .lists
        .iter()
        .map(|l| {
            l.iter()
                .map(|c| relevant.binary_search(c).ok())
                .chain(std::iter::once(None))
                .collect()
        })
        .collect();
    let k = digits.len();
    let mut mult = vec![0u32; relevant.len()];
    let mut mask = 0u64;
    let mut distinct = 0usize;
    let add = |slot: Option<usize>, mult: &mut [u32], mask: &mut u64, distinct: &mut usize| {
        if let Some(s) = slot {
            if mult[s] == 0 {
                *distinct += 1;
                if s < 64 {
                    *mask |= 1 << s;
                }
            }
            mult[s] += 1;
        }
    };
    let sub = |slot: Option<usize>, mult: &mut [u32], mask: &mut u64, distinct: &mut usize| {
        if let Some(s) = slot {
            mult[s] -= 1;
            if mult[s] == 0 {
                *distinct -= 1;
                if s < 64 {
                    *mask &= !(1 << s);
                }
            }
        }
    };
    let mut pos = vec![0usize; k];
    for d in &digits {
        add(d[0], &mut mult, &mut mask, &mut distinct);
    }
    loop {
        f(mask, distinct);
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(size);
            }
            i -= 1;
            sub(digits[i][pos[i]], &mut mult, &mut mask, &mut distinct);
            pos[i] += 1;
            if pos[i] < digits[i].len() {
                add(digits[i][pos[i]], &mut mult, &mut mask, &mut distinct);
                break;
            }
            pos[i] = 0;
            add(digits[i][0], &mut mult, &mut mask, &mut distinct);
        }
    }
}

/// Exact law of `|L_v|` (Blank included) over the product space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LvDistribution {
    /// `counts[k]` outcomes have `|L_v| = k`.
    pub counts: Vec<u128>,
    pub total: u128,
}

impl LvDistribution {
    pub fn mean(&self) -> f64 {
        // exact integer numerator, one rounding at the end
        let num: u128 = self.counts.iter().enumerate().map(|(k, &c)| k as u128 * c).sum();
        ratio_to_f64(&Ratio::new(num, self.total))
    }

    /// `Pr(|L_v| < x)` as an exact fraction.
    pub fn prob_below(&self, x: f64) -> Ratio<u128> {
        let num = self
            .counts
            .iter()
            .enumerate()
            .filter(|&(k, _)| (k as f64) < x)
            .map(|(_, &c)| c)
            .sum();
        Ratio::new(num, self.total)
    }
}

pub fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    let (n, d) = (*r.numer(), *r.denom());
    (n / d) as f64 + (n % d) as f64 / d as f64
}

pub fn lv_distribution(nb: &Neighborhood, budget: u128) -> Result<LvDistribution, AnalyticsError> {
    let relevant = relevant_colours(nb);
    let base = nb.own_list.len() + 1;
    let mut counts = vec![0u128; base + 1];
    let total = for_each_outcome(nb, &relevant, budget, |_, distinct| counts[base - distinct] += 1)?;
    Ok(LvDistribution { counts, total })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegCorrReport {
    pub holds: bool,
    /// Colours of `C_v` that some neighbour can take.
    pub colours: usize,
    /// Subsets `I` with `|I| ≥ 2` compared.
    pub subsets_checked: usize,
    /// Largest `Pr(∧ Y_c) / ∏ Pr(Y_c)` seen (1 when nothing was compared).
    pub max_ratio: f64,
    /// Subsets on which the inequality failed, as colours.
    pub violations: Vec<Vec<Color>>,
}

/// Colours supported by [`negative_correlation_exact`].
pub const MAX_NEGCORR_COLOURS: usize = 16;

/// With `Y_c = [c ∉ L_v]`, checks `Pr(∧_{c∈I} Y_c) ≤ ∏_{c∈I} Pr(Y_c)` for
/// every `I ⊆ C_v` by enumerating all `∏|L_u|` outcomes. Colours no list
/// contains have `Pr(Y_c) = 0` and are skipped.
pub fn negative_correlation_exact(nb: &Neighborhood, budget: u128) -> Result<NegCorrReport, AnalyticsError> {
    let relevant = relevant_colours(nb);
    let m = relevant.len();
    if m > MAX_NEGCORR_COLOURS {
        return Err(AnalyticsError::BudgetExceeded {
            size: 1u128.checked_shl(m as u32).unwrap_or(u128::MAX),
            budget: 1 << MAX_NEGCORR_COLOURS,
        });
    }
    let mut hist = vec![0u128; 1 << m];
    let total = for_each_outcome(nb, &relevant, budget, |mask, _| hist[mask as usize] += 1)?;
    // superset sums: hist[I] becomes #outcomes with Y_c for all c ∈ I
    for bit in 0..m {
        for mask in 0..1usize << m {
            if mask >> bit & 1 == 0 {
                hist[mask] += hist[mask | 1 << bit];
            }
        }
    }
    let total_big = BigUint::from(total);
    let mut powers = vec![BigUint::one()];
    for _ in 0..m {
        let next = powers.last().unwrap() * &total_big;
        powers.push(next);
    }
    let mut products: Vec<BigUint> = vec![BigUint::one(); 1 << m];
    let mut report = NegCorrReport {
        holds: true,
        colours: m,
        subsets_checked: 0,
        max_ratio: 1.0,
        violations: Vec::new(),
    };
    for mask in 1..1usize << m {
        let low = mask.trailing_zeros() as usize;
        products[mask] = &products[mask & (mask - 1)] * BigUint::from(hist[1 << low]);
        let size = mask.count_ones() as usize;
        if size < 2 {
            continue;
        }
        report.subsets_checked += 1;
        let lhs = BigUint::from(hist[mask]) * &powers[size - 1];
        let rhs = &products[mask];
        if !rhs.is_zero() {
            let ratio = big_ratio(&lhs, rhs);
            report.max_ratio = report.max_ratio.max(ratio);
        }
        if &lhs > rhs {
            report.holds = false;
            report.violations.push((0..m).filter(|&k| mask >> k & 1 == 1).map(|k| relevant[k]).collect());
        }
    }
    Ok(report)
}

fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = b.bits().saturating_sub(60);
    let (a, b) = (a >> shift, b >> shift);
    let to = |x: &BigUint| x.to_u64_digits().iter().rev().fold(0.0, |acc, &d| acc * 2f64.powi(64) + d as f64);
    to(&a) / to(&b)
}

/// A finite distribution over bit strings with integer weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBits {
    pub len: usize,
    pub outcomes: Vec<(Vec<bool>, u64)>,
}

impl WeightedBits {
    /// Two copies of `000, 011, 101, 110` and one of every other string of
    /// length 3: the `X_i` (digit is 1) are negatively correlated but the
    /// `Y_i = 1 − X_i` are not.
    pub fn urn() -> Self {
        let outcomes = (0..8u32)
            .map(|s| {
                let bits: Vec<bool> = (0..3).map(|i| s >> (2 - i) & 1 == 1).collect();
                let even = bits.iter().filter(|&&b| b).count() % 2 == 0;
                (bits, if even { 2 } else { 1 })
            })
            .collect();
        Self { len: 3, outcomes }
    }

    fn total(&self) -> u64 {
        self.outcomes.iter().map(|(_, w)| w).sum()
    }

    /// `Pr(bit i = value for all i ∈ indices)`.
    pub fn prob_all(&self, indices: &[usize], value: bool) -> Ratio<u128> {
        let hit: u64 = self
            .outcomes
            .iter()
            .filter(|(bits, _)| indices.iter().all(|&i| bits[i] == value))
            .map(|(_, w)| w)
            .sum();
        Ratio::new(hit as u128, self.total() as u128)
    }

    /// Whether the indicators `[bit i = value]` are negatively correlated:
    /// every conjunction is at most the product of its marginals.
    pub fn negatively_correlated(&self, value: bool) -> bool {
        (1u32..1 << self.len).all(|mask| {
            let idx: Vec<usize> = (0..self.len).filter(|&i| mask >> i & 1 == 1).collect();
            let product = idx
                .iter()
                .fold(Ratio::<u128>::one(), |acc, &i| acc * self.prob_all(&[i], value));
            self.prob_all(&idx, value) <= product
        })
    }
}

/// A random list model: `C_v` is all of `0..palette`, and each of `degree`
/// neighbours has a uniform `k`-subset of the palette with `k` uniform in
/// `sizes`.
pub fn random_model<R: Rng + ?Sized>(
    rng: &mut R,
    degree: usize,
    palette: usize,
    sizes: std::ops::RangeInclusive<usize>,
) -> Neighborhood {
    let lists = (0..degree)
        .map(|_| {
            let k = rng.gen_range(sizes.clone()).min(palette);
            sample(rng, palette, k).into_iter().map(|c| c as Color).collect()
        })
        .collect();
    Neighborhood::from_parts(ColorSet::full(palette), lists, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model(own: &[Color], lists: Vec<Vec<Color>>) -> Neighborhood {
        Neighborhood::from_parts(own.iter().copied().collect(), lists, &[])
    }

    /// Brute-force oracle: list every outcome and average `|L_v|`.
    fn brute_mean(nb: &Neighborhood) -> f64 {
        let (mut sum, mut n) = (0usize, 0usize);
        nb.for_each_product(|a| {
            sum += nb.available_len(a);
            n += 1;
            true
        });
        sum as f64 / n as f64
    }

    #[test]
    fn rho_examples() {
        let nb = model(&[0, 1], vec![vec![0, 5], vec![0, 6]]);
        assert_eq!(rho(&nb, 3), 0.0);
        assert!((rho(&nb, 0) - 1.0).abs() < 1e-15);
        assert!((sum_rho(&nb) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_examples() {
        let empty = model(&[0, 1, 2, 3], vec![]);
        assert_eq!(expected_lv(&empty), 5.0);
        let one = model(&[7], vec![vec![7]]);
        assert!((expected_lv(&one) - 1.5).abs() < 1e-15);
        let nb = model(&[0, 1, 2], vec![vec![0, 1], vec![1, 2], vec![0]]);
        assert!((expected_lv(&nb) - brute_mean(&nb)).abs() < 1e-12);
        let d = lv_distribution(&nb, 1000).unwrap();
        assert_eq!(d.total, 18);
        assert!((d.mean() - brute_mean(&nb)).abs() < 1e-12);
        assert!(exp_rho_lower_bound(&nb) < expected_lv(&nb));
    }

    #[test]
    fn distribution_agrees_with_available_len() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let nb = random_model(&mut rng, 5, 6, 1..=3);
            let d = lv_distribution(&nb, 1 << 20).unwrap();
            let mut counts = vec![0u128; d.counts.len()];
            nb.for_each_product(|a| {
                counts[nb.available_len(a)] += 1;
                true
            });
            assert_eq!(counts, d.counts);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let nb = model(&[0], vec![vec![0, 1, 2]; 10]);
        assert!(matches!(lv_distribution(&nb, 1000), Err(AnalyticsError::BudgetExceeded { .. })));
    }

    #[test]
    fn negative_correlation_examples() {
        let single = model(&[0], vec![vec![0], vec![0, 1]]);
        let r = negative_correlation_exact(&single, 1000).unwrap();
        assert!(r.holds);
        assert_eq!(r.subsets_checked, 0);
        let nb = model(&[0, 1], vec![vec![0, 1], vec![0, 1], vec![0, 1]]);
        let r = negative_correlation_exact(&nb, 1000).unwrap();
        assert!(r.holds && r.subsets_checked == 1 && r.max_ratio <= 1.0);
    }

    #[test]
    fn urn_probabilities() {
        let urn = WeightedBits::urn();
        assert_eq!(urn.total(), 12);
        assert_eq!(urn.prob_all(&[0, 1, 2], false), Ratio::new(1, 6));
        let product: Ratio<u128> = (0..3).map(|i| urn.prob_all(&[i], false)).product();
        assert_eq!(product, Ratio::new(1, 8));
        assert!(urn.negatively_correlated(true));
        assert!(!urn.negatively_correlated(false));
    }

    #[test]
    fn lower_bounds_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let nb = random_model(&mut rng, 20, 15, 1..=15);
            let e = expected_lv(&nb);
            assert!(exp_rho_lower_bound(&nb) < e);
            assert!(sum_rho(&nb) <= nb.len() as f64 + 1e-9);
        }
        assert_eq!(uniform_lower_bound(0, 5), 0.0);
    }
}
