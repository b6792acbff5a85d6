//! Checks of the Ω machinery on small neighbourhoods: uniformity of the
//! sampler, stationarity of the colour-class resampling kernel, and the
//! extension injection behind `|Ω_B| · k! ≤ |Ω|`.

use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use super::montecarlo::chi_square_uniform;
use super::AnalyticsError;
use crate::color_set::Color;
use crate::pca::PcaSpace;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityReport {
    pub cells: usize,
    pub draws: usize,
    pub statistic: f64,
    pub p_value: f64,
}

/// `draws` samples from Ω tallied by rank, then Pearson's χ² against the
/// uniform law. Ω must have at most `max_cells` members.
pub fn sampler_uniformity(
    space: &mut PcaSpace,
    draws: usize,
    seed: u64,
    max_cells: u128,
) -> Result<UniformityReport, AnalyticsError> {
    let size = space.count();
    if size > max_cells {
        return Err(AnalyticsError::BudgetExceeded {
            size,
            budget: max_cells,
        });
    }
    let mut counts = vec![0u64; size as usize];
    let mut rng = rng::stream(seed, rng::LAB, 3);
    for _ in 0..draws {
        let w = space.sample(&mut rng);
        counts[space.rank(&w)? as usize] += 1;
    }
    let (statistic, p_value) = chi_square_uniform(&counts);
    Ok(UniformityReport {
        cells: size as usize,
        draws,
        statistic,
        p_value,
    })
}

/// Largest `|(πK_c)(W') − π(W')|` over members `W'` and colours `c`, with `π`
/// uniform on Ω and `K_c` the exact kernel of resampling class `c`.
pub fn kernel_stationarity(space: &mut PcaSpace, colors: &[Color], budget: u128) -> Result<f64, AnalyticsError> {
    let members = space.enumerate(budget)?;
    let size = members.len();
    let pi = 1.0 / size as f64;
    let mut worst: f64 = 0.0;
    for &c in colors {
        let mut mass = vec![0.0f64; size];
        for w in &members {
            let outcomes = space.resample_outcomes(w, c)?;
            let p = pi / outcomes.len() as f64;
            for next in &outcomes {
                mass[space.rank(next)? as usize] += p;
            }
        }
        worst = mass.iter().fold(worst, |acc, &m| acc.max((m - pi).abs()));
    }
    Ok(worst)
}

/// Uniform class resampling applied `steps` times from a fixed start,
/// colours chosen uniformly from `colors`; returns the visit counts by rank.
pub fn resampling_walk<R: Rng + ?Sized>(
    space: &mut PcaSpace,
    colors: &[Color],
    steps: usize,
    rng: &mut R,
) -> Result<Vec<u64>, AnalyticsError> {
    let mut counts = vec![0u64; space.count() as usize];
    let mut w = space.unrank(0).expect("Ω is never empty");
    for _ in 0..steps {
        let c = colors[rng.gen_range(0..colors.len())];
        w = space.resample_color_class(&w, c, rng)?;
        counts[space.rank(&w)? as usize] += 1;
    }
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectionReport {
    pub blanks: Vec<usize>,
    pub omega: u128,
    pub omega_b: usize,
    pub factorial: u128,
    /// Fewest extensions found for any member of `Ω_B`.
    pub min_extensions: Option<usize>,
    pub distinct_extensions: usize,
    pub extensions: usize,
    /// Every extension is itself a member of Ω.
    pub all_members: bool,
    pub holds: bool,
}

/// For the local vertices `blanks` (`k` of them): every member of `Ω_B`
/// extends in at least `k!` ways, no extension is reached twice, all of them
/// lie in Ω, and so `|Ω_B| · k! ≤ |Ω|`.
pub fn injection_check(space: &mut PcaSpace, blanks: &[usize], budget: u128) -> Result<InjectionReport, AnalyticsError> {
    let omega = space.count();
    let omega_b = space.omega_b(blanks, budget)?;
    let factorial: u128 = (1..=blanks.len() as u128).product();
    let mut seen = HashSet::new();
    let mut extensions = 0;
    let mut min_extensions: Option<usize> = None;
    let mut all_members = true;
    for w in &omega_b {
        let ext = space.all_extensions(w, blanks)?;
        min_extensions = Some(min_extensions.map_or(ext.len(), |m| m.min(ext.len())));
        extensions += ext.len();
        for e in ext {
            all_members &= space.is_member(&e);
            seen.insert(e);
        }
    }
    let distinct_extensions = seen.len();
    let holds = all_members
        && distinct_extensions == extensions
        && min_extensions.map_or(true, |m| m as u128 >= factorial)
        && omega_b.len() as u128 * factorial <= omega;
    Ok(InjectionReport {
        blanks: blanks.to_vec(),
        omega,
        omega_b: omega_b.len(),
        factorial,
        min_extensions,
        distinct_extensions,
        extensions,
        all_members,
        holds,
    })
}
