use anyhow::anyhow;
use num_rational::Ratio;
use serde_json::{json, Value};

use listcolor::analytics::lists::random_model;
use listcolor::analytics::{
    check_lmu, check_shearer_count, chernoff_grid, exp_rho_lower_bound, expected_lv, lv_lower_tail,
    mc_flaw_probability, mc_mean_lv, negative_correlation_exact, uniform_lower_bound, ChernoffFamily, ListModel,
    LmuVerdict, SmallGraph, Verdict, WeightedBits,
};
use listcolor::flaw::FlawParams;
use listcolor::rng;

use crate::args::{LabArgs, LabVerb};
use crate::commands::emit;
use crate::Failure;

/// CSV rows plus a JSON summary; `failures` counts checks that came out false.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    summary: Value,
    failures: usize,
}

pub fn run(a: LabArgs) -> Result<(), Failure> {
    let table = match a.verb {
        LabVerb::Shearer { max_n } => shearer(max_n)?,
        LabVerb::Lncv {
            fixtures,
            degree,
            q,
            trials,
        } => lncv(fixtures, degree, q, trials, a.seed)?,
        LabVerb::Flawprob {
            fixtures,
            degree,
            q,
            threshold,
            trials,
        } => flawprob(fixtures, degree, q, threshold, trials, a.seed)?,
        LabVerb::Negcorr {
            fixtures,
            degree,
            palette,
        } => negcorr(fixtures, degree, palette, a.seed)?,
    };

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(&table.header).map_err(|e| Failure::usage(anyhow!(e)))?;
    for row in &table.rows {
        wtr.write_record(row).map_err(|e| Failure::usage(anyhow!(e)))?;
    }
    let bytes = wtr.into_inner().map_err(|e| Failure::usage(anyhow!(e.to_string())))?;
    emit(a.csv.as_deref(), std::str::from_utf8(&bytes).expect("CSV is UTF-8"))?;

    let mut summary = table.summary;
    summary["seed"] = a.seed.into();
    summary["failures"] = table.failures.into();
    summary["pass"] = (table.failures == 0).into();
    let text = format!("{}\n", serde_json::to_string_pretty(&summary).expect("summary serialises"));
    match &a.summary {
        Some(p) => emit(Some(p), &text)?,
        None => eprint!("{text}"),
    }
    if table.failures > 0 {
        return Err(Failure::verify(anyhow!("{} checks failed", table.failures)));
    }
    Ok(())
}

fn shearer(max_n: usize) -> Result<Table, Failure> {
    if max_n > 8 {
        return Err(Failure::usage(anyhow!("--max-n above 8 means more than 2^36 graphs")));
    }
    let mut rows = Vec::new();
    let mut failures = 0;
    let (mut graphs_checked, mut lmu_checked) = (0u64, 0u64);
    for n in 1..=max_n {
        for r in 3..=5 {
            let (mut kr_free, mut count_fail, mut lmu_pass, mut lmu_fail, mut lmu_vacuous) = (0u64, 0u64, 0, 0, 0);
            for h in SmallGraph::all(n) {
                if !h.is_kr_free(r) {
                    continue;
                }
                kr_free += 1;
                if !check_shearer_count(&h, r).map_err(Failure::verify)?.holds() {
                    count_fail += 1;
                }
                if r == 4 {
                    match check_lmu(&h, r).map_err(Failure::verify)? {
                        LmuVerdict::Pass { .. } => lmu_pass += 1,
                        LmuVerdict::Fail { .. } => lmu_fail += 1,
                        LmuVerdict::Vacuous => lmu_vacuous += 1,
                    }
                }
            }
            graphs_checked += kr_free;
            lmu_checked += lmu_pass + lmu_fail;
            failures += (count_fail + lmu_fail) as usize;
            let lmu = |x: u64| if r == 4 { x.to_string() } else { String::new() };
            rows.push(vec![
                n.to_string(),
                r.to_string(),
                kr_free.to_string(),
                count_fail.to_string(),
                lmu(lmu_pass),
                lmu(lmu_fail),
                lmu(lmu_vacuous),
            ]);
        }
    }
    Ok(Table {
        header: vec!["n", "r", "kr_free_graphs", "count_bound_failures", "median_pass", "median_fail", "median_vacuous"],
        rows,
        summary: json!({
            "experiment": "shearer",
            "max_n": max_n,
            "graphs_checked": graphs_checked,
            "median_checks": lmu_checked,
        }),
        failures,
    })
}

fn lncv(fixtures: usize, degree: usize, q: usize, trials: usize, seed: u64) -> Result<Table, Failure> {
    if q == 0 || trials < 2 {
        return Err(Failure::usage(anyhow!("need q >= 1 and at least 2 trials")));
    }
    let mut gen = rng::stream(seed, rng::LAB, 100);
    let mut rows = Vec::new();
    let mut failures = 0;
    for i in 0..fixtures {
        let nb = random_model(&mut gen, degree, q, q.div_ceil(2)..=q);
        let exact = expected_lv(&nb);
        let lower = exp_rho_lower_bound(&nb);
        let uniform = uniform_lower_bound(q, degree);
        let fixture_seed = rng::derive_seed(seed, rng::LAB, i as u64);
        let mean = mc_mean_lv(&nb, trials, fixture_seed);
        let tail = lv_lower_tail(&nb, trials, fixture_seed);
        let bounds_ok = exact + 1e-9 >= lower && exact + 1e-9 >= uniform;
        failures += usize::from(!bounds_ok) + usize::from(!mean.passed()) + usize::from(!tail.passed());
        rows.push(vec![
            i.to_string(),
            format!("{exact:.6}"),
            format!("{:.6}", mean.estimate),
            format!("{:.6}", mean.std_error),
            format!("{lower:.6}"),
            format!("{uniform:.6}"),
            format!("{:.6}", tail.estimate),
            format!("{:.6e}", tail.bound),
            verdict(mean.verdict).into(),
            verdict(tail.verdict).into(),
            bounds_ok.to_string(),
        ]);
    }

    // Chernoff sanity on the first fixture's indicators and two classic families.
    let mut chernoff = Vec::new();
    let first = random_model(&mut gen, degree, q, q.div_ceil(2)..=q);
    let families = [
        ("list-indicators", ChernoffFamily::ListIndicators(first)),
        ("independent", ChernoffFamily::Independent(vec![0.3; degree.max(1)])),
        (
            "without-replacement",
            ChernoffFamily::WithoutReplacement {
                total: 2 * q,
                marked: q,
                draws: q,
            },
        ),
    ];
    for (name, fam) in &families {
        for (tail, t, rep) in chernoff_grid(fam, trials, seed) {
            if rep.verdict == Verdict::Fail {
                failures += 1;
            }
            chernoff.push(json!({ "family": name, "tail": tail, "t": t, "report": rep }));
        }
    }
    Ok(Table {
        header: vec![
            "fixture",
            "exact_mean",
            "mc_mean",
            "mc_se",
            "exp_rho_bound",
            "uniform_bound",
            "tail_freq",
            "tail_bound",
            "mean_verdict",
            "tail_verdict",
            "bounds_hold",
        ],
        rows,
        summary: json!({
            "experiment": "lncv",
            "fixtures": fixtures,
            "degree": degree,
            "q": q,
            "trials": trials,
            "chernoff": chernoff,
        }),
        failures,
    })
}

fn flawprob(fixtures: usize, degree: usize, q: usize, threshold: f64, trials: usize, seed: u64) -> Result<Table, Failure> {
    if q == 0 {
        return Err(Failure::usage(anyhow!("need q >= 1")));
    }
    let params = FlawParams::triangle_free(threshold);
    params.validate().map_err(Failure::usage)?;
    let mut gen = rng::stream(seed, rng::LAB, 200);
    let mut rows = Vec::new();
    let mut failures = 0;
    let mut inconclusive = 0;
    for i in 0..fixtures {
        let nb = random_model(&mut gen, degree, q, 1..=q);
        let fixture_seed = rng::derive_seed(seed, rng::LAB, i as u64);
        for model in [
            ListModel::Independent,
            ListModel::Omega {
                palette_size: q,
                budget: 1 << 24,
            },
        ] {
            let rep = mc_flaw_probability(&nb, &params, model, trials, fixture_seed, Some(1 << 24))
                .map_err(Failure::verify)?;
            for (kind, est, exact) in [("B", &rep.b, rep.exact_b), ("Z", &rep.z, rep.exact_z)] {
                match est.verdict {
                    Verdict::Fail => failures += 1,
                    Verdict::Inconclusive => inconclusive += 1,
                    Verdict::Pass => {}
                }
                rows.push(vec![
                    i.to_string(),
                    match model {
                        ListModel::Independent => "independent".into(),
                        ListModel::Omega { .. } => "omega".into(),
                    },
                    kind.into(),
                    format!("{:.6}", est.estimate),
                    format!("{:.6}", est.std_error),
                    exact.map(|x| format!("{x:.6}")).unwrap_or_default(),
                    format!("{:.6e}", rep.delta_pow_minus4),
                    verdict(est.verdict).into(),
                ]);
            }
        }
    }
    Ok(Table {
        header: vec!["fixture", "model", "flaw", "frequency", "se", "exact", "delta_pow_minus4", "verdict"],
        rows,
        summary: json!({
            "experiment": "flawprob",
            "fixtures": fixtures,
            "degree": degree,
            "q": q,
            "L": threshold,
            "trials": trials,
            "inconclusive": inconclusive,
        }),
        failures,
    })
}

fn negcorr(fixtures: usize, degree: usize, palette: usize, seed: u64) -> Result<Table, Failure> {
    if palette == 0 {
        return Err(Failure::usage(anyhow!("need a palette of at least 1")));
    }
    let mut gen = rng::stream(seed, rng::LAB, 300);
    let mut rows = Vec::new();
    let mut failures = 0;
    for i in 0..fixtures {
        let nb = random_model(&mut gen, degree, palette, 1..=palette);
        let rep = negative_correlation_exact(&nb, 1 << 26).map_err(Failure::verify)?;
        failures += usize::from(!rep.holds);
        rows.push(vec![
            i.to_string(),
            rep.colours.to_string(),
            rep.subsets_checked.to_string(),
            format!("{:.6}", rep.max_ratio),
            rep.holds.to_string(),
        ]);
    }
    // The urn: the digits are negatively correlated, their complements not.
    let urn = WeightedBits::urn();
    let ones = urn.negatively_correlated(true);
    let zeros = urn.negatively_correlated(false);
    failures += usize::from(!ones || zeros);
    let all_zero = urn.prob_all(&[0, 1, 2], false);
    let all_one = urn.prob_all(&[0, 1, 2], true);
    let zero_product: Ratio<u128> = (0..3).map(|i| urn.prob_all(&[i], false)).product();
    Ok(Table {
        header: vec!["fixture", "colours", "subsets_checked", "max_ratio", "holds"],
        rows,
        summary: json!({
            "experiment": "negcorr",
            "fixtures": fixtures,
            "degree": degree,
            "palette": palette,
            "urn": {
                "ones_negatively_correlated": ones,
                "zeros_negatively_correlated": zeros,
                "pr_all_zero": all_zero.to_string(),
                "pr_zero_product": zero_product.to_string(),
                "pr_all_one": all_one.to_string(),
            },
        }),
        failures,
    })
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shearer_small_sweep_passes() {
        let t = shearer(4).unwrap();
        assert_eq!(t.failures, 0);
        assert_eq!(t.rows.len(), 12);
        // All 64 graphs on 4 vertices are K_5-free.
        assert_eq!(t.rows[11][2], "64");
    }

    #[test]
    fn negcorr_reports_urn() {
        let t = negcorr(3, 3, 4, 1).unwrap();
        assert_eq!(t.failures, 0);
        assert_eq!(t.summary["urn"]["pr_all_zero"], "1/6");
        assert_eq!(t.summary["urn"]["zeros_negatively_correlated"], false);
    }

    #[test]
    fn oversized_sweep_rejected() {
        assert!(shearer(9).is_err());
    }
}
