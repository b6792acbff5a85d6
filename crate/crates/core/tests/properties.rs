use proptest::prelude::*;

use listcolor::analytics::lists::random_model;
use listcolor::analytics::{
    check_shearer_count, count_independent_sets, expected_lv, exp_rho_lower_bound, lv_distribution,
    negative_correlation_exact, SmallGraph,
};
use listcolor::coloring::{find_violation, is_proper_full};
use listcolor::config::uniform_lists;
use listcolor::fix::{run_pipeline, FixError, FixParams};
use listcolor::generators::{generate, GeneratorSpec};
use listcolor::io::{self, GraphFormat};
use listcolor::rng;
use listcolor::{FlawParams, Graph, PartialColoring};

fn arb_small_graph(max_n: usize) -> impl Strategy<Value = SmallGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        let mask = if pairs == 0 { Just(0u64).boxed() } else { (0..1u64 << pairs.min(63)).boxed() };
        mask.prop_map(move |m| SmallGraph::from_edge_mask(n, m))
    })
}

/// Graph on `n ≤ 20` vertices with each pair present with probability ~p.
fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, 0.0..0.6f64, any::<u64>()).prop_map(|(n, p, seed)| {
        generate(&GeneratorSpec::RandomBipartite { left: n / 2, right: n - n / 2, p }, seed).unwrap()
    })
}

fn naive_independent_sets(g: &Graph) -> u64 {
    let n = g.vertex_count();
    (0u64..1 << n)
        .filter(|&s| g.edges().all(|(u, v)| s >> u & 1 == 0 || s >> v & 1 == 0))
        .count() as u64
}

fn sg(g: &Graph) -> SmallGraph {
    SmallGraph::from_graph(g).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn independent_set_count_matches_brute_force(
        n in 1usize..=16, p in 0.0..0.9f64, seed in any::<u64>()
    ) {
        let g = generate(&GeneratorSpec::EraseTriangles { n, p }, seed).unwrap();
        prop_assert_eq!(count_independent_sets(&sg(&g)).unwrap(), naive_independent_sets(&g));
    }

    #[test]
    fn bipartite_graphs_meet_count_bounds(g in arb_graph(20)) {
        let check = check_shearer_count(&sg(&g), 3).unwrap();
        prop_assert!(check.holds(), "{:?}", check);
    }

    #[test]
    fn small_graphs_meet_count_bounds(h in arb_small_graph(9), r in 3usize..=5) {
        if h.is_kr_free(r) {
            prop_assert!(check_shearer_count(&h, r).unwrap().holds());
        } else {
            prop_assert!(check_shearer_count(&h, r).is_err());
        }
    }

    #[test]
    fn expected_list_size_matches_enumeration(
        seed in any::<u64>(), degree in 1usize..=5, palette in 1usize..=6
    ) {
        let mut r = rng::stream(seed, rng::LAB, 0);
        let nb = random_model(&mut r, degree, palette, 1..=palette);
        let dist = lv_distribution(&nb, 1 << 22).unwrap();
        prop_assert!((dist.mean() - expected_lv(&nb)).abs() < 1e-9);
        prop_assert!(expected_lv(&nb) + 1e-12 >= exp_rho_lower_bound(&nb));
    }

    #[test]
    fn list_events_are_negatively_correlated(
        seed in any::<u64>(), degree in 1usize..=4, palette in 1usize..=6
    ) {
        let mut r = rng::stream(seed, rng::LAB, 0);
        let nb = random_model(&mut r, degree, palette, 1..=palette);
        let rep = negative_correlation_exact(&nb, 1 << 22).unwrap();
        prop_assert!(rep.holds, "{:?}", rep.violations);
    }

    #[test]
    fn edge_list_round_trip(g in arb_graph(20)) {
        for fmt in [GraphFormat::EdgeList, GraphFormat::Dimacs] {
            let text = io::emit_graph(&g, fmt);
            let back = io::parse_graph(&text, fmt).unwrap();
            prop_assert_eq!(back.vertex_count(), g.vertex_count());
            prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        }
    }

    #[test]
    fn lists_and_coloring_round_trip(n in 1usize..30, q in 1usize..6, extra in 0usize..4, seed in any::<u64>()) {
        let lists = uniform_lists(n, q, q + extra, seed).unwrap();
        let back = io::parse_lists(&lists_text(&lists), n).unwrap();
        for v in 0..n {
            let a: Vec<_> = lists.list(v).iter().map(|c| lists.label(c).clone()).collect();
            let b: Vec<_> = back.list(v).iter().map(|c| back.label(c).clone()).collect();
            prop_assert_eq!(a, b);
        }
        let sigma = PartialColoring::from_vec((0..n).map(|v| if v % 3 == 0 { None } else { lists.list(v).nth(0) }).collect());
        let json = io::coloring_to_json(&lists, &sigma, None);
        let parsed = io::parse_coloring(&json.to_string(), &lists).unwrap();
        prop_assert_eq!(parsed, sigma);
    }

    #[test]
    fn pipeline_output_is_always_proper(
        n in 2usize..40, d in 1usize..6, extra in 0usize..6, seed in any::<u64>()
    ) {
        let d = d.min(n);
        let g = generate(&GeneratorSpec::RandomRegularBipartite { n, d }, seed).unwrap();
        let q = 2 * d + extra;
        let lists = uniform_lists(g.vertex_count(), q, q + 2, seed).unwrap();
        let mut params = FixParams::new(q, FlawParams::triangle_free(d.max(2) as f64 / 2.0), g.vertex_count());
        params.seed = seed;
        match run_pipeline(&g, &lists, &params) {
            Ok(out) => {
                prop_assert!(is_proper_full(&g, &lists, &out.coloring), "{:?}", find_violation(&g, &lists, &out.coloring, false));
                prop_assert!(listcolor::flaw::all_flaws(&g, &lists, &out.flaw_free, &params.flaw_params).is_empty());
            }
            Err(FixError::ExecutionCapExceeded { .. }) | Err(FixError::Completion(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

fn lists_text(lists: &listcolor::ListAssignment) -> String {
    io::lists_to_json(lists).to_string()
}
