use listcolor::coloring::init_blank;
use listcolor::config::uniform_lists;
use listcolor::fix::{run_pipeline, FixParams, PipelineOutput};
use listcolor::generators::{generate, GeneratorSpec};
use listcolor::transcript::{read_transcripts, reconstruct, reconstruct_run, write_transcripts, Colours, Record, TranscriptMode};
use listcolor::{FlawParams, Graph, ListAssignment};

fn run(spec: &str, q: usize, threshold: f64, seed: u64, mode: TranscriptMode) -> (Graph, ListAssignment, FixParams, PipelineOutput) {
    let g = generate(&spec.parse::<GeneratorSpec>().unwrap(), seed).unwrap();
    let lists = uniform_lists(g.vertex_count(), q, q + 3, seed).unwrap();
    let mut params = FixParams::new(q, FlawParams::triangle_free(threshold), g.vertex_count());
    params.seed = seed;
    params.transcript_mode = mode;
    params.record_trace = true;
    let out = run_pipeline(&g, &lists, &params).unwrap();
    (g, lists, params, out)
}

#[test]
fn raw_transcripts_recover_every_colouring() {
    for seed in 0..10 {
        let (g, lists, params, out) = run("regular-bipartite:25,6", 10, 3.0, seed, TranscriptMode::Raw);
        assert!(out.stats.executions > 0);
        let blank = init_blank(&g, &lists).unwrap();
        let recs = reconstruct_run(&g, &lists, &params.flaw_params, &blank, &out.calls, &out.flaw_free, 1 << 20).unwrap();
        assert_eq!(recs.len(), out.traces.len());
        for (rec, trace) in recs.iter().zip(&out.traces) {
            let forward = trace.colorings();
            assert_eq!(rec.colorings.len() + 1, forward.len());
            assert_eq!(rec.colorings[..], forward[..forward.len() - 1]);
            let flaws: Vec<_> = trace.steps.iter().map(|s| s.flaw).collect();
            assert_eq!(rec.flaws, flaws);
        }
    }
}

#[test]
fn compressed_transcripts_recover_every_colouring() {
    for seed in 0..5 {
        let (g, lists, params, out) = run("regular-bipartite:12,3", 4, 2.0, seed, TranscriptMode::Compressed);
        let blank = init_blank(&g, &lists).unwrap();
        let recs = reconstruct_run(&g, &lists, &params.flaw_params, &blank, &out.calls, &out.flaw_free, 1 << 20).unwrap();
        for (rec, trace) in recs.iter().zip(&out.traces) {
            let forward = trace.colorings();
            assert_eq!(rec.colorings[..], forward[..forward.len() - 1]);
        }
        let indexed = out
            .calls
            .iter()
            .flat_map(|c| &c.records)
            .filter(|r| matches!(r, Record::Colours(Colours::Index(_))))
            .count();
        assert!(indexed + out.stats.compressed_fallbacks > 0 || out.stats.executions == 0);
    }
}

#[test]
fn transcripts_survive_serialisation() {
    let (g, lists, params, out) = run("regular-bipartite:20,5", 8, 3.0, 7, TranscriptMode::Compressed);
    let mut buf = Vec::new();
    write_transcripts(&out.calls, &mut buf).unwrap();
    let back = read_transcripts(&buf[..]).unwrap();
    assert_eq!(back, out.calls);
    let blank = init_blank(&g, &lists).unwrap();
    reconstruct_run(&g, &lists, &params.flaw_params, &blank, &back, &out.flaw_free, 1 << 20).unwrap();
}

#[test]
fn tampered_transcript_is_rejected() {
    let (g, lists, params, out) = run("regular-bipartite:25,6", 10, 3.0, 2, TranscriptMode::Raw);
    let blank = init_blank(&g, &lists).unwrap();
    let mut calls = out.calls.clone();
    // Colour a vertex that the run left Blank at its first recolouring.
    let rec = calls[0]
        .records
        .iter_mut()
        .find_map(|r| match r {
            Record::Colours(Colours::Raw(c)) => Some(c),
            _ => None,
        })
        .unwrap();
    let slot = rec.iter_mut().find(|c| c.is_none()).unwrap();
    *slot = Some(0);
    assert!(reconstruct_run(&g, &lists, &params.flaw_params, &blank, &calls, &out.flaw_free, 1 << 20).is_err());

    // Raw records overwrite whole neighbourhoods, so only a change at a
    // vertex no step touched survives back to the start, where it must be caught.
    let touched: std::collections::HashSet<_> =
        out.traces.iter().flat_map(|t| &t.steps).flat_map(|s| s.neighborhood.iter().copied()).collect();
    let untouched = (0..g.vertex_count()).find(|v| !touched.contains(v));
    let v = untouched.unwrap_or(0);
    let mut wrong = out.flaw_free.clone();
    wrong.set(v, if wrong.get(v).is_some() { None } else { lists.list(v).nth(0) });
    let res = reconstruct_run(&g, &lists, &params.flaw_params, &blank, &out.calls, &wrong, 1 << 20);
    if untouched.is_some() {
        assert!(res.is_err());
    }
    let single = reconstruct(&g, &lists, &params.flaw_params, None, &out.calls[0], &out.flaw_free, 1 << 20);
    assert!(single.is_ok());
}

#[test]
fn untouched_vertex_change_is_caught() {
    // Isolated vertices are never recoloured.
    let g = Graph::new(8, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    let lists = uniform_lists(8, 3, 3, 0).unwrap();
    let mut params = FixParams::new(3, FlawParams::triangle_free(1.5), 8);
    params.record_trace = true;
    let out = run_pipeline(&g, &lists, &params).unwrap();
    let blank = init_blank(&g, &lists).unwrap();
    reconstruct_run(&g, &lists, &params.flaw_params, &blank, &out.calls, &out.flaw_free, 1 << 20).unwrap();
    let mut wrong = out.flaw_free.clone();
    wrong.set(6, Some(1));
    assert!(reconstruct_run(&g, &lists, &params.flaw_params, &blank, &out.calls, &wrong, 1 << 20).is_err());
}
