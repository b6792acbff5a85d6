use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use listcolor::coloring::{find_violation, init_blank, is_proper_full, Violation};
use listcolor::completion::{greedy_complete, moser_tardos_complete, CompletionError};
use listcolor::config::{resolve_params, GraphSource, ListsSource, Resolved, RunConfig};
use listcolor::fix::{run_pipeline, FixError};
use listcolor::flaw::all_flaws;
use listcolor::generators::{generate, GeneratorSpec};
use listcolor::io::{self, GraphFormat};
use listcolor::transcript::{entropy_report, read_transcripts, reconstruct_run, write_transcripts};
use listcolor::{rng, Graph, ListAssignment, PartialColoring};

use crate::args::{
    BenchArgs, ColorArgs, CompleteArgs, FlawsArgs, GenArgs, InputArgs, MethodArg, ParamArgs, ReconstructArgs,
    VerifyArgs,
};
use crate::Failure;

pub const OUT_DIR_ENV: &str = "LISTCOLOR_OUT_DIR";

pub fn version_string() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

/// Relative output paths land in `$LISTCOLOR_OUT_DIR` when it is set.
pub fn out_path(p: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let p = out_path(p);
            io::write_string(&p, text).map_err(Failure::usage)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn config_hash(config: &RunConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serialises");
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = io::read_to_string(path).map_err(Failure::usage)?;
    serde_json::from_str(&text)
        .with_context(|| format!("{} is not JSON", path.display()))
        .map_err(Failure::usage)
}

/// A bare RunConfig, or the one embedded in an output's `meta`.
fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let value = read_json(path)?;
    let inner = value.pointer("/meta/config").cloned().unwrap_or(value);
    serde_json::from_value(inner)
        .with_context(|| format!("{} holds no run configuration", path.display()))
        .map_err(Failure::usage)
}

pub fn build_config(input: &InputArgs, params: &ParamArgs) -> Result<RunConfig, Failure> {
    let graph = match (&input.graph, &input.gen) {
        (Some(path), _) => Some(GraphSource::File {
            path: path.clone(),
            format: input.format.map(GraphFormat::from),
        }),
        (None, Some(spec)) => Some(GraphSource::Generator { spec: spec.clone() }),
        (None, None) => None,
    };
    let lists = match (&input.lists, input.uniform_q) {
        (Some(path), _) => Some(ListsSource::File { path: path.clone() }),
        (None, Some(_)) => Some(ListsSource::Uniform { palette: input.palette }),
        (None, None) => input.palette.map(|p| ListsSource::Uniform { palette: Some(p) }),
    };
    let mut cfg = match &input.config {
        Some(path) => load_config(path)?,
        None => {
            let graph = graph
                .clone()
                .ok_or_else(|| Failure::usage(anyhow!("give a graph with --graph or --gen (or --config)")))?;
            RunConfig::new(graph, ListsSource::Uniform { palette: None })
        }
    };
    if let Some(g) = graph {
        cfg.graph = g;
    }
    if let Some(l) = lists {
        cfg.lists = l;
    }
    if let Some(q) = input.uniform_q {
        cfg.q = Some(q);
    }
    if let Some(v) = params.variant {
        cfg.variant = v.into();
    }
    if let Some(e) = params.epsilon {
        cfg.epsilon = e;
    }
    if let Some(r) = params.r {
        cfg.r = r;
    }
    if let Some(q) = params.q {
        cfg.q = Some(q);
    }
    if let Some(l) = params.threshold {
        cfg.threshold = Some(l);
    }
    if let Some(s) = params.seed {
        cfg.seed = s;
    }
    if let Some(c) = params.cap {
        cfg.max_executions = Some(c);
    }
    if let Some(r) = params.retries {
        cfg.retry_budget = r;
    }
    if let Some(c) = params.check {
        cfg.check_level = c.into();
    }
    if let Some(m) = params.transcript_mode {
        cfg.transcript_mode = m.into();
    }
    if let Some(c) = params.completion_cap {
        cfg.completion_cap = Some(c);
    }
    Ok(cfg)
}

pub struct Prepared {
    pub config: RunConfig,
    pub graph: Graph,
    pub lists: ListAssignment,
    pub resolved: Resolved,
}

pub fn prepare(config: RunConfig) -> Result<Prepared, Failure> {
    let graph = config.load_graph().map_err(Failure::usage)?;
    let (lists, resolved) = match &config.lists {
        ListsSource::File { .. } => {
            let lists = config.load_lists(&graph, 0).map_err(Failure::usage)?;
            let resolved = resolve_params(&config, &graph, Some(lists.q)).map_err(Failure::usage)?;
            (lists, resolved)
        }
        ListsSource::Uniform { .. } => {
            let resolved = resolve_params(&config, &graph, None).map_err(Failure::usage)?;
            let lists = config.load_lists(&graph, resolved.q).map_err(Failure::usage)?;
            (lists, resolved)
        }
    };
    eprintln!("listcolor {} config {}", version_string(), config_hash(&config));
    eprintln!("graph: {} vertices, {} edges", graph.vertex_count(), graph.edge_count());
    for line in resolved.describe() {
        eprintln!("{line}");
    }
    Ok(Prepared {
        config,
        graph,
        lists,
        resolved,
    })
}

fn meta(p: &Prepared) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("config".into(), serde_json::to_value(&p.config).expect("config serialises"));
    m.insert("config_hash".into(), config_hash(&p.config).into());
    m.insert("seed".into(), p.config.seed.into());
    m.insert("version".into(), version_string().into());
    m
}

fn fix_failure(e: FixError) -> Failure {
    match e {
        FixError::ExecutionCapExceeded { .. } | FixError::Budget(_) => Failure::cap(e),
        FixError::Completion(CompletionError::IterationCapExceeded(_)) => Failure::cap(e),
        FixError::NotTriangleFree { .. } | FixError::NotCliqueFree { .. } | FixError::Params(_) => Failure::usage(e),
        other => Failure::verify(other),
    }
}

pub fn color(a: ColorArgs) -> Result<(), Failure> {
    let p = prepare(build_config(&a.input, &a.params)?)?;
    let out = run_pipeline(&p.graph, &p.lists, &p.resolved.params).map_err(fix_failure)?;
    let s = &out.stats;
    eprintln!(
        "repaired in {} top-level calls, {} recolourings ({} retries); completion: {}",
        s.top_level_calls,
        s.executions,
        s.retries,
        s.completion.as_deref().unwrap_or("none")
    );
    let mut m = meta(&p);
    m.insert("stats".into(), serde_json::to_value(&out.stats).expect("stats serialise"));
    m.insert(
        "entropy".into(),
        serde_json::to_value(entropy_report(s.executions, s.lambda, &out.calls, s.encoded_bits))
            .expect("report serialises"),
    );
    m.insert("lll".into(), serde_json::to_value(&out.lll).expect("report serialises"));
    m.insert("flaw_free".into(), io::coloring_to_json(&p.lists, &out.flaw_free, None));
    let json = io::coloring_to_json(&p.lists, &out.coloring, Some(Value::Object(m)));
    if let Some(t) = &a.transcript {
        let mut buf = Vec::new();
        write_transcripts(&out.calls, &mut buf).map_err(Failure::usage)?;
        emit(Some(t), std::str::from_utf8(&buf).expect("JSON is UTF-8"))?;
    }
    emit(a.output.as_deref(), &io::to_pretty(&json))
}

/// Inputs for commands that read a colouring: flags, else the
/// configuration embedded in the colouring file itself.
fn prepare_for(coloring: Option<&Path>, input: &InputArgs, params: &ParamArgs) -> Result<Prepared, Failure> {
    let mut input = input.clone();
    if input.graph.is_none() && input.gen.is_none() && input.config.is_none() {
        match coloring {
            Some(path) if read_json(path)?.pointer("/meta/config").is_some() => input.config = Some(path.to_path_buf()),
            _ => return Err(Failure::usage(anyhow!("give a graph with --graph or --gen (or --config)"))),
        }
    }
    prepare(build_config(&input, params)?)
}

fn read_coloring(path: &Path, lists: &ListAssignment) -> Result<PartialColoring, Failure> {
    io::parse_coloring(&io::read_to_string(path).map_err(Failure::usage)?, lists).map_err(Failure::usage)
}

pub fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let p = prepare_for(Some(&a.coloring), &a.input, &a.params)?;
    let sigma = read_coloring(&a.coloring, &p.lists)?;
    if sigma.len() != p.graph.vertex_count() {
        return Err(Failure::verify(anyhow!(
            "colouring has {} vertices, graph has {}",
            sigma.len(),
            p.graph.vertex_count()
        )));
    }
    match find_violation(&p.graph, &p.lists, &sigma, a.partial) {
        None => {
            println!("ok: proper {} list colouring", if a.partial { "partial" } else { "full" });
            Ok(())
        }
        Some(v) => {
            let msg = match v {
                Violation::Monochromatic { u, v, color } => {
                    format!("edge ({u}, {v}) has both ends coloured {}", p.lists.label(color))
                }
                other => format!("{other}"),
            };
            println!("violation: {msg}");
            Err(Failure::verify(anyhow!(msg)))
        }
    }
}

pub fn flaws(a: FlawsArgs) -> Result<(), Failure> {
    let p = prepare_for(a.coloring.as_deref(), &a.input, &a.params)?;
    let sigma = match &a.coloring {
        Some(path) => read_coloring(path, &p.lists)?,
        None => init_blank(&p.graph, &p.lists).map_err(Failure::usage)?,
    };
    let mut out = String::new();
    for f in all_flaws(&p.graph, &p.lists, &sigma, &p.resolved.params.flaw_params) {
        out.push_str(&serde_json::to_string(&f).expect("flaw serialises"));
        out.push('\n');
    }
    emit(None, &out)
}

pub fn complete(a: CompleteArgs) -> Result<(), Failure> {
    let p = prepare_for(Some(&a.coloring), &a.input, &a.params)?;
    let sigma = read_coloring(&a.coloring, &p.lists)?;
    let params = &p.resolved.params;
    let completed = match a.method {
        MethodArg::Mt => {
            let mut rng = rng::stream(params.seed, rng::COMPLETION, 0);
            moser_tardos_complete(
                &p.graph,
                &p.lists,
                &sigma,
                &params.flaw_params,
                params.completion_cap,
                &mut rng,
            )
            .map(|c| c.coloring)
        }
        MethodArg::Greedy => greedy_complete(&p.graph, &p.lists, &sigma),
    };
    let coloring = completed.map_err(|e| match e {
        CompletionError::IterationCapExceeded(_) => Failure::cap(e),
        other => Failure::verify(other),
    })?;
    if !is_proper_full(&p.graph, &p.lists, &coloring) {
        return Err(Failure::verify(anyhow!("completion produced an improper colouring")));
    }
    let mut m = meta(&p);
    m.insert(
        "method".into(),
        match a.method {
            MethodArg::Mt => "moser-tardos",
            MethodArg::Greedy => "greedy",
        }
        .into(),
    );
    emit(
        a.output.as_deref(),
        &io::to_pretty(&io::coloring_to_json(&p.lists, &coloring, Some(Value::Object(m)))),
    )
}

pub fn reconstruct(a: ReconstructArgs) -> Result<(), Failure> {
    let p = prepare_for(Some(&a.final_coloring), &a.input, &a.params)?;
    let final_json = read_json(&a.final_coloring)?;
    let flaw_free = match final_json.pointer("/meta/flaw_free") {
        Some(v) => io::parse_coloring(&v.to_string(), &p.lists).map_err(Failure::usage)?,
        None => read_coloring(&a.final_coloring, &p.lists)?,
    };
    let initial = match &a.initial {
        Some(path) => read_coloring(path, &p.lists)?,
        None => init_blank(&p.graph, &p.lists).map_err(Failure::usage)?,
    };
    let file = File::open(&a.transcript)
        .with_context(|| format!("cannot open {}", a.transcript.display()))
        .map_err(Failure::usage)?;
    let calls = read_transcripts(BufReader::new(file)).map_err(Failure::usage)?;
    let params = &p.resolved.params;
    let recs = reconstruct_run(
        &p.graph,
        &p.lists,
        &params.flaw_params,
        &initial,
        &calls,
        &flaw_free,
        params.enumeration_budget,
    )
    .map_err(Failure::verify)?;
    let steps: usize = recs.iter().map(|r| r.flaws.len()).sum();
    if let Some(path) = &a.states {
        let mut out = Vec::new();
        for (call, rec) in recs.iter().enumerate() {
            for (step, (f, sigma)) in rec.flaws.iter().zip(&rec.colorings).enumerate() {
                let line = json!({
                    "call": call,
                    "step": step,
                    "flaw": f,
                    "coloring": io::coloring_to_json(&p.lists, sigma, None),
                });
                writeln!(out, "{line}").expect("write to memory");
            }
        }
        emit(Some(path), std::str::from_utf8(&out).expect("JSON is UTF-8"))?;
    }
    println!("ok: reconstructed {} calls, {steps} steps, back to the initial colouring", recs.len());
    Ok(())
}

struct BenchRow {
    q: usize,
    ok: usize,
    capped: usize,
    other: usize,
    mean_executions: f64,
}

fn bench_point(base: &RunConfig, q: usize, runs: usize) -> Result<BenchRow, Failure> {
    let (mut ok, mut capped, mut other, mut execs) = (0, 0, 0, 0);
    for run in 0..runs {
        let mut cfg = base.clone();
        cfg.q = Some(q);
        if let ListsSource::Uniform { palette } = &mut cfg.lists {
            *palette = Some(palette.unwrap_or(q).max(q));
        }
        cfg.seed = base.seed.wrapping_add(run as u64);
        let graph = cfg.load_graph().map_err(Failure::usage)?;
        let resolved = resolve_params(&cfg, &graph, None).map_err(Failure::usage)?;
        let lists = cfg.load_lists(&graph, q).map_err(Failure::usage)?;
        match run_pipeline(&graph, &lists, &resolved.params) {
            Ok(out) => {
                ok += 1;
                execs += out.stats.executions;
            }
            Err(FixError::ExecutionCapExceeded { .. }) => capped += 1,
            Err(_) => other += 1,
        }
    }
    Ok(BenchRow {
        q,
        ok,
        capped,
        other,
        mean_executions: if ok == 0 { 0.0 } else { execs as f64 / ok as f64 },
    })
}

/// Smallest q in range whose failure rate meets the target: binary search
/// (assuming failures only get rarer as q grows), or every `q_step` with
/// `--linear`.
pub fn bench(a: BenchArgs) -> Result<(), Failure> {
    if a.q_step == 0 || a.q_from > a.q_to || a.runs == 0 {
        return Err(Failure::usage(anyhow!("need q-from <= q-to, q-step >= 1 and runs >= 1")));
    }
    let base = build_config(&a.input, &a.params)?;
    let meets = |r: &BenchRow| (a.runs - r.ok) as f64 / a.runs as f64 <= a.target;
    let mut rows = Vec::new();
    let mut threshold_q = None;
    if a.linear {
        let mut q = a.q_from;
        while q <= a.q_to {
            let row = bench_point(&base, q, a.runs)?;
            if threshold_q.is_none() && meets(&row) {
                threshold_q = Some(q);
            }
            rows.push(row);
            q += a.q_step;
        }
    } else {
        let (mut lo, mut hi) = (a.q_from, a.q_to);
        let top = bench_point(&base, hi, a.runs)?;
        let top_meets = meets(&top);
        rows.push(top);
        if top_meets {
            // Invariant: hi meets the target; everything below lo is known not to.
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                let row = bench_point(&base, mid, a.runs)?;
                if meets(&row) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
                rows.push(row);
            }
            threshold_q = Some(hi);
        }
        rows.sort_by_key(|r| r.q);
    }

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["q", "runs", "successes", "cap_failures", "other_failures", "mean_executions"])
        .map_err(|e| Failure::usage(anyhow!(e)))?;
    for r in &rows {
        wtr.write_record([
            r.q.to_string(),
            a.runs.to_string(),
            r.ok.to_string(),
            r.capped.to_string(),
            r.other.to_string(),
            format!("{:.3}", r.mean_executions),
        ])
        .map_err(|e| Failure::usage(anyhow!(e)))?;
    }
    let bytes = wtr.into_inner().map_err(|e| Failure::usage(anyhow!(e.to_string())))?;
    emit(a.csv.as_deref(), std::str::from_utf8(&bytes).expect("CSV is UTF-8"))?;
    eprintln!(
        "{}",
        json!({ "target_failure_rate": a.target, "smallest_q_meeting_target": threshold_q })
    );
    Ok(())
}

pub fn gen(a: GenArgs) -> Result<(), Failure> {
    let spec: GeneratorSpec = a.gen.parse().map_err(Failure::usage)?;
    let g = generate(&spec, a.seed).map_err(Failure::usage)?;
    eprintln!(
        "{spec} seed {}: {} vertices, {} edges, max degree {}",
        a.seed,
        g.vertex_count(),
        g.edge_count(),
        g.max_degree()
    );
    emit(a.output.as_deref(), &io::emit_graph(&g, a.format.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::Cli;
    use clap::Parser;

    fn parse(args: &[&str]) -> ColorArgs {
        match Cli::parse_from(args).command {
            crate::args::Command::Color(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn flags_override_defaults() {
        let a = parse(&["listcolor", "color", "--gen", "cycle:5", "--uniform-q", "3", "--L", "2", "--seed", "7"]);
        let cfg = build_config(&a.input, &a.params).unwrap();
        assert_eq!(cfg.q, Some(3));
        assert_eq!(cfg.threshold, Some(2.0));
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.lists, ListsSource::Uniform { palette: None });
        assert_eq!(cfg.graph, GraphSource::Generator { spec: "cycle:5".into() });
    }

    #[test]
    fn missing_graph_is_usage_error() {
        let a = parse(&["listcolor", "color"]);
        assert_eq!(build_config(&a.input, &a.params).unwrap_err().code, 2);
    }

    #[test]
    fn hash_tracks_config() {
        let a = parse(&["listcolor", "color", "--gen", "cycle:5"]);
        let mut cfg = build_config(&a.input, &a.params).unwrap();
        let h = config_hash(&cfg);
        assert_eq!(h.len(), 64);
        assert_eq!(h, config_hash(&cfg.clone()));
        cfg.seed += 1;
        assert_ne!(h, config_hash(&cfg));
    }

    #[test]
    fn absolute_paths_ignore_out_dir() {
        let p = Path::new("/tmp/x.json");
        assert_eq!(out_path(p), p);
    }
}
