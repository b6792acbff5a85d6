//! The repair procedures and the pipeline that drives them.
//!
//! Both variants share one engine. A call on flaw `f` recolours `N_{v(f)}`
//! (line (*)), then repeatedly fixes the least flaw within the variant's
//! radii of `v(f)` until none is left. Triangle-free graphs recolour each
//! `u ∈ N_v` uniformly from `L_u`; clique-free graphs draw a uniform partial
//! colour assignment to `N_v`. Recursion runs on an explicit stack.
//!
//! Every recolouring consumes exactly one uniform draw below `Λ` (the number
//! of outcomes), unranked lexicographically with the lowest-labelled
//! neighbour most significant, so a run is a pure function of its seed.

use num_bigint::RandBigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color_set::Color;
use crate::coloring::{init_blank, is_proper_full, ColoringError, ListAssignment, PartialColoring};
use crate::completion::{greedy_complete, lll_diagnostic, moser_tardos_complete, CompletionError, LllReport};
use crate::flaw::{Evaluator, Flaw, FlawKind, FlawParams, FlawParamsError, ListMemo, Variant};
use crate::graph::{Graph, Vertex};
use crate::neighborhood::Neighborhood;
use crate::pca::{PcaError, PcaSpace};
use crate::rng;
use crate::transcript::{
    compressed_colours_index, flawed_count, step_neighborhood, CallTranscript, Colours, Header, Record,
    TranscriptMode,
};

/// Which repair calls verify "f no longer holds and no new flaw appeared".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CheckLevel {
    Off,
    #[default]
    TopLevel,
    EveryFrame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixParams {
    pub q: usize,
    pub flaw_params: FlawParams,
    /// Cap on recolourings per top-level call.
    pub max_executions: usize,
    pub transcript_mode: TranscriptMode,
    pub seed: u64,
    /// Largest neighbourhood outcome space enumerated for compressed indices;
    /// larger steps are recorded raw.
    pub enumeration_budget: u128,
    /// Largest `∏ |L*_u|` for exact Ω sampling.
    pub pca_budget: u128,
    /// Fresh-seed retries of a top-level call that hit the cap.
    pub retry_budget: usize,
    pub check_level: CheckLevel,
    /// Keep every intermediate step for replay and diffing.
    pub record_trace: bool,
    pub completion_cap: Option<usize>,
}

impl FixParams {
    /// Defaults: cap `2n`, raw transcript, top-level checks, 3 retries.
    pub fn new(q: usize, flaw_params: FlawParams, n: usize) -> Self {
        Self {
            q,
            flaw_params,
            max_executions: (2 * n).max(1),
            transcript_mode: TranscriptMode::Raw,
            seed: 0,
            enumeration_budget: 1 << 20,
            pca_budget: 1 << 40,
            retry_budget: 3,
            check_level: CheckLevel::TopLevel,
            record_trace: false,
            completion_cap: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum FixError {
    #[error("execution cap exceeded after {t} recolourings")]
    ExecutionCapExceeded { t: usize },
    #[error("flaw {0} does not hold")]
    FlawDoesNotHold(Flaw),
    #[error("graph is not triangle-free (neighbourhood of {v} has an edge)")]
    NotTriangleFree { v: Vertex },
    #[error("graph contains a clique on {r} vertices")]
    NotCliqueFree { r: usize },
    #[error("partial colour assignment budget: {0}")]
    Budget(#[from] PcaError),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Completion(#[from] CompletionError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Params(#[from] FlawParamsError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunStats {
    /// Recolourings in successful top-level calls.
    pub executions: usize,
    pub b_steps: usize,
    pub z_steps: usize,
    /// `Σ_i log2 Λ_i`.
    pub lambda: f64,
    pub transcript_bits: u64,
    /// `Σ` over records of `log2` of the record's alphabet size.
    pub encoded_bits: f64,
    pub top_level_calls: usize,
    pub retries: usize,
    /// Recolourings thrown away with failed attempts.
    pub discarded_executions: usize,
    pub max_depth: usize,
    pub postcondition_checks: usize,
    pub external_list_checks: usize,
    pub compressed_fallbacks: usize,
    pub completion: Option<String>,
    pub completion_resamplings: usize,
}

/// One recolouring, for replay and diffing.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub flaw: Flaw,
    pub neighborhood: Vec<Vertex>,
    pub before: Vec<Option<Color>>,
    pub after: Vec<Option<Color>>,
    pub log2_lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CallTrace {
    pub flaw: Flaw,
    pub sigma_before: PartialColoring,
    pub sigma_after: PartialColoring,
    pub steps: Vec<TraceStep>,
}

impl CallTrace {
    /// `σ_0 … σ_t` replayed forward from the recorded diffs.
    pub fn colorings(&self) -> Vec<PartialColoring> {
        let mut sigma = self.sigma_before.clone();
        let mut out = vec![sigma.clone()];
        for s in &self.steps {
            for (&u, &c) in s.neighborhood.iter().zip(&s.after) {
                sigma.set(u, c);
            }
            out.push(sigma.clone());
        }
        out
    }
}

/// Outcome of one recolouring.
#[derive(Debug, Clone, PartialEq)]
pub struct Recolored {
    pub neighborhood: Vec<Vertex>,
    pub before: Vec<Option<Color>>,
    pub after: Vec<Option<Color>>,
    /// `log2 Λ`.
    pub log2_lambda: f64,
}

fn draw_product<R: Rng + ?Sized>(nb: &Neighborhood, rng: &mut R) -> Vec<Option<Color>> {
    match nb.product_size() {
        Some(size) => nb.product_unrank(rng.gen_range(0..size)),
        None => nb.product_unrank_big(&rng.gen_biguint_below(&nb.product_size_big())),
    }
}

/// Line (*) of the triangle-free procedure: every `u ∈ N_v` independently
/// takes a uniform element of `L_u`, via one draw below `Λ = ∏ |L_u|`.
pub fn recolor_neighborhood<R: Rng + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &mut PartialColoring,
    v: Vertex,
    rng: &mut R,
) -> Result<Recolored, FixError> {
    let nb = Neighborhood::around_available(g, lists, sigma, v);
    if nb.edges().next().is_some() {
        return Err(FixError::NotTriangleFree { v });
    }
    let before: Vec<_> = nb.vertices.iter().map(|&u| sigma.get(u)).collect();
    let after = draw_product(&nb, rng);
    for (&u, &c) in nb.vertices.iter().zip(&after) {
        sigma.set(u, c);
    }
    Ok(Recolored {
        log2_lambda: nb.product_log2(),
        neighborhood: nb.vertices,
        before,
        after,
    })
}

/// Clique-free recolouring: a uniform member of Ω for `N_v`.
pub fn recolor_neighborhood_pca<R: Rng + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &mut PartialColoring,
    v: Vertex,
    budget: u128,
    rng: &mut R,
) -> Result<Recolored, FixError> {
    let nb = Neighborhood::around_external(g, lists, sigma, v);
    let before: Vec<_> = nb.vertices.iter().map(|&u| sigma.get(u)).collect();
    let mut space = PcaSpace::new(nb, lists.palette_size(), budget)?;
    let size = space.count();
    let w = space.sample(rng);
    debug_assert!(space.is_member(&w));
    let vertices = space.neighborhood().vertices.clone();
    for (&u, &c) in vertices.iter().zip(&w.assignment) {
        sigma.set(u, c);
    }
    Ok(Recolored {
        neighborhood: vertices,
        before,
        after: w.assignment,
        log2_lambda: (size as f64).log2(),
    })
}

struct Frame {
    flaw: Flaw,
    ball: Vec<(Vertex, usize)>,
    entry: Option<PartialColoring>,
    touched: Vec<Vertex>,
}

/// Output of a single top-level call.
#[derive(Debug, Clone, PartialEq)]
pub struct FixOutcome {
    pub transcript: CallTranscript,
    pub executions: usize,
    pub trace: Option<CallTrace>,
}

/// Mutable state of a run: the colouring plus bookkeeping.
pub struct Engine<'a> {
    g: &'a Graph,
    lists: &'a ListAssignment,
    params: &'a FixParams,
    pub sigma: PartialColoring,
    pub stats: RunStats,
    memo: ListMemo,
    snap_memo: ListMemo,
    stamp: Vec<u32>,
    stamp_now: u32,
}

impl<'a> Engine<'a> {
    pub fn new(g: &'a Graph, lists: &'a ListAssignment, params: &'a FixParams, sigma: PartialColoring) -> Self {
        let n = g.vertex_count();
        Self {
            g,
            lists,
            params,
            sigma,
            stats: RunStats::default(),
            memo: ListMemo::new(n),
            snap_memo: ListMemo::new(n),
            stamp: vec![0; n],
            stamp_now: 0,
        }
    }

    fn fp(&self) -> &'a FlawParams {
        &self.params.flaw_params
    }

    fn holds(&mut self, f: Flaw) -> bool {
        self.memo.invalidate();
        Evaluator::new(self.g, self.lists, &self.sigma, self.fp(), &mut self.memo).holds(f)
    }

    /// Every holding flaw, in flaw order.
    pub fn all_flaws(&mut self) -> Vec<Flaw> {
        self.memo.invalidate();
        let mut e = Evaluator::new(self.g, self.lists, &self.sigma, self.fp(), &mut self.memo);
        let n = self.g.vertex_count();
        let mut out: Vec<Flaw> = (0..n).filter(|&v| e.b_holds(v)).map(Flaw::b).collect();
        out.extend((0..n).filter(|&v| e.z_holds(v)).map(Flaw::z));
        out
    }

    fn least_in_ball(&mut self, ball: &[(Vertex, usize)]) -> Option<Flaw> {
        self.memo.invalidate();
        Evaluator::new(self.g, self.lists, &self.sigma, self.fp(), &mut self.memo).least_in_ball(ball)
    }

    fn checks_frame(&self, depth: usize) -> bool {
        match self.params.check_level {
            CheckLevel::Off => false,
            CheckLevel::TopLevel => depth == 0,
            CheckLevel::EveryFrame => true,
        }
    }

    /// Runs the repair procedure on `f` to completion.
    pub fn fix<R: Rng + ?Sized>(&mut self, f: Flaw, rng: &mut R) -> Result<FixOutcome, FixError> {
        if !self.holds(f) {
            return Err(FixError::FlawDoesNotHold(f));
        }
        let recording = self.params.transcript_mode != TranscriptMode::Off;
        let mut records = Vec::new();
        let mut trace = self.params.record_trace.then(|| CallTrace {
            flaw: f,
            sigma_before: self.sigma.clone(),
            sigma_after: PartialColoring::from_vec(Vec::new()),
            steps: Vec::new(),
        });
        let mut stack: Vec<Frame> = Vec::new();
        let mut t = 0usize;
        self.enter(f, &mut stack, &mut t, &mut records, trace.as_mut(), rng)?;
        while let Some(top) = stack.last_mut() {
            let top_vertex = top.flaw.vertex;
            let ball = std::mem::take(&mut top.ball);
            let next = self.least_in_ball(&ball);
            stack.last_mut().expect("non-empty").ball = ball;
            match next {
                Some(h) => {
                    if recording {
                        let ball = &stack.last().expect("non-empty").ball;
                        let ell = ball.partition_point(|&(w, _)| w < h.vertex) + 1;
                        debug_assert_eq!(self.g.omega(top_vertex, ell).ok(), Some(h.vertex));
                        self.stats.encoded_bits += 1.0 + (ball.len() as f64).log2();
                        records.push(Record::FixCall { kind: h.kind, ell });
                    }
                    self.enter(h, &mut stack, &mut t, &mut records, trace.as_mut(), rng)?;
                }
                None => {
                    let frame = stack.pop().expect("non-empty");
                    if frame.entry.is_some() {
                        self.check_postconditions(&frame)?;
                    }
                    if let Some(parent) = stack.last_mut() {
                        parent.touched.extend_from_slice(&frame.touched);
                    }
                    if recording {
                        self.stats.encoded_bits += 1.0;
                        records.push(Record::Return);
                    }
                }
            }
        }
        if let Some(tr) = trace.as_mut() {
            tr.sigma_after = self.sigma.clone();
        }
        let transcript = CallTranscript {
            header: Header {
                flaw: f,
                executions: t,
                variant: self.fp().variant,
            },
            records,
        };
        if recording {
            self.stats.transcript_bits += transcript.serialized_bits();
        }
        Ok(FixOutcome {
            transcript,
            executions: t,
            trace,
        })
    }

    fn enter<R: Rng + ?Sized>(
        &mut self,
        f: Flaw,
        stack: &mut Vec<Frame>,
        t: &mut usize,
        records: &mut Vec<Record>,
        trace: Option<&mut CallTrace>,
        rng: &mut R,
    ) -> Result<(), FixError> {
        if *t == self.params.max_executions {
            return Err(FixError::ExecutionCapExceeded { t: *t });
        }
        let v = f.vertex;
        let variant = self.fp().variant;
        if variant == Variant::CliqueFree && f.kind == FlawKind::Z {
            self.check_external_lists(v)?;
        }
        let depth = stack.len();
        let entry = self.checks_frame(depth).then(|| self.sigma.clone());

        let nb = step_neighborhood(self.g, self.lists, &self.sigma, v, variant);
        let before: Vec<_> = nb.vertices.iter().map(|&u| self.sigma.get(u)).collect();
        let (after, log2_lambda) = match variant {
            Variant::TriangleFree => {
                if nb.edges().next().is_some() {
                    return Err(FixError::NotTriangleFree { v });
                }
                (draw_product(&nb, rng), nb.product_log2())
            }
            Variant::CliqueFree => {
                let mut space = PcaSpace::new(nb.clone(), self.lists.palette_size(), self.params.pca_budget)?;
                let size = space.count();
                let w = space.sample(rng);
                debug_assert!(space.is_member(&w), "sampled assignment is not a partial colour assignment");
                (w.assignment, (size as f64).log2())
            }
        };
        if self.params.transcript_mode != TranscriptMode::Off {
            let record = self.colours_record(&nb, &before, log2_lambda);
            records.push(Record::Colours(record));
        }
        for (&u, &c) in nb.vertices.iter().zip(&after) {
            self.sigma.set(u, c);
        }
        if cfg!(debug_assertions) && variant == Variant::TriangleFree {
            let again = Neighborhood::around_available(self.g, self.lists, &self.sigma, v);
            assert_eq!(again.lists, nb.lists, "lists of N_{v} changed during its own recolouring");
        }

        *t += 1;
        self.stats.lambda += log2_lambda;
        match f.kind {
            FlawKind::B => self.stats.b_steps += 1,
            FlawKind::Z => self.stats.z_steps += 1,
        }
        self.stats.max_depth = self.stats.max_depth.max(depth + 1);
        if let Some(tr) = trace {
            tr.steps.push(TraceStep {
                flaw: f,
                neighborhood: nb.vertices.clone(),
                before,
                after,
                log2_lambda,
            });
        }
        stack.push(Frame {
            flaw: f,
            ball: self.g.ball(v, 3),
            entry,
            touched: nb.vertices,
        });
        Ok(())
    }

    fn colours_record(&mut self, nb: &Neighborhood, before: &[Option<Color>], log2_lambda: f64) -> Colours {
        if self.params.transcript_mode == TranscriptMode::Compressed {
            let budget = self.params.enumeration_budget;
            if let Ok(ell) = compressed_colours_index(nb, before, self.fp(), budget) {
                let count = flawed_count(nb, self.fp(), budget).expect("within budget");
                self.stats.encoded_bits += (count as f64).log2();
                return Colours::Index(ell);
            }
            self.stats.compressed_fallbacks += 1;
        }
        self.stats.encoded_bits += log2_lambda;
        Colours::Raw(before.to_vec())
    }

    /// Before a clique-free Z call at `v`: no `B_w` holds for `w ∈ N_v`,
    /// hence `|L*_u| ≥ |L_u| ≥ L` on `N_v`.
    fn check_external_lists(&mut self, v: Vertex) -> Result<(), FixError> {
        self.stats.external_list_checks += 1;
        self.memo.invalidate();
        let fp = self.fp();
        let mut e = Evaluator::new(self.g, self.lists, &self.sigma, fp, &mut self.memo);
        for &w in self.g.neighbors(v) {
            if e.b_holds(w) {
                return Err(FixError::Invariant(format!("B_{w} holds on entry to the Z call at {v}")));
            }
        }
        if cfg!(debug_assertions) {
            let ext = Neighborhood::around_external(self.g, self.lists, &self.sigma, v);
            for (i, &u) in ext.vertices.iter().enumerate() {
                let avail = e.available_len(u);
                assert!(
                    ext.list_len(i) >= avail && avail as f64 >= fp.threshold,
                    "|L*_{u}| >= |L_{u}| >= L fails at the Z call on {v}"
                );
            }
        }
        Ok(())
    }

    /// On return from the call on `frame.flaw`: it no longer holds, and no
    /// flaw holds now that did not hold on entry. Only flaws within the
    /// dependency radius of a recoloured vertex can have changed.
    fn check_postconditions(&mut self, frame: &Frame) -> Result<(), FixError> {
        self.stats.postcondition_checks += 1;
        if self.holds(frame.flaw) {
            return Err(FixError::Invariant(format!("{} still holds after its repair", frame.flaw)));
        }
        let entry = frame.entry.as_ref().expect("checked frame");
        let radius = self.fp().variant.dependency_radius(FlawKind::Z).max(1);
        let region = self.region_around(&frame.touched, radius);
        self.memo.invalidate();
        self.snap_memo.invalidate();
        let fp = self.fp();
        let mut now = Evaluator::new(self.g, self.lists, &self.sigma, fp, &mut self.memo);
        let mut then = Evaluator::new(self.g, self.lists, entry, fp, &mut self.snap_memo);
        for w in region {
            for f in [Flaw::b(w), Flaw::z(w)] {
                if now.holds(f) && !then.holds(f) {
                    return Err(FixError::Invariant(format!(
                        "{f} appeared during the repair of {}",
                        frame.flaw
                    )));
                }
            }
        }
        Ok(())
    }

    fn region_around(&mut self, sources: &[Vertex], radius: usize) -> Vec<Vertex> {
        self.stamp_now = self.stamp_now.wrapping_add(1);
        if self.stamp_now == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.stamp_now = 1;
        }
        let mut layer: Vec<Vertex> = Vec::new();
        for &s in sources {
            if self.stamp[s] != self.stamp_now {
                self.stamp[s] = self.stamp_now;
                layer.push(s);
            }
        }
        let mut all = layer.clone();
        for _ in 0..radius {
            let mut next = Vec::new();
            for &x in &layer {
                for &y in self.g.neighbors(x) {
                    if self.stamp[y] != self.stamp_now {
                        self.stamp[y] = self.stamp_now;
                        next.push(y);
                    }
                }
            }
            all.extend_from_slice(&next);
            layer = next;
        }
        all.sort_unstable();
        all
    }
}

/// One top-level repair call on `sigma`.
pub fn fix<R: Rng + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &mut PartialColoring,
    f: Flaw,
    params: &FixParams,
    rng: &mut R,
) -> Result<(FixOutcome, RunStats), FixError> {
    let mut engine = Engine::new(g, lists, params, sigma.clone());
    let out = engine.fix(f, rng)?;
    *sigma = engine.sigma;
    Ok((out, engine.stats))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub coloring: PartialColoring,
    /// The colouring when the last flaw was repaired, before completion.
    pub flaw_free: PartialColoring,
    pub stats: RunStats,
    pub calls: Vec<CallTranscript>,
    pub traces: Vec<CallTrace>,
    pub lll: LllReport,
}

fn check_structure(g: &Graph, fp: &FlawParams) -> Result<(), FixError> {
    match fp.variant {
        Variant::TriangleFree => {
            if !g.is_triangle_free() {
                let v = (0..g.vertex_count())
                    .find(|&v| g.neighbors(v).iter().any(|&a| g.neighbors(v).iter().any(|&b| g.has_edge(a, b))))
                    .unwrap_or(0);
                return Err(FixError::NotTriangleFree { v });
            }
        }
        Variant::CliqueFree => {
            if !g.clique_number_at_most(fp.r - 1) {
                return Err(FixError::NotCliqueFree { r: fp.r });
            }
        }
    }
    Ok(())
}

/// Repairs flaws from the all-Blank colouring, least flaw first, until none
/// is left, then completes. A top-level call that hits the execution cap is
/// rolled back and retried with a fresh derived seed.
pub fn run_pipeline(g: &Graph, lists: &ListAssignment, params: &FixParams) -> Result<PipelineOutput, FixError> {
    let fp = &params.flaw_params;
    fp.validate()?;
    check_structure(g, fp)?;
    let mut engine = Engine::new(g, lists, params, init_blank(g, lists)?);
    let mut recolor_rng = rng::stream(params.seed, rng::RECOLOR, 0);
    let mut calls = Vec::new();
    let mut traces = Vec::new();
    let mut call_index: u64 = 0;
    let mut flaws = engine.all_flaws();
    while let Some(&f) = flaws.first() {
        let before = flaws.len();
        let snapshot = engine.sigma.clone();
        let mut attempt: u64 = 0;
        let outcome = loop {
            let saved = engine.stats.clone();
            let result = if attempt == 0 {
                engine.fix(f, &mut recolor_rng)
            } else {
                let mut retry_rng = rng::stream(params.seed, rng::RETRY, (call_index << 16) | attempt);
                engine.fix(f, &mut retry_rng)
            };
            match result {
                Ok(out) => break out,
                Err(FixError::ExecutionCapExceeded { t }) if attempt < params.retry_budget as u64 => {
                    engine.stats = saved;
                    engine.stats.retries += 1;
                    engine.stats.discarded_executions += t;
                    engine.sigma = snapshot.clone();
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        };
        engine.stats.executions += outcome.executions;
        engine.stats.top_level_calls += 1;
        call_index += 1;
        flaws = engine.all_flaws();
        if flaws.len() >= before {
            return Err(FixError::Invariant(format!(
                "flaw count went from {before} to {} across the call on {f}",
                flaws.len()
            )));
        }
        if params.transcript_mode != TranscriptMode::Off {
            calls.push(outcome.transcript);
        }
        traces.extend(outcome.trace);
    }

    let flaw_free = engine.sigma.clone();
    let lll = lll_diagnostic(g, lists, &flaw_free, fp);
    let mut stats = engine.stats;
    let mut completion_rng = rng::stream(params.seed, rng::COMPLETION, 0);
    let coloring = match fp.variant {
        Variant::TriangleFree => {
            let done = moser_tardos_complete(g, lists, &flaw_free, fp, params.completion_cap, &mut completion_rng)?;
            stats.completion = Some("moser-tardos".into());
            stats.completion_resamplings = done.resamplings;
            done.coloring
        }
        Variant::CliqueFree => match greedy_complete(g, lists, &flaw_free) {
            Ok(c) => {
                stats.completion = Some("greedy".into());
                c
            }
            Err(CompletionError::GreedyStuck { .. }) => {
                let done =
                    moser_tardos_complete(g, lists, &flaw_free, fp, params.completion_cap, &mut completion_rng)?;
                stats.completion = Some("greedy-then-moser-tardos".into());
                stats.completion_resamplings = done.resamplings;
                done.coloring
            }
            Err(e) => return Err(e.into()),
        },
    };
    if !is_proper_full(g, lists, &coloring) {
        return Err(FixError::Invariant("completed colouring is not a proper list colouring".into()));
    }
    Ok(PipelineOutput {
        coloring,
        flaw_free,
        stats,
        calls,
        traces,
        lll,
    })
}

/// [`run_pipeline`] for the clique-free variant.
pub fn run_pipeline_kr(g: &Graph, lists: &ListAssignment, params: &FixParams) -> Result<PipelineOutput, FixError> {
    if params.flaw_params.variant != Variant::CliqueFree {
        return Err(FixError::Invariant("run_pipeline_kr needs clique-free flaw parameters".into()));
    }
    run_pipeline(g, lists, params)
}
