//! Completing a flaw-free partial colouring: Moser–Tardos resampling over
//! the events "both ends of a Blank–Blank edge draw colour `c`", and a
//! greedy pass for the clique-free variant.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::color_set::Color;
use crate::coloring::{available_list, ListAssignment, PartialColoring};
use crate::flaw::{all_flaws, Flaw, FlawParams};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error("input colouring still has flaw {0}")]
    FlawFreePreconditionViolated(Flaw),
    #[error("no event-free assignment after {0} resamplings; parameters are likely outside the regime where resampling converges")]
    IterationCapExceeded(usize),
    #[error("Blank vertex {0} has no non-Blank colour available")]
    NoColours(Vertex),
    #[error("greedy completion stuck at vertex {v}: every available colour is taken by a neighbour")]
    GreedyStuck { v: Vertex },
}

/// `A_{uv,c}`: both ends of edge `uv` (`u < v`) received `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ConflictEvent {
    pub u: Vertex,
    pub v: Vertex,
    pub color: Color,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completed {
    pub coloring: PartialColoring,
    /// Number of events resampled.
    pub resamplings: usize,
}

/// `100 · #Blank`.
pub fn default_iteration_cap(sigma: &PartialColoring) -> usize {
    100 * sigma.blank_count()
}

/// Every Blank vertex draws uniformly from its available non-Blank colours,
/// frozen at entry. While some `A_{uv,c}` holds, the least one (by
/// `(u, v, c)`) has both endpoints redrawn from their frozen lists.
pub fn moser_tardos_complete<R: Rng + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &PartialColoring,
    params: &FlawParams,
    cap: Option<usize>,
    rng: &mut R,
) -> Result<Completed, CompletionError> {
    if let Some(&f) = all_flaws(g, lists, sigma, params).first() {
        return Err(CompletionError::FlawFreePreconditionViolated(f));
    }
    let cap = cap.unwrap_or_else(|| default_iteration_cap(sigma));
    let n = g.vertex_count();
    let mut frozen: Vec<Vec<Color>> = vec![Vec::new(); n];
    let blanks: Vec<Vertex> = sigma.blank_vertices().collect();
    for &v in &blanks {
        frozen[v] = available_list(g, lists, sigma, v).non_blank().to_vec();
        if frozen[v].is_empty() {
            return Err(CompletionError::NoColours(v));
        }
    }
    let mut out = sigma.clone();
    let draw = |v: Vertex, rng: &mut R| Some(frozen[v][rng.gen_range(0..frozen[v].len())]);
    for &v in &blanks {
        out.set(v, draw(v, rng));
    }

    let was_blank = |v: Vertex| sigma.is_blank(v);
    let event_at = |out: &PartialColoring, u: Vertex, v: Vertex| -> Option<ConflictEvent> {
        let (a, b) = (u.min(v), u.max(v));
        match (out.get(a), out.get(b)) {
            (Some(x), Some(y)) if x == y => Some(ConflictEvent { u: a, v: b, color: x }),
            _ => None,
        }
    };
    let mut active: BTreeSet<ConflictEvent> = BTreeSet::new();
    for &u in &blanks {
        for &w in g.neighbors(u) {
            if u < w && was_blank(w) {
                active.extend(event_at(&out, u, w));
            }
        }
    }

    let mut resamplings = 0;
    while let Some(&e) = active.iter().next() {
        if resamplings == cap {
            return Err(CompletionError::IterationCapExceeded(cap));
        }
        resamplings += 1;
        for x in [e.u, e.v] {
            for &w in g.neighbors(x) {
                if was_blank(w) {
                    if let Some(old) = event_at(&out, x, w) {
                        active.remove(&old);
                    }
                }
            }
        }
        out.set(e.u, draw(e.u, rng));
        out.set(e.v, draw(e.v, rng));
        for x in [e.u, e.v] {
            for &w in g.neighbors(x) {
                if was_blank(w) {
                    active.extend(event_at(&out, x, w));
                }
            }
        }
    }
    Ok(Completed {
        coloring: out,
        resamplings,
    })
}

/// Blank vertices in ascending label order each take the least available
/// colour not already on a neighbour.
pub fn greedy_complete(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring) -> Result<PartialColoring, CompletionError> {
    let mut out = sigma.clone();
    for v in sigma.blank_vertices() {
        let c = available_list(g, lists, &out, v).choice(0);
        match c {
            Some(_) => out.set(v, c),
            None => return Err(CompletionError::GreedyStuck { v }),
        }
    }
    Ok(out)
}

/// Local Lemma diagnostic for the completion experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LllReport {
    pub events: usize,
    /// Max over events of the exact `Σ Pr(B)` over other events `B`
    /// sharing a vertex.
    pub max_dependent_sum: f64,
    /// Max over events of `Σ_{x ∈ {u,v}} (L/10)|L_x| / ((|L_x|−1)(L−1))`,
    /// the bound obtained from the absence of Z flaws.
    pub max_bound_expression: f64,
    /// Whether the exact sum stays below 1/4.
    pub exact_condition_holds: bool,
    pub bound_condition_holds: bool,
}

pub fn lll_diagnostic(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring, params: &FlawParams) -> LllReport {
    let n = g.vertex_count();
    let avail: Vec<_> = (0..n)
        .map(|v| available_list(g, lists, sigma, v).into_non_blank())
        .collect();
    let k = |v: Vertex| avail[v].len() as f64;
    let pr = |u: Vertex, v: Vertex| 1.0 / (k(u) * k(v));
    let incident: Vec<f64> = (0..n)
        .map(|x| {
            if !sigma.is_blank(x) {
                return 0.0;
            }
            g.neighbors(x)
                .iter()
                .filter(|&&w| sigma.is_blank(w))
                .map(|&w| avail[x].intersection_len(&avail[w]) as f64 * pr(x, w))
                .sum()
        })
        .collect();
    let l = params.threshold;
    let bound_at = |x: Vertex| (l / 10.0) * (k(x) + 1.0) / (k(x) * (l - 1.0));
    let mut report = LllReport {
        events: 0,
        max_dependent_sum: 0.0,
        max_bound_expression: 0.0,
        exact_condition_holds: true,
        bound_condition_holds: true,
    };
    for (u, v) in g.edges() {
        if !sigma.is_blank(u) || !sigma.is_blank(v) {
            continue;
        }
        let shared = avail[u].intersection_len(&avail[v]);
        if shared == 0 {
            continue;
        }
        report.events += shared;
        let p = pr(u, v);
        let dependent = incident[u] + incident[v] - shared as f64 * p - p;
        report.max_dependent_sum = report.max_dependent_sum.max(dependent);
        report.max_bound_expression = report.max_bound_expression.max(bound_at(u) + bound_at(v));
    }
    report.exact_condition_holds = report.max_dependent_sum < 0.25;
    report.bound_condition_holds = l > 1.0 && report.max_bound_expression < 0.25;
    report
}
