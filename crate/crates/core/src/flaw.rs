//! Flaw predicates for both variants, their total order, and radius-limited
//! least-flaw search.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{available_list, AvailableList, ListAssignment, PartialColoring};
use crate::graph::{Graph, Vertex};

/// B-flaws precede Z-flaws in the total order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FlawKind {
    B,
    Z,
}

/// A flaw `B_v` or `Z_v`. Ordered by kind, then by vertex label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Flaw {
    pub kind: FlawKind,
    pub vertex: Vertex,
}

impl Flaw {
    pub fn b(vertex: Vertex) -> Self {
        Self { kind: FlawKind::B, vertex }
    }

    pub fn z(vertex: Vertex) -> Self {
        Self { kind: FlawKind::Z, vertex }
    }
}

impl Ord for Flaw {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind.cmp(&other.kind).then(self.vertex.cmp(&other.vertex))
    }
}

impl PartialOrd for Flaw {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Flaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}_{}", self.kind, self.vertex)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    TriangleFree,
    CliqueFree,
}

impl Variant {
    /// Search radii `(B, Z)` around the vertex of the flaw being fixed.
    pub fn search_radii(self) -> (usize, usize) {
        match self {
            Variant::TriangleFree => (2, 3),
            Variant::CliqueFree => (3, 2),
        }
    }

    /// Radius of the colouring a flaw at `w` depends on, per kind.
    pub fn dependency_radius(self, kind: FlawKind) -> usize {
        match (self, kind) {
            (_, FlawKind::B) => 1,
            (Variant::TriangleFree, FlawKind::Z) => 2,
            (Variant::CliqueFree, FlawKind::Z) => 1,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlawParamsError {
    #[error("threshold L must be positive, got {0}")]
    NonPositiveThreshold(f64),
    #[error("the clique-free variant needs r >= 4, got {0}")]
    CliqueOrderTooSmall(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlawParams {
    pub variant: Variant,
    /// The threshold `L`, compared as a real.
    pub threshold: f64,
    /// Informational.
    pub epsilon: f64,
    /// Forbidden clique order; used by the clique-free variant only.
    pub r: usize,
}

impl FlawParams {
    pub fn triangle_free(threshold: f64) -> Self {
        Self {
            variant: Variant::TriangleFree,
            threshold,
            epsilon: 0.0,
            r: 3,
        }
    }

    pub fn clique_free(threshold: f64, r: usize) -> Self {
        Self {
            variant: Variant::CliqueFree,
            threshold,
            epsilon: 0.0,
            r,
        }
    }

    pub fn validate(&self) -> Result<(), FlawParamsError> {
        if !(self.threshold > 0.0) {
            return Err(FlawParamsError::NonPositiveThreshold(self.threshold));
        }
        if self.variant == Variant::CliqueFree && self.r < 4 {
            return Err(FlawParamsError::CliqueOrderTooSmall(self.r));
        }
        Ok(())
    }
}

/// Scan-local memo of available lists. Entries are valid only while the
/// colouring is unchanged; call [`ListMemo::invalidate`] after any recolouring.
#[derive(Debug, Clone)]
pub struct ListMemo {
    stamp: u32,
    entries: Vec<(u32, AvailableList)>,
}

impl ListMemo {
    pub fn new(n: usize) -> Self {
        Self {
            stamp: 1,
            entries: vec![(0, AvailableList::from_colors(Default::default())); n],
        }
    }

    pub fn invalidate(&mut self) {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            for e in &mut self.entries {
                e.0 = 0;
            }
            self.stamp = 1;
        }
    }

    pub fn get(&mut self, g: &Graph, lists: &ListAssignment, sigma: &PartialColoring, v: Vertex) -> &AvailableList {
        if self.entries[v].0 != self.stamp {
            self.entries[v] = (self.stamp, available_list(g, lists, sigma, v));
        }
        &self.entries[v].1
    }
}

/// Flaw evaluation against a fixed colouring, memoising `L_u` lookups.
pub struct Evaluator<'a> {
    pub g: &'a Graph,
    pub lists: &'a ListAssignment,
    pub sigma: &'a PartialColoring,
    pub params: &'a FlawParams,
    memo: &'a mut ListMemo,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        g: &'a Graph,
        lists: &'a ListAssignment,
        sigma: &'a PartialColoring,
        params: &'a FlawParams,
        memo: &'a mut ListMemo,
    ) -> Self {
        Self {
            g,
            lists,
            sigma,
            params,
            memo,
        }
    }

    pub fn available_len(&mut self, v: Vertex) -> usize {
        self.memo.get(self.g, self.lists, self.sigma, v).len()
    }

    pub fn b_holds(&mut self, v: Vertex) -> bool {
        (self.available_len(v) as f64) < self.params.threshold
    }

    /// `Σ_{c ∈ L_v} |T_{v,c}|`, computed as `Σ_{u ∈ N_v Blank} |L_u ∩ L_v|`
    /// over non-Blank colours (`T_{v,Blank}` is empty).
    pub fn t_mass(&mut self, v: Vertex) -> usize {
        let lv = self.memo.get(self.g, self.lists, self.sigma, v).non_blank().clone();
        let mut total = 0;
        for &u in self.g.neighbors(v) {
            if self.sigma.is_blank(u) {
                total += self.memo.get(self.g, self.lists, self.sigma, u).non_blank().intersection_len(&lv);
            }
        }
        total
    }

    pub fn z_holds_tf(&mut self, v: Vertex) -> bool {
        let mass = self.t_mass(v) as f64;
        let lv = self.available_len(v) as f64;
        10.0 * mass > self.params.threshold * lv
    }

    pub fn blank_neighbors(&self, v: Vertex) -> usize {
        self.g.neighbors(v).iter().filter(|&&u| self.sigma.is_blank(u)).count()
    }

    pub fn z_holds_kr(&mut self, v: Vertex) -> bool {
        self.blank_neighbors(v) as f64 >= self.params.threshold
    }

    pub fn z_holds(&mut self, v: Vertex) -> bool {
        match self.params.variant {
            Variant::TriangleFree => self.z_holds_tf(v),
            Variant::CliqueFree => self.z_holds_kr(v),
        }
    }

    pub fn holds(&mut self, f: Flaw) -> bool {
        match f.kind {
            FlawKind::B => self.b_holds(f.vertex),
            FlawKind::Z => self.z_holds(f.vertex),
        }
    }

    /// Least holding flaw among `ball` (sorted `(vertex, distance)` pairs),
    /// restricted to the variant's search radii.
    pub fn least_in_ball(&mut self, ball: &[(Vertex, usize)]) -> Option<Flaw> {
        let (rb, rz) = self.params.variant.search_radii();
        for &(w, d) in ball {
            if d <= rb && self.b_holds(w) {
                return Some(Flaw::b(w));
            }
        }
        for &(w, d) in ball {
            if d <= rz && self.z_holds(w) {
                return Some(Flaw::z(w));
            }
        }
        None
    }
}

fn with_evaluator<T>(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &PartialColoring,
    params: &FlawParams,
    f: impl FnOnce(&mut Evaluator<'_>) -> T,
) -> T {
    let mut memo = ListMemo::new(g.vertex_count());
    let mut eval = Evaluator::new(g, lists, sigma, params, &mut memo);
    f(&mut eval)
}

/// `B_v ≡ |L_v| < L` (strict).
pub fn b_holds(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring, v: Vertex, params: &FlawParams) -> bool {
    with_evaluator(g, lists, sigma, params, |e| e.b_holds(v))
}

/// `Z_v ≡ Σ_{c ∈ L_v} |T_{v,c}| > L·|L_v| / 10` (triangle-free variant).
pub fn z_holds_tf(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring, v: Vertex, params: &FlawParams) -> bool {
    with_evaluator(g, lists, sigma, params, |e| e.z_holds_tf(v))
}

/// `Z_v ≡` at least `L` neighbours of `v` are Blank (clique-free variant).
pub fn z_holds_kr(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring, v: Vertex, params: &FlawParams) -> bool {
    with_evaluator(g, lists, sigma, params, |e| e.z_holds_kr(v))
}

pub fn flaw_holds(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring, f: Flaw, params: &FlawParams) -> bool {
    with_evaluator(g, lists, sigma, params, |e| e.holds(f))
}

/// The least holding flaw within the variant's radii of `v`
/// (triangle-free: B within 2, Z within 3; clique-free: B within 3, Z within 2).
pub fn least_flaw_in_range(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &PartialColoring,
    v: Vertex,
    params: &FlawParams,
) -> Option<Flaw> {
    let ball = g.ball(v, 3);
    with_evaluator(g, lists, sigma, params, |e| e.least_in_ball(&ball))
}

/// Every holding flaw, in flaw order.
pub fn all_flaws(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring, params: &FlawParams) -> Vec<Flaw> {
    with_evaluator(g, lists, sigma, params, |e| {
        let n = e.g.vertex_count();
        let mut out: Vec<Flaw> = (0..n).filter(|&v| e.b_holds(v)).map(Flaw::b).collect();
        out.extend((0..n).filter(|&v| e.z_holds(v)).map(Flaw::z));
        out
    })
}
