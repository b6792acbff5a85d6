//! Partial colour assignments to a neighbourhood: collections of disjoint
//! independent sets `(θ_1, …, θ_|C|)` inside `N_v`, where `u ∈ θ_i` needs
//! `i ∈ L*_u`. Vertices in no class are Blank.
//!
//! The set Ω of all such assignments is counted exactly by a frontier
//! dynamic program and ranked in the canonical order (vertices ascending,
//! colours ascending, Blank last), so uniform sampling is one draw from
//! `0..|Ω|` followed by unranking.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use thiserror::Error;

use crate::color_set::Color;
use crate::coloring::{ListAssignment, PartialColoring};
use crate::graph::{Graph, Vertex};
use crate::neighborhood::Neighborhood;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PcaError {
    #[error("enumeration budget exceeded: {size} > {budget}")]
    BudgetExceeded { size: u128, budget: u128 },
    #[error("colour {0} is not in the palette")]
    ColorNotInPalette(Color),
    #[error("assignment is not a member of Ω")]
    NotMember,
    #[error("vertex {vertex} has no admissible colour for the extension (need {needed}, have {available})")]
    NoAdmissibleColor { vertex: Vertex, needed: usize, available: usize },
}

/// One member of Ω. `assignment[i]` is the colour of the `i`-th vertex of
/// the neighbourhood (ascending labels), `None` for Blank.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialColourAssignment {
    pub assignment: Vec<Option<Color>>,
}

impl PartialColourAssignment {
    /// The colour classes `θ_i` as vertex labels; empty classes omitted.
    pub fn classes(&self, nb: &Neighborhood) -> BTreeMap<Color, Vec<Vertex>> {
        let mut out: BTreeMap<Color, Vec<Vertex>> = BTreeMap::new();
        for (i, c) in self.assignment.iter().enumerate() {
            if let Some(c) = c {
                out.entry(*c).or_default().push(nb.vertices[i]);
            }
        }
        out
    }

    pub fn blank_count(&self) -> usize {
        Neighborhood::blank_count(&self.assignment)
    }
}

/// Ω for one neighbourhood.
#[derive(Debug, Clone)]
pub struct PcaSpace {
    nb: Neighborhood,
    palette_size: usize,
    earlier: Vec<Vec<usize>>,
    frontier: Vec<Vec<usize>>,
    memo: HashMap<(usize, Vec<Option<Color>>), u128>,
}

/// Default ceiling on `∏ |L*_u|` for exact work.
pub const DEFAULT_BUDGET: u128 = 1 << 40;

impl PcaSpace {
    /// Fails when `∏ |L*_u|` exceeds `budget`.
    pub fn new(nb: Neighborhood, palette_size: usize, budget: u128) -> Result<Self, PcaError> {
        let size = nb.product_size().unwrap_or(u128::MAX);
        if size > budget {
            return Err(PcaError::BudgetExceeded { size, budget });
        }
        let k = nb.len();
        let earlier = (0..k)
            .map(|i| nb.adjacency[i].iter().copied().filter(|&j| j < i).collect())
            .collect();
        let frontier = (0..=k)
            .map(|i| {
                (0..i)
                    .filter(|&j| nb.adjacency[j].iter().any(|&x| x >= i))
                    .collect()
            })
            .collect();
        Ok(Self {
            nb,
            palette_size,
            earlier,
            frontier,
            memo: HashMap::new(),
        })
    }

    /// Ω around `v` under `sigma`, with lists `L*_u`.
    pub fn around(
        g: &Graph,
        lists: &ListAssignment,
        sigma: &PartialColoring,
        v: Vertex,
        budget: u128,
    ) -> Result<Self, PcaError> {
        let nb = Neighborhood::around_external(g, lists, sigma, v);
        Self::new(nb, lists.palette_size(), budget)
    }

    pub fn neighborhood(&self) -> &Neighborhood {
        &self.nb
    }

    fn admissible(&self, i: usize, c: Option<Color>, prefix: &[Option<Color>]) -> bool {
        match c {
            None => true,
            Some(_) => self.earlier[i].iter().all(|&j| prefix[j] != c),
        }
    }

    fn completions(&mut self, i: usize, prefix: &mut Vec<Option<Color>>) -> u128 {
        let k = self.nb.len();
        if i == k {
            return 1;
        }
        let key = (i, self.frontier[i].iter().map(|&j| prefix[j]).collect::<Vec<_>>());
        if let Some(&n) = self.memo.get(&key) {
            return n;
        }
        let mut total: u128 = 0;
        for choice in 0..self.nb.list_len(i) {
            let c = self.nb.choice(i, choice);
            if !self.admissible(i, c, prefix) {
                continue;
            }
            prefix.push(c);
            total += self.completions(i + 1, prefix);
            prefix.pop();
        }
        self.memo.insert(key, total);
        total
    }

    /// `|Ω|`.
    pub fn count(&mut self) -> u128 {
        self.completions(0, &mut Vec::new())
    }

    /// The `x`-th member of Ω (0-indexed, canonical order).
    pub fn unrank(&mut self, mut x: u128) -> Option<PartialColourAssignment> {
        if x >= self.count() {
            return None;
        }
        let mut prefix = Vec::with_capacity(self.nb.len());
        for i in 0..self.nb.len() {
            let mut chosen = false;
            for choice in 0..self.nb.list_len(i) {
                let c = self.nb.choice(i, choice);
                if !self.admissible(i, c, &prefix) {
                    continue;
                }
                prefix.push(c);
                let n = self.completions(i + 1, &mut prefix);
                if x < n {
                    chosen = true;
                    break;
                }
                x -= n;
                prefix.pop();
            }
            debug_assert!(chosen);
        }
        Some(PartialColourAssignment { assignment: prefix })
    }

    /// Position of `w` in the canonical order.
    pub fn rank(&mut self, w: &PartialColourAssignment) -> Result<u128, PcaError> {
        if !self.nb.is_partial_colour_assignment(&w.assignment) {
            return Err(PcaError::NotMember);
        }
        let mut x = 0;
        let mut prefix = Vec::with_capacity(self.nb.len());
        for i in 0..self.nb.len() {
            for choice in 0..self.nb.list_len(i) {
                let c = self.nb.choice(i, choice);
                if c == w.assignment[i] {
                    break;
                }
                if !self.admissible(i, c, &prefix) {
                    continue;
                }
                prefix.push(c);
                x += self.completions(i + 1, &mut prefix);
                prefix.pop();
            }
            prefix.push(w.assignment[i]);
        }
        Ok(x)
    }

    /// All of Ω in canonical order. Fails when `|Ω| > limit`.
    pub fn enumerate(&mut self, limit: u128) -> Result<Vec<PartialColourAssignment>, PcaError> {
        let size = self.count();
        if size > limit {
            return Err(PcaError::BudgetExceeded { size, budget: limit });
        }
        let mut out = Vec::with_capacity(size as usize);
        let mut prefix = Vec::new();
        self.enumerate_into(0, &mut prefix, &mut out);
        Ok(out)
    }

    fn enumerate_into(&self, i: usize, prefix: &mut Vec<Option<Color>>, out: &mut Vec<PartialColourAssignment>) {
        if i == self.nb.len() {
            out.push(PartialColourAssignment {
                assignment: prefix.clone(),
            });
            return;
        }
        for choice in 0..self.nb.list_len(i) {
            let c = self.nb.choice(i, choice);
            if self.admissible(i, c, prefix) {
                prefix.push(c);
                self.enumerate_into(i + 1, prefix, out);
                prefix.pop();
            }
        }
    }

    /// A uniform member of Ω: one draw from `0..|Ω|`, then unrank.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> PartialColourAssignment {
        let size = self.count();
        let x = rng.gen_range(0..size);
        self.unrank(x).expect("index below |Ω|")
    }

    /// `Q_i`: the members of `W_i` plus every Blank vertex that may take `i`.
    pub fn resample_support(&self, w: &PartialColourAssignment, color: Color) -> Vec<usize> {
        (0..self.nb.len())
            .filter(|&u| match w.assignment[u] {
                Some(c) => c == color,
                None => self.nb.lists[u].binary_search(&color).is_ok(),
            })
            .collect()
    }

    /// Every outcome of resampling class `color`, one per independent set of
    /// `G[Q_i]`; each is equally likely.
    pub fn resample_outcomes(
        &self,
        w: &PartialColourAssignment,
        color: Color,
    ) -> Result<Vec<PartialColourAssignment>, PcaError> {
        if color as usize >= self.palette_size {
            return Err(PcaError::ColorNotInPalette(color));
        }
        let q = self.resample_support(w, color);
        let mut base = w.clone();
        for &u in &q {
            base.assignment[u] = None;
        }
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        self.independent_sets(&q, 0, &mut chosen, &mut |set| {
            let mut next = base.clone();
            for &u in set {
                next.assignment[u] = Some(color);
            }
            out.push(next);
        });
        Ok(out)
    }

    fn independent_sets(&self, q: &[usize], from: usize, chosen: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
        emit(chosen);
        for idx in from..q.len() {
            let u = q[idx];
            if chosen.iter().all(|&x| self.nb.adjacency[u].binary_search(&x).is_err()) {
                chosen.push(u);
                self.independent_sets(q, idx + 1, chosen, emit);
                chosen.pop();
            }
        }
    }

    /// Replace `W_i` by a uniform independent set of `G[Q_i]`.
    pub fn resample_color_class<R: Rng + ?Sized>(
        &self,
        w: &PartialColourAssignment,
        color: Color,
        rng: &mut R,
    ) -> Result<PartialColourAssignment, PcaError> {
        let mut outcomes = self.resample_outcomes(w, color)?;
        let k = rng.gen_range(0..outcomes.len());
        Ok(outcomes.swap_remove(k))
    }

    /// Colours `u` may take given the rest of `w`: `L*_u` minus colours on
    /// its neighbours inside `N_v`.
    pub fn admissible_colors(&self, w: &PartialColourAssignment, u: usize) -> Vec<Color> {
        self.nb.lists[u]
            .iter()
            .copied()
            .filter(|&c| self.nb.adjacency[u].iter().all(|&x| w.assignment[x] != Some(c)))
            .collect()
    }

    /// Colour the Blank vertices `blanks` one at a time, the `t`-th taking
    /// its `choices[t]`-th admissible colour. Each blank must start with at
    /// least `blanks.len()` admissible colours.
    pub fn extend_blank_assignment(
        &self,
        w: &PartialColourAssignment,
        blanks: &[usize],
        choices: &[usize],
    ) -> Result<PartialColourAssignment, PcaError> {
        self.check_extension_precondition(w, blanks)?;
        let mut out = w.clone();
        for (t, &u) in blanks.iter().enumerate() {
            let adm = self.admissible_colors(&out, u);
            let pick = choices.get(t).copied().unwrap_or(0);
            match adm.get(pick) {
                Some(&c) => out.assignment[u] = Some(c),
                None => {
                    return Err(PcaError::NoAdmissibleColor {
                        vertex: self.nb.vertices[u],
                        needed: pick + 1,
                        available: adm.len(),
                    })
                }
            }
        }
        Ok(out)
    }

    fn check_extension_precondition(&self, w: &PartialColourAssignment, blanks: &[usize]) -> Result<(), PcaError> {
        for &u in blanks {
            let available = self.admissible_colors(w, u).len();
            if w.assignment[u].is_some() || available < blanks.len() {
                return Err(PcaError::NoAdmissibleColor {
                    vertex: self.nb.vertices[u],
                    needed: blanks.len(),
                    available,
                });
            }
        }
        Ok(())
    }

    /// Every extension reachable by [`Self::extend_blank_assignment`].
    pub fn all_extensions(
        &self,
        w: &PartialColourAssignment,
        blanks: &[usize],
    ) -> Result<Vec<PartialColourAssignment>, PcaError> {
        self.check_extension_precondition(w, blanks)?;
        let mut out = Vec::new();
        self.extend_all(w.clone(), blanks, &mut out);
        Ok(out)
    }

    fn extend_all(&self, w: PartialColourAssignment, blanks: &[usize], out: &mut Vec<PartialColourAssignment>) {
        let Some((&u, rest)) = blanks.split_first() else {
            out.push(w);
            return;
        };
        for c in self.admissible_colors(&w, u) {
            let mut next = w.clone();
            next.assignment[u] = Some(c);
            self.extend_all(next, rest, out);
        }
    }

    /// `Ω_B`: members where every vertex of `blanks` is Blank with at least
    /// `blanks.len()` admissible colours (so `|L_u| > blanks.len()`).
    pub fn omega_b(&mut self, blanks: &[usize], limit: u128) -> Result<Vec<PartialColourAssignment>, PcaError> {
        let all = self.enumerate(limit)?;
        Ok(all
            .into_iter()
            .filter(|w| {
                blanks
                    .iter()
                    .all(|&u| w.assignment[u].is_none() && self.admissible_colors(w, u).len() >= blanks.len())
            })
            .collect())
    }

    /// Lists respected and every colour class independent.
    pub fn is_member(&self, w: &PartialColourAssignment) -> bool {
        self.nb.is_partial_colour_assignment(&w.assignment)
    }
}

/// Ω around `v`, in canonical order.
pub fn enumerate_pca(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &PartialColoring,
    v: Vertex,
    budget: u128,
) -> Result<Vec<PartialColourAssignment>, PcaError> {
    PcaSpace::around(g, lists, sigma, v, budget)?.enumerate(budget)
}

/// A uniform member of Ω around `v`.
pub fn sample_pca_uniform<R: Rng + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &PartialColoring,
    v: Vertex,
    rng: &mut R,
    budget: u128,
) -> Result<PartialColourAssignment, PcaError> {
    Ok(PcaSpace::around(g, lists, sigma, v, budget)?.sample(rng))
}
