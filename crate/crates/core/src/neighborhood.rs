//! A frozen view of one neighbourhood `N_v`: the lists its vertices may draw
//! from, the anchor's own list `C_v`, and the edges inside `N_v`.
//!
//! Local assignments are slices indexed by position in `vertices`
//! (ascending labels); `None` is Blank. Per-vertex choices are ordered
//! colours ascending, Blank last, and product assignments are ranked
//! lexicographically with the first vertex most significant.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::color_set::{Color, ColorSet};
use crate::coloring::{available_list, external_list, ListAssignment, PartialColoring};
use crate::flaw::{FlawParams, Variant};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub anchor: Option<Vertex>,
    /// Labels of `N_v`, ascending.
    pub vertices: Vec<Vertex>,
    /// Non-Blank part of each vertex's list.
    pub lists: Vec<Vec<Color>>,
    /// `C_v`.
    pub own_list: ColorSet,
    /// Local adjacency inside `N_v` (indices into `vertices`), ascending.
    pub adjacency: Vec<Vec<usize>>,
}

impl Neighborhood {
    /// Lists are the current available lists `L_u` (triangle-free recolouring).
    pub fn around_available(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring, v: Vertex) -> Self {
        let vertices = g.neighbors(v).to_vec();
        let local = vertices
            .iter()
            .map(|&u| available_list(g, lists, sigma, u).non_blank().to_vec())
            .collect();
        Self::assemble(g, v, vertices, local, lists.list(v).clone())
    }

    /// Lists are the external lists `L*_u` (clique-free recolouring).
    pub fn around_external(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring, v: Vertex) -> Self {
        let vertices = g.neighbors(v).to_vec();
        let local = vertices
            .iter()
            .map(|&u| {
                external_list(g, lists, sigma, v, u)
                    .expect("u is a neighbour")
                    .non_blank()
                    .to_vec()
            })
            .collect();
        Self::assemble(g, v, vertices, local, lists.list(v).clone())
    }

    fn assemble(g: &Graph, v: Vertex, vertices: Vec<Vertex>, lists: Vec<Vec<Color>>, own_list: ColorSet) -> Self {
        let adjacency = vertices
            .iter()
            .map(|&u| {
                vertices
                    .iter()
                    .enumerate()
                    .filter(|&(_, &w)| g.has_edge(u, w))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        Self {
            anchor: Some(v),
            vertices,
            lists,
            own_list,
            adjacency,
        }
    }

    /// A detached model; vertices are labelled `0..lists.len()`.
    pub fn from_parts(own_list: ColorSet, lists: Vec<Vec<Color>>, edges: &[(usize, usize)]) -> Self {
        let k = lists.len();
        let mut adjacency = vec![Vec::new(); k];
        for &(a, b) in edges {
            assert!(a < k && b < k && a != b, "local edge out of range");
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
        }
        let lists = lists
            .into_iter()
            .map(|mut l| {
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        Self {
            anchor: None,
            vertices: (0..k).collect(),
            lists,
            own_list,
            adjacency,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `|L_u|` including Blank.
    pub fn list_len(&self, i: usize) -> usize {
        self.lists[i].len() + 1
    }

    /// Choice `k` of vertex `i`: colours ascending, then Blank.
    pub fn choice(&self, i: usize, k: usize) -> Option<Color> {
        self.lists[i].get(k).copied()
    }

    pub fn choice_index(&self, i: usize, c: Option<Color>) -> Option<usize> {
        match c {
            None => Some(self.lists[i].len()),
            Some(c) => self.lists[i].binary_search(&c).ok(),
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.iter().copied().filter(move |&j| i < j).map(move |j| (i, j)))
    }

    /// `Λ = ∏ |L_u|` when it fits in a `u128`.
    pub fn product_size(&self) -> Option<u128> {
        (0..self.len()).try_fold(1u128, |acc, i| acc.checked_mul(self.list_len(i) as u128))
    }

    pub fn product_size_big(&self) -> BigUint {
        (0..self.len()).fold(BigUint::one(), |acc, i| acc * BigUint::from(self.list_len(i)))
    }

    /// `log2 Λ`.
    pub fn product_log2(&self) -> f64 {
        (0..self.len()).map(|i| (self.list_len(i) as f64).log2()).sum()
    }

    /// The `x`-th product assignment (0-indexed, lexicographic).
    pub fn product_unrank(&self, mut x: u128) -> Vec<Option<Color>> {
        let mut out = vec![None; self.len()];
        for i in (0..self.len()).rev() {
            let base = self.list_len(i) as u128;
            out[i] = self.choice(i, (x % base) as usize);
            x /= base;
        }
        out
    }

    pub fn product_unrank_big(&self, x: &BigUint) -> Vec<Option<Color>> {
        let mut x = x.clone();
        let mut out = vec![None; self.len()];
        for i in (0..self.len()).rev() {
            let base = BigUint::from(self.list_len(i));
            let digit = (&x % &base).to_usize().expect("digit below base");
            out[i] = self.choice(i, digit);
            x /= base;
        }
        debug_assert!(x.is_zero());
        out
    }

    /// Calls `f` on every product assignment in lexicographic order; stops
    /// early when `f` returns `false`.
    pub fn for_each_product(&self, mut f: impl FnMut(&[Option<Color>]) -> bool) {
        let k = self.len();
        let mut digits = vec![0usize; k];
        let mut assign: Vec<Option<Color>> = (0..k).map(|i| self.choice(i, 0)).collect();
        loop {
            if !f(&assign) {
                return;
            }
            let mut i = k;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < self.list_len(i) {
                    assign[i] = self.choice(i, digits[i]);
                    break;
                }
                digits[i] = 0;
                assign[i] = self.choice(i, 0);
            }
        }
    }

    /// `|L_v|` (including Blank) once `N_v` is coloured by `assign`.
    pub fn available_len(&self, assign: &[Option<Color>]) -> usize {
        self.available_set(assign).len() + 1
    }

    pub fn available_set(&self, assign: &[Option<Color>]) -> ColorSet {
        let mut lv = self.own_list.clone();
        for c in assign.iter().flatten() {
            lv.remove(*c);
        }
        lv
    }

    /// `Σ_{c ∈ L_v} |T_{v,c}|` with the frozen lists standing in for `L_u`.
    pub fn t_mass(&self, assign: &[Option<Color>]) -> usize {
        let lv = self.available_set(assign);
        assign
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(i, _)| self.lists[i].iter().filter(|&&c| lv.contains(c)).count())
            .sum()
    }

    pub fn blank_count(assign: &[Option<Color>]) -> usize {
        assign.iter().filter(|c| c.is_none()).count()
    }

    pub fn b_holds(&self, assign: &[Option<Color>], threshold: f64) -> bool {
        (self.available_len(assign) as f64) < threshold
    }

    pub fn z_holds(&self, assign: &[Option<Color>], params: &FlawParams) -> bool {
        match params.variant {
            Variant::TriangleFree => {
                10.0 * self.t_mass(assign) as f64 > params.threshold * self.available_len(assign) as f64
            }
            Variant::CliqueFree => Self::blank_count(assign) as f64 >= params.threshold,
        }
    }

    /// Membership in `B(𝓛) ∪ Z(𝓛)`.
    pub fn is_flawed(&self, assign: &[Option<Color>], params: &FlawParams) -> bool {
        self.b_holds(assign, params.threshold) || self.z_holds(assign, params)
    }

    /// Local colours respect the lists and no edge inside `N_v` is
    /// monochromatic (Blank excepted).
    pub fn is_partial_colour_assignment(&self, assign: &[Option<Color>]) -> bool {
        assign.len() == self.len()
            && assign
                .iter()
                .enumerate()
                .all(|(i, c)| self.choice_index(i, *c).is_some())
            && self.edges().all(|(i, j)| assign[i].is_none() || assign[i] != assign[j])
    }

    /// Every colour in `assign` comes from its list; ignores edges.
    pub fn respects_lists(&self, assign: &[Option<Color>]) -> bool {
        assign.len() == self.len() && assign.iter().enumerate().all(|(i, c)| self.choice_index(i, *c).is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> Neighborhood {
        Neighborhood::from_parts([0, 1].into_iter().collect(), vec![vec![0, 1], vec![1], vec![0]], &[])
    }

    #[test]
    fn product_enumeration_is_lexicographic_and_matches_unrank() {
        let m = model();
        assert_eq!(m.product_size(), Some(3 * 2 * 2));
        let mut seen = Vec::new();
        m.for_each_product(|a| {
            seen.push(a.to_vec());
            true
        });
        assert_eq!(seen.len(), 12);
        assert_eq!(seen[0], vec![Some(0), Some(1), Some(0)]);
        assert_eq!(seen[1], vec![Some(0), Some(1), None]);
        assert_eq!(seen[11], vec![None, None, None]);
        for (x, a) in seen.iter().enumerate() {
            assert_eq!(&m.product_unrank(x as u128), a);
            assert_eq!(&m.product_unrank_big(&BigUint::from(x)), a);
        }
    }

    #[test]
    fn local_flaw_quantities() {
        let m = model();
        let all_blank = vec![None, None, None];
        assert_eq!(m.available_len(&all_blank), 3);
        // T mass: vertex 0 sees {0,1}, vertex 1 sees {1}, vertex 2 sees {0}
        assert_eq!(m.t_mass(&all_blank), 4);
        let a = vec![Some(1), None, Some(0)];
        assert_eq!(m.available_len(&a), 1);
        assert_eq!(m.t_mass(&a), 0);
        assert!(m.b_holds(&a, 2.0));
        assert!(!m.b_holds(&all_blank, 3.0));
    }

    #[test]
    fn graph_built_neighbourhood() {
        let g = crate::generators::star(3);
        let lists = ListAssignment::uniform(4, 2);
        let mut s = crate::coloring::init_blank(&g, &lists).unwrap();
        s.set(0, Some(1));
        let m = Neighborhood::around_available(&g, &lists, &s, 0);
        assert_eq!(m.vertices, vec![1, 2, 3]);
        assert!(m.lists.iter().all(|l| l == &vec![0]));
        let e = Neighborhood::around_external(&g, &lists, &s, 0);
        assert_eq!(e.lists, m.lists);
        assert_eq!(e.edges().count(), 0);
    }
}
