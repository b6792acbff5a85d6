//! Immutable labelled simple graphs with the radius-limited queries the
//! repair procedures need.
//!
//! Vertex labels are `0..n` and are fixed at construction; they define the
//! total order used for flaw ordering and for `ω(ℓ, v)` indexing.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    EndpointOutOfRange { u: Vertex, v: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("vertex {v} is not in the graph (n = {n})")]
    InvalidVertex { v: Vertex, n: usize },
    #[error("index {ell} outside 1..={len} for the radius-3 ball of vertex {v}")]
    OmegaOutOfRange { v: Vertex, ell: usize, len: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<Vertex>>,
    max_degree: usize,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.vertex_count())
            .field("m", &self.edge_count())
            .field("max_degree", &self.max_degree)
            .finish()
    }
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges (in either
    /// orientation) collapse to one.
    pub fn new(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::EndpointOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            adjacency,
            max_degree,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            max_degree: 0,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Δ, the maximum degree.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    /// The open neighbourhood `N_v`, ascending.
    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.vertex_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex {
                v,
                n: self.vertex_count(),
            })
        }
    }

    /// Every vertex within distance `d` of `v` (including `v`), paired with its
    /// distance, sorted by label.
    pub fn ball(&self, v: Vertex, d: usize) -> Vec<(Vertex, usize)> {
        let mut dist: HashMap<Vertex, usize> = HashMap::new();
        dist.insert(v, 0);
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[&x];
            if dx == d {
                continue;
            }
            for &y in &self.adjacency[x] {
                dist.entry(y).or_insert_with(|| {
                    queue.push_back(y);
                    dx + 1
                });
            }
        }
        let mut out: Vec<_> = dist.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// All `w` with `dist(w, v) ≤ d`, ascending by label; `v` is included.
    pub fn within_distance(&self, v: Vertex, d: usize) -> Result<Vec<Vertex>, GraphError> {
        self.check_vertex(v)?;
        Ok(self.ball(v, d).into_iter().map(|(w, _)| w).collect())
    }

    /// `ω(ℓ, v)`: the `ℓ`-th (1-indexed) vertex of the radius-3 ball of `v`.
    pub fn omega(&self, v: Vertex, ell: usize) -> Result<Vertex, GraphError> {
        let ball = self.within_distance(v, 3)?;
        if ell == 0 || ell > ball.len() {
            return Err(GraphError::OmegaOutOfRange {
                v,
                ell,
                len: ball.len(),
            });
        }
        Ok(ball[ell - 1])
    }

    pub fn is_triangle_free(&self) -> bool {
        self.edges().all(|(u, v)| !sorted_intersect(&self.adjacency[u], &self.adjacency[v]))
    }

    /// True iff the graph contains no clique on `r_minus_1 + 1` vertices.
    pub fn clique_number_at_most(&self, r_minus_1: usize) -> bool {
        let target = r_minus_1 + 1;
        if target <= 1 {
            return self.vertex_count() == 0;
        }
        if target == 2 {
            return self.edge_count() == 0;
        }
        if target == 3 {
            return self.is_triangle_free();
        }
        (0..self.vertex_count()).all(|v| {
            // Grow cliques upward in label order so each clique is found once.
            let cands: Vec<Vertex> = self.adjacency[v].iter().copied().filter(|&u| u > v).collect();
            !self.extend_clique(&cands, 1, target)
        })
    }

    /// Branch and bound: can `size` be grown to `target` using `cands`?
    fn extend_clique(&self, cands: &[Vertex], size: usize, target: usize) -> bool {
        if size == target {
            return true;
        }
        if size + cands.len() < target {
            return false;
        }
        for (i, &u) in cands.iter().enumerate() {
            if size + (cands.len() - i) < target {
                return false;
            }
            let next: Vec<Vertex> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&w| self.has_edge(u, w))
                .collect();
            if self.extend_clique(&next, size + 1, target) {
                return true;
            }
        }
        false
    }

    /// The subgraph induced by `vertices`, relabelled `0..k` in the given order.
    pub fn induced(&self, vertices: &[Vertex]) -> Graph {
        let pos: HashMap<Vertex, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adjacency[v] {
                if let Some(&j) = pos.get(&w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        Graph::new(vertices.len(), &edges).expect("induced edges are in range")
    }
}

fn sorted_intersect(a: &[Vertex], b: &[Vertex]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges).unwrap()
    }

    #[test]
    fn build_examples() {
        let g = Graph::new(3, &[]).unwrap();
        assert_eq!(g.max_degree(), 0);
        assert_eq!(g.edge_count(), 0);

        let g = path(3);
        assert_eq!(g.max_degree(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);

        let g = Graph::new(4, &[(0, 1), (0, 1), (2, 3)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        let g = Graph::new(4, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            Graph::new(3, &[(0, 3)]),
            Err(GraphError::EndpointOutOfRange { u: 0, v: 3, n: 3 })
        );
        assert_eq!(Graph::new(3, &[(1, 1)]), Err(GraphError::SelfLoop(1)));
    }

    #[test]
    fn within_distance_examples() {
        let g = path(4);
        assert_eq!(g.within_distance(0, 2).unwrap(), vec![0, 1, 2]);
        assert_eq!(g.within_distance(2, 0).unwrap(), vec![2]);
        let c6 = generators::cycle(6);
        assert_eq!(c6.within_distance(0, 3).unwrap(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(c6.within_distance(0, 2).unwrap(), vec![0, 1, 2, 4, 5]);
        assert!(matches!(g.within_distance(9, 1), Err(GraphError::InvalidVertex { .. })));
    }

    #[test]
    fn omega_examples() {
        let star = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.omega(0, 1).unwrap(), 0);
        assert_eq!(star.omega(0, 3).unwrap(), 2);
        let c6 = generators::cycle(6);
        assert_eq!(c6.omega(0, 4).unwrap(), 3);
        assert!(matches!(c6.omega(0, 0), Err(GraphError::OmegaOutOfRange { .. })));
        assert!(matches!(c6.omega(0, 7), Err(GraphError::OmegaOutOfRange { len: 6, .. })));
    }

    #[test]
    fn triangle_and_clique_checks() {
        assert!(generators::cycle(5).is_triangle_free());
        assert!(!generators::complete(3).is_triangle_free());
        assert!(generators::petersen().is_triangle_free());
        assert!(!generators::complete(4).clique_number_at_most(3));
        assert!(generators::complete(4).clique_number_at_most(4));
        assert!(generators::cycle(5).clique_number_at_most(2));
        let k222 = generators::complete_multipartite(&[2, 2, 2]);
        assert!(k222.clique_number_at_most(3));
        assert!(!k222.clique_number_at_most(2));
    }

    #[test]
    fn induced_subgraph_relabels() {
        let c6 = generators::cycle(6);
        let h = c6.induced(&[0, 1, 2, 4]);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }
}
