//! Colour lists, partial colourings and the derived per-vertex quantities
//! `L_v`, `T_{v,c}` and `L*_u` that every flaw and recolouring step reads.
//!
//! `Blank` is a sentinel outside the colour-id space: a vertex coloured
//! Blank holds `None`, and Blank is implicitly a member of every available
//! list. It is never stored in a `C_v`.

use thiserror::Error;

use crate::color_set::{Color, ColorSet};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("no colour list for vertex {0}")]
    MissingList(Vertex),
    #[error("colour list of vertex {v} uses colour {color} outside the palette (size {palette})")]
    OutsidePalette { v: Vertex, color: Color, palette: usize },
    #[error("vertex {u} is not a neighbour of {v}")]
    NotNeighbor { u: Vertex, v: Vertex },
    #[error("colouring has {got} entries but the graph has {expected} vertices")]
    SizeMismatch { got: usize, expected: usize },
}

/// Per-vertex colour lists `C_v` over a dense palette `0..palette_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct ListAssignment {
    palette_size: usize,
    lists: Vec<ColorSet>,
    /// Declared list size; informational only.
    pub q: usize,
    /// External names of the colours, indexed by colour id.
    labels: Vec<serde_json::Value>,
}

impl ListAssignment {
    pub fn new(palette_size: usize, lists: Vec<ColorSet>) -> Result<Self, ColoringError> {
        for (v, list) in lists.iter().enumerate() {
            if let Some(color) = list.iter().find(|&c| c as usize >= palette_size) {
                return Err(ColoringError::OutsidePalette {
                    v,
                    color,
                    palette: palette_size,
                });
            }
        }
        let q = lists.iter().map(ColorSet::len).min().unwrap_or(0);
        let labels = (0..palette_size).map(|c| serde_json::Value::from(c as u64)).collect();
        Ok(Self {
            palette_size,
            lists,
            q,
            labels,
        })
    }

    /// Every vertex gets the whole palette `0..q`.
    pub fn uniform(n: usize, q: usize) -> Self {
        Self::new(q, vec![ColorSet::full(q); n]).expect("palette covers lists")
    }

    pub fn with_labels(mut self, labels: Vec<serde_json::Value>) -> Self {
        assert_eq!(labels.len(), self.palette_size, "one label per palette colour");
        self.labels = labels;
        self
    }

    pub fn palette_size(&self) -> usize {
        self.palette_size
    }

    pub fn vertex_count(&self) -> usize {
        self.lists.len()
    }

    /// `C_v`.
    #[inline]
    pub fn list(&self, v: Vertex) -> &ColorSet {
        &self.lists[v]
    }

    pub fn label(&self, c: Color) -> &serde_json::Value {
        &self.labels[c as usize]
    }

    pub fn labels(&self) -> &[serde_json::Value] {
        &self.labels
    }

    pub fn covers(&self, g: &Graph) -> Result<(), ColoringError> {
        if self.lists.len() < g.vertex_count() {
            return Err(ColoringError::MissingList(self.lists.len()));
        }
        Ok(())
    }
}

/// Vertex → colour-or-Blank. `None` is Blank.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialColoring {
    colors: Vec<Option<Color>>,
}

impl PartialColoring {
    pub fn from_vec(colors: Vec<Option<Color>>) -> Self {
        Self { colors }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> Option<Color> {
        self.colors[v]
    }

    #[inline]
    pub fn set(&mut self, v: Vertex, c: Option<Color>) {
        self.colors[v] = c;
    }

    #[inline]
    pub fn is_blank(&self, v: Vertex) -> bool {
        self.colors[v].is_none()
    }

    pub fn as_slice(&self) -> &[Option<Color>] {
        &self.colors
    }

    pub fn blank_count(&self) -> usize {
        self.colors.iter().filter(|c| c.is_none()).count()
    }

    pub fn blank_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.colors.iter().enumerate().filter(|(_, c)| c.is_none()).map(|(v, _)| v)
    }
}

/// The all-Blank colouring.
pub fn init_blank(g: &Graph, lists: &ListAssignment) -> Result<PartialColoring, ColoringError> {
    lists.covers(g)?;
    Ok(PartialColoring::from_vec(vec![None; g.vertex_count()]))
}

/// An available list: a set of non-Blank colours plus the implicit Blank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvailableList {
    colors: ColorSet,
}

impl AvailableList {
    pub fn from_colors(colors: ColorSet) -> Self {
        Self { colors }
    }

    /// Size including Blank; always at least 1.
    #[inline]
    pub fn len(&self) -> usize {
        self.colors.len() + 1
    }

    /// Never true: Blank is always available.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, c: Option<Color>) -> bool {
        match c {
            None => true,
            Some(c) => self.colors.contains(c),
        }
    }

    /// The list without Blank.
    #[inline]
    pub fn non_blank(&self) -> &ColorSet {
        &self.colors
    }

    pub fn into_non_blank(self) -> ColorSet {
        self.colors
    }

    /// Choice `k` in the canonical order: colours ascending, Blank last.
    pub fn choice(&self, k: usize) -> Option<Color> {
        if k >= self.colors.len() {
            None
        } else {
            self.colors.nth(k)
        }
    }
}

/// `L_v`: colours of `C_v` absent from `N_v`, plus Blank.
pub fn available_list(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring, v: Vertex) -> AvailableList {
    let mut colors = lists.list(v).clone();
    for &u in g.neighbors(v) {
        if let Some(c) = sigma.get(u) {
            colors.remove(c);
        }
    }
    AvailableList { colors }
}

/// `T_{v,c}`: Blank neighbours `u` of `v` with `c ∈ L_u`. Empty for `c = Blank`.
pub fn t_set(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &PartialColoring,
    v: Vertex,
    c: Option<Color>,
) -> Vec<Vertex> {
    let Some(c) = c else {
        return Vec::new();
    };
    g.neighbors(v)
        .iter()
        .copied()
        .filter(|&u| sigma.is_blank(u) && available_list(g, lists, sigma, u).contains(Some(c)))
        .collect()
}

/// `L*_u` for `u ∈ N_v`: colours of `C_u` not on any neighbour of `u`
/// outside `N_v`, plus Blank. Colours inside `N_v` are ignored; `v` itself
/// lies outside `N_v` and does count.
pub fn external_list(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &PartialColoring,
    v: Vertex,
    u: Vertex,
) -> Result<AvailableList, ColoringError> {
    let nv = g.neighbors(v);
    if nv.binary_search(&u).is_err() {
        return Err(ColoringError::NotNeighbor { u, v });
    }
    let mut colors = lists.list(u).clone();
    for &w in g.neighbors(u) {
        if nv.binary_search(&w).is_ok() {
            continue;
        }
        if let Some(c) = sigma.get(w) {
            colors.remove(c);
        }
    }
    Ok(AvailableList { colors })
}

/// Why a colouring fails to be a proper full list colouring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Blank(Vertex),
    OffList { v: Vertex, color: Color },
    Monochromatic { u: Vertex, v: Vertex, color: Color },
    SizeMismatch { got: usize, expected: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Blank(v) => write!(f, "vertex {v} is Blank"),
            Violation::OffList { v, color } => write!(f, "vertex {v} has colour {color} outside its list"),
            Violation::Monochromatic { u, v, color } => write!(f, "edge ({u}, {v}) is monochromatic in colour {color}"),
            Violation::SizeMismatch { got, expected } => {
                write!(f, "colouring covers {got} vertices, graph has {expected}")
            }
        }
    }
}

/// First violation in vertex order, then edge order.
pub fn find_violation(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring, allow_blank: bool) -> Option<Violation> {
    if sigma.len() != g.vertex_count() {
        return Some(Violation::SizeMismatch {
            got: sigma.len(),
            expected: g.vertex_count(),
        });
    }
    for v in 0..g.vertex_count() {
        match sigma.get(v) {
            None if !allow_blank => return Some(Violation::Blank(v)),
            Some(c) if !lists.list(v).contains(c) => return Some(Violation::OffList { v, color: c }),
            _ => {}
        }
    }
    g.edges().find_map(|(u, v)| match (sigma.get(u), sigma.get(v)) {
        (Some(a), Some(b)) if a == b => Some(Violation::Monochromatic { u, v, color: a }),
        _ => None,
    })
}

/// No Blank vertex, every colour from its list, no monochromatic edge.
pub fn is_proper_full(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring) -> bool {
    find_violation(g, lists, sigma, false).is_none()
}

/// Partial-colouring invariant: list colours only, and only Blank may repeat
/// across an edge.
pub fn is_proper_partial(g: &Graph, lists: &ListAssignment, sigma: &PartialColoring) -> bool {
    find_violation(g, lists, sigma, true).is_none()
}
