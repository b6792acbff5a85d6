//! Run configuration and the default parameter formulas.
//!
//! Triangle-free: `q = ⌈(1+ε)Δ/ln Δ⌉`, `L = Δ^{ε/2}`.
//! Clique-free: `q = ⌈200r·Δ·ln ln Δ/ln Δ⌉`, `L = Δ^{9/10}`.
//! Explicit `q` and `L` always win over the formulas.

use std::path::PathBuf;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color_set::{Color, ColorSet};
use crate::coloring::ListAssignment;
use crate::fix::{CheckLevel, FixParams};
use crate::flaw::{FlawParams, FlawParamsError, Variant};
use crate::generators::{generate, GeneratorError, GeneratorSpec};
use crate::graph::Graph;
use crate::io::{self, GraphFormat, IoError};
use crate::rng;
use crate::transcript::TranscriptMode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("maximum degree {delta} is too small for the default {what} formula; pass explicit --q and --L")]
    DegreeTooSmall { delta: usize, what: &'static str },
    #[error("q must be at least 1")]
    ZeroQ,
    #[error("list size q = {q} exceeds the palette size {palette}")]
    QExceedsPalette { q: usize, palette: usize },
    #[error("lists cover {got} vertices but the graph has {expected}")]
    ListsMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Params(#[from] FlawParamsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSource {
    File { path: PathBuf, format: Option<GraphFormat> },
    Generator { spec: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ListsSource {
    File { path: PathBuf },
    /// Every vertex gets a `q`-subset of `0..palette` (the whole palette
    /// when `q = palette`, otherwise a seeded uniform subset).
    Uniform { palette: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub graph: GraphSource,
    pub lists: ListsSource,
    pub variant: Variant,
    pub epsilon: f64,
    pub r: usize,
    /// Overrides the list-size formula.
    pub q: Option<usize>,
    /// Overrides the threshold formula (`L`).
    pub threshold: Option<f64>,
    pub seed: u64,
    /// Recolourings per top-level call; default `2n`.
    pub max_executions: Option<usize>,
    pub retry_budget: usize,
    pub enumeration_budget: u64,
    pub pca_budget: u64,
    pub transcript_mode: TranscriptMode,
    pub check_level: CheckLevel,
    pub completion_cap: Option<usize>,
}

impl RunConfig {
    pub fn new(graph: GraphSource, lists: ListsSource) -> Self {
        Self {
            graph,
            lists,
            variant: Variant::TriangleFree,
            epsilon: 0.5,
            r: 4,
            q: None,
            threshold: None,
            seed: 0,
            max_executions: None,
            retry_budget: 3,
            enumeration_budget: 1 << 20,
            pca_budget: 1 << 40,
            transcript_mode: TranscriptMode::Raw,
            check_level: CheckLevel::TopLevel,
            completion_cap: None,
        }
    }

    pub fn load_graph(&self) -> Result<Graph, ConfigError> {
        Ok(match &self.graph {
            GraphSource::File { path, format } => io::read_graph(path, *format)?,
            GraphSource::Generator { spec } => {
                let spec: GeneratorSpec = spec.parse()?;
                generate(&spec, self.seed)?
            }
        })
    }

    pub fn load_lists(&self, g: &Graph, q: usize) -> Result<ListAssignment, ConfigError> {
        let n = g.vertex_count();
        let lists = match &self.lists {
            ListsSource::File { path } => io::parse_lists(&io::read_to_string(path)?, n)?,
            ListsSource::Uniform { palette } => uniform_lists(n, q, palette.unwrap_or(q), self.seed)?,
        };
        if lists.vertex_count() != n {
            return Err(ConfigError::ListsMismatch {
                got: lists.vertex_count(),
                expected: n,
            });
        }
        Ok(lists)
    }
}

/// `q`-subsets of `0..palette`, drawn on the `lists` stream.
pub fn uniform_lists(n: usize, q: usize, palette: usize, seed: u64) -> Result<ListAssignment, ConfigError> {
    if q == 0 {
        return Err(ConfigError::ZeroQ);
    }
    if q > palette {
        return Err(ConfigError::QExceedsPalette { q, palette });
    }
    if q == palette {
        return Ok(ListAssignment::uniform(n, q));
    }
    let mut rng = rng::stream(seed, rng::LISTS, 0);
    let sets = (0..n)
        .map(|_| sample(&mut rng, palette, q).into_iter().map(|c| c as Color).collect::<ColorSet>())
        .collect();
    Ok(ListAssignment::new(palette, sets).expect("subsets of the palette"))
}

pub fn formula_q_triangle_free(delta: usize, epsilon: f64) -> Option<usize> {
    let d = delta as f64;
    (delta >= 2).then(|| ((1.0 + epsilon) * d / d.ln()).ceil() as usize)
}

pub fn formula_threshold_triangle_free(delta: usize, epsilon: f64) -> Option<f64> {
    (delta >= 2).then(|| (delta as f64).powf(epsilon / 2.0))
}

/// Needs `ln ln Δ > 0`, i.e. `Δ ≥ 3`.
pub fn formula_q_clique_free(delta: usize, r: usize) -> Option<usize> {
    let d = delta as f64;
    (delta >= 3).then(|| (200.0 * r as f64 * d * d.ln().ln() / d.ln()).ceil() as usize)
}

pub fn formula_threshold_clique_free(delta: usize) -> Option<f64> {
    (delta >= 2).then(|| (delta as f64).powf(0.9))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub params: FixParams,
    pub delta: usize,
    pub q: usize,
    pub threshold: f64,
    pub q_from_formula: bool,
    pub threshold_from_formula: bool,
    pub warnings: Vec<String>,
}

impl Resolved {
    /// One line per derived value, for logging.
    pub fn describe(&self) -> Vec<String> {
        let src = |f: bool| if f { "formula" } else { "override" };
        let fp = &self.params.flaw_params;
        let mut out = vec![
            format!("variant = {:?}", fp.variant),
            format!("max degree = {}", self.delta),
            format!("q = {} ({})", self.q, src(self.q_from_formula)),
            format!("L = {} ({})", self.threshold, src(self.threshold_from_formula)),
            format!("epsilon = {}, r = {}", fp.epsilon, fp.r),
            format!("seed = {}", self.params.seed),
            format!("execution cap per top-level call = {}", self.params.max_executions),
        ];
        out.extend(self.warnings.iter().map(|w| format!("warning: {w}")));
        out
    }
}

/// Fills in `q` and `L` for `g` and assembles [`FixParams`]. `list_size`
/// is the size of lists read from a file, used for `q` when there is no
/// override.
pub fn resolve_params(config: &RunConfig, g: &Graph, list_size: Option<usize>) -> Result<Resolved, ConfigError> {
    let delta = g.max_degree();
    let mut warnings = Vec::new();
    let (q, q_from_formula) = match (config.q, list_size) {
        (Some(q), _) => (q, false),
        (None, Some(q)) => (q, false),
        (None, None) => {
            let q = match config.variant {
                Variant::TriangleFree => formula_q_triangle_free(delta, config.epsilon),
                Variant::CliqueFree => formula_q_clique_free(delta, config.r),
            };
            (q.ok_or(ConfigError::DegreeTooSmall { delta, what: "q" })?, true)
        }
    };
    if q == 0 {
        return Err(ConfigError::ZeroQ);
    }
    let (threshold, threshold_from_formula) = match config.threshold {
        Some(l) => (l, false),
        None => {
            let l = match config.variant {
                Variant::TriangleFree => formula_threshold_triangle_free(delta, config.epsilon),
                Variant::CliqueFree => formula_threshold_clique_free(delta),
            };
            (l.ok_or(ConfigError::DegreeTooSmall { delta, what: "L" })?, true)
        }
    };
    let mut fp = match config.variant {
        Variant::TriangleFree => FlawParams::triangle_free(threshold),
        Variant::CliqueFree => FlawParams::clique_free(threshold, config.r),
    };
    fp.epsilon = config.epsilon;
    fp.validate()?;
    if config.variant == Variant::CliqueFree {
        let d = delta as f64;
        let limit = d.ln() / (200.0 * d.ln().ln());
        if !limit.is_finite() || config.r as f64 >= limit {
            warnings.push(format!(
                "r = {} is not below ln Δ / (200 ln ln Δ) = {limit:.4}; the colour bound is trivial here",
                config.r
            ));
        }
    }
    let n = g.vertex_count();
    let mut params = FixParams::new(q, fp, n);
    params.seed = config.seed;
    if let Some(cap) = config.max_executions {
        params.max_executions = cap;
    }
    params.retry_budget = config.retry_budget;
    params.enumeration_budget = config.enumeration_budget as u128;
    params.pca_budget = config.pca_budget as u128;
    params.transcript_mode = config.transcript_mode;
    params.check_level = config.check_level;
    params.completion_cap = config.completion_cap;
    Ok(Resolved {
        params,
        delta,
        q,
        threshold,
        q_from_formula,
        threshold_from_formula,
        warnings,
    })
}
