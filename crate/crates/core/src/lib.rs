//! List colouring by entropy compression: the repair procedures for
//! triangle-free and `K_r`-free graphs, their transcripts and exact
//! reconstruction, the completion phases, and a lab of exact and Monte
//! Carlo checks of the combinatorial and probabilistic facts they rely on.

pub mod analytics;
pub mod color_set;
pub mod coloring;
pub mod completion;
pub mod config;
pub mod fix;
pub mod flaw;
pub mod generators;
pub mod graph;
pub mod io;
pub mod neighborhood;
pub mod pca;
pub mod rng;
pub mod transcript;

pub use color_set::{Color, ColorSet};
pub use coloring::{ListAssignment, PartialColoring};
pub use flaw::{Flaw, FlawKind, FlawParams, Variant};
pub use graph::{Graph, Vertex};
