use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use listcolor::fix::CheckLevel;
use listcolor::io::GraphFormat;
use listcolor::transcript::TranscriptMode;
use listcolor::Variant;

/// List colouring of triangle-free and K_r-free graphs by entropy
/// compression. Every run prints its resolved configuration and seed to
/// stderr.
#[derive(Debug, Parser)]
#[command(name = "listcolor", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the repair procedure and completion; write the colouring as JSON.
    Color(ColorArgs),
    /// Check that a colouring is a proper list colouring.
    Verify(VerifyArgs),
    /// Print every flaw of a colouring as JSON lines {kind, vertex}.
    Flaws(FlawsArgs),
    /// Complete a flaw-free partial colouring.
    Complete(CompleteArgs),
    /// Recover every intermediate colouring from transcripts.
    Reconstruct(ReconstructArgs),
    /// Exact and Monte Carlo checks, as CSV plus a JSON summary.
    Lab(LabArgs),
    /// Search for the smallest q meeting a failure-rate target over seeded
    /// runs; reports execution counts and failures per q tried.
    Bench(BenchArgs),
    /// Write a generated graph.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    TriangleFree,
    CliqueFree,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::TriangleFree => Variant::TriangleFree,
            VariantArg::CliqueFree => Variant::CliqueFree,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckArg {
    Off,
    TopLevel,
    EveryFrame,
}

impl From<CheckArg> for CheckLevel {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::Off => CheckLevel::Off,
            CheckArg::TopLevel => CheckLevel::TopLevel,
            CheckArg::EveryFrame => CheckLevel::EveryFrame,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Raw,
    Compressed,
    Off,
}

impl From<ModeArg> for TranscriptMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Raw => TranscriptMode::Raw,
            ModeArg::Compressed => TranscriptMode::Compressed,
            ModeArg::Off => TranscriptMode::Off,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Dimacs,
    Edgelist,
}

impl From<FormatArg> for GraphFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Dimacs => GraphFormat::Dimacs,
            FormatArg::Edgelist => GraphFormat::EdgeList,
        }
    }
}

/// Where the graph and lists come from.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Graph file: DIMACS (.col, 1-based) or whitespace edge list (0-based).
    #[arg(long, conflicts_with = "gen")]
    pub graph: Option<PathBuf>,
    /// Graph file format [default: from the extension; .col is DIMACS].
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Generator spec, e.g. cycle:6, bipartite:500,500,0.03,
    /// regular-bipartite:500,32, random-multipartite:3,20,0.5.
    #[arg(long)]
    pub gen: Option<String>,
    /// Lists JSON file {"vertex": [colour, ...]}.
    #[arg(long, conflicts_with = "uniform_q")]
    pub lists: Option<PathBuf>,
    /// Give every vertex a list of this size (sets q).
    #[arg(long)]
    pub uniform_q: Option<usize>,
    /// Palette for uniform lists; lists are seeded random q-subsets when
    /// larger than q [default: q].
    #[arg(long)]
    pub palette: Option<usize>,
    /// Start from a saved configuration: a RunConfig JSON, or an output
    /// file with one embedded under "meta". Flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Which procedure and flaw rules to use [default: triangle-free].
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// ε in the triangle-free defaults [default: 0.5].
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Forbidden clique order for clique-free runs, at least 4 [default: 4].
    #[arg(long)]
    pub r: Option<usize>,
    /// List size [default: ⌈(1+ε)Δ/ln Δ⌉ triangle-free,
    /// ⌈200r·Δ·ln ln Δ/ln Δ⌉ clique-free].
    #[arg(long)]
    pub q: Option<usize>,
    /// Flaw threshold L [default: Δ^{ε/2} triangle-free, Δ^{9/10} clique-free].
    #[arg(long = "L")]
    pub threshold: Option<f64>,
    /// Master seed; sub-streams are derived per phase [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Recolourings allowed per top-level repair call [default: 2n].
    #[arg(long)]
    pub cap: Option<usize>,
    /// Fresh-seed retries of a top-level call that hits the cap [default: 3].
    #[arg(long)]
    pub retries: Option<usize>,
    /// Post-condition checks on repair calls [default: top-level].
    #[arg(long, value_enum)]
    pub check: Option<CheckArg>,
    /// Transcript encoding [default: raw].
    #[arg(long, value_enum)]
    pub transcript_mode: Option<ModeArg>,
    /// Resampling cap for completion [default: 100 × #Blank].
    #[arg(long)]
    pub completion_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ColorArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Output colouring JSON [default: stdout]. Relative paths are resolved
    /// against $LISTCOLOR_OUT_DIR when it is set.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Write the repair transcripts here as JSON lines.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Colouring JSON to check.
    pub coloring: PathBuf,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Accept Blank vertices (check a partial colouring).
    #[arg(long)]
    pub partial: bool,
}

#[derive(Debug, Args)]
pub struct FlawsArgs {
    /// Colouring JSON [default: all Blank].
    pub coloring: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Mt,
    Greedy,
}

#[derive(Debug, Args)]
pub struct CompleteArgs {
    /// Flaw-free partial colouring JSON.
    pub coloring: PathBuf,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Moser–Tardos resampling or greedy in label order.
    #[arg(long, value_enum, default_value = "mt")]
    pub method: MethodArg,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Transcript JSON lines written by `color --transcript`.
    #[arg(long)]
    pub transcript: PathBuf,
    /// The flaw-free colouring the transcripts end in; an output of `color`
    /// works (its meta carries it).
    #[arg(long = "final")]
    pub final_coloring: PathBuf,
    /// The colouring the first call started from [default: all Blank].
    #[arg(long)]
    pub initial: Option<PathBuf>,
    /// Write every reconstructed colouring here as JSON lines.
    #[arg(long)]
    pub states: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Args)]
pub struct LabArgs {
    #[command(subcommand)]
    pub verb: LabVerb,
    /// CSV output [default: stdout].
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// JSON summary [default: stderr].
    #[arg(long, global = true)]
    pub summary: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum LabVerb {
    /// Independent-set counts against 2^n ≥ I(H) ≥ 2^{n^{1/(r−1)}−1} and
    /// the median-size bound, over all graphs on up to --max-n vertices.
    Shearer {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// E|L_v|: exact formula vs enumeration, Monte Carlo and the lower
    /// bounds; lower tail Pr(|L_v| < E/2) vs e^{−E/8}.
    Lncv {
        #[arg(long, default_value_t = 20)]
        fixtures: usize,
        #[arg(long, default_value_t = 50)]
        degree: usize,
        #[arg(long, default_value_t = 30)]
        q: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Frequencies of B_v and Z_v after recolouring N_v, under independent
    /// draws and uniform partial colour assignments.
    Flawprob {
        #[arg(long, default_value_t = 10)]
        fixtures: usize,
        #[arg(long, default_value_t = 6)]
        degree: usize,
        #[arg(long, default_value_t = 4)]
        q: usize,
        #[arg(long = "L", default_value_t = 3.0)]
        threshold: f64,
        #[arg(long, default_value_t = 20_000)]
        trials: usize,
    },
    /// Exact negative correlation of the events "c leaves L_v", plus the
    /// urn example where the complements are not negatively correlated.
    Negcorr {
        #[arg(long, default_value_t = 50)]
        fixtures: usize,
        #[arg(long, default_value_t = 5)]
        degree: usize,
        #[arg(long, default_value_t = 6)]
        palette: usize,
    },
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub q_from: usize,
    #[arg(long)]
    pub q_to: usize,
    /// Step for --linear.
    #[arg(long, default_value_t = 1)]
    pub q_step: usize,
    /// Evaluate every q_step instead of binary searching for the threshold.
    #[arg(long)]
    pub linear: bool,
    /// Seeded runs per q.
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    /// Failure rate the reported threshold q must reach.
    #[arg(long, default_value_t = 0.5)]
    pub target: f64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Generator spec, e.g. regular-bipartite:500,32.
    #[arg(long)]
    pub gen: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "edgelist")]
    pub format: FormatArg,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn threshold_flag_is_capital_l() {
        let cli = Cli::try_parse_from(["listcolor", "color", "--gen", "cycle:4", "--L", "2.5"]).unwrap();
        let Command::Color(a) = cli.command else { panic!() };
        assert_eq!(a.params.threshold, Some(2.5));
    }

    #[test]
    fn graph_and_gen_conflict() {
        assert!(Cli::try_parse_from(["listcolor", "color", "--graph", "g.txt", "--gen", "cycle:4"]).is_err());
    }
}
