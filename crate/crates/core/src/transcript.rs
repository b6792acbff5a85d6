//! Transcripts of repair calls and exact reconstruction of a run from its
//! final colouring.
//!
//! A call on flaw `f` writes, in order: the pre-recolouring colours of
//! `N_{v(f)}`; for each nested call, `FixCall` (kind, and the 1-based
//! position of the callee's vertex in `N³` of the caller's vertex) followed
//! by the callee's records; finally `Return`. A single-step call therefore
//! reads `[Colours, Return]`.
//!
//! Colours are recorded raw, or compressed to their 1-based rank among the
//! flawed colourings of `N_v` (lexicographic in vertex label, then colour,
//! Blank last). The lists used for that enumeration do not change during
//! the step, which is what makes the backward pass possible.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color_set::Color;
use crate::coloring::{ListAssignment, PartialColoring};
use crate::flaw::{Flaw, FlawKind, FlawParams, Variant};
use crate::graph::{Graph, GraphError, Vertex};
use crate::neighborhood::Neighborhood;
use crate::pca::PcaSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TranscriptMode {
    #[default]
    Raw,
    Compressed,
    Off,
}

impl std::str::FromStr for TranscriptMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(Self::Raw),
            "compressed" => Ok(Self::Compressed),
            "off" => Ok(Self::Off),
            other => Err(format!("unknown transcript mode '{other}' (raw|compressed|off)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Record {
    Colours(Colours),
    FixCall { kind: FlawKind, ell: usize },
    Return,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Colours {
    Raw(Vec<Option<Color>>),
    /// 1-based rank among the flawed colourings of the neighbourhood.
    Index(#[serde(with = "decimal")] u128),
}

/// Ranks can exceed what JSON numbers carry exactly, so they travel as
/// decimal strings.
mod decimal {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub flaw: Flaw,
    pub executions: usize,
    pub variant: Variant,
}

/// The records of one top-level call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallTranscript {
    pub header: Header,
    pub records: Vec<Record>,
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("malformed transcript: {0}")]
    Malformed(String),
    #[error("transcript line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("step {step}: {reason}")]
    Inconsistent { step: usize, reason: String },
    #[error("reconstructed initial colouring differs from the given one at vertex {0}")]
    InitialMismatch(Vertex),
    #[error("compressed index {ell} out of range ({count} flawed colourings)")]
    IndexOutOfRange { ell: u128, count: u128 },
    #[error("flawed-colouring enumeration needs {size} > budget {budget}")]
    BudgetExceeded { size: u128, budget: u128 },
    #[error("colouring does not exhibit the flaw being fixed")]
    NotFlawed,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename = "header")]
struct HeaderLine {
    flaw: Flaw,
    executions: usize,
    variant: Variant,
}

impl CallTranscript {
    pub fn step_count(&self) -> usize {
        self.records.iter().filter(|r| matches!(r, Record::Colours(_))).count()
    }

    /// Checks nesting and the execution count.
    pub fn validate(&self) -> Result<(), TranscriptError> {
        let mut depth = 0usize;
        let mut expect_colours = true;
        for (i, r) in self.records.iter().enumerate() {
            match r {
                Record::Colours(_) if expect_colours => expect_colours = false,
                Record::Colours(_) => {
                    return Err(TranscriptError::Malformed(format!(
                        "record {i}: colours without a preceding call"
                    )))
                }
                _ if expect_colours => {
                    return Err(TranscriptError::Malformed(format!("record {i}: expected colours")))
                }
                Record::FixCall { ell, .. } => {
                    if *ell == 0 {
                        return Err(TranscriptError::Malformed(format!("record {i}: ell must be >= 1")));
                    }
                    depth += 1;
                    expect_colours = true;
                }
                Record::Return => {
                    if depth == 0 && i + 1 != self.records.len() {
                        return Err(TranscriptError::Malformed(format!(
                            "record {i}: return closes the top-level call early"
                        )));
                    }
                    depth = depth.wrapping_sub(1);
                }
            }
        }
        if depth != usize::MAX || expect_colours {
            return Err(TranscriptError::Malformed("calls and returns do not balance".into()));
        }
        if self.step_count() != self.header.executions {
            return Err(TranscriptError::Malformed(format!(
                "header claims {} executions, found {}",
                self.header.executions,
                self.step_count()
            )));
        }
        Ok(())
    }

    /// The flaw fixed at each step, from the call/return nesting alone.
    pub fn flaw_sequence(&self, g: &Graph) -> Result<Vec<Flaw>, TranscriptError> {
        self.validate()?;
        let mut stack = vec![self.header.flaw];
        let mut flaws = vec![self.header.flaw];
        for r in &self.records[1..] {
            match r {
                Record::FixCall { kind, ell } => {
                    let caller = stack.last().expect("validated nesting").vertex;
                    let f = Flaw {
                        kind: *kind,
                        vertex: g.omega(caller, *ell)?,
                    };
                    stack.push(f);
                    flaws.push(f);
                }
                Record::Return => {
                    stack.pop();
                }
                Record::Colours(_) => {}
            }
        }
        Ok(flaws)
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), TranscriptError> {
        let header = HeaderLine {
            flaw: self.header.flaw,
            executions: self.header.executions,
            variant: self.header.variant,
        };
        writeln!(out, "{}", serde_json::to_string(&header).expect("serialisable"))?;
        for r in &self.records {
            writeln!(out, "{}", serde_json::to_string(r).expect("serialisable"))?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    /// Size of the JSONL serialisation in bits.
    pub fn serialized_bits(&self) -> u64 {
        self.to_jsonl().len() as u64 * 8
    }
}

/// Writes several call transcripts back to back, each starting with its header.
pub fn write_transcripts<W: Write>(calls: &[CallTranscript], mut out: W) -> Result<(), TranscriptError> {
    for c in calls {
        c.write_jsonl(&mut out)?;
    }
    Ok(())
}

pub fn read_transcripts<R: BufRead>(input: R) -> Result<Vec<CallTranscript>, TranscriptError> {
    let mut calls: Vec<CallTranscript> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|source| TranscriptError::Json { line: idx + 1, source })?;
        if value.get("type").and_then(|t| t.as_str()) == Some("header") {
            let h: HeaderLine =
                serde_json::from_value(value).map_err(|source| TranscriptError::Json { line: idx + 1, source })?;
            calls.push(CallTranscript {
                header: Header {
                    flaw: h.flaw,
                    executions: h.executions,
                    variant: h.variant,
                },
                records: Vec::new(),
            });
        } else {
            let r: Record =
                serde_json::from_value(value).map_err(|source| TranscriptError::Json { line: idx + 1, source })?;
            calls
                .last_mut()
                .ok_or_else(|| TranscriptError::Malformed(format!("line {}: record before any header", idx + 1)))?
                .records
                .push(r);
        }
    }
    Ok(calls)
}

/// The local model the recolouring at `v` draws from: available lists for
/// the triangle-free variant, external lists for the clique-free one.
pub fn step_neighborhood(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &PartialColoring,
    v: Vertex,
    variant: Variant,
) -> Neighborhood {
    match variant {
        Variant::TriangleFree => Neighborhood::around_available(g, lists, sigma, v),
        Variant::CliqueFree => Neighborhood::around_external(g, lists, sigma, v),
    }
}

fn check_budget(nb: &Neighborhood, budget: u128) -> Result<(), TranscriptError> {
    let size = nb.product_size().unwrap_or(u128::MAX);
    if size > budget {
        return Err(TranscriptError::BudgetExceeded { size, budget });
    }
    Ok(())
}

/// Calls `f` on each flawed colouring of `nb` in canonical order until it
/// returns `false`. Triangle-free: the product of the lists. Clique-free:
/// the partial colour assignments Ω.
fn for_each_flawed(
    nb: &Neighborhood,
    params: &FlawParams,
    budget: u128,
    mut f: impl FnMut(&[Option<Color>]) -> bool,
) -> Result<(), TranscriptError> {
    check_budget(nb, budget)?;
    match params.variant {
        Variant::TriangleFree => nb.for_each_product(|a| !nb.is_flawed(a, params) || f(a)),
        Variant::CliqueFree => {
            let mut space = PcaSpace::new(nb.clone(), usize::MAX, budget)
                .map_err(|_| TranscriptError::BudgetExceeded { size: u128::MAX, budget })?;
            for w in space
                .enumerate(budget)
                .map_err(|_| TranscriptError::BudgetExceeded { size: u128::MAX, budget })?
            {
                if nb.is_flawed(&w.assignment, params) && !f(&w.assignment) {
                    break;
                }
            }
        }
    }
    Ok(())
}

/// `|B(𝓛) ∪ Z(𝓛)|`.
pub fn flawed_count(nb: &Neighborhood, params: &FlawParams, budget: u128) -> Result<u128, TranscriptError> {
    let mut n = 0u128;
    for_each_flawed(nb, params, budget, |_| {
        n += 1;
        true
    })?;
    Ok(n)
}

/// 1-based rank of `assign` among the flawed colourings of `nb`.
pub fn compressed_colours_index(
    nb: &Neighborhood,
    assign: &[Option<Color>],
    params: &FlawParams,
    budget: u128,
) -> Result<u128, TranscriptError> {
    let member = match params.variant {
        Variant::TriangleFree => nb.respects_lists(assign),
        Variant::CliqueFree => nb.is_partial_colour_assignment(assign),
    };
    if !member || !nb.is_flawed(assign, params) {
        return Err(TranscriptError::NotFlawed);
    }
    let mut rank = 0u128;
    let mut found = false;
    for_each_flawed(nb, params, budget, |a| {
        rank += 1;
        found = a == assign;
        !found
    })?;
    debug_assert!(found);
    Ok(rank)
}

/// Inverse of [`compressed_colours_index`].
pub fn compressed_colours_unrank(
    nb: &Neighborhood,
    ell: u128,
    params: &FlawParams,
    budget: u128,
) -> Result<Vec<Option<Color>>, TranscriptError> {
    let mut seen = 0u128;
    let mut out = None;
    for_each_flawed(nb, params, budget, |a| {
        seen += 1;
        if seen == ell {
            out = Some(a.to_vec());
            false
        } else {
            true
        }
    })?;
    out.ok_or(TranscriptError::IndexOutOfRange { ell, count: seen })
}

/// Result of running a transcript backwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    /// `f_1 … f_t`.
    pub flaws: Vec<Flaw>,
    /// `σ_0 … σ_{t-1}`: the colouring before each step.
    pub colorings: Vec<PartialColoring>,
}

/// Recovers every intermediate colouring of one top-level call from its
/// final colouring `sigma_t` and transcript, then checks the result against
/// `sigma_0` when given.
pub fn reconstruct(
    g: &Graph,
    lists: &ListAssignment,
    params: &FlawParams,
    sigma_0: Option<&PartialColoring>,
    transcript: &CallTranscript,
    sigma_t: &PartialColoring,
    budget: u128,
) -> Result<Reconstruction, TranscriptError> {
    let flaws = transcript.flaw_sequence(g)?;
    if sigma_t.len() != g.vertex_count() {
        return Err(TranscriptError::Inconsistent {
            step: flaws.len(),
            reason: format!("final colouring has {} entries for {} vertices", sigma_t.len(), g.vertex_count()),
        });
    }
    let colours: Vec<&Colours> = transcript
        .records
        .iter()
        .filter_map(|r| match r {
            Record::Colours(c) => Some(c),
            _ => None,
        })
        .collect();
    let t = flaws.len();
    let mut colorings = vec![PartialColoring::from_vec(Vec::new()); t];
    let mut sigma = sigma_t.clone();
    for i in (0..t).rev() {
        let v = flaws[i].vertex;
        let nb = step_neighborhood(g, lists, &sigma, v, params.variant);
        let before = match colours[i] {
            Colours::Raw(raw) => {
                if raw.len() != nb.len() {
                    return Err(TranscriptError::Inconsistent {
                        step: i + 1,
                        reason: format!("{} colours recorded for a neighbourhood of size {}", raw.len(), nb.len()),
                    });
                }
                raw.clone()
            }
            Colours::Index(ell) => compressed_colours_unrank(&nb, *ell, params, budget)?,
        };
        for (&u, &c) in nb.vertices.iter().zip(&before) {
            sigma.set(u, c);
        }
        colorings[i] = sigma.clone();
    }
    if let Some(s0) = sigma_0 {
        if let Some(v) = (0..g.vertex_count()).find(|&v| colorings.first().unwrap_or(sigma_t).get(v) != s0.get(v)) {
            return Err(TranscriptError::InitialMismatch(v));
        }
    }
    Ok(Reconstruction { flaws, colorings })
}

/// Runs a whole pipeline's transcripts backwards from the flaw-free
/// colouring, each call's initial colouring becoming the previous call's
/// final one, and checks that the first call started from `sigma_0`.
/// Results are in call order.
pub fn reconstruct_run(
    g: &Graph,
    lists: &ListAssignment,
    params: &FlawParams,
    sigma_0: &PartialColoring,
    calls: &[CallTranscript],
    flaw_free: &PartialColoring,
    budget: u128,
) -> Result<Vec<Reconstruction>, TranscriptError> {
    let mut out = Vec::with_capacity(calls.len());
    let mut sigma = flaw_free.clone();
    for call in calls.iter().rev() {
        let rec = reconstruct(g, lists, params, None, call, &sigma, budget)?;
        if let Some(first) = rec.colorings.first() {
            sigma = first.clone();
        }
        out.push(rec);
    }
    if let Some(v) = (0..g.vertex_count()).find(|&v| sigma.get(v) != sigma_0.get(v)) {
        return Err(TranscriptError::InitialMismatch(v));
    }
    out.reverse();
    Ok(out)
}

/// Compression accounting for one or more calls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub executions: usize,
    /// `Σ_i log2 Λ_i`: random bits consumed.
    pub lambda: f64,
    /// Size of the JSONL serialisation.
    pub transcript_bits: u64,
    /// Information content of the records: `log2` of each record's alphabet.
    pub encoded_bits: f64,
    /// `(lambda - encoded_bits) / executions`; 0 when nothing ran.
    pub margin_per_step: f64,
}

/// `lambda` is `Σ log2 Λ_i` as accumulated by the run; `alphabet_bits`
/// the per-record information content the run measured.
pub fn entropy_report(executions: usize, lambda: f64, calls: &[CallTranscript], encoded_bits: f64) -> EntropyReport {
    let transcript_bits = calls.iter().map(CallTranscript::serialized_bits).sum();
    EntropyReport {
        executions,
        lambda,
        transcript_bits,
        encoded_bits,
        margin_per_step: if executions == 0 {
            0.0
        } else {
            (lambda - encoded_bits) / executions as f64
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_step() -> CallTranscript {
        CallTranscript {
            header: Header {
                flaw: Flaw::b(0),
                executions: 1,
                variant: Variant::TriangleFree,
            },
            records: vec![Record::Colours(Colours::Raw(vec![None, Some(1)])), Record::Return],
        }
    }

    #[test]
    fn validation_accepts_nesting_and_rejects_garbage() {
        one_step().validate().unwrap();
        let mut t = one_step();
        t.records.push(Record::Return);
        assert!(t.validate().is_err());
        let mut t = one_step();
        t.header.executions = 2;
        assert!(t.validate().is_err());
        let nested = CallTranscript {
            header: Header {
                executions: 2,
                ..one_step().header
            },
            records: vec![
                Record::Colours(Colours::Raw(vec![])),
                Record::FixCall {
                    kind: FlawKind::Z,
                    ell: 2,
                },
                Record::Colours(Colours::Index(3)),
                Record::Return,
                Record::Return,
            ],
        };
        nested.validate().unwrap();
        let g = crate::generators::path(3);
        assert_eq!(nested.flaw_sequence(&g).unwrap(), vec![Flaw::b(0), Flaw::z(1)]);
    }

    #[test]
    fn jsonl_round_trip() {
        let mut calls = vec![one_step()];
        calls.push(CallTranscript {
            header: Header {
                flaw: Flaw::z(4),
                executions: 1,
                variant: Variant::CliqueFree,
            },
            records: vec![Record::Colours(Colours::Index(u128::MAX)), Record::Return],
        });
        let mut buf = Vec::new();
        write_transcripts(&calls, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().next().unwrap().contains("\"header\""));
        assert_eq!(read_transcripts(&buf[..]).unwrap(), calls);
        assert!(read_transcripts(&b"{\"type\":\"return\"}\n"[..]).is_err());
    }

    #[test]
    fn singleton_flawed_set_has_index_one() {
        // One neighbour with list {0}; C_v = {0}; L = 2. B_v holds only when
        // the neighbour takes 0, and one Blank neighbour is too few for Z_v.
        let nb = Neighborhood::from_parts([0].into_iter().collect(), vec![vec![0]], &[]);
        let params = FlawParams::clique_free(2.0, 4);
        assert_eq!(flawed_count(&nb, &params, 1000).unwrap(), 1);
        assert_eq!(compressed_colours_index(&nb, &[Some(0)], &params, 1000).unwrap(), 1);
        assert!(matches!(
            compressed_colours_index(&nb, &[None], &params, 1000),
            Err(TranscriptError::NotFlawed)
        ));
        assert_eq!(compressed_colours_unrank(&nb, 1, &params, 1000).unwrap(), vec![Some(0)]);
        assert!(compressed_colours_unrank(&nb, 2, &params, 1000).is_err());
    }

    #[test]
    fn empty_report() {
        let r = entropy_report(0, 0.0, &[], 0.0);
        assert_eq!(r.transcript_bits, 0);
        assert_eq!(r.margin_per_step, 0.0);
    }
}
