//! File formats: DIMACS `.col` and whitespace edge lists for graphs, JSON
//! for lists and colourings.
//!
//! Lists are `{"vertex": [colour, …]}` where colours are arbitrary JSON
//! scalars; they are mapped to dense ids in sorted order (numbers before
//! strings). The wrapped form `{"palette": [...], "lists": {...}}` pins the
//! palette explicitly and is what [`lists_to_json`] writes. Colourings are
//! `{"vertex": colour | null}` plus an optional `"meta"` object.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::color_set::{Color, ColorSet};
use crate::coloring::{ListAssignment, PartialColoring};
use crate::graph::{Graph, GraphError, Vertex};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}

pub fn read_to_string(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_string(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    Dimacs,
    EdgeList,
}

impl GraphFormat {
    /// `.col` and `.dimacs` are DIMACS; anything else is an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("col") | Some("dimacs") => GraphFormat::Dimacs,
            _ => GraphFormat::EdgeList,
        }
    }
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dimacs" | "col" => Ok(GraphFormat::Dimacs),
            "edgelist" | "edge-list" | "edges" => Ok(GraphFormat::EdgeList),
            other => Err(format!("unknown graph format '{other}' (dimacs|edgelist)")),
        }
    }
}

fn parse_index(tok: Option<&str>, line: usize, what: &str) -> Result<usize, IoError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("{what} '{tok}' is not a non-negative integer")))
}

/// `c` comments, one `p edge n m` header, `e u v` lines with 1-based ends.
pub fn parse_dimacs(text: &str) -> Result<Graph, IoError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut tok = raw.split_whitespace();
        match tok.next() {
            None | Some("c") => continue,
            Some("p") => {
                if n.is_some() {
                    return Err(parse_err(line, "second problem line"));
                }
                match tok.next() {
                    Some("edge") | Some("col") => {}
                    other => return Err(parse_err(line, format!("expected 'p edge', found {other:?}"))),
                }
                n = Some(parse_index(tok.next(), line, "vertex count")?);
                parse_index(tok.next(), line, "edge count")?;
            }
            Some("e") => {
                let n = n.ok_or_else(|| parse_err(line, "edge before the 'p edge' header"))?;
                let u = parse_index(tok.next(), line, "endpoint")?;
                let v = parse_index(tok.next(), line, "endpoint")?;
                for x in [u, v] {
                    if x == 0 || x > n {
                        return Err(parse_err(line, format!("vertex {x} outside 1..={n}")));
                    }
                }
                if u == v {
                    return Err(parse_err(line, format!("self-loop at vertex {u}")));
                }
                edges.push((u - 1, v - 1));
            }
            Some(other) => return Err(parse_err(line, format!("unknown line type '{other}'"))),
        }
        if tok.next().is_some() {
            return Err(parse_err(line, "trailing tokens"));
        }
    }
    let n = n.ok_or_else(|| IoError::Format("missing 'p edge n m' header".into()))?;
    Ok(Graph::new(n, &edges)?)
}

/// `u v` per line, 0-based. `#` starts a comment; a `# vertices N` comment
/// fixes the vertex count (otherwise it is one more than the largest index).
pub fn parse_edge_list(text: &str) -> Result<Graph, IoError> {
    let mut declared: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let (body, comment) = match raw.find('#') {
            Some(k) => (&raw[..k], Some(&raw[k + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            let mut tok = c.split_whitespace();
            if tok.next() == Some("vertices") {
                declared = Some((parse_index(tok.next(), line, "vertex count")?, line));
            }
        }
        let mut tok = body.split_whitespace();
        let Some(first) = tok.next() else { continue };
        let u = parse_index(Some(first), line, "endpoint")?;
        let v = parse_index(tok.next(), line, "endpoint")?;
        if tok.next().is_some() {
            return Err(parse_err(line, "trailing tokens"));
        }
        if u == v {
            return Err(parse_err(line, format!("self-loop at vertex {u}")));
        }
        edges.push((u, v, line));
    }
    let max = edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
    let n = match declared {
        Some((n, _)) => {
            if let Some(&(u, v, line)) = edges.iter().find(|&&(u, v, _)| u.max(v) >= n) {
                return Err(parse_err(line, format!("edge ({u}, {v}) outside the declared {n} vertices")));
            }
            n
        }
        None => max,
    };
    let pairs: Vec<_> = edges.into_iter().map(|(u, v, _)| (u, v)).collect();
    Ok(Graph::new(n, &pairs)?)
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Graph, IoError> {
    match format {
        GraphFormat::Dimacs => parse_dimacs(text),
        GraphFormat::EdgeList => parse_edge_list(text),
    }
}

pub fn read_graph(path: &Path, format: Option<GraphFormat>) -> Result<Graph, IoError> {
    let format = format.unwrap_or_else(|| GraphFormat::from_path(path));
    parse_graph(&read_to_string(path)?, format)
}

pub fn emit_dimacs(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    out
}

pub fn emit_edge_list(g: &Graph) -> String {
    let mut out = format!("# vertices {}\n", g.vertex_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn emit_graph(g: &Graph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Dimacs => emit_dimacs(g),
        GraphFormat::EdgeList => emit_edge_list(g),
    }
}

fn label_order(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            x.partial_cmp(&y).unwrap_or(Ordering::Equal)
        }
        (Value::Number(_), _) => Ordering::Less,
        (_, Value::Number(_)) => Ordering::Greater,
        (Value::String(x), Value::String(y)) => x.cmp(y),
        _ => a.to_string().cmp(&b.to_string()),
    }
}

fn vertex_key(key: &str, n: usize) -> Result<Vertex, IoError> {
    let v: Vertex = key
        .parse()
        .map_err(|_| IoError::Format(format!("vertex key '{key}' is not an index")))?;
    if v >= n {
        return Err(IoError::Format(format!("vertex {v} outside 0..{n}")));
    }
    Ok(v)
}

fn check_scalar(v: &Value) -> Result<(), IoError> {
    match v {
        Value::Number(_) | Value::String(_) => Ok(()),
        other => Err(IoError::Format(format!("colour {other} must be a number or a string"))),
    }
}

/// Lists for a graph on `n` vertices; every vertex must be present.
pub fn parse_lists(text: &str, n: usize) -> Result<ListAssignment, IoError> {
    let root: Value = serde_json::from_str(text)?;
    let obj = root
        .as_object()
        .ok_or_else(|| IoError::Format("lists file must be a JSON object".into()))?;
    let (palette, lists) = match (obj.get("palette"), obj.get("lists")) {
        (Some(Value::Array(p)), Some(Value::Object(l))) => (Some(p.clone()), l),
        _ => (None, obj),
    };
    let mut raw: Vec<Option<Vec<Value>>> = vec![None; n];
    for (key, val) in lists {
        let v = vertex_key(key, n)?;
        let arr = val
            .as_array()
            .ok_or_else(|| IoError::Format(format!("list of vertex {v} is not an array")))?;
        arr.iter().try_for_each(check_scalar)?;
        raw[v] = Some(arr.clone());
    }
    let palette = match palette {
        Some(p) => {
            p.iter().try_for_each(check_scalar)?;
            p
        }
        None => {
            let mut all: Vec<Value> = raw.iter().flatten().flatten().cloned().collect();
            all.sort_by(label_order);
            all.dedup();
            all
        }
    };
    let id_of = |c: &Value| palette.iter().position(|p| p == c);
    let mut sets = Vec::with_capacity(n);
    for (v, list) in raw.into_iter().enumerate() {
        let list = list.ok_or_else(|| IoError::Format(format!("no list for vertex {v}")))?;
        let mut set = ColorSet::with_capacity(palette.len());
        for c in &list {
            let id = id_of(c).ok_or_else(|| IoError::Format(format!("colour {c} of vertex {v} is not in the palette")))?;
            set.insert(id as Color);
        }
        sets.push(set);
    }
    let lists = ListAssignment::new(palette.len(), sets).map_err(|e| IoError::Format(e.to_string()))?;
    Ok(lists.with_labels(palette))
}

pub fn lists_to_json(lists: &ListAssignment) -> Value {
    let mut map = Map::new();
    for v in 0..lists.vertex_count() {
        let colours = lists.list(v).iter().map(|c| lists.label(c).clone()).collect();
        map.insert(v.to_string(), Value::Array(colours));
    }
    let mut root = Map::new();
    root.insert("palette".into(), Value::Array(lists.labels().to_vec()));
    root.insert("lists".into(), Value::Object(map));
    Value::Object(root)
}

/// `{"vertex": colour | null}`, colours written by label, with `meta`
/// attached when given.
pub fn coloring_to_json(lists: &ListAssignment, sigma: &PartialColoring, meta: Option<Value>) -> Value {
    let mut map = Map::new();
    for v in 0..sigma.len() {
        let c = sigma.get(v).map_or(Value::Null, |c| lists.label(c).clone());
        map.insert(v.to_string(), c);
    }
    if let Some(m) = meta {
        map.insert("meta".into(), m);
    }
    Value::Object(map)
}

/// Inverse of [`coloring_to_json`]; `meta` is ignored and missing vertices
/// are an error.
pub fn parse_coloring(text: &str, lists: &ListAssignment) -> Result<PartialColoring, IoError> {
    let root: Value = serde_json::from_str(text)?;
    let obj = root
        .as_object()
        .ok_or_else(|| IoError::Format("colouring file must be a JSON object".into()))?;
    let n = lists.vertex_count();
    let mut out: Vec<Option<Option<Color>>> = vec![None; n];
    for (key, val) in obj {
        if key == "meta" {
            continue;
        }
        let v = vertex_key(key, n)?;
        let c = match val {
            Value::Null => None,
            c => Some(
                lists
                    .labels()
                    .iter()
                    .position(|l| l == c)
                    .ok_or_else(|| IoError::Format(format!("colour {c} of vertex {v} is not in the palette")))?
                    as Color,
            ),
        };
        out[v] = Some(c);
    }
    let colors = out
        .into_iter()
        .enumerate()
        .map(|(v, c)| c.ok_or_else(|| IoError::Format(format!("no entry for vertex {v}"))))
        .collect::<Result<_, _>>()?;
    Ok(PartialColoring::from_vec(colors))
}

/// Stable pretty JSON with a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialise");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{path, petersen};

    #[test]
    fn dimacs_examples() {
        let g = parse_dimacs("p edge 3 2\ne 1 2\ne 2 3\n").unwrap();
        assert_eq!(g, path(3));
        let err = parse_dimacs("c hi\np edge 3 2\ne 1 4\n").unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 3, .. }), "{err}");
        assert!(matches!(parse_dimacs("e 1 2\n"), Err(IoError::Parse { line: 1, .. })));
        assert!(matches!(parse_dimacs("p edge 2 1\ne 1 x\n"), Err(IoError::Parse { line: 2, .. })));
    }

    #[test]
    fn edge_list_examples() {
        assert_eq!(parse_edge_list("0 1\n1 2").unwrap(), path(3));
        let g = parse_edge_list("# vertices 5\n0 1\n").unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert!(matches!(parse_edge_list("# vertices 2\n0 3\n"), Err(IoError::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("0 1 2\n"), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn graph_round_trips() {
        for g in [petersen(), Graph::empty(4), path(2)] {
            assert_eq!(parse_dimacs(&emit_dimacs(&g)).unwrap(), g);
            assert_eq!(parse_edge_list(&emit_edge_list(&g)).unwrap(), g);
        }
    }

    #[test]
    fn lists_with_string_colours() {
        let l = parse_lists(r#"{"0": ["red", "blue"], "1": ["blue", 3]}"#, 2).unwrap();
        assert_eq!(l.palette_size(), 3);
        // numbers sort before strings
        assert_eq!(l.labels(), &[Value::from(3), Value::from("blue"), Value::from("red")]);
        assert_eq!(l.list(1).to_vec(), vec![0, 1]);
        let back = parse_lists(&lists_to_json(&l).to_string(), 2).unwrap();
        assert_eq!(back, l);
        assert!(parse_lists(r#"{"0": ["a"]}"#, 2).is_err());
        assert!(parse_lists(r#"{"0": [[1]]}"#, 1).is_err());
    }

    #[test]
    fn coloring_round_trip() {
        let lists = ListAssignment::uniform(3, 2);
        let s = PartialColoring::from_vec(vec![Some(1), None, Some(0)]);
        let json = coloring_to_json(&lists, &s, Some(serde_json::json!({"seed": 1})));
        assert_eq!(json["1"], Value::Null);
        assert_eq!(parse_coloring(&json.to_string(), &lists).unwrap(), s);
        assert!(parse_coloring(r#"{"0": 0}"#, &lists).is_err());
        assert!(parse_coloring(r#"{"0": 0, "1": 7, "2": 0}"#, &lists).is_err());
    }
}
