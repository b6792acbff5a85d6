//! Seeded fixture generators for triangle-free and `K_r`-free graphs.
//!
//! Every generator is a pure function of `(spec, seed)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use thiserror::Error;

use crate::graph::{Graph, Vertex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("malformed generator spec `{0}`")]
    Malformed(String),
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
}

/// Graph family descriptor. The textual form is `name:arg,arg,...`, for
/// example `bipartite:10,10,0.3` or `cycle:6`.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// `G(n1, n2, p)` bipartite graph; left side is `0..n1`.
    RandomBipartite { left: usize, right: usize, p: f64 },
    /// `d`-regular bipartite graph on `n + n` vertices (union of `d`
    /// edge-disjoint random perfect matchings).
    RandomRegularBipartite { n: usize, d: usize },
    /// `G(n, p)` followed by deleting one edge of each remaining triangle.
    EraseTriangles { n: usize, p: f64 },
    CompleteMultipartite { parts: Vec<usize> },
    /// `k` parts of `part_size` vertices, cross edges kept with probability `p`.
    /// `K_{k+1}`-free.
    RandomMultipartite { parts: usize, part_size: usize, p: f64 },
    Cycle { n: usize },
    Path { n: usize },
    Star { leaves: usize },
    Complete { n: usize },
    Empty { n: usize },
    Petersen,
}

impl GeneratorSpec {
    /// Structural promise of the family: `Some(k)` means every output is
    /// `K_{k+1}`-free (`k = 2` is triangle-free). `None` for families
    /// that may contain any clique.
    pub fn clique_bound(&self) -> Option<usize> {
        use GeneratorSpec::*;
        match self {
            RandomBipartite { .. } | RandomRegularBipartite { .. } | EraseTriangles { .. } => Some(2),
            Path { .. } | Star { .. } | Petersen => Some(2),
            Cycle { n } => Some(if *n == 3 { 3 } else { 2 }),
            CompleteMultipartite { parts } => Some(parts.iter().filter(|&&s| s > 0).count().max(1)),
            RandomMultipartite { parts, .. } => Some((*parts).max(1)),
            Empty { .. } => Some(1),
            Complete { n } => Some((*n).max(1)),
        }
    }
}

fn parse_args<T: FromStr>(name: &str, raw: &str, expected: usize) -> Result<Vec<T>, GeneratorError> {
    let vals: Result<Vec<T>, _> = raw.split(',').map(|s| s.trim().parse::<T>()).collect();
    match vals {
        Ok(v) if v.len() == expected || expected == 0 => Ok(v),
        _ => Err(GeneratorError::Malformed(format!("{name}:{raw}"))),
    }
}

impl FromStr for GeneratorSpec {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let malformed = || GeneratorError::Malformed(s.to_string());
        let two_usize_one_f64 = |args: &str| -> Result<(usize, usize, f64), GeneratorError> {
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(malformed());
            }
            Ok((
                parts[0].parse().map_err(|_| malformed())?,
                parts[1].parse().map_err(|_| malformed())?,
                parts[2].parse().map_err(|_| malformed())?,
            ))
        };
        let one = |args: &str| -> Result<usize, GeneratorError> { args.trim().parse().map_err(|_| malformed()) };
        let spec = match name {
            "bipartite" => {
                let (left, right, p) = two_usize_one_f64(args)?;
                GeneratorSpec::RandomBipartite { left, right, p }
            }
            "regular-bipartite" => {
                let v: Vec<usize> = parse_args(name, args, 2)?;
                GeneratorSpec::RandomRegularBipartite { n: v[0], d: v[1] }
            }
            "erase-triangles" => {
                let parts: Vec<&str> = args.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(malformed());
                }
                GeneratorSpec::EraseTriangles {
                    n: parts[0].parse().map_err(|_| malformed())?,
                    p: parts[1].parse().map_err(|_| malformed())?,
                }
            }
            "multipartite" => GeneratorSpec::CompleteMultipartite {
                parts: parse_args(name, args, 0)?,
            },
            "random-multipartite" => {
                let (parts, part_size, p) = two_usize_one_f64(args)?;
                GeneratorSpec::RandomMultipartite { parts, part_size, p }
            }
            "cycle" => GeneratorSpec::Cycle { n: one(args)? },
            "path" => GeneratorSpec::Path { n: one(args)? },
            "star" => GeneratorSpec::Star { leaves: one(args)? },
            "complete" => GeneratorSpec::Complete { n: one(args)? },
            "empty" => GeneratorSpec::Empty { n: one(args)? },
            "petersen" if args.is_empty() => GeneratorSpec::Petersen,
            _ => return Err(malformed()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GeneratorSpec::*;
        match self {
            RandomBipartite { left, right, p } => write!(f, "bipartite:{left},{right},{p}"),
            RandomRegularBipartite { n, d } => write!(f, "regular-bipartite:{n},{d}"),
            EraseTriangles { n, p } => write!(f, "erase-triangles:{n},{p}"),
            CompleteMultipartite { parts } => {
                let s: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "multipartite:{}", s.join(","))
            }
            RandomMultipartite { parts, part_size, p } => write!(f, "random-multipartite:{parts},{part_size},{p}"),
            Cycle { n } => write!(f, "cycle:{n}"),
            Path { n } => write!(f, "path:{n}"),
            Star { leaves } => write!(f, "star:{leaves}"),
            Complete { n } => write!(f, "complete:{n}"),
            Empty { n } => write!(f, "empty:{n}"),
            Petersen => write!(f, "petersen"),
        }
    }
}

impl GeneratorSpec {
    fn validate(&self) -> Result<(), GeneratorError> {
        use GeneratorSpec::*;
        let bad = |m: &str| Err(GeneratorError::InvalidParameters(m.to_string()));
        match self {
            RandomBipartite { p, .. } | EraseTriangles { p, .. } | RandomMultipartite { p, .. }
                if !(0.0..=1.0).contains(p) =>
            {
                bad("probability must lie in [0, 1]")
            }
            RandomRegularBipartite { n, d } if d > n => bad("degree exceeds side size"),
            _ => Ok(()),
        }
    }
}

/// Generates the graph described by `spec`, deterministically in `seed`.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Graph, GeneratorError> {
    use GeneratorSpec::*;
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = match spec {
        RandomBipartite { left, right, p } => {
            let mut edges = Vec::new();
            for u in 0..*left {
                for w in 0..*right {
                    if rng.gen_bool(*p) {
                        edges.push((u, left + w));
                    }
                }
            }
            Graph::new(left + right, &edges).expect("in range")
        }
        RandomRegularBipartite { n, d } => regular_bipartite(*n, *d, &mut rng)?,
        EraseTriangles { n, p } => erase_triangles(*n, *p, &mut rng),
        CompleteMultipartite { parts } => complete_multipartite(parts),
        RandomMultipartite { parts, part_size, p } => {
            let n = parts * part_size;
            let mut edges = Vec::new();
            for u in 0..n {
                for w in u + 1..n {
                    if u / part_size != w / part_size && rng.gen_bool(*p) {
                        edges.push((u, w));
                    }
                }
            }
            Graph::new(n, &edges).expect("in range")
        }
        Cycle { n } => cycle(*n),
        Path { n } => path(*n),
        Star { leaves } => star(*leaves),
        Complete { n } => complete(*n),
        Empty { n } => Graph::empty(*n),
        Petersen => petersen(),
    };
    Ok(graph)
}

fn regular_bipartite(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Graph, GeneratorError> {
    let mut used = vec![vec![false; n]; n];
    for _ in 0..d {
        // Start from a random perfect matching, keep its pairs that avoid
        // every edge already placed, and complete it with augmenting paths.
        // The unused pairs form a regular bipartite graph, so a perfect
        // matching always exists.
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let mut left_of: Vec<Option<usize>> = vec![None; n];
        let mut right_of: Vec<Option<usize>> = vec![None; n];
        for u in 0..n {
            if !used[u][perm[u]] {
                right_of[u] = Some(perm[u]);
                left_of[perm[u]] = Some(u);
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        for u in 0..n {
            if right_of[u].is_some() {
                continue;
            }
            let mut seen = vec![false; n];
            if !augment(u, &used, &order, &mut seen, &mut left_of, &mut right_of) {
                return Err(GeneratorError::InvalidParameters(format!(
                    "could not place an edge-disjoint matching for regular-bipartite:{n},{d}"
                )));
            }
        }
        for (u, w) in right_of.iter().enumerate() {
            used[u][w.expect("perfect matching")] = true;
        }
    }
    let edges: Vec<_> = used
        .iter()
        .enumerate()
        .flat_map(|(u, row)| row.iter().enumerate().filter(|(_, &x)| x).map(move |(w, _)| (u, n + w)))
        .collect();
    Ok(Graph::new(2 * n, &edges).expect("in range"))
}

/// Kuhn's augmenting path from left vertex `u` over unused pairs.
fn augment(
    u: usize,
    used: &[Vec<bool>],
    order: &[usize],
    seen: &mut [bool],
    left_of: &mut [Option<usize>],
    right_of: &mut [Option<usize>],
) -> bool {
    for &w in order {
        if used[u][w] || seen[w] {
            continue;
        }
        seen[w] = true;
        let free = match left_of[w] {
            None => true,
            Some(x) => augment(x, used, order, seen, left_of, right_of),
        };
        if free {
            left_of[w] = Some(u);
            right_of[u] = Some(w);
            return true;
        }
    }
    false
}

fn erase_triangles(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut adj: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for w in u + 1..n {
            if rng.gen_bool(p) {
                adj[u].insert(w);
                adj[w].insert(u);
            }
        }
    }
    // Scan edges in lexicographic order; each triangle found loses one of its
    // three edges, chosen uniformly. Repeat until a full pass is clean.
    loop {
        let mut changed = false;
        for u in 0..n {
            let higher: Vec<Vertex> = adj[u].range(u + 1..).copied().collect();
            for v in higher {
                if !adj[u].contains(&v) {
                    continue;
                }
                let common = adj[u].iter().find(|w| adj[v].contains(w)).copied();
                if let Some(w) = common {
                    let tri = [(u, v), (u, w), (v, w)];
                    let (a, b) = tri[rng.gen_range(0..3)];
                    adj[a].remove(&b);
                    adj[b].remove(&a);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let edges: Vec<_> = (0..n)
        .flat_map(|u| adj[u].range(u + 1..).map(move |&w| (u, w)).collect::<Vec<_>>())
        .collect();
    Graph::new(n, &edges).expect("in range")
}

pub fn cycle(n: usize) -> Graph {
    if n < 3 {
        return path(n);
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::new(n, &edges).expect("in range")
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::new(n, &edges).expect("in range")
}

/// `K_{1,leaves}` with centre 0.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    Graph::new(leaves + 1, &edges).expect("in range")
}

pub fn complete(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |w| (u, w))).collect();
    Graph::new(n, &edges).expect("in range")
}

pub fn complete_multipartite(parts: &[usize]) -> Graph {
    let mut part_of = Vec::new();
    for (i, &s) in parts.iter().enumerate() {
        part_of.extend(std::iter::repeat_n(i, s));
    }
    let n = part_of.len();
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |w| (u, w)))
        .filter(|&(u, w)| part_of[u] != part_of[w])
        .collect();
    Graph::new(n, &edges).expect("in range")
}

/// Outer 5-cycle `0..5`, inner pentagram `5..10`, spokes `i — i+5`.
pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
        edges.push((i, i + 5));
    }
    Graph::new(10, &edges).expect("in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "bipartite:10,10,0.3",
            "regular-bipartite:20,3",
            "erase-triangles:30,0.2",
            "multipartite:2,2,2",
            "random-multipartite:3,5,0.5",
            "cycle:6",
            "path:4",
            "star:3",
            "complete:4",
            "empty:3",
            "petersen",
        ] {
            let spec: GeneratorSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("cycle".parse::<GeneratorSpec>().is_err());
        assert!("bipartite:1,2".parse::<GeneratorSpec>().is_err());
        assert!("bipartite:1,2,1.5".parse::<GeneratorSpec>().is_err());
        assert!("wheel:5".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn documented_examples() {
        let c5 = generate(&"cycle:5".parse().unwrap(), 0).unwrap();
        assert_eq!(c5, cycle(5));
        assert_eq!(c5.edge_count(), 5);

        let bip = generate(&"bipartite:10,10,0.3".parse().unwrap(), 1).unwrap();
        assert!(bip.is_triangle_free());

        let mp = generate(&"random-multipartite:3,5,0.5".parse().unwrap(), 7).unwrap();
        assert!(mp.clique_number_at_most(3));
    }

    #[test]
    fn regular_bipartite_is_regular() {
        let g = generate(&GeneratorSpec::RandomRegularBipartite { n: 30, d: 5 }, 3).unwrap();
        assert!((0..60).all(|v| g.degree(v) == 5));
        assert!(g.is_triangle_free());
    }

    #[test]
    fn regular_bipartite_at_full_degree() {
        for seed in 0..5 {
            let g = generate(&GeneratorSpec::RandomRegularBipartite { n: 6, d: 6 }, seed).unwrap();
            assert_eq!(g.edge_count(), 36);
        }
        let g = generate(&GeneratorSpec::RandomRegularBipartite { n: 200, d: 32 }, 1).unwrap();
        assert!((0..400).all(|v| g.degree(v) == 32));
    }

    #[test]
    fn erase_triangles_output_is_triangle_free() {
        for seed in 0..5 {
            let g = generate(&GeneratorSpec::EraseTriangles { n: 40, p: 0.3 }, seed).unwrap();
            assert!(g.is_triangle_free());
            assert!(g.edge_count() > 0);
        }
    }

    #[test]
    fn reproducible_in_seed() {
        let spec: GeneratorSpec = "erase-triangles:25,0.25".parse().unwrap();
        assert_eq!(generate(&spec, 11).unwrap(), generate(&spec, 11).unwrap());
        assert_ne!(generate(&spec, 11).unwrap(), generate(&spec, 12).unwrap());
    }
}
