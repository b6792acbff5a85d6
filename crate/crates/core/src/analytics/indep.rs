//! Independent sets of small graphs: exact counts, the size distribution,
//! and the two counting bounds for `K_r`-free graphs (the `2^{n^{1/(r−1)}−1}`
//! lower bound on `I(H)` and the median-size bound).

use std::collections::HashMap;

use serde::Serialize;

use super::AnalyticsError;
use crate::graph::Graph;

/// Exact counting is limited to this many vertices.
pub const MAX_VERTICES: usize = 40;

/// A graph on at most 64 vertices as adjacency bitmasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallGraph {
    n: usize,
    adj: Vec<u64>,
}

impl SmallGraph {
    pub fn from_graph(g: &Graph) -> Result<Self, AnalyticsError> {
        let n = g.vertex_count();
        if n > 64 {
            return Err(AnalyticsError::TooManyVertices(n));
        }
        let adj = (0..n)
            .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u))
            .collect();
        Ok(Self { n, adj })
    }

    /// Bit `k` of `mask` is the `k`-th pair `(i, j)`, `i < j`, in
    /// lexicographic order.
    pub fn from_edge_mask(n: usize, mask: u64) -> Self {
        let mut adj = vec![0u64; n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if mask >> k & 1 == 1 {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
                k += 1;
            }
        }
        Self { n, adj }
    }

    /// Every labelled graph on `n ≤ 11` vertices.
    pub fn all(n: usize) -> impl Iterator<Item = SmallGraph> {
        assert!(n <= 11, "2^(n choose 2) graphs");
        let pairs = n * n.saturating_sub(1) / 2;
        (0..1u64 << pairs).map(move |m| Self::from_edge_mask(n, m))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    fn all_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn is_independent(&self, set: u64) -> bool {
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.adj[v] & set != 0 {
                return false;
            }
        }
        true
    }

    fn has_clique(&self, candidates: u64, k: usize) -> bool {
        if k == 0 {
            return true;
        }
        if (candidates.count_ones() as usize) < k {
            return false;
        }
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.has_clique(rest & self.adj[v], k - 1) {
                return true;
            }
        }
        false
    }

    /// No `r` pairwise adjacent vertices.
    pub fn is_kr_free(&self, r: usize) -> bool {
        !self.has_clique(self.all_mask(), r)
    }
}

fn check_size(h: &SmallGraph) -> Result<(), AnalyticsError> {
    if h.n > MAX_VERTICES {
        Err(AnalyticsError::TooManyVertices(h.n))
    } else {
        Ok(())
    }
}

/// Branch on the lowest vertex `v`: sets avoiding `v`, plus sets containing
/// it (which avoid `N(v)`). Large masks are memoised.
fn polynomial(h: &SmallGraph, mask: u64, memo: &mut HashMap<u64, Vec<u64>>) -> Vec<u64> {
    if mask == 0 {
        return vec![1];
    }
    let big = mask.count_ones() > 16;
    if big {
        if let Some(p) = memo.get(&mask) {
            return p.clone();
        }
    }
    let v = mask.trailing_zeros() as usize;
    let without = polynomial(h, mask & !(1 << v), memo);
    let with = polynomial(h, mask & !(1 << v) & !h.adj[v], memo);
    let mut out = vec![0u64; without.len().max(with.len() + 1)];
    for (i, c) in without.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in with.iter().enumerate() {
        out[i + 1] += c;
    }
    if big {
        memo.insert(mask, out.clone());
    }
    out
}

/// Coefficient `k` is the number of independent sets of size `k`.
pub fn independence_polynomial(h: &SmallGraph) -> Result<Vec<u64>, AnalyticsError> {
    check_size(h)?;
    Ok(polynomial(h, h.all_mask(), &mut HashMap::new()))
}

/// `I(H)`, the empty set included.
pub fn count_independent_sets(h: &SmallGraph) -> Result<u64, AnalyticsError> {
    Ok(independence_polynomial(h)?.iter().sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShearerCheck {
    pub vertices: usize,
    pub r: usize,
    pub count: u64,
    pub upper_holds: bool,
    pub lower_holds: bool,
    /// The lower bound was compared exactly (`n^{1/(r−1)}` is an integer).
    pub exact: bool,
}

impl ShearerCheck {
    pub fn holds(&self) -> bool {
        self.upper_holds && self.lower_holds
    }
}

/// Integer `k` with `k^e = n`, if any.
fn exact_root(n: usize, e: u32) -> Option<u64> {
    let guess = (n as f64).powf(1.0 / e as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|k| k.checked_pow(e) == Some(n as u64))
}

/// `2^n ≥ I(H) ≥ 2^{n^{1/(r−1)} − 1}` for `K_r`-free `H`.
pub fn check_shearer_count(h: &SmallGraph, r: usize) -> Result<ShearerCheck, AnalyticsError> {
    if r < 2 {
        return Err(AnalyticsError::InvalidR { r, min: 2 });
    }
    if !h.is_kr_free(r) {
        return Err(AnalyticsError::NotKrFree(r));
    }
    let count = count_independent_sets(h)?;
    let n = h.n;
    let upper_holds = n >= 64 || count <= 1u64 << n;
    let e = (r - 1) as u32;
    let (lower_holds, exact) = match exact_root(n, e) {
        // 2^{k−1} ≤ I; for k = 0 the bound is 1/2
        Some(0) => (true, true),
        Some(k) => (k - 1 >= 64 || count >= 1u64 << (k - 1), true),
        None => {
            let x = (n as f64).powf(1.0 / e as f64) - 1.0;
            ((count as f64).log2() >= x, false)
        }
    };
    Ok(ShearerCheck {
        vertices: n,
        r,
        count,
        upper_holds,
        lower_holds,
        exact,
    })
}

/// The largest `s` such that at least half of all independent sets have
/// size `≥ s`.
pub fn median_independent_set_size(h: &SmallGraph) -> Result<usize, AnalyticsError> {
    if h.n == 0 {
        return Err(AnalyticsError::EmptyGraph);
    }
    let poly = independence_polynomial(h)?;
    let total: u64 = poly.iter().sum();
    let mut at_least = 0u64;
    for s in (0..poly.len()).rev() {
        at_least += poly[s];
        if 2 * at_least >= total {
            return Ok(s);
        }
    }
    Ok(0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum LmuVerdict {
    Pass { median: usize, bound: f64 },
    Fail { median: usize, bound: f64 },
    /// `log2 I(H) ≤ 1`: the ratio is undefined and the claim is trivial.
    Vacuous,
}

impl LmuVerdict {
    pub fn failed(&self) -> bool {
        matches!(self, LmuVerdict::Fail { .. })
    }
}

/// Half of the independent sets of a `K_r`-free `H` (`r ≥ 4`) have size at
/// least `log2 I / (2r · log2 log2 I)`.
pub fn check_lmu(h: &SmallGraph, r: usize) -> Result<LmuVerdict, AnalyticsError> {
    if r < 4 {
        return Err(AnalyticsError::InvalidR { r, min: 4 });
    }
    if h.n == 0 {
        return Err(AnalyticsError::EmptyGraph);
    }
    if !h.is_kr_free(r) {
        return Err(AnalyticsError::NotKrFree(r));
    }
    let count = count_independent_sets(h)?;
    if count <= 2 {
        return Ok(LmuVerdict::Vacuous);
    }
    let x = (count as f64).log2();
    let bound = x / (2.0 * r as f64 * x.log2());
    let median = median_independent_set_size(h)?;
    Ok(if median as f64 >= bound {
        LmuVerdict::Pass { median, bound }
    } else {
        LmuVerdict::Fail { median, bound }
    })
}
