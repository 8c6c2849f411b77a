//! Structured support classes, membership validation, uniform sampling, and
//! set distances.
//!
//! Conventions used throughout the crate:
//! - signal components are indexed `1..=n`;
//! - star classes live on the edge set of the complete graph `K_p`, edges
//!   numbered lexicographically over vertex pairs `(u, v)`, `u < v`, u-major;
//! - submatrix components are numbered row-major, `comp(r, c) = (r-1)*n_c + c`.

use crate::error::{Error, Result};
use rand::seq::index::sample as sample_distinct;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Retries before uniform rejection sampling falls back to a deterministic
/// leftmost-greedy placement.
const REJECTION_RETRY_CAP: usize = 10_000;

/// A structured support class together with its dimension parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum SupportClass {
    /// Arbitrary subsets of `{1..n}` of size `s`.
    Sset { n: usize, s: usize },
    /// Unions of `k` disjoint intervals of `s` consecutive components.
    Intervals { n: usize, s: usize, k: usize },
    /// Unions of `k` vertex-disjoint s-stars in the complete graph `K_p`.
    Stars { p: usize, s: usize, k: usize },
    /// `s_r x s_c` submatrices of an `n_r x n_c` matrix.
    Submatrix {
        n_r: usize,
        n_c: usize,
        s_r: usize,
        s_c: usize,
    },
}

impl SupportClass {
    /// Ambient signal dimension `n` (edge count for stars, `n_r * n_c` for
    /// submatrices).
    pub fn ambient_n(&self) -> usize {
        match *self {
            SupportClass::Sset { n, .. } => n,
            SupportClass::Intervals { n, .. } => n,
            SupportClass::Stars { p, .. } => p * (p - 1) / 2,
            SupportClass::Submatrix { n_r, n_c, .. } => n_r * n_c,
        }
    }

    /// Number of active components of any member.
    pub fn sparsity(&self) -> usize {
        match *self {
            SupportClass::Sset { s, .. } => s,
            SupportClass::Intervals { s, k, .. } => s * k,
            SupportClass::Stars { s, k, .. } => s * k,
            SupportClass::Submatrix { s_r, s_c, .. } => s_r * s_c,
        }
    }

    /// Checks the class invariants.
    pub fn validate(&self) -> Result<()> {
        match *self {
            SupportClass::Sset { n, s } => {
                if s < 1 || s > n {
                    return Err(Error::InvalidClass(format!(
                        "sset requires 1 <= s <= n, got n={n} s={s}"
                    )));
                }
            }
            SupportClass::Intervals { n, s, k } => {
                if s < 1 || k < 1 {
                    return Err(Error::InvalidClass(format!(
                        "intervals requires s >= 1 and k >= 1, got s={s} k={k}"
                    )));
                }
                if k * s > n {
                    return Err(Error::InvalidClass(format!(
                        "intervals requires k*s <= n, got k*s={} n={n}",
                        k * s
                    )));
                }
            }
            SupportClass::Stars { p, s, k } => {
                if p < 2 || s < 1 || k < 1 {
                    return Err(Error::InvalidClass(format!(
                        "stars requires p >= 2, s >= 1, k >= 1, got p={p} s={s} k={k}"
                    )));
                }
                if s > p - 1 {
                    return Err(Error::InvalidClass(format!(
                        "stars requires s <= p-1, got s={s} p={p}"
                    )));
                }
                // exact existence condition for k vertex-disjoint stars
                if k > 1 && k * (s + 1) > p {
                    return Err(Error::InvalidClass(format!(
                        "stars requires k*(s+1) <= p, got {} vs p={p}",
                        k * (s + 1)
                    )));
                }
            }
            SupportClass::Submatrix { n_r, n_c, s_r, s_c } => {
                if s_r < 1 || s_r > n_r || s_c < 1 || s_c > n_c {
                    return Err(Error::InvalidClass(format!(
                        "submatrix requires 1 <= s_r <= n_r and 1 <= s_c <= n_c, \
                         got n_r={n_r} n_c={n_c} s_r={s_r} s_c={s_c}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Row/column dimensions reoriented so that `s_r >= s_c`.
    ///
    /// Returns `(n_r, n_c, s_r, s_c, transposed)`. Procedures work in this
    /// orientation; component indices always refer to the original matrix.
    pub fn normalized_submatrix(&self) -> Option<(usize, usize, usize, usize, bool)> {
        match *self {
            SupportClass::Submatrix { n_r, n_c, s_r, s_c } => {
                if s_r >= s_c {
                    Some((n_r, n_c, s_r, s_c, false))
                } else {
                    Some((n_c, n_r, s_c, s_r, true))
                }
            }
            _ => None,
        }
    }
}

/// Packing bound `p(p-1-s)/(2s)` on the number of disjoint s-stars in `K_p`.
pub fn star_packing_bound(p: usize, s: usize) -> Result<f64> {
    if s >= p {
        return Err(Error::Domain(format!(
            "star packing bound requires s <= p-1, got p={p} s={s}"
        )));
    }
    if s == 0 {
        return Err(Error::Domain("star packing bound requires s >= 1".into()));
    }
    Ok((p * (p - 1 - s)) as f64 / (2 * s) as f64)
}

/// Bijection between edge indices `1..=p(p-1)/2` of `K_p` and unordered
/// vertex pairs, lexicographic over `(u, v)` with `u < v`, u-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeIndexer {
    p: usize,
}

impl EdgeIndexer {
    pub fn new(p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::Domain(format!("edge indexer requires p >= 2, got {p}")));
        }
        Ok(EdgeIndexer { p })
    }

    pub fn vertex_count(&self) -> usize {
        self.p
    }

    pub fn edge_count(&self) -> usize {
        self.p * (self.p - 1) / 2
    }

    /// Edge index of the unordered pair `{u, v}` (1-based vertices).
    pub fn index(&self, u: usize, v: usize) -> usize {
        debug_assert!(u != v && u >= 1 && v >= 1 && u <= self.p && v <= self.p);
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        (u - 1) * self.p + v - u * (u + 1) / 2
    }

    /// Endpoints `(u, v)`, `u < v`, of edge index `i`.
    pub fn endpoints(&self, i: usize) -> (usize, usize) {
        debug_assert!(i >= 1 && i <= self.edge_count());
        // Largest u with block_end(u-1) < i, where block_end(u) = u*p - u(u+1)/2.
        let mut u = 1usize;
        let mut block_end = self.p - 1;
        while block_end < i {
            u += 1;
            block_end += self.p - u;
        }
        let prev_end = block_end - (self.p - u);
        let v = u + (i - prev_end);
        (u, v)
    }

    /// Edge indices incident to vertex `v` (the probe set of that vertex).
    pub fn vertex_edges(&self, v: usize) -> Vec<usize> {
        (1..=self.p)
            .filter(|&w| w != v)
            .map(|w| self.index(v, w))
            .collect()
    }

    /// Edge indices incident to any vertex of `vs` (deduplicated, sorted).
    pub fn vertices_edges(&self, vs: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.p + 1];
        for &v in vs {
            member[v] = true;
        }
        let mut out = Vec::new();
        for &v in vs {
            for w in 1..=self.p {
                if w == v || (member[w] && w < v) {
                    continue; // edge within vs counted once, from its lower endpoint
                }
                out.push(self.index(v, w));
            }
        }
        out.sort_unstable();
        out
    }
}

/// A concrete support set together with the class it claims membership in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportSet {
    indices: Vec<usize>,
    class: SupportClass,
}

impl SupportSet {
    /// Builds a set from raw indices: sorts, rejects duplicates, range and
    /// cardinality violations. Structural class membership is checked
    /// separately by [`SupportSet::validate_membership`].
    pub fn new(mut indices: Vec<usize>, class: SupportClass) -> Result<Self> {
        class.validate()?;
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("support set has duplicate indices".into()));
        }
        let n = class.ambient_n();
        if indices.iter().any(|&i| i < 1 || i > n) {
            return Err(Error::Domain(format!("support indices must lie in 1..={n}")));
        }
        if indices.len() != class.sparsity() {
            return Err(Error::Domain(format!(
                "support size {} does not match class sparsity {}",
                indices.len(),
                class.sparsity()
            )));
        }
        Ok(SupportSet { indices, class })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn class(&self) -> &SupportClass {
        &self.class
    }

    pub fn ambient_n(&self) -> usize {
        self.class.ambient_n()
    }

    /// True iff the indices form a legal member of the claimed class.
    pub fn validate_membership(&self) -> bool {
        match self.class {
            SupportClass::Sset { .. } => true, // cardinality/range checked at construction
            SupportClass::Intervals { s, .. } => {
                // A set is a union of disjoint s-intervals iff every maximal
                // run of consecutive indices has length divisible by s.
                let mut run = 1usize;
                for w in self.indices.windows(2) {
                    if w[1] == w[0] + 1 {
                        run += 1;
                    } else {
                        if run % s != 0 {
                            return false;
                        }
                        run = 1;
                    }
                }
                run % s == 0
            }
            SupportClass::Stars { p, s, k } => validate_stars(&self.indices, p, s, k),
            SupportClass::Submatrix { n_c, s_r, s_c, .. } => {
                let mut rows = Vec::new();
                let mut cols = Vec::new();
                for &i in &self.indices {
                    let r = (i - 1) / n_c + 1;
                    let c = (i - 1) % n_c + 1;
                    rows.push(r);
                    cols.push(c);
                }
                rows.sort_unstable();
                rows.dedup();
                cols.sort_unstable();
                cols.dedup();
                rows.len() == s_r && cols.len() == s_c && self.indices.len() == s_r * s_c
            }
        }
    }
}

/// Vertex-disjoint union of k s-stars: the edge set decomposes into k
/// connected components, each with s edges all incident to one center.
fn validate_stars(edges: &[usize], p: usize, s: usize, k: usize) -> bool {
    let indexer = match EdgeIndexer::new(p) {
        Ok(ix) => ix,
        Err(_) => return false,
    };
    if edges.len() != k * s {
        return false;
    }
    // Union-find over vertices touched by the edge set.
    let mut parent: Vec<usize> = (0..=p).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut degree = vec![0usize; p + 1];
    for &e in edges {
        let (u, v) = indexer.endpoints(e);
        degree[u] += 1;
        degree[v] += 1;
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
        }
    }
    // Component roots -> (edge count, max degree, vertex count).
    let mut stats: std::collections::BTreeMap<usize, (usize, usize, usize)> =
        std::collections::BTreeMap::new();
    for v in 1..=p {
        if degree[v] > 0 {
            let root = find(&mut parent, v);
            let entry = stats.entry(root).or_insert((0, 0, 0));
            entry.1 = entry.1.max(degree[v]);
            entry.2 += 1;
        }
    }
    for &e in edges {
        let (u, _) = indexer.endpoints(e);
        let root = find(&mut parent, u);
        if let Some(entry) = stats.get_mut(&root) {
            entry.0 += 1;
        }
    }
    if stats.len() != k {
        return false;
    }
    // An s-star component has s edges over s+1 vertices with one vertex of
    // degree s and the rest of degree 1.
    stats.values().all(|&(e_cnt, max_deg, v_cnt)| {
        e_cnt == s && v_cnt == s + 1 && max_deg == s
    })
}

/// Draws a uniformly random member of the class.
///
/// Intervals use rejection sampling over placements with a retry cap and a
/// deterministic leftmost-greedy fallback; stars are built from a uniformly
/// random ordered draw of k(s+1) distinct vertices, which induces the uniform
/// distribution over vertex-disjoint star unions.
pub fn sample_support<R: Rng>(class: &SupportClass, rng: &mut R) -> Result<SupportSet> {
    class.validate()?;
    let indices = match *class {
        SupportClass::Sset { n, s } => {
            let mut idx: Vec<usize> = sample_distinct(rng, n, s).iter().map(|i| i + 1).collect();
            idx.sort_unstable();
            idx
        }
        SupportClass::Intervals { n, s, k } => {
            if k * s > n {
                return Err(Error::EmptyClass(format!("k*s={} > n={n}", k * s)));
            }
            let max_start = n - s + 1;
            let mut starts: Option<Vec<usize>> = None;
            for _ in 0..REJECTION_RETRY_CAP {
                let mut cand: Vec<usize> =
                    (0..k).map(|_| rng.gen_range(1..=max_start)).collect();
                cand.sort_unstable();
                if cand.windows(2).all(|w| w[1] >= w[0] + s) {
                    starts = Some(cand);
                    break;
                }
            }
            let starts = starts.unwrap_or_else(|| (0..k).map(|i| 1 + i * s).collect());
            starts
                .into_iter()
                .flat_map(|l| l..l + s)
                .collect()
        }
        SupportClass::Stars { p, s, k } => {
            if k * (s + 1) > p {
                return Err(Error::EmptyClass(format!(
                    "k stars of size s need k*(s+1)={} vertices, have p={p}",
                    k * (s + 1)
                )));
            }
            let indexer = EdgeIndexer::new(p)?;
            let verts: Vec<usize> =
                sample_distinct(rng, p, k * (s + 1)).iter().map(|v| v + 1).collect();
            let mut edges = Vec::with_capacity(k * s);
            for star in 0..k {
                let center = verts[star];
                for leaf in 0..s {
                    let v = verts[k + star * s + leaf];
                    edges.push(indexer.index(center, v));
                }
            }
            edges.sort_unstable();
            edges
        }
        SupportClass::Submatrix { n_r, n_c, s_r, s_c } => {
            let rows: Vec<usize> = sample_distinct(rng, n_r, s_r).iter().map(|r| r + 1).collect();
            let cols: Vec<usize> = sample_distinct(rng, n_c, s_c).iter().map(|c| c + 1).collect();
            let mut idx = Vec::with_capacity(s_r * s_c);
            for &r in &rows {
                for &c in &cols {
                    idx.push((r - 1) * n_c + c);
                }
            }
            idx.sort_unstable();
            idx
        }
    };
    SupportSet::new(indices, *class)
}

/// `|a triangle b|`, the symmetric set difference size.
pub fn symmetric_difference_size(a: &SupportSet, b: &SupportSet) -> Result<usize> {
    if a.ambient_n() != b.ambient_n() {
        return Err(Error::DimensionMismatch(a.ambient_n(), b.ambient_n()));
    }
    Ok(symmetric_difference_indices(a.indices(), b.indices()))
}

/// Symmetric difference of two sorted index slices.
pub fn symmetric_difference_indices(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut d) = (0usize, 0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                d += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                d += 1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    d + (a.len() - i) + (b.len() - j)
}
