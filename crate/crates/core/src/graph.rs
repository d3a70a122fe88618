//! Immutable simple undirected graphs and sorted vertex sets.
//!
//! Vertices are `0..n`. Edges are stored once as `(u, v)` with `u < v`, sorted
//! lexicographically, and every adjacency list is sorted, so all iteration
//! orders are deterministic.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type Edge = (Vertex, Vertex);

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<Vertex>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    /// Builds a graph from an edge list. Endpoint order within a pair does not
    /// matter; self-loops, duplicates and out-of-range endpoints are errors.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted(n, list))
    }

    /// Like [`Graph::new`] but silently merges duplicate pairs.
    pub fn from_edges_dedup(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Self::from_sorted(n, set.into_iter().collect()))
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::from_sorted(n, edges)
    }

    // `edges` must already be normalized, sorted and duplicate-free.
    pub(crate) fn from_sorted(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { n, edges, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Returns a copy without the given edges (given in either endpoint order).
    /// Pairs that are not edges are ignored.
    pub fn without_edges(&self, removed: impl IntoIterator<Item = Edge>) -> Self {
        let drop: BTreeSet<Edge> = removed
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| !drop.contains(e))
            .collect();
        Self::from_sorted(self.n, edges)
    }

    /// Edge union of two graphs on the same vertex set.
    pub fn union(&self, other: &Graph) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::VertexCountMismatch(self.n, other.n));
        }
        let mut edges = Vec::with_capacity(self.edges.len() + other.edges.len());
        let (mut i, mut j) = (0, 0);
        while i < self.edges.len() || j < other.edges.len() {
            let next = match (self.edges.get(i), other.edges.get(j)) {
                (Some(a), Some(b)) if a == b => {
                    i += 1;
                    j += 1;
                    *a
                }
                (Some(a), Some(b)) if a < b => {
                    i += 1;
                    *a
                }
                (Some(_), Some(b)) => {
                    j += 1;
                    *b
                }
                (Some(a), None) => {
                    i += 1;
                    *a
                }
                (None, Some(b)) => {
                    j += 1;
                    *b
                }
                (None, None) => unreachable!(),
            };
            edges.push(next);
        }
        Ok(Self::from_sorted(self.n, edges))
    }

    /// Applies a vertex relabeling `old -> perm[old]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        Graph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// Number of edges with both endpoints in `s`.
    pub fn induced_edge_count(&self, s: &VertexSet) -> usize {
        s.iter()
            .map(|v| {
                self.adj[v]
                    .iter()
                    .filter(|&&w| w > v && s.contains(w))
                    .count()
            })
            .sum()
    }

    /// Connected components, each sorted, listed by smallest member.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_independent(&self, s: &VertexSet) -> bool {
        self.find_internal_edge(s).is_none()
    }

    pub(crate) fn find_internal_edge(&self, s: &VertexSet) -> Option<Edge> {
        for v in s.iter() {
            if let Some(&w) = self.adj[v].iter().find(|&&w| w > v && s.contains(w)) {
                return Some((v, w));
            }
        }
        None
    }
}

pub(crate) fn check_permutation(perm: &[Vertex], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::NotPermutation(n));
    }
    let mut seen = vec![false; n];
    for &v in perm {
        if v >= n || seen[v] {
            return Err(Error::NotPermutation(n));
        }
        seen[v] = true;
    }
    Ok(())
}

/// A sorted, duplicate-free set of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    /// Validates that every id is `< n`; sorts and deduplicates.
    pub fn new(ids: impl IntoIterator<Item = Vertex>, n: usize) -> Result<Self> {
        let mut v: Vec<Vertex> = ids.into_iter().collect();
        if let Some(&bad) = v.iter().find(|&&x| x >= n) {
            return Err(Error::VertexOutOfRange { vertex: bad, n });
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self(v))
    }

    pub(crate) fn from_sorted(ids: Vec<Vertex>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        Self(ids)
    }

    pub(crate) fn from_mask(mask: &[bool]) -> Self {
        Self(
            mask.iter()
                .enumerate()
                .filter_map(|(v, &b)| b.then_some(v))
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn to_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for v in self.iter() {
            mask[v] = true;
        }
        mask
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().any(|v| large.contains(v))
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut v: Vec<Vertex> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

/// Subgraph induced on `s`, relabeled to `0..|s|` in increasing order of the
/// original ids. The returned map sends new ids back to old ones.
pub fn induced_subgraph(g: &Graph, s: &VertexSet) -> Result<(Graph, Vec<Vertex>)> {
    if let Some(v) = s.iter().find(|&v| v >= g.n()) {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    let back: Vec<Vertex> = s.iter().collect();
    let mut fwd = vec![usize::MAX; g.n()];
    for (i, &v) in back.iter().enumerate() {
        fwd[v] = i;
    }
    let mut edges = Vec::new();
    for &(u, v) in g.edges() {
        if fwd[u] != usize::MAX && fwd[v] != usize::MAX {
            edges.push((fwd[u], fwd[v]));
        }
    }
    // relabeling is monotone, so the edge list stays sorted
    Ok((Graph::from_sorted(back.len(), edges), back))
}

/// Edges with exactly one endpoint in `x`.
pub fn edge_boundary(g: &Graph, x: &VertexSet) -> Result<Vec<Edge>> {
    if let Some(v) = x.iter().find(|&v| v >= g.n()) {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    Ok(g.edges()
        .iter()
        .copied()
        .filter(|&(u, v)| x.contains(u) != x.contains(v))
        .collect())
}

/// A vertex ordering in which every vertex has at most `degeneracy` neighbors
/// earlier in the order, together with that value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegeneracyOrder {
    pub order: Vec<Vertex>,
    pub degeneracy: usize,
}

/// Min-degree peeling with bucket queues (smallest id first among ties),
/// reversed so that late-peeled vertices come first.
pub fn degeneracy_order(g: &Graph) -> DegeneracyOrder {
    let n = g.n();
    let mut deg = g.degrees();
    let max_deg = g.max_degree();
    let mut buckets: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); max_deg + 1];
    for v in 0..n {
        buckets[deg[v]].insert(v);
    }
    let mut removed = vec![false; n];
    let mut peel = Vec::with_capacity(n);
    let mut degeneracy = 0;
    let mut low = 0;
    for _ in 0..n {
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop_first().expect("bucket non-empty");
        degeneracy = degeneracy.max(low);
        removed[v] = true;
        peel.push(v);
        for &w in g.neighbors(v) {
            if !removed[w] {
                buckets[deg[w]].remove(&w);
                deg[w] -= 1;
                buckets[deg[w]].insert(w);
            }
        }
        low = low.saturating_sub(1);
    }
    peel.reverse();
    DegeneracyOrder {
        order: peel,
        degeneracy,
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((i + 5, (i + 2) % 5 + 5));
        }
        Graph::new(10, e).unwrap()
    }

    pub fn square_of_cycle(n: usize) -> Graph {
        Graph::from_edges_dedup(n, (0..n).flat_map(|i| [(i, (i + 1) % n), (i, (i + 2) % n)]))
            .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn set(ids: &[usize], n: usize) -> VertexSet {
        VertexSet::new(ids.iter().copied(), n).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(Graph::new(3, [(0, 0)]), Err(Error::SelfLoop(0))));
        assert!(matches!(
            Graph::new(3, [(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::new(3, [(0, 3)]),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn adjacency_matches_edges() {
        let g = petersen();
        assert_eq!(g.edge_count(), 15);
        for &(u, v) in g.edges() {
            assert!(u < v);
            assert!(g.neighbors(u).contains(&v) && g.neighbors(v).contains(&u));
        }
        assert!(g.degrees().iter().all(|&d| d == 3));
    }

    #[test]
    fn induced_on_complete_is_identity() {
        let k4 = Graph::complete(4);
        let (h, map) = induced_subgraph(&k4, &set(&[0, 1, 2, 3], 4)).unwrap();
        assert_eq!(h, k4);
        assert_eq!(map, vec![0, 1, 2, 3]);
    }

    #[test]
    fn induced_cycle_segment_is_path() {
        let (h, _) = induced_subgraph(&cycle(5), &set(&[0, 1, 2], 5)).unwrap();
        assert_eq!(h.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn induced_petersen_complement_of_independent_set() {
        let g = petersen();
        // brute-force an independent 4-set
        let mut indep = None;
        'outer: for mask in 0u32..1 << 10 {
            if mask.count_ones() != 4 {
                continue;
            }
            let s: VertexSet = (0..10).filter(|i| mask >> i & 1 == 1).collect();
            if g.is_independent(&s) {
                indep = Some(s);
                break 'outer;
            }
        }
        let indep = indep.expect("Petersen has independence number 4");
        let rest: VertexSet = (0..10).filter(|&v| !indep.contains(v)).collect();
        let (h, _) = induced_subgraph(&g, &rest).unwrap();
        assert_eq!(h.n(), 6);
        assert_eq!(h.edge_count(), 3);
    }

    #[test]
    fn induced_rejects_out_of_range() {
        let s = VertexSet::from_sorted(vec![0, 7]);
        assert!(induced_subgraph(&cycle(5), &s).is_err());
    }

    #[test]
    fn boundary_examples() {
        let g = petersen();
        assert!(edge_boundary(&g, &VertexSet::empty()).unwrap().is_empty());
        assert_eq!(edge_boundary(&g, &set(&[4], 10)).unwrap().len(), 3);
        let sq = square_of_cycle(10);
        assert_eq!(edge_boundary(&sq, &set(&[0, 1], 10)).unwrap().len(), 6);
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(degeneracy_order(&Graph::empty(1)).degeneracy, 0);
        assert_eq!(degeneracy_order(&Graph::complete(5)).degeneracy, 4);
        assert_eq!(degeneracy_order(&cycle(5)).degeneracy, 2);
        assert_eq!(degeneracy_order(&petersen()).degeneracy, 3);
        assert_eq!(degeneracy_order(&path(6)).degeneracy, 1);
    }

    #[test]
    fn degeneracy_order_back_degrees() {
        let g = square_of_cycle(11);
        let d = degeneracy_order(&g);
        let mut pos = vec![0; g.n()];
        for (i, &v) in d.order.iter().enumerate() {
            pos[v] = i;
        }
        for v in 0..g.n() {
            let back = g.neighbors(v).iter().filter(|&&w| pos[w] < pos[v]).count();
            assert!(back <= d.degeneracy);
        }
    }

    #[test]
    fn union_and_without() {
        let c5 = cycle(5);
        let chords = Graph::new(5, [(0, 2), (1, 3)]).unwrap();
        assert_eq!(c5.union(&chords).unwrap().edge_count(), 7);
        assert_eq!(c5.union(&c5).unwrap(), c5);
        assert_eq!(c5.union(&Graph::empty(5)).unwrap(), c5);
        assert!(c5.union(&Graph::empty(4)).is_err());
        assert_eq!(c5.without_edges([(1, 0), (3, 4)]).edge_count(), 3);
    }

    #[test]
    fn components_and_independence() {
        let g = Graph::new(5, [(0, 1), (3, 4)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
        assert!(g.is_independent(&set(&[0, 2, 3], 5)));
        assert!(!g.is_independent(&set(&[3, 4], 5)));
    }
}
