//! Enumeration of connected vertex sets up to a size cap.
//!
//! Each connected set is produced exactly once, rooted at its smallest vertex,
//! by extending with exclusive neighbours only (the ESU scheme).

use crate::graph::{Graph, Vertex};

/// A connected set as seen by the visitor, with running statistics.
pub struct Subset<'a> {
    pub vertices: &'a [Vertex],
    /// Edges with both endpoints in the set.
    pub inner_edges: usize,
    /// Sum of degrees in the ambient graph.
    pub degree_sum: usize,
}

impl Subset<'_> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn boundary(&self) -> usize {
        self.degree_sum - 2 * self.inner_edges
    }

    /// Vertices sorted ascending.
    pub fn sorted(&self) -> Vec<Vertex> {
        let mut v = self.vertices.to_vec();
        v.sort_unstable();
        v
    }
}

/// Visitation stopped because more than `budget` sets were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetExceeded;

struct Search<'g, F> {
    g: &'g Graph,
    max_size: usize,
    budget: u64,
    visited: u64,
    sub: Vec<Vertex>,
    in_sub: Vec<bool>,
    // number of members of `sub` whose closed neighbourhood contains the vertex
    closed: Vec<u32>,
    inner_edges: usize,
    degree_sum: usize,
    visit: F,
}

impl<F: FnMut(&Subset<'_>)> Search<'_, F> {
    fn push(&mut self, w: Vertex) {
        self.inner_edges += self
            .g
            .neighbors(w)
            .iter()
            .filter(|&&u| self.in_sub[u])
            .count();
        self.degree_sum += self.g.degree(w);
        self.in_sub[w] = true;
        self.sub.push(w);
        self.closed[w] += 1;
        for &u in self.g.neighbors(w) {
            self.closed[u] += 1;
        }
    }

    fn pop(&mut self) {
        let w = self.sub.pop().expect("non-empty");
        self.in_sub[w] = false;
        self.closed[w] -= 1;
        for &u in self.g.neighbors(w) {
            self.closed[u] -= 1;
        }
        self.degree_sum -= self.g.degree(w);
        self.inner_edges -= self
            .g
            .neighbors(w)
            .iter()
            .filter(|&&u| self.in_sub[u])
            .count();
    }

    fn report(&mut self) -> Result<(), BudgetExceeded> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(BudgetExceeded);
        }
        (self.visit)(&Subset {
            vertices: &self.sub,
            inner_edges: self.inner_edges,
            degree_sum: self.degree_sum,
        });
        Ok(())
    }

    fn extend(&mut self, mut ext: Vec<Vertex>, root: Vertex) -> Result<(), BudgetExceeded> {
        self.report()?;
        if self.sub.len() == self.max_size {
            return Ok(());
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &u in self.g.neighbors(w) {
                if u > root && self.closed[u] == 0 {
                    next.push(u);
                }
            }
            self.push(w);
            let r = self.extend(next, root);
            self.pop();
            r?;
        }
        Ok(())
    }
}

/// Calls `visit` on every connected vertex set of size `1..=max_size`.
/// Returns the number of sets visited, or [`BudgetExceeded`] once more than
/// `budget` sets would be visited.
pub fn for_each_connected_subset<F>(
    g: &Graph,
    max_size: usize,
    budget: u64,
    visit: F,
) -> Result<u64, BudgetExceeded>
where
    F: FnMut(&Subset<'_>),
{
    let n = g.n();
    let mut s = Search {
        g,
        max_size,
        budget,
        visited: 0,
        sub: Vec::with_capacity(max_size),
        in_sub: vec![false; n],
        closed: vec![0; n],
        inner_edges: 0,
        degree_sum: 0,
        visit,
    };
    if max_size == 0 {
        return Ok(0);
    }
    for root in 0..n {
        let ext: Vec<Vertex> = g.neighbors(root).iter().copied().filter(|&u| u > root).collect();
        s.push(root);
        let r = s.extend(ext, root);
        s.pop();
        r?;
    }
    Ok(s.visited)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use std::collections::BTreeSet;

    fn brute(g: &Graph, max_size: usize) -> BTreeSet<Vec<Vertex>> {
        let n = g.n();
        let mut out = BTreeSet::new();
        for mask in 1u32..1 << n {
            let s: Vec<Vertex> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if s.len() > max_size {
                continue;
            }
            let mut seen = vec![s[0]];
            let mut i = 0;
            while i < seen.len() {
                for &w in g.neighbors(seen[i]) {
                    if mask >> w & 1 == 1 && !seen.contains(&w) {
                        seen.push(w);
                    }
                }
                i += 1;
            }
            if seen.len() == s.len() {
                out.insert(s);
            }
        }
        out
    }

    #[test]
    fn matches_brute_force_exactly_once() {
        for g in [petersen(), square_of_cycle(9), cycle(7), Graph::complete(6)] {
            for k in [1, 3, 5, g.n()] {
                let mut seen = Vec::new();
                for_each_connected_subset(&g, k, u64::MAX, |s| {
                    let ids = s.sorted();
                    let e = crate::graph::VertexSet::from_sorted(ids.clone());
                    assert_eq!(s.inner_edges, g.induced_edge_count(&e));
                    seen.push(ids);
                })
                .unwrap();
                let total = seen.len();
                let unique: BTreeSet<_> = seen.into_iter().collect();
                assert_eq!(unique.len(), total, "duplicate set produced");
                assert_eq!(unique, brute(&g, k));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = Graph::complete(8);
        assert_eq!(
            for_each_connected_subset(&g, 8, 10, |_| {}),
            Err(BudgetExceeded)
        );
        assert_eq!(for_each_connected_subset(&g, 8, 255, |_| {}), Ok(255));
    }
}
