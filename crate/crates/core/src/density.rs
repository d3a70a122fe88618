//! 1-density `m1(F) = max e(S) / (|S| - 1)` and the small-subgraph density
//! condition `e <= d(m - 1) - 1/2`.
//!
//! Every stored density is an exact rational. The optimum over all vertex sets
//! is always attained by a connected set: if `S` splits into parts `S_i` with no
//! edges between them, `e(S)/(|S|-1) <= max_i e(S_i)/(|S_i|-1)`, so both the
//! brute-force oracle and the condition checker only walk connected sets.

use std::cmp::Ordering;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::enumerate::for_each_connected_subset;
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{Graph, Vertex, VertexSet};
use crate::rational::format_rational;

pub const DEFAULT_ORACLE_MAX_N: usize = 16;
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// `e(S) / (|S| - 1)` for a witness set `S` with `|S| >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityValue {
    pub numerator: u64,
    pub denominator: u64,
    pub witness: VertexSet,
}

impl DensityValue {
    /// Measures `s` in `g`.
    pub fn of_set(g: &Graph, s: VertexSet) -> Result<Self> {
        if s.len() < 2 {
            return Err(Error::param("density witness needs at least two vertices"));
        }
        if let Some(v) = s.iter().find(|&v| v >= g.n()) {
            return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
        }
        Ok(Self {
            numerator: g.induced_edge_count(&s) as u64,
            denominator: (s.len() - 1) as u64,
            witness: s,
        })
    }

    pub fn value(&self) -> Rational64 {
        Rational64::new(self.numerator as i64, self.denominator as i64)
    }

    /// Orders by value; equal values prefer the lexicographically smaller witness.
    fn better_than(&self, other: &DensityValue) -> bool {
        match ratio_cmp(
            self.numerator,
            self.denominator,
            other.numerator,
            other.denominator,
        ) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.witness < other.witness,
        }
    }
}

impl Serialize for DensityValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DensityValue", 4)?;
        st.serialize_field("numerator", &self.numerator)?;
        st.serialize_field("denominator", &self.denominator)?;
        st.serialize_field("value", &format_rational(&self.value()))?;
        st.serialize_field("witness", &self.witness)?;
        st.end()
    }
}

fn ratio_cmp(a: u64, b: u64, c: u64, d: u64) -> Ordering {
    (a as u128 * d as u128).cmp(&(c as u128 * b as u128))
}

/// Exhaustive maximum over connected sets; the independent oracle for
/// [`m1_exact`].
pub fn m1_bruteforce(g: &Graph, max_n: usize) -> Result<DensityValue> {
    if g.edge_count() == 0 {
        return Err(Error::Edgeless);
    }
    if g.n() > max_n {
        return Err(Error::TooLarge { n: g.n(), cap: max_n });
    }
    let mut best: Option<(u64, u64, Vec<Vertex>)> = None;
    for_each_connected_subset(g, g.n(), u64::MAX, |s| {
        if s.len() < 2 {
            return;
        }
        let (e, m) = (s.inner_edges as u64, s.len() as u64 - 1);
        let replace = match &best {
            None => true,
            Some((be, bm, bw)) => match ratio_cmp(e, m, *be, *bm) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => s.sorted() < *bw,
            },
        };
        if replace {
            best = Some((e, m, s.sorted()));
        }
    })
    .expect("unbounded budget");
    let (numerator, denominator, w) = best.expect("an edge is a connected pair");
    Ok(DensityValue {
        numerator,
        denominator,
        witness: VertexSet::from_sorted(w),
    })
}

/// Exact 1-density by anchored parametric min-cut.
///
/// For a probe `lambda = a/b` and an anchor `r`, the network has one supply
/// node per edge (capacity `b` from the source, unbounded into both endpoints),
/// every vertex pays `a` to the sink, and `r` is merged into the source. Then
/// `b * e(W) - maxflow = b * max_{S ∋ r} (e(S) - lambda (|S| - 1))`, and the
/// residual source side is a maximizer. Anchors are restricted to sets whose
/// smallest vertex is `r`, which covers every set exactly once.
///
/// Starting from the best connected component, each round moves `lambda` to
/// the density of the best improving set found; when no anchor has positive
/// value, `lambda` is the exact maximum and its set the witness.
pub fn m1_exact(g: &Graph) -> Result<DensityValue> {
    if g.edge_count() == 0 {
        return Err(Error::Edgeless);
    }
    let mut best: Option<DensityValue> = None;
    for comp in g.components() {
        if comp.len() >= 2 {
            let cand = DensityValue::of_set(g, VertexSet::from_sorted(comp))?;
            if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                best = Some(cand);
            }
        }
    }
    let mut best = best.expect("graph has an edge");
    loop {
        let lambda = best.value();
        let (a, b) = (*lambda.numer(), *lambda.denom());
        let improvement = (0..g.n())
            .into_par_iter()
            .filter_map(|r| anchored_max(g, r, a, b))
            .filter(|(value, _)| *value > 0)
            .reduce_with(|x, y| match x.0.cmp(&y.0) {
                Ordering::Greater => x,
                Ordering::Less => y,
                Ordering::Equal => {
                    if x.1 <= y.1 {
                        x
                    } else {
                        y
                    }
                }
            });
        match improvement {
            None => return Ok(best),
            Some((_, set)) => {
                let next = DensityValue::of_set(g, VertexSet::from_sorted(set))?;
                debug_assert!(next.value() > lambda);
                best = next;
            }
        }
    }
}

/// Returns `(b * max_{S ∋ r, min S = r} (e(S) - (a/b)(|S| - 1)), S)` or `None`
/// when `r` has no larger neighbour.
fn anchored_max(g: &Graph, r: Vertex, a: i64, b: i64) -> Option<(i64, Vec<Vertex>)> {
    let n = g.n();
    // component of r inside {r, r+1, ...}
    let mut node = vec![usize::MAX; n];
    let mut members = vec![r];
    node[r] = 0;
    let mut head = 0;
    while head < members.len() {
        let v = members[head];
        head += 1;
        for &w in g.neighbors(v) {
            if w > r && node[w] == usize::MAX {
                node[w] = members.len();
                members.push(w);
            }
        }
    }
    if members.len() < 2 {
        return None;
    }
    // node 0 is the source (merged with r), 1 the sink, 2.. the other members,
    // then one node per induced edge
    let vertex_node = |v: Vertex| if v == r { 0 } else { node[v] + 1 };
    let mut induced = Vec::new();
    for &v in &members {
        for &w in g.neighbors(v) {
            if w > v && node[w] != usize::MAX {
                induced.push((v, w));
            }
        }
    }
    let e_w = induced.len() as i64;
    let first_edge_node = members.len() + 1;
    let mut net = FlowNetwork::new(first_edge_node + induced.len());
    let inf = b * e_w + 1;
    for (i, &(u, v)) in induced.iter().enumerate() {
        let en = first_edge_node + i;
        net.add_arc(0, en, b);
        for x in [u, v] {
            if x != r {
                net.add_arc(en, vertex_node(x), inf);
            }
        }
    }
    for &v in &members[1..] {
        net.add_arc(vertex_node(v), 1, a);
    }
    let flow = net.max_flow(0, 1);
    let side = net.source_side(0);
    let mut set: Vec<Vertex> = members
        .iter()
        .copied()
        .filter(|&v| v == r || side[vertex_node(v)])
        .collect();
    set.sort_unstable();
    Some((b * e_w - flow, set))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Passed,
    Failed,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmallDensityWitness {
    pub set: VertexSet,
    pub m: usize,
    pub e: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmallDensityReport {
    pub status: CheckStatus,
    #[serde(with = "crate::rational::serde_str")]
    pub d: Rational64,
    #[serde(rename = "K")]
    pub k: usize,
    pub witness: Option<SmallDensityWitness>,
    pub sets_examined: u64,
}

impl SmallDensityReport {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Passed
    }
}

/// Checks `e(S) <= d(|S| - 1) - 1/2` for every connected `S` with
/// `2 <= |S| <= K/2`. The first violation by (size, then lexicographic order)
/// is reported. Disconnected sets need no check: with `c` components,
/// `e <= d(m - c) - c/2 <= d(m - 1) - 1/2`.
pub fn check_small_density(
    g: &Graph,
    d: Rational64,
    k: usize,
    budget: u64,
) -> Result<SmallDensityReport> {
    if k < 4 {
        return Err(Error::param(format!("K must be at least 4, got {k}")));
    }
    let (p, q) = (*d.numer() as i128, *d.denom() as i128);
    let mut witness: Option<(usize, Vec<Vertex>, usize)> = None;
    let outcome = for_each_connected_subset(g, k / 2, budget, |s| {
        let m = s.len();
        if m < 2 {
            return;
        }
        let e = s.inner_edges as i128;
        // e > d(m-1) - 1/2  <=>  2eq > 2p(m-1) - q
        if 2 * e * q > 2 * p * (m as i128 - 1) - q {
            let key = (m, s.sorted());
            let better = witness
                .as_ref()
                .is_none_or(|(wm, ws, _)| key < (*wm, ws.clone()));
            if better {
                witness = Some((key.0, key.1, s.inner_edges));
            }
        }
    });
    let (status, sets_examined) = match outcome {
        Err(_) => (CheckStatus::Inconclusive, budget),
        Ok(count) if witness.is_some() => (CheckStatus::Failed, count),
        Ok(count) => (CheckStatus::Passed, count),
    };
    Ok(SmallDensityReport {
        status,
        d,
        k,
        witness: witness.map(|(m, set, e)| SmallDensityWitness {
            set: VertexSet::from_sorted(set),
            m,
            e,
        }),
        sets_examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn single_edge() {
        let k2 = Graph::complete(2);
        for v in [m1_bruteforce(&k2, 16).unwrap(), m1_exact(&k2).unwrap()] {
            assert_eq!(v.value(), Rational64::from_integer(1));
            assert_eq!(v.witness.as_slice(), &[0, 1]);
        }
    }

    #[test]
    fn complete_four() {
        let v = m1_bruteforce(&Graph::complete(4), 16).unwrap();
        assert_eq!((v.numerator, v.denominator), (6, 3));
        assert_eq!(v.witness.len(), 4);
        assert_eq!(m1_exact(&Graph::complete(4)).unwrap(), v);
    }

    #[test]
    fn octahedron() {
        let g = square_of_cycle(6);
        let b = m1_bruteforce(&g, 16).unwrap();
        assert_eq!(b.value(), Rational64::new(12, 5));
        assert_eq!(b.witness.len(), 6);
        assert_eq!(m1_exact(&g).unwrap().value(), Rational64::new(12, 5));
    }

    #[test]
    fn petersen_full_graph_is_densest() {
        let g = petersen();
        let e = m1_exact(&g).unwrap();
        assert_eq!((e.numerator, e.denominator), (15, 9));
        assert_eq!(e.value(), Rational64::new(5, 3));
        assert_eq!(e.witness.len(), 10);
        assert_eq!(m1_bruteforce(&g, 16).unwrap().value(), e.value());
    }

    #[test]
    fn exact_finds_dense_part_below_sparse_component() {
        // a long path attached to K4 on its highest ids
        let mut edges: Vec<_> = (0..8).map(|i| (i, i + 1)).collect();
        for u in 8..12 {
            for v in u + 1..12 {
                edges.push((u, v));
            }
        }
        let g = Graph::new(12, edges).unwrap();
        let e = m1_exact(&g).unwrap();
        assert_eq!(e.value(), Rational64::from_integer(2));
        assert_eq!(e.witness.as_slice(), &[8, 9, 10, 11]);
        assert_eq!(m1_bruteforce(&g, 16).unwrap().value(), e.value());
    }

    #[test]
    fn errors() {
        assert!(matches!(m1_exact(&Graph::empty(3)), Err(Error::Edgeless)));
        assert!(matches!(m1_bruteforce(&Graph::empty(3), 16), Err(Error::Edgeless)));
        assert!(matches!(
            m1_bruteforce(&cycle(20), 16),
            Err(Error::TooLarge { n: 20, cap: 16 })
        ));
    }

    #[test]
    fn witness_reproduces_value() {
        let g = square_of_cycle(9);
        let v = m1_exact(&g).unwrap();
        let again = DensityValue::of_set(&g, v.witness.clone()).unwrap();
        assert_eq!(again, v);
    }

    #[test]
    fn condition_two_on_complete_four() {
        let r = check_small_density(&Graph::complete(4), Rational64::from_integer(2), 10, DEFAULT_ENUMERATION_BUDGET)
            .unwrap();
        assert_eq!(r.status, CheckStatus::Failed);
        let w = r.witness.unwrap();
        assert_eq!((w.m, w.e), (4, 6));
        assert_eq!(w.set.as_slice(), &[0, 1, 2, 3]);
    }

    #[test]
    fn condition_two_on_cycles() {
        let two = Rational64::from_integer(2);
        let r = check_small_density(&cycle(6), two, 10, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert!(r.passed());
        let r = check_small_density(&square_of_cycle(40), two, 20, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert!(r.passed(), "{r:?}");
        // just below the interval bound e = 2m - 3 the check must fail
        let r = check_small_density(&square_of_cycle(40), Rational64::new(7, 4), 20, DEFAULT_ENUMERATION_BUDGET)
            .unwrap();
        assert_eq!(r.status, CheckStatus::Failed);
    }

    #[test]
    fn condition_two_reports_inconclusive() {
        let r = check_small_density(&square_of_cycle(40), Rational64::from_integer(2), 20, 100).unwrap();
        assert_eq!(r.status, CheckStatus::Inconclusive);
        assert!(check_small_density(&cycle(6), Rational64::from_integer(2), 3, 100).is_err());
    }
}
