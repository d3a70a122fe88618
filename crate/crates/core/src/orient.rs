//! Acyclic orientations: by vertex order, and by spanning-forest levels.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{check_permutation, Graph, Vertex, VertexSet};

/// An acyclic digraph with exactly one arc per edge of `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    base: Graph,
    /// `forward[i]` is true when edge `(u, v)` (with `u < v`) is the arc `u -> v`.
    forward: Vec<bool>,
    out: Vec<Vec<Vertex>>,
    inn: Vec<Vec<Vertex>>,
}

impl Orientation {
    /// Builds an orientation from one direction bit per base edge and checks
    /// acyclicity.
    pub fn from_directions(base: Graph, forward: Vec<bool>) -> Result<Self> {
        if forward.len() != base.edge_count() {
            return Err(Error::ArcMismatch(format!(
                "{} direction bits for {} edges",
                forward.len(),
                base.edge_count()
            )));
        }
        let n = base.n();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for (&(u, v), &fwd) in base.edges().iter().zip(&forward) {
            let (a, b) = if fwd { (u, v) } else { (v, u) };
            out[a].push(b);
            inn[b].push(a);
        }
        for list in out.iter_mut().chain(inn.iter_mut()) {
            list.sort_unstable();
        }
        let d = Self {
            base,
            forward,
            out,
            inn,
        };
        if d.topological_order().is_none() {
            return Err(Error::Cyclic);
        }
        Ok(d)
    }

    /// Builds an orientation from an explicit arc list covering every base edge once.
    pub fn from_arcs(base: Graph, arcs: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut forward = vec![None; base.edge_count()];
        for &(a, b) in arcs {
            let key = (a.min(b), a.max(b));
            let idx = base
                .edges()
                .binary_search(&key)
                .map_err(|_| Error::ArcMismatch(format!("{a}->{b} is not a base edge")))?;
            if forward[idx].replace(a < b).is_some() {
                return Err(Error::ArcMismatch(format!("edge {}-{} given twice", key.0, key.1)));
            }
        }
        let forward = forward
            .into_iter()
            .zip(base.edges())
            .map(|(f, &(u, v))| f.ok_or_else(|| Error::ArcMismatch(format!("edge {u}-{v} has no arc"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_directions(base, forward)
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.inn[v]
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out[v].len()
    }

    pub fn max_out_degree(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_arc(&self, from: Vertex, to: Vertex) -> bool {
        from < self.n() && self.out[from].binary_search(&to).is_ok()
    }

    /// Arcs in base-edge order.
    pub fn arcs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.base
            .edges()
            .iter()
            .zip(&self.forward)
            .map(|(&(u, v), &f)| if f { (u, v) } else { (v, u) })
    }

    /// Kahn's algorithm; `None` if a directed cycle exists.
    pub fn topological_order(&self) -> Option<Vec<Vertex>> {
        let n = self.n();
        let mut indeg: Vec<usize> = self.inn.iter().map(Vec::len).collect();
        let mut queue: VecDeque<Vertex> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

/// Orients every edge from the later vertex in `order` to the earlier one.
pub fn orient_by_order(g: &Graph, order: &[Vertex]) -> Result<Orientation> {
    check_permutation(order, g.n())?;
    let mut pos = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let forward = g.edges().iter().map(|&(u, v)| pos[u] > pos[v]).collect();
    Orientation::from_directions(g.clone(), forward)
}

/// How the root of each connected component is picked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RootRule {
    #[default]
    LowestIndex,
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelStructure {
    pub components: Vec<VertexSet>,
    pub roots: Vec<Vertex>,
    pub levels: Vec<usize>,
    pub level_count: usize,
    /// BFS-tree edges as `(parent, child)`.
    pub forest_edges: Vec<(Vertex, Vertex)>,
}

impl LevelStructure {
    pub fn level(&self, l: usize) -> Vec<Vertex> {
        (0..self.levels.len())
            .filter(|&v| self.levels[v] == l)
            .collect()
    }
}

/// BFS spanning forest with one root per component; edges between levels point
/// down-level, edges inside a level point from the higher id to the lower id.
pub fn level_orientation(g: &Graph, roots: RootRule) -> (Orientation, LevelStructure) {
    let n = g.n();
    let comps = g.components();
    let mut rng = match roots {
        RootRule::Seeded(s) => Some(ChaCha8Rng::seed_from_u64(s)),
        RootRule::LowestIndex => None,
    };
    let mut levels = vec![usize::MAX; n];
    let mut root_list = Vec::with_capacity(comps.len());
    let mut forest_edges = Vec::new();
    let mut level_count = 0;
    for comp in &comps {
        let root = match rng.as_mut() {
            Some(r) => comp[r.gen_range(0..comp.len())],
            None => comp[0],
        };
        root_list.push(root);
        levels[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            level_count = level_count.max(levels[v] + 1);
            for &w in g.neighbors(v) {
                if levels[w] == usize::MAX {
                    levels[w] = levels[v] + 1;
                    forest_edges.push((v, w));
                    queue.push_back(w);
                }
            }
        }
    }
    // u < v for every stored edge, so "forward" means u -> v
    let forward = g
        .edges()
        .iter()
        .map(|&(u, v)| levels[u] > levels[v])
        .collect();
    let d = Orientation::from_directions(g.clone(), forward)
        .expect("level orientation is acyclic by construction");
    let structure = LevelStructure {
        components: comps.into_iter().map(VertexSet::from_sorted).collect(),
        roots: root_list,
        levels,
        level_count,
        forest_edges,
    };
    (d, structure)
}

/// Vertices reachable from `v` along at most `radius` arcs, including `v`.
pub fn out_ball(d: &Orientation, v: Vertex, radius: usize) -> VertexSet {
    let mut seen = vec![false; d.n()];
    VertexSet::from_sorted(out_ball_with(d, v, radius, &mut seen))
}

/// Same as [`out_ball`] using a caller-provided all-false scratch mask, which
/// is restored before returning. The result is sorted.
pub(crate) fn out_ball_with(
    d: &Orientation,
    v: Vertex,
    radius: usize,
    seen: &mut [bool],
) -> Vec<Vertex> {
    let mut ball = vec![v];
    seen[v] = true;
    let mut frontier_start = 0;
    for _ in 0..radius {
        let frontier_end = ball.len();
        if frontier_start == frontier_end {
            break;
        }
        for i in frontier_start..frontier_end {
            let u = ball[i];
            for &w in d.out_neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    ball.push(w);
                }
            }
        }
        frontier_start = frontier_end;
    }
    for &u in &ball {
        seen[u] = false;
    }
    ball.sort_unstable();
    ball
}
