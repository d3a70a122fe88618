//! The independent-set / in-star reduction.
//!
//! Given an acyclic orientation `D` of `H` and a radius `K`:
//!
//! 1. `V'` is the set of vertices whose out-ball of radius `K` has at least
//!    `K/2` vertices.
//! 2. A random set (each vertex with probability `gamma/4`) is sampled and
//!    augmented so that it meets `B^{+K}(v) \ {v}` for every `v` in `V'`.
//! 3. The set is pruned to an independent set `X` by repeatedly deleting the
//!    in-neighbours of the current sinks.
//! 4. Each vertex outside `X` with an out-neighbour in `X` keeps one arc into
//!    `X`; these arcs form vertex-disjoint in-stars rooted in `X`.
//!
//! Deleting the star arcs from `H` is meant to push the 1-density below `d`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::density::{m1_bruteforce, m1_exact, DensityValue, DEFAULT_ORACLE_MAX_N};
use crate::error::{Error, Result};
use crate::generators::rng;
use crate::graph::{degeneracy_order, Graph, Vertex, VertexSet};
use crate::orient::{level_orientation, orient_by_order, out_ball_with, Orientation, RootRule};

const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReachableCore {
    #[serde(rename = "K")]
    pub k: usize,
    pub core: VertexSet,
    pub ball_sizes: Vec<usize>,
}

fn balls(d: &Orientation, vertices: &[Vertex], radius: usize) -> Vec<Vec<Vertex>> {
    vertices
        .par_iter()
        .map_init(
            || vec![false; d.n()],
            |seen, &v| out_ball_with(d, v, radius, seen),
        )
        .collect()
}

/// `V' = { v : |B^{+K}(v)| >= K/2 }`.
pub fn reachable_core(d: &Orientation, k: usize) -> Result<ReachableCore> {
    if k < 2 {
        return Err(Error::param(format!("K must be at least 2, got {k}")));
    }
    let all: Vec<Vertex> = (0..d.n()).collect();
    let ball_sizes: Vec<usize> = balls(d, &all, k).into_iter().map(|b| b.len()).collect();
    let core = VertexSet::from_sorted(all.into_iter().filter(|&v| 2 * ball_sizes[v] >= k).collect());
    Ok(ReachableCore {
        k,
        core,
        ball_sizes,
    })
}

/// How a core vertex missed by the random sample gets its extra hitting vertex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AugmentRule {
    /// One vertex per missed core vertex: the smallest id in its punctured ball.
    MinIndex,
    /// Greedy cover of the missed punctured balls: repeatedly add the vertex
    /// lying in the most still-unhit balls (smallest id on ties).
    #[default]
    GreedyCover,
}

impl FromStr for AugmentRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-index" => Ok(Self::MinIndex),
            "greedy-cover" => Ok(Self::GreedyCover),
            other => Err(Error::param(format!("unknown augmentation rule {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HittingSetParams {
    pub gamma: f64,
    pub seed: u64,
    pub max_retries: usize,
    pub augment: AugmentRule,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HittingSet {
    /// The union of the sample and the augmentation.
    pub x1: VertexSet,
    pub sampled: VertexSet,
    pub augmented: VertexSet,
    /// Core vertices the sample alone did not hit.
    pub missed: usize,
    pub attempts: usize,
}

/// Samples `V_{gamma/4}`, checks `|V| <= 3 gamma n / 8` and that at most
/// `2 e^{-gamma K / 10} |V'|` core vertices are missed, augments the misses,
/// and accepts once `|X_1| <= gamma n / 2`. Failed attempts are resampled up to
/// `max_retries` times.
pub fn sample_hitting_set(
    d: &Orientation,
    core: &ReachableCore,
    params: &HittingSetParams,
) -> Result<HittingSet> {
    let n = d.n();
    let gamma = params.gamma;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::param(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    let core_list: Vec<Vertex> = core.core.iter().collect();
    // punctured balls B^{+K}(v) \ {v}
    let punctured: Vec<Vec<Vertex>> = balls(d, &core_list, core.k)
        .into_iter()
        .zip(&core_list)
        .map(|(ball, &v)| ball.into_iter().filter(|&u| u != v).collect())
        .collect();
    if let Some(i) = punctured.iter().position(Vec::is_empty) {
        return Err(Error::SingletonBall(core_list[i]));
    }
    let sample_cap = 3.0 * gamma * n as f64 / 8.0 + SLACK;
    let miss_cap = 2.0 * (-gamma * core.k as f64 / 10.0).exp() * core_list.len() as f64 + SLACK;
    let final_cap = gamma * n as f64 / 2.0 + SLACK;
    let mut rng = rng(params.seed);
    let mut last = String::new();
    let attempts = params.max_retries + 1;
    for attempt in 1..=attempts {
        let mask: Vec<bool> = (0..n).map(|_| rng.gen::<f64>() < gamma / 4.0).collect();
        let sampled = VertexSet::from_mask(&mask);
        let missed: Vec<usize> = (0..core_list.len())
            .filter(|&i| !punctured[i].iter().any(|&u| mask[u]))
            .collect();
        if sampled.len() as f64 > sample_cap || missed.len() as f64 > miss_cap {
            last = format!(
                "sample {} (cap {:.2}), missed {} (cap {:.2})",
                sampled.len(),
                sample_cap,
                missed.len(),
                miss_cap
            );
            continue;
        }
        let augmented = augment(&punctured, &missed, params.augment);
        let x1: VertexSet = sampled.iter().chain(augmented.iter()).collect();
        if x1.len() as f64 > final_cap {
            last = format!(
                "|X1| = {} exceeds gamma n / 2 = {:.2} ({} sampled, {} augmented for {} misses)",
                x1.len(),
                final_cap,
                sampled.len(),
                augmented.len(),
                missed.len()
            );
            continue;
        }
        return Ok(HittingSet {
            x1,
            sampled,
            augmented,
            missed: missed.len(),
            attempts: attempt,
        });
    }
    Err(Error::RetriesExhausted {
        attempts,
        detail: last,
    })
}

fn augment(punctured: &[Vec<Vertex>], missed: &[usize], rule: AugmentRule) -> VertexSet {
    match rule {
        AugmentRule::MinIndex => missed.iter().map(|&i| punctured[i][0]).collect(),
        AugmentRule::GreedyCover => {
            let mut open: Vec<usize> = missed.to_vec();
            let mut chosen = Vec::new();
            let mut counts: BTreeMap<Vertex, usize> = BTreeMap::new();
            while !open.is_empty() {
                counts.clear();
                for &i in &open {
                    for &u in &punctured[i] {
                        *counts.entry(u).or_default() += 1;
                    }
                }
                // ids ascend, so the strict comparison keeps the smallest id on ties
                let (best, _) = counts
                    .iter()
                    .fold((usize::MAX, 0), |acc, (&u, &c)| if c > acc.1 { (u, c) } else { acc });
                chosen.push(best);
                open.retain(|&i| punctured[i].binary_search(&best).is_err());
            }
            chosen.into_iter().collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pruning {
    pub independent: VertexSet,
    pub rounds: usize,
    /// Each deleted vertex with the sink it points to at deletion time.
    pub deleted: Vec<(Vertex, Vertex)>,
}

/// Repeats `X <- X \ N^-(B)` where `B` is the set of vertices of `X` with no
/// out-neighbour in `X`, until `X` spans no arc. Sinks are never deleted, so
/// every deleted vertex points to a vertex that survives.
pub fn prune_to_independent(d: &Orientation, x1: &VertexSet) -> Pruning {
    let mut in_x = x1.to_mask(d.n());
    let mut members: Vec<Vertex> = x1.iter().collect();
    let mut deleted = Vec::new();
    let mut rounds = 0;
    loop {
        let is_sink: Vec<bool> = members
            .iter()
            .map(|&v| !d.out_neighbors(v).iter().any(|&w| in_x[w]))
            .collect();
        if is_sink.iter().all(|&s| s) {
            break;
        }
        let mut sink_mask = vec![false; d.n()];
        for (&v, &s) in members.iter().zip(&is_sink) {
            sink_mask[v] = s;
        }
        let mut removed_now = Vec::new();
        for (&u, &s) in members.iter().zip(&is_sink) {
            if s {
                continue;
            }
            if let Some(&w) = d.out_neighbors(u).iter().find(|&&w| sink_mask[w]) {
                removed_now.push((u, w));
            }
        }
        debug_assert!(!removed_now.is_empty());
        for &(u, _) in &removed_now {
            in_x[u] = false;
        }
        members.retain(|&v| in_x[v]);
        deleted.extend(removed_now);
        rounds += 1;
    }
    Pruning {
        independent: VertexSet::from_sorted(members),
        rounds,
        deleted,
    }
}

/// The chosen arcs `M^-(X)`: for each vertex outside `X` with an out-neighbour
/// in `X`, the arc to its smallest such out-neighbour.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarSelection {
    pub x: VertexSet,
    /// `(source, root)` pairs sorted by source.
    pub arcs: Vec<(Vertex, Vertex)>,
}

impl StarSelection {
    pub fn empty() -> Self {
        Self {
            x: VertexSet::empty(),
            arcs: Vec::new(),
        }
    }

    /// In-stars keyed by root; every member of `X` appears, possibly leafless.
    pub fn in_stars(&self) -> BTreeMap<Vertex, Vec<Vertex>> {
        let mut stars: BTreeMap<Vertex, Vec<Vertex>> =
            self.x.iter().map(|q| (q, Vec::new())).collect();
        for &(u, q) in &self.arcs {
            stars.entry(q).or_default().push(u);
        }
        stars
    }

    /// Vertices covered by the arcs.
    pub fn arc_vertices(&self) -> VertexSet {
        self.arcs.iter().flat_map(|&(u, q)| [u, q]).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty() && self.arcs.is_empty()
    }
}

pub fn select_in_stars(d: &Orientation, x: &VertexSet) -> Result<StarSelection> {
    if let Some(v) = x.iter().find(|&v| v >= d.n()) {
        return Err(Error::VertexOutOfRange { vertex: v, n: d.n() });
    }
    if let Some((u, v)) = d.base().find_internal_edge(x) {
        return Err(Error::NotIndependent(u, v));
    }
    let arcs = (0..d.n())
        .filter(|&u| !x.contains(u))
        .filter_map(|u| {
            d.out_neighbors(u)
                .iter()
                .find(|&&q| x.contains(q))
                .map(|&q| (u, q))
        })
        .collect();
    Ok(StarSelection { x: x.clone(), arcs })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientRule {
    /// Edges point from later to earlier vertices of a degeneracy order.
    Degeneracy,
    /// Edges point down the levels of a BFS spanning forest.
    Level,
}

impl FromStr for OrientRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degeneracy" => Ok(Self::Degeneracy),
            "level" => Ok(Self::Level),
            other => Err(Error::param(format!("unknown orientation rule {other:?}"))),
        }
    }
}

impl fmt::Display for OrientRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Degeneracy => "degeneracy",
            Self::Level => "level",
        })
    }
}

pub fn orient(h: &Graph, rule: OrientRule) -> Orientation {
    match rule {
        OrientRule::Degeneracy => orient_by_order(h, &degeneracy_order(h).order)
            .expect("degeneracy order is a permutation"),
        OrientRule::Level => level_orientation(h, RootRule::LowestIndex).0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KChoice {
    Fixed(usize),
    /// `ceil(10 ln(20/gamma) / gamma)`.
    Auto,
}

impl KChoice {
    pub fn resolve(self, gamma: f64) -> usize {
        match self {
            Self::Fixed(k) => k,
            Self::Auto => (10.0 * (20.0 / gamma).ln() / gamma).ceil() as usize,
        }
    }
}

impl FromStr for KChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        s.parse()
            .map(Self::Fixed)
            .map_err(|_| Error::param(format!("K must be an integer or `auto`, got {s:?}")))
    }
}

impl fmt::Display for KChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(k) => write!(f, "{k}"),
            Self::Auto => f.write_str("auto"),
        }
    }
}

impl Serialize for KChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineParams {
    pub rule: OrientRule,
    #[serde(rename = "K")]
    pub k: KChoice,
    pub gamma: f64,
    #[serde(with = "crate::rational::serde_str")]
    pub d: Rational64,
    /// Requested density margin; recorded and compared, not required.
    #[serde(with = "crate::rational::serde_str")]
    pub eps_prime: Rational64,
    /// Margin the verdict enforces: pass needs `m1(after) <= d - verdict_eps`.
    #[serde(with = "crate::rational::serde_str")]
    pub verdict_eps: Rational64,
    pub seed: u64,
    pub max_retries: usize,
    pub augment: AugmentRule,
    /// The brute-force oracle cross-checks `m1` up to this many vertices.
    pub oracle_max_n: usize,
}

impl PipelineParams {
    pub fn new(rule: OrientRule, k: KChoice, gamma: f64, d: Rational64, seed: u64) -> Self {
        Self {
            rule,
            k,
            gamma,
            d,
            eps_prime: Rational64::from_integer(0),
            verdict_eps: Rational64::from_integer(0),
            seed,
            max_retries: 20,
            augment: AugmentRule::default(),
            oracle_max_n: DEFAULT_ORACLE_MAX_N,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    VacuousPass,
    Fail,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PipelineSizes {
    pub n: usize,
    pub edges: usize,
    pub max_degree: usize,
    pub max_out_degree: usize,
    pub core: usize,
    pub sampled: usize,
    pub augmented: usize,
    pub missed: usize,
    pub x1: usize,
    pub x: usize,
    pub star_arcs: usize,
    pub attempts: usize,
    pub prune_rounds: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PipelineFlags {
    /// `|X_1| <= gamma n / 2`
    pub q1_prime: bool,
    /// `X_1` meets every punctured `K`-ball of the core
    pub q2_prime: bool,
    /// `|X| <= gamma n / 2`
    pub p1: bool,
    /// `X` meets every punctured `(K+1)`-ball of the core
    pub p2: bool,
    pub independent: bool,
    /// `|M^-(X)| <= Delta |X|`
    pub star_bound: bool,
    /// `m1(after) <= m1(before)`
    pub density_monotone: bool,
    /// `m1(after) < m1(before)`
    pub strict_drop: bool,
    /// `m1(after) <= d - eps_prime` for the requested margin
    pub meets_requested_margin: bool,
    /// exact and brute-force `m1` agree (only when the oracle ran)
    pub oracle_agrees: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub params: PipelineParams,
    #[serde(rename = "K_used")]
    pub k_used: usize,
    pub sizes: PipelineSizes,
    pub m1_before: Option<DensityValue>,
    pub m1_after: Option<DensityValue>,
    pub flags: PipelineFlags,
    pub verdict: Verdict,
    pub error: Option<String>,
}

/// Everything a reduction run produced.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub report: PipelineReport,
    pub orientation: Orientation,
    pub core: ReachableCore,
    pub hitting: Option<HittingSet>,
    pub selection: Option<StarSelection>,
    /// `H` without the selected arcs.
    pub reduced: Graph,
}

/// Orients `h`, builds `V'`, samples and prunes `X`, selects `M^-(X)`, removes
/// it, and compares `m1` before and after. Sub-step failures are recorded in
/// the report with a failing verdict rather than returned as errors.
pub fn run_reduction(h: &Graph, params: &PipelineParams) -> Result<Reduction> {
    if h.n() == 0 {
        return Err(Error::param("graph has no vertices"));
    }
    let k = params.k.resolve(params.gamma);
    let d = orient(h, params.rule);
    let core = reachable_core(&d, k)?;
    let n = h.n();
    let mut sizes = PipelineSizes {
        n,
        edges: h.edge_count(),
        max_degree: h.max_degree(),
        max_out_degree: d.max_out_degree(),
        core: core.core.len(),
        ..Default::default()
    };
    let m1_before = (h.edge_count() > 0).then(|| m1_exact(h)).transpose()?;
    let mut report = PipelineReport {
        params: params.clone(),
        k_used: k,
        sizes: sizes.clone(),
        m1_before: m1_before.clone(),
        m1_after: None,
        flags: PipelineFlags::default(),
        verdict: Verdict::Fail,
        error: None,
    };
    let hitting = match sample_hitting_set(
        &d,
        &core,
        &HittingSetParams {
            gamma: params.gamma,
            seed: params.seed,
            max_retries: params.max_retries,
            augment: params.augment,
        },
    ) {
        Ok(hs) => hs,
        Err(e @ (Error::RetriesExhausted { .. } | Error::SingletonBall(_))) => {
            report.error = Some(e.to_string());
            return Ok(Reduction {
                report,
                orientation: d,
                core,
                hitting: None,
                selection: None,
                reduced: h.clone(),
            });
        }
        Err(e) => return Err(e),
    };
    let cap = params.gamma * n as f64 / 2.0 + SLACK;
    let x1_mask = hitting.x1.to_mask(n);
    let pruning = prune_to_independent(&d, &hitting.x1);
    let x = pruning.independent.clone();
    let x_mask = x.to_mask(n);
    let core_list: Vec<Vertex> = core.core.iter().collect();
    let q2_prime = balls(&d, &core_list, k)
        .iter()
        .zip(&core_list)
        .all(|(b, &v)| b.iter().any(|&u| u != v && x1_mask[u]));
    let p2 = balls(&d, &core_list, k + 1)
        .iter()
        .zip(&core_list)
        .all(|(b, &v)| b.iter().any(|&u| u != v && x_mask[u]));
    let selection = select_in_stars(&d, &x)?;
    let reduced = h.without_edges(selection.arcs.iter().copied());
    let m1_after = (reduced.edge_count() > 0)
        .then(|| m1_exact(&reduced))
        .transpose()?;
    let oracle_agrees = if n <= params.oracle_max_n {
        let mut ok = true;
        for (g, v) in [(h, &m1_before), (&reduced, &m1_after)] {
            if let Some(v) = v {
                ok &= m1_bruteforce(g, params.oracle_max_n)?.value() == v.value();
            }
        }
        Some(ok)
    } else {
        None
    };
    let after_value = m1_after.as_ref().map(DensityValue::value);
    let before_value = m1_before.as_ref().map(DensityValue::value);
    let at_most = |bound: Rational64| after_value.is_none_or(|a| a <= bound);
    let flags = PipelineFlags {
        q1_prime: hitting.x1.len() as f64 <= cap,
        q2_prime,
        p1: x.len() as f64 <= cap,
        p2,
        independent: h.is_independent(&x),
        star_bound: selection.arcs.len() <= h.max_degree() * x.len(),
        density_monotone: match (before_value, after_value) {
            (Some(b), Some(a)) => a <= b,
            _ => true,
        },
        strict_drop: match (before_value, after_value) {
            (Some(b), Some(a)) => a < b,
            (Some(_), None) => true,
            _ => false,
        },
        meets_requested_margin: at_most(params.d - params.eps_prime),
        oracle_agrees,
    };
    sizes.sampled = hitting.sampled.len();
    sizes.augmented = hitting.augmented.len();
    sizes.missed = hitting.missed;
    sizes.x1 = hitting.x1.len();
    sizes.x = x.len();
    sizes.star_arcs = selection.arcs.len();
    sizes.attempts = hitting.attempts;
    sizes.prune_rounds = pruning.rounds;
    let structural = flags.q1_prime
        && flags.q2_prime
        && flags.p1
        && flags.p2
        && flags.independent
        && flags.star_bound
        && flags.density_monotone
        && flags.oracle_agrees != Some(false);
    let verdict = if h.edge_count() == 0 {
        Verdict::VacuousPass
    } else if structural && at_most(params.d - params.verdict_eps) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    report.sizes = sizes;
    report.m1_after = m1_after;
    report.flags = flags;
    report.verdict = verdict;
    Ok(Reduction {
        report,
        orientation: d,
        core,
        hitting: Some(hitting),
        selection: Some(selection),
        reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{power_of_cycle, random_degenerate};
    use crate::orient::out_ball;

    fn digraph(n: usize, arcs: &[(Vertex, Vertex)]) -> Orientation {
        let g = Graph::new(n, arcs.iter().copied()).unwrap();
        Orientation::from_arcs(g, arcs).unwrap()
    }

    fn set(ids: &[usize]) -> VertexSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn core_examples() {
        let empty = digraph(5, &[]);
        assert!(reachable_core(&empty, 4).unwrap().core.is_empty());
        let tree_arcs: Vec<_> = (1..31).map(|c| ((c - 1) / 2, c)).collect();
        let tree = digraph(31, &tree_arcs);
        let c = reachable_core(&tree, 4).unwrap();
        assert!(c.core.contains(0));
        assert_eq!(c.ball_sizes[0], 31);
        assert!((15..31).all(|leaf| !c.core.contains(leaf) && c.ball_sizes[leaf] == 1));
        let path_arcs: Vec<_> = (0..10).map(|i| (i, i + 1)).collect();
        let p = digraph(11, &path_arcs);
        let c = reachable_core(&p, 4).unwrap();
        assert_eq!(c.ball_sizes[0], 5);
        assert!(c.core.contains(0));
        assert!(reachable_core(&p, 1).is_err());
    }

    #[test]
    fn hitting_set_with_empty_core() {
        let d = digraph(40, &[]);
        let core = reachable_core(&d, 4).unwrap();
        let hs = sample_hitting_set(
            &d,
            &core,
            &HittingSetParams {
                gamma: 0.5,
                seed: 3,
                max_retries: 20,
                augment: AugmentRule::MinIndex,
            },
        )
        .unwrap();
        assert!(hs.augmented.is_empty());
        assert_eq!(hs.x1, hs.sampled);
    }

    #[test]
    fn hitting_set_hits_every_core_ball() {
        let h = power_of_cycle(1000, 2).unwrap();
        let (d, _) = level_orientation(&h, RootRule::LowestIndex);
        let core = reachable_core(&d, 20).unwrap();
        let hs = sample_hitting_set(
            &d,
            &core,
            &HittingSetParams {
                gamma: 0.1,
                seed: 7,
                max_retries: 20,
                augment: AugmentRule::GreedyCover,
            },
        )
        .unwrap();
        assert!(hs.attempts <= 6, "attempts {}", hs.attempts);
        assert!(hs.x1.len() <= 50);
        for v in core.core.iter() {
            let ball = out_ball(&d, v, 20);
            assert!(ball.iter().any(|u| u != v && hs.x1.contains(u)), "core vertex {v}");
        }
    }

    #[test]
    fn min_index_augmentation_overshoots_at_small_radius() {
        let h = power_of_cycle(1000, 2).unwrap();
        let (d, _) = level_orientation(&h, RootRule::LowestIndex);
        let core = reachable_core(&d, 20).unwrap();
        let err = sample_hitting_set(
            &d,
            &core,
            &HittingSetParams {
                gamma: 0.1,
                seed: 7,
                max_retries: 20,
                augment: AugmentRule::MinIndex,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::RetriesExhausted { attempts: 21, .. }), "{err}");
    }

    #[test]
    fn singleton_ball_is_an_error() {
        let d = digraph(3, &[(0, 1)]);
        // K = 2 puts every vertex with ball size >= 1 in the core
        let core = reachable_core(&d, 2).unwrap();
        assert!(core.core.contains(2));
        let err = sample_hitting_set(
            &d,
            &core,
            &HittingSetParams {
                gamma: 0.5,
                seed: 0,
                max_retries: 1,
                augment: AugmentRule::MinIndex,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::SingletonBall(1)));
    }

    #[test]
    fn prune_chain() {
        // a -> b -> c
        let d = digraph(3, &[(0, 1), (1, 2)]);
        let p = prune_to_independent(&d, &set(&[0, 1, 2]));
        assert_eq!(p.independent, set(&[0, 2]));
        assert_eq!(p.deleted, vec![(1, 2)]);
        assert_eq!(p.rounds, 1);
    }

    #[test]
    fn prune_in_star() {
        // a -> b <- c
        let d = digraph(3, &[(0, 1), (2, 1)]);
        let p = prune_to_independent(&d, &set(&[0, 1, 2]));
        assert_eq!(p.independent, set(&[1]));
    }

    #[test]
    fn prune_fixed_point() {
        let d = digraph(4, &[(0, 1), (1, 2), (2, 3)]);
        let p = prune_to_independent(&d, &set(&[0, 2]));
        assert_eq!(p.independent, set(&[0, 2]));
        assert_eq!(p.rounds, 0);
    }

    #[test]
    fn star_selection_examples() {
        let d = digraph(3, &[(0, 1), (0, 2)]);
        let s = select_in_stars(&d, &set(&[1, 2])).unwrap();
        assert_eq!(s.arcs, vec![(0, 1)]);
        let d = digraph(3, &[(0, 2), (1, 2)]);
        let s = select_in_stars(&d, &set(&[2])).unwrap();
        assert_eq!(s.arcs, vec![(0, 2), (1, 2)]);
        assert_eq!(s.in_stars()[&2], vec![0, 1]);
        let d = digraph(3, &[(2, 0)]);
        assert!(select_in_stars(&d, &set(&[2])).unwrap().arcs.is_empty());
        assert!(matches!(
            select_in_stars(&d, &set(&[0, 2])),
            Err(Error::NotIndependent(0, 2))
        ));
    }

    #[test]
    fn edgeless_pipeline_is_vacuous() {
        let h = Graph::empty(20);
        let params = PipelineParams::new(OrientRule::Level, KChoice::Fixed(4), 0.4, Rational64::from_integer(2), 1);
        let r = run_reduction(&h, &params).unwrap();
        assert_eq!(r.report.verdict, Verdict::VacuousPass);
        assert!(r.report.m1_before.is_none() && r.report.m1_after.is_none());
        assert!(r.selection.unwrap().arcs.is_empty());
        assert_eq!(r.report.sizes.x, r.hitting.unwrap().sampled.len());
    }

    #[test]
    fn square_cycle_pipeline() {
        let h = power_of_cycle(1000, 2).unwrap();
        let params = PipelineParams::new(OrientRule::Level, KChoice::Fixed(20), 0.1, Rational64::from_integer(2), 7);
        let r = run_reduction(&h, &params).unwrap();
        let rep = &r.report;
        assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
        assert_eq!(rep.m1_before.as_ref().unwrap().value(), Rational64::new(2000, 999));
        assert!(rep.m1_after.as_ref().unwrap().value() <= Rational64::from_integer(2));
        assert!(rep.flags.strict_drop && rep.flags.p2 && rep.flags.independent);
        assert!(rep.sizes.x <= 50);
    }

    #[test]
    fn degenerate_pipeline() {
        let h = random_degenerate(800, 3, 8, 2).unwrap();
        let params = PipelineParams::new(OrientRule::Degeneracy, KChoice::Fixed(8), 0.2, Rational64::from_integer(3), 2);
        let r = run_reduction(&h, &params).unwrap();
        assert!(r.report.sizes.max_out_degree <= 3);
        if let Some(after) = &r.report.m1_after {
            assert!(after.value() <= Rational64::from_integer(3));
        }
        assert!(r.report.flags.density_monotone);
    }

    #[test]
    fn auto_k() {
        assert_eq!(KChoice::Auto.resolve(0.1), 530);
        assert_eq!("auto".parse::<KChoice>().unwrap(), KChoice::Auto);
        assert_eq!("12".parse::<KChoice>().unwrap(), KChoice::Fixed(12));
    }
}
