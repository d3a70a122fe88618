//! The star-aware random embedding and Monte Carlo vertex-spread estimates.
//!
//! Roots of the selected in-stars go to uniformly random unused high-degree
//! vertices of the dense graph `G`, each star's leaves (ascending) to uniformly
//! random unused `G`-neighbours of the root's image, and the remaining vertices
//! to a uniformly random arrangement of what is left. Every draw must have at
//! least `eps n / 4` candidates.
//!
//! The estimator only looks at one- and two-point assignment probabilities, so
//! it can refute a spread bound but never certify one.

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::embed::{Embedding, VertexTag};
use crate::error::{Error, Result};
use crate::generators::{required_edges, rng};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::rational::format_rational;
use crate::reduction::StarSelection;
use crate::stats::{derive_seed, wilson_interval};

/// Vertices of degree at least `eps n / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HighDegreeSet {
    #[serde(with = "crate::rational::serde_str")]
    pub threshold: Rational64,
    pub members: VertexSet,
}

pub fn high_degree_set(g: &Graph, eps: Rational64) -> Result<HighDegreeSet> {
    let n = g.n();
    let required = required_edges(n, eps);
    if eps <= Rational64::from_integer(0) || g.edge_count() < required {
        return Err(Error::DensityPrecondition {
            edges: g.edge_count(),
            required: format!("{required} (eps = {})", format_rational(&eps)),
        });
    }
    let threshold = eps * Rational64::from_integer(n as i64) / 2;
    let members: VertexSet = (0..n)
        .filter(|&v| Rational64::from_integer(g.degree(v) as i64) >= threshold)
        .collect();
    // 2 eps n^2 <= 2 e(G) <= |L| n + (eps n / 2) n
    assert!(
        Rational64::from_integer(members.len() as i64) >= eps * Rational64::from_integer(n as i64),
        "high-degree set smaller than eps n"
    );
    Ok(HighDegreeSet { threshold, members })
}

fn check_pool(available: usize, n: usize, eps: Rational64, step: impl FnOnce() -> String) -> Result<()> {
    let need = eps * Rational64::from_integer(n as i64) / 4;
    if Rational64::from_integer(available as i64) < need {
        return Err(Error::PoolTooSmall {
            step: step(),
            available,
            required: format_rational(&need),
        });
    }
    Ok(())
}

fn check_stars(h: &Graph, stars: &StarSelection) -> Result<()> {
    if let Some(v) = stars.x.iter().find(|&v| v >= h.n()) {
        return Err(Error::VertexOutOfRange { vertex: v, n: h.n() });
    }
    for &(u, q) in &stars.arcs {
        if !h.has_edge(u, q) || !stars.x.contains(q) || stars.x.contains(u) {
            return Err(Error::param(format!("star arc {u}->{q} does not fit H and X")));
        }
    }
    Ok(())
}

/// Places the star vertices only. Returns the partial map and tags.
pub(crate) fn place_stars(
    h: &Graph,
    stars: &StarSelection,
    g: &Graph,
    high: &HighDegreeSet,
    eps: Rational64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Option<Vertex>>, Vec<VertexTag>)> {
    let n = h.n();
    let mut map = vec![None; n];
    let mut tags = vec![VertexTag::Free; n];
    let mut used = vec![false; g.n()];
    for (root, leaves) in stars.in_stars() {
        let pool: Vec<Vertex> = high.members.iter().filter(|&y| !used[y]).collect();
        check_pool(pool.len(), n, eps, || format!("root {root}"))?;
        let image = pool[rng.gen_range(0..pool.len())];
        used[image] = true;
        map[root] = Some(image);
        tags[root] = VertexTag::StarRoot;
        for leaf in leaves {
            let pool: Vec<Vertex> = g
                .neighbors(image)
                .iter()
                .copied()
                .filter(|&y| !used[y])
                .collect();
            check_pool(pool.len(), n, eps, || format!("leaf {leaf} of root {root}"))?;
            let y = pool[rng.gen_range(0..pool.len())];
            used[y] = true;
            map[leaf] = Some(y);
            tags[leaf] = VertexTag::StarLeaf;
        }
    }
    Ok((map, tags))
}

/// One draw from the star-aware embedding distribution of `h` into the
/// vertex set of `g`.
pub fn sample_spread_embedding(
    h: &Graph,
    stars: &StarSelection,
    g: &Graph,
    eps: Rational64,
    seed: u64,
) -> Result<Embedding> {
    if h.n() != g.n() {
        return Err(Error::VertexCountMismatch(h.n(), g.n()));
    }
    check_stars(h, stars)?;
    let high = high_degree_set(g, eps)?;
    let mut rng = rng(seed);
    let (map, tags) = place_stars(h, stars, g, &high, eps, &mut rng)?;
    let emb = fill_uniformly(map, tags, g.n(), &mut rng);
    debug_assert!(stars
        .arcs
        .iter()
        .all(|&(u, q)| g.has_edge(emb.image(u), emb.image(q))));
    Ok(emb)
}

fn fill_uniformly(
    map: Vec<Option<Vertex>>,
    tags: Vec<VertexTag>,
    n_host: usize,
    rng: &mut ChaCha8Rng,
) -> Embedding {
    let mut used = vec![false; n_host];
    for y in map.iter().flatten() {
        used[*y] = true;
    }
    let mut free: Vec<Vertex> = (0..n_host).filter(|&y| !used[y]).collect();
    free.shuffle(rng);
    let mut next = free.into_iter();
    let map = map
        .into_iter()
        .map(|m| m.unwrap_or_else(|| next.next().expect("enough free host vertices")))
        .collect();
    Embedding::new(map, tags, n_host).expect("sampler output is injective")
}

/// A uniformly random bijection `0..n -> 0..n`.
pub fn uniform_permutation(n: usize, seed: u64) -> Vec<Vertex> {
    let mut p: Vec<Vertex> = (0..n).collect();
    p.shuffle(&mut rng(seed));
    p
}

pub const SPREAD_Z: f64 = 3.0;
pub const MIN_SPREAD_SAMPLES: usize = 10_000;
pub const PAIR_QUERIES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpreadEstimate {
    pub samples: usize,
    pub n: usize,
    pub q: f64,
    pub z: f64,
    /// Largest empirical `P[phi(x) = y]` and its argument `(x, y)`.
    pub s1_max: f64,
    pub s1_arg: (Vertex, Vertex),
    pub s1_lower: f64,
    pub s1_upper: f64,
    pub s2_queries: usize,
    /// Largest empirical `P[phi(x1) = y1, phi(x2) = y2]` over random queries.
    pub s2_max: f64,
    pub s2_arg: (Vertex, Vertex, Vertex, Vertex),
    pub s2_lower: f64,
    pub s2_upper: f64,
    /// The lower confidence bound of the one-point maximum exceeds `q`.
    pub s1_refuted: bool,
    /// The lower confidence bound of the two-point maximum exceeds `q^2`.
    pub s2_refuted: bool,
    pub note: &'static str,
}

/// Estimates one- and two-point assignment probabilities of `sampler` from
/// `samples` draws. Draw `i` uses seed `derive_seed(seed, i)`; counts are
/// merged by summation so the result does not depend on thread count.
pub fn estimate_vertex_spread<F>(
    sampler: F,
    n: usize,
    samples: usize,
    q: f64,
    seed: u64,
) -> Result<SpreadEstimate>
where
    F: Fn(u64) -> Result<Vec<Vertex>> + Sync,
{
    if samples < MIN_SPREAD_SAMPLES {
        return Err(Error::param(format!(
            "spread estimation needs at least {MIN_SPREAD_SAMPLES} samples, got {samples}"
        )));
    }
    if n == 0 {
        return Err(Error::param("spread estimation needs a non-empty domain"));
    }
    let mut qrng = rng(derive_seed(seed, u64::MAX));
    let queries: Vec<(Vertex, Vertex, Vertex, Vertex)> = if n >= 2 {
        (0..PAIR_QUERIES)
            .map(|_| {
                let x1 = qrng.gen_range(0..n);
                let x2 = (x1 + qrng.gen_range(1..n)) % n;
                let y1 = qrng.gen_range(0..n);
                let y2 = (y1 + qrng.gen_range(1..n)) % n;
                (x1, x2, y1, y2)
            })
            .collect()
    } else {
        Vec::new()
    };
    let shards = 64.min(samples);
    let per = samples.div_ceil(shards);
    let (single, pairs) = (0..shards)
        .into_par_iter()
        .map(|s| -> Result<(Vec<u64>, Vec<u64>)> {
            let mut single = vec![0u64; n * n];
            let mut pairs = vec![0u64; queries.len()];
            for i in s * per..((s + 1) * per).min(samples) {
                let map = sampler(derive_seed(seed, i as u64))?;
                if map.len() != n || map.iter().any(|&y| y >= n) {
                    return Err(Error::param("sampler returned a map of the wrong shape"));
                }
                for (x, &y) in map.iter().enumerate() {
                    single[x * n + y] += 1;
                }
                for (c, &(x1, x2, y1, y2)) in pairs.iter_mut().zip(&queries) {
                    if map[x1] == y1 && map[x2] == y2 {
                        *c += 1;
                    }
                }
            }
            Ok((single, pairs))
        })
        .try_reduce(
            || (vec![0; n * n], vec![0; queries.len()]),
            |mut a, b| {
                a.0.iter_mut().zip(&b.0).for_each(|(x, y)| *x += y);
                a.1.iter_mut().zip(&b.1).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    // first maximum in (x, y) order
    let (i1, &c1) = single
        .iter()
        .enumerate()
        .fold((0, &0u64), |acc, (i, c)| if *c > *acc.1 { (i, c) } else { acc });
    let (i2, c2) = pairs
        .iter()
        .enumerate()
        .fold((0, 0u64), |acc, (i, &c)| if c > acc.1 { (i, c) } else { acc });
    let total = samples as u64;
    let (s1_lower, s1_upper) = wilson_interval(c1, total, SPREAD_Z);
    let (s2_lower, s2_upper) = wilson_interval(c2, total, SPREAD_Z);
    Ok(SpreadEstimate {
        samples,
        n,
        q,
        z: SPREAD_Z,
        s1_max: c1 as f64 / samples as f64,
        s1_arg: (i1 / n, i1 % n),
        s1_lower,
        s1_upper,
        s2_queries: queries.len(),
        s2_max: c2 as f64 / samples as f64,
        s2_arg: queries.get(i2).copied().unwrap_or((0, 0, 0, 0)),
        s2_lower,
        s2_upper,
        s1_refuted: s1_lower > q,
        s2_refuted: s2_lower > q * q,
        note: "one- and two-point checks only: can refute a spread bound, cannot certify it",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::select_in_stars;
    use crate::orient::Orientation;

    fn clique_plus_isolated(k: usize, n: usize) -> Graph {
        Graph::new(n, (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn high_degree_examples() {
        let k = Graph::complete(12);
        let l = high_degree_set(&k, Rational64::new(1, 3)).unwrap();
        assert_eq!(l.members.len(), 12);
        let g = clique_plus_isolated(5, 10);
        let l = high_degree_set(&g, Rational64::new(1, 10)).unwrap();
        assert_eq!(l.members.as_slice(), &[0, 1, 2, 3, 4]);
        assert_eq!(l.threshold, Rational64::new(1, 2));
        assert!(matches!(
            high_degree_set(&g, Rational64::new(11, 100)),
            Err(Error::DensityPrecondition { edges: 10, .. })
        ));
    }

    #[test]
    fn empty_stars_give_a_bijection() {
        let h = Graph::empty(30);
        let g = Graph::complete(30);
        let e = sample_spread_embedding(&h, &StarSelection::empty(), &g, Rational64::new(1, 4), 3).unwrap();
        let mut img: Vec<_> = e.map().to_vec();
        img.sort_unstable();
        assert_eq!(img, (0..30).collect::<Vec<_>>());
        assert!(e.tags().iter().all(|t| *t == VertexTag::Free));
    }

    #[test]
    fn single_in_star_lands_in_the_clique() {
        // H on 40 vertices: q = 0 with leaves 1 and 2
        let h = Graph::new(40, [(0, 1), (0, 2)]).unwrap();
        let d = Orientation::from_arcs(h.clone(), &[(1, 0), (2, 0)]).unwrap();
        let stars = select_in_stars(&d, &VertexSet::new([0], 40).unwrap()).unwrap();
        let g = clique_plus_isolated(20, 40);
        for seed in 0..50 {
            let e = sample_spread_embedding(&h, &stars, &g, Rational64::new(1, 10), seed).unwrap();
            assert!(e.image(0) < 20);
            for leaf in [1, 2] {
                assert!(g.has_edge(e.image(0), e.image(leaf)));
                assert_eq!(e.tags()[leaf], VertexTag::StarLeaf);
            }
            assert_eq!(e.tags()[0], VertexTag::StarRoot);
        }
    }

    #[test]
    fn tiny_pools_are_reported() {
        // star with 5 leaves but the clique only has 4 vertices
        let h = Graph::new(40, (1..6).map(|u| (0, u))).unwrap();
        let arcs: Vec<_> = (1..6).map(|u| (u, 0)).collect();
        let d = Orientation::from_arcs(h.clone(), &arcs).unwrap();
        let stars = select_in_stars(&d, &VertexSet::new([0], 40).unwrap()).unwrap();
        let g = clique_plus_isolated(4, 40);
        let err = sample_spread_embedding(&h, &stars, &g, Rational64::new(6, 1600), 0).unwrap_err();
        assert!(matches!(err, Error::PoolTooSmall { .. }), "{err}");
    }

    #[test]
    fn estimator_on_uniform_and_point_mass() {
        let n = 10;
        let est = estimate_vertex_spread(|s| Ok(uniform_permutation(n, s)), n, 20_000, std::f64::consts::E / 10.0, 1)
            .unwrap();
        assert!(est.s1_max < 0.12 && est.s1_max > 0.1);
        assert!(!est.s1_refuted && !est.s2_refuted);
        let fixed: Vec<usize> = (0..n).collect();
        let est = estimate_vertex_spread(|_| Ok(fixed.clone()), n, 10_000, 0.99, 1).unwrap();
        assert_eq!(est.s1_max, 1.0);
        assert!(est.s1_refuted);
        assert!(estimate_vertex_spread(|_| Ok(fixed.clone()), n, 10, 0.5, 1).is_err());
    }

    #[test]
    fn estimator_is_thread_count_independent() {
        let run = || {
            estimate_vertex_spread(|s| Ok(uniform_permutation(8, s)), 8, 10_000, 0.5, 77).unwrap()
        };
        let a = run();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(run);
        assert_eq!(a, b);
    }
}
