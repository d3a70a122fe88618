//! Graph families: powers of cycles and paths, the `K_d` sharpness gadget,
//! clique factors, random regular and random degenerate graphs, dense base
//! graphs and binomial random graphs.
//!
//! Every generator checks its family's defining property before returning.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{degeneracy_order, Graph};
use crate::rational::{format_rational, parse_rational};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `C_n^d`: vertex `i` adjacent to `i ± 1, ..., i ± d (mod n)`.
pub fn power_of_cycle(n: usize, d: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::param(format!("power-cycle needs n >= 3, got {n}")));
    }
    if d == 0 || 2 * d >= n {
        return Err(Error::param(format!(
            "power-cycle needs 1 <= d < n/2, got n={n}, d={d}"
        )));
    }
    let g = Graph::new(n, (0..n).flat_map(|i| (1..=d).map(move |k| (i, (i + k) % n))))?;
    assert!(g.degrees().iter().all(|&x| x == 2 * d));
    assert_eq!(g.edge_count(), d * n);
    Ok(g)
}

/// `P_n^d`: vertices at distance at most `d` along the path are adjacent.
pub fn power_of_path(n: usize, d: usize) -> Result<Graph> {
    if d == 0 {
        return Err(Error::param("power-path needs d >= 1"));
    }
    Graph::new(n, (0..n).flat_map(|i| (i + 1..n.min(i + d + 1)).map(move |j| (i, j))))
}

/// Disjoint cliques `K_d` on consecutive ids, each split into `A_i` (lowest
/// `ceil(d/2)` ids) and `B_i`, joined by rank-preserving perfect matchings
/// `A_i-A_{i+1}` for odd `i` and `B_i-B_{i+1}` for even `i`, closed by
/// `B_t-B_1` when the clique count `t` is even and `A_t-B_1` when it is odd.
/// The result is `d`-regular and every clique has exactly `d` boundary edges.
pub fn kd_gadget(n: usize, d: usize) -> Result<Graph> {
    if d < 3 {
        return Err(Error::param(format!("kd-gadget needs d >= 3, got {d}")));
    }
    if !n.is_multiple_of(d) || n / d < 2 {
        return Err(Error::param(format!(
            "kd-gadget needs n to be a multiple of d with at least two cliques, got n={n}, d={d}"
        )));
    }
    let t = n / d;
    if d % 2 == 1 && t % 2 == 1 {
        return Err(Error::param(format!(
            "kd-gadget with odd d needs an even number of cliques, got {t}"
        )));
    }
    let a_len = d.div_ceil(2);
    let b_len = d / 2;
    // 1-based clique index
    let a = |i: usize, r: usize| (i - 1) * d + r;
    let b = |i: usize, r: usize| (i - 1) * d + a_len + r;
    let mut edges = Vec::new();
    for i in 1..=t {
        for u in 0..d {
            for v in u + 1..d {
                edges.push((a(i, 0) + u, a(i, 0) + v));
            }
        }
    }
    for i in 1..t {
        if i % 2 == 1 {
            edges.extend((0..a_len).map(|r| (a(i, r), a(i + 1, r))));
        } else {
            edges.extend((0..b_len).map(|r| (b(i, r), b(i + 1, r))));
        }
    }
    if t.is_multiple_of(2) {
        edges.extend((0..b_len).map(|r| (b(t, r), b(1, r))));
    } else {
        // d is even here, so |A_t| = |B_1|
        edges.extend((0..b_len).map(|r| (a(t, r), b(1, r))));
    }
    let g = Graph::new(n, edges)?;
    assert!(g.degrees().iter().all(|&x| x == d));
    Ok(g)
}

/// `n / r` disjoint copies of `K_r`.
pub fn clique_factor(n: usize, r: usize) -> Result<Graph> {
    if r == 0 || !n.is_multiple_of(r) {
        return Err(Error::param(format!(
            "clique-factor needs r >= 1 dividing n, got n={n}, r={r}"
        )));
    }
    let g = Graph::new(
        n,
        (0..n / r).flat_map(|c| {
            (0..r).flat_map(move |u| (u + 1..r).map(move |v| (c * r + u, c * r + v)))
        }),
    )?;
    assert!(g.degrees().iter().all(|&x| x == r - 1));
    Ok(g)
}

/// Pairing-model attempt cap: `200 e^{d^2}`, saturated.
fn pairing_attempt_cap(d: usize) -> u64 {
    let cap = 200.0 * ((d * d) as f64).exp();
    if cap.is_finite() && cap < 1e12 {
        cap as u64
    } else {
        1_000_000_000_000
    }
}

/// Simple `d`-regular graph from the pairing model, rejecting loops and
/// multi-edges.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if (n * d) % 2 == 1 {
        return Err(Error::param(format!("n*d must be even, got n={n}, d={d}")));
    }
    if d >= n.max(1) {
        return Err(Error::param(format!("random-regular needs d < n, got n={n}, d={d}")));
    }
    let mut rng = rng(seed);
    let mut points: Vec<usize> = (0..n * d).map(|i| i / d.max(1)).collect();
    let cap = pairing_attempt_cap(d);
    let mut attempts = 0;
    'attempt: while attempts < cap {
        attempts += 1;
        points.shuffle(&mut rng);
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v {
                continue 'attempt;
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let g = Graph::new(n, edges)?;
        assert!(g.degrees().iter().all(|&x| x == d));
        return Ok(g);
    }
    Err(Error::Generator(format!(
        "pairing model produced no simple graph in {cap} attempts (n={n}, d={d})"
    )))
}

/// Vertex-arrival construction: vertex `i` draws `k` uniform in `0..=d` and
/// joins `k` distinct earlier vertices chosen uniformly among those still
/// below degree `max_degree` (fewer if not enough exist).
pub fn random_degenerate(n: usize, d: usize, max_degree: usize, seed: u64) -> Result<Graph> {
    if max_degree < d {
        return Err(Error::param(format!(
            "random-degenerate needs delta >= d, got d={d}, delta={max_degree}"
        )));
    }
    let mut rng = rng(seed);
    let mut deg = vec![0usize; n];
    let mut edges = Vec::new();
    for i in 0..n {
        let k = rng.gen_range(0..=d);
        if deg[i] >= max_degree {
            continue;
        }
        let room = max_degree - deg[i];
        let candidates: Vec<usize> = (0..i).filter(|&j| deg[j] < max_degree).collect();
        let take = k.min(candidates.len()).min(room);
        for idx in index::sample(&mut rng, candidates.len(), take) {
            let j = candidates[idx];
            deg[j] += 1;
            deg[i] += 1;
            edges.push((j, i));
        }
    }
    let g = Graph::new(n, edges)?;
    assert!(degeneracy_order(&g).degeneracy <= d);
    assert!(g.max_degree() <= max_degree);
    Ok(g)
}

/// Binomial random graph: pairs are visited in lexicographic order and each is
/// kept when its uniform draw is below `p`, so for a fixed seed the outputs
/// are nested in `p`.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("p must lie in [0, 1], got {p}")));
    }
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_sorted(n, edges))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenseVariant {
    HalfClique,
    Complete,
    Er,
}

impl FromStr for DenseVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half-clique" => Ok(Self::HalfClique),
            "complete" => Ok(Self::Complete),
            "er" => Ok(Self::Er),
            other => Err(Error::param(format!("unknown dense-base variant {other:?}"))),
        }
    }
}

impl fmt::Display for DenseVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::HalfClique => "half-clique",
            Self::Complete => "complete",
            Self::Er => "er",
        })
    }
}

/// `ceil(eps * n^2)`.
pub fn required_edges(n: usize, eps: Rational64) -> usize {
    let n2 = Rational64::from_integer((n * n) as i64);
    (eps * n2).ceil().to_integer().max(0) as usize
}

/// A graph with at least `eps * n^2` edges. `er` resamples `G(n, 2.5 eps)`
/// until the edge bound holds.
pub fn dense_base(n: usize, variant: DenseVariant, eps: Rational64, seed: u64) -> Result<Graph> {
    let required = required_edges(n, eps);
    let g = match variant {
        DenseVariant::HalfClique => {
            if eps > Rational64::new(1, 8) {
                return Err(Error::param("half-clique needs eps <= 1/8"));
            }
            let k = n.div_ceil(2);
            Graph::new(n, (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v))))?
        }
        DenseVariant::Complete => Graph::complete(n),
        DenseVariant::Er => {
            let p = (2.5 * crate::rational::to_f64(&eps)).min(1.0);
            let mut found = None;
            for attempt in 0..1000u64 {
                let g = sample_gnp(n, p, seed.wrapping_add(attempt))?;
                if g.edge_count() >= required {
                    found = Some(g);
                    break;
                }
            }
            found.ok_or_else(|| {
                Error::Generator(format!(
                    "G({n}, {p}) stayed below {required} edges in 1000 samples"
                ))
            })?
        }
    };
    if g.edge_count() < required {
        return Err(Error::DensityPrecondition {
            edges: g.edge_count(),
            required: format!("{required} (eps = {})", format_rational(&eps)),
        });
    }
    Ok(g)
}

/// A named generator with parameters and seed, written inline as
/// `family:key=val,...` (e.g. `power-cycle:n=12,d=2`).
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    PowerCycle { n: usize, d: usize },
    PowerPath { n: usize, d: usize },
    KdGadget { n: usize, d: usize },
    CliqueFactor { n: usize, r: usize },
    RandomRegular { n: usize, d: usize, seed: u64 },
    RandomDegenerate { n: usize, d: usize, delta: usize, seed: u64 },
    DenseBase { n: usize, variant: DenseVariant, eps: Rational64, seed: u64 },
    Gnp { n: usize, p: f64, seed: u64 },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Graph> {
        match *self {
            Self::PowerCycle { n, d } => power_of_cycle(n, d),
            Self::PowerPath { n, d } => power_of_path(n, d),
            Self::KdGadget { n, d } => kd_gadget(n, d),
            Self::CliqueFactor { n, r } => clique_factor(n, r),
            Self::RandomRegular { n, d, seed } => random_regular(n, d, seed),
            Self::RandomDegenerate { n, d, delta, seed } => random_degenerate(n, d, delta, seed),
            Self::DenseBase { n, variant, eps, seed } => dense_base(n, variant, eps, seed),
            Self::Gnp { n, p, seed } => sample_gnp(n, p, seed),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::PowerCycle { .. } => "power-cycle",
            Self::PowerPath { .. } => "power-path",
            Self::KdGadget { .. } => "kd-gadget",
            Self::CliqueFactor { .. } => "clique-factor",
            Self::RandomRegular { .. } => "random-regular",
            Self::RandomDegenerate { .. } => "random-degenerate",
            Self::DenseBase { .. } => "dense-base",
            Self::Gnp { .. } => "gnp",
        }
    }

    /// Builds a spec from a family name and `key -> value` strings, as given on
    /// the command line. Missing seeds default to 0.
    pub fn from_params(family: &str, params: &[(String, String)]) -> Result<Self> {
        let get = |key: &str| params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let known: &[&str] = match family {
            "power-cycle" | "power-path" | "kd-gadget" => &["n", "d"],
            "clique-factor" => &["n", "r"],
            "random-regular" => &["n", "d", "seed"],
            "random-degenerate" => &["n", "d", "delta", "seed"],
            "dense-base" => &["n", "variant", "eps", "seed"],
            "gnp" => &["n", "p", "seed"],
            other => return Err(Error::param(format!("unknown generator family {other:?}"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            return Err(Error::param(format!("{family} does not take parameter {k:?}")));
        }
        let num = |key: &str| -> Result<usize> {
            get(key)
                .ok_or_else(|| Error::param(format!("{family} needs {key}=")))?
                .parse()
                .map_err(|_| Error::param(format!("{key} must be a non-negative integer")))
        };
        let seed = || -> Result<u64> {
            get("seed")
                .map(|s| s.parse().map_err(|_| Error::param("seed must be a u64")))
                .unwrap_or(Ok(0))
        };
        Ok(match family {
            "power-cycle" => Self::PowerCycle { n: num("n")?, d: num("d")? },
            "power-path" => Self::PowerPath { n: num("n")?, d: num("d")? },
            "kd-gadget" => Self::KdGadget { n: num("n")?, d: num("d")? },
            "clique-factor" => Self::CliqueFactor { n: num("n")?, r: num("r")? },
            "random-regular" => Self::RandomRegular { n: num("n")?, d: num("d")?, seed: seed()? },
            "random-degenerate" => Self::RandomDegenerate {
                n: num("n")?,
                d: num("d")?,
                delta: num("delta")?,
                seed: seed()?,
            },
            "dense-base" => Self::DenseBase {
                n: num("n")?,
                variant: get("variant").unwrap_or("half-clique").parse()?,
                eps: parse_rational(get("eps").ok_or_else(|| Error::param("dense-base needs eps="))?)?,
                seed: seed()?,
            },
            "gnp" => Self::Gnp {
                n: num("n")?,
                p: get("p")
                    .ok_or_else(|| Error::param("gnp needs p="))?
                    .parse()
                    .map_err(|_| Error::param("p must be a number"))?,
                seed: seed()?,
            },
            _ => unreachable!(),
        })
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = Vec::new();
        for kv in rest.split(',').filter(|x| !x.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::param(format!("expected key=value, got {kv:?}")))?;
            params.push((k.trim().to_string(), v.trim().to_string()));
        }
        Self::from_params(family.trim(), &params)
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family())?;
        match self {
            Self::PowerCycle { n, d } | Self::PowerPath { n, d } | Self::KdGadget { n, d } => {
                write!(f, "n={n},d={d}")
            }
            Self::CliqueFactor { n, r } => write!(f, "n={n},r={r}"),
            Self::RandomRegular { n, d, seed } => write!(f, "n={n},d={d},seed={seed}"),
            Self::RandomDegenerate { n, d, delta, seed } => {
                write!(f, "n={n},d={d},delta={delta},seed={seed}")
            }
            Self::DenseBase { n, variant, eps, seed } => {
                write!(f, "n={n},variant={variant},eps={},seed={seed}", format_rational(eps))
            }
            Self::Gnp { n, p, seed } => write!(f, "n={n},p={p},seed={seed}"),
        }
    }
}

impl Serialize for GeneratorSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
