//! Seeded containment trials for `H ⊆ G ∪ G(n, p)` over a grid of `p`.
//!
//! Trial `i` at every grid point draws its random graph from seed `seed + i`,
//! so rows share one coupling: the same seed gives nested random graphs as
//! `p` grows. Trials run in parallel and are aggregated in `(p, index)` order.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::embed::{exact_spanning_embed, two_phase_embed, ExactOutcome, TwoPhaseOutcome, TwoPhaseParams};
use crate::error::{Error, Result};
use crate::generators::{sample_gnp, GeneratorSpec};
use crate::graph::Graph;
use crate::io::read_graph;
use crate::reduction::{run_reduction, KChoice, OrientRule, PipelineParams, StarSelection};
use crate::spread::uniform_permutation;
use crate::stats::{derive_seed, wilson_interval, Z95};

/// Largest vertex count for which `auto` picks the exact method.
pub const AUTO_EXACT_MAX_N: usize = 14;
/// Every this-many-th exact "no" is re-checked on a relabelled host.
pub const AUDIT_STRIDE: u64 = 20;
pub const THREADS_ENV: &str = "PERTURB_THREADS";

/// A graph given either inline as a generator spec or as an edge-list file.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    Spec(GeneratorSpec),
    File(PathBuf),
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph> {
        match self {
            Self::Spec(s) => s.generate(),
            Self::File(p) => read_graph(p),
        }
    }
}

impl FromStr for GraphSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if Path::new(s).is_file() {
            return Ok(Self::File(PathBuf::from(s)));
        }
        match s.parse::<GeneratorSpec>() {
            Ok(spec) => Ok(Self::Spec(spec)),
            Err(e) if s.contains(':') => Err(e),
            Err(_) => Ok(Self::File(PathBuf::from(s))),
        }
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Spec(s) => write!(f, "{s}"),
            Self::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl Serialize for GraphSource {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Grid of edge probabilities: `lo:hi:log:k`, `lo:hi:lin:k` or a comma list.
#[derive(Clone, Debug, PartialEq)]
pub enum PGrid {
    Log { lo: f64, hi: f64, points: usize },
    Linear { lo: f64, hi: f64, points: usize },
    List(Vec<f64>),
}

impl PGrid {
    /// Grid values in ascending order.
    pub fn values(&self) -> Vec<f64> {
        let spread = |lo: f64, hi: f64, k: usize, f: &dyn Fn(f64) -> f64| -> Vec<f64> {
            if k == 1 {
                return vec![lo];
            }
            (0..k)
                .map(|i| if i == k - 1 { hi } else { f(i as f64 / (k - 1) as f64) })
                .collect()
        };
        let mut v = match *self {
            Self::Log { lo, hi, points } => spread(lo, hi, points, &|t| lo * (hi / lo).powf(t)),
            Self::Linear { lo, hi, points } => spread(lo, hi, points, &|t| lo + (hi - lo) * t),
            Self::List(ref v) => v.clone(),
        };
        v.sort_by(f64::total_cmp);
        v
    }

    fn validate(&self) -> Result<()> {
        let in_unit = |p: f64| (0.0..=1.0).contains(&p);
        match *self {
            Self::Log { lo, hi, points } | Self::Linear { lo, hi, points } => {
                if points == 0 || !in_unit(lo) || !in_unit(hi) || lo > hi {
                    return Err(Error::param(format!("bad p-grid range {lo}..{hi} with {points} points")));
                }
                if matches!(self, Self::Log { .. }) && lo <= 0.0 {
                    return Err(Error::param("log p-grid needs lo > 0"));
                }
            }
            Self::List(ref v) => {
                if v.is_empty() || !v.iter().all(|&p| in_unit(p)) {
                    return Err(Error::param("p values must lie in [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

impl FromStr for PGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::param(format!("not a number: {x:?}")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let grid = match parts.as_slice() {
            [lo, hi, kind, k] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                let points = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::param(format!("bad point count {k:?}")))?;
                match kind.trim() {
                    "log" => Self::Log { lo, hi, points },
                    "lin" => Self::Linear { lo, hi, points },
                    other => return Err(Error::param(format!("unknown spacing {other:?}"))),
                }
            }
            [list] => Self::List(list.split(',').map(num).collect::<Result<_>>()?),
            _ => return Err(Error::param(format!("cannot parse p-grid {s:?}"))),
        };
        grid.validate()?;
        Ok(grid)
    }
}

impl fmt::Display for PGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Log { lo, hi, points } => write!(f, "{lo}:{hi}:log:{points}"),
            Self::Linear { lo, hi, points } => write!(f, "{lo}:{hi}:lin:{points}"),
            Self::List(v) => {
                let s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
                f.write_str(&s.join(","))
            }
        }
    }
}

impl Serialize for PGrid {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Auto,
    Exact,
    TwoPhase,
}

impl Method {
    pub fn resolve(self, n: usize) -> Method {
        match self {
            Self::Auto if n <= AUTO_EXACT_MAX_N => Self::Exact,
            Self::Auto => Self::TwoPhase,
            m => m,
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "exact" => Ok(Self::Exact),
            "two-phase" => Ok(Self::TwoPhase),
            other => Err(Error::param(format!("unknown method {other:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::Exact => "exact",
            Self::TwoPhase => "two-phase",
        })
    }
}

fn serialize_secs<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialConfig {
    #[serde(rename = "H")]
    pub h: GraphSource,
    #[serde(rename = "G")]
    pub g: GraphSource,
    pub p_grid: PGrid,
    pub trials: usize,
    pub method: Method,
    /// Trial `i` uses seed `seed + i` at every grid point.
    pub seed: u64,
    /// Star selection for the two-phase embedder.
    pub pipeline: PipelineParams,
    /// Density parameter of `G` for the spread sampler; `None` means
    /// `e(G) / n^2`.
    #[serde(serialize_with = "crate::rational::serde_opt_str::serialize")]
    pub eps: Option<Rational64>,
    #[serde(serialize_with = "serialize_secs")]
    pub exact_budget: Duration,
    #[serde(serialize_with = "serialize_secs")]
    pub heuristic_budget: Duration,
    pub restarts: usize,
    pub node_budget: u64,
    /// Exact search is refused above this many vertices.
    pub exact_max_n: usize,
}

impl TrialConfig {
    pub fn new(h: GraphSource, g: GraphSource, p_grid: PGrid, trials: usize, method: Method, seed: u64) -> Self {
        let defaults = TwoPhaseParams::new(Rational64::from_integer(0), 0);
        Self {
            h,
            g,
            p_grid,
            trials,
            method,
            seed,
            pipeline: PipelineParams::new(
                OrientRule::Level,
                KChoice::Fixed(20),
                0.1,
                Rational64::from_integer(2),
                seed,
            ),
            eps: None,
            exact_budget: Duration::from_secs(10),
            heuristic_budget: Duration::from_secs(2),
            restarts: defaults.restarts,
            node_budget: defaults.node_budget,
            exact_max_n: AUTO_EXACT_MAX_N,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Yes,
    /// Only the exact method answers "no".
    No,
    /// Only the heuristic gives up without an answer.
    NotFound,
    Timeout,
}

/// Everything a single trial needs besides `p` and the seed.
#[derive(Clone, Debug)]
pub struct TrialContext<'a> {
    pub h: &'a Graph,
    pub g: &'a Graph,
    pub method: Method,
    pub stars: &'a StarSelection,
    pub eps: Rational64,
    pub cfg: &'a TrialConfig,
}

/// Outcome of one trial plus whether an audit rerun disagreed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub outcome: Outcome,
    pub audited: bool,
    pub audit_disagrees: bool,
}

/// Samples `r = G(n, p)` from `seed` and decides or attempts `h ⊆ g ∪ r`.
pub fn containment_trial(ctx: &TrialContext<'_>, p: f64, seed: u64) -> Result<Outcome> {
    let n = ctx.h.n();
    if n != ctx.g.n() {
        return Err(Error::VertexCountMismatch(n, ctx.g.n()));
    }
    let r = sample_gnp(n, p, seed)?;
    match ctx.method.resolve(n) {
        Method::TwoPhase => {
            let params = TwoPhaseParams {
                eps: ctx.eps,
                seed: derive_seed(seed, 1),
                restarts: ctx.cfg.restarts,
                node_budget: ctx.cfg.node_budget,
                time_budget: Some(ctx.cfg.heuristic_budget),
            };
            Ok(match two_phase_embed(ctx.h, ctx.stars, ctx.g, &r, &params)? {
                TwoPhaseOutcome::Found(_) => Outcome::Yes,
                TwoPhaseOutcome::NotFound { .. } => Outcome::NotFound,
                TwoPhaseOutcome::Timeout => Outcome::Timeout,
            })
        }
        _ => {
            if n > ctx.cfg.exact_max_n {
                return Err(Error::TooLarge { n, cap: ctx.cfg.exact_max_n });
            }
            let host = ctx.g.union(&r)?;
            Ok(match exact_spanning_embed(ctx.h, &host, ctx.cfg.exact_budget)? {
                ExactOutcome::Found(_) => Outcome::Yes,
                ExactOutcome::NoneExists => Outcome::No,
                ExactOutcome::Timeout => Outcome::Timeout,
            })
        }
    }
}

/// Re-decides an exact "no" on a host relabelled by an independently seeded
/// permutation. Returns true when the rerun finds a copy.
fn audit_no(ctx: &TrialContext<'_>, p: f64, seed: u64) -> Result<bool> {
    let r = sample_gnp(ctx.h.n(), p, seed)?;
    let perm = uniform_permutation(ctx.h.n(), derive_seed(seed, 2));
    let host = ctx.g.union(&r)?.relabel(&perm)?;
    Ok(matches!(
        exact_spanning_embed(ctx.h, &host, ctx.cfg.exact_budget)?,
        ExactOutcome::Found(_)
    ))
}

fn run_trial(ctx: &TrialContext<'_>, p: f64, index: u64) -> Result<TrialRecord> {
    let seed = ctx.cfg.seed.wrapping_add(index);
    let outcome = containment_trial(ctx, p, seed)?;
    let audited = outcome == Outcome::No && index.is_multiple_of(AUDIT_STRIDE);
    let audit_disagrees = audited && audit_no(ctx, p, seed)?;
    Ok(TrialRecord {
        outcome,
        audited,
        audit_disagrees,
    })
}

/// `(p̂, lo, hi)` with the Wilson 95% interval; `p̂ = 0` for an empty sample.
pub fn summarize(successes: u64, trials: u64) -> (f64, f64, f64) {
    let (lo, hi) = wilson_interval(successes, trials, Z95);
    let phat = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
    (phat, lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    /// Successes over decided trials (timeouts and errors excluded).
    pub phat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub method: Method,
    pub timeouts: u64,
    pub seed: u64,
    pub no: u64,
    pub not_found: u64,
    pub errors: u64,
    pub first_error: Option<String>,
    pub audited: u64,
    pub audit_disagreements: u64,
}

impl ScanRow {
    pub fn decided(&self) -> u64 {
        self.trials - self.timeouts - self.errors
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: TrialConfig,
    pub n: usize,
    pub h_edges: usize,
    pub g_edges: usize,
    pub method: Method,
    #[serde(serialize_with = "crate::rational::serde_opt_str::serialize")]
    pub eps_used: Option<Rational64>,
    pub star_arcs: usize,
    pub star_selection_error: Option<String>,
    pub trial_seeds: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub provenance: Provenance,
    pub rows: Vec<ScanRow>,
}

pub const CSV_HEADER: &str = "p,trials,successes,phat,ci_lo,ci_hi,method,timeouts,seed";

impl ScanResult {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{:.6},{:.6},{:.6},{},{},{}",
                r.p, r.trials, r.successes, r.phat, r.ci_lo, r.ci_hi, r.method, r.timeouts, r.seed
            )
            .expect("writing to a String");
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn write_files(&self, csv: impl AsRef<Path>, json: Option<&Path>) -> Result<()> {
        std::fs::write(csv, self.to_csv())?;
        if let Some(path) = json {
            std::fs::write(path, self.to_json()?)?;
        }
        Ok(())
    }
}

/// Worker count from `PERTURB_THREADS`; `None` (all cores) when unset or 0.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => {
            let k: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::param(format!("{THREADS_ENV} must be a number, got {v:?}")))?;
            Ok((k > 0).then_some(k))
        }
    }
}

pub fn threshold_scan(cfg: &TrialConfig) -> Result<ScanResult> {
    threshold_scan_with_threads(cfg, threads_from_env()?)
}

/// Runs the scan on a dedicated pool of `threads` workers (all cores when
/// `None`). The result does not depend on the worker count.
pub fn threshold_scan_with_threads(cfg: &TrialConfig, threads: Option<usize>) -> Result<ScanResult> {
    if cfg.trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    cfg.p_grid.validate()?;
    let h = cfg.h.load()?;
    let g = cfg.g.load()?;
    let n = h.n();
    if n != g.n() {
        return Err(Error::VertexCountMismatch(n, g.n()));
    }
    let method = cfg.method.resolve(n);
    if method == Method::Exact && n > cfg.exact_max_n {
        return Err(Error::TooLarge { n, cap: cfg.exact_max_n });
    }

    let mut stars = StarSelection::empty();
    let mut star_error = None;
    let mut eps_used = None;
    if method == Method::TwoPhase {
        let reduction = run_reduction(&h, &cfg.pipeline)?;
        star_error = reduction.report.error.clone();
        if let Some(sel) = reduction.selection {
            stars = sel;
        }
        let nn = (n * n) as i64;
        eps_used = Some(cfg.eps.unwrap_or_else(|| Rational64::new(g.edge_count() as i64, nn.max(1))));
    }
    let ctx = TrialContext {
        h: &h,
        g: &g,
        method,
        stars: &stars,
        eps: eps_used.unwrap_or_else(|| Rational64::from_integer(0)),
        cfg,
    };

    let grid = cfg.p_grid.values();
    let jobs: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|pi| (0..cfg.trials as u64).map(move |i| (pi, i)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::param(format!("cannot build worker pool: {e}")))?;
    // collect keeps job order, so aggregation is independent of scheduling
    let records: Vec<Result<TrialRecord>> =
        pool.install(|| jobs.par_iter().map(|&(pi, i)| run_trial(&ctx, grid[pi], i)).collect());

    let mut rows = Vec::with_capacity(grid.len());
    for (pi, &p) in grid.iter().enumerate() {
        let mut row = ScanRow {
            p,
            trials: cfg.trials as u64,
            successes: 0,
            phat: 0.0,
            ci_lo: 0.0,
            ci_hi: 1.0,
            method,
            timeouts: 0,
            seed: cfg.seed,
            no: 0,
            not_found: 0,
            errors: 0,
            first_error: None,
            audited: 0,
            audit_disagreements: 0,
        };
        for rec in &records[pi * cfg.trials..(pi + 1) * cfg.trials] {
            match rec {
                Ok(r) => {
                    match r.outcome {
                        Outcome::Yes => row.successes += 1,
                        Outcome::No => row.no += 1,
                        Outcome::NotFound => row.not_found += 1,
                        Outcome::Timeout => row.timeouts += 1,
                    }
                    row.audited += r.audited as u64;
                    row.audit_disagreements += r.audit_disagrees as u64;
                }
                Err(e) => {
                    row.errors += 1;
                    row.first_error.get_or_insert_with(|| e.to_string());
                }
            }
        }
        (row.phat, row.ci_lo, row.ci_hi) = summarize(row.successes, row.decided());
        rows.push(row);
    }

    Ok(ScanResult {
        provenance: Provenance {
            tool: "perturb",
            version: env!("CARGO_PKG_VERSION"),
            config: cfg.clone(),
            n,
            h_edges: h.edge_count(),
            g_edges: g.edge_count(),
            method,
            eps_used,
            star_arcs: stars.arcs.len(),
            star_selection_error: star_error,
            trial_seeds: format!("{} + trial index", cfg.seed),
        },
        rows,
    })
}
