use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use perturb_core::density::{check_small_density, m1_bruteforce, m1_exact, DEFAULT_ENUMERATION_BUDGET, DEFAULT_ORACLE_MAX_N};
use perturb_core::embed::{exact_spanning_embed, two_phase_embed, Embedding, ExactOutcome, TwoPhaseOutcome, TwoPhaseParams};
use perturb_core::experiments::{threshold_scan, GraphSource, Method, PGrid, TrialConfig};
use perturb_core::expansion::expansion_check;
use perturb_core::generators::GeneratorSpec;
use perturb_core::io::{read_graph, save_graph};
use perturb_core::rational::{format_rational, parse_rational};
use perturb_core::reduction::{run_reduction, AugmentRule, KChoice, OrientRule, PipelineParams, StarSelection, Verdict};
use perturb_core::spread::{estimate_vertex_spread, sample_spread_embedding};
use perturb_core::Graph;

/// Exit status when a check ran to completion and reported a violation.
const CHECK_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "perturb", version, about = "Certificates and containment experiments for randomly perturbed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list
    Gen(GenArgs),
    /// Exact 1-density max e(S)/(|S|-1)
    M1 {
        file: PathBuf,
        /// Cross-check with brute force up to this many vertices
        #[arg(long, default_value_t = DEFAULT_ORACLE_MAX_N)]
        oracle_max_n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check e(S) <= d(|S|-1) - 1/2 for connected S with 2 <= |S| <= K/2
    Cond2 {
        file: PathBuf,
        #[arg(long)]
        d: String,
        #[arg(long = "K")]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u64,
    },
    /// Independent-set / in-star reduction with 1-density certificate
    Pipeline(PipelineArgs),
    /// Minimum edge boundary over small connected sets
    Expand {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        min_size: usize,
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        bound: usize,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u64,
    },
    /// Estimate the vertex spread of the star-respecting embedding sampler
    Spread(SpreadArgs),
    /// Look for a spanning copy of H in a host graph
    Embed(EmbedArgs),
    /// Containment trials for H in G ∪ G(n,p) over a grid of p
    Scan(ScanArgs),
}

#[derive(Args)]
struct GenArgs {
    /// power-cycle, power-path, kd-gadget, clique-factor, random-regular,
    /// random-degenerate, dense-base or gnp
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    delta: Option<usize>,
    /// Clique size for clique-factor
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    eps: Option<String>,
    /// half-clique, complete or er (dense-base)
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Clone)]
struct ReductionArgs {
    #[arg(long, default_value = "level")]
    rule: OrientRule,
    /// Ball radius, or `auto` for ceil(10 ln(20/gamma) / gamma)
    #[arg(long = "K", default_value = "20")]
    k: KChoice,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value = "2")]
    d: String,
    #[arg(long, default_value = "greedy-cover")]
    augment: AugmentRule,
    #[arg(long, default_value_t = 20)]
    max_retries: usize,
}

impl ReductionArgs {
    fn params(&self, seed: u64) -> Result<PipelineParams> {
        let mut p = PipelineParams::new(self.rule, self.k, self.gamma, parse_rational(&self.d)?, seed);
        p.augment = self.augment;
        p.max_retries = self.max_retries;
        Ok(p)
    }
}

#[derive(Args)]
struct PipelineArgs {
    file: PathBuf,
    #[command(flatten)]
    reduction: ReductionArgs,
    #[arg(long)]
    eps_prime: Option<String>,
    /// Margin the verdict enforces (default 0)
    #[arg(long)]
    verdict_eps: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SpreadArgs {
    #[arg(long = "H")]
    h: PathBuf,
    #[arg(long = "G")]
    g: PathBuf,
    #[arg(long)]
    eps: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample without in-stars (pure uniform placement)
    #[arg(long)]
    no_stars: bool,
    #[command(flatten)]
    reduction: ReductionArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long = "H")]
    h: PathBuf,
    /// Host graph; with --two-phase this is the dense part G
    #[arg(long)]
    host: PathBuf,
    /// Random part added to the host for --two-phase
    #[arg(long)]
    random: Option<PathBuf>,
    #[arg(long, conflicts_with = "two_phase")]
    exact: bool,
    #[arg(long)]
    two_phase: bool,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Time budget in seconds
    #[arg(long, default_value_t = 10.0)]
    timeout: f64,
    #[command(flatten)]
    reduction: ReductionArgs,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long = "H")]
    h: GraphSource,
    #[arg(long = "G")]
    g: GraphSource,
    /// `lo:hi:log:k`, `lo:hi:lin:k` or a comma-separated list
    #[arg(long)]
    p_grid: PGrid,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value = "auto")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    eps: Option<String>,
    /// Per-trial budget in seconds for the exact method
    #[arg(long, default_value_t = 10.0)]
    exact_budget: f64,
    /// Per-trial budget in seconds for the two-phase method
    #[arg(long, default_value_t = 2.0)]
    heuristic_budget: f64,
    #[command(flatten)]
    reduction: ReductionArgs,
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn status(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(CHECK_FAILED)
    }
}

fn load(path: &PathBuf) -> Result<Graph> {
    read_graph(path).with_context(|| format!("reading {}", path.display()))
}

fn gen(a: GenArgs) -> Result<ExitCode> {
    let mut params = vec![("n".to_string(), a.n.to_string())];
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            params.push((k.to_string(), v));
        }
    };
    push("d", a.d.map(|x| x.to_string()));
    push("delta", a.delta.map(|x| x.to_string()));
    push("r", a.r.map(|x| x.to_string()));
    push("eps", a.eps);
    push("variant", a.variant);
    push("p", a.p.map(|x| x.to_string()));
    push("seed", a.seed.map(|x| x.to_string()));
    let spec = GeneratorSpec::from_params(&a.family, &params)?;
    let g = spec.generate()?;
    save_graph(&g, &a.output)?;
    eprintln!("{spec}: n={} m={} -> {}", g.n(), g.edge_count(), a.output.display());
    Ok(ExitCode::SUCCESS)
}

fn m1(file: PathBuf, oracle_max_n: usize, json: bool) -> Result<ExitCode> {
    let g = load(&file)?;
    let value = m1_exact(&g)?;
    let oracle = if g.n() <= oracle_max_n {
        Some(m1_bruteforce(&g, oracle_max_n)?)
    } else {
        None
    };
    if let Some(o) = &oracle {
        if o.value() != value.value() {
            bail!(
                "exact {} disagrees with brute force {}",
                format_rational(&value.value()),
                format_rational(&o.value())
            );
        }
    }
    if json {
        print_json(&serde_json::json!({
            "m1": value,
            "oracle_checked": oracle.is_some(),
        }))?;
    } else {
        println!("m1 = {} ({:.6})", format_rational(&value.value()), perturb_core::rational::to_f64(&value.value()));
        println!("witness = {:?}", value.witness.as_slice());
    }
    Ok(ExitCode::SUCCESS)
}

fn cond2(file: PathBuf, d: String, k: usize, budget: u64) -> Result<ExitCode> {
    let g = load(&file)?;
    let report = check_small_density(&g, parse_rational(&d)?, k, budget)?;
    print_json(&report)?;
    Ok(status(report.passed()))
}

fn pipeline(a: PipelineArgs) -> Result<ExitCode> {
    let h = load(&a.file)?;
    let mut params = a.reduction.params(a.seed)?;
    if let Some(e) = &a.eps_prime {
        params.eps_prime = parse_rational(e)?;
    }
    if let Some(e) = &a.verdict_eps {
        params.verdict_eps = parse_rational(e)?;
    }
    let report = run_reduction(&h, &params)?.report;
    if a.json {
        print_json(&report)?;
    } else {
        let show = |v: &Option<perturb_core::density::DensityValue>| {
            v.as_ref().map_or("-".to_string(), |v| format_rational(&v.value()))
        };
        println!("K = {}, |V'| = {}, |X1| = {}, |X| = {}, |M-(X)| = {}", report.k_used, report.sizes.core, report.sizes.x1, report.sizes.x, report.sizes.star_arcs);
        println!("m1 before = {}, after = {}", show(&report.m1_before), show(&report.m1_after));
        println!("verdict = {:?}", report.verdict);
        if let Some(e) = &report.error {
            println!("error: {e}");
        }
    }
    Ok(status(report.verdict != Verdict::Fail))
}

fn expand(file: PathBuf, min_size: usize, max_size: usize, bound: usize, budget: u64) -> Result<ExitCode> {
    let g = load(&file)?;
    let report = expansion_check(&g, min_size, max_size, bound, budget)?;
    print_json(&report)?;
    Ok(status(report.passed()))
}

fn stars_for(h: &Graph, reduction: &ReductionArgs, seed: u64) -> Result<StarSelection> {
    let red = run_reduction(h, &reduction.params(seed)?)?;
    match red.selection {
        Some(s) => Ok(s),
        None => bail!(
            "star selection failed: {}",
            red.report.error.unwrap_or_else(|| "unknown".into())
        ),
    }
}

fn spread(a: SpreadArgs) -> Result<ExitCode> {
    let h = load(&a.h)?;
    let g = load(&a.g)?;
    let eps = parse_rational(&a.eps)?;
    let stars = if a.no_stars {
        StarSelection::empty()
    } else {
        stars_for(&h, &a.reduction, a.seed)?
    };
    let n = h.n();
    let q = 4.0 / (perturb_core::rational::to_f64(&eps) * n as f64);
    let est = estimate_vertex_spread(
        |s| Ok(sample_spread_embedding(&h, &stars, &g, eps, s)?.map().to_vec()),
        n,
        a.samples,
        q,
        a.seed,
    )?;
    if a.json {
        print_json(&serde_json::json!({ "star_arcs": stars.arcs.len(), "estimate": est }))?;
    } else {
        println!("star arcs = {}, q = 4/(eps n) = {q:.6}", stars.arcs.len());
        println!(
            "max P[phi(x)=y] = {:.6} at {:?}, interval [{:.6}, {:.6}]",
            est.s1_max, est.s1_arg, est.s1_lower, est.s1_upper
        );
        println!(
            "max pair probability = {:.6} over {} queries, q^2 = {:.6}",
            est.s2_max,
            est.s2_queries,
            q * q
        );
        println!("refuted: one-point {}, two-point {}", est.s1_refuted, est.s2_refuted);
    }
    Ok(status(!est.s1_refuted && !est.s2_refuted))
}

fn print_embedding(e: &Embedding) -> Result<()> {
    print_json(&serde_json::json!({ "found": true, "map": e.map(), "tags": e.tags() }))
}

fn embed(a: EmbedArgs) -> Result<ExitCode> {
    let h = load(&a.h)?;
    let host = load(&a.host)?;
    let budget = Duration::from_secs_f64(a.timeout);
    if !a.two_phase {
        let host = match &a.random {
            Some(r) => host.union(&load(r)?)?,
            None => host,
        };
        return Ok(match exact_spanning_embed(&h, &host, budget)? {
            ExactOutcome::Found(e) => {
                print_embedding(&e)?;
                ExitCode::SUCCESS
            }
            ExactOutcome::NoneExists => {
                print_json(&serde_json::json!({ "found": false, "outcome": "none" }))?;
                ExitCode::from(CHECK_FAILED)
            }
            ExactOutcome::Timeout => {
                print_json(&serde_json::json!({ "found": false, "outcome": "timeout" }))?;
                ExitCode::from(CHECK_FAILED)
            }
        });
    }
    let r = match &a.random {
        Some(r) => load(r)?,
        None => Graph::empty(host.n()),
    };
    let eps = match &a.eps {
        Some(e) => parse_rational(e)?,
        None => num_eps(&host),
    };
    let stars = stars_for(&h, &a.reduction, a.seed)?;
    let mut params = TwoPhaseParams::new(eps, a.seed);
    params.time_budget = Some(budget);
    Ok(match two_phase_embed(&h, &stars, &host, &r, &params)? {
        TwoPhaseOutcome::Found(e) => {
            print_embedding(&e)?;
            ExitCode::SUCCESS
        }
        TwoPhaseOutcome::NotFound { restarts } => {
            print_json(&serde_json::json!({ "found": false, "outcome": "not-found", "restarts": restarts }))?;
            ExitCode::from(CHECK_FAILED)
        }
        TwoPhaseOutcome::Timeout => {
            print_json(&serde_json::json!({ "found": false, "outcome": "timeout" }))?;
            ExitCode::from(CHECK_FAILED)
        }
    })
}

/// `e(G) / n^2`, the largest density parameter `G` satisfies.
fn num_eps(g: &Graph) -> num_rational::Rational64 {
    let n = g.n().max(1) as i64;
    num_rational::Rational64::new(g.edge_count() as i64, n * n)
}

fn scan(a: ScanArgs) -> Result<ExitCode> {
    let mut cfg = TrialConfig::new(a.h, a.g, a.p_grid, a.trials, a.method, a.seed);
    cfg.pipeline = a.reduction.params(a.seed)?;
    cfg.eps = a.eps.as_deref().map(parse_rational).transpose()?;
    cfg.exact_budget = Duration::from_secs_f64(a.exact_budget);
    cfg.heuristic_budget = Duration::from_secs_f64(a.heuristic_budget);
    let result = threshold_scan(&cfg)?;
    result.write_files(&a.out, a.json.as_deref())?;
    print!("{}", result.to_csv());
    let errors: u64 = result.rows.iter().map(|r| r.errors).sum();
    if errors > 0 {
        eprintln!("{errors} trials failed; see the JSON output for details");
    }
    Ok(status(errors == 0))
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Gen(a) => gen(a),
        Command::M1 { file, oracle_max_n, json } => m1(file, oracle_max_n, json),
        Command::Cond2 { file, d, k, budget } => cond2(file, d, k, budget),
        Command::Pipeline(a) => pipeline(a),
        Command::Expand { file, min_size, max_size, bound, budget } => expand(file, min_size, max_size, bound, budget),
        Command::Spread(a) => spread(a),
        Command::Embed(a) => embed(a),
        Command::Scan(a) => scan(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
