mod config;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use linclique::cliques::{
    contains_linear_clique, embed_triple_cliques, linear_clique, tripartite_seed, verify_copy,
};
use linclique::cliques::{Containment, CopyCertificate};
use linclique::density::{
    asym_max_k_density, clique_density_closed_forms, max_k_density, remark_comparison,
};
use linclique::experiments::{
    run_sweep, to_csv, to_json, Grid, SeedHypergraph, SweepConfig, Target,
};
use linclique::index::{audit_output, ghrl_pipeline, Delta2, PipelineConfig};
use linclique::io::{
    format_hypergraph, format_partition, parse_partition, read_edge_list, read_hypergraph, EdgeList,
};
use linclique::janson::{
    exact_nonexistence_oracle, janson_bound, janson_family, janson_parameters,
};
use linclique::janson::{JansonInput, OracleMode, EXACT_GROUND_LIMIT};
use linclique::ramsey::{family_ramsey_audit, Pattern};
use linclique::random::{sample_binomial_3graph, RngSpec};
use linclique::rational::{fmt_rational, parse_rational};
use linclique::regularity::{
    pair_regularity_audit, strong_regularity_check, triangle_count_window, weak_regularity_audit,
    AuditMode, Certify, StrongSearch,
};
use linclique::tuple::{tuple_band_audit, TupleMode};
use linclique::{Graph2, Hypergraph3, Rational, Vertex, VertexPartition};

#[derive(Parser, Debug)]
#[command(
    name = "linclique",
    version,
    about = "Linear cliques in randomly perturbed dense 3-graphs"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `key = value` file supplying any flag not given on the command line.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Maximum k-density, closed forms and asymmetric densities.
    Density(DensityArgs),
    /// Generate linear cliques or search a host for one.
    #[command(subcommand)]
    Clique(CliqueCmd),
    /// Sample ℍ(n,p), optionally on top of a seed 3-graph.
    Sample(SampleArgs),
    /// Decide Γ → (F1, F2), optionally restricted to copy families.
    Arrow(ArrowArgs),
    /// Pair, weak, strong and triad regularity audits.
    #[command(subcommand)]
    Regularity(RegularityCmd),
    /// Run the regularity refinement pipeline.
    Refine(RefineArgs),
    /// Audit the joint-link band of t-tuples.
    TupleAudit(TupleArgs),
    /// Janson parameters, bound and exact nonexistence probability.
    Janson(JansonArgs),
    /// Monte Carlo sweep over a probability grid.
    Sweep(SweepArgs),
    /// Embed K̃_3r into a complete tripartite 3-graph from three K̃_r copies.
    Embed(EmbedArgs),
}

#[derive(Args, Debug)]
struct DensityArgs {
    /// Use the linear clique K̃_t.
    #[arg(long, conflicts_with = "edges")]
    clique: Option<usize>,
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Second hypergraph for the asymmetric density m_k(F1, F2).
    #[arg(long)]
    asym: Option<PathBuf>,
    /// Second graph as a linear clique K̃_t.
    #[arg(long, conflicts_with = "asym")]
    asym_clique: Option<usize>,
    /// Report M_{t,t/2} against m_3(K̃_{t-1}) for the given even t.
    #[arg(long)]
    remark: bool,
}

#[derive(Subcommand, Debug)]
enum CliqueCmd {
    Gen {
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    Contains {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        budget: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    /// Seed 3-graph H; the output is H ∪ ℍ(n,p).
    #[arg(long)]
    base: Option<PathBuf>,
    /// Use the complete tripartite seed as H.
    #[arg(long, conflicts_with = "base")]
    tripartite: bool,
}

#[derive(Args, Debug)]
struct ArrowArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long, default_value = "clique:t=3")]
    f1: String,
    #[arg(long, default_value = "clique:t=3")]
    f2: String,
    /// Vertex sets (one per line) of F1-copies that need not be avoided in red.
    #[arg(long)]
    exclude1: Option<PathBuf>,
    #[arg(long)]
    exclude2: Option<PathBuf>,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    parts: Option<PathBuf>,
    /// Density as `p/q` or a decimal.
    #[arg(long)]
    d: String,
    #[arg(long)]
    delta: f64,
    #[arg(long, value_enum, default_value_t = Mode::Sampled)]
    mode: Mode,
    #[arg(long, default_value_t = 32)]
    samples: usize,
}

#[derive(Subcommand, Debug)]
enum RegularityCmd {
    /// (δ,d)-regularity of a bipartite graph (k=2 edge list, two parts).
    Pair(AuditArgs),
    /// Weak regularity of a 3-graph on three parts.
    Weak(AuditArgs),
    /// (δ,d,r)-regularity of a 3-graph relative to a triad.
    Strong {
        #[command(flatten)]
        audit: AuditArgs,
        /// Triad graph P (k=2); defaults to the complete tripartite graph.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        r: usize,
    },
    /// Triangle-counting windows of a triad (k=2 edge list, three parts).
    Triad {
        #[command(flatten)]
        audit: AuditArgs,
        /// Count only triangles meeting the first `n` vertices of the first part.
        #[arg(long)]
        two_sided: Option<usize>,
        /// Skip the regularity certification of the three pairs.
        #[arg(long)]
        force: bool,
    },
}

#[derive(Args, Debug)]
struct RefineArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    delta3: f64,
    /// Constant δ2; defaults to min(0.1, ℓ^-3).
    #[arg(long)]
    delta2: Option<f64>,
    #[arg(long, default_value_t = 2)]
    ell0: usize,
    #[arg(long, default_value_t = 3)]
    t0: usize,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, default_value_t = 4)]
    ell_max: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 8)]
    samples: usize,
    /// Write the refinement trace JSON here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the final vertex partition here.
    #[arg(long)]
    partition: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TupleModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug)]
struct TupleArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    parts: PathBuf,
    /// Triad graph P (k=2); defaults to the complete tripartite graph.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    d3: String,
    #[arg(long)]
    d2: String,
    #[arg(long)]
    eps: f64,
    #[arg(long, value_enum, default_value_t = TupleModeArg::Exhaustive)]
    mode: TupleModeArg,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

#[derive(Args, Debug)]
struct JansonArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long, default_value = "clique:t=2")]
    pattern: String,
    #[arg(long)]
    p: f64,
    /// Monte Carlo trials when the ground set is too large for exact enumeration.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    t: usize,
    #[arg(long, default_value_t = 100)]
    trials_per_point: usize,
    /// Comma-separated probabilities.
    #[arg(long, conflicts_with_all = ["cs", "rho"])]
    grid: Option<String>,
    /// Comma-separated constants C for p = C·n^(-1/ρ).
    #[arg(long, requires = "rho")]
    cs: Option<String>,
    /// Exponent ρ as `p/q`.
    #[arg(long, requires = "cs")]
    rho: Option<String>,
    #[arg(long, default_value = "containment")]
    target: String,
    /// `tripartite`, `file:PATH` or `density:D`.
    #[arg(long, default_value = "tripartite")]
    seed_hypergraph: String,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    s: usize,
}

fn rational_arg(s: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| anyhow!("not a rational: {:?}", s))
}

fn float_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .with_context(|| format!("not a number: {:?}", x))
        })
        .collect()
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_h(path: &Path) -> Result<Hypergraph3> {
    read_hypergraph(path).with_context(|| format!("reading {}", path.display()))
}

fn read_graph(path: &Path) -> Result<Graph2> {
    match read_edge_list(path).with_context(|| format!("reading {}", path.display()))? {
        EdgeList::Two(g) => Ok(g),
        EdgeList::Three(_) => bail!("{}: expected a graph (k=2)", path.display()),
    }
}

fn read_parts(path: &Path, n: usize) -> Result<VertexPartition> {
    parse_partition(&read_text(path)?, n).with_context(|| format!("reading {}", path.display()))
}

fn with_parts(g: &Graph2, parts: &VertexPartition) -> Result<Graph2> {
    Ok(Graph2::from_edges(
        g.n(),
        g.edges(),
        Some(parts.parts().to_vec()),
    )?)
}

fn complete_triad(v: &VertexPartition) -> Result<Graph2> {
    Ok(Graph2::complete_multipartite(v.n(), v.parts())?)
}

fn read_vertex_sets(path: &Path) -> Result<Vec<Vec<Vertex>>> {
    let mut out = Vec::new();
    for (i, line) in read_text(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let set: Vec<Vertex> = line
            .split_whitespace()
            .map(|x| {
                x.parse()
                    .with_context(|| format!("{} line {}", path.display(), i + 1))
            })
            .collect::<Result<_>>()?;
        out.push(set);
    }
    Ok(out)
}

fn audit_mode(a: &AuditArgs, seed: u64) -> AuditMode {
    match a.mode {
        Mode::Exact => AuditMode::Exact,
        Mode::Sampled => AuditMode::Sampled {
            samples: a.samples,
            spec: RngSpec::from_seed(seed),
        },
    }
}

/// The report: JSON, or one `key,value` row per top-level field.
enum Report {
    Json(Value),
    Text(String),
}

fn render(report: Report, format: Format) -> String {
    match report {
        Report::Text(s) => s,
        Report::Json(v) => match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&v).expect("JSON value serializes");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = String::from("key,value\n");
                if let Value::Object(map) = v {
                    for (k, val) in map {
                        let cell = match val {
                            Value::String(x) => x,
                            Value::Null => String::new(),
                            other => other.to_string(),
                        };
                        if cell.contains(',') || cell.contains('"') {
                            s.push_str(&format!("{},\"{}\"\n", k, cell.replace('"', "\"\"")));
                        } else {
                            s.push_str(&format!("{},{}\n", k, cell));
                        }
                    }
                }
                s
            }
        },
    }
}

fn density(a: &DensityArgs) -> Result<Report> {
    let (family, forms) = match (&a.clique, &a.edges) {
        (Some(t), None) => {
            let c = linear_clique(*t, a.k)?;
            let forms = clique_density_closed_forms(*t, a.k).ok();
            (c.edges, forms)
        }
        (None, Some(path)) => {
            let h = read_h(path)?;
            if a.k != 3 {
                bail!("edge files are 3-graphs; use --k 3");
            }
            (
                h.edges().iter().map(|e| e.to_vec()).collect::<Vec<_>>(),
                None,
            )
        }
        _ => bail!("give exactly one of --clique or --edges"),
    };
    let second: Option<Vec<Vec<Vertex>>> = match (&a.asym, &a.asym_clique) {
        (Some(p), None) => Some(read_h(p)?.edges().iter().map(|e| e.to_vec()).collect()),
        (None, Some(t)) => Some(linear_clique(*t, a.k)?.edges),
        _ => None,
    };
    let mut out = serde_json::Map::new();
    let r = max_k_density(&family, a.k)?;
    out.insert("m_k".into(), json!(fmt_rational(&r.value)));
    out.insert("witness".into(), json!(r.witness));
    if let Some(f) = forms {
        out.insert("closed_form_m_k".into(), json!(fmt_rational(&f.m_k)));
        out.insert("closed_form_m".into(), json!(fmt_rational(&f.m_t)));
    }
    if let Some(g) = second {
        let r = asym_max_k_density(&family, &g, a.k)?;
        out.insert("asym_m_k".into(), json!(fmt_rational(&r.value)));
        out.insert("asym_witness".into(), json!(r.witness));
    }
    if a.remark {
        let t = a.clique.ok_or_else(|| anyhow!("--remark needs --clique"))?;
        let c = remark_comparison(t)?;
        out.insert("remark_m_asym".into(), json!(fmt_rational(&c.m_asym)));
        out.insert("remark_m_prev".into(), json!(fmt_rational(&c.m_prev)));
        out.insert("remark_holds".into(), json!(c.holds));
    }
    Ok(Report::Json(Value::Object(out)))
}

fn clique(c: &CliqueCmd, format: Format) -> Result<Report> {
    match c {
        CliqueCmd::Gen { t, k } => {
            let lc = linear_clique(*t, *k)?;
            if format == Format::Json {
                return Ok(Report::Json(json!({
                    "t": lc.t, "k": lc.k, "n": lc.n, "branch": lc.branch, "edges": lc.edges,
                })));
            }
            let mut s = format!("n={} k={}\n", lc.n, lc.k);
            for e in &lc.edges {
                let row: Vec<String> = e.iter().map(|v| v.to_string()).collect();
                s.push_str(&row.join(" "));
                s.push('\n');
            }
            Ok(Report::Text(s))
        }
        CliqueCmd::Contains { edges, t, budget } => {
            let h = read_h(edges)?;
            let (found, cert, explored) = match contains_linear_clique(&h, *t, *budget)? {
                Containment::Found(c) => {
                    if !verify_copy(&h, &c, *t, None).valid {
                        bail!("internal error: certificate failed verification");
                    }
                    (json!(true), c.to_json(), Value::Null)
                }
                Containment::Absent => (json!(false), Value::Null, Value::Null),
                Containment::Inconclusive { explored } => {
                    (Value::Null, Value::Null, json!(explored))
                }
            };
            Ok(Report::Json(
                json!({"found": found, "certificate": cert, "explored": explored}),
            ))
        }
    }
}

fn sample(a: &SampleArgs, seed: u64) -> Result<Report> {
    let r = sample_binomial_3graph(a.n, a.p, &RngSpec::from_seed(seed))?;
    let h = if let Some(p) = &a.base {
        read_h(p)?.union(&r)?
    } else if a.tripartite {
        tripartite_seed(a.n)?.0.union(&r)?
    } else {
        r
    };
    Ok(Report::Text(format_hypergraph(&h)))
}

fn arrow(a: &ArrowArgs) -> Result<Report> {
    let gamma = read_h(&a.edges)?;
    let f1 = Pattern::parse(&a.f1)?;
    let f2 = Pattern::parse(&a.f2)?;
    let ex1 = a
        .exclude1
        .as_deref()
        .map(read_vertex_sets)
        .transpose()?
        .unwrap_or_default();
    let ex2 = a
        .exclude2
        .as_deref()
        .map(read_vertex_sets)
        .transpose()?
        .unwrap_or_default();
    let v = family_ramsey_audit(&gamma, &f1, &f2, &ex1, &ex2, a.budget)?;
    let certificate = v.coloring.as_ref().map(|cols| {
        let (red, blue): (Vec<_>, Vec<_>) = gamma
            .edges()
            .iter()
            .zip(cols)
            .partition(|(_, c)| **c == linclique::Color::Red);
        json!({
            "red": red.into_iter().map(|(e, _)| e).collect::<Vec<_>>(),
            "blue": blue.into_iter().map(|(e, _)| e).collect::<Vec<_>>(),
        })
    });
    Ok(Report::Json(json!({
        "arrows": v.arrows,
        "explored": v.explored,
        "certificate": certificate,
        "copies_f1": v.copies_f1,
        "copies_f2": v.copies_f2,
    })))
}

fn need_parts(a: &AuditArgs) -> Result<&Path> {
    a.parts
        .as_deref()
        .ok_or_else(|| anyhow!("--parts is required"))
}

fn regularity(c: &RegularityCmd, seed: u64) -> Result<Report> {
    let v = match c {
        RegularityCmd::Pair(a) => {
            let g = read_graph(&a.edges)?;
            let parts = read_parts(need_parts(a)?, g.n())?;
            if parts.num_parts() != 2 {
                bail!("pair audits need two parts");
            }
            let d = rational_arg(&a.d)?;
            serde_json::to_value(pair_regularity_audit(
                &with_parts(&g, &parts)?,
                &d,
                a.delta,
                audit_mode(a, seed),
            )?)?
        }
        RegularityCmd::Weak(a) => {
            let h = read_h(&a.edges)?;
            let parts = read_parts(need_parts(a)?, h.n())?;
            if parts.num_parts() != 3 {
                bail!("weak audits need three parts");
            }
            let d = rational_arg(&a.d)?;
            let ps = [parts.part(0), parts.part(1), parts.part(2)];
            serde_json::to_value(weak_regularity_audit(
                &h,
                ps,
                &d,
                a.delta,
                audit_mode(a, seed),
            )?)?
        }
        RegularityCmd::Strong { audit: a, graph, r } => {
            let h = read_h(&a.edges)?;
            let parts = read_parts(need_parts(a)?, h.n())?;
            let p = match graph {
                Some(path) => with_parts(&read_graph(path)?, &parts)?,
                None => complete_triad(&parts)?,
            };
            let d = rational_arg(&a.d)?;
            let search = match a.mode {
                Mode::Exact => StrongSearch::ExactBoxes,
                Mode::Sampled => StrongSearch::Sampled {
                    samples: a.samples,
                    spec: RngSpec::from_seed(seed),
                },
            };
            serde_json::to_value(strong_regularity_check(
                &h, &p, &d, a.delta, *r, None, search,
            )?)?
        }
        RegularityCmd::Triad {
            audit: a,
            two_sided,
            force,
        } => {
            let g = read_graph(&a.edges)?;
            let parts = read_parts(need_parts(a)?, g.n())?;
            if parts.num_parts() != 3 {
                bail!("triad windows need three parts");
            }
            let p = with_parts(&g, &parts)?;
            let d = linclique::rational::to_f64(&rational_arg(&a.d)?);
            let certify = if *force {
                Certify::Force
            } else {
                Certify::Audit {
                    samples: a.samples,
                    spec: RngSpec::from_seed(seed),
                }
            };
            let first = parts.part(0);
            let xp = two_sided.map(|k| first[..k.min(first.len())].to_vec());
            serde_json::to_value(triangle_count_window(
                &p,
                d,
                a.delta,
                xp.as_deref(),
                certify,
            )?)?
        }
    };
    Ok(Report::Json(v))
}

fn refine(a: &RefineArgs, seed: u64) -> Result<Report> {
    let h = read_h(&a.edges)?;
    let mut cfg = PipelineConfig::new(a.delta3, seed);
    if let Some(d) = a.delta2 {
        cfg.delta2 = Delta2::Constant { value: d };
    }
    cfg.ell0 = a.ell0;
    cfg.t0 = a.t0;
    cfg.max_iter = a.max_iter;
    cfg.ell_max = a.ell_max;
    cfg.r = a.r;
    cfg.samples = a.samples;
    let out = ghrl_pipeline(&h, &cfg)?;
    if let Some(path) = &a.trace {
        let mut s = serde_json::to_string_pretty(&out.trace)?;
        s.push('\n');
        std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &a.partition {
        std::fs::write(path, format_partition(&out.v))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let ell = out.b.check_equitable()?;
    let d2 = cfg.delta2.at(ell);
    let audit = audit_output(&h, &out.v, &out.b, d2, cfg.samples, &RngSpec::new(seed, 1))?;
    Ok(Report::Json(json!({
        "reason": out.trace.reason,
        "iterations": out.trace.iterations.len(),
        "parts": out.v.num_parts(),
        "ell": ell,
        "final_index": fmt_rational(&out.trace.final_index),
        "final_irregular_mass": fmt_rational(&out.trace.final_irregular_mass),
        "audit_pass": audit.pass(),
        "audit": audit,
    })))
}

fn tuple_audit(a: &TupleArgs, seed: u64) -> Result<Report> {
    let h = read_h(&a.edges)?;
    let parts = read_parts(&a.parts, h.n())?;
    if parts.num_parts() != 3 {
        bail!("tuple audits need three parts");
    }
    let p = match &a.graph {
        Some(path) => with_parts(&read_graph(path)?, &parts)?,
        None => complete_triad(&parts)?,
    };
    let mode = match a.mode {
        TupleModeArg::Exhaustive => TupleMode::Exhaustive,
        TupleModeArg::Sampled => TupleMode::Sampled {
            samples: a.samples,
            spec: RngSpec::from_seed(seed),
        },
    };
    let r = tuple_band_audit(
        &h,
        &p,
        a.t,
        &rational_arg(&a.d3)?,
        &rational_arg(&a.d2)?,
        a.eps,
        mode,
    )?;
    Ok(Report::Json(serde_json::to_value(r)?))
}

fn janson(a: &JansonArgs, seed: u64) -> Result<Report> {
    let host = read_h(&a.edges)?;
    let pattern = Pattern::parse(&a.pattern)?;
    let family = janson_family(&host, &pattern)?;
    let input = JansonInput { family, p: a.p };
    let j = janson_parameters(&input)?;
    let bound = janson_bound(j.lambda, j.delta)?;
    let spec = RngSpec::from_seed(seed);
    let ground: usize = {
        let mut all: Vec<_> = input.family.iter().flatten().collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    };
    let oracle = if ground <= EXACT_GROUND_LIMIT {
        Some(exact_nonexistence_oracle(
            &input,
            OracleMode::Auto { trials: 1, spec },
        )?)
    } else if let Some(trials) = a.trials {
        Some(exact_nonexistence_oracle(
            &input,
            OracleMode::MonteCarlo { trials, spec },
        )?)
    } else {
        None
    };
    Ok(Report::Json(json!({
        "copies": input.family.len(),
        "ground": ground,
        "lambda": j.lambda,
        "delta": j.delta,
        "bound": bound,
        "probability": oracle.map(|o| o.probability),
        "exact": oracle.map(|o| o.exact),
        "ci": oracle.and_then(|o| o.ci),
    })))
}

fn sweep_config(a: &SweepArgs, seed: u64) -> Result<SweepConfig> {
    let grid = match (&a.grid, &a.cs, &a.rho) {
        (Some(g), None, None) => Grid::Points(float_list(g)?),
        (None, Some(cs), Some(rho)) => Grid::Scaled {
            cs: float_list(cs)?,
            rho: rational_arg(rho)?,
        },
        _ => bail!("give either --grid or both --cs and --rho"),
    };
    let seed_hypergraph = match a.seed_hypergraph.split_once(':') {
        None if a.seed_hypergraph == "tripartite" => SeedHypergraph::Tripartite,
        Some(("file", path)) => SeedHypergraph::Given(read_h(Path::new(path))?),
        Some(("density", d)) => {
            SeedHypergraph::TripartiteDensity(d.parse().context("seed density")?)
        }
        _ => bail!("--seed-hypergraph must be tripartite, file:PATH or density:D"),
    };
    Ok(SweepConfig {
        n: a.n,
        t: a.t,
        seed,
        trials_per_point: a.trials_per_point,
        grid,
        target: a.target.parse::<Target>()?,
        seed_hypergraph,
        budget: a.budget,
    })
}

fn sweep(a: &SweepArgs, seed: u64, format: Format) -> Result<Report> {
    let r = run_sweep(&sweep_config(a, seed)?)?;
    Ok(Report::Text(match format {
        Format::Csv => to_csv(&r),
        Format::Json => to_json(&r),
    }))
}

fn embed(a: &EmbedArgs, seed: u64) -> Result<Report> {
    use rand::seq::SliceRandom;
    let n = 3 * a.s;
    let parts = VertexPartition::contiguous(n, 3)?;
    let mut rng = RngSpec::from_seed(seed).rng();
    let base = if a.r == 2 {
        CopyCertificate {
            branch: vec![0, 1],
            apex: [((0, 1), 2)].into_iter().collect(),
        }
    } else {
        linear_clique(a.r, 3)?.identity_certificate()?
    };
    let ks: Vec<CopyCertificate> = (0..3)
        .map(|i| {
            let mut pool = parts.part(i).to_vec();
            pool.shuffle(&mut rng);
            CopyCertificate {
                branch: base.branch.iter().map(|&b| pool[b]).collect(),
                apex: base.apex.iter().map(|(&ij, &w)| (ij, pool[w])).collect(),
            }
        })
        .collect();
    let (cert, copy) = embed_triple_cliques(&parts, [&ks[0], &ks[1], &ks[2]])?;
    let mut host = tripartite_seed(n)?.0;
    for k in &ks {
        host = host.union(&Hypergraph3::from_edges(n, k.edges())?)?;
    }
    let check = verify_copy(&host, &cert, 3 * a.r, None);
    let placed: BTreeMap<usize, Value> = ks
        .iter()
        .enumerate()
        .map(|(i, k)| (i, k.to_json()))
        .collect();
    Ok(Report::Json(json!({
        "t": 3 * a.r,
        "vertices": cert.vertices().len(),
        "edges": copy.edge_count(),
        "verified": check.valid,
        "certificate": cert.to_json(),
        "placed": placed,
    })))
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    if let Some(t) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let report = match &cli.cmd {
        Cmd::Density(a) => density(a)?,
        Cmd::Clique(c) => clique(c, g.format)?,
        Cmd::Sample(a) => sample(a, g.seed)?,
        Cmd::Arrow(a) => arrow(a)?,
        Cmd::Regularity(c) => regularity(c, g.seed)?,
        Cmd::Refine(a) => refine(a, g.seed)?,
        Cmd::TupleAudit(a) => tuple_audit(a, g.seed)?,
        Cmd::Janson(a) => janson(a, g.seed)?,
        Cmd::Sweep(a) => sweep(a, g.seed, g.format)?,
        Cmd::Embed(a) => embed(a, g.seed)?,
    };
    let text = render(report, g.format);
    match &g.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{}", text),
    }
    Ok(())
}

fn main() {
    let result = config::merge_config(std::env::args().collect())
        .and_then(|args| run(Cli::parse_from(args)));
    if let Err(e) = result {
        eprintln!("error: {:#}", e);
        std::process::exit(1);
    }
}
