//! Monte Carlo sweeps of `Pr[H ∪ ℍ(n,p) has the target property]` over a grid
//! of probabilities, with Wilson intervals and CSV/JSON reports.
//!
//! Trial `i` draws one uniform variable per triple from its own substream and
//! keeps the triples below `p`, so the random 3-graphs of one trial are nested
//! across the grid.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cliques::{contains_linear_clique, tripartite_seed, verify_copy, Containment};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Hypergraph3, Triple};
use crate::ramsey::{decide_arrow, Pattern};
use crate::random::RngSpec;
use crate::rational::{to_f64, Rational};

const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95%; `(0, 1)` when there are no trials.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// `{e : U_e < p}` with one uniform `U_e` per triple in lexicographic order.
pub fn coupled_binomial(n: usize, p: f64, spec: &RngSpec) -> Result<Hypergraph3> {
    if !(0.0..=1.0).contains(&p) {
        return invalid("p must lie in [0, 1]");
    }
    let mut rng = spec.rng();
    let mut edges: Vec<Triple> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push([a, b, c]);
                }
            }
        }
    }
    Hypergraph3::from_edges(n, edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// `Γ → (K̃_t)_2`.
    ArrowSymmetric,
    /// `Γ → (K̃_t, K̃_{t/2})`.
    ArrowAsymmetric,
    /// `K̃_t ⊆ Γ`.
    Containment,
}

impl std::str::FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Target> {
        match s {
            "arrow-symmetric" | "arrow_symmetric" => Ok(Target::ArrowSymmetric),
            "arrow-asymmetric" | "arrow_asymmetric" => Ok(Target::ArrowAsymmetric),
            "containment" => Ok(Target::Containment),
            _ => invalid(format!("unknown target {:?}", s)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeedHypergraph {
    /// The complete tripartite 3-graph with near-equal parts.
    Tripartite,
    /// Each tripartite triple kept with probability `d`, drawn once per sweep.
    TripartiteDensity(f64),
    Given(Hypergraph3),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Grid {
    Points(Vec<f64>),
    /// `p = min(1, C·n^{−1/ρ})` for each `C`.
    Scaled {
        cs: Vec<f64>,
        rho: Rational,
    },
}

impl Grid {
    pub fn probabilities(&self, n: usize) -> Result<Vec<f64>> {
        let ps = match self {
            Grid::Points(ps) => ps.clone(),
            Grid::Scaled { cs, rho } => {
                let r = to_f64(rho);
                if r <= 0.0 {
                    return invalid("ρ must be positive");
                }
                cs.iter()
                    .map(|c| (c * (n as f64).powf(-1.0 / r)).min(1.0))
                    .collect()
            }
        };
        if ps.is_empty() {
            return invalid("the grid is empty");
        }
        if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return invalid("grid probabilities must lie in [0, 1]");
        }
        Ok(ps)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub t: usize,
    pub seed: u64,
    pub trials_per_point: usize,
    pub grid: Grid,
    pub target: Target,
    pub seed_hypergraph: SeedHypergraph,
    /// Search-node cap per trial decision.
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: f64,
    pub successes: u64,
    pub failures: u64,
    pub inconclusive: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub all_inconclusive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub version: String,
    pub seed: u64,
    pub n: usize,
    pub t: usize,
    pub target: Target,
    pub trials_per_point: usize,
    pub points: Vec<SweepPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Success,
    Failure,
    Inconclusive,
}

fn seed_graph(cfg: &SweepConfig) -> Result<Hypergraph3> {
    match &cfg.seed_hypergraph {
        SeedHypergraph::Tripartite => Ok(tripartite_seed(cfg.n)?.0),
        SeedHypergraph::TripartiteDensity(d) => {
            if !(0.0..=1.0).contains(d) {
                return invalid("seed density must lie in [0, 1]");
            }
            let (full, _) = tripartite_seed(cfg.n)?;
            let mut rng = RngSpec::new(cfg.seed, 1).rng();
            Ok(full.filter(|_| rng.gen::<f64>() < *d))
        }
        SeedHypergraph::Given(h) => {
            if h.n() != cfg.n {
                return invalid(format!(
                    "seed has {} vertices, config says {}",
                    h.n(),
                    cfg.n
                ));
            }
            Ok(h.clone())
        }
    }
}

fn decide(gamma: &Hypergraph3, cfg: &SweepConfig) -> Outcome {
    let t = cfg.t;
    let verdict = match cfg.target {
        Target::Containment => match contains_linear_clique(gamma, t, cfg.budget) {
            Ok(Containment::Found(c)) => {
                return if verify_copy(gamma, &c, t, None).valid {
                    Outcome::Success
                } else {
                    Outcome::Inconclusive
                }
            }
            Ok(Containment::Absent) => return Outcome::Failure,
            _ => return Outcome::Inconclusive,
        },
        Target::ArrowSymmetric => {
            decide_arrow(gamma, &Pattern::Clique(t), &Pattern::Clique(t), cfg.budget)
        }
        Target::ArrowAsymmetric => decide_arrow(
            gamma,
            &Pattern::Clique(t),
            &Pattern::Clique(t / 2),
            cfg.budget,
        ),
    };
    match verdict.map(|v| v.arrows) {
        Ok(Some(true)) => Outcome::Success,
        Ok(Some(false)) => Outcome::Failure,
        _ => Outcome::Inconclusive,
    }
}

/// Runs every `(point, trial)` pair in parallel and aggregates in index order,
/// so the report does not depend on the thread count.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    if cfg.trials_per_point == 0 {
        return invalid("trials_per_point must be at least 1");
    }
    if cfg.t < 2 {
        return invalid("t must be at least 2");
    }
    if cfg.target == Target::Containment && cfg.t < 3 {
        return invalid("containment sweeps need t >= 3");
    }
    let ps = cfg.grid.probabilities(cfg.n)?;
    let seed = seed_graph(cfg)?;
    let base = RngSpec::new(cfg.seed, 0);
    let trials = cfg.trials_per_point;
    let jobs: Vec<(usize, usize)> = (0..ps.len())
        .flat_map(|i| (0..trials).map(move |k| (i, k)))
        .collect();
    let outcomes: Vec<Result<Outcome>> = jobs
        .par_iter()
        .map(|&(i, k)| {
            let r = coupled_binomial(cfg.n, ps[i], &base.substream(k as u64))?;
            let gamma = seed.union(&r)?;
            Ok(decide(&gamma, cfg))
        })
        .collect();
    let mut points = Vec::with_capacity(ps.len());
    for (i, &p) in ps.iter().enumerate() {
        let (mut s, mut f, mut inc) = (0u64, 0u64, 0u64);
        for o in &outcomes[i * trials..(i + 1) * trials] {
            match o.clone()? {
                Outcome::Success => s += 1,
                Outcome::Failure => f += 1,
                Outcome::Inconclusive => inc += 1,
            }
        }
        let n = trials as u64;
        let (lo, hi) = wilson_interval(s, n);
        points.push(SweepPoint {
            p,
            successes: s,
            failures: f,
            inconclusive: inc,
            trials: n,
            estimate: s as f64 / n as f64,
            ci_lo: lo,
            ci_hi: hi,
            all_inconclusive: inc == n,
        });
    }
    Ok(SweepReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        n: cfg.n,
        t: cfg.t,
        target: cfg.target,
        trials_per_point: trials,
        points,
    })
}

/// Whether estimates, ordered by `p`, never drop unless the two intervals
/// overlap.
pub fn monotone_within_ci(report: &SweepReport) -> bool {
    let mut pts: Vec<&SweepPoint> = report.points.iter().collect();
    pts.sort_by(|a, b| a.p.total_cmp(&b.p));
    pts.windows(2)
        .all(|w| w[1].estimate >= w[0].estimate || w[1].ci_hi >= w[0].ci_lo)
}

pub const CSV_HEADER: &str = "p,successes,trials,estimate,ci_lo,ci_hi,inconclusive";

pub fn to_csv(report: &SweepReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for pt in &report.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            pt.p, pt.successes, pt.trials, pt.estimate, pt.ci_lo, pt.ci_hi, pt.inconclusive
        ));
    }
    out
}

pub fn to_json(report: &SweepReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<SweepReport> {
    serde_json::from_str(text).map_err(|e| Error::Format {
        line: e.line(),
        msg: e.to_string(),
    })
}
