//! Janson's probability of nonexistence: `λ`, `Δ`, the bound
//! `exp(−λ²/(λ+2Δ))`, and an exact `2^m` oracle for small ground sets.
//!
//! Copies are edge sets. Two copies interact when they share an edge; sharing
//! vertices alone does not correlate their indicators.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::experiments::wilson_interval;
use crate::hypergraph::{Hypergraph3, Triple};
use crate::ramsey::{pattern_copies, Pattern, COPY_LIMIT};
use crate::random::RngSpec;

/// Largest family for the quadratic pair scan.
pub const FAMILY_LIMIT: usize = 100_000;
/// Largest ground set enumerated exactly.
pub const EXACT_GROUND_LIMIT: usize = 20;

/// Kahan–Babuška compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JansonInput {
    pub family: Vec<Vec<Triple>>,
    pub p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JansonParams {
    pub lambda: f64,
    pub delta: f64,
}

/// Family members as sorted, deduplicated edge-id lists over their union.
fn encode(input: &JansonInput) -> Result<(Vec<Triple>, Vec<Vec<u32>>)> {
    if !(0.0..=1.0).contains(&input.p) {
        return invalid("p must lie in [0, 1]");
    }
    let ground: BTreeSet<Triple> = input
        .family
        .iter()
        .flatten()
        .map(|e| {
            let mut e = *e;
            e.sort_unstable();
            e
        })
        .collect();
    let ground: Vec<Triple> = ground.into_iter().collect();
    let id: BTreeMap<Triple, u32> = ground
        .iter()
        .enumerate()
        .map(|(i, e)| (*e, i as u32))
        .collect();
    let mut sets = Vec::with_capacity(input.family.len());
    for a in &input.family {
        if a.is_empty() {
            return invalid("family members must be nonempty");
        }
        let mut s: Vec<u32> = a
            .iter()
            .map(|e| {
                let mut e = *e;
                e.sort_unstable();
                id[&e]
            })
            .collect();
        s.sort_unstable();
        s.dedup();
        sets.push(s);
    }
    Ok((ground, sets))
}

fn overlap(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// `λ = Σ p^{|A|}` and `Δ = ½ Σ_{A≠B, A∩B≠∅} p^{|A|+|B|−|A∩B|}`. Distinct
/// list entries count as distinct members even when their edge sets agree.
pub fn janson_parameters(input: &JansonInput) -> Result<JansonParams> {
    if input.family.len() > FAMILY_LIMIT {
        return Err(Error::InstanceTooLarge {
            what: "Janson family".into(),
            limit: FAMILY_LIMIT,
        });
    }
    let (ground, sets) = encode(input)?;
    let p = input.p;
    let mut lambda = CompensatedSum::default();
    for s in &sets {
        lambda.add(p.powi(s.len() as i32));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ground.len()];
    for (i, s) in sets.iter().enumerate() {
        for &e in s {
            members[e as usize].push(i);
        }
    }
    // Each row sums the partners j > i; rows are reduced in index order.
    let rows: Vec<f64> = (0..sets.len())
        .into_par_iter()
        .map(|i| {
            let mut partners: Vec<usize> = sets[i]
                .iter()
                .flat_map(|&e| members[e as usize].iter().copied())
                .filter(|&j| j > i)
                .collect();
            partners.sort_unstable();
            partners.dedup();
            let mut row = CompensatedSum::default();
            for j in partners {
                let k = overlap(&sets[i], &sets[j]);
                row.add(p.powi((sets[i].len() + sets[j].len() - k) as i32));
            }
            row.value()
        })
        .collect();
    let mut delta = CompensatedSum::default();
    for r in rows {
        delta.add(r);
    }
    Ok(JansonParams {
        lambda: lambda.value(),
        delta: delta.value(),
    })
}

/// `Δ` from the ordered-pair sum grouped by `(|A|+|B|, |A∩B|)`, halved.
pub fn delta_by_overlap(input: &JansonInput) -> Result<f64> {
    let (_, sets) = encode(input)?;
    let mut groups: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate() {
            if i == j {
                continue;
            }
            let k = overlap(a, b);
            if k > 0 {
                *groups.entry((a.len() + b.len(), k)).or_default() += 1;
            }
        }
    }
    let mut sum = CompensatedSum::default();
    for ((size, k), count) in groups {
        sum.add(count as f64 * input.p.powi((size - k) as i32));
    }
    Ok(sum.value() / 2.0)
}

/// `exp(−λ²/(λ+2Δ))`, with value 1 at `λ = 0`.
pub fn janson_bound(lambda: f64, delta: f64) -> Result<f64> {
    if !(lambda >= 0.0 && delta >= 0.0) || !lambda.is_finite() || !delta.is_finite() {
        return invalid("λ and Δ must be finite and nonnegative");
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    Ok((-lambda * lambda / (lambda + 2.0 * delta)).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Exact when the ground set has at most [`EXACT_GROUND_LIMIT`] edges,
    /// Monte Carlo otherwise.
    Auto {
        trials: usize,
        spec: RngSpec,
    },
    MonteCarlo {
        trials: usize,
        spec: RngSpec,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub probability: f64,
    pub exact: bool,
    /// Wilson 95% interval for Monte Carlo estimates.
    pub ci: Option<(f64, f64)>,
    pub ground: usize,
}

/// `P[no member of the family lies entirely in the random subset]`.
pub fn exact_nonexistence_oracle(input: &JansonInput, mode: OracleMode) -> Result<OracleResult> {
    let (ground, sets) = encode(input)?;
    let m = ground.len();
    let p = input.p;
    let (trials, spec, try_exact) = match mode {
        OracleMode::Auto { trials, spec } => (trials, spec, true),
        OracleMode::MonteCarlo { trials, spec } => (trials, spec, false),
    };
    let masks: Vec<u32> = sets
        .iter()
        .map(|s| s.iter().fold(0u32, |acc, &e| acc | (1 << e)))
        .collect();
    if try_exact && m <= EXACT_GROUND_LIMIT {
        let full: u32 = if m == 0 { 0 } else { u32::MAX >> (32 - m) };
        // Only present sets matter; group them by size for the weights.
        let mut by_size = vec![0u64; m + 1];
        for present in 0..=full {
            if masks.iter().all(|&a| a & !present != 0) {
                by_size[present.count_ones() as usize] += 1;
            }
        }
        let mut prob = CompensatedSum::default();
        for (k, &c) in by_size.iter().enumerate() {
            if c > 0 {
                prob.add(c as f64 * p.powi(k as i32) * (1.0 - p).powi((m - k) as i32));
            }
        }
        return Ok(OracleResult {
            probability: prob.value(),
            exact: true,
            ci: None,
            ground: m,
        });
    }
    if trials == 0 {
        return invalid("Monte Carlo needs at least one trial");
    }
    let hits: usize = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = spec.substream(i as u64).rng();
            let present: Vec<bool> = (0..m).map(|_| rng.gen::<f64>() < p).collect();
            let none = sets.iter().all(|s| s.iter().any(|&e| !present[e as usize]));
            usize::from(none)
        })
        .sum();
    let (lo, hi) = wilson_interval(hits as u64, trials as u64);
    Ok(OracleResult {
        probability: hits as f64 / trials as f64,
        exact: false,
        ci: Some((lo, hi)),
        ground: m,
    })
}

/// Copies of `pattern` in `host` as edge sets.
pub fn janson_family(host: &Hypergraph3, pattern: &Pattern) -> Result<Vec<Vec<Triple>>> {
    let f = pattern.graph()?;
    Ok(pattern_copies(host, &f, COPY_LIMIT)?
        .into_iter()
        .map(|c| c.edges.into_iter().map(|i| host.edges()[i]).collect())
        .collect())
}
