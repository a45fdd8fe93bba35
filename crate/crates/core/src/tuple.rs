//! Joint neighbourhoods and joint links of vertex tuples, the tuple band
//! audit, the extension properties E.1 to E.4, witnesses of irregularity
//! built from bad tuples, dependent random choice and the weak tuple census.
//!
//! A triad is a `Graph2` with declared parts `[X, Y, Z]`. The supported link
//! `L_H(x, P)` is `E_P(Y, Z) ∩ L_H(x)`; callers pass `H ⊆ 𝒦_3(P)` when they
//! want the band centres to match.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{triangles, Graph2, Hypergraph3, Vertex};
use crate::random::RngSpec;
use crate::rational::{from_u128, int, Rational};
use crate::regularity::{check_delta, evaluate_strong_witness, StrongWitness};

/// Largest `|X|^t` the exhaustive band audit enumerates.
pub const EXHAUSTIVE_TUPLES: u128 = 1_000_000;
/// Largest `C(|U|, r)` checked exhaustively by dependent random choice.
pub const DRC_VERIFY_LIMIT: u128 = 100_000;
/// Bad tuples at or below this count get an exact maximum clique.
pub const EXACT_CLIQUE_TUPLES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Y,
    Z,
}

fn rpow(r: &Rational, k: usize) -> Rational {
    let mut out = Rational::one();
    for _ in 0..k {
        out *= r;
    }
    out
}

fn unit_interval(name: &str, d: &Rational) -> Result<()> {
    if *d < Rational::zero() || *d > Rational::one() {
        return invalid(format!("{} must lie in [0, 1]", name));
    }
    Ok(())
}

fn ceil_i128(r: &Rational) -> i128 {
    r.ceil().to_integer().to_i128().unwrap_or(i128::MAX)
}

fn floor_i128(r: &Rational) -> i128 {
    r.floor().to_integer().to_i128().unwrap_or(i128::MIN)
}

pub(crate) fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.saturating_mul(n - i) / (i + 1);
    }
    out
}

/// Link bitsets of every `x ∈ X` over the index `iy·|Z| + iz`.
pub(crate) struct LinkTable {
    n: usize,
    pub(crate) x: Vec<Vertex>,
    pub(crate) y: Vec<Vertex>,
    pub(crate) z: Vec<Vertex>,
    xpos: Vec<Option<usize>>,
    base: FixedBitSet,
    links: Vec<FixedBitSet>,
}

impl LinkTable {
    pub(crate) fn new(h: &Hypergraph3, p: &Graph2) -> Result<Self> {
        if h.n() != p.n() {
            return invalid("hypergraph and triad have different ground sets");
        }
        let parts = match p.parts() {
            Some(ps) if ps.len() == 3 => ps.to_vec(),
            _ => {
                return Err(Error::InvalidParts(
                    "a triad needs exactly three declared parts".into(),
                ))
            }
        };
        let (x, y, z) = (parts[0].clone(), parts[1].clone(), parts[2].clone());
        let width = y.len() * z.len();
        let mut base = FixedBitSet::with_capacity(width);
        for (iy, &vy) in y.iter().enumerate() {
            for (iz, &vz) in z.iter().enumerate() {
                if p.has_edge(vy, vz) {
                    base.insert(iy * z.len() + iz);
                }
            }
        }
        let links = x
            .iter()
            .map(|&vx| {
                let mut bits = FixedBitSet::with_capacity(width);
                for i in base.ones() {
                    if h.contains(vx, y[i / z.len()], z[i % z.len()]) {
                        bits.insert(i);
                    }
                }
                bits
            })
            .collect();
        let mut xpos = vec![None; p.n()];
        for (i, &v) in x.iter().enumerate() {
            xpos[v] = Some(i);
        }
        Ok(LinkTable {
            n: p.n(),
            x,
            y,
            z,
            xpos,
            base,
            links,
        })
    }

    pub(crate) fn positions(&self, tuple: &[Vertex]) -> Result<Vec<usize>> {
        tuple
            .iter()
            .map(|&v| match self.xpos.get(v).copied().flatten() {
                Some(i) => Ok(i),
                None => invalid(format!("tuple vertex {} is not in X", v)),
            })
            .collect()
    }

    pub(crate) fn joint(&self, pos: &[usize]) -> FixedBitSet {
        let mut cur = self.base.clone();
        for &i in pos {
            cur.intersect_with(&self.links[i]);
        }
        cur
    }

    fn yz_area(&self) -> u128 {
        (self.y.len() * self.z.len()) as u128
    }

    pub(crate) fn to_graph(&self, bits: &FixedBitSet) -> Graph2 {
        let mut g = Graph2::with_parts(self.n, vec![self.y.clone(), self.z.clone()])
            .expect("triad parts are disjoint");
        for i in bits.ones() {
            g.insert(self.y[i / self.z.len()], self.z[i % self.z.len()]);
        }
        g
    }
}

fn side_of(p: &Graph2, side: Side) -> Result<(Vec<Vertex>, Vec<Vertex>)> {
    match p.parts() {
        Some(ps) if ps.len() == 3 => Ok((
            ps[0].clone(),
            match side {
                Side::Y => ps[1].clone(),
                Side::Z => ps[2].clone(),
            },
        )),
        _ => Err(Error::InvalidParts(
            "a triad needs exactly three declared parts".into(),
        )),
    }
}

/// `N_P(𝐱, side)`: vertices of the side adjacent to every tuple member.
pub fn joint_neighborhood(p: &Graph2, tuple: &[Vertex], side: Side) -> Result<Vec<Vertex>> {
    let (x, s) = side_of(p, side)?;
    for v in tuple {
        if !x.contains(v) {
            return invalid(format!("tuple vertex {} is not in X", v));
        }
    }
    Ok(s.into_iter()
        .filter(|&w| tuple.iter().all(|&v| p.has_edge(v, w)))
        .collect())
}

/// `L_H(𝐱, P) = ⋂ L_H(x, P)` as a graph with parts `[Y, Z]`. The empty tuple
/// gives `P[Y, Z]`.
pub fn joint_link(h: &Hypergraph3, tuple: &[Vertex], p: &Graph2) -> Result<Graph2> {
    let table = LinkTable::new(h, p)?;
    let pos = table.positions(tuple)?;
    Ok(table.to_graph(&table.joint(&pos)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleMode {
    Exhaustive,
    Sampled { samples: usize, spec: RngSpec },
}

impl TupleMode {
    /// Exhaustive when `|X|^t` is within [`EXHAUSTIVE_TUPLES`].
    pub fn auto(x_len: usize, t: usize, samples: usize, spec: RngSpec) -> TupleMode {
        let total = (x_len as u128).checked_pow(t as u32);
        match total {
            Some(c) if c <= EXHAUSTIVE_TUPLES => TupleMode::Exhaustive,
            _ => TupleMode::Sampled { samples, spec },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TupleAuditReport {
    pub t: usize,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub band_center: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub band_radius: Rational,
    pub bad_fraction_low: f64,
    pub bad_fraction_high: f64,
    /// `"exhaustive"` or `"sampled"`.
    pub mode: String,
    pub tuples: u64,
    pub pass_lower: bool,
    pub pass: bool,
}

fn dfs_count(
    links: &[FixedBitSet],
    stack: &mut [FixedBitSet],
    depth: usize,
    lo: i128,
    hi: i128,
    acc: &mut (u64, u64),
) {
    if depth + 1 == stack.len() {
        let s = stack[depth].count_ones(..) as i128;
        if s < lo {
            acc.0 += 1;
        } else if s > hi {
            acc.1 += 1;
        }
        return;
    }
    for l in links {
        let (a, b) = stack.split_at_mut(depth + 1);
        b[0].clone_from(&a[depth]);
        b[0].intersect_with(l);
        dfs_count(links, stack, depth + 1, lo, hi, acc);
    }
}

/// Fraction of ordered `t`-tuples of `X` whose joint link leaves the band
/// `d3^t·d2^{2t+1}|Y||Z| ± ε·d2^{2t+1}|Y||Z|`, split into low and high.
pub fn tuple_band_audit(
    h: &Hypergraph3,
    p: &Graph2,
    t: usize,
    d3: &Rational,
    d2: &Rational,
    eps: f64,
    mode: TupleMode,
) -> Result<TupleAuditReport> {
    unit_interval("d3", d3)?;
    unit_interval("d2", d2)?;
    let eps_r = check_delta(eps)?;
    let table = LinkTable::new(h, p)?;
    let scale = rpow(d2, 2 * t + 1) * from_u128(table.yz_area(), 1);
    let center = rpow(d3, t) * &scale;
    let radius = &eps_r * &scale;
    let lo = ceil_i128(&(&center - &radius));
    let hi = floor_i128(&(&center + &radius));

    let (low, high, tuples, tag) = match mode {
        TupleMode::Exhaustive => {
            let total = (table.x.len() as u128).checked_pow(t as u32);
            if !matches!(total, Some(c) if c <= EXHAUSTIVE_TUPLES) {
                return Err(Error::InstanceTooLarge {
                    what: "exhaustive tuple audit (|X|^t)".into(),
                    limit: EXHAUSTIVE_TUPLES as usize,
                });
            }
            let (low, high) = if t == 0 {
                let mut acc = (0, 0);
                let mut stack = vec![table.base.clone()];
                dfs_count(&table.links, &mut stack, 0, lo, hi, &mut acc);
                acc
            } else {
                table
                    .links
                    .par_iter()
                    .map(|first| {
                        let mut stack = vec![table.base.clone(); t + 1];
                        stack[1].intersect_with(first);
                        let mut acc = (0u64, 0u64);
                        dfs_count(&table.links, &mut stack, 1, lo, hi, &mut acc);
                        acc
                    })
                    .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
            };
            (low, high, total.unwrap() as u64, "exhaustive")
        }
        TupleMode::Sampled { samples, spec } => {
            if samples == 0 {
                return invalid("sampled tuple audit needs at least one sample");
            }
            if t > 0 && table.x.is_empty() {
                return invalid("X is empty");
            }
            let mut rng = spec.rng();
            let (mut low, mut high) = (0u64, 0u64);
            for _ in 0..samples {
                let pos: Vec<usize> = (0..t).map(|_| rng.gen_range(0..table.x.len())).collect();
                let s = table.joint(&pos).count_ones(..) as i128;
                if s < lo {
                    low += 1;
                } else if s > hi {
                    high += 1;
                }
            }
            (low, high, samples as u64, "sampled")
        }
    };
    let denom = tuples.max(1) as f64;
    let bad_fraction_low = low as f64 / denom;
    let bad_fraction_high = high as f64 / denom;
    // Integer comparisons against ε·N avoid rounding at the boundary.
    let eps_n = &eps_r * from_u128(tuples as u128, 1);
    let pass_lower = from_u128(low as u128, 1) <= eps_n;
    let pass = pass_lower && from_u128((low + high) as u128, 1) <= int(2) * &eps_n;
    Ok(TupleAuditReport {
        t,
        band_center: center,
        band_radius: radius,
        bad_fraction_low,
        bad_fraction_high,
        mode: tag.into(),
        tuples,
        pass_lower,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionReport {
    /// Length of the extended tuple, one more than the prefix.
    pub t: usize,
    pub neighborhood_y: usize,
    pub neighborhood_z: usize,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub e1_target_y: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub e1_target_z: Rational,
    pub e1_pass: bool,
    pub link_size: usize,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub e2_target: Rational,
    pub e2_pass: bool,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub lower_threshold: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub upper_threshold: Rational,
    pub e3_failing: Vec<Vertex>,
    pub e4_failing: Vec<Vertex>,
    pub e3_fraction: f64,
    pub e4_fraction: f64,
    pub e3_pass: bool,
    pub e4_pass: bool,
}

impl ExtensionReport {
    pub fn all_pass(&self) -> bool {
        self.e1_pass && self.e2_pass && self.e3_pass && self.e4_pass
    }
}

fn within(value: &Rational, target: &Rational, slack: &Rational) -> bool {
    let diff = value - target;
    let diff = if diff < Rational::zero() { -diff } else { diff };
    diff <= *slack
}

/// Audits E.1 to E.4 for a `(t−1)`-tuple. The E.3/E.4 thresholds are
/// `(d3^t ∓ multiplier·γ)·d2^{2t+1}|Y||Z|`; the default multiplier is 13.
pub fn extension_audit(
    h: &Hypergraph3,
    p: &Graph2,
    prefix: &[Vertex],
    gamma: f64,
    d3: &Rational,
    d2: &Rational,
    multiplier: f64,
) -> Result<ExtensionReport> {
    unit_interval("d3", d3)?;
    unit_interval("d2", d2)?;
    let g = check_delta(gamma)?;
    let mult = check_delta(multiplier)?;
    let table = LinkTable::new(h, p)?;
    let pos = table.positions(prefix)?;
    let t = prefix.len() + 1;
    let area = from_u128(table.yz_area(), 1);

    let ny = joint_neighborhood(p, prefix, Side::Y)?.len();
    let nz = joint_neighborhood(p, prefix, Side::Z)?.len();
    let e1_target_y = rpow(d2, t - 1) * int(table.y.len() as i64);
    let e1_target_z = rpow(d2, t - 1) * int(table.z.len() as i64);
    let e1_pass = within(&int(ny as i64), &e1_target_y, &(&g * &e1_target_y))
        && within(&int(nz as i64), &e1_target_z, &(&g * &e1_target_z));

    let cur = table.joint(&pos);
    let link_size = cur.count_ones(..);
    let s2 = rpow(d2, 2 * t - 1) * &area;
    let e2_target = rpow(d3, t - 1) * &s2;
    let e2_pass = within(&int(link_size as i64), &e2_target, &(&g * &s2));

    let s3 = rpow(d2, 2 * t + 1) * &area;
    let lower_threshold = (rpow(d3, t) - &mult * &g) * &s3;
    let upper_threshold = (rpow(d3, t) + &mult * &g) * &s3;
    let lo = ceil_i128(&lower_threshold);
    let hi = floor_i128(&upper_threshold);
    let mut e3_failing = Vec::new();
    let mut e4_failing = Vec::new();
    for (i, &vx) in table.x.iter().enumerate() {
        let mut ext = cur.clone();
        ext.intersect_with(&table.links[i]);
        let s = ext.count_ones(..) as i128;
        if s < lo {
            e3_failing.push(vx);
        }
        if s > hi {
            e4_failing.push(vx);
        }
    }
    let nx = table.x.len().max(1);
    let cap = &g * int(table.x.len() as i64);
    Ok(ExtensionReport {
        t,
        neighborhood_y: ny,
        neighborhood_z: nz,
        e1_target_y,
        e1_target_z,
        e1_pass,
        link_size,
        e2_target,
        e2_pass,
        e3_fraction: e3_failing.len() as f64 / nx as f64,
        e4_fraction: e4_failing.len() as f64 / nx as f64,
        e3_pass: int(e3_failing.len() as i64) <= cap,
        e4_pass: int(e4_failing.len() as i64) <= cap,
        lower_threshold,
        upper_threshold,
        e3_failing,
        e4_failing,
    })
}

/// The pair condition for bad tuples `a`, `b` of length `k`:
/// `|N_P(a,S) ∩ N_P(b,S)| ≤ 2·d2^{2k}|S|` for both `S = Y` and `S = Z`.
pub fn small_joint(p: &Graph2, a: &[Vertex], b: &[Vertex], d2: &Rational) -> Result<bool> {
    let k = a.len();
    let both: Vec<Vertex> = a.iter().chain(b.iter()).copied().collect();
    for side in [Side::Y, Side::Z] {
        let (_, s) = side_of(p, side)?;
        let common = joint_neighborhood(p, &both, side)?.len();
        let bound = int(2) * rpow(d2, 2 * k) * int(s.len() as i64);
        if int(common as i64) > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Failure {
    /// Below the E.3 threshold.
    Lower,
    /// Above the E.4 threshold.
    Upper,
}

#[derive(Clone, Debug)]
pub struct WitnessParams {
    pub d3: Rational,
    pub d2: Rational,
    pub gamma: f64,
    pub multiplier: f64,
    pub zeta: f64,
    pub r: usize,
    pub failure: Failure,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessFamily {
    pub tuples: Vec<Vec<Vertex>>,
    pub witness: StrongWitness,
    pub triad_triangles: usize,
    /// `|⋃ 𝒦_3(Q_𝐱)| / |𝒦_3(P)|`, zero when `P` spans no triangle.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub ratio: Rational,
    pub partial: bool,
    pub exact_clique: bool,
}

fn max_clique(adj: &[u32], cand: u32, cur: u32, best: &mut u32, goal: u32) {
    if best.count_ones() >= goal {
        return;
    }
    if cand == 0 {
        if cur.count_ones() > best.count_ones() {
            *best = cur;
        }
        return;
    }
    if cur.count_ones() + cand.count_ones() <= best.count_ones() {
        return;
    }
    let v = cand.trailing_zeros();
    let bit = 1u32 << v;
    max_clique(adj, cand & adj[v as usize], cur | bit, best, goal);
    max_clique(adj, cand & !bit, cur, best, goal);
}

/// Builds `Q_𝐱 = P[X_𝐱, N_P(𝐱,Y)] ∪ P[X_𝐱, N_P(𝐱,Z)] ∪ L_H(𝐱,P)` for up to
/// `r` bad tuples forming a clique of the auxiliary graph (disjoint tuples
/// satisfying [`small_joint`]). `X_𝐱` holds the first `⌈ζ|X|⌉` vertices whose
/// extension fails on the chosen side.
pub fn irregularity_witness(
    h: &Hypergraph3,
    p: &Graph2,
    bad_tuples: &[Vec<Vertex>],
    params: &WitnessParams,
) -> Result<WitnessFamily> {
    if params.r == 0 {
        return invalid("r must be positive");
    }
    if !(params.zeta > 0.0 && params.zeta <= 1.0) {
        return invalid("ζ must lie in (0, 1]");
    }
    let table = LinkTable::new(h, p)?;
    if let Some(first) = bad_tuples.first() {
        if bad_tuples.iter().any(|b| b.len() != first.len()) {
            return invalid("bad tuples must share one length");
        }
    }
    for b in bad_tuples {
        table.positions(b)?;
    }
    let m = bad_tuples.len();
    let mut adj = vec![vec![false; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let disjoint = bad_tuples[i].iter().all(|v| !bad_tuples[j].contains(v));
            let ok = disjoint && small_joint(p, &bad_tuples[i], &bad_tuples[j], &params.d2)?;
            adj[i][j] = ok;
            adj[j][i] = ok;
        }
    }
    let exact_clique = m <= EXACT_CLIQUE_TUPLES;
    let chosen: Vec<usize> = if exact_clique {
        let masks: Vec<u32> = (0..m)
            .map(|i| {
                (0..m)
                    .filter(|&j| adj[i][j])
                    .fold(0u32, |a, j| a | (1 << j))
            })
            .collect();
        let mut best = 0u32;
        let all = if m == 0 { 0 } else { u32::MAX >> (32 - m) };
        max_clique(&masks, all, 0, &mut best, params.r as u32);
        (0..m)
            .filter(|&i| best >> i & 1 == 1)
            .take(params.r)
            .collect()
    } else {
        let mut order: Vec<usize> = (0..m).collect();
        let deg: Vec<usize> = adj
            .iter()
            .map(|row| row.iter().filter(|&&b| b).count())
            .collect();
        order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
        let mut chosen: Vec<usize> = Vec::new();
        for i in order {
            if chosen.len() == params.r {
                break;
            }
            if chosen.iter().all(|&c| adj[c][i]) {
                chosen.push(i);
            }
        }
        chosen.sort_unstable();
        chosen
    };

    let take = ((params.zeta * table.x.len() as f64).ceil() as usize).max(1);
    let mut qs = Vec::with_capacity(chosen.len());
    for &i in &chosen {
        let tuple = &bad_tuples[i];
        let ext = extension_audit(
            h,
            p,
            tuple,
            params.gamma,
            &params.d3,
            &params.d2,
            params.multiplier,
        )?;
        let failing = match params.failure {
            Failure::Lower => &ext.e3_failing,
            Failure::Upper => &ext.e4_failing,
        };
        let xs: Vec<Vertex> = failing.iter().copied().take(take).collect();
        let pos = table.positions(tuple)?;
        let mut q = table.to_graph(&table.joint(&pos));
        for side in [Side::Y, Side::Z] {
            for w in joint_neighborhood(p, tuple, side)? {
                for &x in &xs {
                    if p.has_edge(x, w) {
                        q.insert(x, w);
                    }
                }
            }
        }
        qs.push(q);
    }
    let q_parts: Vec<Graph2> = qs
        .into_iter()
        .map(|q| {
            let mut g = Graph2::with_parts(p.n(), p.parts().unwrap().to_vec())
                .expect("triad parts are disjoint");
            for (a, b) in q.edges() {
                g.insert(a, b);
            }
            g
        })
        .collect();
    let witness = evaluate_strong_witness(h, p, &q_parts)?;
    let triad_triangles = triangles(p).len();
    let ratio = if triad_triangles == 0 {
        Rational::zero()
    } else {
        from_u128(witness.union_triangles as u128, triad_triangles as u128)
    };
    Ok(WitnessFamily {
        tuples: chosen.iter().map(|&i| bad_tuples[i].clone()).collect(),
        partial: chosen.len() < params.r,
        witness,
        triad_triangles,
        ratio,
        exact_clique,
    })
}

/// `n^{1−2t}·δ_1^t − C(n,r)·(2m/(n(n−1)))^t`, exactly.
pub fn drc_condition(n: usize, delta1: u128, r: usize, m: u128, t: usize) -> Result<Rational> {
    if n < 2 || t == 0 {
        return invalid("the condition needs n ≥ 2 and t ≥ 1");
    }
    let nb = BigInt::from(n);
    let first = rpow(&Rational::from_integer(BigInt::from(delta1)), t)
        / Rational::from_integer(num_traits::pow(nb, 2 * t - 1));
    let pairs = from_u128(2 * m, (n * (n - 1)) as u128);
    let second = from_u128(binom(n as u128, r as u128), 1) * rpow(&pairs, t);
    Ok(first - second)
}

#[derive(Clone, Debug, Serialize)]
pub struct DrcOutcome {
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub lhs: Rational,
    pub guarantee: bool,
    pub u: Option<Vec<Vertex>>,
    pub attempts_used: usize,
    /// Exhaustive check of `e(L_H(S)) ≥ m` over `C(U, r)`; `None` when the
    /// set is too large to check.
    pub verified: Option<bool>,
}

/// Pair-indexed link bitsets `L_H(v)` over the index `a·n + b`, `a < b`.
fn pair_links(h: &Hypergraph3) -> Vec<FixedBitSet> {
    let n = h.n();
    let mut out = vec![FixedBitSet::with_capacity(n * n); n];
    for e in h.edges() {
        out[e[0]].insert(e[1] * n + e[2]);
        out[e[1]].insert(e[0] * n + e[2]);
        out[e[2]].insert(e[0] * n + e[1]);
    }
    out
}

fn set_link_size(links: &[FixedBitSet], n: usize, s: &[Vertex]) -> usize {
    match s.split_first() {
        None => n * n.saturating_sub(1) / 2,
        Some((&first, rest)) => {
            let mut cur = links[first].clone();
            for &v in rest {
                cur.intersect_with(&links[v]);
            }
            cur.count_ones(..)
        }
    }
}

fn for_each_subset<F: FnMut(&[Vertex])>(items: &[Vertex], k: usize, f: &mut F) {
    fn rec<F: FnMut(&[Vertex])>(
        items: &[Vertex],
        k: usize,
        start: usize,
        cur: &mut Vec<Vertex>,
        f: &mut F,
    ) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut Vec::with_capacity(k), f);
}

/// Dependent random choice: draw `t` random pairs, keep their common
/// hyper-neighbourhood and delete one vertex from each `r`-subset whose joint
/// link has fewer than `m` edges. Repeats up to `attempts` times until
/// `|U| ≥ a`.
pub fn dependent_random_choice(
    h: &Hypergraph3,
    t: usize,
    r: usize,
    m: u128,
    a: f64,
    attempts: usize,
    spec: &RngSpec,
) -> Result<DrcOutcome> {
    let n = h.n();
    if n < 3 {
        return invalid("dependent random choice needs n ≥ 3");
    }
    if t == 0 || r == 0 || r > n {
        return invalid("need t ≥ 1 and 1 ≤ r ≤ n");
    }
    if !a.is_finite() {
        return invalid("a must be finite");
    }
    let lhs = drc_condition(n, h.min_degree() as u128, r, m, t)?;
    let a_r = Rational::from_float(a).expect("finite");
    let guarantee = lhs >= a_r;
    let need = ceil_i128(&a_r).max(0) as usize;
    let links = pair_links(h);

    let verify = |u: &[Vertex]| -> Option<bool> {
        if binom(u.len() as u128, r as u128) > DRC_VERIFY_LIMIT {
            return None;
        }
        let mut ok = true;
        for_each_subset(u, r, &mut |s| {
            if ok && (set_link_size(&links, n, s) as u128) < m {
                ok = false;
            }
        });
        Some(ok)
    };

    if m == 0 {
        let u: Vec<Vertex> = (0..n).collect();
        let verified = verify(&u);
        return Ok(DrcOutcome {
            lhs,
            guarantee,
            u: Some(u),
            attempts_used: 0,
            verified,
        });
    }
    for attempt in 0..attempts {
        let mut rng = spec.substream(attempt as u64).rng();
        let mut common: Vec<Vertex> = (0..n).collect();
        for _ in 0..t {
            let a0 = rng.gen_range(0..n);
            let mut b0 = rng.gen_range(0..n - 1);
            if b0 >= a0 {
                b0 += 1;
            }
            common.retain(|&v| v != a0 && v != b0 && h.contains(a0, b0, v));
        }
        if binom(common.len() as u128, r as u128) > EXHAUSTIVE_TUPLES {
            return Err(Error::InstanceTooLarge {
                what: "r-subsets of the common neighbourhood".into(),
                limit: EXHAUSTIVE_TUPLES as usize,
            });
        }
        let mut removed = vec![false; n];
        for_each_subset(&common, r, &mut |s| {
            if s.iter().all(|&v| !removed[v]) && (set_link_size(&links, n, s) as u128) < m {
                removed[*s.last().unwrap()] = true;
            }
        });
        let u: Vec<Vertex> = common.into_iter().filter(|&v| !removed[v]).collect();
        if u.len() >= need {
            let verified = verify(&u);
            return Ok(DrcOutcome {
                lhs,
                guarantee,
                u: Some(u),
                attempts_used: attempt + 1,
                verified,
            });
        }
    }
    Ok(DrcOutcome {
        lhs,
        guarantee,
        u: None,
        attempts_used: attempts,
        verified: None,
    })
}

/// `m = ⌈n^{2−ρ}⌉` and `t = ⌈r/ρ⌉`.
pub fn drc_dense_parameters(n: usize, rho: f64, r: usize) -> Result<(u128, usize)> {
    if !(rho > 0.0 && rho <= 2.0) {
        return invalid("ρ must lie in (0, 2]");
    }
    let m = (n as f64).powf(2.0 - rho).ceil() as u128;
    let t = ((r as f64) / rho).ceil() as usize;
    Ok((m, t.max(1)))
}

/// Smallest `n₀ ≤ n_max` such that the condition holds with value `≥ a` on
/// the complete 3-graph for every `n ∈ [n₀, n_max]`.
pub fn drc_dense_threshold(rho: f64, r: usize, a: f64, n_max: usize) -> Result<Option<usize>> {
    let a_r = Rational::from_float(a).ok_or_else(|| Error::Invalid("a must be finite".into()))?;
    let mut n0 = None;
    for n in (r.max(3)..=n_max).rev() {
        let (m, t) = drc_dense_parameters(n, rho, r)?;
        let delta1 = binom(n as u128 - 1, 2);
        if drc_condition(n, delta1, r, m, t)? >= a_r {
            n0 = Some(n);
        } else {
            break;
        }
    }
    Ok(n0)
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub t: usize,
    pub sum_identity_lhs: u128,
    pub sum_identity_rhs: u128,
    pub dense_tuple_count: u128,
    pub threshold: u128,
}

/// Computes `Σ_{X ∈ C(U,t)} e(L_H(X))` directly and as
/// `Σ_{pairs} C(deg_H(w,v,U), t)`, and counts the `t`-subsets whose joint
/// link has at least `threshold` edges.
pub fn weak_tuple_census(
    h: &Hypergraph3,
    u: &[Vertex],
    t: usize,
    threshold: u128,
) -> Result<CensusReport> {
    let n = h.n();
    if t == 0 {
        return invalid("t must be positive");
    }
    let mut in_u = vec![false; n];
    for &v in u {
        if v >= n || in_u[v] {
            return invalid("U must hold distinct vertices of H");
        }
        in_u[v] = true;
    }
    if binom(u.len() as u128, t as u128) > EXHAUSTIVE_TUPLES {
        return Err(Error::InstanceTooLarge {
            what: "t-subsets of U".into(),
            limit: EXHAUSTIVE_TUPLES as usize,
        });
    }
    let links = pair_links(h);
    let mut lhs = 0u128;
    let mut dense = 0u128;
    for_each_subset(u, t, &mut |s| {
        let size = set_link_size(&links, n, s) as u128;
        lhs += size;
        if size >= threshold {
            dense += 1;
        }
    });
    let mut deg = std::collections::HashMap::<(Vertex, Vertex), u128>::new();
    for e in h.edges() {
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            if in_u[e[k]] {
                *deg.entry((e[i], e[j])).or_default() += 1;
            }
        }
    }
    let rhs: u128 = deg.values().map(|&d| binom(d, t as u128)).sum();
    assert_eq!(lhs, rhs, "double counting of joint links failed");
    Ok(CensusReport {
        t,
        sum_identity_lhs: lhs,
        sum_identity_rhs: rhs,
        dense_tuple_count: dense,
        threshold,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TupleConstants {
    pub zeta: f64,
    pub delta3: f64,
    pub delta2: f64,
    pub r: usize,
    /// Whether `d2 ≤ d3/10`.
    pub d2_small: bool,
}

/// A toy instance of the constant hierarchy for the tuple lemma, taking every
/// `≪` as a factor of ten. `ζ` also stays below `d3^{t−1}/11` so that the
/// `δ3` bound is positive; `r = max(1, ⌊ζ/d2^{2t−2}⌋)`.
pub fn tuple_constants(t: usize, eps: f64, d3: f64, d2: f64) -> Result<TupleConstants> {
    if t == 0 {
        return invalid("t must be positive");
    }
    for (name, v) in [("ε", eps), ("d3", d3), ("d2", d2)] {
        if !(v > 0.0 && v <= 1.0) {
            return invalid(format!("{} must lie in (0, 1]", name));
        }
    }
    let tf = t as i32;
    let d3p = d3.powi(tf - 1);
    let zeta = eps.min(d3p / 11.0).min(1.0) / 10.0;
    let delta3 = ((d3p - 11.0 * zeta) * zeta * zeta).min(zeta.powi(3)) / 10.0;
    let delta2 = (zeta * zeta * d2.powi(6 * tf) / t as f64)
        .min(zeta * zeta * (d3p - zeta).powi(2) * d2.powi(8 * tf + 2))
        / 10.0;
    let r = ((zeta / d2.powi(2 * tf - 2)).floor() as usize).max(1);
    Ok(TupleConstants {
        zeta,
        delta3,
        delta2,
        r,
        d2_small: d2 <= d3 / 10.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::triangles;
    use crate::rational::rat;
    use crate::regularity::{strong_regularity_check, StrongSearch};

    fn parts(k: usize) -> Vec<Vec<Vertex>> {
        (0..3).map(|i| (i * k..(i + 1) * k).collect()).collect()
    }

    fn complete_triad(k: usize) -> Graph2 {
        Graph2::complete_multipartite(3 * k, &parts(k)).unwrap()
    }

    fn random_triad(k: usize, p: f64, seed: u64) -> Graph2 {
        let mut rng = RngSpec::from_seed(seed).rng();
        let ps = parts(k);
        let mut g = Graph2::with_parts(3 * k, ps.clone()).unwrap();
        for i in 0..3 {
            for j in i + 1..3 {
                for &a in &ps[i] {
                    for &b in &ps[j] {
                        if rng.gen_bool(p) {
                            g.insert(a, b);
                        }
                    }
                }
            }
        }
        g
    }

    fn random_on_triangles(p: &Graph2, d: f64, seed: u64) -> Hypergraph3 {
        let mut rng = RngSpec::from_seed(seed).rng();
        let tri: Vec<_> = triangles(p)
            .into_iter()
            .filter(|_| rng.gen_bool(d))
            .collect();
        Hypergraph3::from_edges(p.n(), tri).unwrap()
    }

    #[test]
    fn empty_tuple_neighborhood_and_link() {
        let p = random_triad(6, 0.5, 1);
        let h = random_on_triangles(&p, 0.5, 2);
        assert_eq!(joint_neighborhood(&p, &[], Side::Y).unwrap(), parts(6)[1]);
        let l = joint_link(&h, &[], &p).unwrap();
        assert_eq!(
            l.edges(),
            p.restrict(&parts(6)[1], &parts(6)[2]).unwrap().edges()
        );
    }

    #[test]
    fn neighborhood_matches_intersection_oracle() {
        let p = random_triad(8, 0.6, 3);
        let tuple = [0, 3, 5];
        let got = joint_neighborhood(&p, &tuple, Side::Z).unwrap();
        let mut want: std::collections::BTreeSet<Vertex> = parts(8)[2].iter().copied().collect();
        for &x in &tuple {
            let nb: std::collections::BTreeSet<Vertex> = p.neighbors(x).ones().collect();
            want = want.intersection(&nb).copied().collect();
        }
        assert_eq!(got, want.into_iter().collect::<Vec<_>>());
        assert!(joint_neighborhood(&p, &[9], Side::Y).is_err());
    }

    #[test]
    fn link_matches_iterated_oracle() {
        let p = random_triad(7, 0.7, 4);
        let h = random_on_triangles(&p, 0.6, 5);
        let tuple = [1, 2];
        let got = joint_link(&h, &tuple, &p).unwrap();
        let mut want = p.restrict(&parts(7)[1], &parts(7)[2]).unwrap();
        for &x in &tuple {
            let l = crate::hypergraph::link_graph(&h, x, Some(&p)).unwrap();
            want = want.intersection(&l);
        }
        assert_eq!(got.edges(), want.edges());
    }

    #[test]
    fn complete_instance_sits_on_band_center() {
        let p = complete_triad(5);
        let h = Hypergraph3::from_edges(15, triangles(&p)).unwrap();
        let rep =
            tuple_band_audit(&h, &p, 2, &int(1), &int(1), 0.1, TupleMode::Exhaustive).unwrap();
        assert_eq!(rep.band_center, int(25));
        assert_eq!((rep.bad_fraction_low, rep.bad_fraction_high), (0.0, 0.0));
        assert_eq!(rep.tuples, 25);
        let ext = extension_audit(&h, &p, &[0], 0.01, &int(1), &int(1), 13.0).unwrap();
        assert!(ext.all_pass());
        assert!(ext.e3_failing.is_empty() && ext.e4_failing.is_empty());
    }

    #[test]
    fn zero_length_band_checks_pair_density() {
        let p = random_triad(6, 0.5, 7);
        let h = Hypergraph3::empty(18);
        let e = p.edges_between(&parts(6)[1], &parts(6)[2]) as i64;
        let rep = tuple_band_audit(
            &h,
            &p,
            0,
            &rat(1, 2),
            &rat(1, 2),
            0.2,
            TupleMode::Exhaustive,
        )
        .unwrap();
        assert_eq!(rep.tuples, 1);
        assert_eq!(rep.band_center, rat(36, 2));
        let inside =
            (int(e) - int(18)) <= int(18) * rat(1, 5) && (int(18) - int(e)) <= int(18) * rat(1, 5);
        assert_eq!(rep.pass, inside);
    }

    #[test]
    fn extension_fractions_match_per_vertex_scan() {
        let p = random_triad(8, 0.8, 8);
        let h = random_on_triangles(&p, 0.5, 9);
        let (d3, d2) = (rat(1, 2), rat(4, 5));
        let ext = extension_audit(&h, &p, &[2], 0.02, &d3, &d2, 13.0).unwrap();
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for &x in &parts(8)[0] {
            let s = int(joint_link(&h, &[2, x], &p).unwrap().edge_count() as i64);
            if s < ext.lower_threshold {
                lo.push(x);
            }
            if s > ext.upper_threshold {
                hi.push(x);
            }
        }
        assert_eq!(ext.e3_failing, lo);
        assert_eq!(ext.e4_failing, hi);
        let first = extension_audit(&h, &p, &[], 0.02, &d3, &d2, 13.0).unwrap();
        assert_eq!(first.e1_target_y, int(8));
        assert_eq!(first.e2_target, &d2 * int(64));
    }

    #[test]
    fn small_joint_matches_direct_count() {
        let p = random_triad(10, 0.5, 10);
        let d2 = rat(1, 2);
        for (a, b) in [([0usize], [1usize]), ([2], [7]), ([4], [4])] {
            let ny: std::collections::BTreeSet<_> = joint_neighborhood(&p, &a, Side::Y)
                .unwrap()
                .into_iter()
                .collect();
            let my: std::collections::BTreeSet<_> = joint_neighborhood(&p, &b, Side::Y)
                .unwrap()
                .into_iter()
                .collect();
            let nz: std::collections::BTreeSet<_> = joint_neighborhood(&p, &a, Side::Z)
                .unwrap()
                .into_iter()
                .collect();
            let mz: std::collections::BTreeSet<_> = joint_neighborhood(&p, &b, Side::Z)
                .unwrap()
                .into_iter()
                .collect();
            let want = ny.intersection(&my).count() as f64 <= 2.0 * 0.25 * 10.0
                && nz.intersection(&mz).count() as f64 <= 2.0 * 0.25 * 10.0;
            assert_eq!(small_joint(&p, &a, &b, &d2).unwrap(), want);
        }
    }

    #[test]
    fn too_few_compatible_tuples_is_partial() {
        let p = complete_triad(4);
        let h = Hypergraph3::from_edges(12, triangles(&p)).unwrap();
        let params = WitnessParams {
            d3: int(1),
            d2: rat(1, 4),
            gamma: 0.01,
            multiplier: 13.0,
            zeta: 0.25,
            r: 2,
            failure: Failure::Lower,
        };
        // In complete P two tuples share every neighbour, far above 2·d2²·|Y|.
        let fam = irregularity_witness(&h, &p, &[vec![0], vec![1]], &params).unwrap();
        assert!(fam.partial);
        assert_eq!(fam.tuples.len(), 1);
    }

    #[test]
    fn planted_slab_yields_a_strong_violation() {
        let k = 12;
        let p = complete_triad(k);
        let mut rng = RngSpec::from_seed(11).rng();
        let slab: Vec<Vertex> = (0..4).collect();
        let tri: Vec<_> = triangles(&p)
            .into_iter()
            .filter(|e| rng.gen_bool(if slab.contains(&e[0]) { 0.1 } else { 0.7 }))
            .collect();
        let h = Hypergraph3::from_edges(3 * k, tri).unwrap();
        let params = WitnessParams {
            d3: rat(7, 10),
            d2: int(1),
            gamma: 0.02,
            multiplier: 13.0,
            zeta: 1.0 / 3.0,
            r: 1,
            failure: Failure::Lower,
        };
        let fam = irregularity_witness(&h, &p, &[vec![6]], &params).unwrap();
        assert!(!fam.partial);
        assert!(fam.ratio > Rational::zero());
        let fam_qs = vec![fam.witness.qs.clone()];
        let v = strong_regularity_check(
            &h,
            &p,
            &rat(7, 10),
            0.05,
            1,
            Some(&fam_qs),
            StrongSearch::ExactBoxes,
        )
        .unwrap();
        assert!(!v.regular);
    }

    #[test]
    fn drc_on_complete_k8() {
        let h = Hypergraph3::complete(8);
        let out = dependent_random_choice(&h, 1, 2, 1, 1.625, 8, &RngSpec::from_seed(1)).unwrap();
        assert_eq!(out.lhs, rat(13, 8));
        assert!(out.guarantee);
        let u = out.u.unwrap();
        assert!(u.len() >= 2);
        assert_eq!(out.verified, Some(true));
        let links = pair_links(&h);
        assert_eq!(set_link_size(&links, 8, &[0, 1]), 15);
    }

    #[test]
    fn drc_trivial_cases() {
        let h = Hypergraph3::complete(6);
        let out = dependent_random_choice(&h, 2, 2, 0, 1.0, 4, &RngSpec::from_seed(2)).unwrap();
        assert_eq!(out.u.unwrap(), (0..6).collect::<Vec<_>>());
        let e = Hypergraph3::empty(6);
        let out = dependent_random_choice(&e, 1, 2, 1, 1.0, 4, &RngSpec::from_seed(2)).unwrap();
        assert!(!out.guarantee);
        assert!(dependent_random_choice(
            &Hypergraph3::empty(2),
            1,
            1,
            1,
            1.0,
            1,
            &RngSpec::from_seed(0)
        )
        .is_err());
    }

    #[test]
    fn drc_dense_threshold_exists() {
        let n0 = drc_dense_threshold(1.0, 2, 1.0, 60).unwrap().unwrap();
        assert!(n0 < 40);
        assert_eq!(drc_dense_parameters(16, 1.0, 2).unwrap(), (16, 2));
    }

    #[test]
    fn census_trivial_cases() {
        let e = Hypergraph3::empty(7);
        let c = weak_tuple_census(&e, &[0, 1, 2], 2, 1).unwrap();
        assert_eq!((c.sum_identity_lhs, c.dense_tuple_count), (0, 0));
        let h = Hypergraph3::complete(6);
        let u: Vec<Vertex> = (0..6).collect();
        let c = weak_tuple_census(&h, &u, 1, 0).unwrap();
        assert_eq!(c.sum_identity_lhs, 6 * 10);
    }

    #[test]
    fn constants_respect_orderings() {
        let c = tuple_constants(2, 0.1, 0.5, 0.05).unwrap();
        assert!(c.zeta < 0.1 && c.zeta < 0.5 / 11.0);
        assert!(c.delta3 > 0.0 && c.delta3 < c.zeta.powi(3));
        assert!(c.delta2 > 0.0 && c.delta2 < c.delta3);
        assert!(c.r >= 1);
        assert!(c.d2_small);
    }
}
