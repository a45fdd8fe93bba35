//! Regularity auditors: bipartite pairs, weakly regular tripartite 3-graphs,
//! `(δ,d,r)`-regularity relative to a triad, triangle-counting windows, the
//! slicing lemma and the graph tuple property.
//!
//! Exact modes enumerate subsets and are oracles at tiny sizes. Sampled modes
//! run alternating local search from random starts: they can exhibit
//! irregularity but never prove regularity.
//!
//! Restricting to subsets with `|X'| ≥ δ|X|` loses nothing: a smaller box has
//! deviation at most `|X'||Y'| < δ|X||Y|`. Hence all searches range over all
//! subsets.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{triangles, Graph2, Hypergraph3, Triple, Vertex, VertexPartition};
use crate::random::RngSpec;
use crate::rational::{from_u128, small_parts, to_f64, Rational};

/// Bits enumerated by exact box search (two smallest sides together).
pub const EXACT_BITS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditMode {
    Exact,
    Sampled { samples: usize, spec: RngSpec },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeTag {
    Exact,
    Sampled,
    Verified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    Pair {
        x: Vec<Vertex>,
        y: Vec<Vertex>,
    },
    Triple {
        x: Vec<Vertex>,
        y: Vec<Vertex>,
        z: Vec<Vertex>,
    },
    Strong {
        family: StrongWitness,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityVerdict {
    pub mode: ModeTag,
    pub regular: bool,
    pub delta: f64,
    /// Largest normalised deviation found (exact: the maximum).
    pub delta_measured: f64,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub deviation: Rational,
    pub witness: Option<Witness>,
    pub samples: usize,
}

/// Subgraphs `Q_1..Q_r` of a triad with the sizes of their triangle union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongWitness {
    pub qs: Vec<Graph2>,
    pub union_triangles: usize,
    pub union_h_triangles: usize,
}

impl Serialize for StrongWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw {
            qs: Vec<Vec<(Vertex, Vertex)>>,
            union_triangles: usize,
            union_h_triangles: usize,
        }
        Raw {
            qs: self.qs.iter().map(Graph2::edges).collect(),
            union_triangles: self.union_triangles,
            union_h_triangles: self.union_h_triangles,
        }
        .serialize(s)
    }
}

pub(crate) fn density_parts(d: &Rational) -> Result<(i64, i64)> {
    if d.is_negative() || *d > Rational::from_integer(BigInt::from(1)) {
        return invalid("density must lie in [0, 1]");
    }
    small_parts(d).ok_or_else(|| Error::Invalid("density has oversized terms".into()))
}

pub(crate) fn check_delta(delta: f64) -> Result<Rational> {
    if !(delta.is_finite() && delta >= 0.0) {
        return invalid("δ must be a nonnegative real");
    }
    Ok(Rational::from_float(delta).expect("finite"))
}

/// A 0/1 tensor over `X × Y × Z` with an optional support tensor. The box
/// value of `(X', Y', Z')` is `q·|H ∩ box| − p·|T ∩ box|`, where `T` is the
/// support (all of `X × Y × Z` when absent) and `d = p/q`.
pub(crate) struct BoxTensor {
    pub dims: [usize; 3],
    h: Vec<FixedBitSet>,
    t: Option<Vec<FixedBitSet>>,
    p: i64,
    q: i64,
}

pub(crate) type Masks = [FixedBitSet; 3];

impl BoxTensor {
    fn hz(&self, x: usize, y: usize) -> &FixedBitSet {
        &self.h[x * self.dims[1] + y]
    }

    fn tz_count(&self, x: usize, y: usize, zs: &FixedBitSet) -> i64 {
        match &self.t {
            Some(t) => t[x * self.dims[1] + y].intersection(zs).count() as i64,
            None => zs.count_ones(..) as i64,
        }
    }

    /// Per-element contribution along `dim` given masks on the other two dims.
    fn scores(&self, dim: usize, m: &Masks) -> Vec<i64> {
        let [nx, ny, nz] = self.dims;
        match dim {
            0 => (0..nx)
                .map(|x| {
                    m[1].ones()
                        .map(|y| {
                            self.q * self.hz(x, y).intersection(&m[2]).count() as i64
                                - self.p * self.tz_count(x, y, &m[2])
                        })
                        .sum()
                })
                .collect(),
            1 => (0..ny)
                .map(|y| {
                    m[0].ones()
                        .map(|x| {
                            self.q * self.hz(x, y).intersection(&m[2]).count() as i64
                                - self.p * self.tz_count(x, y, &m[2])
                        })
                        .sum()
                })
                .collect(),
            _ => {
                let mut hc = vec![0i64; nz];
                let mut tc = vec![0i64; nz];
                let pairs = (m[0].count_ones(..) * m[1].count_ones(..)) as i64;
                for x in m[0].ones() {
                    for y in m[1].ones() {
                        for z in self.hz(x, y).ones() {
                            hc[z] += 1;
                        }
                        if let Some(t) = &self.t {
                            for z in t[x * ny + y].ones() {
                                tc[z] += 1;
                            }
                        }
                    }
                }
                (0..nz)
                    .map(|z| {
                        let tcount = if self.t.is_some() { tc[z] } else { pairs };
                        self.q * hc[z] - self.p * tcount
                    })
                    .collect()
            }
        }
    }

    pub fn value(&self, m: &Masks) -> i64 {
        let s = self.scores(0, m);
        m[0].ones().map(|x| s[x]).sum()
    }

    fn pick(scores: &[i64], sign: i64) -> (FixedBitSet, i64) {
        let mut set = FixedBitSet::with_capacity(scores.len());
        let mut total = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s * sign > 0 {
                set.insert(i);
                total += s;
            }
        }
        (set, total)
    }

    /// Maximum of `|value|` over all boxes: the two smallest dims are
    /// enumerated, the largest is chosen greedily per sign.
    pub fn exact(&self) -> Result<(i64, Masks)> {
        let mut order = [0usize, 1, 2];
        order.sort_by_key(|&d| (self.dims[d], d));
        let (a, b, g) = (order[0], order[1], order[2]);
        let bits = self.dims[a] + self.dims[b];
        if bits > EXACT_BITS {
            return Err(Error::InstanceTooLarge {
                what: "exact subset enumeration bits".into(),
                limit: EXACT_BITS,
            });
        }
        let mut best = (0i64, empty_masks(self.dims));
        for ma in 0u64..(1 << self.dims[a]) {
            for mb in 0u64..(1 << self.dims[b]) {
                let mut m = empty_masks(self.dims);
                m[a] = mask_from_bits(self.dims[a], ma);
                m[b] = mask_from_bits(self.dims[b], mb);
                let sc = self.scores(g, &m);
                for sign in [1, -1] {
                    let (set, total) = Self::pick(&sc, sign);
                    if total.abs() > best.0.abs() {
                        let mut mm = m.clone();
                        mm[g] = set;
                        best = (total, mm);
                    }
                }
            }
        }
        Ok(best)
    }

    /// Alternating coordinate ascent of `sign · value` from a start box.
    pub fn local_search(&self, start: Masks, sign: i64) -> (i64, Masks) {
        let mut m = start;
        let mut cur = sign * self.value(&m);
        for _ in 0..50 {
            let before = cur;
            for dim in 0..3 {
                let sc = self.scores(dim, &m);
                let (set, total) = Self::pick(&sc, sign);
                if sign * total > cur {
                    m[dim] = set;
                    cur = sign * total;
                }
            }
            if cur <= before {
                break;
            }
        }
        (sign * cur, m)
    }

    pub fn random_start(&self, delta: f64, spec: &RngSpec) -> Masks {
        let mut rng = spec.rng();
        let mut m = empty_masks(self.dims);
        for (dim, mask) in m.iter_mut().enumerate() {
            let n = self.dims[dim];
            if n == 0 {
                continue;
            }
            let lo = ((delta * n as f64).ceil() as usize).clamp(1, n);
            let size = rng.gen_range(lo..=n);
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            for &i in &idx[..size] {
                mask.insert(i);
            }
        }
        m
    }

    /// Runs `samples` independent searches (both signs each) and keeps the
    /// first maximum in sample order, so the result is monotone in `samples`.
    pub fn sampled(&self, delta: f64, samples: usize, spec: &RngSpec) -> (i64, Masks) {
        let results: Vec<(i64, Masks)> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let sub = spec.substream(i as u64);
                let start = self.random_start(delta, &sub);
                let pos = self.local_search(start.clone(), 1);
                let neg = self.local_search(start, -1);
                if neg.0.abs() > pos.0.abs() {
                    neg
                } else {
                    pos
                }
            })
            .collect();
        let mut best = (0i64, empty_masks(self.dims));
        for r in results {
            if r.0.abs() > best.0.abs() {
                best = r;
            }
        }
        best
    }
}

pub(crate) fn empty_masks(dims: [usize; 3]) -> Masks {
    [
        FixedBitSet::with_capacity(dims[0]),
        FixedBitSet::with_capacity(dims[1]),
        FixedBitSet::with_capacity(dims[2]),
    ]
}

fn mask_from_bits(n: usize, bits: u64) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    for i in 0..n {
        if bits >> i & 1 == 1 {
            s.insert(i);
        }
    }
    s
}

fn select(vs: &[Vertex], m: &FixedBitSet) -> Vec<Vertex> {
    m.ones().map(|i| vs[i]).collect()
}

fn run_box(
    tensor: &BoxTensor,
    delta: f64,
    mode: AuditMode,
) -> Result<(i64, Masks, ModeTag, usize)> {
    Ok(match mode {
        AuditMode::Exact => {
            let (v, m) = tensor.exact()?;
            (v, m, ModeTag::Exact, 0)
        }
        AuditMode::Sampled { samples, spec } => {
            let (v, m) = tensor.sampled(delta, samples, &spec);
            (v, m, ModeTag::Sampled, samples)
        }
    })
}

fn bipartite_sides(g: &Graph2) -> Result<(Vec<Vertex>, Vec<Vertex>)> {
    match g.parts() {
        Some(p) if p.len() == 2 => Ok((p[0].clone(), p[1].clone())),
        _ => Err(Error::InvalidParts(
            "expected exactly two declared parts".into(),
        )),
    }
}

pub(crate) fn pair_tensor(g: &Graph2, x: &[Vertex], y: &[Vertex], p: i64, q: i64) -> BoxTensor {
    let mut h = Vec::with_capacity(x.len() * y.len());
    for &a in x {
        for &b in y {
            let mut s = FixedBitSet::with_capacity(1);
            if g.has_edge(a, b) {
                s.insert(0);
            }
            h.push(s);
        }
    }
    BoxTensor {
        dims: [x.len(), y.len(), 1],
        h,
        t: None,
        p,
        q,
    }
}

fn verdict(
    value: i64,
    norm: u128,
    q: i64,
    delta: f64,
    delta_r: &Rational,
    mode: ModeTag,
    witness: Option<Witness>,
    samples: usize,
) -> RegularityVerdict {
    let deviation = if norm == 0 {
        Rational::zero()
    } else {
        from_u128(value.unsigned_abs() as u128, norm * q as u128)
    };
    RegularityVerdict {
        mode,
        regular: deviation <= *delta_r,
        delta,
        delta_measured: to_f64(&deviation),
        deviation,
        witness: if value == 0 { None } else { witness },
        samples,
    }
}

/// `(δ, d)`-regularity of a bipartite graph with two declared parts.
pub fn pair_regularity_audit(
    g: &Graph2,
    d: &Rational,
    delta: f64,
    mode: AuditMode,
) -> Result<RegularityVerdict> {
    let (p, q) = density_parts(d)?;
    let delta_r = check_delta(delta)?;
    let (x, y) = bipartite_sides(g)?;
    let tensor = pair_tensor(g, &x, &y, p, q);
    let (value, m, tag, samples) = run_box(&tensor, delta, mode)?;
    let w = Witness::Pair {
        x: select(&x, &m[0]),
        y: select(&y, &m[1]),
    };
    Ok(verdict(
        value,
        (x.len() * y.len()) as u128,
        q,
        delta,
        &delta_r,
        tag,
        Some(w),
        samples,
    ))
}

/// Exact deviation `|e(X',Y') − d|X'||Y'|| / (|X||Y|)` of one box.
pub fn pair_deviation(g: &Graph2, d: &Rational, xs: &[Vertex], ys: &[Vertex]) -> Result<Rational> {
    let (x, y) = bipartite_sides(g)?;
    let e = g.edges_between(xs, ys) as i64;
    let dev = Rational::from_integer(BigInt::from(e))
        - d * Rational::from_integer(BigInt::from((xs.len() * ys.len()) as i64));
    Ok(dev.abs() / Rational::from_integer(BigInt::from((x.len() * y.len()) as i64)))
}

pub(crate) fn triple_tensor(h: &Hypergraph3, parts: [&[Vertex]; 3], p: i64, q: i64) -> BoxTensor {
    let [x, y, z] = parts;
    let mut zpos = vec![usize::MAX; h.n()];
    for (i, &v) in z.iter().enumerate() {
        zpos[v] = i;
    }
    let mut xi = vec![usize::MAX; h.n()];
    let mut yi = vec![usize::MAX; h.n()];
    for (i, &v) in x.iter().enumerate() {
        xi[v] = i;
    }
    for (i, &v) in y.iter().enumerate() {
        yi[v] = i;
    }
    let mut hs = vec![FixedBitSet::with_capacity(z.len()); x.len() * y.len()];
    for e in h.edges() {
        // assign the edge's vertices to X, Y, Z when it is a crossing triple
        let (mut a, mut b, mut c) = (None, None, None);
        for &v in e {
            if xi[v] != usize::MAX {
                a = Some(xi[v]);
            } else if yi[v] != usize::MAX {
                b = Some(yi[v]);
            } else if zpos[v] != usize::MAX {
                c = Some(zpos[v]);
            }
        }
        if let (Some(a), Some(b), Some(c)) = (a, b, c) {
            hs[a * y.len() + b].insert(c);
        }
    }
    BoxTensor {
        dims: [x.len(), y.len(), z.len()],
        h: hs,
        t: None,
        p,
        q,
    }
}

fn check_disjoint(n: usize, sets: &[&[Vertex]]) -> Result<()> {
    let mut seen = vec![false; n];
    for s in sets {
        for &v in *s {
            if v >= n {
                return Err(Error::InvalidParts(format!("vertex {} >= n", v)));
            }
            if seen[v] {
                return Err(Error::InvalidParts(format!("vertex {} in two parts", v)));
            }
            seen[v] = true;
        }
    }
    Ok(())
}

/// `(δ, d)`-weak regularity of `H[X, Y, Z]`.
pub fn weak_regularity_audit(
    h: &Hypergraph3,
    parts: [&[Vertex]; 3],
    d: &Rational,
    delta: f64,
    mode: AuditMode,
) -> Result<RegularityVerdict> {
    check_disjoint(h.n(), &parts)?;
    let (p, q) = density_parts(d)?;
    let delta_r = check_delta(delta)?;
    let tensor = triple_tensor(h, parts, p, q);
    let (value, m, tag, samples) = run_box(&tensor, delta, mode)?;
    let w = Witness::Triple {
        x: select(parts[0], &m[0]),
        y: select(parts[1], &m[1]),
        z: select(parts[2], &m[2]),
    };
    let norm = (parts[0].len() * parts[1].len() * parts[2].len()) as u128;
    Ok(verdict(
        value,
        norm,
        q,
        delta,
        &delta_r,
        tag,
        Some(w),
        samples,
    ))
}

/// Exact weak deviation of one box, normalised by `|X||Y||Z|`.
pub fn weak_deviation(
    h: &Hypergraph3,
    parts: [&[Vertex]; 3],
    d: &Rational,
    boxes: [&[Vertex]; 3],
) -> Rational {
    let in_set = |s: &[Vertex], v: Vertex| s.contains(&v);
    let e = h
        .edges()
        .iter()
        .filter(|e| {
            let mut hit = [false; 3];
            for &v in e.iter() {
                for k in 0..3 {
                    if in_set(boxes[k], v) {
                        hit[k] = true;
                    }
                }
            }
            hit.iter().all(|&b| b) && e.iter().all(|&v| boxes.iter().any(|b| in_set(b, v)))
        })
        .count() as i64;
    let vol = (boxes[0].len() * boxes[1].len() * boxes[2].len()) as i64;
    let norm = (parts[0].len() * parts[1].len() * parts[2].len()) as i64;
    let dev =
        Rational::from_integer(BigInt::from(e)) - d * Rational::from_integer(BigInt::from(vol));
    dev.abs() / Rational::from_integer(BigInt::from(norm))
}

/// Per-triple verdicts for every part triple `i < j < k`, in lexicographic
/// order. Parts small enough are audited exactly, the rest sampled.
pub fn partition_weak_verdicts(
    h: &Hypergraph3,
    v: &VertexPartition,
    delta: f64,
    samples: usize,
    spec: &RngSpec,
) -> Result<Vec<((usize, usize, usize), RegularityVerdict)>> {
    let t = v.num_parts();
    let mut triples = Vec::new();
    for i in 0..t {
        for j in i + 1..t {
            for k in j + 1..t {
                triples.push((i, j, k));
            }
        }
    }
    triples
        .par_iter()
        .enumerate()
        .map(|(idx, &(i, j, k))| {
            let parts = [v.part(i), v.part(j), v.part(k)];
            let sub = crate::hypergraph::induce_tripartite(h, parts[0], parts[1], parts[2])?;
            let vol = (parts[0].len() * parts[1].len() * parts[2].len()) as u128;
            let d = from_u128(sub.edge_count() as u128, vol);
            let mut sizes = [parts[0].len(), parts[1].len(), parts[2].len()];
            sizes.sort_unstable();
            let mode = if sizes[0] + sizes[1] <= 12 {
                AuditMode::Exact
            } else {
                AuditMode::Sampled {
                    samples,
                    spec: spec.substream(idx as u64),
                }
            };
            Ok((
                (i, j, k),
                weak_regularity_audit(&sub, parts, &d, delta, mode)?,
            ))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionWeakReport {
    pub triples: usize,
    pub irregular: usize,
    pub fraction: f64,
    pub pass: bool,
}

/// Fraction of part triples whose `H[V_i,V_j,V_k]` fails δ-weak-regularity at
/// its own density; passes iff the fraction is at most δ.
pub fn partition_weak_regularity(
    h: &Hypergraph3,
    v: &VertexPartition,
    delta: f64,
    samples: usize,
    spec: &RngSpec,
) -> Result<PartitionWeakReport> {
    let verdicts = partition_weak_verdicts(h, v, delta, samples, spec)?;
    Ok(summarize_weak(&verdicts, delta))
}

pub(crate) fn summarize_weak(
    verdicts: &[((usize, usize, usize), RegularityVerdict)],
    delta: f64,
) -> PartitionWeakReport {
    let irregular = verdicts.iter().filter(|(_, v)| !v.regular).count();
    let fraction = if verdicts.is_empty() {
        0.0
    } else {
        irregular as f64 / verdicts.len() as f64
    };
    PartitionWeakReport {
        triples: verdicts.len(),
        irregular,
        fraction,
        pass: fraction <= delta,
    }
}

fn triad_parts(p: &Graph2) -> Result<[Vec<Vertex>; 3]> {
    match p.parts() {
        Some(ps) if ps.len() == 3 => Ok([ps[0].clone(), ps[1].clone(), ps[2].clone()]),
        _ => Err(Error::InvalidParts(
            "a triad needs exactly three declared parts".into(),
        )),
    }
}

/// Triangles of a triad indexed for fast union arithmetic.
pub(crate) struct TriadIndex {
    pub parts: [Vec<Vertex>; 3],
    pub tris: Vec<Triple>,
    pub in_h: FixedBitSet,
    /// Offsets into `tris` for every `(x, y)` index pair, plus the `z` indices.
    offset: Vec<usize>,
    zs: Vec<usize>,
}

impl TriadIndex {
    pub fn new(h: &Hypergraph3, p: &Graph2) -> Result<Self> {
        let parts = triad_parts(p)?;
        let n = p.n();
        let mut pos = vec![usize::MAX; n];
        for part in &parts {
            for (i, &v) in part.iter().enumerate() {
                pos[v] = i;
            }
        }
        let [x, y, z] = &parts;
        let mut tris = Vec::new();
        let mut zs = Vec::new();
        let mut offset = Vec::with_capacity(x.len() * y.len() + 1);
        let mut zset = FixedBitSet::with_capacity(n);
        for &c in z {
            zset.insert(c);
        }
        for &a in x {
            for &b in y {
                offset.push(tris.len());
                if !p.has_edge(a, b) {
                    continue;
                }
                let mut common: Vec<Vertex> = p
                    .neighbors(a)
                    .intersection(p.neighbors(b))
                    .filter(|&c| zset.contains(c))
                    .collect();
                common.sort_unstable();
                for c in common {
                    tris.push([a, b, c]);
                    zs.push(pos[c]);
                }
            }
        }
        offset.push(tris.len());
        let mut in_h = FixedBitSet::with_capacity(tris.len());
        for (i, t) in tris.iter().enumerate() {
            if h.has_edge(t) {
                in_h.insert(i);
            }
        }
        Ok(TriadIndex {
            parts,
            tris,
            in_h,
            offset,
            zs,
        })
    }

    pub fn len(&self) -> usize {
        self.tris.len()
    }

    fn tensor(&self, p: i64, q: i64) -> BoxTensor {
        let (nx, ny, nz) = (
            self.parts[0].len(),
            self.parts[1].len(),
            self.parts[2].len(),
        );
        let mut h = vec![FixedBitSet::with_capacity(nz); nx * ny];
        let mut t = vec![FixedBitSet::with_capacity(nz); nx * ny];
        for xy in 0..nx * ny {
            for i in self.offset[xy]..self.offset[xy + 1] {
                t[xy].insert(self.zs[i]);
                if self.in_h.contains(i) {
                    h[xy].insert(self.zs[i]);
                }
            }
        }
        BoxTensor {
            dims: [nx, ny, nz],
            h,
            t: Some(t),
            p,
            q,
        }
    }

    fn box_set(&self, m: &Masks) -> FixedBitSet {
        let ny = self.parts[1].len();
        let mut s = FixedBitSet::with_capacity(self.len());
        for x in m[0].ones() {
            for y in m[1].ones() {
                let xy = x * ny + y;
                for i in self.offset[xy]..self.offset[xy + 1] {
                    if m[2].contains(self.zs[i]) {
                        s.insert(i);
                    }
                }
            }
        }
        s
    }

    fn value(&self, s: &FixedBitSet, p: i64, q: i64) -> i64 {
        q * s.intersection(&self.in_h).count() as i64 - p * s.count_ones(..) as i64
    }

    /// Triangle set of `Q_x` with `X_x` chosen optimally for `sign`.
    fn link_set(&self, x0: usize, p: i64, q: i64, sign: i64) -> (FixedBitSet, FixedBitSet) {
        let ny = self.parts[1].len();
        let nx = self.parts[0].len();
        // (y, z) pairs completing x0 to an H-triangle of the triad.
        let mut link = std::collections::HashSet::new();
        for y in 0..ny {
            let xy = x0 * ny + y;
            for i in self.offset[xy]..self.offset[xy + 1] {
                if self.in_h.contains(i) {
                    link.insert((y, self.zs[i]));
                }
            }
        }
        let mut chosen = FixedBitSet::with_capacity(nx);
        let mut s = FixedBitSet::with_capacity(self.len());
        for x in 0..nx {
            let mut val = 0i64;
            let mut idx = Vec::new();
            for y in 0..ny {
                let xy = x * ny + y;
                for i in self.offset[xy]..self.offset[xy + 1] {
                    if link.contains(&(y, self.zs[i])) {
                        idx.push(i);
                        val += if self.in_h.contains(i) { q - p } else { -p };
                    }
                }
            }
            if val * sign > 0 {
                chosen.insert(x);
                for i in idx {
                    s.insert(i);
                }
            }
        }
        (s, chosen)
    }

    fn box_graph(&self, p: &Graph2, m: &Masks) -> Graph2 {
        let sets: Vec<Vec<Vertex>> = (0..3).map(|d| select(&self.parts[d], &m[d])).collect();
        let mut g = Graph2::with_parts(p.n(), self.parts.to_vec()).expect("triad parts");
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            for &u in &sets[a] {
                for &v in &sets[b] {
                    if p.has_edge(u, v) {
                        g.insert(u, v);
                    }
                }
            }
        }
        g
    }

    /// `Q_x = P[X_x, N_P(x,Y)] ∪ P[X_x, N_P(x,Z)] ∪ L_H(x, P)`.
    fn link_graph(&self, h: &Hypergraph3, p: &Graph2, x0: Vertex, xs: &[Vertex]) -> Graph2 {
        let mut g = Graph2::with_parts(p.n(), self.parts.to_vec()).expect("triad parts");
        for side in [1, 2] {
            for &w in &self.parts[side] {
                if !p.has_edge(x0, w) {
                    continue;
                }
                for &x in xs {
                    if p.has_edge(x, w) {
                        g.insert(x, w);
                    }
                }
            }
        }
        for &y in &self.parts[1] {
            for &z in &self.parts[2] {
                if p.has_edge(y, z) && h.contains(x0, y, z) {
                    g.insert(y, z);
                }
            }
        }
        g
    }
}

/// Union size and `H`-hits of `∪ 𝒦_3(Q_i)`, after checking `Q_i ⊆ P`.
pub fn evaluate_strong_witness(
    h: &Hypergraph3,
    p: &Graph2,
    qs: &[Graph2],
) -> Result<StrongWitness> {
    let mut union: std::collections::BTreeSet<Triple> = std::collections::BTreeSet::new();
    for q in qs {
        if !q.is_subgraph_of(p) {
            return invalid("witness subgraph is not contained in the triad");
        }
        union.extend(triangles(q));
    }
    let hits = union.iter().filter(|t| h.has_edge(t)).count();
    Ok(StrongWitness {
        qs: qs.to_vec(),
        union_triangles: union.len(),
        union_h_triangles: hits,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrongSearch {
    /// Supplied witness families are verified instead of searched.
    Sampled { samples: usize, spec: RngSpec },
    /// Exhaustive box search plus all link-shaped candidates.
    ExactBoxes,
}

/// `(δ, d, r)`-regularity of `H` relative to triad `P`.
///
/// With `witnesses`, each family is verified. Otherwise candidate subgraphs
/// are generated (boxes `P[X',Y',Z']` by local search and link-shaped `Q_x`)
/// and greedily unioned up to `r`. A `regular` verdict from the search only
/// means that no violation was found.
pub fn strong_regularity_check(
    h: &Hypergraph3,
    p: &Graph2,
    d: &Rational,
    delta: f64,
    r: usize,
    witnesses: Option<&[Vec<Graph2>]>,
    search: StrongSearch,
) -> Result<RegularityVerdict> {
    let (pn, qd) = density_parts(d)?;
    let delta_r = check_delta(delta)?;
    let idx = TriadIndex::new(h, p)?;
    if idx.len() == 0 {
        return Err(Error::UndefinedDensity(
            "the triad spans no triangle".into(),
        ));
    }
    let norm = idx.len() as u128;
    if let Some(families) = witnesses {
        let mut best: Option<(i64, StrongWitness)> = None;
        for fam in families {
            if fam.len() > r {
                return invalid(format!(
                    "witness family has {} > r = {} members",
                    fam.len(),
                    r
                ));
            }
            let w = evaluate_strong_witness(h, p, fam)?;
            let val = qd * w.union_h_triangles as i64 - pn * w.union_triangles as i64;
            if best.as_ref().map_or(true, |(b, _)| val.abs() > b.abs()) {
                best = Some((val, w));
            }
        }
        let (val, w) = best.unwrap_or((
            0,
            StrongWitness {
                qs: vec![],
                union_triangles: 0,
                union_h_triangles: 0,
            },
        ));
        return Ok(verdict(
            val,
            norm,
            qd,
            delta,
            &delta_r,
            ModeTag::Verified,
            Some(Witness::Strong { family: w }),
            families.len(),
        ));
    }
    let (val, family, samples) = search_strong(h, p, &idx, pn, qd, delta, r, search)?;
    let w = evaluate_strong_witness(h, p, &family)?;
    debug_assert_eq!(
        qd * w.union_h_triangles as i64 - pn * w.union_triangles as i64,
        val
    );
    Ok(verdict(
        val,
        norm,
        qd,
        delta,
        &delta_r,
        match search {
            StrongSearch::ExactBoxes => ModeTag::Exact,
            StrongSearch::Sampled { .. } => ModeTag::Sampled,
        },
        Some(Witness::Strong { family: w }),
        samples,
    ))
}

enum Cand {
    Box(Masks),
    Link(usize, FixedBitSet),
}

#[allow(clippy::too_many_arguments)]
fn search_strong(
    h: &Hypergraph3,
    p: &Graph2,
    idx: &TriadIndex,
    pn: i64,
    qd: i64,
    delta: f64,
    r: usize,
    search: StrongSearch,
) -> Result<(i64, Vec<Graph2>, usize)> {
    let tensor = idx.tensor(pn, qd);
    let mut cands: Vec<(FixedBitSet, Cand)> = Vec::new();
    let samples = match search {
        StrongSearch::ExactBoxes => {
            let (_, m) = tensor.exact()?;
            cands.push((idx.box_set(&m), Cand::Box(m)));
            0
        }
        StrongSearch::Sampled { samples, spec } => {
            let found: Vec<[(i64, Masks); 2]> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let start = tensor.random_start(delta, &spec.substream(i as u64));
                    [
                        tensor.local_search(start.clone(), 1),
                        tensor.local_search(start, -1),
                    ]
                })
                .collect();
            for pair in found {
                for (v, m) in pair {
                    if v != 0 {
                        cands.push((idx.box_set(&m), Cand::Box(m)));
                    }
                }
            }
            samples
        }
    };
    for x0 in 0..idx.parts[0].len() {
        for sign in [1, -1] {
            let (s, chosen) = idx.link_set(x0, pn, qd, sign);
            if s.count_ones(..) > 0 {
                cands.push((s, Cand::Link(x0, chosen)));
            }
        }
    }
    // Greedy unions of up to r candidates, per sign.
    let mut best: (i64, Vec<usize>) = (0, vec![]);
    for sign in [1i64, -1] {
        let mut chosen: Vec<usize> = Vec::new();
        let mut acc = FixedBitSet::with_capacity(idx.len());
        let mut cur = 0i64;
        while chosen.len() < r.max(1) {
            let mut pick: Option<(i64, usize)> = None;
            for (ci, (s, _)) in cands.iter().enumerate() {
                if chosen.contains(&ci) {
                    continue;
                }
                let mut u = acc.clone();
                u.union_with(s);
                let v = sign * idx.value(&u, pn, qd);
                if v > cur && pick.map_or(true, |(pv, _)| v > pv) {
                    pick = Some((v, ci));
                }
            }
            match pick {
                Some((v, ci)) => {
                    acc.union_with(&cands[ci].0);
                    chosen.push(ci);
                    cur = v;
                }
                None => break,
            }
        }
        if cur > best.0.abs() {
            best = (sign * cur, chosen);
        }
    }
    let family = best
        .1
        .iter()
        .map(|&ci| match &cands[ci].1 {
            Cand::Box(m) => idx.box_graph(p, m),
            Cand::Link(x0, xs) => {
                let xsv = select(&idx.parts[0], xs);
                idx.link_graph(h, p, idx.parts[0][*x0], &xsv)
            }
        })
        .collect();
    Ok((best.0, family, samples))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certify {
    /// Audit the bipartite pieces first; refuse on a found irregularity.
    Audit {
        samples: usize,
        spec: RngSpec,
    },
    Force,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleWindow {
    pub count: u64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
    /// The `(d³ ± 4δ)|X||Y||Z|` window, reported when `d ≤ 1/2`.
    pub simple_window: Option<(f64, f64)>,
}

/// Triangle-counting windows for a `(δ,d)`-triad. With `two_sided = Some(X')`
/// the count is `|𝒦_3(P, X')|`, the triangles meeting `X'`.
pub fn triangle_count_window(
    p: &Graph2,
    d: f64,
    delta: f64,
    two_sided: Option<&[Vertex]>,
    certify: Certify,
) -> Result<TriangleWindow> {
    if !(d > 0.0 && d <= 1.0) {
        return invalid("d must lie in (0, 1]");
    }
    if !(delta > 0.0 && delta < d / 2.0) {
        return invalid("counting lemma needs 0 < δ < d/2");
    }
    let [x, y, z] = triad_parts(p)?;
    if let Certify::Audit { samples, spec } = certify {
        let dr = Rational::from_float(d).expect("finite");
        let pairs: Vec<(&[Vertex], &[Vertex])> = if two_sided.is_some() {
            vec![(&x, &y), (&x, &z)]
        } else {
            vec![(&x, &y), (&x, &z), (&y, &z)]
        };
        for (i, (a, b)) in pairs.into_iter().enumerate() {
            let g = p.restrict(a, b)?;
            let mode = if a.len().min(b.len()) <= 12 {
                AuditMode::Exact
            } else {
                AuditMode::Sampled {
                    samples,
                    spec: spec.substream(i as u64),
                }
            };
            let dr = clamp_small(&dr);
            if !pair_regularity_audit(&g, &dr, delta, mode)?.regular {
                return Err(Error::Refused(format!(
                    "pair {} is not ({}, {})-regular; pass Force to skip",
                    i, delta, d
                )));
            }
        }
    }
    let vol = (x.len() * y.len() * z.len()) as f64;
    match two_sided {
        None => {
            let count = triangles(p)
                .iter()
                .filter(|t| {
                    let part = |v| usize::from(y.contains(&v)) + 2 * usize::from(z.contains(&v));
                    let mut s: Vec<usize> = t.iter().map(|&v| part(v)).collect();
                    s.sort_unstable();
                    s == [0, 1, 2]
                })
                .count() as u64;
            let lower = (1.0 - 2.0 * delta) * (d - delta).powi(3) * vol;
            let upper = ((d + delta).powi(3) + 2.0 * delta) * vol;
            let c = count as f64;
            Ok(TriangleWindow {
                count,
                lower,
                upper,
                pass: lower <= c && c <= upper,
                simple_window: (d <= 0.5).then(|| {
                    (
                        (d.powi(3) - 4.0 * delta) * vol,
                        (d.powi(3) + 4.0 * delta) * vol,
                    )
                }),
            })
        }
        Some(xp) => {
            if xp.iter().any(|v| !x.contains(v)) {
                return invalid("X' must be a subset of the first part");
            }
            if (xp.len() as f64) < delta * x.len() as f64 {
                return invalid("two-sided window needs |X'| ≥ δ|X|");
            }
            let mut count = 0u64;
            for &a in xp {
                for &b in &y {
                    if !p.has_edge(a, b) {
                        continue;
                    }
                    for &c in &z {
                        if p.has_edge(a, c) && p.has_edge(b, c) {
                            count += 1;
                        }
                    }
                }
            }
            let eyz = p.edges_between(&y, &z) as f64;
            let base = d * xp.len() as f64 * eyz;
            let lower = (d - delta) * base - 2.0 * delta * vol;
            let upper = (d + delta) * base + 2.0 * delta * vol;
            let c = count as f64;
            Ok(TriangleWindow {
                count,
                lower,
                upper,
                pass: lower <= c && c <= upper,
                simple_window: None,
            })
        }
    }
}

/// Rounds a float-derived rational to a nearby one with small terms.
fn clamp_small(r: &Rational) -> Rational {
    if small_parts(r).is_some_and(|(_, q)| q <= 1 << 20) {
        return r.clone();
    }
    let scaled = (r * Rational::from_integer(BigInt::from(1 << 20))).round();
    scaled / Rational::from_integer(BigInt::from(1 << 20))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlicingReport {
    pub delta_prime: f64,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub d_prime: Rational,
    pub verdict: RegularityVerdict,
}

/// Audits `G[A', B']` against `(δ', d')` with `δ' = max(δ/α, 2δ)` and
/// `d'` the slice density clamped to `d ± δ`.
pub fn slicing_audit(
    g: &Graph2,
    a_sub: &[Vertex],
    b_sub: &[Vertex],
    d: &Rational,
    delta: f64,
    alpha: f64,
    mode: AuditMode,
) -> Result<SlicingReport> {
    if alpha < delta || alpha > 1.0 {
        return invalid("slicing needs δ ≤ α ≤ 1");
    }
    let (a, b) = bipartite_sides(g)?;
    if a_sub.iter().any(|v| !a.contains(v)) || b_sub.iter().any(|v| !b.contains(v)) {
        return invalid("slices must be subsets of the two sides");
    }
    if (a_sub.len() as f64) < alpha * a.len() as f64
        || (b_sub.len() as f64) < alpha * b.len() as f64
    {
        return invalid("slices must have at least α times the side sizes");
    }
    let delta_prime = (delta / alpha).max(2.0 * delta);
    let sub = g.restrict(a_sub, b_sub)?;
    let dens = from_u128(
        sub.edge_count() as u128,
        (a_sub.len() * b_sub.len()).max(1) as u128,
    );
    let dr = check_delta(delta)?;
    let lo = d - &dr;
    let hi = d + &dr;
    let mut d_prime = if dens < lo {
        lo
    } else if dens > hi {
        hi
    } else {
        dens
    };
    d_prime = clamp_small(&d_prime);
    let one = Rational::from_integer(BigInt::from(1));
    if d_prime > one {
        d_prime = one;
    }
    if d_prime.is_negative() {
        d_prime = Rational::zero();
    }
    let verdict = pair_regularity_audit(&sub, &d_prime, delta_prime, mode)?;
    Ok(SlicingReport {
        delta_prime,
        d_prime,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TupleGraphReport {
    pub tuples: u64,
    pub bad: u64,
    pub bad_fraction: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Fraction of ordered tuples `(x_1..x_ℓ) ∈ X^ℓ` whose joint neighbourhood in
/// `Y'` misses `(d ± δ)^ℓ |Y'|`; passes iff at most `2δℓ`.
pub fn graph_tuple_audit(
    g: &Graph2,
    ell: usize,
    y_sub: &[Vertex],
    d: f64,
    delta: f64,
) -> Result<TupleGraphReport> {
    let (x, y) = bipartite_sides(g)?;
    if ell == 0 {
        return invalid("ℓ must be at least 1");
    }
    if y_sub.iter().any(|v| !y.contains(v)) {
        return invalid("Y' must be a subset of the second side");
    }
    if (d - delta).powi(ell as i32 - 1) * (y_sub.len() as f64) < delta * y.len() as f64 {
        return invalid("precondition (d−δ)^{ℓ−1}|Y'| ≥ δ|Y| fails");
    }
    let total = (x.len() as u64).checked_pow(ell as u32).unwrap_or(u64::MAX);
    if total > 1_000_000 {
        return Err(Error::InstanceTooLarge {
            what: "|X|^ℓ".into(),
            limit: 1_000_000,
        });
    }
    let mut ys = FixedBitSet::with_capacity(g.n());
    for &v in y_sub {
        ys.insert(v);
    }
    let lo = (d - delta).powi(ell as i32) * y_sub.len() as f64;
    let hi = (d + delta).powi(ell as i32) * y_sub.len() as f64;
    fn rec(
        g: &Graph2,
        x: &[Vertex],
        depth: usize,
        cur: &FixedBitSet,
        lo: f64,
        hi: f64,
        bad: &mut u64,
    ) {
        if depth == 0 {
            let c = cur.count_ones(..) as f64;
            if c < lo || c > hi {
                *bad += 1;
            }
            return;
        }
        for &v in x {
            let mut next = cur.clone();
            next.intersect_with(g.neighbors(v));
            rec(g, x, depth - 1, &next, lo, hi, bad);
        }
    }
    let mut bad = 0;
    rec(g, &x, ell, &ys, lo, hi, &mut bad);
    let frac = bad as f64 / total as f64;
    let bound = 2.0 * delta * ell as f64;
    Ok(TupleGraphReport {
        tuples: total,
        bad,
        bad_fraction: frac,
        bound,
        pass: frac <= bound,
    })
}
