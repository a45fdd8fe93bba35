//! Index of pair partitions, β-refinements, witness-driven increments, random
//! slicing and the iterative refinement pipeline at toy scale.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Graph2, Hypergraph3, PairPartition, Triad, Vertex, VertexPartition};
use crate::random::{random_pair_partition, RngSpec};
use crate::rational::{from_u128, to_f64, Rational};
use crate::regularity::{
    pair_regularity_audit, partition_weak_verdicts, strong_regularity_check, summarize_weak,
    AuditMode, PartitionWeakReport, StrongSearch, Witness,
};

/// Triangle and `H`-triangle counts of every triad with `𝒦_3(P) ≠ ∅`.
fn triad_counts(b: &PairPartition, h: &Hypergraph3) -> BTreeMap<Triad, (u64, u64)> {
    let v = b.base();
    let t = v.num_parts();
    let mut triples = Vec::new();
    for i in 0..t {
        for j in i + 1..t {
            for k in j + 1..t {
                triples.push((i, j, k));
            }
        }
    }
    let partial: Vec<HashMap<Triad, (u64, u64)>> = triples
        .par_iter()
        .map(|&(i, j, k)| {
            let mut m: HashMap<Triad, (u64, u64)> = HashMap::new();
            for &x in v.part(i) {
                for &y in v.part(j) {
                    let a = b.label(x, y).expect("cross pair");
                    for &z in v.part(k) {
                        let key = Triad {
                            parts: (i, j, k),
                            labels: (
                                a,
                                b.label(x, z).expect("cross pair"),
                                b.label(y, z).expect("cross pair"),
                            ),
                        };
                        let e = m.entry(key).or_insert((0, 0));
                        e.0 += 1;
                        if h.contains(x, y, z) {
                            e.1 += 1;
                        }
                    }
                }
            }
            m
        })
        .collect();
    let mut out = BTreeMap::new();
    for m in partial {
        out.extend(m);
    }
    out
}

/// `ind(ℬ)` for any pair partition satisfying (B.1); equitability is not
/// required, so Venn refinements can be measured too.
pub fn index_of(b: &PairPartition, h: &Hypergraph3) -> Rational {
    let n = b.n() as u128;
    if n == 0 {
        return Rational::zero();
    }
    // group Σ (h² + (T−h)²) by T so the exact sum has few denominators
    let mut by_t: BTreeMap<u64, u128> = BTreeMap::new();
    for (tt, hh) in triad_counts(b, h).into_values() {
        let (tt, hh) = (tt as u128, hh as u128);
        *by_t.entry(tt as u64).or_insert(0) += hh * hh + (tt - hh) * (tt - hh);
    }
    let mut sum = Rational::zero();
    for (tt, s) in by_t {
        sum += from_u128(s, tt as u128);
    }
    sum / Rational::from_integer(BigInt::from(n * n * n))
}

/// `ind(ℬ)` for an ℓ-equitable `ℬ`, summed over `H` and its complement.
pub fn compute_index(b: &PairPartition, h: &Hypergraph3) -> Result<Rational> {
    b.check_equitable()?;
    if h.n() != b.n() {
        return invalid("hypergraph and partition have different vertex counts");
    }
    Ok(index_of(b, h))
}

#[derive(Clone, Debug)]
pub struct IndexState {
    pub b: PairPartition,
    pub h: Hypergraph3,
    pub index: Rational,
}

impl IndexState {
    pub fn new(b: PairPartition, h: Hypergraph3) -> Result<Self> {
        let index = compute_index(&b, &h)?;
        Ok(IndexState { b, h, index })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum CellKey {
    Clique(usize),
    Cell(usize, usize, u32),
}

fn cell_key(b: &PairPartition, u: Vertex, v: Vertex) -> CellKey {
    let (pu, pv) = (b.base().part_of(u), b.base().part_of(v));
    match b.label(u, v) {
        None => CellKey::Clique(pu),
        Some(l) => CellKey::Cell(pu.min(pv), pu.max(pv), l),
    }
}

/// `Σ e(B') / |V|²` over cells `B'` of `ℬ'` contained in no cell of `ℬ`,
/// with the within-part cliques `K^(2)(V_i)` counted as cells of `ℬ`.
pub fn beta_refinement_deficit(b_new: &PairPartition, b_old: &PairPartition) -> Result<Rational> {
    let n = b_new.n();
    if n != b_old.n() || !b_new.base().refines(b_old.base()) {
        return invalid("the new partition must live on a refinement of the old vertex partition");
    }
    let mut parent: HashMap<CellKey, Option<CellKey>> = HashMap::new();
    let mut size: HashMap<CellKey, u64> = HashMap::new();
    let mut mixed: BTreeSet<CellKey> = BTreeSet::new();
    for u in 0..n {
        for v in u + 1..n {
            let k = match b_new.label(u, v) {
                Some(_) => cell_key(b_new, u, v),
                None => continue,
            };
            let pk = cell_key(b_old, u, v);
            *size.entry(k).or_insert(0) += 1;
            match parent.entry(k).or_insert(Some(pk)) {
                Some(p) if *p != pk => {
                    mixed.insert(k);
                }
                _ => {}
            }
        }
    }
    let bad: u64 = mixed.iter().map(|k| size[k]).sum();
    Ok(from_u128(bad as u128, (n * n) as u128))
}

#[derive(Clone, Debug, Serialize)]
pub struct IrregularTriad {
    pub triad: Triad,
    pub triangles: u64,
    pub delta_measured: f64,
    #[serde(skip)]
    pub family: Vec<Graph2>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrongPartitionReport {
    pub triads: usize,
    pub irregular: Vec<IrregularTriad>,
    /// `Σ |𝒦_3(P)| / |V|³` over triads where a witness was found.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub irregular_mass: Rational,
    pub regular: bool,
}

/// Searches every nonempty triad for `(δ, d(H|P), r)`-irregularity; `H` passes
/// when the irregular triangle mass is at most `δ|V|³`.
pub fn strong_partition_check(
    h: &Hypergraph3,
    b: &PairPartition,
    delta: f64,
    r: usize,
    samples: usize,
    spec: &RngSpec,
) -> Result<StrongPartitionReport> {
    let counts: Vec<(Triad, (u64, u64))> = triad_counts(b, h).into_iter().collect();
    let found: Vec<Result<Option<IrregularTriad>>> = counts
        .par_iter()
        .enumerate()
        .map(|(idx, (triad, (tt, hh)))| {
            if *hh == 0 || hh == tt {
                return Ok(None);
            }
            let p = b.triad_graph(triad);
            let d = from_u128(*hh as u128, *tt as u128);
            let search = StrongSearch::Sampled {
                samples,
                spec: spec.substream(idx as u64),
            };
            let v = strong_regularity_check(h, &p, &d, delta, r, None, search)?;
            if v.regular {
                return Ok(None);
            }
            let family = match v.witness {
                Some(Witness::Strong { family }) => family.qs,
                _ => unreachable!("strong checks return strong witnesses"),
            };
            Ok(Some(IrregularTriad {
                triad: *triad,
                triangles: *tt,
                delta_measured: v.delta_measured,
                family,
            }))
        })
        .collect();
    let mut irregular = Vec::new();
    for f in found {
        if let Some(t) = f? {
            irregular.push(t);
        }
    }
    let n = b.n() as u128;
    let mass: u64 = irregular.iter().map(|t| t.triangles).sum();
    let irregular_mass = from_u128(mass as u128, (n * n * n).max(1));
    let regular = irregular_mass <= Rational::from_float(delta).expect("finite δ");
    Ok(StrongPartitionReport {
        triads: counts.len(),
        irregular,
        irregular_mass,
        regular,
    })
}

/// Refines every cell by the Venn diagram of the witness subgraphs' edge sets.
pub fn venn_refine(b: &PairPartition, families: &[&[Graph2]]) -> Result<PairPartition> {
    let n = b.n();
    let mut sig: HashMap<(Vertex, Vertex), Vec<u32>> = HashMap::new();
    let mut q = 0u32;
    for fam in families {
        for g in fam.iter() {
            if g.n() != n {
                return invalid("witness graph has the wrong vertex count");
            }
            for (u, v) in g.edges() {
                if b.label(u, v).is_none() {
                    return invalid("witness edge inside a part");
                }
                sig.entry((u, v)).or_default().push(q);
            }
            q += 1;
        }
    }
    let t = b.base().num_parts();
    let mut keys: Vec<BTreeMap<(u32, Vec<u32>), u32>> = vec![BTreeMap::new(); t * t];
    let empty = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if let Some(l) = b.label(u, v) {
                let (pu, pv) = (b.base().part_of(u), b.base().part_of(v));
                let s = sig.get(&(u, v)).unwrap_or(&empty).clone();
                keys[pu.min(pv) * t + pu.max(pv)].insert((l, s), 0);
            }
        }
    }
    for m in keys.iter_mut() {
        for (i, val) in m.values_mut().enumerate() {
            *val = i as u32;
        }
    }
    PairPartition::from_fn(
        b.base().clone(),
        |u, v| {
            let (pu, pv) = (b.base().part_of(u), b.base().part_of(v));
            let s = sig.get(&(u, v)).unwrap_or(&empty).clone();
            keys[pu.min(pv) * t + pu.max(pv)][&(b.label(u, v).expect("cross"), s)]
        },
        |i, j| keys[i * t + j].len() as u32,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precondition {
    Enforce,
    Report,
}

#[derive(Clone, Debug, Serialize)]
pub struct IncrementOutcome {
    #[serde(skip)]
    pub b_prime: PairPartition,
    pub refined_triads: usize,
    pub witness_graphs: usize,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub index_before: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub index_after: Rational,
    pub density_condition_met: bool,
    pub cells_before: usize,
    pub cells_after: usize,
}

/// Whether `e(K^(3)(𝒱)) ≥ (1 − δ/2)·C(|V|,3)`.
pub fn density_condition(v: &VertexPartition, delta: f64) -> bool {
    let n = v.n() as u128;
    let all = if n < 3 { 0 } else { n * (n - 1) * (n - 2) / 6 };
    let lhs = Rational::from_integer(BigInt::from(v.cross_triples()));
    let rhs = (Rational::one() - Rational::from_float(delta / 2.0).expect("finite"))
        * Rational::from_integer(BigInt::from(all));
    lhs >= rhs
}

/// Applies the Venn refinement to the given irregular triads and measures
/// the index before and after. Asserts the cell-count bound
/// `|ℬ'| ≤ |ℬ|·2^{r·t·ℓ²}`.
pub fn refine_with_witnesses(
    state: &IndexState,
    irregular: &[IrregularTriad],
    r: usize,
    delta: f64,
    precondition: Precondition,
) -> Result<IncrementOutcome> {
    let met = density_condition(state.b.base(), delta);
    if !met && precondition == Precondition::Enforce {
        return Err(Error::Refused(
            "vertex partition has too few crossing triples for the increment".into(),
        ));
    }
    let families: Vec<&[Graph2]> = irregular.iter().map(|t| t.family.as_slice()).collect();
    let b_prime = venn_refine(&state.b, &families)?;
    let cells_before = state.b.total_cells();
    let cells_after = b_prime.total_cells();
    let t = state.b.base().num_parts() as f64;
    let ell = state.b.ell().unwrap_or(1) as f64;
    let log_bound = (cells_before as f64).log2() + r as f64 * t * ell * ell;
    assert!(
        (cells_after as f64).log2() <= log_bound + 1e-9,
        "Venn refinement exceeded the cell-count bound"
    );
    let index_after = index_of(&b_prime, &state.h);
    Ok(IncrementOutcome {
        b_prime,
        refined_triads: irregular.len(),
        witness_graphs: families.iter().map(|f| f.len()).sum(),
        index_before: state.index.clone(),
        index_after,
        density_condition_met: met,
        cells_before,
        cells_after,
    })
}

/// Searches for irregular triads and refines by their witnesses.
pub fn increment_refine(
    state: &IndexState,
    delta3: f64,
    r: usize,
    samples: usize,
    spec: &RngSpec,
    precondition: Precondition,
) -> Result<IncrementOutcome> {
    if precondition == Precondition::Enforce && !density_condition(state.b.base(), delta3) {
        return Err(Error::Refused(
            "vertex partition has too few crossing triples for the increment".into(),
        ));
    }
    let report = strong_partition_check(&state.h, &state.b, delta3, r, samples, spec)?;
    refine_with_witnesses(state, &report.irregular, r, delta3, precondition)
}

#[derive(Clone, Debug, Serialize)]
pub struct GateOutcome {
    #[serde(skip)]
    pub b: PairPartition,
    pub failing_cells: usize,
    /// Pairs whose cell changed, divided by `|V|²`.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub slack: Rational,
}

/// Audits every cell at its own density; within a part pair the failing cells
/// (plus the largest passing cell when only one fails) have their edges
/// randomly re-dealt with cell sizes preserved.
pub fn regularity_gate(
    b: &PairPartition,
    delta: f64,
    samples: usize,
    spec: &RngSpec,
) -> Result<GateOutcome> {
    let v = b.base();
    let t = v.num_parts();
    let n = b.n();
    let mut pairs = Vec::new();
    for i in 0..t {
        for j in i + 1..t {
            pairs.push((i, j));
        }
    }
    let relabels: Vec<Result<(usize, Vec<((Vertex, Vertex), u32)>)>> = pairs
        .par_iter()
        .enumerate()
        .map(|(pi, &(i, j))| {
            let sub = spec.substream(pi as u64);
            let c = b.cells_per_pair(i, j);
            let sizes = b.cell_sizes(i, j);
            let total = (v.part(i).len() * v.part(j).len()) as u128;
            let mut failing = Vec::new();
            for alpha in 0..c as u32 {
                let g = b.cell(i, j, alpha);
                let d = from_u128(sizes[alpha as usize] as u128, total.max(1));
                let mode = AuditMode::Sampled {
                    samples,
                    spec: sub.substream(alpha as u64),
                };
                if !pair_regularity_audit(&g, &d, delta, mode)?.regular {
                    failing.push(alpha);
                }
            }
            let nfail = failing.len();
            if failing.len() == 1 && c > 1 {
                let mut best: Option<(usize, u32)> = None;
                for alpha in 0..c as u32 {
                    if alpha == failing[0] {
                        continue;
                    }
                    let s = sizes[alpha as usize];
                    if best.map_or(true, |(bs, _)| s > bs) {
                        best = Some((s, alpha));
                    }
                }
                failing.push(best.expect("another cell").1);
            }
            if failing.len() < 2 {
                return Ok((nfail, vec![]));
            }
            failing.sort_unstable();
            let mut edges = Vec::new();
            for &alpha in &failing {
                edges.extend(b.cell_edges(i, j, alpha));
            }
            edges.sort_unstable();
            let mut shuffled = edges.clone();
            shuffled.shuffle(&mut sub.substream(u64::MAX).rng());
            let mut out = Vec::new();
            let mut pos = 0;
            for &alpha in &failing {
                for &e in &shuffled[pos..pos + sizes[alpha as usize]] {
                    out.push((e, alpha));
                }
                pos += sizes[alpha as usize];
            }
            Ok((nfail, out))
        })
        .collect();
    let mut new_label: HashMap<(Vertex, Vertex), u32> = HashMap::new();
    let mut failing_cells = 0;
    for r in relabels {
        let (f, list) = r?;
        failing_cells += f;
        new_label.extend(list);
    }
    let mut changed = 0u64;
    for (&(u, w), &l) in &new_label {
        if b.label(u, w) != Some(l) {
            changed += 1;
        }
    }
    let out = PairPartition::from_fn(
        v.clone(),
        |u, w| {
            let key = (u.min(w), u.max(w));
            new_label
                .get(&key)
                .copied()
                .unwrap_or_else(|| b.label(u, w).expect("cross"))
        },
        |i, j| b.cells_per_pair(i, j) as u32,
    )?;
    Ok(GateOutcome {
        b: out,
        failing_cells,
        slack: from_u128(changed as u128, (n * n).max(1) as u128),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceOutcome {
    #[serde(skip)]
    pub partition: PairPartition,
    pub ell: usize,
    pub zeta: f64,
    /// Events `𝓔_0 ∧ 𝓔_1` over all dense cells.
    pub concentration_held: bool,
    /// Number of dense-cell slices `k = Σ k_Γ` per part pair, in pair order.
    pub dense_slices: Vec<usize>,
}

fn zeta_window(ell: usize, max_eta: f64) -> f64 {
    let l2 = (ell * ell) as f64;
    let floor_ceiling = 1.0 / (l2 * (l2 + 1.0));
    floor_ceiling.min(1.0 / l2 - max_eta)
}

fn zeta_ok(ell: usize, zeta: f64, max_eta: f64) -> bool {
    let l2 = (ell * ell) as f64;
    zeta > 0.0
        && (1.0 / (1.0 / l2 - zeta)).floor() == l2
        && (1.0 / (1.0 / l2 + zeta)).ceil() == l2
        && zeta + max_eta < 1.0 / l2
}

/// Random slicing into an `ℓ²`-equitable partition. Cells of density at least
/// `ℓ⁻²` are split into `k_Γ = ⌊d ℓ²⌋` slices plus trash; trash and sparse
/// cells are then pooled and sliced uniformly into the remaining classes.
pub fn slice_partition(
    b: &PairPartition,
    ell: usize,
    zeta: Option<f64>,
    spec: &RngSpec,
) -> Result<SliceOutcome> {
    if ell == 0 {
        return invalid("ℓ must be at least 1");
    }
    let v = b.base();
    let t = v.num_parts();
    let l2 = (ell * ell) as u64;
    // η_Γ = d − k/ℓ² over dense cells, for the ζ window
    let mut max_eta = 0.0f64;
    for i in 0..t {
        for j in i + 1..t {
            let total = (v.part(i).len() * v.part(j).len()) as u64;
            for s in b.cell_sizes(i, j) {
                let s = s as u64;
                if s * l2 >= total && total > 0 {
                    let k = s * l2 / total;
                    max_eta = max_eta.max((s * l2 - k * total) as f64 / (l2 * total) as f64);
                }
            }
        }
    }
    let zeta = match zeta {
        Some(z) => {
            if !zeta_ok(ell, z, max_eta) {
                return invalid(format!(
                    "ζ = {} violates the slicing window for ℓ = {}",
                    z, ell
                ));
            }
            z
        }
        None => zeta_window(ell, max_eta) / 2.0,
    };
    let mut pairs = Vec::new();
    for i in 0..t {
        for j in i + 1..t {
            pairs.push((i, j));
        }
    }
    type PairSlices = (Vec<((Vertex, Vertex), u32)>, bool, usize);
    let sliced: Vec<PairSlices> = pairs
        .par_iter()
        .enumerate()
        .map(|(pi, &(i, j))| {
            let mut rng = spec.substream(pi as u64).rng();
            let total = (v.part(i).len() * v.part(j).len()) as u64;
            let mut out = Vec::new();
            let mut pool = Vec::new();
            let mut next = 0u32;
            let mut held = true;
            for (alpha, s) in b.cell_sizes(i, j).into_iter().enumerate() {
                let s = s as u64;
                let edges = b.cell_edges(i, j, alpha as u32);
                if s == 0 || s * l2 < total {
                    pool.extend(edges);
                    continue;
                }
                let k = s * l2 / total;
                let mut counts = vec![0u64; k as usize + 1];
                for e in edges {
                    // colour c ≥ 1 with probability N/(s ℓ²), colour 0 otherwise
                    let u = rng.gen_range(0..s * l2);
                    if u < k * total {
                        let c = (u / total) as u32;
                        out.push((e, next + c));
                        counts[c as usize + 1] += 1;
                    } else {
                        pool.push(e);
                        counts[0] += 1;
                    }
                }
                let eta = (s * l2 - k * total) as f64 / (l2 * total) as f64;
                let tf = total as f64;
                held &= counts[0] as f64 / tf <= eta + zeta;
                held &= counts[1..]
                    .iter()
                    .all(|&c| (c as f64 / tf - 1.0 / l2 as f64).abs() <= zeta);
                next += k as u32;
            }
            let dense = next as usize;
            let c = l2 as u32 - next;
            pool.sort_unstable();
            if c == 0 {
                assert!(pool.is_empty(), "no classes left for a nonempty pool");
            }
            for e in pool {
                out.push((e, next + rng.gen_range(0..c)));
            }
            (out, held, dense)
        })
        .collect();
    let mut labels: HashMap<(Vertex, Vertex), u32> = HashMap::new();
    let mut held = true;
    let mut dense_slices = Vec::new();
    for (list, h, d) in sliced {
        labels.extend(list);
        held &= h;
        dense_slices.push(d);
    }
    let partition = PairPartition::from_fn(
        v.clone(),
        |u, w| labels[&(u.min(w), u.max(w))],
        |_, _| l2 as u32,
    )?;
    Ok(SliceOutcome {
        partition,
        ell: ell * ell,
        zeta,
        concentration_held: held,
        dense_slices,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakOutcome {
    #[serde(skip)]
    pub partition: VertexPartition,
    pub passed: bool,
    pub rounds: usize,
    pub parts: usize,
    pub report: PartitionWeakReport,
}

/// Splits every part of `u` into `z` near-equal chunks after sorting its
/// vertices by witness signature.
fn split_parts(u: &VertexPartition, z: usize, sig: &[Vec<u32>]) -> Result<VertexPartition> {
    let mut parts = Vec::new();
    for part in u.parts() {
        let mut vs = part.to_vec();
        vs.sort_by(|a, b| sig[*a].cmp(&sig[*b]).then(a.cmp(b)));
        let s = vs.len();
        let (q, rem) = (s / z, s % z);
        let mut pos = 0;
        for c in 0..z {
            let len = q + usize::from(c >= z - rem);
            parts.push(vs[pos..pos + len].to_vec());
            pos += len;
        }
    }
    parts.sort_by_key(|p| (p.len(), p[0]));
    VertexPartition::new(u.n(), parts)
}

/// Energy-increment style weak regularisation refining `initial`. Each round
/// splits every part of `initial` into `z` chunks ordered by the witnesses of
/// all irregular triples seen so far, doubling `z` until the audit passes, the
/// round cap is hit or parts would drop below `min_part` vertices.
pub fn weak_regularize(
    h: &Hypergraph3,
    initial: &VertexPartition,
    delta: f64,
    t_min: usize,
    max_rounds: usize,
    min_part: usize,
    samples: usize,
    spec: &RngSpec,
) -> Result<WeakOutcome> {
    if !initial.is_equitable() {
        return invalid("the initial partition must be equitable");
    }
    if h.n() != initial.n() {
        return invalid("hypergraph and partition have different vertex counts");
    }
    let hparts = initial.num_parts();
    let smallest = initial.sizes().into_iter().min().unwrap_or(0);
    let mut z = t_min.div_ceil(hparts).max(1);
    if smallest / z < min_part.max(1) {
        return Err(Error::InstanceTooLarge {
            what: "parts requested for the smallest cluster".into(),
            limit: smallest / min_part.max(1),
        });
    }
    let mut sig: Vec<Vec<u32>> = vec![Vec::new(); h.n()];
    let mut next_bit = 0u32;
    let mut rounds = 0;
    loop {
        let v = split_parts(initial, z, &sig)?;
        let verdicts =
            partition_weak_verdicts(h, &v, delta, samples, &spec.substream(rounds as u64))?;
        let report = summarize_weak(&verdicts, delta);
        rounds += 1;
        let can_grow = smallest / (2 * z) >= min_part.max(1);
        if report.pass || rounds >= max_rounds || !can_grow {
            return Ok(WeakOutcome {
                parts: v.num_parts(),
                partition: v,
                passed: report.pass,
                rounds,
                report,
            });
        }
        for (_, verdict) in verdicts.iter().filter(|(_, v)| !v.regular) {
            if let Some(Witness::Triple { x, y, z: zz }) = &verdict.witness {
                for set in [x, y, zz] {
                    for &w in set {
                        sig[w].push(next_bit);
                    }
                    next_bit += 1;
                }
            }
        }
        z *= 2;
    }
}

/// Restricts an equitable `ℬ` over `𝒱` to a refinement `𝒱'`: pairs across old
/// parts keep their cell, pairs inside an old part are sliced uniformly into
/// the same number of classes.
pub fn restrict_to_refinement(
    b: &PairPartition,
    v_new: &VertexPartition,
    spec: &RngSpec,
) -> Result<PairPartition> {
    let ell = b.check_equitable()?;
    if !v_new.refines(b.base()) {
        return invalid("the new vertex partition must refine the old one");
    }
    let mut rng = spec.rng();
    let n = b.n();
    let mut fresh = vec![0u32; n * n];
    for u in 0..n {
        for w in u + 1..n {
            if v_new.part_of(u) != v_new.part_of(w) && b.label(u, w).is_none() {
                fresh[u * n + w] = rng.gen_range(0..ell as u32);
            }
        }
    }
    PairPartition::from_fn(
        v_new.clone(),
        |u, w| b.label(u, w).unwrap_or(fresh[u.min(w) * n + u.max(w)]),
        |_, _| ell as u32,
    )
}

/// `δ_2(ℓ)` for the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Delta2 {
    /// `min(0.1, ℓ⁻³)`.
    Default,
    Constant {
        value: f64,
    },
}

impl Delta2 {
    pub fn at(&self, ell: usize) -> f64 {
        match self {
            Delta2::Default => 0.1f64.min((ell as f64).powi(-3)),
            Delta2::Constant { value } => *value,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineConfig {
    pub delta3: f64,
    pub delta2: Delta2,
    pub r: usize,
    pub ell0: usize,
    pub t0: usize,
    /// Defaults to `⌈8/δ3⁴⌉`.
    pub max_iter: Option<usize>,
    pub ell_max: usize,
    pub weak_rounds: usize,
    pub min_part: usize,
    pub samples: usize,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(delta3: f64, seed: u64) -> Self {
        PipelineConfig {
            delta3,
            delta2: Delta2::Default,
            r: 2,
            ell0: 2,
            t0: 3,
            max_iter: None,
            ell_max: 4,
            weak_rounds: 3,
            min_part: 4,
            samples: 8,
            seed,
        }
    }

    pub fn iteration_cap(&self) -> usize {
        self.max_iter.unwrap_or_else(|| iteration_cap(self.delta3))
    }
}

pub fn iteration_cap(delta3: f64) -> usize {
    (8.0 / delta3.powi(4)).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Regular,
    IterationCap,
    Budget,
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationRecord {
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub index_before: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub index_after_increment: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub index_after_gate: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub index_after_slicing: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub index_after: Rational,
    /// β-deficit of the sliced partition w.r.t. the gated one.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub beta: Rational,
    /// Mass re-dealt by the gate.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub slack: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub irregular_mass: Rational,
    pub irregular_triads: usize,
    pub density_condition_met: bool,
    pub ell: usize,
    pub parts: usize,
    pub weak_passed: bool,
    /// Whether `ind(after) ≥ ind(before) + δ3⁴/8`.
    pub target_met: bool,
}

impl IterationRecord {
    /// Signed gains and losses: `(increment, gate loss, slicing loss, step II gain)`.
    pub fn ledger(&self) -> (Rational, Rational, Rational, Rational) {
        (
            &self.index_after_increment - &self.index_before,
            &self.index_after_increment - &self.index_after_gate,
            &self.index_after_gate - &self.index_after_slicing,
            &self.index_after - &self.index_after_slicing,
        )
    }

    /// `final = initial + gains − losses`, exactly.
    pub fn ledger_holds(&self) -> bool {
        let (inc, gate, slice, step2) = self.ledger();
        self.index_after == &self.index_before + inc + step2 - gate - slice
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementTrace {
    pub iterations: Vec<IterationRecord>,
    pub reason: Termination,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub final_index: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub final_irregular_mass: Rational,
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub v: VertexPartition,
    pub b: PairPartition,
    pub trace: RefinementTrace,
}

/// The iterative refinement: check (R.4) by witness search, refine by the
/// Venn diagram of the witnesses, gate the cells, slice to `ℓ²` cells per
/// pair and regain weak regularity on a refined vertex partition.
pub fn ghrl_pipeline(h: &Hypergraph3, cfg: &PipelineConfig) -> Result<PipelineResult> {
    if !(cfg.delta3 > 0.0 && cfg.delta3 < 1.0) {
        return invalid("δ3 must lie in (0, 1)");
    }
    if cfg.ell0 == 0 || cfg.t0 < 3 || cfg.r == 0 {
        return invalid("need ℓ0 ≥ 1, t0 ≥ 3 and r ≥ 1");
    }
    let n = h.n();
    let root = RngSpec::from_seed(cfg.seed);
    let single = VertexPartition::new(n, vec![(0..n).collect()])?;
    let weak0 = weak_regularize(
        h,
        &single,
        cfg.delta2.at(cfg.ell0),
        cfg.t0,
        cfg.weak_rounds,
        cfg.min_part,
        cfg.samples,
        &root.substream(0),
    )?;
    let mut v = weak0.partition;
    let mut b = random_pair_partition(&v, cfg.ell0, &root.substream(1))?;
    let mut ell = cfg.ell0;
    let cap = cfg.iteration_cap();
    let target_gain = Rational::from_float(cfg.delta3.powi(4) / 8.0).expect("finite");
    let mut iterations = Vec::new();
    let mut it = 0u64;
    loop {
        let s = root.substream(2 + it);
        let state = IndexState::new(b.clone(), h.clone())?;
        let report =
            strong_partition_check(h, &b, cfg.delta3, cfg.r, cfg.samples, &s.substream(0))?;
        if report.regular {
            return Ok(finish(
                v,
                b,
                iterations,
                Termination::Regular,
                state.index,
                report.irregular_mass,
            ));
        }
        if iterations.len() >= cap {
            return Ok(finish(
                v,
                b,
                iterations,
                Termination::IterationCap,
                state.index,
                report.irregular_mass,
            ));
        }
        let inc = refine_with_witnesses(
            &state,
            &report.irregular,
            cfg.r,
            cfg.delta3,
            Precondition::Report,
        )?;
        let gate = regularity_gate(
            &inc.b_prime,
            cfg.delta2.at(ell),
            cfg.samples,
            &s.substream(1),
        )?;
        let index_gate = index_of(&gate.b, h);
        let wanted = gate.b.max_cells_per_pair();
        let next_ell = wanted.min(cfg.ell_max).max(1);
        let sliced = slice_partition(&gate.b, next_ell, None, &s.substream(2))?;
        let index_slice = compute_index(&sliced.partition, h)?;
        let beta = beta_refinement_deficit(&sliced.partition, &gate.b)?;
        let new_ell = sliced.ell;
        let weak = weak_regularize(
            h,
            &v,
            cfg.delta2.at(new_ell),
            v.num_parts(),
            cfg.weak_rounds,
            cfg.min_part,
            cfg.samples,
            &s.substream(3),
        )?;
        let b4 = restrict_to_refinement(&sliced.partition, &weak.partition, &s.substream(4))?;
        let index_after = compute_index(&b4, h)?;
        let rec = IterationRecord {
            index_before: state.index.clone(),
            index_after_increment: inc.index_after.clone(),
            index_after_gate: index_gate,
            index_after_slicing: index_slice,
            target_met: index_after >= &state.index + &target_gain,
            index_after,
            beta,
            slack: gate.slack,
            irregular_mass: report.irregular_mass,
            irregular_triads: report.irregular.len(),
            density_condition_met: inc.density_condition_met,
            ell: new_ell,
            parts: weak.parts,
            weak_passed: weak.passed,
        };
        assert!(rec.ledger_holds(), "index ledger identity failed");
        iterations.push(rec);
        v = weak.partition;
        b = b4;
        ell = new_ell;
        it += 1;
        if wanted > cfg.ell_max {
            let idx = compute_index(&b, h)?;
            let mass = strong_partition_check(
                h,
                &b,
                cfg.delta3,
                cfg.r,
                cfg.samples,
                &root.substream(2 + it),
            )?;
            let reason = if mass.regular {
                Termination::Regular
            } else {
                Termination::Budget
            };
            return Ok(finish(v, b, iterations, reason, idx, mass.irregular_mass));
        }
    }
}

fn finish(
    v: VertexPartition,
    b: PairPartition,
    iterations: Vec<IterationRecord>,
    reason: Termination,
    final_index: Rational,
    final_irregular_mass: Rational,
) -> PipelineResult {
    PipelineResult {
        v,
        b,
        trace: RefinementTrace {
            iterations,
            reason,
            final_index,
            final_irregular_mass,
        },
    }
}

/// (R.2) and (R.3) audits of a pipeline output at the given thresholds.
#[derive(Clone, Debug, Serialize)]
pub struct OutputAudit {
    pub equitable_vertices: bool,
    pub cells_audited: usize,
    pub cells_irregular: usize,
    pub weak: PartitionWeakReport,
}

impl OutputAudit {
    pub fn pass(&self) -> bool {
        self.equitable_vertices && self.cells_irregular == 0 && self.weak.pass
    }
}

/// Audits every cell against `(δ2, 1/ℓ)` and the vertex partition for
/// δ2-weak regularity, all in sampled mode.
pub fn audit_output(
    h: &Hypergraph3,
    v: &VertexPartition,
    b: &PairPartition,
    delta2: f64,
    samples: usize,
    spec: &RngSpec,
) -> Result<OutputAudit> {
    let ell = b.check_equitable()?;
    let d = from_u128(1, ell as u128);
    let t = v.num_parts();
    let mut cells = Vec::new();
    for i in 0..t {
        for j in i + 1..t {
            for a in 0..ell as u32 {
                cells.push((i, j, a));
            }
        }
    }
    let verdicts: Vec<Result<bool>> = cells
        .par_iter()
        .enumerate()
        .map(|(ci, &(i, j, a))| {
            let mode = AuditMode::Sampled {
                samples,
                spec: spec.substream(ci as u64),
            };
            Ok(pair_regularity_audit(&b.cell(i, j, a), &d, delta2, mode)?.regular)
        })
        .collect();
    let mut irregular = 0;
    for r in verdicts {
        if !r? {
            irregular += 1;
        }
    }
    let weak = crate::regularity::partition_weak_regularity(
        h,
        v,
        delta2,
        samples,
        &spec.substream(u64::MAX),
    )?;
    Ok(OutputAudit {
        equitable_vertices: v.is_equitable(),
        cells_audited: cells.len(),
        cells_irregular: irregular,
        weak,
    })
}

/// `to_f64` of the trace's final index, for summaries.
pub fn index_f64(r: &Rational) -> f64 {
    to_f64(r)
}
