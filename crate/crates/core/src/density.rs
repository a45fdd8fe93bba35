//! Exact density calculus: `d_k`, `m_k`, `m(H)`, the asymmetric density
//! `m_k(H1, H2)`, closed forms for linear cliques and threshold evaluation.
//!
//! All three maximised objectives have the form "increasing in e(F),
//! decreasing in v(F)". This gives an exact search that only enumerates the
//! vertices of degree at least two (the core): a degree-one vertex belongs to
//! a single edge, so once the core part `S` of a subgraph is fixed, the best
//! `m`-edge subgraph on `S` takes the `m` available edges with the fewest
//! private vertices. Counting all of `S` (even unused core vertices) can only
//! lower a candidate's value, and the true optimum is reached at its own `S`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::cliques::{linear_clique, LinearClique};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Graph2, Hypergraph3};
use crate::rational::{rat, Rational};

/// Largest core (vertices of degree >= 2) accepted by the subset search.
pub const CORE_LIMIT: usize = 25;
/// Largest edge count accepted by the edge-subset mode.
pub const EXACT_EDGE_LIMIT: usize = 20;

/// Anything that can be viewed as a list of uniform edges.
pub trait EdgeFamily {
    fn edge_sets(&self) -> Vec<Vec<usize>>;
}

impl EdgeFamily for Hypergraph3 {
    fn edge_sets(&self) -> Vec<Vec<usize>> {
        self.edges().iter().map(|e| e.to_vec()).collect()
    }
}

impl EdgeFamily for Graph2 {
    fn edge_sets(&self) -> Vec<Vec<usize>> {
        self.edges().into_iter().map(|(a, b)| vec![a, b]).collect()
    }
}

impl EdgeFamily for LinearClique {
    fn edge_sets(&self) -> Vec<Vec<usize>> {
        self.edges.clone()
    }
}

impl EdgeFamily for [Vec<usize>] {
    fn edge_sets(&self) -> Vec<Vec<usize>> {
        self.to_vec()
    }
}

impl EdgeFamily for Vec<Vec<usize>> {
    fn edge_sets(&self) -> Vec<Vec<usize>> {
        self.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub value: Rational,
    /// Edges of a maximising subgraph, in input order.
    pub witness: Vec<Vec<usize>>,
    /// Non-isolated vertices of the witness, ascending.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Core-vertex enumeration (default).
    Core,
    /// Every edge subset; the independent oracle.
    EdgeSubsets,
}

fn vertex_count(edges: &[&Vec<usize>]) -> usize {
    let mut v: Vec<usize> = edges.iter().flat_map(|e| e.iter().copied()).collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn check_uniform(edges: &[Vec<usize>], k: usize) -> Result<()> {
    if k < 2 {
        return invalid("k must be at least 2");
    }
    for e in edges {
        let mut s = e.clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != k || e.len() != k {
            return invalid(format!("edge {:?} is not a {}-set", e, k));
        }
    }
    Ok(())
}

/// `d_k(F)` with `v(F)` the number of non-isolated vertices.
pub fn local_k_density<F: EdgeFamily + ?Sized>(f: &F, k: usize) -> Result<Rational> {
    let edges = f.edge_sets();
    check_uniform(&edges, k)?;
    let refs: Vec<&Vec<usize>> = edges.iter().collect();
    local_k_density_counts(edges.len(), vertex_count(&refs), k)
}

/// `d_k` from raw counts: 0 if `e = 0`, `1/k` if `e = 1, v = k`, else `(e-1)/(v-k)`.
pub fn local_k_density_counts(e: usize, v: usize, k: usize) -> Result<Rational> {
    if e == 0 {
        return Ok(rat(0, 1));
    }
    if e == 1 && v == k {
        return Ok(rat(1, k as i64));
    }
    if v <= k {
        return invalid(format!(
            "{} edges on {} vertices cannot form a simple {}-graph",
            e, v, k
        ));
    }
    Ok(rat(e as i64 - 1, (v - k) as i64))
}

/// An objective `value(e, v) = num/den` with both parts integers.
#[derive(Clone, Copy)]
enum Objective {
    Dk {
        k: i128,
    },
    Plain,
    /// `e / (v - k + q/p)` where `m_k(H2) = p/q`.
    Asym {
        k: i128,
        p: i128,
        q: i128,
    },
}

impl Objective {
    /// `None` when the subgraph is not admissible for this objective.
    fn eval(self, e: usize, v: usize) -> Option<(i128, i128)> {
        let (e, v) = (e as i128, v as i128);
        match self {
            Objective::Dk { k } => Some(if e == 0 {
                (0, 1)
            } else if e == 1 && v == k {
                (1, k)
            } else {
                (e - 1, v - k)
            }),
            Objective::Plain => Some(if v == 0 { (0, 1) } else { (e, v) }),
            Objective::Asym { k, p, q } => (e >= 1).then_some((e * p, (v - k) * p + q)),
        }
    }
}

fn frac_cmp(a: (i128, i128), b: (i128, i128)) -> std::cmp::Ordering {
    (a.0 * b.1).cmp(&(b.0 * a.1))
}

struct Best {
    value: Option<(i128, i128)>,
    witness: Vec<usize>,
}

impl Best {
    fn offer(&mut self, val: (i128, i128), witness: impl FnOnce() -> Vec<usize>) {
        match self.value {
            None => {
                self.value = Some(val);
                self.witness = witness();
            }
            Some(cur) => match frac_cmp(val, cur) {
                std::cmp::Ordering::Greater => {
                    self.value = Some(val);
                    self.witness = witness();
                }
                std::cmp::Ordering::Equal => {
                    let w = witness();
                    if w < self.witness {
                        self.witness = w;
                    }
                }
                std::cmp::Ordering::Less => {}
            },
        }
    }
}

fn maximize(
    edges: &[Vec<usize>],
    obj: Objective,
    mode: SearchMode,
) -> Result<Option<(Rational, Vec<usize>)>> {
    let mut best = Best {
        value: None,
        witness: Vec::new(),
    };
    if let Some(v) = obj.eval(0, 0) {
        best.offer(v, Vec::new);
    }
    match mode {
        SearchMode::EdgeSubsets => {
            if edges.len() > EXACT_EDGE_LIMIT {
                return Err(Error::InstanceTooLarge {
                    what: "edge count".into(),
                    limit: EXACT_EDGE_LIMIT,
                });
            }
            for mask in 1u32..(1u32 << edges.len()) {
                let chosen: Vec<&Vec<usize>> = (0..edges.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| &edges[i])
                    .collect();
                if let Some(v) = obj.eval(chosen.len(), vertex_count(&chosen)) {
                    best.offer(v, || {
                        (0..edges.len()).filter(|i| mask >> i & 1 == 1).collect()
                    });
                }
            }
        }
        SearchMode::Core => {
            let nmax = edges.iter().flatten().copied().max().map_or(0, |m| m + 1);
            let mut deg = vec![0usize; nmax];
            for e in edges {
                for &v in e {
                    deg[v] += 1;
                }
            }
            let core: Vec<usize> = (0..nmax).filter(|&v| deg[v] >= 2).collect();
            if core.len() > CORE_LIMIT {
                return Err(Error::InstanceTooLarge {
                    what: "core vertices (degree >= 2)".into(),
                    limit: CORE_LIMIT,
                });
            }
            let mut bit = vec![usize::MAX; nmax];
            for (i, &v) in core.iter().enumerate() {
                bit[v] = i;
            }
            let info: Vec<(u32, usize)> = edges
                .iter()
                .map(|e| {
                    let mut m = 0u32;
                    let mut cost = 0;
                    for &v in e {
                        if bit[v] == usize::MAX {
                            cost += 1;
                        } else {
                            m |= 1 << bit[v];
                        }
                    }
                    (m, cost)
                })
                .collect();
            let mut avail: Vec<usize> = Vec::with_capacity(edges.len());
            for s in 0u32..(1u32 << core.len()) {
                avail.clear();
                avail.extend((0..edges.len()).filter(|&i| info[i].0 & !s == 0));
                avail.sort_by_key(|&i| (info[i].1, i));
                let mut v = s.count_ones() as usize;
                for m in 1..=avail.len() {
                    v += info[avail[m - 1]].1;
                    if let Some(val) = obj.eval(m, v) {
                        best.offer(val, || {
                            let mut w = avail[..m].to_vec();
                            w.sort_unstable();
                            w
                        });
                    }
                }
            }
        }
    }
    Ok(best.value.map(|(n, d)| {
        (
            Rational::new(BigInt::from(n), BigInt::from(d)),
            best.witness,
        )
    }))
}

fn report(
    edges: &[Vec<usize>],
    value: Rational,
    witness: Vec<usize>,
    obj: Objective,
) -> DensityReport {
    let w: Vec<Vec<usize>> = witness.iter().map(|&i| edges[i].clone()).collect();
    let refs: Vec<&Vec<usize>> = w.iter().collect();
    let mut verts: Vec<usize> = w.iter().flatten().copied().collect();
    verts.sort_unstable();
    verts.dedup();
    // Re-evaluate on the witness's own vertex count.
    let (n, d) = obj
        .eval(w.len(), vertex_count(&refs))
        .expect("witness is admissible");
    let recomputed = Rational::new(BigInt::from(n), BigInt::from(d));
    assert_eq!(recomputed, value, "witness does not attain the maximum");
    DensityReport {
        value,
        witness: w,
        vertices: verts,
    }
}

pub fn max_k_density_with<F: EdgeFamily + ?Sized>(
    h: &F,
    k: usize,
    mode: SearchMode,
) -> Result<DensityReport> {
    let edges = h.edge_sets();
    check_uniform(&edges, k)?;
    let obj = Objective::Dk { k: k as i128 };
    let (v, w) = maximize(&edges, obj, mode)?.expect("empty subgraph is admissible");
    Ok(report(&edges, v, w, obj))
}

/// `m_k(H) = max_{F ⊆ H} d_k(F)`.
pub fn max_k_density<F: EdgeFamily + ?Sized>(h: &F, k: usize) -> Result<DensityReport> {
    max_k_density_with(h, k, SearchMode::Core)
}

pub fn max_subhypergraph_density_with<F: EdgeFamily + ?Sized>(
    h: &F,
    mode: SearchMode,
) -> Result<DensityReport> {
    let edges = h.edge_sets();
    let obj = Objective::Plain;
    let (v, w) = maximize(&edges, obj, mode)?.expect("empty subgraph is admissible");
    Ok(report(&edges, v, w, obj))
}

/// `m(H) = max_{F ⊆ H} e(F)/v(F)`.
pub fn max_subhypergraph_density<F: EdgeFamily + ?Sized>(h: &F) -> Result<DensityReport> {
    max_subhypergraph_density_with(h, SearchMode::Core)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderPolicy {
    Error,
    Swap,
}

fn asym_objective(k: usize, m2: &Rational) -> Result<Objective> {
    let p = m2.numer().to_i128();
    let q = m2.denom().to_i128();
    match (p, q) {
        (Some(p), Some(q)) if p > 0 => Ok(Objective::Asym { k: k as i128, p, q }),
        _ => invalid("second density must be a positive small rational"),
    }
}

pub fn asym_max_k_density_with<F: EdgeFamily + ?Sized, G: EdgeFamily + ?Sized>(
    h1: &F,
    h2: &G,
    k: usize,
    policy: OrderPolicy,
    mode: SearchMode,
) -> Result<DensityReport> {
    let (e1, e2) = (h1.edge_sets(), h2.edge_sets());
    check_uniform(&e1, k)?;
    check_uniform(&e2, k)?;
    if e1.is_empty() || e2.is_empty() {
        return invalid("asymmetric density needs two non-edgeless inputs");
    }
    let m1 = max_k_density_with(&e1, k, mode)?.value;
    let m2 = max_k_density_with(&e2, k, mode)?.value;
    let (first, second_density) = if m1 >= m2 {
        (e1, m2)
    } else {
        match policy {
            OrderPolicy::Error => {
                return invalid("m_k(H1) < m_k(H2); pass the inputs in the other order")
            }
            OrderPolicy::Swap => (e2, m1),
        }
    };
    let obj = asym_objective(k, &second_density)?;
    let (v, w) = maximize(&first, obj, mode)?.expect("first input has an edge");
    Ok(report(&first, v, w, obj))
}

/// `m_k(H1, H2) = max { e(F) / (v(F) - k + 1/m_k(H2)) : F ⊆ H1, e(F) ≥ 1 }`.
pub fn asym_max_k_density<F: EdgeFamily + ?Sized, G: EdgeFamily + ?Sized>(
    h1: &F,
    h2: &G,
    k: usize,
) -> Result<DensityReport> {
    asym_max_k_density_with(h1, h2, k, OrderPolicy::Error, SearchMode::Core)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueForms {
    pub t: usize,
    pub k: usize,
    /// `(C(t,2) - 1) / (t + (k-2) C(t,2) - k)`.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub m_k: Rational,
    /// `C(t,2) / (t + C(t,2))`.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub m_t: Rational,
    /// `(t^2 - t - 2) / (t^2 + t - 6)`, present for `k = 3`.
    #[serde(serialize_with = "crate::io::ser_opt_rational")]
    pub m3_quadratic: Option<Rational>,
}

pub fn clique_density_closed_forms(t: usize, k: usize) -> Result<CliqueForms> {
    if t < 2 || k < 2 {
        return invalid("closed forms need t >= 2 and k >= 2");
    }
    let (ti, ki) = (t as i64, k as i64);
    let c = ti * (ti - 1) / 2;
    let den = ti + (ki - 2) * c - ki;
    if den == 0 {
        return Err(Error::UndefinedDensity(format!(
            "zero denominator at t={}, k={}",
            t, k
        )));
    }
    let m_k = rat(c - 1, den);
    let m_t = rat(c, ti + c);
    let m3_quadratic = if k == 3 {
        let q = rat(ti * ti - ti - 2, ti * ti + ti - 6);
        assert_eq!(q, m_k, "quadratic and general forms disagree");
        Some(q)
    } else {
        None
    };
    Ok(CliqueForms {
        t,
        k,
        m_k,
        m_t,
        m3_quadratic,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceReport {
    pub strictly_balanced: bool,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub value: Rational,
    /// A proper subgraph reaching at least `value`, when not strictly balanced.
    pub witness: Option<DensityReport>,
}

/// Whether every proper subgraph has density strictly below that of `H`,
/// for `d_k` or, with `relative_to = Some(H2)`, for the asymmetric objective.
pub fn is_strictly_balanced<F: EdgeFamily + ?Sized>(
    h: &F,
    k: usize,
    relative_to: Option<&dyn EdgeFamily>,
) -> Result<BalanceReport> {
    let edges = h.edge_sets();
    check_uniform(&edges, k)?;
    let obj = match relative_to {
        None => Objective::Dk { k: k as i128 },
        Some(h2) => {
            let m2 = max_k_density(&h2.edge_sets(), k)?.value;
            asym_objective(k, &m2)?
        }
    };
    let refs: Vec<&Vec<usize>> = edges.iter().collect();
    let (n, d) = match obj.eval(edges.len(), vertex_count(&refs)) {
        Some(x) => x,
        None => return invalid("edgeless input has no asymmetric density"),
    };
    let value = Rational::new(BigInt::from(n), BigInt::from(d));
    // Every proper subgraph lies inside some H - e.
    for skip in 0..edges.len() {
        let rest: Vec<Vec<usize>> = edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, e)| e.clone())
            .collect();
        if let Some((v, w)) = maximize(&rest, obj, SearchMode::Core)? {
            if v >= value {
                return Ok(BalanceReport {
                    strictly_balanced: false,
                    value,
                    witness: Some(report(&rest, v, w, obj)),
                });
            }
        }
    }
    Ok(BalanceReport {
        strictly_balanced: true,
        value,
        witness: None,
    })
}

/// `C · n^(-1/density)`, clamped to `[0, 1]`; the flag reports clamping.
pub fn threshold_probability(density: &Rational, c: f64, n: u64) -> Result<(f64, bool)> {
    if !density.is_positive() {
        return invalid("exponent density must be positive");
    }
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if !(c.is_finite() && c >= 0.0) {
        return invalid("C must be a nonnegative real");
    }
    let inv = crate::rational::to_f64(&(Rational::from_integer(BigInt::from(1)) / density));
    let p = c * (n as f64).powf(-inv);
    Ok(if p > 1.0 { (1.0, true) } else { (p, false) })
}

/// The comparison `M_{t,t/2}` vs `M_{t-1}` for even `t`, both by exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RemarkComparison {
    pub t: usize,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub m_asym: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub m_prev: Rational,
    pub holds: bool,
}

pub fn remark_comparison(t: usize) -> Result<RemarkComparison> {
    if t < 4 || t % 2 != 0 {
        return invalid("comparison is defined for even t >= 4");
    }
    let big = linear_clique(t, 3)?;
    let half = linear_clique(t / 2, 3)?;
    let prev = linear_clique(t - 1, 3)?;
    let m_asym = asym_max_k_density(&big, &half, 3)?.value;
    let m_prev = max_k_density(&prev, 3)?.value;
    let holds = m_asym >= m_prev;
    Ok(RemarkComparison {
        t,
        m_asym,
        m_prev,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn clique(t: usize) -> LinearClique {
        linear_clique(t, 3).unwrap()
    }

    #[test]
    fn local_examples() {
        let one = vec![vec![0, 1, 2]];
        assert_eq!(local_k_density(&one, 3).unwrap(), rat(1, 3));
        assert_eq!(local_k_density(&clique(4), 3).unwrap(), rat(5, 7));
        assert_eq!(
            local_k_density(&Vec::<Vec<usize>>::new(), 3).unwrap(),
            int(0)
        );
        assert!(local_k_density(&vec![vec![0, 1]], 3).is_err());
    }

    #[test]
    fn max_examples() {
        assert_eq!(max_k_density(&clique(3), 3).unwrap().value, rat(2, 3));
        assert_eq!(max_k_density(&clique(4), 3).unwrap().value, rat(5, 7));
        assert_eq!(
            max_k_density(&vec![vec![0, 1, 2]], 3).unwrap().value,
            rat(1, 3)
        );
        assert_eq!(
            max_subhypergraph_density(&clique(3)).unwrap().value,
            rat(1, 2)
        );
        assert_eq!(
            max_subhypergraph_density(&clique(4)).unwrap().value,
            rat(3, 5)
        );
        assert_eq!(
            max_subhypergraph_density(&Vec::<Vec<usize>>::new())
                .unwrap()
                .value,
            int(0)
        );
    }

    #[test]
    fn asym_examples() {
        let r = asym_max_k_density(&clique(4), &clique(2), 3).unwrap();
        assert_eq!(r.value, rat(3, 5));
        let r = asym_max_k_density(&clique(6), &clique(3), 3).unwrap();
        assert_eq!(r.value, rat(10, 13));
        for t in 2..=5 {
            let c = clique(t);
            assert_eq!(
                asym_max_k_density(&c, &c, 3).unwrap().value,
                max_k_density(&c, 3).unwrap().value
            );
        }
        assert!(asym_max_k_density(&clique(2), &clique(4), 3).is_err());
        let swapped = asym_max_k_density_with(
            &clique(2),
            &clique(4),
            3,
            OrderPolicy::Swap,
            SearchMode::Core,
        );
        assert_eq!(swapped.unwrap().value, rat(3, 5));
    }

    #[test]
    fn closed_forms_match_search() {
        for t in 3..=6 {
            let f = clique_density_closed_forms(t, 3).unwrap();
            assert_eq!(max_k_density(&clique(t), 3).unwrap().value, f.m_k);
            assert_eq!(max_subhypergraph_density(&clique(t)).unwrap().value, f.m_t);
        }
        assert_eq!(clique_density_closed_forms(4, 3).unwrap().m_k, rat(10, 14));
        assert_eq!(clique_density_closed_forms(6, 3).unwrap().m_k, rat(7, 9));
        assert_eq!(clique_density_closed_forms(3, 3).unwrap().m_t, rat(1, 2));
        assert!(clique_density_closed_forms(2, 2).is_err());
        assert!(clique_density_closed_forms(2, 3).is_err());
        // general k: K̃_t^(4) search agrees with the general closed form
        let c = linear_clique(4, 4).unwrap();
        assert_eq!(
            max_k_density(&c, 4).unwrap().value,
            clique_density_closed_forms(4, 4).unwrap().m_k
        );
    }

    #[test]
    fn core_search_matches_edge_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let n = rng.gen_range(4..=9);
            let p = rng.gen_range(0.05..0.35);
            let h = Hypergraph3::complete(n).filter(|_| rng.gen::<f64>() < p);
            if h.edge_count() > 14 {
                continue;
            }
            let a = max_k_density_with(&h, 3, SearchMode::Core).unwrap();
            let b = max_k_density_with(&h, 3, SearchMode::EdgeSubsets).unwrap();
            assert_eq!(a, b);
            let a = max_subhypergraph_density_with(&h, SearchMode::Core).unwrap();
            let b = max_subhypergraph_density_with(&h, SearchMode::EdgeSubsets).unwrap();
            assert_eq!(a, b);
            if !h.is_empty() {
                let k2 = clique(2);
                let a = asym_max_k_density_with(&h, &k2, 3, OrderPolicy::Swap, SearchMode::Core)
                    .unwrap();
                let b =
                    asym_max_k_density_with(&h, &k2, 3, OrderPolicy::Swap, SearchMode::EdgeSubsets)
                        .unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn strict_balance() {
        assert!(
            is_strictly_balanced(&clique(4), 3, None)
                .unwrap()
                .strictly_balanced
        );
        let mut two = clique(4).edges;
        two.extend(
            clique(4)
                .edges
                .iter()
                .map(|e| e.iter().map(|v| v + 10).collect::<Vec<_>>()),
        );
        let r = is_strictly_balanced(&two, 3, None).unwrap();
        assert!(!r.strictly_balanced);
        assert_eq!(r.witness.unwrap().value, rat(5, 7));
        assert!(
            is_strictly_balanced(&vec![vec![0, 1, 2]], 3, None)
                .unwrap()
                .strictly_balanced
        );
        for t in [4, 6] {
            let half = clique(t / 2);
            let r = is_strictly_balanced(&clique(t), 3, Some(&half)).unwrap();
            assert!(r.strictly_balanced, "t = {}", t);
        }
    }

    #[test]
    fn asym_sandwich() {
        for t in [4, 6] {
            let big = max_k_density(&clique(t), 3).unwrap().value;
            let small = max_k_density(&clique(t / 2), 3).unwrap().value;
            let mid = asym_max_k_density(&clique(t), &clique(t / 2), 3)
                .unwrap()
                .value;
            assert!(big > mid && mid > small);
        }
    }

    #[test]
    fn threshold_examples() {
        let (p, c) = threshold_probability(&int(1), 1.0, 100).unwrap();
        assert!((p - 0.01).abs() < 1e-15 && !c);
        let (p, _) = threshold_probability(&rat(3, 5), 1.0, 1000).unwrap();
        assert!((p / 1e-5 - 1.0).abs() < 1e-9);
        assert_eq!(
            threshold_probability(&int(1), 1e6, 10).unwrap(),
            (1.0, true)
        );
        assert!(threshold_probability(&int(0), 1.0, 10).is_err());
    }

    #[test]
    fn remark_values() {
        let r4 = remark_comparison(4).unwrap();
        assert_eq!(
            (r4.m_asym.clone(), r4.m_prev.clone()),
            (rat(3, 5), rat(2, 3))
        );
        assert!(!r4.holds);
        let r6 = remark_comparison(6).unwrap();
        assert_eq!(r6.m_asym, rat(10, 13));
        assert_eq!(r6.m_prev, rat(3, 4));
        let r8 = remark_comparison(8).unwrap();
        assert_eq!(r8.m_prev, rat(4, 5));
        assert_eq!(r8.m_asym, rat(140, 172));
    }
}
