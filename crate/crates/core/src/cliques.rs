//! Linear cliques `K̃_t`: generation, containment search with apex matching,
//! certificate verification, the triple-clique embedding and labelled copy
//! counting.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{
    pair, sorted3, Color, Coloring2, Hypergraph3, Triple, Vertex, VertexPartition,
};

fn binom2(t: usize) -> usize {
    t * t.saturating_sub(1) / 2
}

/// A linear `k`-clique of order `t` under the canonical labelling: branch
/// vertices `0..t`, then one block of `k-2` apex vertices per branch pair in
/// lexicographic pair order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearClique {
    pub t: usize,
    pub k: usize,
    pub n: usize,
    pub edges: Vec<Vec<Vertex>>,
    /// Empty for `t = 2`, where no vertex has degree above one.
    pub branch: Vec<Vertex>,
    pub apex_of: BTreeMap<(usize, usize), Vec<Vertex>>,
}

impl LinearClique {
    pub fn hypergraph3(&self) -> Result<Hypergraph3> {
        if self.k != 3 {
            return invalid(format!("{}-uniform clique is not a 3-graph", self.k));
        }
        Hypergraph3::from_edges(self.n, self.edges.iter().map(|e| [e[0], e[1], e[2]]))
    }

    /// The certificate mapping the clique onto itself (`k = 3`, `t >= 3`).
    pub fn identity_certificate(&self) -> Result<CopyCertificate> {
        if self.k != 3 || self.t < 3 {
            return invalid("identity certificate needs k = 3 and t >= 3");
        }
        Ok(CopyCertificate {
            branch: self.branch.clone(),
            apex: self
                .apex_of
                .iter()
                .map(|(&ij, block)| (ij, block[0]))
                .collect(),
        })
    }
}

pub fn linear_clique(t: usize, k: usize) -> Result<LinearClique> {
    if t < 2 {
        return invalid("linear cliques need t >= 2");
    }
    if k < 3 {
        return invalid("linear cliques need k >= 3");
    }
    let mut next = t;
    let mut edges = Vec::with_capacity(binom2(t));
    let mut apex_of = BTreeMap::new();
    for i in 0..t {
        for j in i + 1..t {
            let block: Vec<Vertex> = (next..next + k - 2).collect();
            next += k - 2;
            let mut e = vec![i, j];
            e.extend(&block);
            edges.push(e);
            apex_of.insert((i, j), block);
        }
    }
    let (branch, apex_of) = if t >= 3 {
        ((0..t).collect(), apex_of)
    } else {
        (Vec::new(), BTreeMap::new())
    };
    Ok(LinearClique {
        t,
        k,
        n: next,
        edges,
        branch,
        apex_of,
    })
}

/// An embedding of `K̃_t` into a host 3-graph: images of the branch vertices
/// and one apex per branch pair `(i, j)`, `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyCertificate {
    pub branch: Vec<Vertex>,
    pub apex: BTreeMap<(usize, usize), Vertex>,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    branch: Vec<Vertex>,
    apex: BTreeMap<String, Vertex>,
}

impl Serialize for CopyCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateJson {
            branch: self.branch.clone(),
            apex: self
                .apex
                .iter()
                .map(|(&(i, j), &v)| (format!("{},{}", i, j), v))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CopyCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CertificateJson::deserialize(d)?;
        let mut apex = BTreeMap::new();
        for (key, v) in raw.apex {
            let (i, j) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| serde::de::Error::custom(format!("bad apex key {:?}", key)))?;
            apex.insert((i, j), v);
        }
        Ok(CopyCertificate {
            branch: raw.branch,
            apex,
        })
    }
}

impl CopyCertificate {
    pub fn t(&self) -> usize {
        self.branch.len()
    }

    /// The `C(t,2)` edges of the embedded copy, in pair order.
    pub fn edges(&self) -> Vec<Triple> {
        self.apex
            .iter()
            .map(|(&(i, j), &w)| sorted3(self.branch[i], self.branch[j], w))
            .collect()
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self.branch.clone();
        v.extend(self.apex.values());
        v.sort_unstable();
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyFailure {
    Shape,
    OutOfRange,
    NonInjective,
    MissingEdge,
    WrongColour,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verification {
    pub valid: bool,
    pub reason: Option<VerifyFailure>,
}

impl Verification {
    fn fail(r: VerifyFailure) -> Self {
        Verification {
            valid: false,
            reason: Some(r),
        }
    }
}

/// Checks that `cert` is an injective embedding of `K̃_t` into `host`, and when
/// a colouring is given, that every copy edge carries `colour`.
pub fn verify_copy(
    host: &Hypergraph3,
    cert: &CopyCertificate,
    t: usize,
    coloring: Option<(&Coloring2, Color)>,
) -> Verification {
    if t < 3 || cert.branch.len() != t || cert.apex.len() != binom2(t) {
        return Verification::fail(VerifyFailure::Shape);
    }
    for i in 0..t {
        for j in i + 1..t {
            if !cert.apex.contains_key(&(i, j)) {
                return Verification::fail(VerifyFailure::Shape);
            }
        }
    }
    let verts: Vec<Vertex> = cert
        .branch
        .iter()
        .chain(cert.apex.values())
        .copied()
        .collect();
    if verts.iter().any(|&v| v >= host.n()) {
        return Verification::fail(VerifyFailure::OutOfRange);
    }
    let mut sorted = verts.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != verts.len() {
        return Verification::fail(VerifyFailure::NonInjective);
    }
    for e in cert.edges() {
        if !host.has_edge(&e) {
            return Verification::fail(VerifyFailure::MissingEdge);
        }
        if let Some((c, want)) = coloring {
            if c.get(&e) != Some(want) {
                return Verification::fail(VerifyFailure::WrongColour);
            }
        }
    }
    Verification {
        valid: true,
        reason: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Containment {
    Found(CopyCertificate),
    Absent,
    Inconclusive { explored: u64 },
}

impl Containment {
    pub fn is_found(&self) -> bool {
        matches!(self, Containment::Found(_))
    }
}

/// Augmenting-path matching of branch pairs onto distinct apex vertices.
/// `cands[p]` lists the admissible apexes of pair `p`.
pub(crate) fn match_apexes(cands: &[Vec<Vertex>]) -> Option<Vec<Vertex>> {
    fn augment(
        p: usize,
        cands: &[Vec<Vertex>],
        owner: &mut HashMap<Vertex, usize>,
        seen: &mut Vec<Vertex>,
    ) -> bool {
        for &w in &cands[p] {
            if seen.contains(&w) {
                continue;
            }
            seen.push(w);
            let free = match owner.get(&w) {
                None => true,
                Some(&q) => augment(q, cands, owner, seen),
            };
            if free {
                owner.insert(w, p);
                return true;
            }
        }
        false
    }
    let mut owner: HashMap<Vertex, usize> = HashMap::new();
    for p in 0..cands.len() {
        let mut seen = Vec::new();
        if !augment(p, cands, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut out = vec![0; cands.len()];
    for (w, p) in owner {
        out[p] = w;
    }
    Some(out)
}

struct Search<'a> {
    t: usize,
    order: Vec<Vertex>,
    codeg: HashMap<(Vertex, Vertex), Vec<Vertex>>,
    budget: Option<u64>,
    explored: u64,
    host: &'a Hypergraph3,
}

impl Search<'_> {
    fn apex_candidates(&self, a: Vertex, b: Vertex, chosen: &[Vertex]) -> Vec<Vertex> {
        self.codeg
            .get(&pair(a, b))
            .map(|ws| ws.iter().copied().filter(|w| !chosen.contains(w)).collect())
            .unwrap_or_default()
    }

    fn run(&mut self, chosen: &mut Vec<Vertex>, start: usize) -> Option<Option<CopyCertificate>> {
        self.explored += 1;
        if let Some(b) = self.budget {
            if self.explored > b {
                return None;
            }
        }
        if chosen.len() == self.t {
            let mut keys = Vec::new();
            let mut cands = Vec::new();
            for i in 0..self.t {
                for j in i + 1..self.t {
                    keys.push((i, j));
                    cands.push(self.apex_candidates(chosen[i], chosen[j], chosen));
                }
            }
            return Some(match_apexes(&cands).map(|m| {
                let cert = CopyCertificate {
                    branch: chosen.clone(),
                    apex: keys.into_iter().zip(m).collect(),
                };
                debug_assert!(verify_copy(self.host, &cert, self.t, None).valid);
                cert
            }));
        }
        let need = self.t - chosen.len();
        for idx in start..self.order.len() {
            if self.order.len() - idx < need {
                break;
            }
            let c = self.order[idx];
            chosen.push(c);
            let ok = (0..chosen.len()).all(|i| {
                (i + 1..chosen.len()).all(|j| {
                    !self
                        .apex_candidates(chosen[i], chosen[j], chosen)
                        .is_empty()
                })
            });
            if ok {
                match self.run(chosen, idx + 1) {
                    None => return None,
                    Some(Some(cert)) => return Some(Some(cert)),
                    Some(None) => {}
                }
            }
            chosen.pop();
        }
        Some(None)
    }
}

/// Searches `host` for a copy of `K̃_t` (`t >= 3`).
///
/// Branch sets are grown over vertices of degree at least `t-1`, ordered by
/// ascending degree; a partial set is abandoned as soon as some pair has no
/// apex outside it. Complete branch sets are resolved by bipartite matching
/// of pairs to apexes. `budget` caps the number of search nodes.
pub fn contains_linear_clique(
    host: &Hypergraph3,
    t: usize,
    budget: Option<u64>,
) -> Result<Containment> {
    if t < 3 {
        return invalid("containment search needs t >= 3 (K̃_2 has no branch vertices)");
    }
    let deg = host.degrees();
    let mut order: Vec<Vertex> = (0..host.n()).filter(|&v| deg[v] + 1 >= t).collect();
    order.sort_by_key(|&v| (deg[v], v));
    let mut s = Search {
        t,
        order,
        codeg: host.codegree_map(),
        budget,
        explored: 0,
        host,
    };
    let mut chosen = Vec::with_capacity(t);
    Ok(match s.run(&mut chosen, 0) {
        None => Containment::Inconclusive {
            explored: s.explored,
        },
        Some(Some(c)) => Containment::Found(c),
        Some(None) => Containment::Absent,
    })
}

/// Places `K̃_{3r}` inside the complete tripartite 3-graph on `parts` together
/// with copies `ks[i]` of `K̃_r` placed inside part `i`. Returns the certificate
/// and the 3-graph formed by the copy's edges.
pub fn embed_triple_cliques(
    parts: &VertexPartition,
    ks: [&CopyCertificate; 3],
) -> Result<(CopyCertificate, Hypergraph3)> {
    if parts.num_parts() != 3 {
        return Err(Error::InvalidParts("need exactly three parts".into()));
    }
    let s = parts.part(0).len();
    if parts.sizes().iter().any(|&x| x != s) {
        return Err(Error::InvalidParts("parts must have equal size".into()));
    }
    let r = ks[0].t();
    if r < 2 {
        return invalid("embedding needs r >= 2");
    }
    if ks.iter().any(|k| k.t() != r || k.apex.len() != binom2(r)) {
        return invalid("the three cliques must all be copies of K̃_r");
    }
    let used = r + binom2(r);
    if s < used || s - used < r * r {
        return Err(Error::Infeasible(format!(
            "s - (r + C(r,2)) = {} < r^2 = {}",
            s as i64 - used as i64,
            r * r
        )));
    }
    for (i, k) in ks.iter().enumerate() {
        if k.vertices()
            .iter()
            .any(|&v| v >= parts.n() || parts.part_of(v) != i)
        {
            return Err(Error::InvalidParts(format!(
                "clique {} leaves part {}",
                i, i
            )));
        }
    }
    // A_k: vertices of part k outside its clique, ascending.
    let free: Vec<Vec<Vertex>> = (0..3)
        .map(|i| {
            let taken = ks[i].vertices();
            parts
                .part(i)
                .iter()
                .copied()
                .filter(|v| taken.binary_search(v).is_err())
                .collect()
        })
        .collect();
    let mut branch = Vec::with_capacity(3 * r);
    for k in &ks {
        branch.extend(&k.branch);
    }
    let mut apex = BTreeMap::new();
    for p in 0..3 * r {
        for q in p + 1..3 * r {
            let (pi, a) = (p / r, p % r);
            let (qi, b) = (q / r, q % r);
            let w = if pi == qi {
                ks[pi].apex[&(a, b)]
            } else {
                free[3 - pi - qi][a * r + b]
            };
            apex.insert((p, q), w);
        }
    }
    let cert = CopyCertificate { branch, apex };
    let h = Hypergraph3::from_edges(parts.n(), cert.edges())?;
    Ok((cert, h))
}

/// The complete tripartite 3-graph on `n` vertices with contiguous parts of
/// sizes `⌊n/3⌋ ≤ … ≤ ⌈n/3⌉`.
pub fn tripartite_seed(n: usize) -> Result<(Hypergraph3, VertexPartition)> {
    if n < 3 {
        return invalid("tripartite seed needs n >= 3");
    }
    let parts = VertexPartition::contiguous(n, 3)?;
    let mut edges = Vec::new();
    for &a in parts.part(0) {
        for &b in parts.part(1) {
            for &c in parts.part(2) {
                edges.push(sorted3(a, b, c));
            }
        }
    }
    edges.sort_unstable();
    Ok((Hypergraph3::from_sorted_unique(n, edges), parts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CopyCount {
    Exact(u64),
    Inconclusive { lower_bound: u64 },
}

/// Number of labelled injective embeddings of `f` (on its full vertex set
/// `[v(F)]`) into `host`.
pub fn count_copies(host: &Hypergraph3, f: &Hypergraph3, budget: Option<u64>) -> Result<CopyCount> {
    if f.n() > 10 {
        return Err(Error::InstanceTooLarge {
            what: "v(F)".into(),
            limit: 10,
        });
    }
    if host.n() > 20 {
        return Err(Error::InstanceTooLarge {
            what: "v(host)".into(),
            limit: 20,
        });
    }
    // Map pattern vertices by descending degree; each step checks the pattern
    // edges completed by the newly mapped vertex.
    let deg = f.degrees();
    let mut order: Vec<Vertex> = (0..f.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(deg[v]), v));
    let mut pos = vec![0; f.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut completes: Vec<Vec<Triple>> = vec![Vec::new(); f.n()];
    for e in f.edges() {
        let last = e.iter().map(|&v| pos[v]).max().unwrap();
        completes[last].push(*e);
    }
    struct St<'a> {
        host: &'a Hypergraph3,
        order: Vec<Vertex>,
        completes: Vec<Vec<Triple>>,
        image: Vec<Vertex>,
        used: Vec<bool>,
        count: u64,
        nodes: u64,
        budget: Option<u64>,
    }
    fn go(s: &mut St, depth: usize) -> bool {
        s.nodes += 1;
        if s.budget.is_some_and(|b| s.nodes > b) {
            return false;
        }
        if depth == s.order.len() {
            s.count += 1;
            return true;
        }
        let fv = s.order[depth];
        for w in 0..s.host.n() {
            if s.used[w] {
                continue;
            }
            s.image[fv] = w;
            let ok = s.completes[depth]
                .iter()
                .all(|e| s.host.contains(s.image[e[0]], s.image[e[1]], s.image[e[2]]));
            if ok {
                s.used[w] = true;
                let cont = go(s, depth + 1);
                s.used[w] = false;
                if !cont {
                    return false;
                }
            }
        }
        true
    }
    let mut st = St {
        host,
        order,
        completes,
        image: vec![0; f.n()],
        used: vec![false; host.n()],
        count: 0,
        nodes: 0,
        budget,
    };
    Ok(if go(&mut st, 0) {
        CopyCount::Exact(st.count)
    } else {
        CopyCount::Inconclusive {
            lower_bound: st.count,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Plain backtracking over ordered branch tuples and apex assignments.
    fn naive_contains(h: &Hypergraph3, t: usize) -> bool {
        fn assign(
            h: &Hypergraph3,
            branch: &[Vertex],
            pairs: &[(usize, usize)],
            k: usize,
            used: &mut Vec<Vertex>,
        ) -> bool {
            if k == pairs.len() {
                return true;
            }
            let (i, j) = pairs[k];
            for w in 0..h.n() {
                if used.contains(&w) || !h.contains(branch[i], branch[j], w) {
                    continue;
                }
                used.push(w);
                if assign(h, branch, pairs, k + 1, used) {
                    return true;
                }
                used.pop();
            }
            false
        }
        fn pick(h: &Hypergraph3, t: usize, start: usize, chosen: &mut Vec<Vertex>) -> bool {
            if chosen.len() == t {
                let pairs: Vec<_> = (0..t)
                    .flat_map(|i| (i + 1..t).map(move |j| (i, j)))
                    .collect();
                let mut used = chosen.clone();
                return assign(h, chosen, &pairs, 0, &mut used);
            }
            for v in start..h.n() {
                chosen.push(v);
                if pick(h, t, v + 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
            false
        }
        pick(h, t, 0, &mut Vec::new())
    }

    #[test]
    fn generation_examples() {
        let k3 = linear_clique(3, 3).unwrap();
        assert_eq!(k3.n, 6);
        assert_eq!(k3.edges, vec![vec![0, 1, 3], vec![0, 2, 4], vec![1, 2, 5]]);
        let k4 = linear_clique(4, 3).unwrap();
        assert_eq!((k4.n, k4.edges.len()), (10, 6));
        let k2 = linear_clique(2, 3).unwrap();
        assert_eq!((k2.n, k2.edges.len()), (3, 1));
        assert!(k2.branch.is_empty());
        assert!(linear_clique(1, 3).is_err());
        let k5 = linear_clique(4, 5).unwrap();
        assert_eq!(k5.n, 4 + 3 * 6);
    }

    #[test]
    fn generated_cliques_are_linear() {
        for t in 3..=7 {
            let c = linear_clique(t, 3).unwrap();
            let h = c.hypergraph3().unwrap();
            assert_eq!(h.edge_count(), t * (t - 1) / 2);
            for (a, e) in h.edges().iter().enumerate() {
                for f in &h.edges()[a + 1..] {
                    assert!(e.iter().filter(|v| f.contains(v)).count() <= 1);
                }
            }
            let deg = h.degrees();
            assert_eq!(deg.iter().filter(|&&d| d > 1).count(), t);
            assert!(c.branch.iter().all(|&b| deg[b] == t - 1));
        }
    }

    #[test]
    fn identity_and_k4_contains_k3() {
        let k4 = linear_clique(4, 3).unwrap().hypergraph3().unwrap();
        match contains_linear_clique(&k4, 3, None).unwrap() {
            Containment::Found(c) => assert!(verify_copy(&k4, &c, 3, None).valid),
            other => panic!("expected a copy, got {:?}", other),
        }
        let c = linear_clique(5, 3).unwrap();
        let h = c.hypergraph3().unwrap();
        let id = c.identity_certificate().unwrap();
        assert!(verify_copy(&h, &id, 5, None).valid);
        assert!(contains_linear_clique(&h, 5, None).unwrap().is_found());
        assert_eq!(
            contains_linear_clique(&Hypergraph3::empty(10), 3, None).unwrap(),
            Containment::Absent
        );
        assert!(contains_linear_clique(&h, 2, None).is_err());
    }

    #[test]
    fn budget_gives_inconclusive() {
        let h = Hypergraph3::complete(9);
        let r = contains_linear_clique(&h, 4, Some(2)).unwrap();
        assert!(matches!(r, Containment::Inconclusive { .. }));
    }

    #[test]
    fn verify_rejects_bad_certificates() {
        let c = linear_clique(3, 3).unwrap();
        let h = c.hypergraph3().unwrap();
        let mut cert = c.identity_certificate().unwrap();
        cert.apex.insert((1, 2), 4);
        let v = verify_copy(&h, &cert, 3, None);
        assert_eq!(v.reason, Some(VerifyFailure::NonInjective));
        let red = Coloring2::monochromatic(&h, Color::Red);
        let id = c.identity_certificate().unwrap();
        assert!(verify_copy(&h, &id, 3, Some((&red, Color::Red))).valid);
        assert_eq!(
            verify_copy(&h, &id, 3, Some((&red, Color::Blue))).reason,
            Some(VerifyFailure::WrongColour)
        );
    }

    #[test]
    fn certificate_json_round_trip() {
        let id = linear_clique(4, 3).unwrap().identity_certificate().unwrap();
        let v = id.to_json();
        assert_eq!(v["apex"]["0,1"], 4);
        let back: CopyCertificate = serde_json::from_value(v).unwrap();
        assert_eq!(back, id);
    }

    #[test]
    fn matching_agrees_with_naive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let n = rng.gen_range(6..=15);
            let t = rng.gen_range(3..=4);
            let p = rng.gen_range(0.05..0.5);
            let h = Hypergraph3::complete(n).filter(|_| rng.gen::<f64>() < p);
            let fast = contains_linear_clique(&h, t, None).unwrap();
            if let Containment::Found(c) = &fast {
                assert!(verify_copy(&h, c, t, None).valid);
            }
            assert_eq!(fast.is_found(), naive_contains(&h, t), "trial {}", trial);
        }
    }

    fn random_placement(
        parts: &VertexPartition,
        r: usize,
        rng: &mut ChaCha8Rng,
    ) -> [CopyCertificate; 3] {
        // K̃_2 has no branch vertices of its own; its edge {0,1,2} is placed
        // with 0 and 1 in the branch role.
        let base = if r == 2 {
            CopyCertificate {
                branch: vec![0, 1],
                apex: [((0, 1), 2)].into_iter().collect(),
            }
        } else {
            linear_clique(r, 3).unwrap().identity_certificate().unwrap()
        };
        let mk = |i: usize, rng: &mut ChaCha8Rng| {
            let mut pool = parts.part(i).to_vec();
            pool.shuffle(rng);
            CopyCertificate {
                branch: base.branch.iter().map(|&b| pool[b]).collect(),
                apex: base.apex.iter().map(|(&ij, &w)| (ij, pool[w])).collect(),
            }
        };
        [mk(0, rng), mk(1, rng), mk(2, rng)]
    }

    #[test]
    fn embedding_verifies_for_r2_and_r3() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (r, s) in [(2, 16), (2, 7), (3, 15)] {
            let parts = VertexPartition::contiguous(3 * s, 3).unwrap();
            let (seed, _) = tripartite_seed(3 * s).unwrap();
            for _ in 0..10 {
                let ks = random_placement(&parts, r, &mut rng);
                let (cert, copy) = embed_triple_cliques(&parts, [&ks[0], &ks[1], &ks[2]]).unwrap();
                let mut host = seed.clone();
                for k in &ks {
                    host = host
                        .union(&Hypergraph3::from_edges(3 * s, k.edges()).unwrap())
                        .unwrap();
                }
                assert!(verify_copy(&host, &cert, 3 * r, None).valid);
                assert_eq!(copy.edge_count(), binom2(3 * r));
                assert_eq!(cert.vertices().len(), 3 * r + binom2(3 * r));
            }
        }
    }

    #[test]
    fn embedding_rejects_infeasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let parts = VertexPartition::contiguous(18, 3).unwrap();
        let ks = random_placement(&parts, 2, &mut rng);
        assert!(matches!(
            embed_triple_cliques(&parts, [&ks[0], &ks[1], &ks[2]]),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn seed_examples() {
        assert_eq!(tripartite_seed(6).unwrap().0.edge_count(), 8);
        let (h, p) = tripartite_seed(7).unwrap();
        assert_eq!(h.edge_count(), 12);
        assert_eq!(p.sizes(), vec![2, 2, 3]);
        assert_eq!(tripartite_seed(3).unwrap().0.edge_count(), 1);
        assert!(tripartite_seed(2).is_err());
    }

    #[test]
    fn bare_seed_has_no_k4() {
        for n in 6..=15 {
            let (h, _) = tripartite_seed(n).unwrap();
            assert_eq!(
                contains_linear_clique(&h, 4, None).unwrap(),
                Containment::Absent
            );
        }
    }

    #[test]
    fn copy_count_examples() {
        let edge = Hypergraph3::from_edges(3, [[0, 1, 2]]).unwrap();
        let h = Hypergraph3::complete(6).filter(|e| e[0] == 0);
        assert_eq!(
            count_copies(&h, &edge, None).unwrap(),
            CopyCount::Exact(6 * 10)
        );
        let k3 = linear_clique(3, 3).unwrap().hypergraph3().unwrap();
        assert_eq!(
            count_copies(&k3, &edge, None).unwrap(),
            CopyCount::Exact(18)
        );
        assert_eq!(
            count_copies(&Hypergraph3::empty(8), &edge, None).unwrap(),
            CopyCount::Exact(0)
        );
        // K̃_3 has 3! automorphisms permuting branch vertices with their apexes.
        assert_eq!(count_copies(&k3, &k3, None).unwrap(), CopyCount::Exact(6));
    }
}
