//! Ramsey arrows for 3-graphs: exact decisions by backtracking over edge
//! colourings, subset and family-restricted audits, majority colours, link
//! colour splits, star packings and the constructive monochromatic-clique
//! finder that follows the majority-colour argument step by step.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::index::sample;
use serde::Serialize;

use crate::cliques::{
    contains_linear_clique, linear_clique, match_apexes, verify_copy, Containment, CopyCertificate,
};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{
    induce_tripartite, pair, sorted3, Color, Coloring2, Graph2, Hypergraph3, Triple, Vertex,
};
use crate::random::RngSpec;
use crate::rational::{int, Rational};
use crate::tuple::{binom, LinkTable};

/// Cap on distinct copies collected for one pattern.
pub const COPY_LIMIT: usize = 200_000;
/// Largest `n` for exact subset audits.
pub const SUBSET_EXACT_N: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// The linear clique `K̃_t`; `t = 2` is a single edge.
    Clique(usize),
    Custom(Hypergraph3),
}

impl Pattern {
    /// Parses `clique:t=T`.
    pub fn parse(s: &str) -> Result<Pattern> {
        let rest = s.trim().strip_prefix("clique:t=").ok_or_else(|| {
            Error::Invalid(format!("unknown pattern {:?}; expected clique:t=T", s))
        })?;
        let t: usize = rest
            .parse()
            .map_err(|_| Error::Invalid(format!("bad clique order in {:?}", s)))?;
        if t < 2 {
            return invalid("clique patterns need t >= 2");
        }
        Ok(Pattern::Clique(t))
    }

    pub fn graph(&self) -> Result<Hypergraph3> {
        match self {
            Pattern::Clique(t) => linear_clique(*t, 3)?.hypergraph3(),
            Pattern::Custom(h) => Ok(h.clone()),
        }
    }
}

/// One copy of a pattern in a host: the labelled embedding that found it,
/// its sorted vertex set and its edges as indices into `host.edges()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternCopy {
    pub map: Vec<Vertex>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<usize>,
}

/// All copies of `f` in `host`, one per distinct edge set, in discovery order.
pub fn pattern_copies(
    host: &Hypergraph3,
    f: &Hypergraph3,
    limit: usize,
) -> Result<Vec<PatternCopy>> {
    if f.n() > host.n() {
        return Ok(Vec::new());
    }
    let k = f.n();
    let fdeg = f.degrees();
    // Place next the vertex closing the most pattern edges, then by degree.
    let mut order: Vec<Vertex> = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    for _ in 0..k {
        let best = (0..k)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let closing = f
                    .edges()
                    .iter()
                    .filter(|e| {
                        e.contains(&v) && e.iter().filter(|&&w| w != v && placed[w]).count() == 2
                    })
                    .count();
                (closing, fdeg[v], std::cmp::Reverse(v))
            })
            .unwrap();
        placed[best] = true;
        order.push(best);
    }
    let mut pos = vec![0; k];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut closes: Vec<Vec<(Vertex, Vertex)>> = vec![Vec::new(); k];
    for e in f.edges() {
        let last = *e.iter().max_by_key(|&&v| pos[v]).unwrap();
        let others: Vec<Vertex> = e.iter().copied().filter(|&v| v != last).collect();
        closes[pos[last]].push((others[0], others[1]));
    }
    let codeg = host.codegree_map();
    let hdeg = host.degrees();
    let all: Vec<Vertex> = (0..host.n()).collect();

    struct St<'a> {
        host: &'a Hypergraph3,
        order: &'a [Vertex],
        closes: &'a [Vec<(Vertex, Vertex)>],
        codeg: &'a HashMap<(Vertex, Vertex), Vec<Vertex>>,
        hdeg: &'a [usize],
        fdeg: &'a [usize],
        all: &'a [Vertex],
        map: Vec<Option<Vertex>>,
        used: Vec<bool>,
        seen: BTreeSet<Vec<usize>>,
        out: Vec<PatternCopy>,
        limit: usize,
        f: &'a Hypergraph3,
    }
    fn rec(st: &mut St, i: usize) -> Result<()> {
        if i == st.order.len() {
            let map: Vec<Vertex> = st.map.iter().map(|m| m.unwrap()).collect();
            let mut edges: Vec<usize> =
                st.f.edges()
                    .iter()
                    .map(|e| {
                        let img = sorted3(map[e[0]], map[e[1]], map[e[2]]);
                        st.host.edges().binary_search(&img).expect("embedded edge")
                    })
                    .collect();
            edges.sort_unstable();
            if st.seen.insert(edges.clone()) {
                if st.out.len() >= st.limit {
                    return Err(Error::InstanceTooLarge {
                        what: "pattern copies".into(),
                        limit: st.limit,
                    });
                }
                let mut vertices = map.clone();
                vertices.sort_unstable();
                st.out.push(PatternCopy {
                    map,
                    vertices,
                    edges,
                });
            }
            return Ok(());
        }
        let pv = st.order[i];
        let cands: Vec<Vertex> = match st.closes[i].first() {
            Some(&(a, b)) => {
                let (ma, mb) = (st.map[a].unwrap(), st.map[b].unwrap());
                st.codeg.get(&pair(ma, mb)).cloned().unwrap_or_default()
            }
            None => st.all.to_vec(),
        };
        for c in cands {
            if st.used[c] || st.hdeg[c] < st.fdeg[pv] {
                continue;
            }
            let ok = st.closes[i]
                .iter()
                .all(|&(a, b)| st.host.contains(st.map[a].unwrap(), st.map[b].unwrap(), c));
            if !ok {
                continue;
            }
            st.map[pv] = Some(c);
            st.used[c] = true;
            rec(st, i + 1)?;
            st.used[c] = false;
            st.map[pv] = None;
        }
        Ok(())
    }
    let mut st = St {
        host,
        order: &order,
        closes: &closes,
        codeg: &codeg,
        hdeg: &hdeg,
        fdeg: &fdeg,
        all: &all,
        map: vec![None; k],
        used: vec![false; host.n()],
        seen: BTreeSet::new(),
        out: Vec::new(),
        limit,
        f,
    };
    rec(&mut st, 0)?;
    Ok(st.out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrowVerdict {
    /// `None` when the search budget ran out.
    pub arrows: Option<bool>,
    pub explored: u64,
    /// A colouring in `host.edges()` order with no red `F1` and no blue `F2`.
    pub coloring: Option<Vec<Color>>,
    pub copies_f1: usize,
    pub copies_f2: usize,
}

struct Backtrack {
    order: Vec<usize>,
    mem1: Vec<Vec<usize>>,
    mem2: Vec<Vec<usize>>,
    len1: Vec<usize>,
    len2: Vec<usize>,
    red: Vec<usize>,
    blue: Vec<usize>,
    colors: Vec<Color>,
    fix_first: bool,
    explored: u64,
    budget: Option<u64>,
}

impl Backtrack {
    fn apply(&mut self, e: usize, c: Color, delta: isize) -> bool {
        let (mem, cnt, len) = match c {
            Color::Red => (&self.mem1[e], &mut self.red, &self.len1),
            Color::Blue => (&self.mem2[e], &mut self.blue, &self.len2),
        };
        let mut conflict = false;
        for &i in mem {
            cnt[i] = (cnt[i] as isize + delta) as usize;
            if cnt[i] == len[i] {
                conflict = true;
            }
        }
        conflict
    }

    /// `Some(true)` once a good colouring is complete, `None` on budget.
    fn go(&mut self, k: usize) -> Option<bool> {
        self.explored += 1;
        if let Some(b) = self.budget {
            if self.explored > b {
                return None;
            }
        }
        if k == self.order.len() {
            return Some(true);
        }
        let e = self.order[k];
        let choices: &[Color] = if k == 0 && self.fix_first {
            &[Color::Red]
        } else {
            &[Color::Red, Color::Blue]
        };
        for &c in choices {
            let conflict = self.apply(e, c, 1);
            if !conflict {
                self.colors[e] = c;
                match self.go(k + 1) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
            }
            self.apply(e, c, -1);
        }
        Some(false)
    }
}

fn arrow_search(
    m: usize,
    copies1: &[Vec<usize>],
    copies2: &[Vec<usize>],
    budget: Option<u64>,
) -> ArrowVerdict {
    let mut mem1 = vec![Vec::new(); m];
    let mut mem2 = vec![Vec::new(); m];
    for (i, c) in copies1.iter().enumerate() {
        for &e in c {
            mem1[e].push(i);
        }
    }
    for (i, c) in copies2.iter().enumerate() {
        for &e in c {
            mem2[e].push(i);
        }
    }
    let mut order: Vec<usize> = (0..m)
        .filter(|&e| !mem1[e].is_empty() || !mem2[e].is_empty())
        .collect();
    order.sort_by_key(|&e| (std::cmp::Reverse(mem1[e].len() + mem2[e].len()), e));
    // Swapping colours maps good colourings to good colourings only when the
    // two copy lists coincide.
    let fix_first = copies1 == copies2;
    let mut bt = Backtrack {
        order,
        len1: copies1.iter().map(|c| c.len()).collect(),
        len2: copies2.iter().map(|c| c.len()).collect(),
        red: vec![0; copies1.len()],
        blue: vec![0; copies2.len()],
        mem1,
        mem2,
        colors: vec![Color::Red; m],
        fix_first,
        explored: 0,
        budget,
    };
    let res = bt.go(0);
    ArrowVerdict {
        arrows: res.map(|found| !found),
        explored: bt.explored,
        coloring: if res == Some(true) {
            Some(bt.colors)
        } else {
            None
        },
        copies_f1: copies1.len(),
        copies_f2: copies2.len(),
    }
}

fn copy_lists(
    gamma: &Hypergraph3,
    f1: &Pattern,
    f2: &Pattern,
    exclude1: Option<&BTreeSet<Vec<Vertex>>>,
    exclude2: Option<&BTreeSet<Vec<Vertex>>>,
) -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
    let g1 = f1.graph()?;
    let g2 = f2.graph()?;
    if g1.is_empty() || g2.is_empty() {
        return invalid("patterns need at least one edge");
    }
    let pick = |g: &Hypergraph3, ex: Option<&BTreeSet<Vec<Vertex>>>| -> Result<Vec<Vec<usize>>> {
        Ok(pattern_copies(gamma, g, COPY_LIMIT)?
            .into_iter()
            .filter(|c| ex.map_or(true, |s| !s.contains(&c.vertices)))
            .map(|c| c.edges)
            .collect())
    };
    Ok((pick(&g1, exclude1)?, pick(&g2, exclude2)?))
}

/// Decides `Γ → (F1, F2)`: every red/blue colouring of `E(Γ)` has a red `F1`
/// or a blue `F2`.
pub fn decide_arrow(
    gamma: &Hypergraph3,
    f1: &Pattern,
    f2: &Pattern,
    budget: Option<u64>,
) -> Result<ArrowVerdict> {
    let (c1, c2) = copy_lists(gamma, f1, f2, None, None)?;
    Ok(arrow_search(gamma.edge_count(), &c1, &c2, budget))
}

fn family_set(fam: &[Vec<Vertex>]) -> BTreeSet<Vec<Vertex>> {
    fam.iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s
        })
        .collect()
}

/// Arrowing with exclusions: copies of `F1` whose vertex set lies in `fam1`
/// (and of `F2` in `fam2`) do not count.
pub fn family_ramsey_audit(
    gamma: &Hypergraph3,
    f1: &Pattern,
    f2: &Pattern,
    fam1: &[Vec<Vertex>],
    fam2: &[Vec<Vertex>],
    budget: Option<u64>,
) -> Result<ArrowVerdict> {
    let (s1, s2) = (family_set(fam1), family_set(fam2));
    let (c1, c2) = copy_lists(gamma, f1, f2, Some(&s1), Some(&s2))?;
    Ok(arrow_search(gamma.edge_count(), &c1, &c2, budget))
}

/// Whether `colors` (in `gamma.edges()` order) avoids red `F1` and blue `F2`
/// copies outside the given families, checked against fresh copy lists.
pub fn is_good_coloring(
    gamma: &Hypergraph3,
    f1: &Pattern,
    f2: &Pattern,
    fam1: &[Vec<Vertex>],
    fam2: &[Vec<Vertex>],
    colors: &[Color],
) -> Result<bool> {
    if colors.len() != gamma.edge_count() {
        return invalid("colouring length differs from e(Γ)");
    }
    let (s1, s2) = (family_set(fam1), family_set(fam2));
    let (c1, c2) = copy_lists(gamma, f1, f2, Some(&s1), Some(&s2))?;
    let mono = |cs: &[Vec<usize>], c: Color| cs.iter().any(|cp| cp.iter().all(|&e| colors[e] == c));
    Ok(!mono(&c1, Color::Red) && !mono(&c2, Color::Blue))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetMode {
    Exact,
    Sampled { samples: usize, spec: RngSpec },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetVerdict {
    /// `None` when some sub-decision was inconclusive and none failed.
    pub pass: Option<bool>,
    pub witness: Option<Vec<Vertex>>,
    pub subset_size: usize,
    pub checked: usize,
    pub inconclusive: usize,
}

/// `(F1, F2, μ)`-Ramsey audit: `Γ[U] → (F1, F2)` for every `U` with
/// `|U| ≥ ⌈μn⌉`. Arrowing is monotone under adding vertices, so only sets of
/// size exactly `⌈μn⌉` are checked.
pub fn subset_ramsey_audit(
    gamma: &Hypergraph3,
    f1: &Pattern,
    f2: &Pattern,
    mu: f64,
    mode: SubsetMode,
    budget: Option<u64>,
) -> Result<SubsetVerdict> {
    if !(mu > 0.0 && mu <= 1.0) {
        return invalid("μ must lie in (0, 1]");
    }
    let n = gamma.n();
    let k = ((mu * n as f64).ceil() as usize).min(n);
    let mut verdict = SubsetVerdict {
        pass: None,
        witness: None,
        subset_size: k,
        checked: 0,
        inconclusive: 0,
    };
    let check = |u: Vec<Vertex>, v: &mut SubsetVerdict| -> Result<bool> {
        v.checked += 1;
        match decide_arrow(&gamma.induced(&u), f1, f2, budget)?.arrows {
            Some(true) => Ok(true),
            Some(false) => {
                v.pass = Some(false);
                v.witness = Some(u);
                Ok(false)
            }
            None => {
                v.inconclusive += 1;
                Ok(true)
            }
        }
    };
    match mode {
        SubsetMode::Exact => {
            if n > SUBSET_EXACT_N {
                return Err(Error::InstanceTooLarge {
                    what: "exact subset audit (n)".into(),
                    limit: SUBSET_EXACT_N,
                });
            }
            for mask in 0u32..(1u32 << n) {
                if mask.count_ones() as usize != k {
                    continue;
                }
                let u: Vec<Vertex> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                if !check(u, &mut verdict)? {
                    return Ok(verdict);
                }
            }
        }
        SubsetMode::Sampled { samples, spec } => {
            for i in 0..samples {
                let mut rng = spec.substream(i as u64).rng();
                let mut u: Vec<Vertex> = sample(&mut rng, n, k).into_vec();
                u.sort_unstable();
                if !check(u, &mut verdict)? {
                    return Ok(verdict);
                }
            }
        }
    }
    verdict.pass = if verdict.inconclusive > 0 {
        None
    } else {
        Some(true)
    };
    Ok(verdict)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MajorityReport {
    pub red: usize,
    pub blue: usize,
    pub red_majority: bool,
    pub blue_majority: bool,
}

/// Colour counts of `psi` over `scope` (all coloured edges by default). A
/// colour is a majority colour when its count is at least the other's.
pub fn majority_colour(psi: &Coloring2, scope: Option<&Hypergraph3>) -> Result<MajorityReport> {
    let (red, blue) = match scope {
        None => (psi.count(Color::Red), psi.count(Color::Blue)),
        Some(h) => {
            let (mut r, mut b) = (0, 0);
            for e in h.edges() {
                match psi.get(e) {
                    Some(Color::Red) => r += 1,
                    Some(Color::Blue) => b += 1,
                    None => return invalid(format!("edge {:?} is not coloured", e)),
                }
            }
            (r, b)
        }
    };
    Ok(MajorityReport {
        red,
        blue,
        red_majority: red >= blue,
        blue_majority: blue >= red,
    })
}

fn two_parts(g: &Graph2) -> Result<(Vec<Vertex>, Vec<Vertex>)> {
    match g.parts() {
        Some(p) if p.len() == 2 => Ok((p[0].clone(), p[1].clone())),
        _ => Err(Error::InvalidParts(
            "need a bipartite graph with two declared parts".into(),
        )),
    }
}

fn degree_filter(g: &Graph2, side: &[Vertex], k: usize) -> Vec<Vertex> {
    side.iter().copied().filter(|&v| g.degree(v) >= k).collect()
}

/// `{v ∈ A : deg(v) ≥ k}` for bipartite `G = (A ∪ B)`. Requires
/// `e(G) ≥ d|A||B|` and `k ≤ d|B|/2`, under which the result has at least
/// `d|A|/2` vertices.
pub fn support_filter(g: &Graph2, d: &Rational, k: usize) -> Result<Vec<Vertex>> {
    let (a, b) = two_parts(g)?;
    let (na, nb) = (int(a.len() as i64), int(b.len() as i64));
    if int(g.edge_count() as i64) < d * &na * &nb {
        return Err(Error::Refused("e(G) < d|A||B|".into()));
    }
    if int(k as i64) * int(2) > d * &nb {
        return Err(Error::Refused("k > d|B|/2".into()));
    }
    let out = degree_filter(g, &a, k);
    assert!(
        int(2 * out.len() as i64) >= d * &na,
        "support bound failed: {} < d|A|/2",
        out.len()
    );
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Star {
    pub centre: Vertex,
    pub leaves: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarReport {
    /// Copies of `K_{1,m}` with centre on the chosen side: `Σ C(deg(v), m)`.
    pub copy_count: u128,
    pub stars: Vec<Star>,
    pub centres: Vec<Vertex>,
}

/// Counts `K_{1,m}` copies centred on part `side` (0 or 1) and packs a
/// maximal family of vertex-disjoint ones greedily in vertex order.
pub fn star_supersaturation(g: &Graph2, m: usize, side: usize) -> Result<StarReport> {
    if m == 0 {
        return invalid("stars need m >= 1");
    }
    let (a, b) = two_parts(g)?;
    let centres_side = match side {
        0 => a,
        1 => b,
        _ => return invalid("side must be 0 or 1"),
    };
    let copy_count = centres_side
        .iter()
        .map(|&v| binom(g.degree(v) as u128, m as u128))
        .sum();
    let mut used = vec![false; g.n()];
    let mut stars = Vec::new();
    for &c in &centres_side {
        let free: Vec<Vertex> = g
            .neighbors(c)
            .ones()
            .filter(|&w| !used[w])
            .take(m)
            .collect();
        if free.len() == m {
            used[c] = true;
            for &w in &free {
                used[w] = true;
            }
            stars.push(Star {
                centre: c,
                leaves: free,
            });
        }
    }
    let centres = stars.iter().map(|s| s.centre).collect();
    Ok(StarReport {
        copy_count,
        stars,
        centres,
    })
}

/// Splits `L_H(v)` into the pairs completing a red and a blue edge under `psi`.
pub fn red_blue_links(psi: &Coloring2, h: &Hypergraph3, v: Vertex) -> Result<(Graph2, Graph2)> {
    if v >= h.n() {
        return invalid(format!("vertex {} >= n={}", v, h.n()));
    }
    let mut red = Vec::new();
    let mut blue = Vec::new();
    for e in h.edges() {
        if let Some(i) = e.iter().position(|&w| w == v) {
            let others: Vec<Vertex> = (0..3).filter(|&j| j != i).map(|j| e[j]).collect();
            match psi.get(e) {
                Some(Color::Red) => red.push((others[0], others[1])),
                Some(Color::Blue) => blue.push((others[0], others[1])),
                None => return invalid(format!("edge {:?} is not coloured", e)),
            }
        }
    }
    Ok((
        Graph2::from_edges(h.n(), red, None)?,
        Graph2::from_edges(h.n(), blue, None)?,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FinderParams {
    pub d3: f64,
    pub d2: f64,
    pub eps: f64,
    /// Search-node cap for each clique search.
    pub budget: Option<u64>,
}

impl FinderParams {
    /// `ε = d3^{v(t/2)}/10`.
    pub fn toy(t: usize, d3: f64, d2: f64) -> FinderParams {
        FinderParams {
            d3,
            d2,
            eps: d3.powi(half_order(t) as i32) / 10.0,
            budget: Some(2_000_000),
        }
    }
}

/// `v(t/2)`: vertices of `K̃_{t/2}`.
fn half_order(t: usize) -> usize {
    let s = t / 2;
    s + s * s.saturating_sub(1) / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FinderStage {
    /// A mono `K̃_{t−1}` found inside `A_{u,v'}` or `A_{v,u'}` and extended.
    ClaimExtension,
    ClaimEmptySets,
    ClaimNoMonoClique,
    /// A `K̃_t` in the minority colour directly inside `X`.
    DirectClique,
    NoGoodTuple,
    TooFewStars,
    DirectCliqueInCentres,
    NoCopyInCentres,
    Assembled,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct FinderDiagnostics {
    pub stage: FinderStage,
    pub majority: Color,
    pub thresholds: BTreeMap<String, f64>,
    pub sets: BTreeMap<String, Vec<Vertex>>,
    pub copy: Option<CopyCertificate>,
    pub colour: Option<Color>,
    pub verified: bool,
}

struct Ctx<'a> {
    h: Hypergraph3,
    gamma: &'a Hypergraph3,
    psi: &'a Coloring2,
    t: usize,
    budget: Option<u64>,
    y: Vec<Vertex>,
}

impl Ctx<'_> {
    fn coloured_h(&self, e: Triple, c: Color) -> bool {
        self.h.has_edge(&e) && self.psi.get(&e) == Some(c)
    }

    fn mono_clique(
        &self,
        set: &[Vertex],
        s: usize,
        c: Color,
    ) -> Result<Option<Option<CopyCertificate>>> {
        let class = self.psi.class(c).induced(set);
        if s == 2 {
            return Ok(Some(class.edges().first().map(|e| edge_certificate(*e))));
        }
        Ok(match contains_linear_clique(&class, s, self.budget)? {
            Containment::Found(c) => Some(Some(c)),
            Containment::Absent => Some(None),
            Containment::Inconclusive { .. } => None,
        })
    }

    /// Adds a branch vertex `b` to `k`, matching each old branch vertex `x`
    /// to a distinct `y ∈ Y` with `{x, y, b}` an edge of `H` coloured `c`.
    fn extend(&self, k: &CopyCertificate, b: Vertex, c: Color) -> Option<CopyCertificate> {
        let taken = k.vertices();
        let cands: Vec<Vec<Vertex>> = k
            .branch
            .iter()
            .map(|&x| {
                self.y
                    .iter()
                    .copied()
                    .filter(|&y| {
                        y != b && !taken.contains(&y) && self.coloured_h(sorted3(x, y, b), c)
                    })
                    .collect()
            })
            .collect();
        let m = match_apexes(&cands)?;
        let s = k.branch.len();
        let mut cert = k.clone();
        cert.branch.push(b);
        for (i, y) in m.into_iter().enumerate() {
            cert.apex.insert((i, s), y);
        }
        Some(cert)
    }

    fn finish(
        &self,
        mut d: FinderDiagnostics,
        cert: CopyCertificate,
        c: Color,
    ) -> FinderDiagnostics {
        let ok = verify_copy(self.gamma, &cert, self.t, Some((self.psi, c))).valid;
        d.verified = ok;
        if ok {
            d.copy = Some(cert);
            d.colour = Some(c);
        }
        d
    }
}

fn edge_certificate(e: Triple) -> CopyCertificate {
    CopyCertificate {
        branch: vec![e[0], e[1]],
        apex: [((0, 1), e[2])].into_iter().collect(),
    }
}

fn certificate_from_map(s: usize, map: &[Vertex]) -> Result<CopyCertificate> {
    if s == 2 {
        return Ok(CopyCertificate {
            branch: vec![map[0], map[1]],
            apex: [((0, 1), map[2])].into_iter().collect(),
        });
    }
    let lc = linear_clique(s, 3)?;
    Ok(CopyCertificate {
        branch: lc.branch.iter().map(|&b| map[b]).collect(),
        apex: lc
            .apex_of
            .iter()
            .map(|(&ij, blk)| (ij, map[blk[0]]))
            .collect(),
    })
}

/// Searches `Γ = H ∪ R` under `psi` for a monochromatic `K̃_t` (`t` even,
/// `t ≥ 4`) along the majority-colour argument on the triad `P = [X, Y, Z]`.
/// Returns the stage reached; a copy is present only when `verify_copy`
/// accepted it.
pub fn constructive_mono_finder(
    h: &Hypergraph3,
    r: &Hypergraph3,
    psi: &Coloring2,
    p: &Graph2,
    t: usize,
    params: &FinderParams,
) -> Result<FinderDiagnostics> {
    if t < 4 || t % 2 != 0 {
        return invalid("the finder needs an even t >= 4");
    }
    let gamma = h.union(r)?;
    if psi.host() != &gamma {
        return invalid("the colouring must be defined on H ∪ R");
    }
    let table_parts = match p.parts() {
        Some(ps) if ps.len() == 3 => ps.to_vec(),
        _ => {
            return Err(Error::InvalidParts(
                "a triad needs exactly three declared parts".into(),
            ))
        }
    };
    let (x, y, z) = (
        table_parts[0].clone(),
        table_parts[1].clone(),
        table_parts[2].clone(),
    );
    let h3 = induce_tripartite(h, &x, &y, &z)?;
    let s = t / 2;
    let v = half_order(t);
    let yz = (y.len() * z.len()) as f64;
    let scale = params.d2.powi(2 * v as i32 + 1);
    let eta = params.d3.powi(v as i32) * scale / 2.0;
    let guard = eta / (2.0 * v as f64) * yz;
    let f_threshold = (params.d3.powi(v as i32) - params.eps) * scale * yz;

    let maj = majority_colour(psi, Some(&h3))?;
    let big = if maj.blue_majority {
        Color::Blue
    } else {
        Color::Red
    };
    let small = big.other();
    let mut d = FinderDiagnostics {
        stage: FinderStage::Inconclusive,
        majority: big,
        thresholds: [
            ("eta".to_string(), eta),
            ("guard".to_string(), guard),
            ("bad_tuple".to_string(), f_threshold),
            ("eps".to_string(), params.eps),
        ]
        .into_iter()
        .collect(),
        sets: BTreeMap::new(),
        copy: None,
        colour: None,
        verified: false,
    };
    let ctx = Ctx {
        h: h3.clone(),
        gamma: &gamma,
        psi,
        t,
        budget: params.budget,
        y: y.clone(),
    };
    let link = |w: Vertex, c: Color| -> Result<Graph2> {
        let (red, blue) = red_blue_links(psi, &h3, w)?;
        Ok(if c == Color::Red { red } else { blue })
    };

    // Guard of the majority claim: minority-colour links of X stay small.
    let mut violator: Option<(usize, Vertex)> = None;
    for &vx in &x {
        let e = link(vx, small)?.edge_count();
        if e as f64 > guard && violator.map_or(true, |(best, _)| e > best) {
            violator = Some((e, vx));
        }
    }
    if let Some((_, vv)) = violator {
        d.sets.insert("guard_violator".into(), vec![vv]);
        let mut u = z[0];
        let mut best = 0;
        for &vz in &z {
            let e = link(vz, big)?.edge_count();
            if e > best {
                best = e;
                u = vz;
            }
        }
        let lv = link(vv, small)?;
        let lu = link(u, big)?;
        let a_v = degree_filter(&lv, &z, t);
        let a_u = degree_filter(&lu, &x, t);
        d.sets.insert("u".into(), vec![u]);
        d.sets.insert("A_v".into(), a_v.clone());
        d.sets.insert("A_u".into(), a_u.clone());
        if a_v.is_empty() || a_u.is_empty() {
            d.stage = FinderStage::ClaimEmptySets;
            return Ok(d);
        }
        let (mut n_small, mut n_big) = (0usize, 0usize);
        for &xa in &a_u {
            for &yy in &y {
                for &za in &a_v {
                    let e = sorted3(xa, yy, za);
                    if h3.has_edge(&e) {
                        if psi.get(&e) == Some(small) {
                            n_small += 1;
                        } else {
                            n_big += 1;
                        }
                    }
                }
            }
        }
        let (set, anchors) = if n_small >= n_big {
            let mut vp = a_v[0];
            let mut best = 0;
            for &za in &a_v {
                let l = link(za, small)?;
                let c: usize = a_u
                    .iter()
                    .map(|&xa| y.iter().filter(|&&yy| l.has_edge(xa, yy)).count())
                    .sum();
                if c > best {
                    best = c;
                    vp = za;
                }
            }
            let l = link(vp, small)?;
            let set: Vec<Vertex> = a_u
                .iter()
                .copied()
                .filter(|&xa| y.iter().filter(|&&yy| l.has_edge(xa, yy)).count() >= t)
                .collect();
            d.sets.insert("v_prime".into(), vec![vp]);
            d.sets.insert("A_u_vprime".into(), set.clone());
            (set, [(small, vp), (big, u)])
        } else {
            let mut up = a_u[0];
            let mut best = 0;
            for &xa in &a_u {
                let l = link(xa, big)?;
                let c: usize = a_v
                    .iter()
                    .map(|&za| y.iter().filter(|&&yy| l.has_edge(yy, za)).count())
                    .sum();
                if c > best {
                    best = c;
                    up = xa;
                }
            }
            let l = link(up, big)?;
            let set: Vec<Vertex> = a_v
                .iter()
                .copied()
                .filter(|&za| y.iter().filter(|&&yy| l.has_edge(yy, za)).count() >= t)
                .collect();
            d.sets.insert("u_prime".into(), vec![up]);
            d.sets.insert("A_v_uprime".into(), set.clone());
            (set, [(small, vv), (big, up)])
        };
        let mut inconclusive = false;
        for (c, anchor) in anchors {
            match ctx.mono_clique(&set, t - 1, c)? {
                None => inconclusive = true,
                Some(None) => {}
                Some(Some(k)) => {
                    if let Some(cert) = ctx.extend(&k, anchor, c) {
                        d.stage = FinderStage::ClaimExtension;
                        return Ok(ctx.finish(d, cert, c));
                    }
                }
            }
        }
        d.stage = if inconclusive {
            FinderStage::Inconclusive
        } else {
            FinderStage::ClaimNoMonoClique
        };
        return Ok(d);
    }

    match ctx.mono_clique(&x, t, small)? {
        None => {
            d.stage = FinderStage::Inconclusive;
            return Ok(d);
        }
        Some(Some(cert)) => {
            d.stage = FinderStage::DirectClique;
            return Ok(ctx.finish(d, cert, small));
        }
        Some(None) => {}
    }

    // A majority-colour K̃_{t/2} in X whose joint link is not too small.
    let table = LinkTable::new(&h3, p)?;
    let class_big_x = psi.class(big).induced(&x);
    let pattern = linear_clique(s, 3)?.hypergraph3()?;
    let mut good: Option<(CopyCertificate, Vec<Vertex>)> = None;
    for c in pattern_copies(&class_big_x, &pattern, COPY_LIMIT)? {
        let pos = table.positions(&c.vertices)?;
        if table.joint(&pos).count_ones(..) as f64 >= f_threshold {
            good = Some((certificate_from_map(s, &c.map)?, c.vertices));
            break;
        }
    }
    let (k, kv) = match good {
        Some(g) => g,
        None => {
            d.stage = FinderStage::NoGoodTuple;
            return Ok(d);
        }
    };
    d.sets.insert("K".into(), kv.clone());
    let joint = table.to_graph(&table.joint(&table.positions(&kv)?));
    let residual: Vec<(Vertex, Vertex)> = joint
        .edges()
        .into_iter()
        .filter(|&(a, b)| {
            kv.iter()
                .all(|&xv| psi.get(&sorted3(xv, a, b)) == Some(big))
        })
        .collect();
    let residual = Graph2::from_edges(h.n(), residual, Some(vec![y.clone(), z.clone()]))?;
    let by_y = star_supersaturation(&residual, s, 0)?;
    let by_z = star_supersaturation(&residual, s, 1)?;
    let stars = if by_z.stars.len() > by_y.stars.len() {
        by_z
    } else {
        by_y
    };
    d.sets.insert("S".into(), stars.centres.clone());
    if stars.centres.is_empty() {
        d.stage = FinderStage::TooFewStars;
        return Ok(d);
    }
    match ctx.mono_clique(&stars.centres, t, small)? {
        None => {
            d.stage = FinderStage::Inconclusive;
            return Ok(d);
        }
        Some(Some(cert)) => {
            d.stage = FinderStage::DirectCliqueInCentres;
            return Ok(ctx.finish(d, cert, small));
        }
        Some(None) => {}
    }
    let k2 = match ctx.mono_clique(&stars.centres, s, big)? {
        None => {
            d.stage = FinderStage::Inconclusive;
            return Ok(d);
        }
        Some(None) => {
            d.stage = FinderStage::NoCopyInCentres;
            return Ok(d);
        }
        Some(Some(c)) => c,
    };
    let leaves: HashMap<Vertex, &Vec<Vertex>> = stars
        .stars
        .iter()
        .map(|st| (st.centre, &st.leaves))
        .collect();
    let mut cert = CopyCertificate {
        branch: k.branch.iter().chain(k2.branch.iter()).copied().collect(),
        apex: k.apex.clone(),
    };
    for (&(i, j), &w) in &k2.apex {
        cert.apex.insert((i + s, j + s), w);
    }
    for (jp, &uj) in k2.branch.iter().enumerate() {
        for i in 0..s {
            cert.apex.insert((i, s + jp), leaves[&uj][i]);
        }
    }
    d.stage = FinderStage::Assembled;
    Ok(ctx.finish(d, cert, big))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::triangles;
    use crate::rational::rat;
    use rand::Rng;

    fn brute_force(gamma: &Hypergraph3, f1: &Pattern, f2: &Pattern) -> bool {
        let (c1, c2) = copy_lists(gamma, f1, f2, None, None).unwrap();
        let m = gamma.edge_count();
        (0u32..(1 << m)).all(|mask| {
            let red = |e: usize| mask >> e & 1 == 1;
            c1.iter().any(|c| c.iter().all(|&e| red(e)))
                || c2.iter().any(|c| c.iter().all(|&e| !red(e)))
        })
    }

    #[test]
    fn single_edge_pattern_arrows_iff_nonempty() {
        let e = Pattern::Clique(2);
        let h = Hypergraph3::from_edges(5, vec![[0, 1, 2]]).unwrap();
        assert_eq!(decide_arrow(&h, &e, &e, None).unwrap().arrows, Some(true));
        let v = decide_arrow(&Hypergraph3::empty(5), &e, &e, None).unwrap();
        assert_eq!(v.arrows, Some(false));
    }

    #[test]
    fn one_linear_triangle_does_not_arrow() {
        let k3 = linear_clique(3, 3).unwrap().hypergraph3().unwrap();
        let f = Pattern::Clique(3);
        let v = decide_arrow(&k3, &f, &f, None).unwrap();
        assert_eq!(v.arrows, Some(false));
        assert!(is_good_coloring(&k3, &f, &f, &[], &[], v.coloring.as_ref().unwrap()).unwrap());
        assert!(!brute_force(&k3, &f, &f));
    }

    #[test]
    fn matches_brute_force_on_random_small_hosts() {
        let mut rng = RngSpec::from_seed(4).rng();
        let all = Hypergraph3::complete(7).edges().to_vec();
        for _ in 0..40 {
            let m = rng.gen_range(0..=10);
            let edges: Vec<Triple> = rand::seq::index::sample(&mut rng, all.len(), m)
                .into_iter()
                .map(|i| all[i])
                .collect();
            let g = Hypergraph3::from_edges(7, edges).unwrap();
            for (f1, f2) in [
                (Pattern::Clique(2), Pattern::Clique(3)),
                (Pattern::Clique(3), Pattern::Clique(3)),
            ] {
                let v = decide_arrow(&g, &f1, &f2, None).unwrap();
                assert_eq!(v.arrows, Some(brute_force(&g, &f1, &f2)));
            }
        }
    }

    #[test]
    fn family_exclusion_reductions() {
        let k3 = linear_clique(3, 3).unwrap().hypergraph3().unwrap();
        let host = k3
            .union(&Hypergraph3::from_edges(6, vec![[0, 1, 2]]).unwrap())
            .unwrap();
        let f = Pattern::Clique(3);
        let a = decide_arrow(&host, &f, &f, None).unwrap();
        let b = family_ramsey_audit(&host, &f, &f, &[], &[], None).unwrap();
        assert_eq!(a, b);
        // Excluding every blue copy leaves one-colour arrowing: red K̃_2 always exists.
        let all_sets: Vec<Vec<Vertex>> = pattern_copies(&host, &k3, 100)
            .unwrap()
            .into_iter()
            .map(|c| c.vertices)
            .collect();
        let v = family_ramsey_audit(&host, &Pattern::Clique(2), &f, &[], &all_sets, None).unwrap();
        assert_eq!(v.arrows, Some(false));
    }

    #[test]
    fn subset_audit_on_complete_and_empty() {
        let e = Pattern::Clique(2);
        let v = subset_ramsey_audit(
            &Hypergraph3::complete(8),
            &e,
            &e,
            0.5,
            SubsetMode::Exact,
            None,
        )
        .unwrap();
        assert_eq!(v.pass, Some(true));
        let v = subset_ramsey_audit(&Hypergraph3::empty(8), &e, &e, 0.5, SubsetMode::Exact, None)
            .unwrap();
        assert_eq!(v.pass, Some(false));
        assert_eq!(v.witness.unwrap().len(), 4);
    }

    #[test]
    fn majority_ties_count_for_both() {
        let h = Hypergraph3::from_edges(4, vec![[0, 1, 2], [0, 1, 3]]).unwrap();
        let psi = Coloring2::from_vec(&h, vec![Color::Red, Color::Blue]).unwrap();
        let m = majority_colour(&psi, None).unwrap();
        assert!(m.red_majority && m.blue_majority);
        let all_red = Coloring2::monochromatic(&h, Color::Red);
        let m = majority_colour(&all_red, None).unwrap();
        assert!(m.red_majority && !m.blue_majority);
    }

    #[test]
    fn support_filter_examples() {
        let a: Vec<Vertex> = (0..4).collect();
        let b: Vec<Vertex> = (4..8).collect();
        let g = Graph2::complete_bipartite(8, &a, &b).unwrap();
        assert_eq!(support_filter(&g, &int(1), 2).unwrap(), a);
        let m = Graph2::from_edges(
            8,
            (0..4).map(|i| (i, i + 4)),
            Some(vec![a.clone(), b.clone()]),
        )
        .unwrap();
        assert_eq!(support_filter(&m, &rat(1, 4), 0).unwrap().len(), 4);
        assert!(support_filter(&m, &int(1), 1).is_err());
    }

    #[test]
    fn stars_in_k23() {
        let a = vec![0, 1];
        let b = vec![2, 3, 4];
        let g = Graph2::complete_bipartite(5, &a, &b).unwrap();
        let r = star_supersaturation(&g, 3, 0).unwrap();
        assert_eq!(r.copy_count, 2);
        assert_eq!(r.stars.len(), 1);
        let empty = Graph2::with_parts(5, vec![a, b]).unwrap();
        assert_eq!(star_supersaturation(&empty, 1, 0).unwrap().copy_count, 0);
    }

    #[test]
    fn link_split_partitions_the_link() {
        let h = Hypergraph3::complete(6);
        let mut rng = RngSpec::from_seed(3).rng();
        let psi = Coloring2::from_fn(&h, |_| {
            if rng.gen_bool(0.5) {
                Color::Red
            } else {
                Color::Blue
            }
        });
        let (r, b) = red_blue_links(&psi, &h, 2).unwrap();
        assert_eq!(r.edge_count() + b.edge_count(), 10);
        assert_eq!(r.intersection(&b).edge_count(), 0);
    }

    fn planted(n0: usize) -> (Hypergraph3, Hypergraph3, Coloring2, Graph2) {
        let parts: Vec<Vec<Vertex>> = (0..3).map(|i| (i * n0..(i + 1) * n0).collect()).collect();
        let p = Graph2::complete_multipartite(3 * n0, &parts).unwrap();
        let h = Hypergraph3::from_edges(3 * n0, triangles(&p)).unwrap();
        let inside = |set: &[Vertex]| {
            let mut e = Vec::new();
            for a in 0..set.len() {
                for b in a + 1..set.len() {
                    for c in b + 1..set.len() {
                        e.push([set[a], set[b], set[c]]);
                    }
                }
            }
            e
        };
        let mut r_edges = inside(&parts[0]);
        r_edges.extend(inside(&parts[1]));
        let r = Hypergraph3::from_edges(3 * n0, r_edges).unwrap();
        let gamma = h.union(&r).unwrap();
        let psi = Coloring2::from_fn(&gamma, |e| {
            let in_x = e.iter().all(|&v| v < n0);
            if in_x && !e.contains(&0) {
                Color::Red
            } else {
                Color::Blue
            }
        });
        (h, r, psi, p)
    }

    #[test]
    fn planted_instance_assembles_a_blue_clique() {
        let (h, r, psi, p) = planted(8);
        let d =
            constructive_mono_finder(&h, &r, &psi, &p, 4, &FinderParams::toy(4, 0.5, 1.0)).unwrap();
        assert_eq!(d.stage, FinderStage::Assembled);
        assert!(d.verified);
        assert_eq!(d.colour, Some(Color::Blue));
        let gamma = h.union(&r).unwrap();
        assert!(
            verify_copy(
                &gamma,
                d.copy.as_ref().unwrap(),
                4,
                Some((&psi, Color::Blue))
            )
            .valid
        );
    }

    #[test]
    fn all_red_host_gives_a_direct_clique() {
        let k4 = linear_clique(4, 3).unwrap();
        let r = k4.hypergraph3().unwrap().with_n(13).unwrap();
        let h = Hypergraph3::empty(13);
        let gamma = h.union(&r).unwrap();
        let psi = Coloring2::monochromatic(&gamma, Color::Red);
        let p = Graph2::with_parts(13, vec![(0..10).collect(), vec![10, 11], vec![12]]).unwrap();
        let d =
            constructive_mono_finder(&h, &r, &psi, &p, 4, &FinderParams::toy(4, 0.5, 0.5)).unwrap();
        assert_eq!(d.stage, FinderStage::DirectClique);
        assert!(d.verified);
    }
}
