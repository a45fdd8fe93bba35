//! Value types shared by every other module: 3-graphs, 2-graphs with optional
//! part structure, red/blue colourings and vertex/pair partitions.
//!
//! Induced objects always keep the labels of the ambient ground set `[n]`.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rational::{from_u128, Rational};

pub type Vertex = usize;
pub type Triple = [Vertex; 3];

pub fn sorted3(a: Vertex, b: Vertex, c: Vertex) -> Triple {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

pub fn pair(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A 3-uniform hypergraph on `[n]`. Edges are kept sorted and deduplicated.
#[derive(Clone, Debug)]
pub struct Hypergraph3 {
    n: usize,
    edges: Vec<Triple>,
    index: HashSet<Triple>,
}

impl PartialEq for Hypergraph3 {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}
impl Eq for Hypergraph3 {}

impl Hypergraph3 {
    pub fn empty(n: usize) -> Self {
        Hypergraph3 {
            n,
            edges: Vec::new(),
            index: HashSet::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    edges.push([a, b, c]);
                }
            }
        }
        Self::from_sorted_unique(n, edges)
    }

    /// Strict constructor: rejects out-of-range vertices, repeated vertices
    /// inside an edge and duplicate edges.
    pub fn from_edges<I: IntoIterator<Item = Triple>>(n: usize, edges: I) -> Result<Self> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for e in edges {
            let t = sorted3(e[0], e[1], e[2]);
            if t[2] >= n {
                return invalid(format!("edge {:?} has a vertex >= n={}", e, n));
            }
            if t[0] == t[1] || t[1] == t[2] {
                return invalid(format!("edge {:?} repeats a vertex", e));
            }
            if !seen.insert(t) {
                return invalid(format!("duplicate edge {:?}", t));
            }
            out.push(t);
        }
        out.sort_unstable();
        Ok(Hypergraph3 {
            n,
            edges: out,
            index: seen,
        })
    }

    /// Like [`from_edges`](Self::from_edges) but silently merges duplicates.
    pub fn from_edge_set<I: IntoIterator<Item = Triple>>(n: usize, edges: I) -> Result<Self> {
        let mut set = HashSet::new();
        for e in edges {
            let t = sorted3(e[0], e[1], e[2]);
            if t[2] >= n || t[0] == t[1] || t[1] == t[2] {
                return invalid(format!("bad edge {:?} for n={}", e, n));
            }
            set.insert(t);
        }
        let mut edges: Vec<Triple> = set.iter().copied().collect();
        edges.sort_unstable();
        Ok(Hypergraph3 {
            n,
            edges,
            index: set,
        })
    }

    pub(crate) fn from_sorted_unique(n: usize, edges: Vec<Triple>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let index = edges.iter().copied().collect();
        Hypergraph3 { n, edges, index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Triple] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, a: Vertex, b: Vertex, c: Vertex) -> bool {
        self.index.contains(&sorted3(a, b, c))
    }

    pub fn has_edge(&self, e: &Triple) -> bool {
        self.index.contains(&sorted3(e[0], e[1], e[2]))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                d[v] += 1;
            }
        }
        d
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    /// Vertices lying in at least one edge, ascending.
    pub fn non_isolated(&self) -> Vec<Vertex> {
        self.degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(v, _)| v)
            .collect()
    }

    /// Minimum 1-degree over all of `[n]`.
    pub fn min_degree(&self) -> usize {
        self.degrees().into_iter().min().unwrap_or(0)
    }

    pub fn filter<F: FnMut(&Triple) -> bool>(&self, mut keep: F) -> Hypergraph3 {
        let edges = self.edges.iter().copied().filter(|e| keep(e)).collect();
        Self::from_sorted_unique(self.n, edges)
    }

    /// Sub-3-graph induced on `set` (labels unchanged).
    pub fn induced(&self, set: &[Vertex]) -> Hypergraph3 {
        let mut mask = vec![false; self.n];
        for &v in set {
            if v < self.n {
                mask[v] = true;
            }
        }
        self.filter(|e| e.iter().all(|&v| mask[v]))
    }

    pub fn union(&self, other: &Hypergraph3) -> Result<Hypergraph3> {
        if self.n != other.n {
            return invalid(format!("vertex counts differ: {} vs {}", self.n, other.n));
        }
        let mut edges = Vec::with_capacity(self.edges.len() + other.edges.len());
        let (mut i, mut j) = (0, 0);
        while i < self.edges.len() || j < other.edges.len() {
            let pick = match (self.edges.get(i), other.edges.get(j)) {
                (Some(a), Some(b)) if a == b => {
                    j += 1;
                    i += 1;
                    *a
                }
                (Some(a), Some(b)) if a < b => {
                    i += 1;
                    *a
                }
                (Some(_), Some(b)) => {
                    j += 1;
                    *b
                }
                (Some(a), None) => {
                    i += 1;
                    *a
                }
                (None, Some(b)) => {
                    j += 1;
                    *b
                }
                (None, None) => unreachable!(),
            };
            edges.push(pick);
        }
        Ok(Self::from_sorted_unique(self.n, edges))
    }

    pub fn intersection_count(&self, other: &Hypergraph3) -> usize {
        self.edges
            .iter()
            .filter(|e| other.index.contains(*e))
            .count()
    }

    /// Complement within all triples of `[n]`.
    pub fn complement(&self) -> Hypergraph3 {
        Hypergraph3::complete(self.n).filter(|e| !self.index.contains(e))
    }

    /// Re-embeds into a larger ground set.
    pub fn with_n(&self, n: usize) -> Result<Hypergraph3> {
        if n < self.n && self.edges.iter().any(|e| e[2] >= n) {
            return invalid("cannot shrink below an edge vertex");
        }
        Ok(Self::from_sorted_unique(n, self.edges.clone()))
    }

    /// Maps every pair `{u,v}` (u<v) to the third vertices completing it to an edge.
    pub fn codegree_map(&self) -> HashMap<(Vertex, Vertex), Vec<Vertex>> {
        let mut m: HashMap<(Vertex, Vertex), Vec<Vertex>> = HashMap::new();
        for &[a, b, c] in &self.edges {
            m.entry((a, b)).or_default().push(c);
            m.entry((a, c)).or_default().push(b);
            m.entry((b, c)).or_default().push(a);
        }
        m
    }
}

/// A 2-graph on `[n]` with optional declared parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph2 {
    n: usize,
    adj: Vec<FixedBitSet>,
    m: usize,
    parts: Option<Vec<Vec<Vertex>>>,
}

impl Graph2 {
    pub fn empty(n: usize) -> Self {
        Graph2 {
            n,
            adj: vec![FixedBitSet::with_capacity(n); n],
            m: 0,
            parts: None,
        }
    }

    /// Empty graph with declared parts; the parts must be pairwise disjoint.
    pub fn with_parts(n: usize, parts: Vec<Vec<Vertex>>) -> Result<Self> {
        let mut seen = FixedBitSet::with_capacity(n);
        for p in &parts {
            for &v in p {
                if v >= n {
                    return Err(Error::InvalidParts(format!("vertex {} >= n={}", v, n)));
                }
                if seen.put(v) {
                    return Err(Error::InvalidParts(format!("vertex {} in two parts", v)));
                }
            }
        }
        let parts = parts
            .into_iter()
            .map(|mut p| {
                p.sort_unstable();
                p
            })
            .collect();
        let mut g = Graph2::empty(n);
        g.parts = Some(parts);
        Ok(g)
    }

    pub fn from_edges<I: IntoIterator<Item = (Vertex, Vertex)>>(
        n: usize,
        edges: I,
        parts: Option<Vec<Vec<Vertex>>>,
    ) -> Result<Self> {
        let mut g = match parts {
            Some(p) => Graph2::with_parts(n, p)?,
            None => Graph2::empty(n),
        };
        let owner = g.part_lookup();
        for (u, v) in edges {
            if u >= n || v >= n || u == v {
                return invalid(format!("bad pair ({}, {}) for n={}", u, v, n));
            }
            if let Some(owner) = &owner {
                match (owner[u], owner[v]) {
                    (Some(a), Some(b)) if a != b => {}
                    (Some(_), Some(_)) => {
                        return Err(Error::InvalidParts(format!(
                            "edge ({}, {}) lies inside one part",
                            u, v
                        )))
                    }
                    _ => {
                        return Err(Error::InvalidParts(format!(
                            "edge ({}, {}) leaves the declared parts",
                            u, v
                        )))
                    }
                }
            }
            if g.has_edge(u, v) {
                return invalid(format!("duplicate pair ({}, {})", u, v));
            }
            g.insert(u, v);
        }
        Ok(g)
    }

    pub fn complete_bipartite(n: usize, x: &[Vertex], y: &[Vertex]) -> Result<Self> {
        let mut g = Graph2::with_parts(n, vec![x.to_vec(), y.to_vec()])?;
        for &a in x {
            for &b in y {
                g.insert(a, b);
            }
        }
        Ok(g)
    }

    pub fn complete_multipartite(n: usize, parts: &[Vec<Vertex>]) -> Result<Self> {
        let mut g = Graph2::with_parts(n, parts.to_vec())?;
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                for &a in &parts[i] {
                    for &b in &parts[j] {
                        g.insert(a, b);
                    }
                }
            }
        }
        Ok(g)
    }

    fn part_lookup(&self) -> Option<Vec<Option<usize>>> {
        self.parts.as_ref().map(|parts| {
            let mut owner = vec![None; self.n];
            for (i, p) in parts.iter().enumerate() {
                for &v in p {
                    owner[v] = Some(i);
                }
            }
            owner
        })
    }

    /// Adds an edge without validation. Only used while building values.
    pub(crate) fn insert(&mut self, u: Vertex, v: Vertex) {
        if !self.adj[u].contains(v) {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
            self.m += 1;
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> Option<&[Vec<Vertex>]> {
        self.parts.as_deref()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && v < self.n && self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: Vertex) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// Edges as sorted pairs `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n {
            for v in self.adj[u].ones() {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Number of edges between two vertex sets (which should be disjoint).
    pub fn edges_between(&self, x: &[Vertex], y: &[Vertex]) -> usize {
        let mut ys = FixedBitSet::with_capacity(self.n);
        for &v in y {
            ys.insert(v);
        }
        x.iter()
            .map(|&u| self.adj[u].intersection(&ys).count())
            .sum()
    }

    /// The bipartite subgraph `G[X, Y]` with parts `X`, `Y` declared.
    pub fn restrict(&self, x: &[Vertex], y: &[Vertex]) -> Result<Graph2> {
        let mut g = Graph2::with_parts(self.n, vec![x.to_vec(), y.to_vec()])?;
        for &a in x {
            for &b in y {
                if self.has_edge(a, b) {
                    g.insert(a, b);
                }
            }
        }
        Ok(g)
    }

    pub fn intersection(&self, other: &Graph2) -> Graph2 {
        let mut g = Graph2::empty(self.n);
        for (u, v) in self.edges() {
            if other.has_edge(u, v) {
                g.insert(u, v);
            }
        }
        g.parts = self.parts.clone();
        g
    }

    pub fn is_subgraph_of(&self, other: &Graph2) -> bool {
        self.edges().into_iter().all(|(u, v)| other.has_edge(u, v))
    }

    /// Union of edge sets; parts are dropped.
    pub fn union(&self, other: &Graph2) -> Graph2 {
        let mut g = self.clone();
        g.parts = None;
        for (u, v) in other.edges() {
            g.insert(u, v);
        }
        g
    }
}

/// The sub-3-graph of edges meeting each of `X`, `Y`, `Z` exactly once.
pub fn induce_tripartite(
    h: &Hypergraph3,
    x: &[Vertex],
    y: &[Vertex],
    z: &[Vertex],
) -> Result<Hypergraph3> {
    let mut owner = vec![0u8; h.n()];
    for (tag, set) in [(1u8, x), (2, y), (4, z)] {
        for &v in set {
            if v >= h.n() {
                return Err(Error::InvalidParts(format!("vertex {} >= n", v)));
            }
            if owner[v] != 0 {
                return Err(Error::InvalidParts(format!("vertex {} in two parts", v)));
            }
            owner[v] = tag;
        }
    }
    Ok(h.filter(|e| owner[e[0]] | owner[e[1]] | owner[e[2]] == 7))
}

/// Link graph `L_H(v)`, optionally supported on `E(support)`.
pub fn link_graph(h: &Hypergraph3, v: Vertex, support: Option<&Graph2>) -> Result<Graph2> {
    if v >= h.n() {
        return invalid(format!("vertex {} >= n={}", v, h.n()));
    }
    if let Some(s) = support {
        if s.n() != h.n() {
            return invalid("support graph has a different ground set");
        }
    }
    let mut g = Graph2::empty(h.n());
    for e in h.edges() {
        if let Some(pos) = e.iter().position(|&w| w == v) {
            let (a, b) = match pos {
                0 => (e[1], e[2]),
                1 => (e[0], e[2]),
                _ => (e[0], e[1]),
            };
            if support.map_or(true, |s| s.has_edge(a, b)) {
                g.insert(a, b);
            }
        }
    }
    Ok(g)
}

/// All triangles `𝒦_3(P)` as sorted triples, ascending.
pub fn triangles(p: &Graph2) -> Vec<Triple> {
    let mut out = Vec::new();
    for u in 0..p.n() {
        for v in p.neighbors(u).ones() {
            if v <= u {
                continue;
            }
            for w in p.neighbors(u).intersection(p.neighbors(v)) {
                if w > v {
                    out.push([u, v, w]);
                }
            }
        }
    }
    out
}

/// `|E(H) ∩ 𝒦_3(G)| / |𝒦_3(G)|`.
pub fn relative_density(h: &Hypergraph3, g: &Graph2) -> Result<Rational> {
    let tri = triangles(g);
    if tri.is_empty() {
        return Err(Error::UndefinedDensity(
            "the graph spans no triangle".into(),
        ));
    }
    let hit = tri.iter().filter(|t| h.has_edge(t)).count();
    Ok(from_u128(hit as u128, tri.len() as u128))
}

/// `K^(2)(X, Y) \ E(G)` for a graph with exactly two declared parts.
pub fn complement_bipartite(g: &Graph2) -> Result<Graph2> {
    let parts = match g.parts() {
        Some(p) if p.len() == 2 => p.to_vec(),
        _ => {
            return Err(Error::InvalidParts(
                "complement needs exactly two declared parts".into(),
            ))
        }
    };
    let mut c = Graph2::with_parts(g.n(), parts.clone())?;
    for &a in &parts[0] {
        for &b in &parts[1] {
            if !g.has_edge(a, b) {
                c.insert(a, b);
            }
        }
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

/// A total red/blue colouring of the edges of a host 3-graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring2 {
    host: Hypergraph3,
    colors: Vec<Color>,
}

impl Coloring2 {
    pub fn from_fn<F: FnMut(&Triple) -> Color>(host: &Hypergraph3, mut f: F) -> Self {
        let colors = host.edges().iter().map(|e| f(e)).collect();
        Coloring2 {
            host: host.clone(),
            colors,
        }
    }

    pub fn monochromatic(host: &Hypergraph3, c: Color) -> Self {
        Self::from_fn(host, |_| c)
    }

    /// Colours listed in the order of `host.edges()`.
    pub fn from_vec(host: &Hypergraph3, colors: Vec<Color>) -> Result<Self> {
        if colors.len() != host.edge_count() {
            return invalid("colouring must cover every host edge exactly once");
        }
        Ok(Coloring2 {
            host: host.clone(),
            colors,
        })
    }

    pub fn host(&self) -> &Hypergraph3 {
        &self.host
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn get(&self, e: &Triple) -> Option<Color> {
        let t = sorted3(e[0], e[1], e[2]);
        self.host
            .edges()
            .binary_search(&t)
            .ok()
            .map(|i| self.colors[i])
    }

    pub fn count(&self, c: Color) -> usize {
        self.colors.iter().filter(|&&x| x == c).count()
    }

    /// The 3-graph formed by the edges of colour `c`.
    pub fn class(&self, c: Color) -> Hypergraph3 {
        let edges = self
            .host
            .edges()
            .iter()
            .zip(&self.colors)
            .filter(|(_, &x)| x == c)
            .map(|(e, _)| *e)
            .collect();
        Hypergraph3::from_sorted_unique(self.host.n(), edges)
    }
}

/// `V = V_1 ⊍ … ⊍ V_t`. Parts are stored sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    n: usize,
    parts: Vec<Vec<Vertex>>,
    part_of: Vec<usize>,
}

impl VertexPartition {
    pub fn new(n: usize, parts: Vec<Vec<Vertex>>) -> Result<Self> {
        let mut part_of = vec![usize::MAX; n];
        let mut parts = parts;
        for (i, p) in parts.iter_mut().enumerate() {
            if p.is_empty() {
                return Err(Error::InvalidParts(format!("part {} is empty", i)));
            }
            p.sort_unstable();
            for &v in p.iter() {
                if v >= n {
                    return Err(Error::InvalidParts(format!("vertex {} >= n={}", v, n)));
                }
                if part_of[v] != usize::MAX {
                    return Err(Error::InvalidParts(format!("vertex {} in two parts", v)));
                }
                part_of[v] = i;
            }
        }
        if let Some(v) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(Error::InvalidParts(format!("vertex {} is not covered", v)));
        }
        Ok(VertexPartition { n, parts, part_of })
    }

    /// Contiguous equitable split of `[n]` into `t` parts, sizes ascending.
    pub fn contiguous(n: usize, t: usize) -> Result<Self> {
        if t == 0 || t > n {
            return invalid(format!("cannot split {} vertices into {} parts", n, t));
        }
        let mut parts = Vec::with_capacity(t);
        let mut start = 0;
        for i in 0..t {
            let size = n / t + usize::from(i >= t - n % t);
            parts.push((start..start + size).collect());
            start += size;
        }
        Self::new(n, parts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[Vec<Vertex>] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &[Vertex] {
        &self.parts[i]
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn part_of(&self, v: Vertex) -> usize {
        self.part_of[v]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    pub fn is_equitable(&self) -> bool {
        let s = self.sizes();
        s.iter().max().unwrap_or(&0) - s.iter().min().unwrap_or(&0) <= 1
    }

    /// True if every part of `self` lies inside one part of `coarser`.
    pub fn refines(&self, coarser: &VertexPartition) -> bool {
        self.n == coarser.n
            && self.parts.iter().all(|p| {
                let q = coarser.part_of(p[0]);
                p.iter().all(|&v| coarser.part_of(v) == q)
            })
    }

    /// Number of cross triples `e(K^(3)(V))`.
    pub fn cross_triples(&self) -> u128 {
        let s: Vec<u128> = self.sizes().into_iter().map(|x| x as u128).collect();
        let mut total = 0u128;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                for k in j + 1..s.len() {
                    total += s[i] * s[j] * s[k];
                }
            }
        }
        total
    }
}

/// Marker stored for pairs inside one part.
pub const SAME_PART: u32 = u32::MAX;

/// A partition of the cross pairs of a [`VertexPartition`] into cells: every
/// part pair `(i, j)` carries its own numbered cells `0..count(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairPartition {
    base: VertexPartition,
    labels: Vec<u32>,
    counts: Vec<u32>,
}

impl PairPartition {
    /// Builds from a label function on cross pairs `u < v`; `counts(i, j)` gives
    /// the number of cells for parts `i < j`.
    pub fn from_fn<L, C>(base: VertexPartition, mut label: L, mut count: C) -> Result<Self>
    where
        L: FnMut(Vertex, Vertex) -> u32,
        C: FnMut(usize, usize) -> u32,
    {
        let n = base.n();
        let t = base.num_parts();
        let mut counts = vec![0u32; t * t];
        for i in 0..t {
            for j in i + 1..t {
                let c = count(i, j);
                if c == 0 {
                    return invalid(format!("part pair ({}, {}) has no cells", i, j));
                }
                counts[i * t + j] = c;
                counts[j * t + i] = c;
            }
        }
        let mut labels = vec![SAME_PART; n * n];
        for u in 0..n {
            for v in u + 1..n {
                let (pu, pv) = (base.part_of(u), base.part_of(v));
                if pu == pv {
                    continue;
                }
                let l = label(u, v);
                if l >= counts[pu * t + pv] {
                    return invalid(format!("label {} out of range for pair ({}, {})", l, u, v));
                }
                labels[u * n + v] = l;
                labels[v * n + u] = l;
            }
        }
        Ok(PairPartition {
            base,
            labels,
            counts,
        })
    }

    /// The trivial 1-equitable partition: one complete bipartite cell per pair.
    pub fn trivial(base: VertexPartition) -> Self {
        Self::from_fn(base, |_, _| 0, |_, _| 1).expect("trivial partition is valid")
    }

    pub fn base(&self) -> &VertexPartition {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn label(&self, u: Vertex, v: Vertex) -> Option<u32> {
        let l = self.labels[u * self.n() + v];
        (l != SAME_PART && u != v).then_some(l)
    }

    pub fn cells_per_pair(&self, i: usize, j: usize) -> usize {
        self.counts[i * self.base.num_parts() + j] as usize
    }

    /// `Some(ℓ)` if every part pair carries exactly ℓ cells (property B.2).
    pub fn ell(&self) -> Option<usize> {
        let t = self.base.num_parts();
        let mut ell = None;
        for i in 0..t {
            for j in i + 1..t {
                let c = self.cells_per_pair(i, j);
                match ell {
                    None => ell = Some(c),
                    Some(e) if e != c => return None,
                    _ => {}
                }
            }
        }
        ell.or(Some(1))
    }

    pub fn max_cells_per_pair(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(1) as usize
    }

    /// Total number of cells `|ℬ|`.
    pub fn total_cells(&self) -> usize {
        let t = self.base.num_parts();
        let mut s = 0;
        for i in 0..t {
            for j in i + 1..t {
                s += self.cells_per_pair(i, j);
            }
        }
        s
    }

    pub fn cell_edges(&self, i: usize, j: usize, alpha: u32) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for &u in self.base.part(i) {
            for &v in self.base.part(j) {
                if self.labels[u * self.n() + v] == alpha {
                    out.push(pair(u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Cell `B^{ij}_α` as a bipartite graph with parts `V_i`, `V_j`.
    pub fn cell(&self, i: usize, j: usize, alpha: u32) -> Graph2 {
        let mut g = Graph2::with_parts(
            self.n(),
            vec![self.base.part(i).to_vec(), self.base.part(j).to_vec()],
        )
        .expect("parts of a valid partition are disjoint");
        for &u in self.base.part(i) {
            for &v in self.base.part(j) {
                if self.labels[u * self.n() + v] == alpha {
                    g.insert(u, v);
                }
            }
        }
        g
    }

    /// Sizes of the cells of pair `(i, j)`, indexed by label.
    pub fn cell_sizes(&self, i: usize, j: usize) -> Vec<usize> {
        let mut s = vec![0; self.cells_per_pair(i, j)];
        for &u in self.base.part(i) {
            for &v in self.base.part(j) {
                s[self.labels[u * self.n() + v] as usize] += 1;
            }
        }
        s
    }

    /// Triad `P = B^{ij}_α ∪ B^{ik}_β ∪ B^{jk}_γ` with parts `V_i, V_j, V_k`.
    pub fn triad_graph(&self, triad: &Triad) -> Graph2 {
        let (i, j, k) = triad.parts;
        let (a, b, c) = triad.labels;
        let mut g = Graph2::with_parts(
            self.n(),
            vec![
                self.base.part(i).to_vec(),
                self.base.part(j).to_vec(),
                self.base.part(k).to_vec(),
            ],
        )
        .expect("parts of a valid partition are disjoint");
        for (p, q, l) in [(i, j, a), (i, k, b), (j, k, c)] {
            for &u in self.base.part(p) {
                for &v in self.base.part(q) {
                    if self.labels[u * self.n() + v] == l {
                        g.insert(u, v);
                    }
                }
            }
        }
        g
    }

    /// Every triad of the partition, in lexicographic order.
    pub fn triads(&self) -> Vec<Triad> {
        let t = self.base.num_parts();
        let mut out = Vec::new();
        for i in 0..t {
            for j in i + 1..t {
                for k in j + 1..t {
                    for a in 0..self.cells_per_pair(i, j) as u32 {
                        for b in 0..self.cells_per_pair(i, k) as u32 {
                            for c in 0..self.cells_per_pair(j, k) as u32 {
                                out.push(Triad {
                                    parts: (i, j, k),
                                    labels: (a, b, c),
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Checks (B.1) and (B.2): every cross pair is in exactly one cell of its
    /// own part pair, and all part pairs carry the same number of cells.
    pub fn check_equitable(&self) -> Result<usize> {
        let n = self.n();
        let t = self.base.num_parts();
        for u in 0..n {
            for v in 0..n {
                let same = self.base.part_of(u) == self.base.part_of(v);
                let l = self.labels[u * n + v];
                if same != (l == SAME_PART) || l != self.labels[v * n + u] {
                    return invalid(format!("pair ({}, {}) is mislabelled", u, v));
                }
                if !same {
                    let c = self.counts[self.base.part_of(u) * t + self.base.part_of(v)];
                    if l >= c {
                        return invalid(format!("pair ({}, {}) has label {} >= {}", u, v, l, c));
                    }
                }
            }
        }
        self.ell()
            .ok_or_else(|| Error::Invalid("part pairs carry different cell counts".into()))
    }
}

/// A triad index: parts `i < j < k` and one cell label per part pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triad {
    pub parts: (usize, usize, usize),
    pub labels: (u32, u32, u32),
}
