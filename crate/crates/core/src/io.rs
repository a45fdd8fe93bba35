//! Text formats: edge lists (`n=<int> k=<2|3>` header, one edge per line) and
//! partition files (`part <id>: v1 v2 ...`), plus serde helpers for rationals.

use std::path::Path;

use serde::Serializer;

use crate::error::{Error, Result};
use crate::hypergraph::{Graph2, Hypergraph3, VertexPartition};
use crate::rational::{fmt_rational, Rational};

pub fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

pub fn ser_opt_rational<S: Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&fmt_rational(r)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeList {
    Three(Hypergraph3),
    Two(Graph2),
}

fn fmt_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<Vec<usize>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if header.is_none() {
            let mut n = None;
            let mut k = None;
            for tok in line.split_whitespace() {
                match tok.split_once('=') {
                    Some(("n", v)) => n = v.parse::<usize>().ok(),
                    Some(("k", v)) => k = v.parse::<usize>().ok(),
                    _ => {
                        return Err(fmt_err(
                            line_no,
                            format!("unexpected header token {:?}", tok),
                        ))
                    }
                }
            }
            match (n, k) {
                (Some(n), Some(k)) if k == 2 || k == 3 => header = Some((n, k)),
                _ => return Err(fmt_err(line_no, "header must read \"n=<int> k=<2|3>\"")),
            }
            continue;
        }
        let (n, k) = header.unwrap();
        let verts: std::result::Result<Vec<usize>, _> =
            line.split_whitespace().map(str::parse::<usize>).collect();
        let verts =
            verts.map_err(|_| fmt_err(line_no, "vertex ids must be nonnegative integers"))?;
        if verts.len() != k {
            return Err(fmt_err(
                line_no,
                format!("expected {} vertices, found {}", k, verts.len()),
            ));
        }
        if verts.iter().any(|&v| v >= n) {
            return Err(fmt_err(
                line_no,
                format!("vertex id out of range for n={}", n),
            ));
        }
        let mut sorted = verts.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != k {
            return Err(fmt_err(line_no, "edge repeats a vertex"));
        }
        if edges.contains(&sorted) {
            return Err(fmt_err(line_no, "duplicate edge"));
        }
        edges.push(sorted);
    }
    let (n, k) = header.ok_or_else(|| fmt_err(0, "missing header"))?;
    Ok(if k == 3 {
        EdgeList::Three(Hypergraph3::from_edges(
            n,
            edges.into_iter().map(|e| [e[0], e[1], e[2]]),
        )?)
    } else {
        EdgeList::Two(Graph2::from_edges(
            n,
            edges.into_iter().map(|e| (e[0], e[1])),
            None,
        )?)
    })
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph3> {
    match parse_edge_list(text)? {
        EdgeList::Three(h) => Ok(h),
        EdgeList::Two(_) => Err(fmt_err(1, "expected k=3")),
    }
}

pub fn format_hypergraph(h: &Hypergraph3) -> String {
    let mut s = format!("n={} k=3\n", h.n());
    for e in h.edges() {
        s.push_str(&format!("{} {} {}\n", e[0], e[1], e[2]));
    }
    s
}

pub fn format_graph(g: &Graph2) -> String {
    let mut s = format!("n={} k=2\n", g.n());
    for (a, b) in g.edges() {
        s.push_str(&format!("{} {}\n", a, b));
    }
    s
}

pub fn read_edge_list(path: &Path) -> Result<EdgeList> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn read_hypergraph(path: &Path) -> Result<Hypergraph3> {
    parse_hypergraph(&std::fs::read_to_string(path)?)
}

pub fn write_edge_list(obj: &EdgeList, path: &Path) -> Result<()> {
    let text = match obj {
        EdgeList::Three(h) => format_hypergraph(h),
        EdgeList::Two(g) => format_graph(g),
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Parses `part <id>: v1 v2 ...` lines; parts are ordered by id.
pub fn parse_partition(text: &str, n: usize) -> Result<VertexPartition> {
    let mut parts: Vec<(usize, Vec<usize>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rest = line
            .strip_prefix("part")
            .ok_or_else(|| fmt_err(idx + 1, "expected \"part <id>: ...\""))?;
        let (id, verts) = rest
            .split_once(':')
            .ok_or_else(|| fmt_err(idx + 1, "missing ':'"))?;
        let id: usize = id
            .trim()
            .parse()
            .map_err(|_| fmt_err(idx + 1, "part id must be an integer"))?;
        let vs: std::result::Result<Vec<usize>, _> =
            verts.split_whitespace().map(str::parse::<usize>).collect();
        let vs = vs.map_err(|_| fmt_err(idx + 1, "vertex ids must be integers"))?;
        if parts.iter().any(|(p, _)| *p == id) {
            return Err(fmt_err(idx + 1, format!("part {} listed twice", id)));
        }
        parts.push((id, vs));
    }
    parts.sort_by_key(|(id, _)| *id);
    VertexPartition::new(n, parts.into_iter().map(|(_, v)| v).collect())
}

pub fn format_partition(v: &VertexPartition) -> String {
    let mut s = String::new();
    for (i, p) in v.parts().iter().enumerate() {
        let vs: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("part {}: {}\n", i, vs.join(" ")));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_edge() {
        let h = parse_hypergraph("n=4 k=3\n0 1 2\n").unwrap();
        assert_eq!(h.edges(), &[[0, 1, 2]]);
    }

    #[test]
    fn rejects_duplicates_and_mismatch() {
        let e = parse_edge_list("n=4 k=3\n0 1 2\n# c\n2 1 0\n").unwrap_err();
        assert_eq!(
            e,
            Error::Format {
                line: 4,
                msg: "duplicate edge".into()
            }
        );
        assert!(matches!(
            parse_edge_list("n=4 k=3\n0 1\n"),
            Err(Error::Format { line: 2, .. })
        ));
        assert!(parse_edge_list("0 1 2\n").is_err());
    }

    #[test]
    fn round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let n = rng.gen_range(3..12);
            let h = Hypergraph3::complete(n).filter(|_| rng.gen_bool(0.3));
            assert_eq!(parse_hypergraph(&format_hypergraph(&h)).unwrap(), h);
            let mut g = Graph2::empty(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.4) {
                        g.insert(u, v);
                    }
                }
            }
            assert_eq!(
                parse_edge_list(&format_graph(&g)).unwrap(),
                EdgeList::Two(g)
            );
        }
        let v = VertexPartition::contiguous(10, 3).unwrap();
        assert_eq!(parse_partition(&format_partition(&v), 10).unwrap(), v);
    }
}
