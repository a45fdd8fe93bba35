use linclique::hypergraph::Triple;
use linclique::ramsey::*;
use linclique::random::RngSpec;
use linclique::rational::rat;
use linclique::{Color, Coloring2, Graph2, Hypergraph3, Vertex};
use proptest::prelude::*;
use rand::Rng;

fn brute_force(gamma: &Hypergraph3, f1: &Pattern, f2: &Pattern) -> bool {
    let c1: Vec<Vec<usize>> = pattern_copies(gamma, &f1.graph().unwrap(), 10_000)
        .unwrap()
        .into_iter()
        .map(|c| c.edges)
        .collect();
    let c2: Vec<Vec<usize>> = pattern_copies(gamma, &f2.graph().unwrap(), 10_000)
        .unwrap()
        .into_iter()
        .map(|c| c.edges)
        .collect();
    let m = gamma.edge_count();
    (0u32..(1 << m)).all(|mask| {
        let red = |e: usize| mask >> e & 1 == 1;
        c1.iter().any(|c| c.iter().all(|&e| red(e)))
            || c2.iter().any(|c| c.iter().all(|&e| !red(e)))
    })
}

fn random_host(rng: &mut impl Rng, n: usize, max_edges: usize) -> Hypergraph3 {
    let all = Hypergraph3::complete(n).edges().to_vec();
    let m = rng.gen_range(0..=max_edges.min(all.len()));
    let edges: Vec<Triple> = rand::seq::index::sample(rng, all.len(), m)
        .into_iter()
        .map(|i| all[i])
        .collect();
    Hypergraph3::from_edges(n, edges).unwrap()
}

#[test]
fn arrow_matches_brute_force_on_200_hosts() {
    let mut rng = RngSpec::from_seed(77).rng();
    let pats = [
        (Pattern::Clique(2), Pattern::Clique(2)),
        (Pattern::Clique(2), Pattern::Clique(3)),
        (Pattern::Clique(3), Pattern::Clique(3)),
        (Pattern::Clique(3), Pattern::Clique(2)),
    ];
    for i in 0..200 {
        let g = random_host(&mut rng, 7, 12);
        let (f1, f2) = &pats[i % pats.len()];
        let v = decide_arrow(&g, f1, f2, None).unwrap();
        assert_eq!(v.arrows, Some(brute_force(&g, f1, f2)), "instance {}", i);
        if let Some(col) = &v.coloring {
            assert!(is_good_coloring(&g, f1, f2, &[], &[], col).unwrap());
        }
    }
}

#[test]
fn empty_families_match_plain_arrowing() {
    let mut rng = RngSpec::from_seed(78).rng();
    for _ in 0..50 {
        let g = random_host(&mut rng, 7, 12);
        let f = Pattern::Clique(3);
        let a = decide_arrow(&g, &Pattern::Clique(2), &f, None).unwrap();
        let b = family_ramsey_audit(&g, &Pattern::Clique(2), &f, &[], &[], None).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn family_audit_matches_filtered_brute_force() {
    let mut rng = RngSpec::from_seed(79).rng();
    for _ in 0..40 {
        let g = random_host(&mut rng, 7, 10);
        let f = Pattern::Clique(3);
        let copies = pattern_copies(&g, &f.graph().unwrap(), 1000).unwrap();
        let excluded: Vec<Vec<Vertex>> = copies
            .iter()
            .step_by(2)
            .map(|c| c.vertices.clone())
            .collect();
        let v = family_ramsey_audit(&g, &f, &f, &excluded, &[], None).unwrap();
        let kept1: Vec<&Vec<usize>> = copies
            .iter()
            .filter(|c| !excluded.contains(&c.vertices))
            .map(|c| &c.edges)
            .collect();
        let all2: Vec<&Vec<usize>> = copies.iter().map(|c| &c.edges).collect();
        let m = g.edge_count();
        let want = (0u32..(1 << m)).all(|mask| {
            let red = |e: usize| mask >> e & 1 == 1;
            kept1.iter().any(|c| c.iter().all(|&e| red(e)))
                || all2.iter().any(|c| c.iter().all(|&e| !red(e)))
        });
        assert_eq!(v.arrows, Some(want));
    }
}

#[test]
fn subset_audit_matches_exhaustive_oracle() {
    let mut rng = RngSpec::from_seed(80).rng();
    let e = Pattern::Clique(2);
    for _ in 0..5 {
        let all = Hypergraph3::complete(10).edges().to_vec();
        let g = Hypergraph3::from_edges(10, all.into_iter().filter(|_| rng.gen_bool(0.9))).unwrap();
        let v = subset_ramsey_audit(&g, &e, &e, 0.7, SubsetMode::Exact, None).unwrap();
        // Oracle: every U with |U| ≥ 7 spans an edge.
        let want = (0u32..1 << 10).filter(|m| m.count_ones() >= 7).all(|m| {
            g.edges()
                .iter()
                .any(|ed| ed.iter().all(|&x| m >> x & 1 == 1))
        });
        assert_eq!(v.pass, Some(want));
    }
}

#[test]
fn majority_and_link_split_match_direct_counts() {
    let mut rng = RngSpec::from_seed(81).rng();
    let h = Hypergraph3::complete(8);
    let psi = Coloring2::from_fn(&h, |_| {
        if rng.gen_bool(0.4) {
            Color::Red
        } else {
            Color::Blue
        }
    });
    let red = psi.colors().iter().filter(|&&c| c == Color::Red).count();
    let m = majority_colour(&psi, None).unwrap();
    assert_eq!((m.red, m.blue), (red, h.edge_count() - red));
    for v in 0..8 {
        let (r, b) = red_blue_links(&psi, &h, v).unwrap();
        for e in h.edges().iter().filter(|e| e.contains(&v)) {
            let o: Vec<Vertex> = e.iter().copied().filter(|&w| w != v).collect();
            let is_red = psi.get(e) == Some(Color::Red);
            assert_eq!(r.has_edge(o[0], o[1]), is_red);
            assert_eq!(b.has_edge(o[0], o[1]), !is_red);
        }
    }
}

#[test]
fn star_family_is_disjoint_and_maximal() {
    let mut rng = RngSpec::from_seed(82).rng();
    for _ in 0..30 {
        let a: Vec<Vertex> = (0..8).collect();
        let b: Vec<Vertex> = (8..18).collect();
        let mut edges = Vec::new();
        for &x in &a {
            for &y in &b {
                if rng.gen_bool(0.4) {
                    edges.push((x, y));
                }
            }
        }
        let g = Graph2::from_edges(18, edges, Some(vec![a.clone(), b.clone()])).unwrap();
        let r = star_supersaturation(&g, 2, 0).unwrap();
        let mut used = std::collections::BTreeSet::new();
        for s in &r.stars {
            assert!(used.insert(s.centre));
            for &l in &s.leaves {
                assert!(g.has_edge(s.centre, l));
                assert!(used.insert(l));
            }
        }
        for &c in &a {
            if !used.contains(&c) {
                let free = g.neighbors(c).ones().filter(|w| !used.contains(w)).count();
                assert!(free < 2);
            }
        }
        let direct: u128 = a
            .iter()
            .map(|&v| {
                let d = g.degree(v) as u128;
                d * d.saturating_sub(1) / 2
            })
            .sum();
        assert_eq!(r.copy_count, direct);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn support_filter_bound_holds(
        mask in proptest::collection::vec(any::<bool>(), 36),
        dnum in 1i64..6,
        k in 0usize..4,
    ) {
        let a: Vec<Vertex> = (0..6).collect();
        let b: Vec<Vertex> = (6..12).collect();
        let edges = (0..36).filter(|&i| mask[i]).map(|i| (i / 6, 6 + i % 6));
        let g = Graph2::from_edges(12, edges, Some(vec![a.clone(), b])).unwrap();
        let d = rat(dnum, 6);
        match support_filter(&g, &d, k) {
            Ok(set) => {
                prop_assert!(linclique::rational::int(2 * set.len() as i64) >= &d * linclique::rational::int(6));
            }
            Err(_) => {
                let pre = g.edge_count() as f64 >= dnum as f64 / 6.0 * 36.0 && (k as f64) <= dnum as f64 / 6.0 * 3.0;
                prop_assert!(!pre);
            }
        }
    }
}
