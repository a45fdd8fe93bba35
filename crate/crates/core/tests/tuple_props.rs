use linclique::hypergraph::{link_graph, triangles};
use linclique::tuple::*;
use linclique::{Graph2, Hypergraph3, Vertex};
use proptest::prelude::*;

const K: usize = 5;

fn parts() -> Vec<Vec<Vertex>> {
    (0..3).map(|i| (i * K..(i + 1) * K).collect()).collect()
}

fn all_cross_pairs() -> Vec<(Vertex, Vertex)> {
    let ps = parts();
    let mut out = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            for &a in &ps[i] {
                for &b in &ps[j] {
                    out.push((a, b));
                }
            }
        }
    }
    out
}

fn instance() -> impl Strategy<Value = (Graph2, Hypergraph3)> {
    let pairs = all_cross_pairs();
    let np = pairs.len();
    (
        proptest::collection::vec(any::<bool>(), np),
        proptest::collection::vec(any::<bool>(), K * K * K),
    )
        .prop_map(move |(pmask, hmask)| {
            let edges = pairs
                .iter()
                .zip(&pmask)
                .filter(|(_, &b)| b)
                .map(|(e, _)| *e);
            let p = Graph2::from_edges(3 * K, edges, Some(parts())).unwrap();
            let mut tri = Vec::new();
            for x in 0..K {
                for y in 0..K {
                    for z in 0..K {
                        if hmask[(x * K + y) * K + z] {
                            tri.push([x, K + y, 2 * K + z]);
                        }
                    }
                }
            }
            (p, Hypergraph3::from_edges(3 * K, tri).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn extending_a_tuple_shrinks_its_link(
        (p, h) in instance(),
        tuple in proptest::collection::vec(0..K, 0..3),
        x in 0..K,
    ) {
        let small = joint_link(&h, &tuple, &p).unwrap();
        let mut longer = tuple.clone();
        longer.push(x);
        let big = joint_link(&h, &longer, &p).unwrap();
        prop_assert!(big.is_subgraph_of(&small));
    }

    #[test]
    fn link_never_exceeds_pair_edges((p, h) in instance(), tuple in proptest::collection::vec(0..K, 0..3)) {
        let ps = parts();
        let l = joint_link(&h, &tuple, &p).unwrap();
        prop_assert!(l.edge_count() <= p.edges_between(&ps[1], &ps[2]));
    }

    #[test]
    fn min_degree_is_min_link_size((_p, h) in instance()) {
        let min_link = (0..h.n())
            .map(|v| link_graph(&h, v, None).unwrap().edge_count())
            .min()
            .unwrap();
        prop_assert_eq!(h.min_degree(), min_link);
    }

    #[test]
    fn census_identity_holds(
        mask in proptest::collection::vec(any::<bool>(), 455),
        t in 1usize..4,
        ulen in 3usize..15,
    ) {
        let all: Vec<[Vertex; 3]> = Hypergraph3::complete(15).edges().to_vec();
        let h = Hypergraph3::from_edges(15, all.into_iter().zip(mask).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap();
        let u: Vec<Vertex> = (0..ulen).collect();
        let c = weak_tuple_census(&h, &u, t, 1).unwrap();
        prop_assert_eq!(c.sum_identity_lhs, c.sum_identity_rhs);
    }

    #[test]
    fn band_fractions_are_fractions((p, h) in instance(), t in 0usize..3) {
        let r = tuple_band_audit(&h, &p, t, &linclique::rational::rat(1, 2), &linclique::rational::rat(1, 2), 0.1, TupleMode::Exhaustive).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.bad_fraction_low));
        prop_assert!((0.0..=1.0).contains(&r.bad_fraction_high));
        prop_assert!(r.bad_fraction_low + r.bad_fraction_high <= 1.0 + 1e-12);
        prop_assert_eq!(r.tuples, (K as u64).pow(t as u32));
    }
}

#[test]
fn complete_instance_has_full_links() {
    let p = Graph2::complete_multipartite(3 * K, &parts()).unwrap();
    let h = Hypergraph3::from_edges(3 * K, triangles(&p)).unwrap();
    let l = joint_link(&h, &[0, 1, 2], &p).unwrap();
    assert_eq!(l.edge_count(), K * K);
    assert_eq!(
        joint_neighborhood(&p, &[0, 4], Side::Y).unwrap(),
        parts()[1]
    );
}
