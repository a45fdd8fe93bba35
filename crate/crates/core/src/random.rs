//! Seeded generators: binomial 3-graphs, perturbed unions, random equitable
//! partitions and uniform random pair partitions.
//!
//! Every generator takes an [`RngSpec`]; trials derive independent substreams
//! from a trial index so results do not depend on scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypergraph::{Hypergraph3, PairPartition, VertexPartition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngSpec {
            master_seed,
            stream_id,
        }
    }

    pub fn from_seed(master_seed: u64) -> Self {
        Self::new(master_seed, 0)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.master_seed);
        r.set_stream(self.stream_id);
        r
    }

    /// A child stream determined only by `(self, index)`.
    pub fn substream(&self, index: u64) -> RngSpec {
        RngSpec {
            master_seed: self.master_seed,
            stream_id: splitmix(
                splitmix(self.master_seed ^ self.stream_id.rotate_left(17)) ^ index,
            ),
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("probability {} outside [0, 1]", p));
    }
    Ok(())
}

/// `ℍ(n, p)`: triples are visited in lexicographic order and kept when a
/// uniform draw falls below `p`, so the same stream couples all values of `p`.
pub fn sample_binomial_3graph(n: usize, p: f64, spec: &RngSpec) -> Result<Hypergraph3> {
    check_p(p)?;
    let mut rng = spec.rng();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push([a, b, c]);
                }
            }
        }
    }
    Ok(Hypergraph3::from_sorted_unique(n, edges))
}

/// `Γ = H ∪ R`.
pub fn perturb(h: &Hypergraph3, r: &Hypergraph3) -> Result<Hypergraph3> {
    h.union(r)
}

pub fn random_equitable_partition(n: usize, t: usize, spec: &RngSpec) -> Result<VertexPartition> {
    if t == 0 || t > n {
        return invalid(format!("cannot split {} vertices into {} parts", n, t));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut spec.rng());
    let shape = VertexPartition::contiguous(n, t)?;
    let parts = shape
        .parts()
        .iter()
        .map(|p| p.iter().map(|&i| perm[i]).collect())
        .collect();
    VertexPartition::new(n, parts)
}

/// Colours every cross pair uniformly from `ℓ` colours; part pairs are visited
/// in order, then `x ∈ V_i`, `y ∈ V_j` ascending.
pub fn random_pair_partition(
    base: &VertexPartition,
    ell: usize,
    spec: &RngSpec,
) -> Result<PairPartition> {
    if ell == 0 {
        return invalid("ℓ must be at least 1");
    }
    let n = base.n();
    let t = base.num_parts();
    let mut rng = spec.rng();
    let mut labels = vec![0u32; n * n];
    for i in 0..t {
        for j in i + 1..t {
            for &x in base.part(i) {
                for &y in base.part(j) {
                    let c = rng.gen_range(0..ell as u32);
                    labels[x * n + y] = c;
                    labels[y * n + x] = c;
                }
            }
        }
    }
    PairPartition::from_fn(base.clone(), |u, v| labels[u * n + v], |_, _| ell as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        let s = RngSpec::from_seed(1);
        assert!(sample_binomial_3graph(8, 0.0, &s).unwrap().is_empty());
        assert_eq!(sample_binomial_3graph(8, 1.0, &s).unwrap().edge_count(), 56);
        assert!(sample_binomial_3graph(8, 1.5, &s).is_err());
    }

    #[test]
    fn mean_edge_count() {
        let base = RngSpec::from_seed(2024);
        let trials = 10_000;
        let total: usize = (0..trials)
            .map(|i| {
                sample_binomial_3graph(10, 0.3, &base.substream(i))
                    .unwrap()
                    .edge_count()
            })
            .sum();
        let mean = total as f64 / trials as f64;
        let se = (120.0f64 * 0.3 * 0.7).sqrt() / (trials as f64).sqrt();
        assert!((mean - 36.0).abs() < 3.0 * se, "mean {}", mean);
    }

    #[test]
    fn coupling_is_monotone() {
        let s = RngSpec::new(5, 77);
        let lo = sample_binomial_3graph(12, 0.2, &s).unwrap();
        let hi = sample_binomial_3graph(12, 0.5, &s).unwrap();
        assert!(lo.edges().iter().all(|e| hi.has_edge(e)));
    }

    #[test]
    fn determinism_and_distinct_streams() {
        let s = RngSpec::new(9, 3);
        assert_eq!(
            sample_binomial_3graph(10, 0.4, &s).unwrap(),
            sample_binomial_3graph(10, 0.4, &s).unwrap()
        );
        assert_ne!(s.substream(0), s.substream(1));
        assert_ne!(
            sample_binomial_3graph(10, 0.4, &s.substream(0)).unwrap(),
            sample_binomial_3graph(10, 0.4, &s.substream(1)).unwrap()
        );
    }

    #[test]
    fn union_identities() {
        let s = RngSpec::from_seed(8);
        for i in 0..20 {
            let h = sample_binomial_3graph(9, 0.3, &s.substream(2 * i)).unwrap();
            let r = sample_binomial_3graph(9, 0.3, &s.substream(2 * i + 1)).unwrap();
            let g = perturb(&h, &r).unwrap();
            assert_eq!(
                g.edge_count(),
                h.edge_count() + r.edge_count() - h.intersection_count(&r)
            );
            assert_eq!(g, perturb(&r, &h).unwrap());
            assert_eq!(perturb(&g, &g).unwrap(), g);
        }
        let h = sample_binomial_3graph(9, 0.3, &s).unwrap();
        assert_eq!(perturb(&h, &Hypergraph3::empty(9)).unwrap(), h);
        assert!(perturb(&h, &Hypergraph3::empty(8)).is_err());
    }

    #[test]
    fn equitable_partitions() {
        let s = RngSpec::from_seed(4);
        let v = random_equitable_partition(10, 3, &s).unwrap();
        let mut sizes = v.sizes();
        sizes.sort();
        assert_eq!(sizes, vec![3, 3, 4]);
        assert_eq!(
            random_equitable_partition(5, 5, &s).unwrap().sizes(),
            vec![1; 5]
        );
        assert_eq!(
            random_equitable_partition(5, 1, &s).unwrap().sizes(),
            vec![5]
        );
        assert!(random_equitable_partition(3, 4, &s).is_err());
    }

    #[test]
    fn pair_partitions() {
        let s = RngSpec::from_seed(6);
        let v = VertexPartition::contiguous(300, 3).unwrap();
        let b = random_pair_partition(&v, 1, &s).unwrap();
        assert_eq!(b.cell(0, 1, 0).edge_count(), 100 * 100);
        for ell in 2..=4 {
            let b = random_pair_partition(&v, ell, &s).unwrap();
            assert_eq!(b.check_equitable().unwrap(), ell);
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let sizes = b.cell_sizes(i, j);
                assert_eq!(sizes.iter().sum::<usize>(), 100 * 100);
                for sz in sizes {
                    let d = sz as f64 / 10_000.0;
                    assert!((d - 1.0 / ell as f64).abs() < 0.05);
                }
            }
        }
    }
}
