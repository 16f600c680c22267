//! Seeded instance families for tests, benches and corpus runs: uniform,
//! partition and graphic matroid ranks, random explicit submodular tables,
//! direct sums, and a few wrapped constructions.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::ground::{GroundSet, IntVector, SubsetMask};
use crate::polytope::greedy_vertex;
use crate::submodular::SubmodularFn;

#[derive(Clone, Debug)]
pub struct CorpusInstance {
    pub name: String,
    pub f: SubmodularFn,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ground(n: usize) -> GroundSet {
    GroundSet::numbered(n).expect("corpus sizes are within limits")
}

pub fn uniform(n: usize, r: i64) -> SubmodularFn {
    SubmodularFn::uniform(ground(n), r).expect("nonnegative rank")
}

pub fn random_partition<R: Rng>(rng: &mut R, n: usize) -> SubmodularFn {
    let nblocks = rng.gen_range(1..=n.min(3));
    let mut blocks = vec![SubsetMask::EMPTY; nblocks];
    for e in 0..n {
        let b = rng.gen_range(0..nblocks);
        blocks[b] = blocks[b].with(e);
    }
    blocks.retain(|b| !b.is_empty());
    let caps = blocks.iter().map(|b| rng.gen_range(0..=b.len() as i64)).collect();
    SubmodularFn::partition(ground(n), blocks, caps).expect("valid partition")
}

pub fn random_graphic<R: Rng>(rng: &mut R, n: usize) -> SubmodularFn {
    let vertices = rng.gen_range(2..=5usize);
    let edges = (0..n)
        .map(|_| (rng.gen_range(0..vertices), rng.gen_range(0..vertices)))
        .collect();
    SubmodularFn::graphic(ground(n), vertices, edges).expect("valid graph")
}

/// `Σ c_j·min(|U ∩ S_j|, cap_j) + Σ d_j·[U ∩ T_j ≠ ∅] + a(U)`, materialized.
pub fn random_table<R: Rng>(rng: &mut R, n: usize) -> SubmodularFn {
    let full = SubsetMask::full(n);
    let random_subset = |rng: &mut R| loop {
        let m = SubsetMask(rng.gen_range(1..=full.0));
        if !m.is_empty() {
            break m;
        }
    };
    let concave: Vec<(SubsetMask, i64, i64)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let s = random_subset(rng);
            (s, rng.gen_range(1..=2), rng.gen_range(1..=s.len() as i64))
        })
        .collect();
    let cover: Vec<(SubsetMask, i64)> =
        (0..rng.gen_range(0..=2)).map(|_| (random_subset(rng), rng.gen_range(1..=2))).collect();
    let modular: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
    let values = SubsetMask::all(n)
        .map(|u| {
            let a: i64 = concave
                .iter()
                .map(|(s, c, cap)| c * (u.intersection(*s).len() as i64).min(*cap))
                .sum();
            let b: i64 = cover
                .iter()
                .filter(|(t, _)| !u.intersection(*t).is_empty())
                .map(|(_, d)| d)
                .sum();
            a + b + u.iter().map(|i| modular[i]).sum::<i64>()
        })
        .collect();
    SubmodularFn::table(ground(n), values).expect("table size matches")
}

/// Direct sum of two random tables on a random split of the ground set.
pub fn random_direct_sum<R: Rng>(rng: &mut R, n: usize) -> SubmodularFn {
    assert!(n >= 2);
    let full = SubsetMask::full(n);
    let left = loop {
        let m = SubsetMask(rng.gen_range(1..full.0));
        if !m.is_empty() && m != full {
            break m;
        }
    };
    let right = full.minus(left);
    let lp: Vec<usize> = left.iter().collect();
    let rp: Vec<usize> = right.iter().collect();
    let fl = random_table(rng, lp.len());
    let fr = random_table(rng, rp.len());
    let values = SubsetMask::all(n)
        .map(|u| fl.value(u.gather(&lp)) + fr.value(u.gather(&rp)))
        .collect();
    SubmodularFn::table(ground(n), values).expect("table size matches")
}

pub fn random_order<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// Sum of `k` greedy vertices for random orders; always an integer point of `k·B_f`.
pub fn sample_target<R: Rng>(f: &SubmodularFn, k: i64, rng: &mut R) -> IntVector {
    let mut w = IntVector::zeros(f.n());
    for _ in 0..k {
        let x = greedy_vertex(f, &random_order(rng, f.n())).expect("permutation");
        w = &w + &x;
    }
    w
}

/// Mixed corpus with `n ∈ [2, 8]`, at least 200 instances.
pub fn standard_corpus(seed: u64) -> Vec<CorpusInstance> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    for n in 2..=8usize {
        for r in 1..n as i64 {
            out.push(CorpusInstance { name: format!("uniform_{r}_{n}"), f: uniform(n, r) });
        }
        for i in 0..6 {
            out.push(CorpusInstance { name: format!("partition_n{n}_{i}"), f: random_partition(&mut rng, n) });
            out.push(CorpusInstance { name: format!("graphic_n{n}_{i}"), f: random_graphic(&mut rng, n) });
        }
        for i in 0..14 {
            out.push(CorpusInstance { name: format!("table_n{n}_{i}"), f: random_table(&mut rng, n) });
        }
        let base = random_table(&mut rng, n);
        out.push(CorpusInstance { name: format!("dual_table_n{n}"), f: base.dual() });
        let shift = IntVector((0..n).map(|_| rng.gen_range(-3..=3)).collect());
        out.push(CorpusInstance {
            name: format!("shifted_graphic_n{n}"),
            f: random_graphic(&mut rng, n).shift(shift).expect("length matches"),
        });
    }
    out
}

/// Small instances (`n <= 5`) with few base points, for the exhaustive oracles.
pub fn tiny_corpus() -> Vec<CorpusInstance> {
    let g = ground;
    let graphic = |n: usize, v: usize, e: &[(usize, usize)]| {
        SubmodularFn::graphic(g(n), v, e.to_vec()).expect("valid graph")
    };
    let part = |n: usize, blocks: &[u32], caps: &[i64]| {
        SubmodularFn::partition(g(n), blocks.iter().map(|&b| SubsetMask(b)).collect(), caps.to_vec())
            .expect("valid partition")
    };
    let table = |n: usize, v: &[i64]| SubmodularFn::table(g(n), v.to_vec()).expect("table");
    vec![
        ("single", uniform(1, 1)),
        ("u_1_2", uniform(1, 2)),
        ("u_1_3", uniform(1, 3)),
        ("u_2_3", uniform(2, 3)),
        ("u_2_4", uniform(2, 4)),
        ("u_1_4", uniform(1, 4)),
        ("k3", graphic(3, 3, &[(0, 1), (1, 2), (0, 2)])),
        ("path_plus_parallel", graphic(3, 3, &[(0, 1), (0, 1), (1, 2)])),
        ("two_pairs", part(4, &[0b0011, 0b1100], &[1, 1])),
        ("pair_and_triple", part(5, &[0b00011, 0b11100], &[1, 1])),
        ("modular", table(2, &[0, 2, -1, 1])),
        ("dual_u_1_3", uniform(1, 3).dual()),
        ("shifted_k3", graphic(3, 3, &[(0, 1), (1, 2), (0, 2)]).shift(IntVector(vec![1, -1, 2])).unwrap()),
        ("scaled_u_1_2", uniform(1, 2).scale(2).unwrap()),
    ]
    .into_iter()
    .map(|(name, f)| CorpusInstance { name: name.to_string(), f })
    .collect()
}
