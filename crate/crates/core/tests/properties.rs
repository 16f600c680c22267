use std::collections::BTreeSet;

use polybase::corpus::{random_direct_sum, random_graphic, random_order, random_partition, random_table, rng, sample_target, uniform};
use polybase::lp::{affine_rank, build_intersection_system, find_vertex, rank, LpOutcome, RationalPoint};
use polybase::oracle::{enumerate_base_points, enumerate_vertices, min_decomposition_size_among, OracleBudget};
use polybase::polytope::{greedy_vertex, in_base_polytope, tight_sets};
use polybase::{
    decompose, dimension, merge_direct_sum, split_into_k_bases, verify, IntVector, SubmodularFn, SubsetMask,
    Term, WeightedDecomposition,
};
use proptest::prelude::*;
use rand::Rng;

fn build(kind: u8, n: usize, seed: u64) -> SubmodularFn {
    let mut r = rng(seed);
    match kind % 5 {
        0 => uniform(n, r.gen_range(0..=n as i64)),
        1 => random_partition(&mut r, n),
        2 => random_graphic(&mut r, n),
        3 if n >= 2 => random_direct_sum(&mut r, n),
        _ => random_table(&mut r, n),
    }
}

fn submodular(max_n: usize) -> impl Strategy<Value = SubmodularFn> {
    (any::<u8>(), 1..=max_n, any::<u64>()).prop_map(|(kind, n, seed)| build(kind, n, seed))
}

fn points(f: &SubmodularFn) -> BTreeSet<IntVector> {
    enumerate_base_points(f, &OracleBudget::default()).unwrap().as_set()
}

fn rational(p: &IntVector) -> RationalPoint {
    RationalPoint::from_ints(p)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn generated_functions_are_submodular(f in submodular(6)) {
        prop_assert!(f.is_submodular(), "{f}");
    }

    #[test]
    fn dual_is_an_involution(f in submodular(6)) {
        prop_assert!(f.dual().dual().same_values(&f));
        prop_assert!(f.dual().is_submodular());
        prop_assert_eq!(f.dual().total(), -f.total());
    }

    #[test]
    fn materialize_and_scale_agree(f in submodular(6), r in 1i64..5) {
        prop_assert!(f.materialize().same_values(&f));
        let g = f.scale(r).unwrap();
        for m in SubsetMask::all(f.n()) {
            prop_assert_eq!(g.value(m), r * f.value(m));
        }
    }

    #[test]
    fn reduce_matches_its_definition(f in submodular(5), seed in any::<u64>()) {
        let (n, mut r) = (f.n(), rng(seed));
        let a = IntVector((0..n).map(|_| r.gen_range(-2..=3)).collect());
        let g = f.reduce(a.clone()).unwrap();
        prop_assert!(g.is_submodular());
        for u in SubsetMask::all(n) {
            let best = u.submasks().map(|t| f.value(t) + a.sum_over(u.minus(t))).min().unwrap();
            prop_assert_eq!(g.value(u), best, "U = {:?}", u);
        }
    }

    #[test]
    fn reduction_clips_the_base_polytope(f in submodular(4), seed in any::<u64>()) {
        // B_{f|a} = B_f ∩ {x <= a} whenever the right side is nonempty.
        let (n, mut r) = (f.n(), rng(seed));
        let base = points(&f);
        let a = IntVector((0..n).map(|_| r.gen_range(-1..=2)).collect());
        let clipped: BTreeSet<IntVector> =
            base.iter().filter(|x| (0..n).all(|i| x[i] <= a[i])).cloned().collect();
        prop_assume!(!clipped.is_empty());
        prop_assert_eq!(points(&f.reduce(a).unwrap()), clipped);
    }

    #[test]
    fn shift_translates_and_dual_negates(f in submodular(4), seed in any::<u64>()) {
        let (n, mut r) = (f.n(), rng(seed));
        let a = IntVector((0..n).map(|_| r.gen_range(-3..=3)).collect());
        let base = points(&f);
        let shifted: BTreeSet<IntVector> = base.iter().map(|x| x + &a).collect();
        prop_assert_eq!(points(&f.shift(a).unwrap()), shifted);
        let negated: BTreeSet<IntVector> = base.iter().map(|x| x.scaled(-1)).collect();
        prop_assert_eq!(points(&f.dual()), negated);
    }

    #[test]
    fn greedy_vertices_are_bases(f in submodular(7), seed in any::<u64>()) {
        let order = random_order(&mut rng(seed), f.n());
        let x = greedy_vertex(&f, &order).unwrap();
        prop_assert!(in_base_polytope(&f, &x));
        // Prefixes of the order are tight.
        let mut prefix = SubsetMask::EMPTY;
        for &i in &order {
            prefix = prefix.with(i);
            prop_assert_eq!(x.sum_over(prefix), f.value(prefix));
        }
    }

    #[test]
    fn tight_sets_are_tight_on_every_vertex(f in submodular(5)) {
        let vertices = enumerate_vertices(&f, &OracleBudget::default()).unwrap();
        let by_definition: Vec<SubsetMask> = SubsetMask::all(f.n())
            .filter(|&u| vertices.points.iter().all(|x| x.sum_over(u) == f.value(u)))
            .collect();
        let tight = tight_sets(&f);
        prop_assert_eq!(&tight, &by_definition);
        for &a in &tight {
            for &b in &tight {
                prop_assert!(tight.contains(&a.union(b)) && tight.contains(&a.intersection(b)));
            }
        }
    }

    #[test]
    fn dimension_is_the_affine_rank_of_the_vertices(f in submodular(5)) {
        let vertices = enumerate_vertices(&f, &OracleBudget::default()).unwrap();
        let pts: Vec<RationalPoint> = vertices.points.iter().map(rational).collect();
        prop_assert_eq!(affine_rank(&pts).unwrap(), dimension(&f));
    }

    #[test]
    fn lp_agrees_with_enumeration(f in submodular(4), g in submodular(4), seed in any::<u64>()) {
        prop_assume!(f.n() == g.n());
        // Translate g so the totals match and the intersection is often nonempty.
        let n = f.n();
        let mut r = rng(seed);
        let anchor = greedy_vertex(&f, &random_order(&mut r, n)).unwrap();
        let other = greedy_vertex(&g, &random_order(&mut r, n)).unwrap();
        let mut a = &anchor - &other;
        a.0[r.gen_range(0..n)] += r.gen_range(-1..=1);
        let g = g.shift(a).unwrap();
        let common: Vec<IntVector> = points(&f).intersection(&points(&g)).cloned().collect();
        let system = build_intersection_system(&f, &g).unwrap();
        let outcome = find_vertex(&system).unwrap();
        prop_assert_eq!(&find_vertex(&system).unwrap(), &outcome, "deterministic");
        match outcome {
            LpOutcome::Infeasible => prop_assert!(common.is_empty()),
            LpOutcome::Vertex(p) => {
                prop_assert!(system.satisfied_by(&p));
                prop_assert_eq!(rank(&system.active_normals(&p)), n, "a vertex");
                prop_assert!(p.0.iter().all(|c| c.is_integer()), "integral");
                let x = IntVector(p.0.iter().map(|c| c.to_integer().try_into().unwrap()).collect());
                prop_assert!(common.contains(&x));
            }
        }
    }

    #[test]
    fn split_gives_k_bases(f in submodular(6), k in 1i64..8, seed in any::<u64>()) {
        let w = sample_target(&f, k, &mut rng(seed));
        let parts = split_into_k_bases(&f, &w, k).unwrap();
        prop_assert_eq!(parts.len() as i64, k);
        let mut sum = IntVector::zeros(f.n());
        for p in &parts {
            prop_assert!(in_base_polytope(&f, p));
            sum = &sum + p;
        }
        prop_assert_eq!(sum, w);
    }

    #[test]
    fn decompositions_verify_and_respect_the_bound(f in submodular(7), k in 1i64..20, seed in any::<u64>()) {
        let w = sample_target(&f, k, &mut rng(seed));
        let (d, trace) = decompose(&f, &w, k).unwrap();
        let report = verify(&f, &d);
        prop_assert!(report.ok, "{:?}", report.failures);
        prop_assert!(d.distinct() <= dimension(&f) + 1);
        prop_assert_eq!(trace.root.replay().unwrap(), d.clone());
        prop_assert_eq!(decompose(&f, &w, k).unwrap().0, d, "deterministic");
    }

    #[test]
    fn oracle_minimum_never_beats_the_engine_bound(f in submodular(4), k in 1i64..5, seed in any::<u64>()) {
        let budget = OracleBudget::default();
        let base = enumerate_base_points(&f, &budget).unwrap();
        prop_assume!(base.len() <= budget.max_points);
        let w = sample_target(&f, k, &mut rng(seed));
        let (d, _) = decompose(&f, &w, k).unwrap();
        let min = min_decomposition_size_among(&base.points, &w, k).unwrap();
        prop_assert!(min <= d.distinct());
        prop_assert!(d.distinct() <= dimension(&f) + 1);
    }

    #[test]
    fn merge_respects_the_breakpoint_bound(k in 1i64..12, sizes in prop::collection::vec(1usize..5, 1..4), seed in any::<u64>()) {
        let mut r = rng(seed);
        let parts: Vec<WeightedDecomposition> = sizes
            .iter()
            .enumerate()
            .map(|(block, &s)| {
                let s = s.min(k as usize);
                let mut cuts: BTreeSet<i64> = BTreeSet::new();
                while cuts.len() < s - 1 {
                    cuts.insert(r.gen_range(1..k));
                }
                let mut bounds: Vec<i64> = vec![0];
                bounds.extend(cuts);
                bounds.push(k);
                let terms: Vec<Term> = bounds
                    .windows(2)
                    .enumerate()
                    .map(|(i, b)| Term { weight: b[1] - b[0], point: IntVector(vec![(block * 10 + i) as i64]) })
                    .collect();
                let target = IntVector(vec![terms.iter().map(|t| t.weight * t.point[0]).sum()]);
                WeightedDecomposition { k, target, terms }
            })
            .collect();
        let merged = merge_direct_sum(&parts).unwrap();
        let total: usize = parts.iter().map(|p| p.distinct()).sum();
        prop_assert!(merged.distinct() < total + 1 - parts.len() + 1);
        prop_assert_eq!(merged.terms.iter().map(|t| t.weight).sum::<i64>(), k);
        let target = IntVector(parts.iter().map(|p| p.target[0]).collect());
        prop_assert_eq!(merged.weighted_sum(), target);
    }
}
