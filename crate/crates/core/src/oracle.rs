//! Exhaustive oracles for small instances: integer points by box scan, vertices
//! by greedy over all orders, and minimum decomposition sizes by search.
//! Nothing here calls the LP or the decomposition engine.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground::IntVector;
use crate::par;
use crate::polytope::{bounding_box, greedy_vertex, in_base_polytope};
use crate::submodular::SubmodularFn;

/// Limits for the exhaustive searches. Exceeding one is an error, never a truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    /// Maximum number of lattice points in a scanned box.
    pub box_volume: u64,
    /// Maximum number of base points fed to the decomposition search.
    pub max_points: usize,
    /// Maximum multiplicity for the decomposition search.
    pub max_k: i64,
    /// Maximum ground-set size for permutation enumeration.
    pub max_vertices_n: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { box_volume: 10_000_000, max_points: 20, max_k: 6, max_vertices_n: 7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    BoxScan,
    GreedyOrders,
}

/// Distinct points in increasing lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    pub points: Vec<IntVector>,
    pub provenance: Provenance,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: &IntVector) -> bool {
        self.points.binary_search(x).is_ok()
    }

    pub fn as_set(&self) -> BTreeSet<IntVector> {
        self.points.iter().cloned().collect()
    }
}

/// All integer points of `B_f`, by scanning its bounding box.
pub fn enumerate_base_points(f: &SubmodularFn, budget: &OracleBudget) -> Result<PointSet> {
    let (lo, hi) = bounding_box(f);
    let n = f.n();
    let mut widths = Vec::with_capacity(n);
    let mut volume: u64 = 1;
    for i in 0..n {
        if hi[i] < lo[i] {
            return Ok(PointSet { points: Vec::new(), provenance: Provenance::BoxScan });
        }
        let w = (hi[i] - lo[i] + 1) as u64;
        widths.push(w);
        volume = volume.checked_mul(w).filter(|&v| v <= budget.box_volume).ok_or_else(|| {
            Error::budget(format!("bounding box exceeds {} points", budget.box_volume))
        })?;
    }
    let total = f.total();
    // Coordinate 0 is the most significant digit, so the scan is lexicographic.
    let points = par::filter_map_range(0..volume, |mut idx| {
        let mut x = IntVector::zeros(n);
        for i in (0..n).rev() {
            x[i] = lo[i] + (idx % widths[i]) as i64;
            idx /= widths[i];
        }
        (x.total() == total && in_base_polytope(f, &x)).then_some(x)
    });
    Ok(PointSet { points, provenance: Provenance::BoxScan })
}

/// Greedy vertices over every ordering of the ground set.
pub fn enumerate_vertices(f: &SubmodularFn, budget: &OracleBudget) -> Result<PointSet> {
    let n = f.n();
    if n > budget.max_vertices_n {
        return Err(Error::budget(format!(
            "{n}! orderings exceed the vertex budget (n <= {})",
            budget.max_vertices_n
        )));
    }
    let set: BTreeSet<IntVector> = (0..n)
        .permutations(n)
        .map(|order| greedy_vertex(f, &order).expect("permutation"))
        .collect();
    Ok(PointSet { points: set.into_iter().collect(), provenance: Provenance::GreedyOrders })
}

/// Smallest number of distinct points of `points` whose positive integer
/// combination with total weight `k` equals `w`; `None` if there is none.
pub fn min_decomposition_size_among(points: &[IntVector], w: &IntVector, k: i64) -> Option<usize> {
    if k < 1 || points.is_empty() {
        return None;
    }
    let n = w.len();
    let lo: Vec<i64> = (0..n).map(|i| points.iter().map(|p| p[i]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..n).map(|i| points.iter().map(|p| p[i]).max().unwrap()).collect();
    let search = Search { points, lo: &lo, hi: &hi };
    let max_slots = points.len().min(k as usize);
    (1..=max_slots).find(|&slots| search.dfs(0, &mut w.clone(), k, slots))
}

struct Search<'a> {
    points: &'a [IntVector],
    lo: &'a [i64],
    hi: &'a [i64],
}

impl Search<'_> {
    fn feasible(&self, rest: &IntVector, k: i64) -> bool {
        (0..rest.len()).all(|i| rest[i] >= k * self.lo[i] && rest[i] <= k * self.hi[i])
    }

    fn dfs(&self, start: usize, rest: &mut IntVector, k: i64, slots: usize) -> bool {
        if k == 0 {
            return rest.0.iter().all(|&v| v == 0);
        }
        if slots == 0 {
            return false;
        }
        for i in start..self.points.len() {
            let p = &self.points[i];
            for lambda in (1..=k).rev() {
                if slots == 1 && lambda != k {
                    break;
                }
                for j in 0..rest.len() {
                    rest[j] -= lambda * p[j];
                }
                let ok = self.feasible(rest, k - lambda)
                    && self.dfs(i + 1, rest, k - lambda, slots - 1);
                for j in 0..rest.len() {
                    rest[j] += lambda * p[j];
                }
                if ok {
                    return true;
                }
            }
        }
        false
    }
}

/// Minimum number of distinct integer bases of `B_f` needed to write `w` with
/// total weight `k`, or `None` when `w` is not such a combination.
pub fn min_decomposition_size(
    f: &SubmodularFn,
    w: &IntVector,
    k: i64,
    budget: &OracleBudget,
) -> Result<Option<usize>> {
    if k > budget.max_k {
        return Err(Error::budget(format!("k = {k} exceeds the search budget {}", budget.max_k)));
    }
    let points = enumerate_base_points(f, budget)?;
    if points.len() > budget.max_points {
        return Err(Error::budget(format!(
            "{} base points exceed the search budget {}",
            points.len(),
            budget.max_points
        )));
    }
    Ok(min_decomposition_size_among(&points.points, w, k))
}

/// Lower bound on the Carathéodory rank of `B_f ∩ Z^E` from every multiplicity up to `k_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrBound {
    pub value: usize,
    pub k_max: i64,
    /// A target attaining the bound, and its multiplicity.
    pub witness: (IntVector, i64),
}

/// Maximum over `k <= k_max` and all `w ∈ k·B_f ∩ Z^E` of the minimum
/// decomposition size. Targets come from a box scan of `k·B_f`, not from sums
/// of bases, so a target with no decomposition is reported as an error.
pub fn cr_exact(f: &SubmodularFn, k_max: i64, budget: &OracleBudget) -> Result<CrBound> {
    if k_max < 1 {
        return Err(Error::usage("k_max must be positive"));
    }
    if k_max > budget.max_k {
        return Err(Error::budget(format!("k_max = {k_max} exceeds the search budget {}", budget.max_k)));
    }
    let points = enumerate_base_points(f, budget)?;
    if points.len() > budget.max_points {
        return Err(Error::budget(format!(
            "{} base points exceed the search budget {}",
            points.len(),
            budget.max_points
        )));
    }
    let mut best: Option<CrBound> = None;
    for k in 1..=k_max {
        let targets = enumerate_base_points(&f.scale(k)?, budget)?;
        let sizes = par::map(&targets.points, |w| min_decomposition_size_among(&points.points, w, k));
        for (w, size) in targets.points.iter().zip(sizes) {
            let size = size.ok_or_else(|| {
                Error::invariant(format!("{w:?} in {k}·B_f is not a sum of {k} integer bases"))
            })?;
            if best.as_ref().is_none_or(|b| size > b.value) {
                best = Some(CrBound { value: size, k_max, witness: (w.clone(), k) });
            }
        }
    }
    best.ok_or_else(|| Error::invariant("B_f has no integer points"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::GroundSet;

    fn uniform(r: i64, n: usize) -> SubmodularFn {
        SubmodularFn::uniform(GroundSet::numbered(n).unwrap(), r).unwrap()
    }

    fn k3() -> SubmodularFn {
        SubmodularFn::graphic(GroundSet::numbered(3).unwrap(), 3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn pts(v: &[&[i64]]) -> Vec<IntVector> {
        v.iter().map(|p| IntVector(p.to_vec())).collect()
    }

    #[test]
    fn base_points_examples() {
        let b = OracleBudget::default();
        assert_eq!(enumerate_base_points(&uniform(1, 2), &b).unwrap().points, pts(&[&[0, 1], &[1, 0]]));
        let u24 = enumerate_base_points(&uniform(2, 4), &b).unwrap();
        assert_eq!(u24.len(), 6);
        assert!(u24.points.iter().all(|p| p.total() == 2 && p.0.iter().all(|&c| c == 0 || c == 1)));
        assert_eq!(
            enumerate_base_points(&k3(), &b).unwrap().points,
            pts(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]])
        );
    }

    #[test]
    fn budget_is_enforced() {
        let tight = OracleBudget { box_volume: 10, ..OracleBudget::default() };
        assert!(matches!(enumerate_base_points(&uniform(2, 4), &tight), Err(Error::Budget(_))));
        let narrow = OracleBudget { max_vertices_n: 3, ..OracleBudget::default() };
        assert!(matches!(enumerate_vertices(&uniform(2, 4), &narrow), Err(Error::Budget(_))));
        assert!(matches!(
            min_decomposition_size(&uniform(1, 2), &IntVector(vec![4, 3]), 7, &OracleBudget::default()),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn vertices_examples() {
        let b = OracleBudget::default();
        assert_eq!(enumerate_vertices(&uniform(2, 3), &b).unwrap().len(), 3);
        assert_eq!(enumerate_vertices(&uniform(1, 1), &b).unwrap().len(), 1);
    }

    #[test]
    fn min_size_examples() {
        let b = OracleBudget::default();
        let v = |x: &[i64]| IntVector(x.to_vec());
        assert_eq!(min_decomposition_size(&uniform(1, 2), &v(&[1, 1]), 2, &b).unwrap(), Some(2));
        assert_eq!(min_decomposition_size(&k3(), &v(&[2, 2, 2]), 3, &b).unwrap(), Some(3));
        assert_eq!(min_decomposition_size(&k3(), &v(&[3, 3, 0]), 3, &b).unwrap(), Some(1));
        assert_eq!(min_decomposition_size(&k3(), &v(&[3, 2, 1]), 3, &b).unwrap(), Some(2));
        assert_eq!(min_decomposition_size(&k3(), &v(&[3, 3, 1]), 3, &b).unwrap(), None);
    }

    #[test]
    fn cr_examples() {
        let b = OracleBudget::default();
        assert_eq!(cr_exact(&uniform(1, 2), 2, &b).unwrap().value, 2);
        assert_eq!(cr_exact(&k3(), 3, &b).unwrap().value, 3);
        assert_eq!(cr_exact(&uniform(1, 1), 3, &b).unwrap().value, 1);
    }

    #[test]
    fn direct_sum_needs_larger_k_to_attain() {
        // U_{1,2} ⊕ U_{1,3} has dim 3; every target with k <= 5 aligns the
        // blocks' breakpoints, and k = 6 is the first multiplicity forcing 4 bases.
        let f = SubmodularFn::partition(
            GroundSet::numbered(5).unwrap(),
            vec![crate::ground::SubsetMask(0b00011), crate::ground::SubsetMask(0b11100)],
            vec![1, 1],
        )
        .unwrap();
        let b = OracleBudget::default();
        assert_eq!(cr_exact(&f, 5, &b).unwrap().value, 3);
        let cr = cr_exact(&f, 6, &b).unwrap();
        assert_eq!(cr.value, 4);
        assert_eq!(cr.witness.1, 6);
    }
}
