//! Membership, greedy vertices, tight sets and face factorization for
//! extended polymatroids `EP_f` and base polytopes `B_f`.

use std::fmt;

use crate::error::{Error, Result};
use crate::ground::{IntVector, SubsetMask};
use crate::submodular::SubmodularFn;

/// Why a vector fails to lie in `B_f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipFailure {
    Length { got: usize, expected: usize },
    /// `x(U) > f(U)`.
    Subset { set: SubsetMask, lhs: i64, rhs: i64 },
    /// `x(E) != f(E)`.
    Total { got: i64, expected: i64 },
}

impl MembershipFailure {
    pub fn describe(&self, f: &SubmodularFn) -> String {
        match self {
            MembershipFailure::Length { got, expected } => {
                format!("vector has {got} coordinates, expected {expected}")
            }
            MembershipFailure::Subset { set, lhs, rhs } => {
                format!("x({}) = {lhs} > {rhs}", f.ground().format_mask(*set))
            }
            MembershipFailure::Total { got, expected } => {
                format!("x(E) = {got} but f(E) = {expected}")
            }
        }
    }
}

/// First `U` in increasing bitmask order with `x(U) > f(U)`.
pub fn extended_polymatroid_violation(f: &SubmodularFn, x: &IntVector) -> Option<SubsetMask> {
    assert_eq!(x.len(), f.n(), "vector length must match the ground set");
    let sums = x.subset_sums();
    SubsetMask::all(f.n()).find(|&m| sums[m.index()] > f.value(m))
}

pub fn in_extended_polymatroid(f: &SubmodularFn, x: &IntVector) -> bool {
    x.len() == f.n() && extended_polymatroid_violation(f, x).is_none()
}

pub fn check_base_membership(f: &SubmodularFn, x: &IntVector) -> Result<(), MembershipFailure> {
    if x.len() != f.n() {
        return Err(MembershipFailure::Length { got: x.len(), expected: f.n() });
    }
    if let Some(set) = extended_polymatroid_violation(f, x) {
        return Err(MembershipFailure::Subset { set, lhs: x.sum_over(set), rhs: f.value(set) });
    }
    let (got, expected) = (x.total(), f.total());
    if got != expected {
        return Err(MembershipFailure::Total { got, expected });
    }
    Ok(())
}

pub fn in_base_polytope(f: &SubmodularFn, x: &IntVector) -> bool {
    check_base_membership(f, x).is_ok()
}

/// Coordinatewise bounds `f(E) - f(E - e) <= x(e) <= f({e})` valid on `B_f`.
pub fn bounding_box(f: &SubmodularFn) -> (IntVector, IntVector) {
    let full = f.full();
    let total = f.total();
    let lower = (0..f.n()).map(|e| total - f.value(full.without(e))).collect();
    let upper = (0..f.n()).map(|e| f.value(SubsetMask::singleton(e))).collect();
    (IntVector(lower), IntVector(upper))
}

/// Greedy vertex: `x(e_i) = f({e_1..e_i}) - f({e_1..e_{i-1}})` along `order`.
pub fn greedy_vertex(f: &SubmodularFn, order: &[usize]) -> Result<IntVector> {
    let n = f.n();
    let mut seen = SubsetMask::EMPTY;
    for &e in order {
        if e >= n || seen.contains(e) {
            return Err(Error::usage(format!("order {order:?} is not a permutation of 0..{n}")));
        }
        seen = seen.with(e);
    }
    if seen != f.full() {
        return Err(Error::usage(format!("order {order:?} is not a permutation of 0..{n}")));
    }
    let mut x = IntVector::zeros(n);
    let mut prefix = SubsetMask::EMPTY;
    let mut prev = 0;
    for &e in order {
        prefix = prefix.with(e);
        let cur = f.value(prefix);
        x[e] = cur - prev;
        prev = cur;
    }
    Ok(x)
}

/// Sets tight on all of `B_f`: `f(U) + f(E \ U) = f(E)`, increasing bitmask order.
pub fn tight_sets(f: &SubmodularFn) -> Vec<SubsetMask> {
    let n = f.n();
    let total = f.total();
    SubsetMask::all(n)
        .filter(|&m| f.value(m) + f.value(m.complement(n)) == total)
        .collect()
}

/// Maximal chain `∅ = A_0 ⊂ A_1 ⊂ ... ⊂ A_t = E` in a union/intersection closed
/// family that contains `∅` and `E`. Each step moves to the smallest-bitmask
/// strict superset in the family, which is always inclusion-minimal.
pub fn maximal_chain(n: usize, family: &[SubsetMask]) -> Vec<SubsetMask> {
    let full = SubsetMask::full(n);
    let mut chain = vec![SubsetMask::EMPTY];
    let mut cur = SubsetMask::EMPTY;
    while cur != full {
        cur = family
            .iter()
            .copied()
            .filter(|&m| m != cur && cur.is_subset_of(m))
            .min()
            .expect("family must contain the full ground set");
        chain.push(cur);
    }
    chain
}

/// `dim B_f = |E| - t`, with `t` the length of a maximal tight chain.
pub fn dimension(f: &SubmodularFn) -> usize {
    let chain = maximal_chain(f.n(), &tight_sets(f));
    f.n() - (chain.len() - 1)
}

/// A face written as a direct sum of base polytopes on the blocks of a tight chain.
#[derive(Clone)]
pub struct FaceStructure {
    /// `∅ = A_0 ⊂ ... ⊂ A_t = E`.
    pub chain: Vec<SubsetMask>,
    /// `E_i = A_i \ A_{i-1}`.
    pub blocks: Vec<SubsetMask>,
    /// `f_i(U) = f(A_{i-1} ∪ U) - f(A_{i-1})` on `E_i`.
    pub block_fns: Vec<SubmodularFn>,
    pub dim: usize,
}

impl FaceStructure {
    fn from_chain(f: &SubmodularFn, chain: Vec<SubsetMask>) -> Self {
        let blocks: Vec<SubsetMask> = chain.windows(2).map(|w| w[1].minus(w[0])).collect();
        let block_fns = chain
            .windows(2)
            .map(|w| {
                f.block_restrict(w[0], w[1].minus(w[0]))
                    .expect("chain steps are nonempty and disjoint from their prefix")
            })
            .collect();
        let dim = f.n() - blocks.len();
        FaceStructure { chain, blocks, block_fns, dim }
    }

    pub fn t(&self) -> usize {
        self.blocks.len()
    }

    /// Ground positions of block `i`, increasing.
    pub fn positions(&self, i: usize) -> Vec<usize> {
        self.blocks[i].iter().collect()
    }
}

impl fmt::Debug for FaceStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FaceStructure")
            .field("chain", &self.chain)
            .field("blocks", &self.blocks)
            .field("dim", &self.dim)
            .finish()
    }
}

/// `B_f` itself as a direct sum over a maximal chain of tight sets.
pub fn face_structure(f: &SubmodularFn) -> FaceStructure {
    let chain = maximal_chain(f.n(), &tight_sets(f));
    FaceStructure::from_chain(f, chain)
}

/// Inclusion-minimal face of `B_f` containing `x`.
pub fn minimal_face_of_point(f: &SubmodularFn, x: &IntVector) -> Result<FaceStructure> {
    minimal_face(f, x, 1)
}

/// Inclusion-minimal face of `B_f` containing `x / k`, i.e. the face of `B_f`
/// whose `k`-dilate is the minimal face of `k·B_f` containing `x`. Block
/// functions are restrictions of `f`, not of `k·f`.
pub fn minimal_face(f: &SubmodularFn, x: &IntVector, k: i64) -> Result<FaceStructure> {
    if k < 1 {
        return Err(Error::usage("multiplicity must be positive"));
    }
    let scaled = f.scale(k)?;
    if let Err(why) = check_base_membership(&scaled, x) {
        return Err(Error::usage(format!(
            "point {x:?} is not in {k}·B_f: {}",
            why.describe(&scaled)
        )));
    }
    let sums = x.subset_sums();
    let family: Vec<SubsetMask> =
        SubsetMask::all(f.n()).filter(|&m| sums[m.index()] == k * f.value(m)).collect();
    let chain = maximal_chain(f.n(), &family);
    Ok(FaceStructure::from_chain(f, chain))
}
