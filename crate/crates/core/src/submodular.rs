//! Integer submodular set functions as lazy expression trees.
//!
//! Leaves are explicit tables or matroid rank functions; interior nodes are the
//! constructions used by the decomposition engine (dual, shift, reduction,
//! scaling, block restriction). Every node owns a per-subset memo, so a value
//! is computed at most once per node even when the tree is shared.

use std::fmt;
use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ground::{GroundSet, IntVector, SubsetMask};

const UNSET: i64 = i64::MIN;

/// An integer set function `f : P(E) -> Z`, cheap to clone.
#[derive(Clone)]
pub struct SubmodularFn(Arc<FnNode>);

struct FnNode {
    ground: GroundSet,
    kind: Kind,
    memo: Box<[AtomicI64]>,
}

/// Node kinds. Interior nodes reference their operand by shared handle.
#[derive(Clone)]
pub enum Kind {
    Table(Vec<i64>),
    UniformMatroidRank { rank: i64 },
    PartitionMatroidRank { blocks: Vec<SubsetMask>, caps: Vec<i64> },
    GraphicMatroidRank { vertices: usize, edges: Vec<(usize, usize)> },
    /// `f*(U) = f(E \ U) - f(E)`.
    Dual(SubmodularFn),
    /// `(f + a)(U) = f(U) + a(U)`.
    Shift(SubmodularFn, IntVector),
    /// `(f|a)(U) = min over T ⊆ U of f(T) + a(U \ T)`.
    Reduce(SubmodularFn, IntVector),
    /// `f|a` with `a(e0) = c` and `a(e) = f({e})` elsewhere; `a` is precomputed.
    ReduceAt { inner: SubmodularFn, element: usize, cap: i64, a: IntVector },
    Scale(i64, SubmodularFn),
    /// `U ↦ f(prev ∪ U) - f(prev)` for `U` inside `block`. `positions` lists the
    /// block's members in the parent's ground order.
    BlockRestrict { inner: SubmodularFn, prev: SubsetMask, block: SubsetMask, positions: Vec<usize> },
}

impl SubmodularFn {
    fn from_kind(ground: GroundSet, kind: Kind) -> Self {
        let memo = match kind {
            Kind::Table(_) => Vec::new().into_boxed_slice(),
            _ => (0..ground.subset_count()).map(|_| AtomicI64::new(UNSET)).collect(),
        };
        SubmodularFn(Arc::new(FnNode { ground, kind, memo }))
    }

    /// Explicit table indexed by bitmask; `values.len()` must be `2^n`.
    pub fn table(ground: GroundSet, values: Vec<i64>) -> Result<Self> {
        if values.len() != ground.subset_count() {
            return Err(Error::usage(format!(
                "table has {} entries, expected {}",
                values.len(),
                ground.subset_count()
            )));
        }
        if values[0] != 0 {
            return Err(Error::usage("table value at the empty set must be 0"));
        }
        Ok(Self::from_kind(ground, Kind::Table(values)))
    }

    /// Rank function of the uniform matroid `U_{r,n}`: `min(|U|, r)`.
    pub fn uniform(ground: GroundSet, rank: i64) -> Result<Self> {
        if rank < 0 {
            return Err(Error::usage("uniform matroid rank must be nonnegative"));
        }
        Ok(Self::from_kind(ground, Kind::UniformMatroidRank { rank }))
    }

    /// Partition matroid: `Σ_j min(|U ∩ B_j|, cap_j)`. Elements outside every block are loops.
    pub fn partition(ground: GroundSet, blocks: Vec<SubsetMask>, caps: Vec<i64>) -> Result<Self> {
        if blocks.len() != caps.len() {
            return Err(Error::usage("partition blocks and caps differ in length"));
        }
        let mut seen = SubsetMask::EMPTY;
        for &b in &blocks {
            ground.check_mask(b)?;
            if !b.intersection(seen).is_empty() {
                return Err(Error::usage("partition blocks overlap"));
            }
            seen = seen.union(b);
        }
        if caps.iter().any(|&c| c < 0) {
            return Err(Error::usage("partition caps must be nonnegative"));
        }
        Ok(Self::from_kind(ground, Kind::PartitionMatroidRank { blocks, caps }))
    }

    /// Graphic matroid rank; element `i` is the edge `edges[i]`.
    pub fn graphic(ground: GroundSet, vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.len() != ground.len() {
            return Err(Error::usage(format!(
                "graphic matroid needs one edge per ground element ({} edges for {} elements)",
                edges.len(),
                ground.len()
            )));
        }
        if edges.iter().any(|&(u, v)| u >= vertices || v >= vertices) {
            return Err(Error::usage("edge endpoint out of range"));
        }
        Ok(Self::from_kind(ground, Kind::GraphicMatroidRank { vertices, edges }))
    }

    pub fn dual(&self) -> Self {
        Self::from_kind(self.ground().clone(), Kind::Dual(self.clone()))
    }

    pub fn shift(&self, a: IntVector) -> Result<Self> {
        self.check_vector(&a)?;
        Ok(Self::from_kind(self.ground().clone(), Kind::Shift(self.clone(), a)))
    }

    pub fn reduce(&self, a: IntVector) -> Result<Self> {
        self.check_vector(&a)?;
        Ok(Self::from_kind(self.ground().clone(), Kind::Reduce(self.clone(), a)))
    }

    /// `f|(e0, c)`: caps coordinate `element` at `cap`, other coordinates at `f({e})`.
    pub fn reduce_at(&self, element: usize, cap: i64) -> Result<Self> {
        if element >= self.n() {
            return Err(Error::usage(format!("element index {element} out of range")));
        }
        let a = IntVector(
            (0..self.n())
                .map(|e| if e == element { cap } else { self.value(SubsetMask::singleton(e)) })
                .collect(),
        );
        Ok(Self::from_kind(
            self.ground().clone(),
            Kind::ReduceAt { inner: self.clone(), element, cap, a },
        ))
    }

    pub fn scale(&self, r: i64) -> Result<Self> {
        if r < 1 {
            return Err(Error::usage(format!("scale factor must be positive, got {r}")));
        }
        Ok(Self::from_kind(self.ground().clone(), Kind::Scale(r, self.clone())))
    }

    /// `U ↦ f(prev ∪ U) - f(prev)` on the ground set `block`.
    pub fn block_restrict(&self, prev: SubsetMask, block: SubsetMask) -> Result<Self> {
        self.ground().check_mask(prev)?;
        self.ground().check_mask(block)?;
        if block.is_empty() {
            return Err(Error::usage("block must be nonempty"));
        }
        if !prev.intersection(block).is_empty() {
            return Err(Error::usage("block overlaps the preceding set"));
        }
        let ground = self.ground().restrict(block)?;
        let positions = block.iter().collect();
        Ok(Self::from_kind(
            ground,
            Kind::BlockRestrict { inner: self.clone(), prev, block, positions },
        ))
    }

    /// Evaluates every subset and returns an explicit table node with the same values.
    pub fn materialize(&self) -> Self {
        Self::from_kind(self.ground().clone(), Kind::Table(self.values()))
    }

    #[inline]
    pub fn ground(&self) -> &GroundSet {
        &self.0.ground
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.ground.len()
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    #[inline]
    pub fn full(&self) -> SubsetMask {
        self.0.ground.full()
    }

    /// Checked evaluation.
    pub fn eval(&self, mask: SubsetMask) -> Result<i64> {
        self.ground().check_mask(mask)?;
        Ok(self.value(mask))
    }

    /// `f(E)`.
    pub fn total(&self) -> i64 {
        self.value(self.full())
    }

    /// Unchecked evaluation; `mask` must lie inside the ground set.
    pub fn value(&self, mask: SubsetMask) -> i64 {
        debug_assert!(mask.0 >> self.n() == 0, "mask out of range");
        let node = &*self.0;
        if let Kind::Table(t) = &node.kind {
            return t[mask.index()];
        }
        let slot = &node.memo[mask.index()];
        let cached = slot.load(Ordering::Relaxed);
        if cached != UNSET {
            return cached;
        }
        let v = self.compute(mask);
        slot.store(v, Ordering::Relaxed);
        v
    }

    /// All `2^n` values, indexed by bitmask.
    pub fn values(&self) -> Vec<i64> {
        SubsetMask::all(self.n()).map(|m| self.value(m)).collect()
    }

    fn compute(&self, mask: SubsetMask) -> i64 {
        let n = self.n();
        match &self.0.kind {
            Kind::Table(t) => t[mask.index()],
            Kind::UniformMatroidRank { rank } => (mask.len() as i64).min(*rank),
            Kind::PartitionMatroidRank { blocks, caps } => blocks
                .iter()
                .zip(caps)
                .map(|(b, &c)| (mask.intersection(*b).len() as i64).min(c))
                .sum(),
            Kind::GraphicMatroidRank { vertices, edges } => graphic_rank(*vertices, edges, mask),
            Kind::Dual(f) => f.value(mask.complement(n)) - f.total(),
            Kind::Shift(f, a) => f.value(mask) + a.sum_over(mask),
            Kind::Reduce(f, a) | Kind::ReduceAt { inner: f, a, .. } => mask
                .submasks()
                .map(|t| f.value(t) + a.sum_over(mask.minus(t)))
                .min()
                .expect("the empty set is always a submask"),
            Kind::Scale(r, f) => r * f.value(mask),
            Kind::BlockRestrict { inner, prev, positions, .. } => {
                inner.value(prev.union(mask.scatter(positions))) - inner.value(*prev)
            }
        }
    }

    fn check_vector(&self, a: &IntVector) -> Result<()> {
        if a.len() != self.n() {
            return Err(Error::usage(format!(
                "vector has {} coordinates, ground set has {}",
                a.len(),
                self.n()
            )));
        }
        Ok(())
    }

    /// First pair `(A, B)` in increasing bitmask order with
    /// `f(A) + f(B) < f(A ∪ B) + f(A ∩ B)`, or a nonzero value at the empty set.
    pub fn submodularity_violation(&self) -> Option<Violation> {
        let v = self.values();
        if v[0] != 0 {
            return Some(Violation::NonzeroEmpty(v[0]));
        }
        let count = v.len() as u32;
        for a in 0..count {
            for b in a + 1..count {
                if v[a as usize] + v[b as usize] < v[(a | b) as usize] + v[(a & b) as usize] {
                    return Some(Violation::Pair(SubsetMask(a), SubsetMask(b)));
                }
            }
        }
        None
    }

    pub fn is_submodular(&self) -> bool {
        self.submodularity_violation().is_none()
    }

    /// Nonnegative, nondecreasing, and `f(U) <= |U|`. Assumes submodularity.
    pub fn is_matroid_rank(&self) -> bool {
        let v = self.values();
        SubsetMask::all(self.n()).all(|m| {
            let fv = v[m.index()];
            fv >= 0
                && fv <= m.len() as i64
                && m.iter().all(|i| v[m.without(i).index()] <= fv)
        })
    }

    /// `f(E)` when `f` is a matroid rank function.
    pub fn matroid_rank(&self) -> Option<i64> {
        self.is_matroid_rank().then(|| self.total())
    }

    /// True if both functions live on equal ground sets and agree everywhere.
    pub fn same_values(&self, other: &SubmodularFn) -> bool {
        self.ground() == other.ground()
            && SubsetMask::all(self.n()).all(|m| self.value(m) == other.value(m))
    }
}

/// Witness that a table is not submodular.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    NonzeroEmpty(i64),
    Pair(SubsetMask, SubsetMask),
}

fn graphic_rank(vertices: usize, edges: &[(usize, usize)], mask: SubsetMask) -> i64 {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut rank = 0;
    for i in mask.iter() {
        let (u, v) = edges[i];
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            rank += 1;
        }
    }
    rank
}

impl fmt::Display for SubmodularFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Kind::Table(_) => write!(f, "table[n={}]", self.n()),
            Kind::UniformMatroidRank { rank } => write!(f, "uniform(r={rank}, n={})", self.n()),
            Kind::PartitionMatroidRank { caps, .. } => write!(f, "partition(caps={caps:?})"),
            Kind::GraphicMatroidRank { vertices, edges } => {
                write!(f, "graphic(v={vertices}, e={})", edges.len())
            }
            Kind::Dual(g) => write!(f, "dual({g})"),
            Kind::Shift(g, a) => write!(f, "shift({g}, {a:?})"),
            Kind::Reduce(g, a) => write!(f, "reduce({g}, {a:?})"),
            Kind::ReduceAt { inner, element, cap, .. } => {
                write!(f, "reduce_at({inner}, {}, {cap})", inner.ground().names()[*element])
            }
            Kind::Scale(r, g) => write!(f, "scale({r}, {g})"),
            Kind::BlockRestrict { inner, prev, block, .. } => write!(
                f,
                "block({inner}, prev={}, block={})",
                inner.ground().format_mask(*prev),
                inner.ground().format_mask(*block)
            ),
        }
    }
}

impl fmt::Debug for SubmodularFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} on {:?}", self.ground())
    }
}
