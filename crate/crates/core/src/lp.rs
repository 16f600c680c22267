//! Exact rational LP over explicit base-polytope constraint systems.
//!
//! Only the systems produced by [`build_intersection_system`] are supported:
//! one `x(U) <= f(U)` row per nonempty `U` for the first polytope, any set of
//! `x(U) <= g(U)` rows for the second, and equalities on `x(E)`.
//!
//! [`find_vertex`] runs an active-set simplex (the primal simplex on the dual
//! standard form) in the lifted space `(x, s)`, where every second-side row is
//! relaxed to `x(U) - s <= g(U)` and `s >= 0`. The objective is lexicographic:
//! first minimize `s`, then maximize `x(e_1)`, `x(e_2)`, ... Starting from a
//! greedy vertex of the first polytope this needs no separate phase one, and
//! the optimum is the lexicographically largest point of the intersection.
//! Pivots follow Bland's rule.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ground::{GroundSet, IntVector, SubsetMask};
use crate::submodular::SubmodularFn;

pub type Rational = BigRational;

/// Exact rational vector over the ground set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalPoint(pub Vec<Rational>);

impl RationalPoint {
    pub fn from_ints(x: &IntVector) -> Self {
        RationalPoint(x.0.iter().map(|&v| int(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum_over(&self, mask: SubsetMask) -> Rational {
        mask.iter().fold(Rational::zero(), |acc, i| acc + &self.0[i])
    }
}

impl fmt::Debug for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Which base polytope a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    First,
    Second,
}

/// `x(set) <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub set: SubsetMask,
    pub rhs: Rational,
    pub side: Side,
}

/// `x(set) = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equality {
    pub set: SubsetMask,
    pub rhs: Rational,
}

#[derive(Clone)]
pub struct ConstraintSystem {
    pub ground: GroundSet,
    pub inequalities: Vec<Inequality>,
    pub equalities: Vec<Equality>,
    /// Set when infeasibility is evident from the equalities alone.
    pub declared_infeasible: Option<String>,
}

impl ConstraintSystem {
    pub fn n(&self) -> usize {
        self.ground.len()
    }

    /// Whether `x` satisfies every row exactly.
    pub fn satisfied_by(&self, x: &RationalPoint) -> bool {
        self.declared_infeasible.is_none()
            && self.inequalities.iter().all(|c| x.sum_over(c.set) <= c.rhs)
            && self.equalities.iter().all(|c| x.sum_over(c.set) == c.rhs)
    }

    /// Normals of the rows active at `x`, as 0/1 vectors.
    pub fn active_normals(&self, x: &RationalPoint) -> Vec<RationalPoint> {
        let n = self.n();
        let normal = |set: SubsetMask| {
            RationalPoint((0..n).map(|i| int(set.contains(i) as i64)).collect())
        };
        self.inequalities
            .iter()
            .filter(|c| x.sum_over(c.set) == c.rhs)
            .map(|c| normal(c.set))
            .chain(self.equalities.iter().map(|c| normal(c.set)))
            .collect()
    }
}

/// One row per line: `x({a,b}) <= 3` or `x({a,b,c}) = 2`.
impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(why) = &self.declared_infeasible {
            writeln!(f, "# infeasible: {why}")?;
        }
        for c in &self.equalities {
            writeln!(f, "x({}) = {}", self.ground.format_mask(c.set), c.rhs)?;
        }
        for c in &self.inequalities {
            writeln!(f, "x({}) <= {}", self.ground.format_mask(c.set), c.rhs)?;
        }
        Ok(())
    }
}

/// Rows for `B_f ∩ B_g`: `x(U) <= f(U)` and `x(U) <= g(U)` for every nonempty `U`,
/// plus `x(E) = f(E)` and `x(E) = g(E)`.
pub fn build_intersection_system(f: &SubmodularFn, g: &SubmodularFn) -> Result<ConstraintSystem> {
    if f.ground() != g.ground() {
        return Err(Error::usage("intersection needs functions on the same ground set"));
    }
    let n = f.n();
    let mut inequalities = Vec::with_capacity(2 << n);
    for m in SubsetMask::all(n).skip(1) {
        inequalities.push(Inequality { set: m, rhs: int(f.value(m)), side: Side::First });
        inequalities.push(Inequality { set: m, rhs: int(g.value(m)), side: Side::Second });
    }
    let full = f.full();
    let (fe, ge) = (f.total(), g.total());
    let declared_infeasible =
        (fe != ge).then(|| format!("parallel base hyperplanes x(E) = {fe} and x(E) = {ge}"));
    Ok(ConstraintSystem {
        ground: f.ground().clone(),
        inequalities,
        equalities: vec![Equality { set: full, rhs: int(fe) }, Equality { set: full, rhs: int(ge) }],
        declared_infeasible,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Vertex(RationalPoint),
    Infeasible,
}

const MAX_PIVOTS: usize = 1_000_000;

/// Lexicographically maximal point (hence a vertex) of the system's polytope.
pub fn find_vertex(system: &ConstraintSystem) -> Result<LpOutcome> {
    if system.declared_infeasible.is_some() {
        return Ok(LpOutcome::Infeasible);
    }
    Solver::new(system)?.run()
}

/// Row identifiers, ordered for Bland's rule: `s >= 0` is row 0, then for each
/// mask `U` the first-side row `2U - 1` and the second-side row `2U`.
type RowId = usize;
const S_ROW: RowId = 0;
/// Marker for the equality row, which never leaves the basis.
const EQ_ROW: RowId = usize::MAX;

struct Solver {
    n: usize,
    first: Vec<Option<Rational>>,
    second: Vec<Option<Rational>>,
    total: Rational,
    basis: Vec<RowId>,
    in_basis: Vec<bool>,
    /// Inverse of the basis matrix, `(n+1) x (n+1)`, rows indexed by variable.
    binv: Vec<Vec<Rational>>,
    /// Current point `(x, s)`.
    z: Vec<Rational>,
}

impl Solver {
    fn new(system: &ConstraintSystem) -> Result<Self> {
        let n = system.n();
        let full = SubsetMask::full(n);
        let count = 1usize << n;
        let mut first: Vec<Option<Rational>> = vec![None; count];
        let mut second: Vec<Option<Rational>> = vec![None; count];
        for c in &system.inequalities {
            let slot = match c.side {
                Side::First => &mut first[c.set.index()],
                Side::Second => &mut second[c.set.index()],
            };
            *slot = Some(match slot.take() {
                Some(prev) if prev < c.rhs => prev,
                _ => c.rhs.clone(),
            });
        }
        let mut total: Option<&Rational> = None;
        for c in &system.equalities {
            if c.set != full {
                return Err(Error::usage("only equalities on the full ground set are supported"));
            }
            match total {
                Some(t) if *t != c.rhs => return Ok(Self::trivially_infeasible(n)),
                _ => total = Some(&c.rhs),
            }
        }
        let total = total
            .cloned()
            .ok_or_else(|| Error::usage("system needs an equality on x(E)"))?;

        // Greedy start on the first side, in canonical order.
        let rhs = |m: usize| -> Result<Rational> {
            if m == 0 {
                return Ok(Rational::zero());
            }
            first[m].clone().ok_or_else(|| {
                Error::usage("every nonempty subset needs a first-side row")
            })
        };
        let mut x = Vec::with_capacity(n);
        for i in 0..n {
            x.push(rhs((1 << (i + 1)) - 1)? - rhs((1 << i) - 1)?);
        }
        let xp = RationalPoint(x.clone());
        let sums = subset_sums(&x);
        for m in 1..count {
            if let Some(b) = &first[m] {
                if &sums[m] > b {
                    return Err(Error::usage(
                        "first-side rows do not describe a base polytope (greedy start infeasible)",
                    ));
                }
            }
        }
        if sums[count - 1] != total {
            if sums[count - 1] < total {
                return Ok(Self::trivially_infeasible(n));
            }
            return Err(Error::usage("first-side total does not match the equality"));
        }

        let mut s0 = Rational::zero();
        let mut s_row = S_ROW;
        for m in 1..count {
            if let Some(b) = &second[m] {
                let excess = &sums[m] - b;
                if excess > s0 {
                    s0 = excess;
                    s_row = 2 * m;
                }
            }
        }

        let mut basis: Vec<RowId> = (1..n).map(|i| 2 * ((1 << i) - 1) - 1).collect();
        basis.push(EQ_ROW);
        basis.push(s_row);
        let mut in_basis = vec![false; 2 * count];
        for &r in &basis {
            if r != EQ_ROW {
                in_basis[r] = true;
            }
        }
        let mut solver = Solver { n, first, second, total, basis, in_basis, binv: Vec::new(), z: Vec::new() };
        let b: Vec<Vec<Rational>> = solver.basis.iter().map(|&r| solver.row_coeffs(r)).collect();
        solver.binv = invert(b).ok_or_else(|| Error::invariant("initial basis is singular"))?;
        let mut z = xp.0;
        z.push(s0);
        solver.z = z;
        debug_assert_eq!(solver.point_from_basis(), solver.z);
        Ok(solver)
    }

    fn trivially_infeasible(n: usize) -> Self {
        Solver {
            n,
            first: Vec::new(),
            second: Vec::new(),
            total: Rational::zero(),
            basis: Vec::new(),
            in_basis: Vec::new(),
            binv: Vec::new(),
            z: Vec::new(),
        }
    }

    fn row_mask(row: RowId, n: usize) -> SubsetMask {
        match row {
            EQ_ROW => SubsetMask::full(n),
            S_ROW => SubsetMask::EMPTY,
            r => SubsetMask(r.div_ceil(2) as u32),
        }
    }

    fn row_s_coeff(row: RowId) -> i64 {
        match row {
            EQ_ROW => 0,
            S_ROW => -1,
            r if r % 2 == 0 => -1,
            _ => 0,
        }
    }

    fn row_coeffs(&self, row: RowId) -> Vec<Rational> {
        let mask = Self::row_mask(row, self.n);
        let mut c: Vec<Rational> = (0..self.n).map(|i| int(mask.contains(i) as i64)).collect();
        c.push(int(Self::row_s_coeff(row)));
        c
    }

    fn row_rhs(&self, row: RowId) -> Rational {
        match row {
            EQ_ROW => self.total.clone(),
            S_ROW => Rational::zero(),
            r if r % 2 == 0 => self.second[r / 2].clone().expect("row exists"),
            r => self.first[r.div_ceil(2)].clone().expect("row exists"),
        }
    }

    fn point_from_basis(&self) -> Vec<Rational> {
        let rhs: Vec<Rational> = self.basis.iter().map(|&r| self.row_rhs(r)).collect();
        self.binv
            .iter()
            .map(|row| row.iter().zip(&rhs).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// Sign of the lexicographic multiplier for basis position `p`:
    /// `(-binv[s][p], binv[0][p], ..., binv[n-1][p])`.
    fn multiplier_is_negative(&self, p: usize) -> bool {
        let s = &self.binv[self.n][p];
        if !s.is_zero() {
            return s.is_positive();
        }
        for i in 0..self.n {
            let v = &self.binv[i][p];
            if !v.is_zero() {
                return v.is_negative();
            }
        }
        false
    }

    fn run(mut self) -> Result<LpOutcome> {
        if self.basis.is_empty() {
            return Ok(LpOutcome::Infeasible);
        }
        let n = self.n;
        let count = 1usize << n;
        for _ in 0..MAX_PIVOTS {
            // Leaving row: smallest row id with a lex-negative multiplier.
            let leave = (0..=n)
                .filter(|&p| self.basis[p] != EQ_ROW && self.multiplier_is_negative(p))
                .min_by_key(|&p| self.basis[p]);
            let Some(p) = leave else {
                return Ok(self.finish());
            };
            let d: Vec<Rational> = (0..=n).map(|i| -&self.binv[i][p]).collect();
            let ds = subset_sums(&d[..n]);
            let zs = subset_sums(&self.z[..n]);
            let (d_s, z_s) = (&d[n], &self.z[n]);

            let mut best: Option<(Rational, RowId)> = None;
            let mut consider = |row: RowId, ad: Rational, slack: Rational| {
                if ad.is_positive() {
                    let t = slack / ad;
                    if best.as_ref().is_none_or(|(bt, _)| t < *bt) {
                        best = Some((t, row));
                    }
                }
            };
            if !self.in_basis[S_ROW] {
                consider(S_ROW, -d_s, z_s.clone());
            }
            for m in 1..count {
                let fr = 2 * m - 1;
                if let Some(b) = &self.first[m] {
                    if !self.in_basis[fr] {
                        consider(fr, ds[m].clone(), b - &zs[m]);
                    }
                }
                if let Some(b) = &self.second[m] {
                    if !self.in_basis[fr + 1] {
                        consider(fr + 1, &ds[m] - d_s, b - (&zs[m] - z_s));
                    }
                }
            }
            let (t, enter) = best.ok_or_else(|| {
                Error::invariant("lexicographic objective unbounded on a bounded polytope")
            })?;
            for (zi, di) in self.z.iter_mut().zip(&d) {
                *zi += &t * di;
            }
            self.pivot(p, enter);
        }
        Err(Error::invariant(format!("simplex exceeded {MAX_PIVOTS} pivots")))
    }

    fn pivot(&mut self, p: usize, enter: RowId) {
        let n1 = self.n + 1;
        let a = self.row_coeffs(enter);
        let v: Vec<Rational> = (0..n1)
            .map(|q| {
                (0..n1)
                    .filter(|&i| !a[i].is_zero())
                    .fold(Rational::zero(), |acc, i| acc + &a[i] * &self.binv[i][q])
            })
            .collect();
        let vp = v[p].clone();
        debug_assert!(!vp.is_zero(), "entering row must be independent of the rest of the basis");
        for row in self.binv.iter_mut() {
            let col_p = &row[p] / &vp;
            for q in 0..n1 {
                if q != p && !v[q].is_zero() {
                    row[q] -= &col_p * &v[q];
                }
            }
            row[p] = col_p;
        }
        self.in_basis[self.basis[p]] = false;
        self.in_basis[enter] = true;
        self.basis[p] = enter;
        debug_assert_eq!(self.point_from_basis(), self.z);
    }

    fn finish(self) -> LpOutcome {
        if self.z[self.n].is_positive() {
            LpOutcome::Infeasible
        } else {
            let mut z = self.z;
            z.truncate(self.n);
            LpOutcome::Vertex(RationalPoint(z))
        }
    }
}

fn subset_sums(v: &[Rational]) -> Vec<Rational> {
    let mut sums = Vec::with_capacity(1 << v.len());
    sums.push(Rational::zero());
    for m in 1..1usize << v.len() {
        let low = m.trailing_zeros() as usize;
        let s = &sums[m & (m - 1)] + &v[low];
        sums.push(s);
    }
    sums
}

/// Gauss-Jordan inverse; `None` if singular.
fn invert(mut a: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let scale = a[col][col].recip();
        for j in 0..n {
            a[col][j] *= &scale;
            inv[col][j] *= &scale;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in 0..n {
                    let (x, y) = (&a[col][j] * &factor, &inv[col][j] * &factor);
                    a[r][j] -= x;
                    inv[r][j] -= y;
                }
            }
        }
    }
    Some(inv)
}

/// Converts a vertex of a two-base-polytope system to integers. A fractional
/// coordinate contradicts the integrality of polymatroid intersections, so it is
/// reported as an invariant violation together with the system.
pub fn assert_integral(p: &RationalPoint, system: &ConstraintSystem) -> Result<IntVector> {
    let mut out = Vec::with_capacity(p.len());
    for (i, v) in p.0.iter().enumerate() {
        if !v.is_integer() {
            return Err(Error::invariant(format!(
                "vertex {p:?} has non-integral coordinate {} = {v}\nsystem:\n{system}",
                system.ground.names().get(i).map(String::as_str).unwrap_or("?")
            )));
        }
        let as_i64 = i64::try_from(v.to_integer())
            .map_err(|_| Error::invariant(format!("coordinate {v} overflows i64")))?;
        out.push(as_i64);
    }
    Ok(IntVector(out))
}

/// Rank of a set of rational vectors.
pub fn rank(vectors: &[RationalPoint]) -> usize {
    let Some(width) = vectors.first().map(RationalPoint::len) else {
        return 0;
    };
    let mut rows: Vec<Vec<Rational>> = vectors.iter().map(|v| v.0.clone()).collect();
    let mut r = 0;
    for col in 0..width {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, piv);
        let lead = rows[r][col].clone();
        let (top, below) = rows.split_at_mut(r + 1);
        for row in below {
            if !row[col].is_zero() {
                let factor = &row[col] / &lead;
                for (x, p) in row[col..].iter_mut().zip(&top[r][col..]) {
                    *x -= p * &factor;
                }
            }
        }
        r += 1;
    }
    r
}

/// Dimension of the affine hull of `points`.
pub fn affine_rank(points: &[RationalPoint]) -> Result<usize> {
    let (first, rest) = points
        .split_first()
        .ok_or_else(|| Error::usage("affine rank of an empty point list"))?;
    let diffs: Vec<RationalPoint> = rest
        .iter()
        .map(|p| RationalPoint(p.0.iter().zip(&first.0).map(|(a, b)| a - b).collect()))
        .collect();
    Ok(rank(&diffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(r: i64, n: usize) -> SubmodularFn {
        SubmodularFn::uniform(GroundSet::numbered(n).unwrap(), r).unwrap()
    }

    fn ints(v: &[i64]) -> RationalPoint {
        RationalPoint(v.iter().map(|&x| int(x)).collect())
    }

    fn vertex(sys: &ConstraintSystem) -> RationalPoint {
        match find_vertex(sys).unwrap() {
            LpOutcome::Vertex(p) => p,
            LpOutcome::Infeasible => panic!("unexpectedly infeasible"),
        }
    }

    #[test]
    fn segment_prefers_first_coordinate() {
        let f = uniform(1, 2);
        let sys = build_intersection_system(&f, &f).unwrap();
        assert_eq!(vertex(&sys), ints(&[1, 0]));
    }

    #[test]
    fn hypersimplex_lex_vertex() {
        let f = uniform(2, 3);
        let sys = build_intersection_system(&f, &f).unwrap();
        let v = vertex(&sys);
        assert_eq!(v, ints(&[1, 1, 0]));
        assert!(sys.satisfied_by(&v));
        assert_eq!(rank(&sys.active_normals(&v)), 3);
    }

    #[test]
    fn distinct_totals_are_declared_infeasible() {
        let f = uniform(1, 2);
        let g = f.shift(IntVector(vec![5, 5])).unwrap();
        let sys = build_intersection_system(&f, &g).unwrap();
        assert!(sys.declared_infeasible.is_some());
        assert_eq!(find_vertex(&sys).unwrap(), LpOutcome::Infeasible);
        assert!(sys.to_string().starts_with("# infeasible"));
    }

    #[test]
    fn disjoint_polytopes_with_equal_totals_are_infeasible() {
        // B_f = segment (1,0)-(0,1); B_g = {(2,-1)}-(3,-2) segment shifted away.
        let f = uniform(1, 2);
        let g = f.shift(IntVector(vec![2, -2])).unwrap();
        let sys = build_intersection_system(&f, &g).unwrap();
        assert!(sys.declared_infeasible.is_none());
        assert_eq!(find_vertex(&sys).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn split_system_contains_scaled_point() {
        // Intersection of B_f and x - (k-1) B_f contains x / k.
        let f = uniform(2, 3);
        let x = IntVector(vec![2, 1, 1]);
        let g = f.dual().scale(1).unwrap().shift(x.clone()).unwrap();
        let sys = build_intersection_system(&f, &g).unwrap();
        let half = RationalPoint(x.0.iter().map(|&v| Rational::new(v.into(), 2.into())).collect());
        assert!(sys.satisfied_by(&half));
        let v = vertex(&sys);
        assert_eq!(assert_integral(&v, &sys).unwrap().0, vec![1, 1, 0]);
    }

    #[test]
    fn fractional_point_is_rejected() {
        let f = uniform(1, 2);
        let sys = build_intersection_system(&f, &f).unwrap();
        let half = RationalPoint(vec![Rational::new(1.into(), 2.into()); 2]);
        let err = assert_integral(&half, &sys).unwrap_err();
        match err {
            Error::Invariant(msg) => assert!(msg.contains("x({e1,e2}) <= 1")),
            other => panic!("{other:?}"),
        }
        assert_eq!(assert_integral(&ints(&[1, 1, 0]), &sys).unwrap().0, vec![1, 1, 0]);
    }

    #[test]
    fn affine_rank_examples() {
        assert_eq!(affine_rank(&[ints(&[1, 0]), ints(&[0, 1])]).unwrap(), 1);
        assert_eq!(affine_rank(&[ints(&[3, 4])]).unwrap(), 0);
        let bases: Vec<RationalPoint> = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .map(|(i, j)| {
                let mut v = vec![0; 4];
                v[i] = 1;
                v[j] = 1;
                ints(&v)
            })
            .collect();
        assert_eq!(bases.len(), 6);
        assert_eq!(affine_rank(&bases).unwrap(), 3);
        assert!(affine_rank(&[]).is_err());
    }

    #[test]
    fn dump_lists_rows_by_name() {
        let f = uniform(1, 2);
        let sys = build_intersection_system(&f, &f).unwrap();
        let text = sys.to_string();
        assert!(text.contains("x({e1,e2}) = 1"));
        assert!(text.contains("x({e2}) <= 1"));
        assert_eq!(text.lines().count(), 2 + 6);
    }
}
