//! Decompositions of integer points of `k·B_f` into integer bases.
//!
//! [`decompose`] returns at most `dim B_f + 1` distinct bases. It recurses on
//! `dim B_f + |E|`:
//!
//! * a single element is its own base;
//! * if `B_f` has a nontrivial tight chain it splits as a direct sum, and the
//!   blocks are decomposed separately and interleaved by [`merge_direct_sum`];
//! * otherwise, with `w(e) = kq + r` for the first element `e`, either `r = 0`
//!   and `w/k` lies on a lower-dimensional face of `B_{f|(e,q)}`, or an integer
//!   vertex `x'` of `B_{r·f|(e,q+1)} ∩ B_{w + (k-r)·(f|(e,q))*}` splits `w` into
//!   two points whose minimal faces have dimensions summing to at most `|E| - 2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground::IntVector;
use crate::lp::{assert_integral, build_intersection_system, find_vertex, LpOutcome};
use crate::polytope::{
    check_base_membership, dimension, face_structure, minimal_face, FaceStructure,
};
use crate::submodular::SubmodularFn;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub weight: i64,
    pub point: IntVector,
}

/// `target = Σ weight_i · point_i` with `Σ weight_i = k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedDecomposition {
    pub k: i64,
    pub target: IntVector,
    pub terms: Vec<Term>,
}

impl WeightedDecomposition {
    pub fn distinct(&self) -> usize {
        self.terms.len()
    }

    /// Merges coordinate-identical points and sorts terms by point.
    pub fn canonicalize(&mut self) {
        self.terms.sort_by(|a, b| a.point.cmp(&b.point));
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.point == t.point => last.weight += t.weight,
                _ => merged.push(t),
            }
        }
        self.terms = merged;
    }

    /// `Σ weight_i · point_i`.
    pub fn weighted_sum(&self) -> IntVector {
        let n = self.target.len();
        let mut acc = IntVector::zeros(n);
        for t in &self.terms {
            for i in 0..n.min(t.point.len()) {
                acc[i] += t.weight * t.point[i];
            }
        }
        acc
    }
}

/// One node of the recursion, in the coordinates of that node's ground set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum TraceNode {
    Single {
        elements: Vec<String>,
        k: i64,
        value: i64,
    },
    DirectSum {
        elements: Vec<String>,
        k: i64,
        blocks: Vec<TraceNode>,
    },
    /// `r = 0`: recursion into a face of `B_{f|(e,q)}` on which `x(e) = q`.
    FaceDrop {
        elements: Vec<String>,
        k: i64,
        e: String,
        q: i64,
        blocks: Vec<TraceNode>,
    },
    Split {
        elements: Vec<String>,
        k: i64,
        e: String,
        q: i64,
        r: i64,
        first_fn: String,
        second_fn: String,
        x_prime: IntVector,
        x_second: IntVector,
        first_blocks: Vec<TraceNode>,
        second_blocks: Vec<TraceNode>,
    },
}

impl TraceNode {
    pub fn elements(&self) -> &[String] {
        match self {
            TraceNode::Single { elements, .. }
            | TraceNode::DirectSum { elements, .. }
            | TraceNode::FaceDrop { elements, .. }
            | TraceNode::Split { elements, .. } => elements,
        }
    }

    pub fn k(&self) -> i64 {
        match self {
            TraceNode::Single { k, .. }
            | TraceNode::DirectSum { k, .. }
            | TraceNode::FaceDrop { k, .. }
            | TraceNode::Split { k, .. } => *k,
        }
    }

    /// Rebuilds the decomposition from the recorded leaves and split points
    /// without evaluating any function or solving any LP.
    pub fn replay(&self) -> Result<WeightedDecomposition> {
        let mut d = match self {
            TraceNode::Single { k, value, .. } => WeightedDecomposition {
                k: *k,
                target: IntVector(vec![k * value]),
                terms: vec![Term { weight: *k, point: IntVector(vec![*value]) }],
            },
            TraceNode::DirectSum { elements, blocks, .. }
            | TraceNode::FaceDrop { elements, blocks, .. } => replay_blocks(elements, blocks)?,
            TraceNode::Split { elements, k, first_blocks, second_blocks, .. } => {
                let a = replay_blocks(elements, first_blocks)?;
                let b = replay_blocks(elements, second_blocks)?;
                let mut terms = a.terms;
                terms.extend(b.terms);
                WeightedDecomposition { k: *k, target: &a.target + &b.target, terms }
            }
        };
        d.canonicalize();
        Ok(d)
    }
}

fn replay_blocks(elements: &[String], blocks: &[TraceNode]) -> Result<WeightedDecomposition> {
    let parts = blocks.iter().map(TraceNode::replay).collect::<Result<Vec<_>>>()?;
    let mut positions = Vec::with_capacity(elements.len());
    for b in blocks {
        for name in b.elements() {
            let p = elements
                .iter()
                .position(|e| e == name)
                .ok_or_else(|| Error::usage(format!("trace block names unknown element {name:?}")))?;
            positions.push(p);
        }
    }
    if positions.len() != elements.len() {
        return Err(Error::usage("trace blocks do not partition their parent"));
    }
    let merged = merge_direct_sum(&parts)?;
    Ok(scatter(&merged, &positions))
}

/// The decomposition and its recursion tree.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionTrace {
    pub root: TraceNode,
    /// Number of LP vertices computed (each one passed the integrality check).
    pub lp_vertices: usize,
}

/// Concatenates the parts' points on intervals between the union of their
/// cumulative-weight breakpoints. With `t` parts of sizes `s_i` the result has
/// at most `Σ s_i - (t - 1)` terms.
pub fn merge_direct_sum(parts: &[WeightedDecomposition]) -> Result<WeightedDecomposition> {
    let first = parts.first().ok_or_else(|| Error::usage("merge of zero parts"))?;
    let k = first.k;
    for p in parts {
        if p.k != k {
            return Err(Error::usage(format!("merge parts have multiplicities {} and {}", k, p.k)));
        }
        let total: i64 = p.terms.iter().map(|t| t.weight).sum();
        if total != k || p.terms.iter().any(|t| t.weight <= 0) {
            return Err(Error::usage(format!("part weights must be positive and sum to {k}")));
        }
    }
    if parts.len() == 1 {
        return Ok(first.clone());
    }
    let target = IntVector(parts.iter().flat_map(|p| p.target.0.iter().copied()).collect());
    let mut idx = vec![0usize; parts.len()];
    let mut rem: Vec<i64> = parts.iter().map(|p| p.terms[0].weight).collect();
    let mut terms = Vec::new();
    let mut covered = 0;
    while covered < k {
        let step = *rem.iter().min().expect("at least one part");
        let point =
            IntVector(parts.iter().zip(&idx).flat_map(|(p, &j)| p.terms[j].point.0.iter().copied()).collect());
        terms.push(Term { weight: step, point });
        covered += step;
        for (pi, p) in parts.iter().enumerate() {
            rem[pi] -= step;
            if rem[pi] == 0 && idx[pi] + 1 < p.terms.len() {
                idx[pi] += 1;
                rem[pi] = p.terms[idx[pi]].weight;
            }
        }
    }
    Ok(WeightedDecomposition { k, target, terms })
}

/// Moves concatenated block coordinates back to ground positions.
fn scatter(d: &WeightedDecomposition, positions: &[usize]) -> WeightedDecomposition {
    let place = |v: &IntVector| {
        let mut out = IntVector::zeros(positions.len());
        for (j, &p) in positions.iter().enumerate() {
            out[p] = v[j];
        }
        out
    };
    WeightedDecomposition {
        k: d.k,
        target: place(&d.target),
        terms: d.terms.iter().map(|t| Term { weight: t.weight, point: place(&t.point) }).collect(),
    }
}

fn require_in_kbase(f: &SubmodularFn, x: &IntVector, k: i64) -> Result<()> {
    if k < 1 {
        return Err(Error::usage(format!("multiplicity must be positive, got {k}")));
    }
    let scaled = f.scale(k)?;
    check_base_membership(&scaled, x).map_err(|why| {
        Error::usage(format!("{x:?} is not in {k}·B_f: {}", why.describe(&scaled)))
    })
}

fn integral_vertex(first: &SubmodularFn, second: &SubmodularFn) -> Result<IntVector> {
    let system = build_intersection_system(first, second)?;
    match find_vertex(&system)? {
        LpOutcome::Vertex(p) => assert_integral(&p, &system),
        LpOutcome::Infeasible => Err(Error::invariant(format!(
            "intersection of {first} and {second} is empty\nsystem:\n{system}"
        ))),
    }
}

/// Writes `x ∈ k·B_f` as a sum of `k` integer points of `B_f`.
///
/// Each step takes an integer vertex of `B_f ∩ B_{x + (j-1)·f*}`, which is
/// nonempty because it contains `x / j`.
pub fn split_into_k_bases(f: &SubmodularFn, x: &IntVector, k: i64) -> Result<Vec<IntVector>> {
    require_in_kbase(f, x, k)?;
    let dual = f.dual();
    let mut rest = x.clone();
    let mut out = Vec::with_capacity(k as usize);
    for j in (2..=k).rev() {
        let other = dual.scale(j - 1)?.shift(rest.clone())?;
        let xj = integral_vertex(f, &other)?;
        rest = &rest - &xj;
        out.push(xj);
    }
    out.push(rest);
    Ok(out)
}

/// Decomposes `w ∈ k·B_f` into at most `dim B_f + 1` distinct integer bases.
///
/// `f` must be submodular; this is not rechecked.
pub fn decompose(
    f: &SubmodularFn,
    w: &IntVector,
    k: i64,
) -> Result<(WeightedDecomposition, DecompositionTrace)> {
    require_in_kbase(f, w, k)?;
    let mut run = Run { lp_vertices: 0 };
    let (d, root) = run.decompose(f, w, k, None)?;
    Ok((d, DecompositionTrace { root, lp_vertices: run.lp_vertices }))
}

struct Run {
    lp_vertices: usize,
}

impl Run {
    fn decompose(
        &mut self,
        f: &SubmodularFn,
        w: &IntVector,
        k: i64,
        parent_measure: Option<usize>,
    ) -> Result<(WeightedDecomposition, TraceNode)> {
        let n = f.n();
        let elements = f.ground().names().to_vec();
        let context = |e: Error| match e {
            Error::Invariant(msg) => {
                Error::Invariant(format!("{msg}\n  at node {elements:?} with k = {k}, w = {w:?}"))
            }
            other => other,
        };

        if n == 1 {
            let value = f.total();
            if w[0] != k * value {
                return Err(context(Error::invariant(format!(
                    "singleton target {} is not {k}·{value}",
                    w[0]
                ))));
            }
            let d = WeightedDecomposition {
                k,
                target: w.clone(),
                terms: vec![Term { weight: k, point: IntVector(vec![value]) }],
            };
            return Ok((d, TraceNode::Single { elements, k, value }));
        }

        let face = face_structure(f);
        let measure = face.dim + n;
        if let Some(pm) = parent_measure {
            if measure >= pm {
                return Err(context(Error::invariant(format!(
                    "recursion measure did not drop ({measure} >= {pm})"
                ))));
            }
        }

        if face.t() > 1 {
            let (d, blocks) = self.decompose_face(&face, w, k, measure).map_err(context)?;
            return Ok((d, TraceNode::DirectSum { elements, k, blocks }));
        }

        let e = 0;
        let e_name = elements[e].clone();
        let (q, r) = (w[e].div_euclid(k), w[e].rem_euclid(k));

        if r == 0 {
            let reduced = f.reduce_at(e, q)?;
            let face = minimal_face(&reduced, w, k).map_err(|err| {
                context(Error::invariant(format!("w/k left B_(f|(e,q)): {err}")))
            })?;
            if face.dim + 2 > n {
                return Err(context(Error::invariant(format!(
                    "face with x({e_name}) = {q} has dimension {} > {}",
                    face.dim,
                    n - 2
                ))));
            }
            let (d, blocks) = self.decompose_face(&face, w, k, measure).map_err(context)?;
            return Ok((d, TraceNode::FaceDrop { elements, k, e: e_name, q, blocks }));
        }

        let upper = f.reduce_at(e, q + 1)?;
        let lower = f.reduce_at(e, q)?;
        let first = upper.scale(r)?;
        let second = lower.dual().scale(k - r)?.shift(w.clone())?;
        let x1 = integral_vertex(&first, &second).map_err(context)?;
        self.lp_vertices += 1;
        let x2 = w - &x1;
        if x1[e] != r * (q + 1) || x2[e] != (k - r) * q {
            return Err(context(Error::invariant(format!(
                "split point has x'({e_name}) = {}, x''({e_name}) = {}; expected {} and {}",
                x1[e],
                x2[e],
                r * (q + 1),
                (k - r) * q
            ))));
        }
        let face1 = minimal_face(&upper, &x1, r)
            .map_err(|err| context(Error::invariant(format!("x' left r·B_f': {err}"))))?;
        let face2 = minimal_face(&lower, &x2, k - r)
            .map_err(|err| context(Error::invariant(format!("x'' left (k-r)·B_f'': {err}"))))?;
        if face1.dim + face2.dim + 2 > n {
            return Err(context(Error::invariant(format!(
                "minimal faces at the split vertex have dimensions {} + {} > {}",
                face1.dim,
                face2.dim,
                n - 2
            ))));
        }
        let (d1, first_blocks) = self.decompose_face(&face1, &x1, r, measure).map_err(context)?;
        let (d2, second_blocks) = self.decompose_face(&face2, &x2, k - r, measure).map_err(context)?;
        let mut terms = d1.terms;
        terms.extend(d2.terms);
        let mut d = WeightedDecomposition { k, target: w.clone(), terms };
        d.canonicalize();
        let node = TraceNode::Split {
            elements,
            k,
            e: e_name,
            q,
            r,
            first_fn: first.to_string(),
            second_fn: second.to_string(),
            x_prime: x1,
            x_second: x2,
            first_blocks,
            second_blocks,
        };
        Ok((d, node))
    }

    /// Decomposes `x ∈ k·F` block by block and merges the results.
    fn decompose_face(
        &mut self,
        face: &FaceStructure,
        x: &IntVector,
        k: i64,
        measure: usize,
    ) -> Result<(WeightedDecomposition, Vec<TraceNode>)> {
        let mut parts = Vec::with_capacity(face.t());
        let mut nodes = Vec::with_capacity(face.t());
        let mut positions = Vec::with_capacity(x.len());
        for (i, bf) in face.block_fns.iter().enumerate() {
            let pos = face.positions(i);
            let (d, node) = self.decompose(bf, &x.gather(&pos), k, Some(measure))?;
            parts.push(d);
            nodes.push(node);
            positions.extend(pos);
        }
        let merged = merge_direct_sum(&parts)?;
        let mut d = scatter(&merged, &positions);
        d.canonicalize();
        Ok((d, nodes))
    }
}

/// Result of re-checking a decomposition from scratch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub failures: Vec<String>,
    pub distinct: usize,
    pub dim: usize,
}

/// Independent certificate check: weights, exact sum, distinctness, base
/// membership of every point, and the `dim B_f + 1` cardinality bound.
pub fn verify(f: &SubmodularFn, d: &WeightedDecomposition) -> VerifyReport {
    let mut failures = Vec::new();
    let n = f.n();
    if d.k < 1 {
        failures.push(format!("multiplicity {} is not positive", d.k));
    }
    if d.target.len() != n {
        failures.push(format!("target has {} coordinates, expected {n}", d.target.len()));
    }
    if d.terms.iter().any(|t| t.weight <= 0) {
        failures.push("nonpositive weight".to_string());
    }
    let total: i64 = d.terms.iter().map(|t| t.weight).sum();
    if total != d.k {
        failures.push(format!("sum mismatch: weights total {total}, expected k = {}", d.k));
    }
    if d.terms.iter().all(|t| t.point.len() == n) && d.target.len() == n {
        let sum = d.weighted_sum();
        if sum != d.target {
            failures.push(format!("sum mismatch: weighted sum {sum:?} != target {:?}", d.target));
        }
    }
    for (i, t) in d.terms.iter().enumerate() {
        if d.terms[..i].iter().any(|u| u.point == t.point) {
            failures.push(format!("duplicate point {:?}", t.point));
        }
        if let Err(why) = check_base_membership(f, &t.point) {
            failures.push(format!("point {:?} not in B_f: {}", t.point, why.describe(f)));
        }
    }
    let dim = dimension(f);
    if d.distinct() > dim + 1 {
        failures.push(format!(
            "cardinality bound exceeded: {} distinct points > dim + 1 = {}",
            d.distinct(),
            dim + 1
        ));
    }
    VerifyReport { ok: failures.is_empty(), failures, distinct: d.distinct(), dim }
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

    fn v(x: &[i64]) -> IntVector {
        IntVector(x.to_vec())
    }

    fn wd(k: i64, terms: &[(i64, &[i64])]) -> WeightedDecomposition {
        let terms: Vec<Term> =
            terms.iter().map(|(w, p)| Term { weight: *w, point: v(p) }).collect();
        let n = terms[0].point.len();
        let mut target = IntVector::zeros(n);
        for t in &terms {
            for i in 0..n {
                target[i] += t.weight * t.point[i];
            }
        }
        WeightedDecomposition { k, target, terms }
    }

    #[test]
    fn merge_follows_breakpoints() {
        let a = wd(3, &[(2, &[10]), (1, &[11])]);
        let b = wd(3, &[(1, &[20]), (2, &[21])]);
        let m = merge_direct_sum(&[a.clone(), b.clone()]).unwrap();
        let got: Vec<(i64, Vec<i64>)> = m.terms.iter().map(|t| (t.weight, t.point.0.clone())).collect();
        assert_eq!(got, vec![(1, vec![10, 20]), (1, vec![10, 21]), (1, vec![11, 21])]);
        assert_eq!(m.target.0, vec![31, 62]);
        assert_eq!(merge_direct_sum(std::slice::from_ref(&a)).unwrap(), a);
        let c = wd(3, &[(3, &[5])]);
        let d = wd(3, &[(3, &[6])]);
        assert_eq!(merge_direct_sum(&[c, d]).unwrap().distinct(), 1);
        assert!(merge_direct_sum(&[a, wd(2, &[(2, &[1])])]).is_err());
    }

    #[test]
    fn split_examples() {
        let mut parts = split_into_k_bases(&uniform(2, 3), &v(&[2, 1, 1]), 2).unwrap();
        parts.sort();
        assert_eq!(parts, vec![v(&[1, 0, 1]), v(&[1, 1, 0])]);

        assert_eq!(split_into_k_bases(&uniform(2, 3), &v(&[0, 1, 1]), 1).unwrap(), vec![v(&[0, 1, 1])]);

        let mut trees = split_into_k_bases(&k3(), &v(&[2, 2, 2]), 3).unwrap();
        trees.sort();
        assert_eq!(trees, vec![v(&[0, 1, 1]), v(&[1, 0, 1]), v(&[1, 1, 0])]);

        assert!(matches!(
            split_into_k_bases(&uniform(2, 3), &v(&[2, 2, 1]), 2),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn decompose_examples() {
        let (d, _) = decompose(&uniform(1, 2), &v(&[1, 1]), 2).unwrap();
        assert_eq!(d.terms, vec![Term { weight: 1, point: v(&[0, 1]) }, Term { weight: 1, point: v(&[1, 0]) }]);

        let (d, trace) = decompose(&k3(), &v(&[2, 2, 2]), 3).unwrap();
        assert_eq!(d.distinct(), 3);
        assert!(d.terms.iter().all(|t| t.weight == 1));
        assert!(verify(&k3(), &d).ok);
        assert_eq!(trace.root.replay().unwrap(), d);
    }

    #[test]
    fn decompose_single_vertex_multiple() {
        let f = uniform(2, 4);
        let (d, _) = decompose(&f, &v(&[0, 3, 3, 0]), 3).unwrap();
        assert_eq!(d.terms, vec![Term { weight: 3, point: v(&[0, 1, 1, 0]) }]);
    }

    #[test]
    fn decompose_rejects_outside_points() {
        let err = decompose(&uniform(1, 2), &v(&[2, 1]), 2).unwrap_err();
        match err {
            Error::Usage(msg) => assert!(msg.contains("x({e1,e2}) = 3 > 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(decompose(&uniform(1, 2), &v(&[1, 1]), 0).is_err());
    }

    #[test]
    fn verify_flags_tampering() {
        let f = k3();
        let (d, _) = decompose(&f, &v(&[2, 2, 2]), 3).unwrap();
        let mut bad = d.clone();
        bad.terms[0].weight += 1;
        let rep = verify(&f, &bad);
        assert!(!rep.ok);
        assert!(rep.failures.iter().any(|m| m.contains("sum mismatch")));

        // U_{1,2}: dim 1, so three distinct points can never pass.
        let u = uniform(1, 2);
        let over = WeightedDecomposition {
            k: 3,
            target: v(&[2, 1]),
            terms: vec![
                Term { weight: 1, point: v(&[1, 0]) },
                Term { weight: 1, point: v(&[0, 1]) },
                Term { weight: 1, point: v(&[1, 0]) },
            ],
        };
        let rep = verify(&u, &over);
        assert!(rep.failures.iter().any(|m| m.contains("cardinality bound exceeded")));
        assert!(rep.failures.iter().any(|m| m.contains("duplicate point")));
    }

    #[test]
    fn trace_serializes_with_case_tags() {
        let (_, trace) = decompose(&k3(), &v(&[2, 2, 2]), 3).unwrap();
        let json = serde_json::to_value(&trace).unwrap();
        assert_eq!(json["root"]["case"], "split");
        assert_eq!(json["root"]["e"], "e1");
        assert_eq!(json["root"]["q"], 0);
        assert_eq!(json["root"]["r"], 2);
        assert!(json["root"]["x_prime"].is_array());
    }
}
