//! JSON instance files.
//!
//! ```json
//! {"ground": ["a", "b", "c"],
//!  "f": {"type": "dual", "inner": {"type": "uniform", "rank": 2}},
//!  "w": [-2, -2, -2], "k": 3}
//! ```
//!
//! Node types: `table` (`values` keyed by comma-joined element names, `""` or
//! a missing key for the empty set), `uniform` (`rank`), `partition` (`blocks`,
//! `caps`), `graphic` (`vertices`, `edges` as `[u, v]` per ground element),
//! and wrappers `dual`, `shift` (`a`), `reduce` (`a`), `reduce_at` (`element`,
//! `c`) and `scale` (`r`), each with an `inner` node.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ground::{GroundSet, IntVector, SubsetMask};
use crate::submodular::SubmodularFn;

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum NodeSpec {
    Table { values: BTreeMap<String, i64> },
    Uniform { rank: i64 },
    Partition { blocks: Vec<Vec<String>>, caps: Vec<i64> },
    Graphic { vertices: usize, edges: Vec<[usize; 2]> },
    Dual { inner: Box<NodeSpec> },
    Shift { a: Vec<i64>, inner: Box<NodeSpec> },
    Reduce { a: Vec<i64>, inner: Box<NodeSpec> },
    ReduceAt { element: String, c: i64, inner: Box<NodeSpec> },
    Scale { r: i64, inner: Box<NodeSpec> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceSpec {
    ground: Vec<String>,
    f: NodeSpec,
    #[serde(default)]
    w: Option<Vec<i64>>,
    #[serde(default)]
    k: Option<i64>,
}

/// A parsed instance file.
#[derive(Debug, Clone)]
pub struct Instance {
    pub f: SubmodularFn,
    pub w: Option<IntVector>,
    pub k: Option<i64>,
}

impl Instance {
    /// Parses an instance. Any structural problem is an [`Error::Parse`].
    pub fn from_json(text: &str, limit_n: usize) -> Result<Self> {
        let spec: InstanceSpec =
            serde_json::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
        let ground = GroundSet::with_limit(spec.ground, limit_n).map_err(as_parse)?;
        let f = build(&ground, spec.f).map_err(as_parse)?;
        let w = match spec.w {
            Some(w) if w.len() != ground.len() => {
                return Err(Error::parse(format!(
                    "\"w\" has {} entries, ground set has {}",
                    w.len(),
                    ground.len()
                )))
            }
            w => w.map(IntVector),
        };
        Ok(Instance { f, w, k: spec.k })
    }
}

fn as_parse(e: Error) -> Error {
    match e {
        Error::Usage(msg) | Error::Invariant(msg) | Error::Budget(msg) => Error::Parse(msg),
        parse => parse,
    }
}

fn vector(ground: &GroundSet, a: Vec<i64>) -> Result<IntVector> {
    if a.len() != ground.len() {
        return Err(Error::parse(format!(
            "vector has {} entries, ground set has {}",
            a.len(),
            ground.len()
        )));
    }
    Ok(IntVector(a))
}

fn subset_key(ground: &GroundSet, key: &str) -> Result<SubsetMask> {
    let key = key.trim();
    if key.is_empty() {
        return Ok(SubsetMask::EMPTY);
    }
    let mut mask = SubsetMask::EMPTY;
    for name in key.split(',').map(str::trim) {
        let i = ground
            .position(name)
            .ok_or_else(|| Error::parse(format!("unknown element {name:?} in table key {key:?}")))?;
        if mask.contains(i) {
            return Err(Error::parse(format!("element {name:?} repeated in table key {key:?}")));
        }
        mask = mask.with(i);
    }
    Ok(mask)
}

fn build(ground: &GroundSet, node: NodeSpec) -> Result<SubmodularFn> {
    Ok(match node {
        NodeSpec::Table { values } => {
            let mut table: Vec<Option<i64>> = vec![None; ground.subset_count()];
            table[0] = Some(0);
            let mut explicit_empty = false;
            for (key, v) in values {
                let m = subset_key(ground, &key)?;
                if m.is_empty() {
                    if explicit_empty {
                        return Err(Error::parse("empty set listed twice"));
                    }
                    explicit_empty = true;
                    table[0] = Some(v);
                } else if table[m.index()].replace(v).is_some() {
                    return Err(Error::parse(format!("subset {key:?} listed twice")));
                }
            }
            let values = table
                .into_iter()
                .enumerate()
                .map(|(m, v)| {
                    v.ok_or_else(|| {
                        Error::parse(format!(
                            "table misses subset {}",
                            ground.format_mask(SubsetMask(m as u32))
                        ))
                    })
                })
                .collect::<Result<Vec<i64>>>()?;
            SubmodularFn::table(ground.clone(), values)?
        }
        NodeSpec::Uniform { rank } => SubmodularFn::uniform(ground.clone(), rank)?,
        NodeSpec::Partition { blocks, caps } => {
            let masks = blocks
                .iter()
                .map(|b| ground.mask_of(b.iter().map(String::as_str)))
                .collect::<Result<Vec<_>>>()?;
            SubmodularFn::partition(ground.clone(), masks, caps)?
        }
        NodeSpec::Graphic { vertices, edges } => {
            SubmodularFn::graphic(ground.clone(), vertices, edges.iter().map(|e| (e[0], e[1])).collect())?
        }
        NodeSpec::Dual { inner } => build(ground, *inner)?.dual(),
        NodeSpec::Shift { a, inner } => build(ground, *inner)?.shift(vector(ground, a)?)?,
        NodeSpec::Reduce { a, inner } => build(ground, *inner)?.reduce(vector(ground, a)?)?,
        NodeSpec::ReduceAt { element, c, inner } => {
            let e = ground
                .position(&element)
                .ok_or_else(|| Error::parse(format!("unknown element {element:?}")))?;
            build(ground, *inner)?.reduce_at(e, c)?
        }
        NodeSpec::Scale { r, inner } => build(ground, *inner)?.scale(r)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::DEFAULT_LIMIT_N;

    fn parse(s: &str) -> Result<Instance> {
        Instance::from_json(s, DEFAULT_LIMIT_N)
    }

    #[test]
    fn parses_every_node_type() {
        let inst = parse(
            r#"{"ground":["a","b","c"],
                "f":{"type":"scale","r":2,"inner":{"type":"shift","a":[1,0,0],
                     "inner":{"type":"reduce_at","element":"b","c":0,
                     "inner":{"type":"reduce","a":[1,1,1],
                     "inner":{"type":"dual","inner":{"type":"dual","inner":{"type":"uniform","rank":2}}}}}}},
                "w":[1,2,3],"k":2}"#,
        )
        .unwrap();
        assert_eq!(inst.k, Some(2));
        assert_eq!(inst.w.unwrap().0, vec![1, 2, 3]);
        assert_eq!(inst.f.n(), 3);

        let p = parse(r#"{"ground":["a","b","c","d"],"f":{"type":"partition","blocks":[["a","b"],["c","d"]],"caps":[1,1]}}"#).unwrap();
        assert_eq!(p.f.total(), 2);
        let g = parse(r#"{"ground":["x","y","z"],"f":{"type":"graphic","vertices":3,"edges":[[0,1],[1,2],[0,2]]}}"#).unwrap();
        assert_eq!(g.f.total(), 2);
    }

    #[test]
    fn table_keys_accept_any_name_order() {
        let inst = parse(
            r#"{"ground":["a","b"],"f":{"type":"table","values":{"a":1,"b":1,"b,a":1}}}"#,
        )
        .unwrap();
        assert_eq!(inst.f.values(), vec![0, 1, 1, 1]);
    }

    #[test]
    fn malformed_inputs_are_parse_errors() {
        let cases = [
            r#"{"ground":["a","b"],"f":{"type":"table","values":{"a":1,"b":1}}}"#,
            r#"{"ground":["a","b"],"f":{"type":"table","values":{"a":1,"b":1,"a,b":1,"b,a":2}}}"#,
            r#"{"ground":["a","a"],"f":{"type":"uniform","rank":1}}"#,
            r#"{"ground":["a"],"f":{"type":"nonsense"}}"#,
            r#"{"ground":["a","b"],"f":{"type":"uniform","rank":1},"w":[1]}"#,
            r#"{"ground":["a","b"],"f":{"type":"graphic","vertices":2,"edges":[[0,1]]}}"#,
            r#"{"ground":["a","b"],"f":{"type":"reduce_at","element":"z","c":0,"inner":{"type":"uniform","rank":1}}}"#,
            "not json",
        ];
        for c in cases {
            assert!(matches!(parse(c), Err(Error::Parse(_))), "{c}");
        }
    }

    #[test]
    fn limit_is_applied() {
        let s = r#"{"ground":["a","b","c"],"f":{"type":"uniform","rank":1}}"#;
        assert!(matches!(Instance::from_json(s, 2), Err(Error::Parse(_))));
        assert!(Instance::from_json(s, 3).is_ok());
    }
}
