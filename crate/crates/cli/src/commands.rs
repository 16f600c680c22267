//! The four verbs. Each returns a [`Report`] instead of printing so that
//! directory runs can keep output in file order.

use std::fmt::Write as _;
use std::path::Path;

use polybase::oracle::{cr_exact, enumerate_base_points, enumerate_vertices, OracleBudget};
use polybase::polytope::bounding_box;
use polybase::submodular::Violation;
use polybase::{decompose as run_decompose, dimension, verify, Error, Instance, IntVector, SubmodularFn};
use serde_json::{json, Map, Value};

use crate::Target;

#[derive(Debug, Default)]
pub struct Report {
    pub out: String,
    pub err: String,
    pub code: u8,
}

impl Report {
    fn failure(code: u8, msg: impl std::fmt::Display) -> Self {
        Report { out: String::new(), err: format!("error: {msg}\n"), code }
    }
}

impl From<Error> for Report {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Usage(_) => 1,
            Error::Parse(_) => 2,
            Error::Invariant(_) => 3,
            Error::Budget(_) => 4,
        };
        Report::failure(code, e)
    }
}

fn load(path: &Path, limit_n: usize) -> Result<Instance, Report> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Report::failure(1, format_args!("cannot read {}: {e}", path.display())))?;
    Instance::from_json(&text, limit_n).map_err(Report::from)
}

fn collapse(r: Result<Report, Report>) -> Report {
    r.unwrap_or_else(|e| e)
}

fn describe_violation(f: &SubmodularFn, v: Violation) -> String {
    match v {
        Violation::NonzeroEmpty(x) => format!("f({{}}) = {x}, expected 0"),
        Violation::Pair(a, b) => {
            let g = f.ground();
            let (u, i) = (a.union(b), a.intersection(b));
            format!(
                "f({}) + f({}) = {} < {} = f({}) + f({})",
                g.format_mask(a),
                g.format_mask(b),
                f.value(a) + f.value(b),
                f.value(u) + f.value(i),
                g.format_mask(u),
                g.format_mask(i),
            )
        }
    }
}

fn require_submodular(f: &SubmodularFn) -> Result<(), Report> {
    match f.submodularity_violation() {
        None => Ok(()),
        Some(v) => Err(Report::failure(1, format_args!("f is not submodular: {}", describe_violation(f, v)))),
    }
}

pub fn check(path: &Path, limit_n: usize) -> Report {
    collapse((|| {
        let inst = load(path, limit_n)?;
        let f = &inst.f;
        let mut out = String::new();
        let violation = f.submodularity_violation();
        match violation {
            None => {
                let matroid = if f.is_matroid_rank() { "yes" } else { "no" };
                writeln!(out, "submodular: yes, matroid rank: {matroid}, dim B_f = {}", dimension(f)).unwrap();
            }
            Some(v) => {
                writeln!(out, "submodular: no, matroid rank: no").unwrap();
                writeln!(out, "violation: {}", describe_violation(f, v)).unwrap();
            }
        }
        writeln!(out, "f(E) = {}", f.total()).unwrap();
        if violation.is_none() {
            let (lo, hi) = bounding_box(f);
            writeln!(out, "bounding box: {lo:?} <= x <= {hi:?}").unwrap();
        }
        Ok(Report { out, err: String::new(), code: if violation.is_some() { 1 } else { 0 } })
    })())
}

fn certificate(inst: &Instance, target: &Target, trace: bool, verify_flag: bool) -> Result<Report, Report> {
    let f = &inst.f;
    let k = target.k.or(inst.k).ok_or_else(|| Report::failure(1, "no multiplicity: pass --k or set \"k\""))?;
    let w = match (&target.w, &inst.w) {
        (Some(w), _) => IntVector(w.clone()),
        (None, Some(w)) => w.clone(),
        (None, None) => return Err(Report::failure(1, "no target: pass --w or set \"w\"")),
    };
    if w.len() != f.n() {
        return Err(Report::failure(1, format_args!("w has {} entries, ground set has {}", w.len(), f.n())));
    }
    require_submodular(f)?;
    let (d, tr) = run_decompose(f, &w, k)?;
    let dim = dimension(f);
    // Inserted in key order so the output is sorted whatever map backs Value.
    let mut cert = Map::new();
    cert.insert("bound_ok".into(), json!(d.distinct() <= dim + 1));
    cert.insert("dim".into(), json!(dim));
    cert.insert("distinct".into(), json!(d.distinct()));
    cert.insert("k".into(), json!(d.k));
    let terms: Vec<Value> =
        d.terms.iter().map(|t| json!({ "point": t.point.0, "weight": t.weight })).collect();
    cert.insert("terms".into(), Value::Array(terms));
    if trace {
        let v = serde_json::to_value(&tr).map_err(|e| Report::failure(3, e))?;
        cert.insert("trace".into(), v);
    }
    let mut code = 0;
    let mut err = String::new();
    if verify_flag {
        let report = verify(f, &d);
        if !report.ok {
            code = 3;
            for why in &report.failures {
                writeln!(err, "error: verification failed: {why}").unwrap();
            }
        }
        cert.insert("verify".into(), json!({ "failures": report.failures, "ok": report.ok }));
    }
    cert.insert("w".into(), json!(d.target.0));
    let mut out = serde_json::to_string(&Value::Object(cert)).map_err(|e| Report::failure(3, e))?;
    out.push('\n');
    Ok(Report { out, err, code })
}

pub fn decompose(path: &Path, limit_n: usize, target: &Target, trace: bool, verify_flag: bool) -> Report {
    collapse(load(path, limit_n).and_then(|inst| certificate(&inst, target, trace, verify_flag)))
}

pub fn oracle(path: &Path, limit_n: usize, k_max: i64) -> Report {
    collapse((|| {
        let inst = load(path, limit_n)?;
        let f = &inst.f;
        require_submodular(f)?;
        let cr = cr_exact(f, k_max, &OracleBudget::default())?;
        let n = f.n();
        let mut line = format!("cr ≥ {}, dim+1 = {}, n = {n}", cr.value, dimension(f) + 1);
        if let Some(r) = f.matroid_rank() {
            write!(line, ", n+r−1 = {}", n as i64 + r - 1).unwrap();
        }
        let (w, k) = &cr.witness;
        let out = format!("{line}\nwitness: w = {w:?}, k = {k} (searched k <= {})\n", cr.k_max);
        Ok(Report { out, err: String::new(), code: 0 })
    })())
}

pub fn enumerate(path: &Path, limit_n: usize, k: Option<i64>) -> Report {
    collapse((|| {
        let inst = load(path, limit_n)?;
        require_submodular(&inst.f)?;
        let k = k.unwrap_or(1);
        let f = inst.f.scale(k)?;
        let budget = OracleBudget::default();
        let points = enumerate_base_points(&f, &budget)?;
        let vertices = enumerate_vertices(&f, &budget)?;
        let scaled = if k == 1 { String::new() } else { format!("{k}·") };
        let mut out = String::new();
        writeln!(out, "integer points of {scaled}B_f: {}", points.len()).unwrap();
        for p in &points.points {
            writeln!(out, "  {p:?}").unwrap();
        }
        writeln!(out, "vertices of {scaled}B_f: {}", vertices.len()).unwrap();
        for p in &vertices.points {
            writeln!(out, "  {p:?}").unwrap();
        }
        Ok(Report { out, err: String::new(), code: 0 })
    })())
}
