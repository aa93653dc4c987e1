//! JSON encodings, all versioned with `"schema": "g2lab/1"`.
//!
//! A scalar is the array of its rational coordinates as `"num/den"` strings.
//! Top-level documents carry their field as `{"m": int, "sqrts": [...]}`;
//! nested scalars are read in that field. On input a scalar may also be a
//! JSON integer, a single `"p/q"` string, or a coordinate array shorter than
//! the field degree (missing coordinates are zero).

use std::collections::BTreeMap;
use std::str::FromStr;

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::clifford::{CliffordAlgebra, CliffordElement};
use crate::decide::{Case, ClassificationReport, Evidence, SideConditions, TypeG2Verdict};
use crate::gallery::O2pmSubgroupSpec;
use crate::grouprep::{IsotypicDatum, MatrixGroup, DEFAULT_ORDER_CAP};
use crate::octonion::Octonion;
use crate::quadspace::{QuadSpace, Vector};
use crate::scalars::{try_sqrt, FieldTower, Matrix, Scalar};
use crate::{Error, Result};

pub const SCHEMA: &str = "g2lab/1";

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field \"{key}\"")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| bad(format!("{what} must be a nonnegative integer")))
}

fn as_bool(v: &Value, what: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| bad(format!("{what} must be a boolean")))
}

fn opt_usize(v: &Value, key: &str) -> Result<Option<usize>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => as_usize(x, key).map(Some),
    }
}

/// Fails unless `v` is an object whose `"schema"`, when present, is ours.
pub fn check_schema(v: &Value) -> Result<()> {
    if !v.is_object() {
        return Err(bad("document must be a JSON object"));
    }
    match v.get("schema") {
        None => Ok(()),
        Some(Value::String(s)) if s == SCHEMA => Ok(()),
        Some(other) => Err(bad(format!("unsupported schema {other}"))),
    }
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        let mut out = Map::new();
        out.insert("schema".into(), Value::String(SCHEMA.into()));
        out.extend(std::mem::take(m));
        *m = out;
    }
    v
}

fn parse_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => BigRational::from_str(s.trim()).map_err(|_| bad(format!("bad rational \"{s}\""))),
        Value::Number(n) => n
            .as_i64()
            .map(|k| BigRational::from_integer(k.into()))
            .ok_or_else(|| bad(format!("non-integer number {n}; write rationals as \"p/q\""))),
        _ => Err(bad(format!("expected a rational, found {v}"))),
    }
}

pub fn scalar_to_json(x: &Scalar) -> Value {
    Value::Array(x.to_strings().into_iter().map(Value::String).collect())
}

pub fn scalar_from_json(v: &Value, t: &FieldTower) -> Result<Scalar> {
    match v {
        Value::Array(a) => {
            if a.len() > t.degree() {
                return Err(bad(format!("scalar has {} coordinates, field degree is {}", a.len(), t.degree())));
            }
            let mut coords = a.iter().map(parse_rational).collect::<Result<Vec<_>>>()?;
            coords.resize(t.degree(), BigRational::from_integer(0.into()));
            Ok(t.from_coords(&coords)?)
        }
        _ => Ok(t.from_rational(&parse_rational(v)?)),
    }
}

pub fn vector_to_json(x: &[Scalar]) -> Value {
    Value::Array(x.iter().map(scalar_to_json).collect())
}

pub fn vector_from_json(v: &Value, t: &FieldTower) -> Result<Vector> {
    as_array(v, "vector")?.iter().map(|s| scalar_from_json(s, t)).collect()
}

pub fn tower_to_json(t: &FieldTower) -> Value {
    json!({
        "m": t.conductor(),
        "sqrts": t.radicands().iter().map(scalar_to_json).collect::<Vec<_>>(),
    })
}

pub fn tower_from_json(v: &Value) -> Result<FieldTower> {
    let m = field(v, "m")?.as_u64().filter(|&m| m >= 1).ok_or_else(|| bad("\"m\" must be a positive integer"))?;
    if m > 10_000 {
        return Err(bad(format!("conductor {m} is too large")));
    }
    let mut t = FieldTower::cyclotomic(m);
    if let Some(sq) = v.get("sqrts") {
        for d in as_array(sq, "sqrts")? {
            let d = scalar_from_json(d, &t)?;
            if d.is_zero() || try_sqrt(&d).is_some() {
                return Err(bad("radicand is zero or already a square"));
            }
            t = t.push_sqrt_unchecked(&d)?.0;
        }
    }
    Ok(t)
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|r| vector_to_json(&m.row(r))).collect())
}

pub fn matrix_from_json(v: &Value, t: &FieldTower) -> Result<Matrix> {
    let rows = as_array(v, "matrix")?;
    let rows = rows.iter().map(|r| vector_from_json(r, t)).collect::<Result<Vec<_>>>()?;
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.is_empty() || rows.iter().any(|r| r.len() != cols) {
        return Err(bad("matrix rows must be nonempty and of equal length"));
    }
    Ok(Matrix::from_rows(t, rows))
}

pub fn group_to_json(g: &MatrixGroup) -> Value {
    let mut v = json!({
        "field": tower_to_json(g.tower()),
        "dim": g.dim(),
        "generators": g.generators().iter().map(matrix_to_json).collect::<Vec<_>>(),
    });
    if g.cap() != DEFAULT_ORDER_CAP {
        v["cap"] = json!(g.cap());
    }
    with_schema(v)
}

pub fn group_from_json(v: &Value) -> Result<MatrixGroup> {
    check_schema(v)?;
    let t = tower_from_json(field(v, "field")?)?;
    let dim = as_usize(field(v, "dim")?, "dim")?;
    let gens = as_array(field(v, "generators")?, "generators")?
        .iter()
        .map(|m| matrix_from_json(m, &t))
        .collect::<Result<Vec<_>>>()?;
    let mut g = MatrixGroup::new(&t, dim, gens)?;
    if let Some(cap) = opt_usize(v, "cap")? {
        g = g.with_cap(cap);
    }
    Ok(g)
}

pub fn quadspace_to_json(q: &QuadSpace) -> Value {
    with_schema(json!({
        "field": tower_to_json(q.tower()),
        "dim": q.dim(),
        "gram": matrix_to_json(q.gram()),
    }))
}

pub fn quadspace_from_json(v: &Value) -> Result<QuadSpace> {
    check_schema(v)?;
    let t = tower_from_json(field(v, "field")?)?;
    let gram = matrix_from_json(field(v, "gram")?, &t)?;
    if let Some(d) = opt_usize(v, "dim")? {
        if d != gram.rows() {
            return Err(Error::DimensionMismatch { expected: d, got: gram.rows() });
        }
    }
    QuadSpace::new(gram)
}

pub fn octonion_to_json(x: &Octonion) -> Value {
    let t = x.a().tower();
    with_schema(json!({
        "field": tower_to_json(t),
        "a": scalar_to_json(x.a()),
        "u": vector_to_json(x.u()),
        "v": vector_to_json(x.v()),
        "b": scalar_to_json(x.b()),
    }))
}

pub fn octonion_from_json(v: &Value) -> Result<Octonion> {
    check_schema(v)?;
    let t = tower_from_json(field(v, "field")?)?;
    let three = |key: &str| -> Result<[Scalar; 3]> {
        let xs = vector_from_json(field(v, key)?, &t)?;
        xs.try_into().map_err(|_| bad(format!("\"{key}\" must have 3 entries")))
    };
    Ok(Octonion::new(scalar_from_json(field(v, "a")?, &t)?, three("u")?, three("v")?, scalar_from_json(field(v, "b")?, &t)?))
}

/// The algebra descriptor is the form and the orthogonal basis it uses.
pub fn clifford_element_to_json(x: &CliffordElement) -> Value {
    let alg = x.algebra();
    let masks: Map<String, Value> = x.terms().iter().map(|(m, c)| (m.to_string(), scalar_to_json(c))).collect();
    with_schema(json!({
        "algebra": {
            "field": tower_to_json(alg.tower()),
            "gram": matrix_to_json(alg.space().gram()),
            "basis": matrix_to_json(alg.basis()),
        },
        "masks": masks,
    }))
}

pub fn clifford_element_from_json(v: &Value) -> Result<CliffordElement> {
    check_schema(v)?;
    let a = field(v, "algebra")?;
    let t = tower_from_json(field(a, "field")?)?;
    let space = QuadSpace::new(matrix_from_json(field(a, "gram")?, &t)?)?;
    let alg = match a.get("basis") {
        Some(b) => CliffordAlgebra::from_orthogonal_basis(&space, matrix_from_json(b, &t)?)?,
        None => CliffordAlgebra::new(&space)?,
    };
    let masks = field(v, "masks")?.as_object().ok_or_else(|| bad("\"masks\" must be an object"))?;
    let mut terms = Vec::with_capacity(masks.len());
    for (k, c) in masks {
        let mask: u32 = k.parse().map_err(|_| bad(format!("bad bitmask \"{k}\"")))?;
        if mask >> alg.dim() != 0 {
            return Err(bad(format!("bitmask {mask} out of range")));
        }
        terms.push((mask, scalar_from_json(c, &t)?));
    }
    Ok(CliffordElement::from_terms(&alg, terms))
}

pub fn o2pm_spec_to_json(s: &O2pmSubgroupSpec) -> Value {
    let t = s.generators.first().map_or_else(FieldTower::rationals, |(m, _)| m.tower().clone());
    with_schema(json!({
        "field": tower_to_json(&t),
        "generators": s.generators.iter().map(|(m, mu)| json!({"mat": matrix_to_json(m), "mu": mu})).collect::<Vec<_>>(),
    }))
}

/// Without a `"field"` the default gallery field is used.
pub fn o2pm_spec_from_json(v: &Value) -> Result<O2pmSubgroupSpec> {
    check_schema(v)?;
    let t = match v.get("field") {
        Some(f) => tower_from_json(f)?,
        None => crate::gallery::default_tower(),
    };
    let mut generators = Vec::new();
    for g in as_array(field(v, "generators")?, "generators")? {
        let m = matrix_from_json(field(g, "mat")?, &t)?;
        if m.rows() != 2 || m.cols() != 2 {
            return Err(bad("O2 generators must be 2x2"));
        }
        let mu = match field(g, "mu")?.as_i64() {
            Some(1) => 1,
            Some(-1) => -1,
            _ => return Err(Error::SimilitudeFactorNotPlusMinusOne),
        };
        generators.push((m, mu));
    }
    if generators.is_empty() {
        return Err(bad("no generators"));
    }
    Ok(O2pmSubgroupSpec { generators })
}

pub fn verdict_to_json(v: &TypeG2Verdict, t: &FieldTower) -> Value {
    with_schema(json!({
        "field": tower_to_json(t),
        "type_g2": v.is_type_g2,
        "abc": v.abc.as_ref().map(|(a, b, c)| vec![scalar_to_json(a), scalar_to_json(b), scalar_to_json(c)]),
        "reason": v.reason,
    }))
}

pub fn verdict_from_json(v: &Value) -> Result<TypeG2Verdict> {
    check_schema(v)?;
    let t = tower_from_json(field(v, "field")?)?;
    let abc = match v.get("abc") {
        None | Some(Value::Null) => None,
        Some(x) => {
            let xs = vector_from_json(x, &t)?;
            let [a, b, c]: [Scalar; 3] = xs.try_into().map_err(|_| bad("\"abc\" must have 3 entries"))?;
            Some((a, b, c))
        }
    };
    let reason = match v.get("reason") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(bad("\"reason\" must be a string")),
    };
    Ok(TypeG2Verdict { is_type_g2: as_bool(field(v, "type_g2")?, "type_g2")?, abc, reason })
}

pub fn case_from_str(s: &str) -> Result<Case> {
    [Case::AContained, Case::BGl2OrSl2, Case::CZ4xZ2, Case::DO2pm]
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| bad(format!("unknown case \"{s}\"")))
}

fn side_to_json(s: &SideConditions) -> Value {
    json!({"nonabelian": s.nonabelian, "not_d8": s.not_d8, "similitude_nontrivial": s.similitude_nontrivial})
}

fn side_from_json(v: &Value) -> Result<SideConditions> {
    Ok(SideConditions {
        nonabelian: as_bool(field(v, "nonabelian")?, "nonabelian")?,
        not_d8: as_bool(field(v, "not_d8")?, "not_d8")?,
        similitude_nontrivial: as_bool(field(v, "similitude_nontrivial")?, "similitude_nontrivial")?,
    })
}

fn usizes(v: &Value, key: &str) -> Result<Vec<usize>> {
    as_array(field(v, key)?, key)?.iter().map(|x| as_usize(x, key)).collect()
}

fn evidence_to_json(e: &Evidence) -> Value {
    match e {
        Evidence::None => json!({"kind": "none"}),
        Evidence::Contained { beta, spinor } => json!({
            "kind": "contained",
            "beta": beta,
            "spinor": spinor.as_ref().map(|s| vector_to_json(s)),
        }),
        Evidence::SlPattern { order, j, trivial, cubic } => json!({
            "kind": "sl_pattern", "order": order, "j": j, "trivial": trivial, "cubic": [cubic.0, cubic.1],
        }),
        Evidence::GlPattern { order, p, p_dual, h, c } => json!({
            "kind": "gl_pattern", "order": order, "p": p, "p_dual": p_dual, "h": h, "c": c,
        }),
        Evidence::Z4xZ2 { order_statistics, characters } => {
            let stats: Map<String, Value> = order_statistics.iter().map(|(k, n)| (k.to_string(), json!(n))).collect();
            json!({"kind": "z4xz2", "order_statistics": stats, "characters": characters})
        }
        Evidence::JPattern { j, c, trivial, c_in_sym2, side } => json!({
            "kind": "j_pattern", "j": j, "c": c, "trivial": trivial, "c_in_sym2": c_in_sym2, "side": side_to_json(side),
        }),
        Evidence::PPattern { assignments, side } => json!({
            "kind": "p_pattern",
            "assignments": assignments.iter().map(|&(a, b, c, d)| vec![a, b, c, d]).collect::<Vec<_>>(),
            "side": side_to_json(side),
        }),
    }
}

fn evidence_from_json(v: &Value, t: &FieldTower) -> Result<Evidence> {
    let kind = field(v, "kind")?.as_str().ok_or_else(|| bad("\"kind\" must be a string"))?;
    let u = |key: &str| as_usize(field(v, key)?, key);
    Ok(match kind {
        "none" => Evidence::None,
        "contained" => {
            let beta = as_array(field(v, "beta")?, "beta")?
                .iter()
                .map(|x| x.as_i64().filter(|s| s.abs() == 1).map(|s| s as i8).ok_or_else(|| bad("beta entries must be ±1")))
                .collect::<Result<Vec<_>>>()?;
            let spinor = match v.get("spinor") {
                None | Some(Value::Null) => None,
                Some(s) => Some(vector_from_json(s, t)?),
            };
            Evidence::Contained { beta, spinor }
        }
        "sl_pattern" => {
            let cubic = usizes(v, "cubic")?;
            if cubic.len() != 2 {
                return Err(bad("\"cubic\" must have 2 entries"));
            }
            Evidence::SlPattern { order: u("order")?, j: u("j")?, trivial: u("trivial")?, cubic: (cubic[0], cubic[1]) }
        }
        "gl_pattern" => Evidence::GlPattern { order: u("order")?, p: u("p")?, p_dual: u("p_dual")?, h: u("h")?, c: u("c")? },
        "z4xz2" => {
            let stats = field(v, "order_statistics")?.as_object().ok_or_else(|| bad("\"order_statistics\" must be an object"))?;
            let mut order_statistics = BTreeMap::new();
            for (k, n) in stats {
                let k: u64 = k.parse().map_err(|_| bad(format!("bad element order \"{k}\"")))?;
                order_statistics.insert(k, as_usize(n, "order_statistics")?);
            }
            Evidence::Z4xZ2 { order_statistics, characters: usizes(v, "characters")? }
        }
        "j_pattern" => Evidence::JPattern {
            j: u("j")?,
            c: u("c")?,
            trivial: u("trivial")?,
            c_in_sym2: field(v, "c_in_sym2")?.as_u64().ok_or_else(|| bad("\"c_in_sym2\" must be an integer"))?,
            side: side_from_json(field(v, "side")?)?,
        },
        "p_pattern" => {
            let mut assignments = Vec::new();
            for a in as_array(field(v, "assignments")?, "assignments")? {
                let xs = as_array(a, "assignment")?.iter().map(|x| as_usize(x, "assignment")).collect::<Result<Vec<_>>>()?;
                if xs.len() != 4 {
                    return Err(bad("assignments have 4 entries"));
                }
                assignments.push((xs[0], xs[1], xs[2], xs[3]));
            }
            Evidence::PPattern { assignments, side: side_from_json(field(v, "side")?)? }
        }
        _ => return Err(bad(format!("unknown evidence kind \"{kind}\""))),
    })
}

fn join_all<'a>(start: &FieldTower, towers: impl IntoIterator<Item = &'a FieldTower>) -> Result<FieldTower> {
    let mut t = start.clone();
    for u in towers {
        t = t.join(u).ok_or(Error::TowerMismatch)?;
    }
    Ok(t)
}

/// Fails only when the report mixes towers with no common extension.
pub fn report_to_json(r: &ClassificationReport) -> Result<Value> {
    let mut towers: Vec<&FieldTower> = Vec::new();
    for c in &r.components {
        towers.push(c.projector.tower());
        towers.extend(c.character.iter().map(|x| x.tower()));
    }
    if let Evidence::Contained { spinor: Some(s), .. } = &r.evidence {
        towers.extend(s.iter().map(|x| x.tower()));
    }
    let t = join_all(&FieldTower::rationals(), towers)?;
    let components: Vec<Value> = r
        .components
        .iter()
        .map(|c| {
            json!({
                "dim": c.dim,
                "multiplicity": c.multiplicity,
                "selfdual": c.selfdual,
                "character": vector_to_json(&c.character),
                "projector": matrix_to_json(&c.projector),
            })
        })
        .collect();
    Ok(with_schema(json!({
        "field": tower_to_json(&t),
        "order": r.order,
        "elementwise_g2": r.elementwise_g2,
        "failing_element": r.failing_element,
        "witt_index": r.witt_index,
        "case": r.case.map(|c| c.as_str()),
        "evidence": evidence_to_json(&r.evidence),
        "components": components,
        "tower_extensions": r.tower_extensions,
    })))
}

pub fn report_from_json(v: &Value) -> Result<ClassificationReport> {
    check_schema(v)?;
    let t = tower_from_json(field(v, "field")?)?;
    let mut components = Vec::new();
    for c in as_array(field(v, "components")?, "components")? {
        components.push(IsotypicDatum {
            projector: matrix_from_json(field(c, "projector")?, &t)?,
            dim: as_usize(field(c, "dim")?, "dim")?,
            multiplicity: as_usize(field(c, "multiplicity")?, "multiplicity")?,
            selfdual: as_bool(field(c, "selfdual")?, "selfdual")?,
            character: vector_from_json(field(c, "character")?, &t)?,
        });
    }
    let case = match v.get("case") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(case_from_str(s)?),
        Some(_) => return Err(bad("\"case\" must be a string")),
    };
    let tower_extensions = as_array(field(v, "tower_extensions")?, "tower_extensions")?
        .iter()
        .map(|s| s.as_str().map(String::from).ok_or_else(|| bad("tower extensions are strings")))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassificationReport {
        order: as_usize(field(v, "order")?, "order")?,
        elementwise_g2: as_bool(field(v, "elementwise_g2")?, "elementwise_g2")?,
        failing_element: opt_usize(v, "failing_element")?,
        witt_index: opt_usize(v, "witt_index")?,
        case,
        evidence: evidence_from_json(field(v, "evidence")?, &t)?,
        components,
        tower_extensions,
    })
}

/// Reads a document, resolving nothing beyond UTF-8 and JSON syntax.
pub fn parse_document(text: &str) -> Result<Value> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON: {e}")))?;
    check_schema(&v)?;
    Ok(v)
}
