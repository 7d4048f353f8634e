//! Canonical JSON for series, matrices, operators and geometry files.
//!
//! Rationals are always `"num/den"` strings. Maps are emitted in their sorted
//! order, so output is byte-stable.

use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::cohomology::{CohomologyRing, RingPresentation};
use crate::connection::{format_operator, DiffOperator};
use crate::formal::{BiLaurent, QSeries, Series, Window};
use crate::ifunction::{GeometrySpec, Twist, TwistKind, Weight};
use crate::matrix::SeriesMatrix;
use crate::{fmt_q, parse_q, Error, Result, Q};

pub fn rat(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

fn parse_rat(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) => n
            .as_i64()
            .map(crate::q)
            .ok_or_else(|| Error::Invalid(format!("not an integer: {n}"))),
        _ => Err(Error::Invalid(format!("not a rational: {v}"))),
    }
}

fn terms_of(s: &Series, basis: Option<&str>) -> Vec<Value> {
    let mut out = Vec::new();
    for (d, c) in s.terms() {
        for (e, l, x) in c.terms() {
            let mut t = json!({ "q": d, "hbar": e, "lambda": l });
            if let Some(b) = basis {
                t["basis"] = json!(b);
            }
            t["coeff"] = rat(x);
            out.push(t);
        }
    }
    out
}

/// `{"box": [...], "terms": [{"q", "hbar", "lambda", "coeff"}]}`.
pub fn series(s: &Series) -> Value {
    json!({ "box": s.bx(), "terms": terms_of(s, None) })
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Invalid(format!("missing field {key:?}")))
}

fn u32s(v: &Value) -> Result<Vec<u32>> {
    Vec::<u32>::deserialize(v).map_err(|e| Error::Invalid(e.to_string()))
}

fn int(v: &Value, key: &str) -> Result<i32> {
    field(v, key)?
        .as_i64()
        .map(|x| x as i32)
        .ok_or_else(|| Error::Invalid(format!("{key} must be an integer")))
}

fn add_term(s: &mut Series, t: &Value) -> Result<()> {
    let d = u32s(field(t, "q")?)?;
    let c = BiLaurent::monomial(int(t, "hbar")?, int(t, "lambda")?, parse_rat(field(t, "coeff")?)?, Window::UNBOUNDED);
    s.add_at(&d, &c);
    Ok(())
}

/// Inverse of [`series`]; the window is unbounded.
pub fn series_from(v: &Value) -> Result<Series> {
    let bx = u32s(field(v, "box")?)?;
    let mut s = Series::zero(&bx, Window::UNBOUNDED);
    for t in field(v, "terms")?.as_array().into_iter().flatten() {
        add_term(&mut s, t)?;
    }
    Ok(s)
}

/// Cohomology-valued series with basis names on every term.
pub fn qseries(j: &QSeries) -> Value {
    let ring = j.ring();
    let mut terms = Vec::new();
    for (a, c) in j.comps().iter().enumerate() {
        terms.extend(terms_of(c, Some(&ring.basis_name(a))));
    }
    let basis: Vec<String> = (0..ring.dim()).map(|a| ring.basis_name(a)).collect();
    json!({ "prefactor": j.has_prefactor(), "box": j.bx(), "basis": basis, "terms": terms })
}

/// Inverse of [`qseries`] over a known ring.
pub fn qseries_from(v: &Value, ring: Arc<CohomologyRing>) -> Result<QSeries> {
    let bx = u32s(field(v, "box")?)?;
    let mut comps = vec![Series::zero(&bx, Window::UNBOUNDED); ring.dim()];
    for t in field(v, "terms")?.as_array().into_iter().flatten() {
        let name = field(t, "basis")?.as_str().unwrap_or_default();
        let a = ring
            .index_of_name(name)
            .ok_or_else(|| Error::Invalid(format!("unknown basis element {name:?}")))?;
        add_term(&mut comps[a], t)?;
    }
    let pre = field(v, "prefactor")?.as_bool().unwrap_or(false);
    QSeries::from_comps(ring, comps, pre)
}

/// `{"box": [...], "rows": [[terms, ...], ...]}`.
pub fn matrix(m: &SeriesMatrix) -> Value {
    let rows: Vec<Vec<Value>> = m
        .rows
        .iter()
        .map(|r| r.iter().map(|s| Value::Array(terms_of(s, None))).collect())
        .collect();
    json!({ "box": m.bx(), "rows": rows })
}

/// Inverse of [`matrix`].
pub fn matrix_from(v: &Value) -> Result<SeriesMatrix> {
    let bx = u32s(field(v, "box")?)?;
    let mut rows = Vec::new();
    for r in field(v, "rows")?.as_array().into_iter().flatten() {
        let mut row = Vec::new();
        for e in r.as_array().into_iter().flatten() {
            let mut s = Series::zero(&bx, Window::UNBOUNDED);
            for t in e.as_array().into_iter().flatten() {
                add_term(&mut s, t)?;
            }
            row.push(s);
        }
        rows.push(row);
    }
    let n = rows.len();
    let mut m = SeriesMatrix::zero(n, rows.first().map_or(0, Vec::len), &bx, Window::UNBOUNDED);
    m.rows = rows;
    Ok(m)
}

pub fn operator(op: &DiffOperator) -> Value {
    let terms: Vec<Value> = op
        .terms
        .iter()
        .map(|t| json!({ "theta": t.theta, "y": t.y, "hbar": t.hbar, "lambda": t.lambda, "coeff": rat(&t.coeff) }))
        .collect();
    json!({ "text": format_operator(op), "terms": terms })
}

pub fn rational_matrix(m: &[Vec<Q>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(rat).collect())).collect())
}

pub fn error(e: &Error) -> Value {
    json!({ "error": { "kind": e.kind(), "message": e.to_string() } })
}

#[derive(Deserialize)]
struct TwistFile {
    class: Vec<i64>,
    weight: Value,
    #[serde(default = "default_kind")]
    kind: String,
}

fn default_kind() -> String {
    "denominator".into()
}

#[derive(Deserialize)]
struct GeometryFile {
    #[serde(default)]
    name: Option<String>,
    weights: Vec<Vec<i64>>,
    /// Each relation is a product of linear forms in the generators.
    relations: Vec<Vec<Vec<i64>>>,
    #[serde(default)]
    twists: Vec<TwistFile>,
    #[serde(rename = "box")]
    bx: Vec<u32>,
    #[serde(default)]
    lambda: Option<[Value; 2]>,
    #[serde(default)]
    degree_cap: Option<u32>,
    #[serde(default)]
    eta: Option<Vec<Vec<Value>>>,
}

/// Parses a geometry file.
///
/// A twist weight is a rational multiple of `lambda`, or `"lambda1"` /
/// `"lambda2"` to refer to the file's `lambda` pair.
pub fn geometry(text: &str) -> Result<GeometrySpec> {
    let g: GeometryFile = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
    let k = g.weights.len();
    if k == 0 || g.bx.len() != k {
        return Err(Error::Invalid("box must have one bound per row of weights".into()));
    }
    let lambda = match &g.lambda {
        Some([a, b]) => (parse_rat(a)?, parse_rat(b)?),
        None => (crate::q(1), crate::q(1)),
    };
    let twists = g
        .twists
        .iter()
        .map(|t| {
            let weight = match t.weight.as_str() {
                Some("lambda1") => Weight::Lambda1,
                Some("lambda2") => Weight::Lambda2,
                _ => Weight::Rational(parse_rat(&t.weight)?),
            };
            let kind = match t.kind.as_str() {
                "denominator" => TwistKind::Denominator,
                "numerator" => TwistKind::Numerator,
                other => return Err(Error::Invalid(format!("unknown twist kind {other:?}"))),
            };
            if t.class.len() != k {
                return Err(Error::Invalid("twist class has the wrong length".into()));
            }
            Ok(Twist { class: t.class.clone(), weight, kind })
        })
        .collect::<Result<Vec<_>>>()?;
    let eta = g
        .eta
        .as_ref()
        .map(|m| m.iter().map(|r| r.iter().map(parse_rat).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>())
        .transpose()?;
    Ok(GeometrySpec {
        name: g.name.unwrap_or_else(|| "custom".into()),
        relations: RingPresentation::from_linear_products(k, &g.relations).relations,
        weights: g.weights,
        twists,
        bx: g.bx,
        lambda,
        degree_cap: g.degree_cap.unwrap_or(2 * k as u32 + 2),
        window: None,
        eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifunction::build_i;
    use crate::{q, qr};

    #[test]
    fn series_round_trip() {
        let mut s = Series::zero(&[2, 1], Window::UNBOUNDED);
        s.add_at(&[1, 0], &BiLaurent::monomial(-2, 1, qr(-7, 3), Window::UNBOUNDED));
        s.add_at(&[0, 1], &BiLaurent::monomial(0, 0, q(5), Window::UNBOUNDED));
        let v = series(&s);
        assert_eq!(series_from(&v).unwrap(), s);
        assert_eq!(series(&series_from(&v).unwrap()).to_string(), v.to_string());
        assert_eq!(v["terms"][1]["coeff"], "-7/3");
    }

    #[test]
    fn qseries_round_trip() {
        let i = build_i(&GeometrySpec::fn_(1, [2, 2])).unwrap();
        let v = qseries(&i);
        let back = qseries_from(&v, i.ring().clone()).unwrap();
        assert_eq!(qseries(&back).to_string(), v.to_string());
    }

    #[test]
    fn geometry_file_matches_preset() {
        let text = r#"{"weights": [[1, 1, -1, 0], [0, 0, 1, 1]],
            "relations": [[[1, 0], [1, 0]], [[-1, 1], [0, 1]]], "box": [2, 2], "degree_cap": 3}"#;
        let g = geometry(text).unwrap();
        let preset = GeometrySpec::fn_(1, [2, 2]);
        assert_eq!(g.relations, preset.relations);
        assert_eq!(qseries(&build_i(&g).unwrap()), qseries(&build_i(&preset).unwrap()));
    }

    #[test]
    fn error_object() {
        let v = error(&Error::NotConverged);
        assert_eq!(v["error"]["kind"], "NotConverged");
    }
}
