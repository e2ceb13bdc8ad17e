//! JSON form of [`FuncExpr`]: one-key objects tagged by atom or combinator
//! name. Emission is canonical: object keys in fixed order, children of
//! sum/max/min sorted by their own emitted text.

use serde_json::{json, Map, Value};

use super::FuncExpr;
use crate::error::{Error, Result};
use crate::geometry::HPolyhedron;

pub fn parse_func(text: &str) -> Result<FuncExpr> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    parse_func_value(&v, "$")
}

fn fields<'a>(v: &'a Value, loc: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let m = v.as_object().ok_or_else(|| Error::parse(loc, "expected an object"))?;
    for k in m.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::parse(format!("{loc}.{k}"), format!("unknown key \"{k}\"")));
        }
    }
    for k in allowed {
        if !m.contains_key(*k) {
            return Err(Error::parse(loc, format!("missing key \"{k}\"")));
        }
    }
    Ok(m)
}

fn num(v: &Value, loc: &str) -> Result<f64> {
    v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| Error::parse(loc, "expected a finite number"))
}

fn vector(v: &Value, loc: &str) -> Result<Vec<f64>> {
    let a = v.as_array().ok_or_else(|| Error::parse(loc, "expected an array of numbers"))?;
    a.iter().enumerate().map(|(i, x)| num(x, &format!("{loc}[{i}]"))).collect()
}

fn matrix(v: &Value, loc: &str) -> Result<Vec<Vec<f64>>> {
    let a = v.as_array().ok_or_else(|| Error::parse(loc, "expected an array of rows"))?;
    a.iter().enumerate().map(|(i, r)| vector(r, &format!("{loc}[{i}]"))).collect()
}

fn poly(v: &Value, loc: &str) -> Result<HPolyhedron> {
    serde_json::from_value(v.clone()).map_err(|e| Error::parse(loc, e.to_string()))
}

fn children(v: &Value, loc: &str) -> Result<Vec<FuncExpr>> {
    let a = v.as_array().ok_or_else(|| Error::parse(loc, "expected an array of functions"))?;
    if a.is_empty() {
        return Err(Error::parse(loc, "empty list"));
    }
    a.iter().enumerate().map(|(i, c)| parse_func_value(c, &format!("{loc}[{i}]"))).collect()
}

/// Parses the tagged form at JSON path `loc` (used in error locations).
pub fn parse_func_value(v: &Value, loc: &str) -> Result<FuncExpr> {
    let m = v.as_object().ok_or_else(|| Error::parse(loc, "expected a one-key object"))?;
    if m.len() != 1 {
        return Err(Error::parse(loc, format!("expected exactly one tag, found {}", m.len())));
    }
    let (tag, body) = m.iter().next().unwrap();
    let at = format!("{loc}.{tag}");
    let lin = |body: &Value| -> Result<(Vec<f64>, f64)> {
        let f = fields(body, &at, &["c", "beta"])?;
        Ok((vector(&f["c"], &format!("{at}.c"))?, num(&f["beta"], &format!("{at}.beta"))?))
    };
    let f = match tag.as_str() {
        "affine" => {
            let (c, beta) = lin(body)?;
            FuncExpr::affine(c, beta)
        }
        "exp_affine" => {
            let (c, beta) = lin(body)?;
            FuncExpr::exp_affine(c, beta)
        }
        "pw" => {
            let (c, beta) = lin(body)?;
            FuncExpr::pw(c, beta)
        }
        "power_abs" => {
            let f = fields(body, &at, &["c", "beta", "p"])?;
            let p = num(&f["p"], &format!("{at}.p"))?;
            if p < 1.0 {
                return Err(Error::parse(format!("{at}.p"), "exponent must be at least 1"));
            }
            FuncExpr::power_abs(vector(&f["c"], &format!("{at}.c"))?, num(&f["beta"], &format!("{at}.beta"))?, p)
        }
        "quad" => {
            let f = fields(body, &at, &["Q"])?;
            FuncExpr::quad(matrix(&f["Q"], &format!("{at}.Q"))?)
        }
        "norm" => {
            fields(body, &at, &[])?;
            FuncExpr::Norm
        }
        "dist" => FuncExpr::dist(poly(body, &at)?).map_err(|e| Error::parse(&at, e.to_string()))?,
        "indicator" => FuncExpr::indicator(poly(body, &at)?),
        "sum" => FuncExpr::sum(children(body, &at)?),
        "max" => FuncExpr::max(children(body, &at)?),
        "min" => FuncExpr::min(children(body, &at)?),
        "scale" => {
            let f = fields(body, &at, &["alpha", "f"])?;
            let alpha = num(&f["alpha"], &format!("{at}.alpha"))?;
            if alpha <= 0.0 {
                return Err(Error::parse(format!("{at}.alpha"), "alpha must be positive"));
            }
            FuncExpr::scale(alpha, parse_func_value(&f["f"], &format!("{at}.f"))?)
        }
        other => return Err(Error::parse(loc, format!("unknown tag \"{other}\""))),
    };
    Ok(f)
}

pub fn emit_value(f: &FuncExpr) -> Value {
    let list = |fs: &[FuncExpr]| {
        let mut items: Vec<(String, Value)> = fs
            .iter()
            .map(|c| {
                let v = emit_value(c);
                (v.to_string(), v)
            })
            .collect();
        items.sort_by(|a, b| a.0.cmp(&b.0));
        Value::Array(items.into_iter().map(|(_, v)| v).collect())
    };
    match f {
        FuncExpr::Affine { c, beta } => json!({"affine": {"c": c, "beta": beta}}),
        FuncExpr::ExpAffine { c, beta } => json!({"exp_affine": {"c": c, "beta": beta}}),
        FuncExpr::Pw { c, beta } => json!({"pw": {"c": c, "beta": beta}}),
        FuncExpr::PowerAbs { c, beta, p } => json!({"power_abs": {"c": c, "beta": beta, "p": p}}),
        FuncExpr::Quad { q } => json!({"quad": {"Q": q}}),
        FuncExpr::Norm => json!({"norm": {}}),
        FuncExpr::Dist(d) => json!({"dist": serde_json::to_value(&d.poly).unwrap()}),
        FuncExpr::Indicator(p) => json!({"indicator": serde_json::to_value(p).unwrap()}),
        FuncExpr::Sum(fs) => json!({"sum": list(fs)}),
        FuncExpr::Max(fs) => json!({"max": list(fs)}),
        FuncExpr::Min(fs) => json!({"min": list(fs)}),
        FuncExpr::Scale { alpha, f } => json!({"scale": {"alpha": alpha, "f": emit_value(f)}}),
    }
}

/// Canonical compact JSON text.
pub fn emit_func(f: &FuncExpr) -> String {
    emit_value(f).to_string()
}
