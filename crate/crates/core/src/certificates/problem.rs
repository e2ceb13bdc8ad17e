use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::func::{emit_value, parse_func_value, FuncExpr};
use crate::geometry::HPolyhedron;

/// `min f over Ω`, with optional constraint functions `g_i <= 0`, `h_j = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    /// Absent for pure constraint systems (error bounds).
    pub f: Option<FuncExpr>,
    pub omega: HPolyhedron,
    pub g: Vec<FuncExpr>,
    pub h: Vec<FuncExpr>,
}

impl ProblemSpec {
    pub fn new(f: FuncExpr, omega: HPolyhedron) -> Result<Self> {
        let ps = ProblemSpec { f: Some(f), omega, g: vec![], h: vec![] };
        ps.validate()?;
        Ok(ps)
    }

    pub fn constraints(omega: HPolyhedron, g: Vec<FuncExpr>, h: Vec<FuncExpr>) -> Result<Self> {
        let ps = ProblemSpec { f: None, omega, g, h };
        ps.validate()?;
        Ok(ps)
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    pub fn objective(&self) -> Result<&FuncExpr> {
        self.f.as_ref().ok_or_else(|| Error::InvalidInput("problem has no objective \"f\"".into()))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        for f in self.f.iter().chain(&self.g).chain(&self.h) {
            f.validate(n)?;
        }
        if self.omega.is_empty()? {
            return Err(Error::EmptySet);
        }
        Ok(())
    }

    /// Keys: `f`, `omega` (a polyhedron; `{"dim": n}` for R^n), `g`, `h`.
    pub fn from_value(v: &Value, loc: &str) -> Result<Self> {
        let m: &Map<String, Value> = v.as_object().ok_or_else(|| Error::parse(loc, "expected an object"))?;
        for k in m.keys() {
            if !["f", "omega", "g", "h"].contains(&k.as_str()) {
                return Err(Error::parse(format!("{loc}.{k}"), format!("unknown key \"{k}\"")));
            }
        }
        let omega: HPolyhedron = match m.get("omega") {
            Some(o) => serde_json::from_value(o.clone()).map_err(|e| Error::parse(format!("{loc}.omega"), e.to_string()))?,
            None => return Err(Error::parse(loc, "missing key \"omega\"")),
        };
        let f = m.get("f").map(|f| parse_func_value(f, &format!("{loc}.f"))).transpose()?;
        let list = |key: &str| -> Result<Vec<FuncExpr>> {
            match m.get(key) {
                None => Ok(vec![]),
                Some(Value::Array(a)) => {
                    a.iter().enumerate().map(|(i, g)| parse_func_value(g, &format!("{loc}.{key}[{i}]"))).collect()
                }
                Some(_) => Err(Error::parse(format!("{loc}.{key}"), "expected an array of functions")),
            }
        };
        let ps = ProblemSpec { f, omega, g: list("g")?, h: list("h")? };
        ps.validate().map_err(|e| match e {
            Error::Parse { .. } => e,
            other => Error::parse(loc, other.to_string()),
        })?;
        Ok(ps)
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        if let Some(f) = &self.f {
            m.insert("f".into(), emit_value(f));
        }
        m.insert("omega".into(), serde_json::to_value(&self.omega).unwrap());
        if !self.g.is_empty() {
            m.insert("g".into(), json!(self.g.iter().map(emit_value).collect::<Vec<_>>()));
        }
        if !self.h.is_empty() {
            m.insert("h".into(), json!(self.h.iter().map(emit_value).collect::<Vec<_>>()));
        }
        Value::Object(m)
    }
}
