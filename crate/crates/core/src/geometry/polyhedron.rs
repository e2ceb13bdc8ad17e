use serde::{Deserialize, Serialize};

use super::cone::GenCone;
use super::dd;
use super::lp::{self, LinCon};
use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm};

pub const MAX_DIM: usize = 6;
pub const MAX_ROWS: usize = 16;

/// Activity band `1e-8 (1 + |x|)` on row residuals measured as distances
/// to the row hyperplanes.
pub fn tau_act(x: &[f64]) -> f64 {
    1e-8 * (1.0 + norm(x))
}

/// `{x | A x <= b, E x = d}` in dimension `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HPolyJson", into = "HPolyJson")]
pub struct HPolyhedron {
    n: usize,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    e: Vec<Vec<f64>>,
    d: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HPolyJson {
    #[serde(rename = "A", default)]
    a: Vec<Vec<f64>>,
    #[serde(default)]
    b: Vec<f64>,
    #[serde(rename = "E", default)]
    e: Vec<Vec<f64>>,
    #[serde(default)]
    d: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
}

impl TryFrom<HPolyJson> for HPolyhedron {
    type Error = Error;
    fn try_from(j: HPolyJson) -> Result<Self> {
        let n = j
            .dim
            .or_else(|| j.a.first().map(|r| r.len()))
            .or_else(|| j.e.first().map(|r| r.len()))
            .ok_or_else(|| Error::InvalidInput("polyhedron without rows needs \"dim\"".into()))?;
        HPolyhedron::new(n, j.a, j.b, j.e, j.d)
    }
}

impl From<HPolyhedron> for HPolyJson {
    fn from(p: HPolyhedron) -> Self {
        let dim = (p.a.is_empty() && p.e.is_empty()).then_some(p.n);
        HPolyJson { a: p.a, b: p.b, e: p.e, d: p.d, dim }
    }
}

impl HPolyhedron {
    pub fn new(n: usize, a: Vec<Vec<f64>>, b: Vec<f64>, e: Vec<Vec<f64>>, d: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if a.len() != b.len() || e.len() != d.len() {
            return Err(Error::InvalidInput("row count mismatch between A/b or E/d".into()));
        }
        for r in a.iter().chain(&e) {
            if r.len() != n {
                return Err(Error::InvalidInput(format!("row of length {} in dimension {n}", r.len())));
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite coefficient".into()));
            }
        }
        if b.iter().chain(&d).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite right-hand side".into()));
        }
        Ok(HPolyhedron { n, a, b, e, d })
    }

    pub fn whole_space(n: usize) -> Self {
        HPolyhedron { n, a: vec![], b: vec![], e: vec![], d: vec![] }
    }

    /// `{x | a·x <= b}`
    pub fn halfspace(a: Vec<f64>, b: f64) -> Self {
        HPolyhedron { n: a.len(), a: vec![a], b: vec![b], e: vec![], d: vec![] }
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn boxed(lo: &[f64], hi: &[f64]) -> Self {
        let n = lo.len();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..n {
            a.push(linalg::unit(n, i));
            b.push(hi[i]);
            a.push(linalg::neg(&linalg::unit(n, i)));
            b.push(-lo[i]);
        }
        HPolyhedron { n, a, b, e: vec![], d: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }
    pub fn b(&self) -> &[f64] {
        &self.b
    }
    pub fn e(&self) -> &[Vec<f64>] {
        &self.e
    }
    pub fn d(&self) -> &[f64] {
        &self.d
    }
    pub fn num_ineq(&self) -> usize {
        self.a.len()
    }
    pub fn num_eq(&self) -> usize {
        self.e.len()
    }

    pub fn check_caps(&self) -> Result<()> {
        if self.n > MAX_DIM {
            return Err(Error::DimensionLimit(format!("n = {} > {MAX_DIM}", self.n)));
        }
        if self.a.len() + self.e.len() > MAX_ROWS {
            return Err(Error::DimensionLimit(format!(
                "m + p = {} > {MAX_ROWS}",
                self.a.len() + self.e.len()
            )));
        }
        Ok(())
    }

    pub fn constraints(&self) -> Vec<LinCon> {
        let mut c: Vec<LinCon> = self.a.iter().zip(&self.b).map(|(a, b)| LinCon::le(a.clone(), *b)).collect();
        c.extend(self.e.iter().zip(&self.d).map(|(e, d)| LinCon::eq(e.clone(), *d)));
        c
    }

    /// Signed residual of inequality row i as a distance to its hyperplane.
    pub fn ineq_residual(&self, i: usize, x: &[f64]) -> f64 {
        let s = norm(&self.a[i]);
        if s == 0.0 {
            return -self.b[i];
        }
        (dot(&self.a[i], x) - self.b[i]) / s
    }

    pub fn eq_residual(&self, j: usize, x: &[f64]) -> f64 {
        let s = norm(&self.e[j]);
        if s == 0.0 {
            return -self.d[j];
        }
        (dot(&self.e[j], x) - self.d[j]) / s
    }

    /// Largest constraint violation (0 when x is feasible).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut v = 0.0f64;
        for i in 0..self.a.len() {
            v = v.max(self.ineq_residual(i, x));
        }
        for j in 0..self.e.len() {
            v = v.max(self.eq_residual(j, x).abs());
        }
        v
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.violation(x) <= tol
    }

    pub fn feasible_point(&self) -> Result<Option<Vec<f64>>> {
        lp::lp_feasible(self.n, &self.constraints())
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.feasible_point()?.is_none())
    }

    pub fn intersect(&self, other: &HPolyhedron) -> Result<HPolyhedron> {
        if self.n != other.n {
            return Err(Error::InvalidInput("dimension mismatch in intersection".into()));
        }
        let mut p = self.clone();
        p.a.extend(other.a.iter().cloned());
        p.b.extend(other.b.iter().copied());
        p.e.extend(other.e.iter().cloned());
        p.d.extend(other.d.iter().copied());
        Ok(p)
    }

    /// `self × other` in the concatenated space.
    pub fn product(&self, other: &HPolyhedron) -> HPolyhedron {
        let n = self.n + other.n;
        let pad = |r: &Vec<f64>, left: bool| {
            let mut v = vec![0.0; n];
            if left {
                v[..self.n].copy_from_slice(r);
            } else {
                v[self.n..].copy_from_slice(r);
            }
            v
        };
        let mut a: Vec<Vec<f64>> = self.a.iter().map(|r| pad(r, true)).collect();
        a.extend(other.a.iter().map(|r| pad(r, false)));
        let mut e: Vec<Vec<f64>> = self.e.iter().map(|r| pad(r, true)).collect();
        e.extend(other.e.iter().map(|r| pad(r, false)));
        let b = self.b.iter().chain(&other.b).copied().collect();
        let d = self.d.iter().chain(&other.d).copied().collect();
        HPolyhedron { n, a, b, e, d }
    }

    /// `{D A x <= D b}` for a positive diagonal `D`.
    pub fn row_scaled(&self, scales: &[f64]) -> HPolyhedron {
        let mut p = self.clone();
        for (i, s) in scales.iter().enumerate().take(p.a.len()) {
            p.a[i] = linalg::scale(&p.a[i], *s);
            p.b[i] *= s;
        }
        p
    }

    /// Whether `u` satisfies `A u <= 0, E u = 0` up to `tol` (row-normalized).
    pub fn in_recession(&self, u: &[f64], tol: f64) -> bool {
        self.a.iter().all(|r| dot(r, u) <= tol * norm(r).max(1e-300))
            && self.e.iter().all(|r| dot(r, u).abs() <= tol * norm(r).max(1e-300))
    }

    /// `{u | A u <= 0, E u = 0}` in generator form.
    pub fn recession_cone(&self) -> Result<GenCone> {
        self.check_caps()?;
        if self.is_empty()? {
            return Err(Error::EmptySet);
        }
        Ok(dd::cone_from_h(&self.a, &self.e, self.n))
    }

    /// `pos{A_i : i active at x} + span{rows of E}`.
    pub fn normal_cone_at(&self, x: &[f64]) -> Result<GenCone> {
        if x.len() != self.n {
            return Err(Error::InvalidInput("point dimension mismatch".into()));
        }
        let tau = tau_act(x);
        let v = self.violation(x);
        if v > tau {
            return Err(Error::NotMember(v));
        }
        let gens: Vec<Vec<f64>> = (0..self.a.len())
            .filter(|&i| self.ineq_residual(i, x).abs() <= tau)
            .map(|i| self.a[i].clone())
            .collect();
        Ok(GenCone::new(gens, self.e.clone()))
    }

    pub fn active_set(&self, x: &[f64]) -> Vec<usize> {
        let tau = tau_act(x);
        (0..self.a.len()).filter(|&i| self.ineq_residual(i, x).abs() <= tau).collect()
    }
}
