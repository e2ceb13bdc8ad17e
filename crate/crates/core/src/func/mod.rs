//! Expression trees for extended-real-valued functions and their
//! point-level subdifferentials.

mod json;
mod restrict;

pub use json::{emit_func, emit_value, parse_func, parse_func_value};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::lp::{self, LinCon, LpResult};
use crate::geometry::{tau_act, GenCone, HPolyhedron, Projector};
use crate::linalg::{self, dot, norm};

pub const OVERFLOW: f64 = 1e300;

/// Tie band for active branches of max/min.
pub fn tau_tie(v: f64) -> f64 {
    1e-9 * (1.0 + v.abs())
}

/// Distance to a polyhedron; the projector is precomputed from the faces.
#[derive(Clone, Debug)]
pub struct DistAtom {
    pub poly: HPolyhedron,
    proj: Projector,
}

impl DistAtom {
    pub fn new(poly: HPolyhedron) -> Result<Self> {
        let proj = Projector::new(&poly)?;
        Ok(DistAtom { poly, proj })
    }

    pub fn projector(&self) -> &Projector {
        &self.proj
    }
}

impl PartialEq for DistAtom {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FuncExpr {
    /// `<c,x> + beta`
    Affine { c: Vec<f64>, beta: f64 },
    /// `x^T Q x`
    Quad { q: Vec<Vec<f64>> },
    /// `exp(<c,x> + beta)`
    ExpAffine { c: Vec<f64>, beta: f64 },
    /// `|<c,x> + beta|^p`, `p >= 1`
    PowerAbs { c: Vec<f64>, beta: f64, p: f64 },
    Norm,
    Dist(Box<DistAtom>),
    /// `s` for `s >= 0` and `exp(s) - 1` for `s < 0`, where `s = <c,x> + beta`.
    Pw { c: Vec<f64>, beta: f64 },
    Sum(Vec<FuncExpr>),
    Scale { alpha: f64, f: Box<FuncExpr> },
    Max(Vec<FuncExpr>),
    Min(Vec<FuncExpr>),
    Indicator(HPolyhedron),
}

/// Finite union of polytopes (vertex lists), plus an optional polyhedral
/// cone added to every polytope.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SubdiffPointSet {
    pub polytopes: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<GenCone>,
}

impl SubdiffPointSet {
    pub fn point(v: Vec<f64>) -> Self {
        SubdiffPointSet { polytopes: vec![vec![v]], cone: None }
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.polytopes.iter().flatten()
    }

    pub fn is_singleton(&self) -> bool {
        self.polytopes.len() == 1 && self.polytopes[0].len() == 1 && self.cone.as_ref().map_or(true, |c| c.is_zero())
    }

    fn cone_or_zero(&self) -> GenCone {
        self.cone.clone().unwrap_or_default()
    }

    /// `v ∈ co(polytope) + cone` for some polytope, up to `tol` in each
    /// coordinate.
    pub fn contains(&self, v: &[f64], tol: f64) -> Result<bool> {
        let cone = self.cone_or_zero();
        for poly in &self.polytopes {
            if hull_plus_cone_contains(poly, &cone, v, tol)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn scaled(mut self, alpha: f64) -> Self {
        for p in &mut self.polytopes {
            for v in p.iter_mut() {
                *v = linalg::scale(v, alpha);
            }
        }
        self
    }
}

/// LP test for `v ∈ co(pts) + cone` with per-coordinate slack `tol`.
pub fn hull_plus_cone_contains(pts: &[Vec<f64>], cone: &GenCone, v: &[f64], tol: f64) -> Result<bool> {
    let n = v.len();
    let (k, g, l) = (pts.len(), cone.generators.len(), cone.lineality.len());
    let nv = k + g + l;
    let mut free = vec![false; nv];
    for f in free.iter_mut().skip(k + g) {
        *f = true;
    }
    let mut cons = Vec::new();
    for i in 0..n {
        let mut a = vec![0.0; nv];
        for (j, p) in pts.iter().enumerate() {
            a[j] = p[i];
        }
        for (j, c) in cone.generators.iter().enumerate() {
            a[k + j] = c[i];
        }
        for (j, c) in cone.lineality.iter().enumerate() {
            a[k + g + j] = c[i];
        }
        cons.push(LinCon::le(a.clone(), v[i] + tol));
        cons.push(LinCon::ge(a, v[i] - tol));
    }
    let mut a = vec![0.0; nv];
    for x in a.iter_mut().take(k) {
        *x = 1.0;
    }
    cons.push(LinCon::eq(a, 1.0));
    let prob = lp::Lp { n: nv, free, cons, objective: vec![0.0; nv] };
    Ok(matches!(lp::solve(&prob)?, LpResult::Optimal { .. }))
}

fn check_value(v: f64) -> Result<f64> {
    if v.is_nan() || (v.is_finite() && v.abs() > OVERFLOW) || v == f64::NEG_INFINITY {
        return Err(Error::Overflow(v.abs()));
    }
    Ok(v)
}

impl FuncExpr {
    pub fn affine(c: Vec<f64>, beta: f64) -> Self {
        FuncExpr::Affine { c, beta }
    }

    pub fn quad(q: Vec<Vec<f64>>) -> Self {
        FuncExpr::Quad { q }
    }

    pub fn exp_affine(c: Vec<f64>, beta: f64) -> Self {
        FuncExpr::ExpAffine { c, beta }
    }

    pub fn power_abs(c: Vec<f64>, beta: f64, p: f64) -> Self {
        FuncExpr::PowerAbs { c, beta, p }
    }

    pub fn pw(c: Vec<f64>, beta: f64) -> Self {
        FuncExpr::Pw { c, beta }
    }

    pub fn dist(poly: HPolyhedron) -> Result<Self> {
        Ok(FuncExpr::Dist(Box::new(DistAtom::new(poly)?)))
    }

    pub fn sum(fs: Vec<FuncExpr>) -> Self {
        FuncExpr::Sum(fs)
    }

    pub fn max(fs: Vec<FuncExpr>) -> Self {
        FuncExpr::Max(fs)
    }

    pub fn min(fs: Vec<FuncExpr>) -> Self {
        FuncExpr::Min(fs)
    }

    pub fn scale(alpha: f64, f: FuncExpr) -> Self {
        FuncExpr::Scale { alpha, f: Box::new(f) }
    }

    pub fn indicator(p: HPolyhedron) -> Self {
        FuncExpr::Indicator(p)
    }

    /// Ambient dimension implied by the atoms; `None` when only `norm`
    /// atoms occur.
    pub fn dim(&self) -> Option<usize> {
        match self {
            FuncExpr::Affine { c, .. }
            | FuncExpr::ExpAffine { c, .. }
            | FuncExpr::PowerAbs { c, .. }
            | FuncExpr::Pw { c, .. } => Some(c.len()),
            FuncExpr::Quad { q } => Some(q.len()),
            FuncExpr::Norm => None,
            FuncExpr::Dist(d) => Some(d.poly.dim()),
            FuncExpr::Indicator(p) => Some(p.dim()),
            FuncExpr::Scale { f, .. } => f.dim(),
            FuncExpr::Sum(fs) | FuncExpr::Max(fs) | FuncExpr::Min(fs) => fs.iter().find_map(|f| f.dim()),
        }
    }

    /// Checks that every atom lives in `R^n` and the combinators are well
    /// formed.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("{what} does not match dimension {n}")));
        match self {
            FuncExpr::Affine { c, beta } | FuncExpr::ExpAffine { c, beta } | FuncExpr::Pw { c, beta } => {
                if c.len() != n {
                    return bad("coefficient vector");
                }
                if c.iter().chain([beta]).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("non-finite coefficient".into()));
                }
            }
            FuncExpr::PowerAbs { c, beta, p } => {
                if c.len() != n {
                    return bad("coefficient vector");
                }
                if !(*p >= 1.0) || !p.is_finite() || c.iter().chain([beta]).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("power_abs needs finite data and p >= 1".into()));
                }
            }
            FuncExpr::Quad { q } => {
                if q.len() != n || q.iter().any(|r| r.len() != n) {
                    return bad("quadratic form");
                }
                if q.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("non-finite coefficient".into()));
                }
            }
            FuncExpr::Norm => {}
            FuncExpr::Dist(d) => {
                if d.poly.dim() != n {
                    return bad("polyhedron");
                }
            }
            FuncExpr::Indicator(p) => {
                if p.dim() != n {
                    return bad("polyhedron");
                }
            }
            FuncExpr::Scale { alpha, f } => {
                if !(*alpha > 0.0) || !alpha.is_finite() {
                    return Err(Error::InvalidInput("scale needs a finite alpha > 0".into()));
                }
                f.validate(n)?;
            }
            FuncExpr::Sum(fs) | FuncExpr::Max(fs) | FuncExpr::Min(fs) => {
                if fs.is_empty() {
                    return Err(Error::InvalidInput("empty sum/max/min".into()));
                }
                for f in fs {
                    f.validate(n)?;
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_value(self.eval_raw(x)?)
    }

    fn eval_raw(&self, x: &[f64]) -> Result<f64> {
        let v = self.eval_node(x, &|f| f.eval_raw(x))?;
        // +inf may only come from an indicator
        if (v.is_finite() && v.abs() > OVERFLOW) || (v.is_infinite() && !self.has_indicator()) {
            return Err(Error::Overflow(v.abs()));
        }
        Ok(v)
    }

    fn has_indicator(&self) -> bool {
        match self {
            FuncExpr::Indicator(_) => true,
            FuncExpr::Scale { f, .. } => f.has_indicator(),
            FuncExpr::Sum(fs) | FuncExpr::Max(fs) | FuncExpr::Min(fs) => fs.iter().any(|f| f.has_indicator()),
            _ => false,
        }
    }

    /// Value without overflow checks; may be infinite or NaN.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.eval_node(x, &|f| Ok(f.value(x))).unwrap_or(f64::NAN)
    }

    fn eval_node(&self, x: &[f64], child: &dyn Fn(&FuncExpr) -> Result<f64>) -> Result<f64> {
        Ok(match self {
            FuncExpr::Affine { c, beta } => dot(c, x) + beta,
            FuncExpr::Quad { q } => q.iter().zip(x).map(|(r, xi)| xi * dot(r, x)).sum(),
            FuncExpr::ExpAffine { c, beta } => (dot(c, x) + beta).exp(),
            FuncExpr::PowerAbs { c, beta, p } => (dot(c, x) + beta).abs().powf(*p),
            FuncExpr::Norm => norm(x),
            FuncExpr::Dist(d) => d.proj.distance(x),
            FuncExpr::Pw { c, beta } => {
                let s = dot(c, x) + beta;
                if s >= 0.0 {
                    s
                } else {
                    s.exp_m1()
                }
            }
            FuncExpr::Sum(fs) => {
                let mut acc = 0.0;
                for f in fs {
                    acc += child(f)?;
                }
                acc
            }
            FuncExpr::Scale { alpha, f } => alpha * child(f)?,
            FuncExpr::Max(fs) => {
                let mut m = f64::NEG_INFINITY;
                for f in fs {
                    m = m.max(child(f)?);
                }
                m
            }
            FuncExpr::Min(fs) => {
                let mut m = f64::INFINITY;
                for f in fs {
                    m = m.min(child(f)?);
                }
                m
            }
            FuncExpr::Indicator(p) => {
                if p.contains(x, tau_act(x)) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        })
    }

    /// Outer estimate of the limiting subdifferential at `x`.
    pub fn subdiff_at(&self, x: &[f64]) -> Result<SubdiffPointSet> {
        let v = self.eval(x)?;
        if !v.is_finite() {
            return Err(Error::NotInDomain);
        }
        let s = self.subdiff_raw(x)?;
        for w in s.vertices() {
            if w.iter().any(|c| !c.is_finite() || c.abs() > OVERFLOW) {
                return Err(Error::Overflow(norm(w)));
            }
        }
        Ok(s)
    }

    /// Whether `x` lies in every indicator polyhedron of the tree.
    pub fn in_domain(&self, x: &[f64]) -> bool {
        match self {
            FuncExpr::Indicator(p) => p.contains(x, tau_act(x)),
            FuncExpr::Scale { f, .. } => f.in_domain(x),
            FuncExpr::Sum(fs) => fs.iter().all(|f| f.in_domain(x)),
            FuncExpr::Max(fs) => fs.iter().all(|f| f.in_domain(x)),
            FuncExpr::Min(fs) => fs.iter().any(|f| f.in_domain(x)),
            _ => true,
        }
    }

    /// Subdifferential estimate without overflow checks: vertices may carry
    /// infinite coordinates when an exponential overflows.
    pub fn subdiff_loose(&self, x: &[f64]) -> Result<SubdiffPointSet> {
        if !self.in_domain(x) {
            return Err(Error::NotInDomain);
        }
        self.subdiff_raw(x)
    }

    fn subdiff_raw(&self, x: &[f64]) -> Result<SubdiffPointSet> {
        let n = x.len();
        Ok(match self {
            FuncExpr::Affine { c, .. } => SubdiffPointSet::point(c.clone()),
            FuncExpr::Quad { q } => {
                let g = (0..n).map(|i| (0..n).map(|j| (q[i][j] + q[j][i]) * x[j]).sum()).collect();
                SubdiffPointSet::point(g)
            }
            FuncExpr::ExpAffine { c, beta } => SubdiffPointSet::point(linalg::scale(c, (dot(c, x) + beta).exp())),
            FuncExpr::PowerAbs { c, beta, p } => {
                let s = dot(c, x) + beta;
                if *p == 1.0 && s.abs() <= tau_tie(0.0) * (1.0 + norm(c) * norm(x)) {
                    SubdiffPointSet { polytopes: vec![vec![linalg::neg(c), c.clone()]], cone: None }
                } else if *p == 1.0 {
                    SubdiffPointSet::point(linalg::scale(c, s.signum()))
                } else {
                    SubdiffPointSet::point(linalg::scale(c, p * s.abs().powf(p - 1.0) * s.signum()))
                }
            }
            FuncExpr::Norm => {
                let r = norm(x);
                if r <= 1e-12 {
                    SubdiffPointSet { polytopes: vec![cube_vertices(n)], cone: None }
                } else {
                    SubdiffPointSet::point(linalg::scale(x, 1.0 / r))
                }
            }
            FuncExpr::Dist(d) => dist_subdiff(d, x)?,
            FuncExpr::Pw { c, beta } => {
                let s = dot(c, x) + beta;
                SubdiffPointSet::point(if s >= 0.0 { c.clone() } else { linalg::scale(c, s.exp()) })
            }
            FuncExpr::Sum(fs) => {
                let mut shift = vec![0.0; n];
                let mut general: Option<Vec<Vec<Vec<f64>>>> = None;
                let mut cone: Option<GenCone> = None;
                for f in fs {
                    let s = f.subdiff_raw(x)?;
                    if let Some(c) = s.cone {
                        cone = Some(match cone {
                            Some(prev) => prev.sum(&c),
                            None => c,
                        });
                    }
                    let polys = s.polytopes;
                    if polys.len() == 1 && polys[0].len() == 1 {
                        shift = linalg::add(&shift, &polys[0][0]);
                    } else if general.is_some() {
                        return Err(Error::Unsupported("sum of two nonsmooth parts at this point".into()));
                    } else {
                        general = Some(polys);
                    }
                }
                let polytopes = match general {
                    Some(polys) => polys
                        .into_iter()
                        .map(|p| p.into_iter().map(|v| linalg::add(&v, &shift)).collect())
                        .collect(),
                    None => vec![vec![shift]],
                };
                SubdiffPointSet { polytopes, cone }
            }
            FuncExpr::Scale { alpha, f } => f.subdiff_raw(x)?.scaled(*alpha),
            FuncExpr::Max(fs) | FuncExpr::Min(fs) => {
                let vals: Vec<f64> = fs.iter().map(|f| f.value(x)).collect();
                let is_max = matches!(self, FuncExpr::Max(_));
                let best = if is_max {
                    vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                } else {
                    vals.iter().copied().fold(f64::INFINITY, f64::min)
                };
                let tie = tau_tie(best);
                let mut parts = Vec::new();
                for (f, v) in fs.iter().zip(&vals) {
                    if *v == best || (v - best).abs() <= tie {
                        let s = f.subdiff_raw(x)?;
                        if s.cone.as_ref().is_some_and(|c| !c.is_zero()) {
                            return Err(Error::Unsupported("indicator inside max/min".into()));
                        }
                        parts.push(s.polytopes);
                    }
                }
                if is_max {
                    let mut hull: Vec<Vec<f64>> = Vec::new();
                    for v in parts.into_iter().flatten().flatten() {
                        if !hull.iter().any(|h| linalg::dist(h, &v) <= 1e-15 * (1.0 + norm(&v))) {
                            hull.push(v);
                        }
                    }
                    SubdiffPointSet { polytopes: vec![hull], cone: None }
                } else {
                    SubdiffPointSet { polytopes: parts.into_iter().flatten().collect(), cone: None }
                }
            }
            FuncExpr::Indicator(p) => {
                SubdiffPointSet { polytopes: vec![vec![vec![0.0; n]]], cone: Some(p.normal_cone_at(x)?) }
            }
        })
    }

    /// Polyhedra of indicators reachable through sums and scalings, and
    /// the remaining finite-valued part (`None` if nothing remains).
    pub fn split_indicators(&self) -> (Option<FuncExpr>, Vec<HPolyhedron>) {
        match self {
            FuncExpr::Indicator(p) => (None, vec![p.clone()]),
            FuncExpr::Scale { alpha, f } => {
                let (rest, polys) = f.split_indicators();
                (rest.map(|r| FuncExpr::scale(*alpha, r)), polys)
            }
            FuncExpr::Sum(fs) => {
                let mut rest = Vec::new();
                let mut polys = Vec::new();
                for f in fs {
                    let (r, p) = f.split_indicators();
                    rest.extend(r);
                    polys.extend(p);
                }
                match rest.len() {
                    0 => (None, polys),
                    1 => (rest.pop(), polys),
                    _ => (Some(FuncExpr::Sum(rest)), polys),
                }
            }
            other => (Some(other.clone()), Vec::new()),
        }
    }
}

fn cube_vertices(n: usize) -> Vec<Vec<f64>> {
    (0..1usize << n).map(|m| (0..n).map(|i| if m & (1 << i) != 0 { 1.0 } else { -1.0 }).collect()).collect()
}

/// Outer polytope for `N_P(x) ∩ B` at points of `P`, or the unit residual
/// outside.
fn dist_subdiff(d: &DistAtom, x: &[f64]) -> Result<SubdiffPointSet> {
    let n = x.len();
    let y = d.proj.project(x);
    let r = linalg::dist(x, &y);
    if r > tau_act(x) {
        return Ok(SubdiffPointSet::point(linalg::scale(&linalg::sub(x, &y), 1.0 / r)));
    }
    let cone = d.poly.normal_cone_at(&y)?;
    if cone.is_zero() {
        return Ok(SubdiffPointSet::point(vec![0.0; n]));
    }
    if !cone.lineality.is_empty() {
        return Ok(SubdiffPointSet { polytopes: vec![cube_vertices(n)], cone: None });
    }
    // bound on sum(lambda) over pos{G} ∩ {|v|_inf <= 1}
    let g = &cone.generators;
    let k = g.len();
    let mut cons = Vec::new();
    for i in 0..n {
        let a: Vec<f64> = g.iter().map(|gj| gj[i]).collect();
        cons.push(LinCon::le(a.clone(), 1.0));
        cons.push(LinCon::ge(a, -1.0));
    }
    let prob = lp::Lp { n: k, free: vec![false; k], cons, objective: vec![-1.0; k] };
    match lp::solve(&prob)? {
        LpResult::Optimal { value, .. } => {
            let s = -value;
            let mut verts = vec![vec![0.0; n]];
            verts.extend(g.iter().map(|gj| linalg::scale(gj, s)));
            Ok(SubdiffPointSet { polytopes: vec![verts], cone: None })
        }
        _ => Ok(SubdiffPointSet { polytopes: vec![cube_vertices(n)], cone: None }),
    }
}

#[cfg(test)]
mod tests;
