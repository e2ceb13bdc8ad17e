//! Limit-point estimator for `∂f(∞;u)` and `∂^∞f(∞;u)`.
//!
//! Every sampled subgradient vertex `v` (with the sample's indicator cone
//! `C`) is reduced to the least-norm element of `v + C`. Representatives
//! that stay bounded are clustered on the last rung and kept if every rung
//! from `K/2` on has a match; representatives whose norm runs away give
//! unit escape directions, clustered the same way, which become rays of the
//! singular estimate.

use serde::{Deserialize, Serialize};

use super::params::{EstimatorParams, BOUNDED_NORM};
use super::sampler::{Sample, Sampler};
use crate::error::{Error, Result};
use crate::func::{FuncExpr, SubdiffPointSet};
use crate::geometry::{ConeUnion, Direction, GenCone, HPolyhedron};
use crate::linalg::{self, norm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub centroid: Vec<f64>,
    pub radius: f64,
    pub count: usize,
    /// Indicator cone carried by the members; the estimated set is
    /// `centroid + cone`.
    pub cone: GenCone,
}

impl Cluster {
    /// Distance from `v` to `centroid + cone`.
    pub fn distance(&self, v: &[f64]) -> f64 {
        self.cone.distance(&linalg::sub(v, &self.centroid))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Stable,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub radii: Vec<f64>,
    /// Largest finite representative norm per rung (0 if none).
    pub max_norms: Vec<f64>,
    pub accepted: Vec<usize>,
    /// Samples dropped: unsupported subdifferential, outside the domain,
    /// or no companion for a growth test.
    pub skipped: usize,
    /// Vertices with non-finite coordinates.
    pub overflow: usize,
    pub stability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubdiffApprox {
    pub direction: Direction,
    pub bounded_clusters: Vec<Cluster>,
    pub singular_rays: ConeUnion,
    /// Persistent escape directions behind the nonzero rays.
    pub escape_directions: Vec<Cluster>,
    pub empty_bounded: bool,
    pub status: EstimateStatus,
    pub diagnostics: Diagnostics,
}

impl SubdiffApprox {
    pub fn is_stable(&self) -> bool {
        self.status == EstimateStatus::Stable
    }

    /// Distance from `v` to the bounded estimate (infinite if empty).
    pub fn bounded_distance(&self, v: &[f64]) -> f64 {
        self.bounded_clusters.iter().map(|c| (c.distance(v) - c.radius).max(0.0)).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, Default)]
pub struct EstimateOptions {
    /// Base point of the sampled rays (origin if `None`).
    pub anchor: Option<Vec<f64>>,
    /// Estimate for `-f`, using `-co ∂f(x)` as the point subdifferential.
    pub negate: bool,
    pub trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kind {
    Bounded,
    Escaping,
}

/// One classified representative.
#[derive(Clone, Debug)]
pub struct Obs {
    pub rung: usize,
    pub kind: Kind,
    /// Representative (bounded) or unit direction (escaping).
    pub value: Vec<f64>,
    pub cone: usize,
}

#[derive(Clone, Debug)]
pub struct TraceRow {
    pub rung: usize,
    pub face: usize,
    pub family: Option<usize>,
    pub x: Vec<f64>,
    pub kind: &'static str,
    pub value: Vec<f64>,
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut s = String::from("rung,face,family,kind,x,value\n");
    for r in rows {
        let fam = r.family.map(|f| f.to_string()).unwrap_or_else(|| "random".into());
        let join = |v: &[f64]| v.iter().map(|c| format!("{c:e}")).collect::<Vec<_>>().join(" ");
        s.push_str(&format!("{},{},{},{},{},{}\n", r.rung, r.face, fam, r.kind, join(&r.x), join(&r.value)));
    }
    s
}

/// Cones seen so far, up to equivalence; observations refer to them by index.
#[derive(Default)]
pub struct ConeTable {
    pub cones: Vec<GenCone>,
}

impl ConeTable {
    pub fn intern(&mut self, c: Option<&GenCone>) -> usize {
        let c = c.cloned().unwrap_or_default();
        if let Some(i) = self.cones.iter().position(|d| d.equivalent(&c, 1e-9)) {
            return i;
        }
        self.cones.push(c);
        self.cones.len() - 1
    }
}

fn neg_hull(s: SubdiffPointSet) -> SubdiffPointSet {
    let verts: Vec<Vec<f64>> = s.vertices().map(|v| linalg::neg(v)).collect();
    SubdiffPointSet { polytopes: vec![verts], cone: s.cone.map(|c| c.negated()) }
}

fn point_subdiff(f: &FuncExpr, x: &[f64], negate: bool) -> Result<SubdiffPointSet> {
    let s = f.subdiff_loose(x)?;
    Ok(if negate { neg_hull(s) } else { s })
}

/// Least-norm points of `v + C` for the vertices, or `Err(dir)` for a
/// vertex with infinite coordinates (its escape direction). NaN vertices
/// are dropped.
fn representatives(s: &SubdiffPointSet) -> (Vec<std::result::Result<Vec<f64>, Vec<f64>>>, usize) {
    let cone = s.cone.clone().unwrap_or_default();
    let mut out = Vec::new();
    let mut bad = 0;
    for v in s.vertices() {
        if v.iter().any(|c| c.is_nan()) {
            bad += 1;
        } else if v.iter().any(|c| c.is_infinite()) {
            bad += 1;
            let d: Vec<f64> = v.iter().map(|c| if c.is_infinite() { c.signum() } else { 0.0 }).collect();
            out.push(Err(linalg::normalized(&d).unwrap()));
        } else if cone.is_zero() {
            out.push(Ok(v.clone()));
        } else {
            out.push(Ok(linalg::add(v, &cone.project(&linalg::neg(v)))));
        }
    }
    (out, bad)
}

pub struct Observed {
    pub obs: Vec<Obs>,
    pub cones: ConeTable,
    pub max_norms: Vec<f64>,
    pub accepted: Vec<usize>,
    pub skipped: usize,
    pub overflow: usize,
    pub trace: Vec<TraceRow>,
    pub rungs: usize,
}

impl Observed {
    pub fn empty(rungs: usize) -> Self {
        Observed {
            obs: Vec::new(),
            cones: ConeTable::default(),
            max_norms: vec![0.0; rungs + 1],
            accepted: vec![0; rungs + 1],
            skipped: 0,
            overflow: 0,
            trace: Vec::new(),
            rungs,
        }
    }

    /// Records a value with the zero cone.
    pub fn push(&mut self, rung: usize, kind: Kind, value: Vec<f64>) {
        let cone = self.cones.intern(None);
        self.obs.push(Obs { rung, kind, value, cone });
    }
}

/// Classifies the vertices at every sample of every rung.
pub fn observe(f: &FuncExpr, sampler: &Sampler, negate: bool, trace: bool) -> Observed {
    observe_with(f, &sampler.params, |k| sampler.rung(k), negate, trace)
}

pub fn observe_with(
    f: &FuncExpr,
    p: &EstimatorParams,
    rung: impl Fn(usize) -> Vec<Sample>,
    negate: bool,
    trace: bool,
) -> Observed {
    let mut out = Observed::empty(p.rungs);
    for k in 0..=p.rungs {
        for smp in rung(k) {
            observe_sample(f, &smp, p, negate, trace, &mut out);
        }
    }
    out
}

fn observe_sample(f: &FuncExpr, smp: &Sample, p: &EstimatorParams, negate: bool, trace: bool, out: &mut Observed) {
    let s = match point_subdiff(f, &smp.x, negate) {
        Ok(s) => s,
        Err(_) => {
            out.skipped += 1;
            return;
        }
    };
    let k = smp.rung;
    out.accepted[k] += 1;
    let cone = out.cones.intern(s.cone.as_ref());
    let (reps, bad) = representatives(&s);
    out.overflow += bad;
    let companion_norm = || -> Option<f64> {
        let c = smp.companion.as_ref()?;
        let s = point_subdiff(f, c, negate).ok()?;
        let (reps, _) = representatives(&s);
        let mut m: f64 = 0.0;
        for r in reps {
            m = m.max(r.map(|v| norm(&v)).unwrap_or(f64::INFINITY));
        }
        Some(m)
    };
    let record = |kind: Kind, value: Vec<f64>, out: &mut Observed| {
        if trace {
            let tag = if kind == Kind::Bounded { "bounded" } else { "escaping" };
            out.trace.push(TraceRow { rung: k, face: smp.face, family: smp.family, x: smp.x.clone(), kind: tag, value: value.clone() });
        }
        out.obs.push(Obs { rung: k, kind, value, cone });
    };
    for r in reps {
        match r {
            Err(dir) => record(Kind::Escaping, dir, out),
            Ok(v) => {
                let m = norm(&v);
                out.max_norms[k] = out.max_norms[k].max(m);
                if m <= BOUNDED_NORM {
                    record(Kind::Bounded, v, out);
                } else if m > p.escape {
                    record(Kind::Escaping, linalg::scale(&v, 1.0 / m), out);
                } else {
                    match companion_norm() {
                        Some(c) if c.is_finite() => {
                            if m > p.growth_threshold() * c {
                                record(Kind::Escaping, linalg::scale(&v, 1.0 / m), out);
                            } else {
                                record(Kind::Bounded, v, out);
                            }
                        }
                        _ => out.skipped += 1,
                    }
                }
            }
        }
    }
}

fn canonical_order(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    norm(a).total_cmp(&norm(b)).then_with(|| linalg::lex_cmp(a, b))
}

/// Greedy clustering of one kind of observation on the last rung, keeping
/// clusters matched on every rung from `K/2` on. `relative` scales the
/// tolerance by `1 + |c|`.
pub fn persistent_clusters(ob: &Observed, kind: Kind, eps: f64, first: usize, relative: bool) -> Vec<Cluster> {
    let last = ob.rungs;
    let tol = |c: &[f64]| if relative { eps * (1.0 + norm(c)) } else { eps };
    let mut pts: Vec<&Obs> = ob.obs.iter().filter(|o| o.rung == last && o.kind == kind).collect();
    pts.sort_by(|a, b| canonical_order(&a.value, &b.value).then(a.cone.cmp(&b.cone)));
    let mut groups: Vec<(Vec<f64>, usize, Vec<&Obs>)> = Vec::new();
    for o in pts {
        match groups.iter_mut().find(|(seed, c, _)| *c == o.cone && linalg::dist(seed, &o.value) <= tol(seed)) {
            Some(g) => g.2.push(o),
            None => groups.push((o.value.clone(), o.cone, vec![o])),
        }
    }
    let mut out = Vec::new();
    for (_, cone, members) in groups {
        let n = members[0].value.len();
        let mut centroid = vec![0.0; n];
        for m in &members {
            centroid = linalg::add(&centroid, &m.value);
        }
        let centroid = linalg::scale(&centroid, 1.0 / members.len() as f64);
        let radius = members.iter().map(|m| linalg::dist(&m.value, &centroid)).fold(0.0, f64::max);
        let reach = tol(&centroid) + radius;
        let persists = (first..last).all(|k| {
            ob.obs.iter().any(|o| o.rung == k && o.kind == kind && o.cone == cone && linalg::dist(&o.value, &centroid) <= reach)
        });
        if persists {
            let centroid = if kind == Kind::Escaping { linalg::normalized(&centroid).unwrap_or(centroid) } else { centroid };
            out.push(Cluster { centroid, radius, count: members.len(), cone: ob.cones.cones[cone].clone() });
        }
    }
    out.sort_by(|a, b| canonical_order(&a.centroid, &b.centroid));
    out
}

/// Assembles the estimate from classified observations.
pub fn summarize(u: &Direction, ob: &Observed, params: &EstimatorParams) -> Result<SubdiffApprox> {
    let first = params.first_persistent();
    for k in first..=params.rungs {
        if ob.accepted[k] == 0 {
            return Err(Error::DomainUnreachable(k));
        }
    }
    let bounded = persistent_clusters(ob, Kind::Bounded, params.eps_c, first, true);
    let escapes = persistent_clusters(ob, Kind::Escaping, params.eps_c, first, false);

    let mut singular = ConeUnion::zero();
    for (i, c) in ob.cones.cones.iter().enumerate() {
        if (first..=params.rungs).all(|k| ob.obs.iter().any(|o| o.rung == k && o.cone == i)) {
            singular.push(c.clone());
        }
    }
    for e in &escapes {
        singular.push(GenCone::ray(e.centroid.clone()).sum(&e.cone));
    }

    let rung_has = |k: usize, kind: Kind| ob.obs.iter().any(|o| o.rung == k && o.kind == kind);
    let span = (params.rungs - first + 1) as f64;
    let agree = |kind: Kind, verdict: bool| (first..=params.rungs).filter(|&k| rung_has(k, kind) == verdict).count() as f64 / span;
    let stability = agree(Kind::Bounded, !bounded.is_empty()).min(agree(Kind::Escaping, !escapes.is_empty()));
    let both_empty = bounded.is_empty() && !singular.has_nonzero();
    let status = if stability < 0.5 || both_empty { EstimateStatus::Inconclusive } else { EstimateStatus::Stable };

    Ok(SubdiffApprox {
        direction: u.clone(),
        empty_bounded: bounded.is_empty(),
        bounded_clusters: bounded,
        singular_rays: singular,
        escape_directions: escapes,
        status,
        diagnostics: Diagnostics {
            radii: params.radii(),
            max_norms: ob.max_norms.clone(),
            accepted: ob.accepted.clone(),
            skipped: ob.skipped,
            overflow: ob.overflow,
            stability,
        },
    })
}

/// Intersection of the indicator polyhedra of `f`, if any.
pub fn domain_of(f: &FuncExpr) -> Result<Option<HPolyhedron>> {
    let (_, polys) = f.split_indicators();
    let mut it = polys.into_iter();
    let Some(mut p) = it.next() else { return Ok(None) };
    for q in it {
        p = p.intersect(&q)?;
    }
    Ok(Some(p))
}

pub fn estimate_dir_subdiff(f: &FuncExpr, u: &Direction, params: &EstimatorParams) -> Result<SubdiffApprox> {
    estimate_with(f, u, params, &EstimateOptions::default()).map(|(a, _)| a)
}

pub fn estimate_with(
    f: &FuncExpr,
    u: &Direction,
    params: &EstimatorParams,
    opts: &EstimateOptions,
) -> Result<(SubdiffApprox, Vec<TraceRow>)> {
    f.validate(u.dim())?;
    let sampler = Sampler::new(u, domain_of(f)?, opts.anchor.as_deref(), params)?;
    estimate_on(f, &sampler, opts.negate, opts.trace)
}

/// Estimate from a prepared sampler, so several functions can share sample
/// points.
pub fn estimate_on(f: &FuncExpr, sampler: &Sampler, negate: bool, trace: bool) -> Result<(SubdiffApprox, Vec<TraceRow>)> {
    let ob = observe(f, sampler, negate, trace);
    let a = summarize(&sampler.u, &ob, &sampler.params)?;
    Ok((a, ob.trace))
}
