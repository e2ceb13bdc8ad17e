//! Checks of the sum, max, min and partial-subdifferential inclusions at
//! infinity on sampled estimates, the Lipschitz test and the distance
//! formula. Parts of a rule are estimated on the same sample points.

use serde::{Deserialize, Serialize};

use super::estimator::{domain_of, estimate_on, persistent_clusters, Cluster, EstimateOptions, Kind, SubdiffApprox};
use super::params::EstimatorParams;
use super::sampler::Sampler;
use crate::certificates::{Certificate, DirectionReport, Status};
use crate::error::{Error, Result};
use crate::func::FuncExpr;
use crate::geometry::lp::{lp_feasible, LinCon};
use crate::geometry::{ConeUnion, Direction, GenCone, HPolyhedron, Projector};
use crate::linalg::{self, norm};
use crate::poly_infinity::dir_normal_cone_at_infinity;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleReport {
    pub rule: String,
    /// `∂^∞f1(∞;u) ∩ -∂^∞f2(∞;u) = {0}`; `None` for rules without it.
    pub qualification: Option<bool>,
    pub inclusion_limiting: bool,
    pub inclusion_singular: bool,
    /// Nonzero meet vector, or clusters/generators that are not covered.
    pub witnesses: Vec<Vec<f64>>,
    pub stable: bool,
    pub estimates: Vec<SubdiffApprox>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialReport {
    pub condition_9a: bool,
    pub inclusion_limiting: bool,
    pub inclusion_singular: bool,
    pub witnesses: Vec<Vec<f64>>,
    pub stable: bool,
    pub restricted: SubdiffApprox,
    pub joint: SubdiffApprox,
}

fn tol(eps: f64, v: &[f64]) -> f64 {
    eps * (1.0 + norm(v))
}

/// Estimates of the parts and of the combination on one sample set.
fn shared(parts: &[&FuncExpr], whole: &FuncExpr, u: &Direction, p: &EstimatorParams) -> Result<Vec<SubdiffApprox>> {
    for f in parts.iter().chain([&whole]) {
        f.validate(u.dim())?;
    }
    let sampler = Sampler::new(u, domain_of(whole)?, None, p)?;
    let mut out = Vec::new();
    for f in parts.iter().chain([&whole]) {
        out.push(estimate_on(f, &sampler, false, false)?.0);
    }
    Ok(out)
}

/// Generators and both signs of lineality directions of every piece.
fn directions_of(c: &ConeUnion) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for p in &c.pieces {
        out.extend(p.generators.iter().cloned());
        for l in &p.lineality {
            out.push(l.clone());
            out.push(linalg::neg(l));
        }
    }
    out
}

fn singular_in_sum(s: &ConeUnion, a: &ConeUnion, b: &ConeUnion, eps: f64) -> Vec<Vec<f64>> {
    directions_of(s).into_iter().filter(|g| !a.sum_contains(b, g, eps)).collect()
}

fn qualification(a: &SubdiffApprox, b: &SubdiffApprox, n: usize, eps: f64) -> Result<Option<Vec<f64>>> {
    a.singular_rays.negative_meet(&b.singular_rays, n, eps)
}

/// Slack of `c ∈ la (a + Ca) + lb (b + Cb)`, with cones dropped for zero
/// weights.
fn pair_gap(c: &Cluster, a: &Cluster, la: f64, b: &Cluster, lb: f64) -> f64 {
    let v = linalg::sub(&linalg::sub(&c.centroid, &linalg::scale(&a.centroid, la)), &linalg::scale(&b.centroid, lb));
    let mut cone = GenCone::zero();
    if la > 0.0 {
        cone = cone.sum(&a.cone);
    }
    if lb > 0.0 {
        cone = cone.sum(&b.cone);
    }
    cone.distance(&v) - c.radius - la * a.radius - lb * b.radius
}

/// Slack of `c ∈ S^∞ + (b + Cb)`.
fn singular_plus_cluster_gap(c: &Cluster, s: &ConeUnion, b: &Cluster) -> f64 {
    let v = linalg::sub(&c.centroid, &b.centroid);
    s.pieces.iter().map(|p| p.sum(&b.cone).distance(&v)).fold(f64::INFINITY, f64::min) - c.radius - b.radius
}

fn segment_distance(c: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let d = linalg::sub(a, b);
    let dd = linalg::dot(&d, &d);
    let lam = if dd == 0.0 { 0.0 } else { (linalg::dot(&linalg::sub(c, b), &d) / dd).clamp(0.0, 1.0) };
    linalg::dist(c, &linalg::axpy(b, lam, &d))
}

pub fn sum_rule_check(f1: &FuncExpr, f2: &FuncExpr, u: &Direction, p: &EstimatorParams) -> Result<RuleReport> {
    let whole = FuncExpr::sum(vec![f1.clone(), f2.clone()]);
    let est = shared(&[f1, f2], &whole, u, p)?;
    let (a, b, s) = (&est[0], &est[1], &est[2]);
    let meet = qualification(a, b, u.dim(), p.eps_c)?;
    let mut witnesses: Vec<Vec<f64>> = meet.iter().cloned().collect();
    let mut inc_l = true;
    for c in &s.bounded_clusters {
        let ok = a.bounded_clusters.iter().any(|x| {
            b.bounded_clusters.iter().any(|y| pair_gap(c, x, 1.0, y, 1.0) <= tol(p.eps_c, &c.centroid))
        });
        if !ok {
            inc_l = false;
            witnesses.push(c.centroid.clone());
        }
    }
    let bad = singular_in_sum(&s.singular_rays, &a.singular_rays, &b.singular_rays, p.eps_c);
    let inc_s = bad.is_empty();
    witnesses.extend(bad);
    Ok(RuleReport {
        rule: "sum".into(),
        qualification: Some(meet.is_none()),
        inclusion_limiting: inc_l,
        inclusion_singular: inc_s,
        witnesses,
        stable: est.iter().all(|e| e.is_stable()),
        estimates: est,
    })
}

/// Weights `lambda_1` of the simplex grid.
pub const LAMBDA_GRID: usize = 11;

pub fn max_rule_check(f1: &FuncExpr, f2: &FuncExpr, u: &Direction, p: &EstimatorParams) -> Result<RuleReport> {
    let whole = FuncExpr::max(vec![f1.clone(), f2.clone()]);
    let est = shared(&[f1, f2], &whole, u, p)?;
    let (a, b, s) = (&est[0], &est[1], &est[2]);
    let meet = qualification(a, b, u.dim(), p.eps_c)?;
    let mut witnesses: Vec<Vec<f64>> = meet.iter().cloned().collect();
    let mut inc_l = true;
    for c in &s.bounded_clusters {
        let t = tol(p.eps_c, &c.centroid);
        // lambda_1 = 0 and lambda_1 = 1 use the singular estimate of the
        // weightless part
        let mut ok = b.bounded_clusters.iter().any(|y| singular_plus_cluster_gap(c, &a.singular_rays, y) <= t)
            || a.bounded_clusters.iter().any(|x| singular_plus_cluster_gap(c, &b.singular_rays, x) <= t);
        for i in 1..LAMBDA_GRID - 1 {
            if ok {
                break;
            }
            let l1 = i as f64 / (LAMBDA_GRID - 1) as f64;
            ok = a.bounded_clusters.iter().any(|x| b.bounded_clusters.iter().any(|y| pair_gap(c, x, l1, y, 1.0 - l1) <= t));
        }
        if !ok {
            ok = a.bounded_clusters.iter().any(|x| {
                b.bounded_clusters.iter().any(|y| {
                    x.cone.is_zero()
                        && y.cone.is_zero()
                        && segment_distance(&c.centroid, &x.centroid, &y.centroid) - c.radius - x.radius.max(y.radius) <= t
                })
            });
        }
        if !ok {
            inc_l = false;
            witnesses.push(c.centroid.clone());
        }
    }
    let bad = singular_in_sum(&s.singular_rays, &a.singular_rays, &b.singular_rays, p.eps_c);
    let inc_s = bad.is_empty();
    witnesses.extend(bad);
    Ok(RuleReport {
        rule: "max".into(),
        qualification: Some(meet.is_none()),
        inclusion_limiting: inc_l,
        inclusion_singular: inc_s,
        witnesses,
        stable: est.iter().all(|e| e.is_stable()),
        estimates: est,
    })
}

pub fn min_rule_check(f1: &FuncExpr, f2: &FuncExpr, u: &Direction, p: &EstimatorParams) -> Result<RuleReport> {
    let whole = FuncExpr::min(vec![f1.clone(), f2.clone()]);
    let est = shared(&[f1, f2], &whole, u, p)?;
    let (a, b, s) = (&est[0], &est[1], &est[2]);
    let mut witnesses = Vec::new();
    let mut inc_l = true;
    for c in &s.bounded_clusters {
        let t = tol(p.eps_c, &c.centroid);
        let zero = Cluster { centroid: vec![0.0; u.dim()], radius: 0.0, count: 0, cone: GenCone::zero() };
        let ok = a.bounded_clusters.iter().chain(&b.bounded_clusters).any(|x| pair_gap(c, x, 1.0, &zero, 0.0) <= t);
        if !ok {
            inc_l = false;
            witnesses.push(c.centroid.clone());
        }
    }
    let both = a.singular_rays.union(&b.singular_rays);
    let bad: Vec<Vec<f64>> = directions_of(&s.singular_rays).into_iter().filter(|g| !both.contains(g, p.eps_c)).collect();
    let inc_s = bad.is_empty();
    witnesses.extend(bad);
    Ok(RuleReport {
        rule: "min".into(),
        qualification: None,
        inclusion_limiting: inc_l,
        inclusion_singular: inc_s,
        witnesses,
        stable: est.iter().all(|e| e.is_stable()),
        estimates: est,
    })
}

/// Whether the piece contains `v` with `|v_x|_inf <= eps` and some
/// `v_{y,i} = ±1`.
fn has_pure_y_element(piece: &GenCone, n: usize, m: usize, eps: f64) -> Result<Option<Vec<f64>>> {
    let gens: Vec<Vec<f64>> = piece.generators.iter().cloned().collect();
    let lins = &piece.lineality;
    let (g, l) = (gens.len(), lins.len());
    let nv = g + 2 * l;
    if nv == 0 {
        return Ok(None);
    }
    let col = |j: usize, row: usize| -> f64 {
        if j < g {
            gens[j][row]
        } else if j < g + l {
            lins[j - g][row]
        } else {
            -lins[j - g - l][row]
        }
    };
    for i in 0..m {
        for s in [1.0, -1.0] {
            let mut cons = Vec::new();
            for r in 0..n {
                let a: Vec<f64> = (0..nv).map(|j| col(j, r)).collect();
                cons.push(LinCon::le(a.clone(), eps));
                cons.push(LinCon::ge(a, -eps));
            }
            let a: Vec<f64> = (0..nv).map(|j| col(j, n + i)).collect();
            cons.push(LinCon::eq(a, s));
            if let Some(w) = lp_feasible(nv, &cons)? {
                let v = (0..n + m).map(|r| (0..nv).map(|j| w[j] * col(j, r)).sum()).collect();
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

fn x_block(c: &GenCone, n: usize) -> GenCone {
    GenCone::new(
        c.generators.iter().map(|g| g[..n].to_vec()).collect(),
        c.lineality.iter().map(|l| l[..n].to_vec()).collect(),
    )
}

/// `F` on `R^n x R^m`; `u` in `R^n`.
pub fn partial_subdiff_check(f: &FuncExpr, ybar: &[f64], u: &Direction, p: &EstimatorParams) -> Result<PartialReport> {
    let n = u.dim();
    let m = ybar.len();
    let restricted_f = f.restrict_y(n, ybar)?;
    let restricted = super::estimator::estimate_with(&restricted_f, u, p, &EstimateOptions::default())?.0;
    let mut ju = u.coords().to_vec();
    ju.extend(std::iter::repeat(0.0).take(m));
    let mut anchor = vec![0.0; n];
    anchor.extend_from_slice(ybar);
    let opts = EstimateOptions { anchor: Some(anchor), ..Default::default() };
    let joint = super::estimator::estimate_with(f, &Direction::new(&ju)?, p, &opts)?.0;

    let mut witnesses = Vec::new();
    let mut cond = true;
    for piece in &joint.singular_rays.pieces {
        if let Some(v) = has_pure_y_element(piece, n, m, p.eps_c)? {
            cond = false;
            witnesses.push(v);
        }
    }
    let mut inc_l = true;
    for c in &restricted.bounded_clusters {
        let ok = joint.bounded_clusters.iter().any(|j| {
            let v = linalg::sub(&c.centroid, &j.centroid[..n]);
            x_block(&j.cone, n).distance(&v) - c.radius - j.radius <= tol(p.eps_c, &c.centroid)
        });
        if !ok {
            inc_l = false;
            witnesses.push(c.centroid.clone());
        }
    }
    let projected = ConeUnion::from_pieces(joint.singular_rays.pieces.iter().map(|c| x_block(c, n)).collect());
    let bad: Vec<Vec<f64>> =
        directions_of(&restricted.singular_rays).into_iter().filter(|g| !projected.contains(g, p.eps_c)).collect();
    let inc_s = bad.is_empty();
    witnesses.extend(bad);
    Ok(PartialReport {
        condition_9a: cond,
        inclusion_limiting: inc_l,
        inclusion_singular: inc_s,
        witnesses,
        stable: restricted.is_stable() && joint.is_stable(),
        restricted,
        joint,
    })
}

/// Largest difference quotient over pairs of samples in the rung's
/// neighborhood, including close pairs along coordinate axes.
pub fn empirical_lipschitz(f: &FuncExpr, sampler: &Sampler, rung: usize) -> f64 {
    let pts: Vec<Vec<f64>> = sampler.rung(rung).into_iter().map(|s| s.x).collect();
    let mut best: f64 = 0.0;
    let mut quotient = |x: &[f64], y: &[f64]| {
        if let (Ok(a), Ok(b)) = (f.eval(x), f.eval(y)) {
            let d = linalg::dist(x, y);
            if a.is_finite() && b.is_finite() && d > 0.0 {
                best = best.max((a - b).abs() / d);
            }
        }
    };
    for w in pts.windows(2) {
        quotient(&w[0], &w[1]);
    }
    for x in &pts {
        for i in 0..x.len() {
            let h = 1e-3 * (1.0 + x[i].abs());
            let mut y = x.clone();
            y[i] += h;
            quotient(x, &y);
        }
    }
    best
}

pub fn lipschitz_at_infinity_test(f: &FuncExpr, u: &Direction, p: &EstimatorParams) -> Result<Certificate> {
    f.validate(u.dim())?;
    let sampler = Sampler::new(u, domain_of(f)?, None, p)?;
    let a = estimate_on(f, &sampler, false, false)?.0;
    let nonzero = a.singular_rays.has_nonzero();
    let status = Status::from_flags(!nonzero, a.is_stable());
    let witnesses = directions_of(&a.singular_rays);
    let l_mid = empirical_lipschitz(f, &sampler, p.first_persistent());
    let l_last = empirical_lipschitz(f, &sampler, p.rungs);
    let grows = l_last > 2.0 * l_mid + 1.0;
    let mut warnings = Vec::new();
    if status == Status::Holds && grows {
        warnings.push("empirical Lipschitz quotient grows across rungs".into());
    }
    let summary = match status {
        Status::Holds => "singular subdifferential at infinity is {0}: Lipschitz at infinity along u",
        Status::Fails => "nonzero singular direction persists: not Lipschitz at infinity along u",
        Status::Unknown => "estimate unstable",
    };
    Ok(Certificate {
        theorem: "lipschitz_at_infinity".into(),
        status,
        directions: vec![DirectionReport {
            u: u.clone(),
            qualification: None,
            condition: Some(!nonzero),
            stability: a.diagnostics.stability,
            witnesses,
            note: String::new(),
        }],
        summary: summary.into(),
        oracle: serde_json::json!({
            "empirical_lipschitz_mid_rung": l_mid,
            "empirical_lipschitz_last_rung": l_last,
            "quotient_grows": grows,
        }),
        params: p.clone(),
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub bounded_set: bool,
    /// `N_P(∞;u)`; the formula uses its intersection with the unit ball.
    pub normal_part: ConeUnion,
    /// Estimated limits of `(x - Π(x)) / d(x)` from outside `P`.
    pub exterior_limits: Vec<Cluster>,
}

impl DistanceReport {
    /// Distance from `v` to the set given by the formula.
    pub fn distance(&self, v: &[f64]) -> f64 {
        let a = if self.normal_part.is_empty() {
            f64::INFINITY
        } else {
            self.normal_part.distance(v).max(norm(v) - 1.0)
        };
        self.exterior_limits.iter().map(|c| linalg::dist(v, &c.centroid) - c.radius).fold(a, f64::min)
    }
}

pub fn distance_subdiff_at_infinity(poly: &HPolyhedron, u: &Direction, p: &EstimatorParams) -> Result<DistanceReport> {
    if poly.dim() != u.dim() {
        return Err(Error::InvalidInput("direction dimension mismatch".into()));
    }
    if poly.is_empty()? {
        return Err(Error::EmptySet);
    }
    if poly.recession_cone()?.is_zero() {
        return Ok(DistanceReport {
            bounded_set: true,
            normal_part: ConeUnion::empty(),
            exterior_limits: vec![Cluster { centroid: u.coords().to_vec(), radius: 0.0, count: 0, cone: GenCone::zero() }],
        });
    }
    let normal_part = dir_normal_cone_at_infinity(poly, u)?;
    let proj = Projector::new(poly)?;
    let sampler = Sampler::new(u, None, None, p)?;
    let mut ob = super::estimator::Observed::empty(p.rungs);
    for k in 0..=p.rungs {
        for s in sampler.rung(k) {
            let y = proj.project(&s.x);
            let d = linalg::dist(&s.x, &y);
            if d > 1e-9 * (1.0 + norm(&s.x)) {
                ob.accepted[k] += 1;
                ob.push(k, Kind::Bounded, linalg::scale(&linalg::sub(&s.x, &y), 1.0 / d));
            }
        }
    }
    let first = p.first_persistent();
    let exterior_limits =
        if (first..=p.rungs).all(|k| ob.accepted[k] > 0) { persistent_clusters(&ob, Kind::Bounded, p.eps_c, first, false) } else { Vec::new() };
    Ok(DistanceReport { bounded_set: false, normal_part, exterior_limits })
}

/// Direction-free estimate of `∂f(∞)`: points `t d` with random unit `d`,
/// bounded representatives clustered and kept if persistent over rungs.
pub fn sweep_subdiff_at_infinity(f: &FuncExpr, n: usize, p: &EstimatorParams) -> Result<Vec<Cluster>> {
    sweep_subdiff_with(f, n, p, p.eps_c)
}

/// As [`sweep_subdiff_at_infinity`], clustering at tolerance `tol`
/// (relative). A continuum such as the unit circle for `|x|` only persists
/// across rungs when `tol` is at least the sample spacing, so comparisons
/// against a direction grid pass the grid's resolution here.
pub fn sweep_subdiff_with(f: &FuncExpr, n: usize, p: &EstimatorParams, tol: f64) -> Result<Vec<Cluster>> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;
    f.validate(n)?;
    p.validate()?;
    let domain = domain_of(f)?;
    let rung = |k: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed.wrapping_add(0x51_7CC1_B727_220A_95u64.wrapping_mul(k as u64 + 1)));
        let mut out = Vec::new();
        for _ in 0..p.samples {
            let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let Some(d) = linalg::normalized(&g) else { continue };
            let t = p.radius(k) * p.rho.powf(rng.gen::<f64>());
            let x = linalg::scale(&d, t);
            if domain.as_ref().map_or(true, |q| q.contains(&x, crate::geometry::tau_act(&x))) {
                let c = linalg::scale(&x, 1.0 / p.rho);
                out.push(super::sampler::Sample { rung: k, face: 0, family: None, x, companion: Some(c) });
            }
        }
        out
    };
    let ob = super::estimator::observe_with(f, p, rung, false, false);
    Ok(persistent_clusters(&ob, Kind::Bounded, tol, p.first_persistent(), true))
}

/// Union of the bounded clusters of the directional estimates.
pub fn union_over_directions(f: &FuncExpr, dirs: &[Direction], p: &EstimatorParams) -> Result<Vec<Cluster>> {
    let mut out: Vec<Cluster> = Vec::new();
    for u in dirs {
        match super::estimator::estimate_dir_subdiff(f, u, p) {
            Ok(a) => out.extend(a.bounded_clusters),
            Err(Error::DomainUnreachable(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
