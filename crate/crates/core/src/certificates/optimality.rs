//! Necessary optimality at infinity, existence over a direction grid, and
//! existence of a minimizer along a ray.

use serde_json::{json, Value};

use super::common::{coarse_pairs, estimate_or_empty, meet, orthogonal_complement, zero_in_sum};
use super::problem::ProblemSpec;
use super::types::{Certificate, DirectionReport, Status};
use crate::asymptotics::{domain_of, estimate_dir_subdiff, EstimatorParams, SubdiffApprox};
use crate::error::{Error, Result};
use crate::func::FuncExpr;
use crate::geometry::{ConeUnion, Direction, HPolyhedron};
use crate::linalg::{self, norm};
use crate::oracle::{ray_line_search, region_inf_search, shell_points, RaySearchResult};
use crate::poly_infinity::{dir_normal_cone_at_infinity, recession_sweep, REC_TOL};

pub(crate) fn search_json(r: &Result<RaySearchResult>) -> Value {
    match r {
        Ok(r) => json!({
            "empirical_inf": r.empirical_inf,
            "attained": r.attained,
            "best_point": r.best_point,
            "escape_detected": r.escape_detected,
            "escape_direction": r.escape_direction,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn search_region(f: &FuncExpr, omega: &HPolyhedron) -> Result<HPolyhedron> {
    match domain_of(f)? {
        Some(d) => omega.intersect(&d),
        None => Ok(omega.clone()),
    }
}

fn require_recession(omega: &HPolyhedron, u: &Direction) -> Result<()> {
    if omega.dim() != u.dim() {
        return Err(Error::InvalidInput("direction dimension mismatch".into()));
    }
    if !omega.in_recession(u.coords(), REC_TOL) {
        return Err(Error::DomainUnreachable(0));
    }
    Ok(())
}

/// Per-direction evaluation of `∂^∞f ∩ -N = {0}` and `0 ∈ ∂f + N`.
struct DirCheck {
    qualification: bool,
    zero: Option<(Vec<f64>, Vec<f64>)>,
    meet: Option<Vec<f64>>,
    stability: f64,
    stable: bool,
}

fn check_direction(f: &FuncExpr, cone: &ConeUnion, u: &Direction, p: &EstimatorParams) -> Result<(DirCheck, Option<SubdiffApprox>)> {
    let Some(a) = estimate_or_empty(f, u, p)? else {
        return Ok((DirCheck { qualification: true, zero: None, meet: None, stability: 1.0, stable: true }, None));
    };
    let m = meet(&a.singular_rays, cone, u.dim(), p.eps_c)?;
    let zero = zero_in_sum(&a.bounded_clusters, cone, p.eps_c);
    let c = DirCheck { qualification: m.is_none(), zero, meet: m, stability: a.diagnostics.stability, stable: a.is_stable() };
    Ok((c, Some(a)))
}

/// Necessary condition at infinity along `u`. `Holds`: the qualification
/// holds and `0 ∈ ∂f(∞;u) + N_Ω(∞;u)`, so minimizing sequences may escape
/// along `u`. `Fails`: the qualification holds and the inclusion fails, so
/// `u` is excluded. `Unknown`: unstable estimate or failed qualification.
pub fn optimality_at_infinity_check(ps: &ProblemSpec, u: &Direction, p: &EstimatorParams) -> Result<Certificate> {
    let f = ps.objective()?;
    require_recession(&ps.omega, u)?;
    let cone = dir_normal_cone_at_infinity(&ps.omega, u)?;
    let (c, _) = check_direction(f, &cone, u, p)?;
    let holds = c.zero.is_some();
    let status = if !c.stable || !c.qualification { Status::Unknown } else { Status::from_flags(holds, true) };
    let mut witnesses: Vec<Vec<f64>> = c.meet.iter().cloned().collect();
    if let Some((xi, eta)) = &c.zero {
        witnesses.push(xi.clone());
        witnesses.push(eta.clone());
    }
    let note = match status {
        Status::Holds => "0 is in the limiting part plus the normal cone: u not excluded",
        Status::Fails => "0 is not in the sum: u excluded, no minimizing sequence escapes along u",
        Status::Unknown if !c.qualification => "qualification fails: the theorem does not apply",
        Status::Unknown => "estimate unstable",
    };
    let region = search_region(f, &ps.omega)?;
    let search = region_inf_search(f, &region, 10.0 * p.r0, 8, p.seed);
    let mut warnings = Vec::new();
    let escapes_along_u = matches!(&search, Ok(r) if r.escape_detected
        && r.escape_direction.as_ref().is_some_and(|d| linalg::dist(d.coords(), u.coords()) < 0.1));
    if escapes_along_u && status == Status::Fails {
        warnings.push("oracle sees a minimizing sequence escaping along an excluded direction".into());
    }
    Ok(Certificate {
        theorem: "optimality_at_infinity".into(),
        status,
        directions: vec![DirectionReport {
            u: u.clone(),
            qualification: Some(c.qualification),
            condition: Some(holds),
            stability: c.stability,
            witnesses,
            note: note.into(),
        }],
        summary: note.into(),
        oracle: json!({ "label": "empirical", "region_search": search_json(&search), "escapes_along_u": escapes_along_u }),
        params: p.clone(),
        warnings,
    })
}

/// One direction of the existence sweep: pass when the qualification
/// holds and `0 ∉ ∂f(∞;u) + N_Ω(∞;u)`. If the qualification fails, the
/// composite `f + δ_Ω` is estimated directly and passes when `0` is not in
/// its limiting part; that is the statement the theorem's hypotheses are
/// used to reach.
fn existence_direction(f: &FuncExpr, omega: &HPolyhedron, u: &Direction, p: &EstimatorParams) -> Result<(DirectionReport, bool, bool)> {
    let cone = dir_normal_cone_at_infinity(omega, u)?;
    let (c, a) = check_direction(f, &cone, u, p)?;
    let mut witnesses: Vec<Vec<f64>> = Vec::new();
    let (pass, stable, stability, note);
    if a.is_none() {
        (pass, stable, stability) = (true, true, 1.0);
        note = "dom f does not recede along u".to_string();
    } else if c.qualification {
        pass = c.zero.is_none();
        (stable, stability) = (c.stable, c.stability);
        if let Some((xi, eta)) = &c.zero {
            witnesses.push(xi.clone());
            witnesses.push(eta.clone());
        }
        note = if pass { "0 not in the sum".into() } else { "0 in the sum".into() };
    } else {
        witnesses.extend(c.meet.iter().cloned());
        let composite = FuncExpr::sum(vec![f.clone(), FuncExpr::indicator(omega.clone())]);
        let b = estimate_dir_subdiff(&composite, u, p)?;
        let z = zero_in_sum(&b.bounded_clusters, &ConeUnion::zero(), p.eps_c);
        pass = z.is_none();
        stable = c.stable && b.is_stable();
        stability = c.stability.min(b.diagnostics.stability);
        if let Some((xi, _)) = z {
            witnesses.push(xi);
        }
        note = format!(
            "qualification fails; composite f + indicator of Ω checked directly: 0 {} its limiting part",
            if pass { "not in" } else { "in" }
        );
    }
    let report = DirectionReport {
        u: u.clone(),
        qualification: Some(c.qualification),
        condition: Some(pass),
        stability,
        witnesses,
        note,
    };
    Ok((report, pass, stable))
}

fn existence_oracle(f: &FuncExpr, omega: &HPolyhedron, p: &EstimatorParams) -> Result<Value> {
    let region = search_region(f, omega)?;
    let inner_r = 10.0 * p.r0;
    let outer_r = 10.0 * p.radius(p.rungs);
    let inner = region_inf_search(f, &region, inner_r, 8, p.seed);
    let outer = region_inf_search(f, &region, outer_r, 8, p.seed);
    let sound = match (&inner, &outer) {
        (Ok(a), Ok(b)) => Some(a.empirical_inf - b.empirical_inf <= 1e-6),
        _ => None,
    };
    let mut shell_minima = Vec::new();
    for k in p.rungs.saturating_sub(2)..=p.rungs {
        let r = p.radius(k);
        let m = shell_points(&region, r, 2.0 * r, 128, p.seed ^ k as u64)?
            .iter()
            .map(|x| f.value(x))
            .filter(|v| !v.is_nan())
            .fold(f64::INFINITY, f64::min);
        shell_minima.push(m);
    }
    let coercive = shell_minima.windows(2).all(|w| w[1] > w[0]);
    let mut weak = Value::Null;
    if let Ok(best) = &inner {
        let fs = best.empirical_inf;
        let mut ratios: Vec<f64> = shell_points(&region, inner_r, 10.0 * inner_r, 256, p.seed)?
            .iter()
            .filter_map(|x| {
                let d = linalg::dist(x, &best.best_point);
                let v = f.value(x);
                (d > 0.0 && !v.is_nan()).then(|| (v - fs) / d)
            })
            .collect();
        ratios.sort_by(f64::total_cmp);
        if !ratios.is_empty() {
            weak = json!({
                "samples": ratios.len(),
                "min_ratio": ratios[0],
                "p05_ratio": ratios[ratios.len() / 20],
            });
        }
    }
    Ok(json!({
        "label": "empirical",
        "inner_radius": inner_r,
        "inner_search": search_json(&inner),
        "outer_radius": outer_r,
        "outer_search": search_json(&outer),
        "argmin_sound": sound,
        "shell_radii": (p.rungs.saturating_sub(2)..=p.rungs).map(|k| p.radius(k)).collect::<Vec<_>>(),
        "shell_minima": shell_minima,
        "coercive_surrogate": coercive,
        "weak_sharp": weak,
    }))
}

/// Existence, compactness, coercivity and weak sharpness at infinity:
/// both hypotheses on every grid direction of `rec(Ω)`.
pub fn existence_certificate(ps: &ProblemSpec, grid: usize, p: &EstimatorParams) -> Result<Certificate> {
    let f = ps.objective()?;
    let dirs = recession_sweep(&ps.omega, grid, p.seed)?;
    let mut reports = Vec::new();
    let (mut pass, mut stable) = (Vec::new(), Vec::new());
    for u in &dirs {
        let (r, ok, st) = existence_direction(f, &ps.omega, u, p)?;
        reports.push(r);
        pass.push(ok);
        stable.push(st);
    }
    let failing: Vec<usize> = (0..dirs.len()).filter(|&i| !pass[i] && stable[i]).collect();
    let status = if !failing.is_empty() {
        Status::Fails
    } else if stable.iter().all(|s| *s) {
        Status::Holds
    } else {
        Status::Unknown
    };
    let mut warnings = Vec::new();
    if dirs.is_empty() {
        warnings.push("Ω is bounded: no direction at infinity to check".into());
    }
    for (i, j) in coarse_pairs(&dirs, &pass) {
        warnings.push(format!(
            "GridTooCoarse: verdicts differ between adjacent directions {:?} and {:?}",
            dirs[i].coords(),
            dirs[j].coords()
        ));
    }
    let summary = match status {
        Status::Holds => format!(
            "all {} directions pass: solution set nonempty and compact, weak sharp minimum at infinity, f coercive on Ω",
            dirs.len()
        ),
        Status::Fails => format!(
            "hypotheses fail at {} of {} directions (first {:?}); no conclusion",
            failing.len(),
            dirs.len(),
            dirs[failing[0]].coords()
        ),
        Status::Unknown => "some direction estimates are unstable".into(),
    };
    Ok(Certificate {
        theorem: "existence".into(),
        status,
        directions: reports,
        summary,
        oracle: existence_oracle(f, &ps.omega, p)?,
        params: p.clone(),
        warnings: warnings.into_iter().chain([format!("direction grid resolution {grid}")]).collect(),
    })
}

/// Minimizer of `f` on the ray `xbar + pos{u}` for convex `Ω`:
/// `∂^∞f(∞;u) ∩ u^⊥ = {0}` and `∂f(∞;u) ∩ u^⊥ = ∅`.
pub fn ray_existence_check(ps: &ProblemSpec, xbar: &[f64], u: &Direction, p: &EstimatorParams) -> Result<Certificate> {
    let f = ps.objective()?;
    require_recession(&ps.omega, u)?;
    if xbar.len() != ps.dim() || !ps.omega.contains(xbar, 1e-9 * (1.0 + norm(xbar))) || !f.in_domain(xbar) {
        return Err(Error::NotInDomain);
    }
    let perp = orthogonal_complement(u);
    let (c, _) = check_direction(f, &perp, u, p)?;
    let cond = c.zero.is_none();
    let mut status = if c.stable { Status::from_flags(c.qualification && cond, true) } else { Status::Unknown };
    let mut witnesses: Vec<Vec<f64>> = c.meet.iter().cloned().collect();
    if let Some((xi, _)) = &c.zero {
        witnesses.push(xi.clone());
    }
    let search = ray_line_search(f, xbar, u, 10.0 * p.radius(p.rungs));
    let mut warnings = Vec::new();
    if matches!(&search, Ok(r) if r.escape_detected) {
        warnings.push("oracle: f decreases without bound along the ray, so f is not bounded below".into());
        if status == Status::Holds {
            status = Status::Unknown;
        }
    }
    let attained = matches!(&search, Ok(r) if r.attained);
    let note = match (c.qualification, cond) {
        (true, true) => "both conditions hold",
        (false, _) => "singular part meets the orthogonal complement of u",
        (true, false) => "limiting part meets the orthogonal complement of u",
    };
    let summary = match status {
        Status::Holds => "argmin over the ray is nonempty".to_string(),
        Status::Fails if attained => format!("hypotheses fail ({note}); the oracle still finds a minimizer on the ray"),
        Status::Fails => format!("hypotheses fail ({note})"),
        Status::Unknown => "estimate unstable or f unbounded below".to_string(),
    };
    Ok(Certificate {
        theorem: "ray_existence".into(),
        status,
        directions: vec![DirectionReport {
            u: u.clone(),
            qualification: Some(c.qualification),
            condition: Some(cond),
            stability: c.stability,
            witnesses,
            note: note.into(),
        }],
        summary,
        oracle: json!({ "label": "empirical", "line_search": search_json(&search) }),
        params: p.clone(),
        warnings,
    })
}
