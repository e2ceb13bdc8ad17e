//! Constraint-set normal cone at infinity under the limiting qualification,
//! and error bounds at infinity.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::common::{coarse_pairs, estimate_or_empty, simplex_grid, zero_sum_nontrivial};
use super::types::{Certificate, DirectionReport, Status};
use crate::asymptotics::{estimate_with, lipschitz_at_infinity_test, Cluster, EstimateOptions, EstimatorParams};
use crate::error::{Error, Result};
use crate::func::FuncExpr;
use crate::geometry::lp::{self, LinCon, Lp, LpResult};
use crate::geometry::{ConeUnion, Direction, GenCone, HPolyhedron};
use crate::linalg::{self, norm};
use crate::oracle::{empirical_error_bound, SetOracle};
use crate::poly_infinity::{dir_normal_cone_at_infinity, recession_sweep};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LcqReport {
    pub lcq: bool,
    /// `pos{cluster representatives} + N_Ω(∞;u)`, one piece per piece of
    /// the normal cone.
    pub outer_cone: ConeUnion,
    /// Multipliers on the representatives, in order, when `lcq` fails.
    pub multipliers: Option<Vec<f64>>,
    pub representatives: Vec<Vec<f64>>,
    pub stable: bool,
}

fn bounded_or_empty(f: &FuncExpr, u: &Direction, p: &EstimatorParams, negate: bool) -> Result<(Vec<Cluster>, bool)> {
    let opts = EstimateOptions { negate, ..Default::default() };
    match estimate_with(f, u, p, &opts) {
        Ok((a, _)) => Ok((a.bounded_clusters.clone(), a.is_stable())),
        Err(Error::DomainUnreachable(_)) => Ok((vec![], true)),
        Err(e) => Err(e),
    }
}

/// Feasibility of `Σ λ_k r_k + η ∈ [-tol, tol]^n`, `λ >= 0`, `Σ λ = 1`,
/// `η ∈ piece`.
fn multiplier_lp(reps: &[Vec<f64>], piece: &GenCone, n: usize, tol: f64) -> Result<Option<Vec<f64>>> {
    let (k, g, l) = (reps.len(), piece.generators.len(), piece.lineality.len());
    let nv = k + g + l;
    let mut free = vec![false; nv];
    for j in 0..l {
        free[k + g + j] = true;
    }
    let mut cons = Vec::new();
    for i in 0..n {
        let mut a = vec![0.0; nv];
        for (j, r) in reps.iter().enumerate() {
            a[j] = r[i];
        }
        for (j, v) in piece.generators.iter().enumerate() {
            a[k + j] = v[i];
        }
        for (j, v) in piece.lineality.iter().enumerate() {
            a[k + g + j] = v[i];
        }
        cons.push(LinCon::le(a.clone(), tol));
        cons.push(LinCon::ge(a, -tol));
    }
    let mut a = vec![0.0; nv];
    a[..k].iter_mut().for_each(|v| *v = 1.0);
    cons.push(LinCon::eq(a, 1.0));
    match lp::solve(&Lp { n: nv, free, cons, objective: vec![0.0; nv] })? {
        LpResult::Optimal { x, .. } => Ok(Some(x[..k].to_vec())),
        _ => Ok(None),
    }
}

/// Outer estimate of `N_S(∞;u)` for `S = {x ∈ Ω | g_i <= 0, h_j = 0}`.
/// The qualification is decided on the convex hull of all cluster
/// representatives (one multiplier per representative).
pub fn constraint_normal_cone_estimate(
    gs: &[FuncExpr],
    hs: &[FuncExpr],
    omega: &HPolyhedron,
    u: &Direction,
    p: &EstimatorParams,
) -> Result<LcqReport> {
    let n = u.dim();
    let mut stable = true;
    for (i, f) in gs.iter().chain(hs).enumerate() {
        match lipschitz_at_infinity_test(f, u, p) {
            Ok(c) if c.status == Status::Fails => return Err(Error::LipschitzPreconditionFailed(i)),
            Ok(c) => stable &= c.status == Status::Holds,
            Err(Error::DomainUnreachable(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let normal = dir_normal_cone_at_infinity(omega, u)?;
    if normal.is_empty() {
        return Err(Error::DomainUnreachable(0));
    }
    let mut reps: Vec<Vec<f64>> = Vec::new();
    let mut radius: f64 = 0.0;
    let mut add = |(cs, st): (Vec<Cluster>, bool), stable: &mut bool| {
        *stable &= st;
        for c in cs {
            radius = radius.max(c.radius);
            reps.push(c.centroid);
        }
    };
    for g in gs {
        add(bounded_or_empty(g, u, p, false)?, &mut stable);
    }
    for h in hs {
        add(bounded_or_empty(h, u, p, false)?, &mut stable);
        add(bounded_or_empty(h, u, p, true)?, &mut stable);
    }
    let scale = reps.iter().map(|r| norm(r)).fold(0.0, f64::max);
    let tol = radius + p.eps_c * (1.0 + scale);
    let mut multipliers = None;
    if !reps.is_empty() {
        for piece in &normal.pieces {
            if let Some(l) = multiplier_lp(&reps, piece, n, tol)? {
                multipliers = Some(l);
                break;
            }
        }
    }
    let outer_cone = ConeUnion::from_pieces(
        normal
            .pieces
            .iter()
            .map(|c| GenCone::new(reps.iter().cloned().chain(c.generators.iter().cloned()).collect(), c.lineality.clone()))
            .collect(),
    );
    Ok(LcqReport { lcq: multipliers.is_none(), outer_cone, multipliers, representatives: reps, stable })
}

struct ConstraintEstimate {
    clusters: Vec<Cluster>,
    singular: ConeUnion,
    stable: bool,
    stability: f64,
}

/// `0 ∈ Σ_{λ_i>0} λ_i ∂g_i + Σ_{λ_i=0} ∂^∞g_i + N` for some grid `λ`;
/// returns `(λ, ξ)` with `ξ` the cluster part.
fn simplex_zero(est: &[ConstraintEstimate], normal: &ConeUnion, n: usize, eps: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let m = est.len();
    for lam in simplex_grid(m, 10) {
        // choices: a cluster for positive weights, a singular piece otherwise
        let sizes: Vec<usize> =
            (0..m).map(|i| if lam[i] > 0.0 { est[i].clusters.len() } else { est[i].singular.pieces.len() }).collect();
        if sizes.iter().any(|s| *s == 0) {
            continue;
        }
        let mut idx = vec![0usize; m];
        loop {
            let mut v = vec![0.0; n];
            let mut cone = GenCone::zero();
            let mut slack = 0.0;
            let mut scale = 0.0;
            for i in 0..m {
                if lam[i] > 0.0 {
                    let c = &est[i].clusters[idx[i]];
                    v = linalg::axpy(&v, lam[i], &c.centroid);
                    cone = cone.sum(&c.cone);
                    slack += lam[i] * c.radius;
                    scale += lam[i] * norm(&c.centroid);
                } else {
                    cone = cone.sum(&est[i].singular.pieces[idx[i]]);
                }
            }
            for piece in &normal.pieces {
                let minus = linalg::neg(&v);
                if piece.sum(&cone).distance(&minus) <= slack + eps * (1.0 + scale) {
                    return Some((lam.clone(), v));
                }
            }
            let mut k = 0;
            while k < m {
                idx[k] += 1;
                if idx[k] < sizes[k] {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == m {
                break;
            }
        }
    }
    None
}

fn error_bound_direction(gs: &[FuncExpr], omega: &HPolyhedron, u: &Direction, p: &EstimatorParams) -> Result<(DirectionReport, bool, bool)> {
    let normal = dir_normal_cone_at_infinity(omega, u)?;
    let mut est = Vec::new();
    for g in gs {
        est.push(match estimate_or_empty(g, u, p)? {
            Some(a) => ConstraintEstimate {
                clusters: a.bounded_clusters.clone(),
                singular: a.singular_rays.clone(),
                stable: a.is_stable(),
                stability: a.diagnostics.stability,
            },
            None => ConstraintEstimate { clusters: vec![], singular: ConeUnion::empty(), stable: true, stability: 1.0 },
        });
    }
    let mut unions: Vec<&ConeUnion> = est.iter().map(|e| &e.singular).collect();
    unions.push(&normal);
    let nontrivial = zero_sum_nontrivial(&unions, u.dim(), p.eps_c)?;
    let zero = simplex_zero(&est, &normal, u.dim(), p.eps_c);
    let qual = nontrivial.is_none();
    let zero_free = zero.is_none();
    let pass = qual && zero_free;
    let stable = est.iter().all(|e| e.stable);
    let stability = est.iter().map(|e| e.stability).fold(1.0, f64::min);
    let mut witnesses: Vec<Vec<f64>> = nontrivial.into_iter().collect();
    let mut note = String::new();
    if let Some((lam, xi)) = zero {
        note = format!("0 reached with multipliers {lam:?}");
        witnesses.push(lam);
        witnesses.push(xi);
    }
    let report = DirectionReport { u: u.clone(), qualification: Some(qual), condition: Some(zero_free), stability, witnesses, note };
    Ok((report, pass, stable))
}

/// Error bound at infinity for `S = {x ∈ Ω | g_i(x) <= 0}` (one or more
/// constraints; `Σ[g_i]_+` on the right-hand side).
pub fn error_bound_certificate(gs: &[FuncExpr], omega: &HPolyhedron, grid: usize, p: &EstimatorParams) -> Result<Certificate> {
    if gs.is_empty() {
        return Err(Error::InvalidInput("no constraint functions".into()));
    }
    for g in gs {
        g.validate(omega.dim())?;
    }
    let dirs = recession_sweep(omega, grid, p.seed)?;
    if dirs.is_empty() {
        return Err(Error::BoundedSet);
    }
    let mut reports = Vec::new();
    let (mut pass, mut stable) = (Vec::new(), Vec::new());
    for u in &dirs {
        let (r, ok, st) = error_bound_direction(gs, omega, u, p)?;
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
    let mut warnings: Vec<String> = coarse_pairs(&dirs, &pass)
        .into_iter()
        .map(|(i, j)| {
            format!("GridTooCoarse: verdicts differ between adjacent directions {:?} and {:?}", dirs[i].coords(), dirs[j].coords())
        })
        .collect();
    warnings.push(format!("direction grid resolution {grid}"));
    let oracle = error_bound_oracle(gs, omega, p, &mut warnings)?;
    let summary = match status {
        Status::Holds => "hypotheses hold on every direction: S has an error bound at infinity".to_string(),
        Status::Fails => format!(
            "hypotheses fail at {} of {} directions (first {:?}); the conditions are sufficient, not necessary",
            failing.len(),
            dirs.len(),
            dirs[failing[0]].coords()
        ),
        Status::Unknown => "some direction estimates are unstable".to_string(),
    };
    Ok(Certificate {
        theorem: if gs.len() == 1 { "error_bound".into() } else { "error_bound_multi".into() },
        status,
        directions: reports,
        summary,
        oracle,
        params: p.clone(),
        warnings,
    })
}

fn error_bound_oracle(gs: &[FuncExpr], omega: &HPolyhedron, p: &EstimatorParams, warnings: &mut Vec<String>) -> Result<Value> {
    if omega.dim() > 3 {
        warnings.push("no error-bound oracle above dimension 3".into());
        return Ok(Value::Null);
    }
    let s = SetOracle::new(omega, gs, 10.0 * p.r0)?;
    let r = p.r0;
    let near = empirical_error_bound(&s, r, 128, p.seed);
    let far = empirical_error_bound(&s, 10.0 * r, 128, p.seed);
    let show = |a: &Result<f64>| match a {
        Ok(v) => json!(v),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let stable = match (&near, &far) {
        (Ok(a), Ok(b)) => json!((a - b).abs() <= 1e-3 * (1.0 + a.abs())),
        _ => Value::Null,
    };
    Ok(json!({
        "label": "empirical",
        "set_anchor": s.anchor,
        "radius": r,
        "alpha_hat": show(&near),
        "radius_outer": 10.0 * r,
        "alpha_hat_outer": show(&far),
        "alpha_stable_across_radius": stable,
    }))
}
