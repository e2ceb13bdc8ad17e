//! The reproduction bundle: the worked examples recomputed end to end, each
//! with expected and computed values side by side.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::asymptotics::{estimate_dir_subdiff, EstimatorParams};
use crate::certificates::{error_bound_certificate, existence_certificate, ProblemSpec, Status};
use crate::error::Result;
use crate::func::FuncExpr;
use crate::geometry::{ConeUnion, Direction, HPolyhedron};
use crate::linalg::{dist, dot, norm};
use crate::poly_infinity::{dir_normal_cone_at_infinity, normal_cone_at_infinity};

pub const FLAG_TEXT: &str = "paper value not reproduced; see Open Questions";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStatus {
    Pass,
    Fail,
    Flagged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub id: String,
    pub title: String,
    pub status: CaseStatus,
    /// Flagged cases never block; failures always do.
    pub blocking: bool,
    pub expected: Value,
    pub computed: Value,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub schema: u32,
    pub seed: u64,
    pub cases: Vec<CaseReport>,
    /// Every non-flagged case passed.
    pub ok: bool,
}

fn case(id: &str, title: &str, pass: bool, expected: Value, computed: Value, note: &str) -> CaseReport {
    CaseReport {
        id: id.into(),
        title: title.into(),
        status: if pass { CaseStatus::Pass } else { CaseStatus::Fail },
        blocking: !pass,
        expected,
        computed,
        note: note.into(),
    }
}

fn dir(v: &[f64]) -> Direction {
    Direction::new(v).expect("nonzero literal")
}

fn cos(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b) / (norm(a) * norm(b))
}

/// `x1/2 <= x2 <= 2 x1`.
pub fn cone_example() -> HPolyhedron {
    HPolyhedron::new(2, vec![vec![1.0, -2.0], vec![-2.0, 1.0]], vec![0.0, 0.0], vec![], vec![]).expect("fixed data")
}

/// `x1^2 + e^{x2}`.
pub fn escape_example() -> FuncExpr {
    FuncExpr::sum(vec![FuncExpr::quad(vec![vec![1.0, 0.0], vec![0.0, 0.0]]), FuncExpr::exp_affine(vec![0.0, 1.0], 0.0)])
}

/// `e^{-x1} + (x2 - x1)^2`.
pub fn directional_example() -> FuncExpr {
    FuncExpr::sum(vec![FuncExpr::exp_affine(vec![-1.0, 0.0], 0.0), FuncExpr::quad(vec![vec![1.0, -1.0], vec![-1.0, 1.0]])])
}

fn nonzero_generator(c: &ConeUnion) -> Option<Vec<f64>> {
    c.pieces.iter().flat_map(|p| p.generators.iter()).next().cloned()
}

fn run_cone_example() -> Result<CaseReport> {
    let p = cone_example();
    let mut computed = serde_json::Map::new();
    let mut pass = true;
    for (name, u, want) in [("u", [2.0, 1.0], [1.0, -2.0]), ("v", [1.0, 2.0], [-2.0, 1.0])] {
        let c = dir_normal_cone_at_infinity(&p, &dir(&u))?;
        let g = nonzero_generator(&c);
        let cosine = g.as_ref().map(|g| cos(g, &want)).unwrap_or(f64::NAN);
        pass &= cosine > 1.0 - 1e-9;
        computed.insert(name.into(), json!({"cone": c, "cosine_to_expected": cosine}));
    }
    let full = normal_cone_at_infinity(&p)?;
    let union = dir_normal_cone_at_infinity(&p, &dir(&[2.0, 1.0]))?.union(&dir_normal_cone_at_infinity(&p, &dir(&[1.0, 2.0]))?);
    // the two boundary rays plus {0} account for everything
    let mut agree = 0;
    let total = 360;
    for k in 0..total {
        let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / total as f64;
        let v = [t.cos(), t.sin()];
        agree += usize::from(full.contains(&v, 1e-9) == union.contains(&v, 1e-9));
    }
    pass &= agree == total;
    computed.insert("union_membership_agreement".into(), json!(format!("{agree}/{total}")));
    Ok(case(
        "cone_example",
        "directional normal cones at infinity of {x1/2 <= x2 <= 2 x1}",
        pass,
        json!({"u": [2.0, 1.0], "generator_u": [1.0, -2.0], "v": [1.0, 2.0], "generator_v": [-2.0, 1.0], "union": "equals the nondirectional cone"}),
        Value::Object(computed),
        "directions normalized before use",
    ))
}

fn run_product_set() -> Result<CaseReport> {
    let rplus = HPolyhedron::halfspace(vec![-1.0], 0.0);
    let n1 = dir_normal_cone_at_infinity(&rplus, &dir(&[1.0]))?;
    let quadrant = HPolyhedron::new(2, vec![vec![-1.0, 0.0], vec![0.0, -1.0]], vec![0.0, 0.0], vec![], vec![])?;
    let np = dir_normal_cone_at_infinity(&quadrant, &dir(&[1.0, 0.0]))?;
    let n1_zero = n1 == ConeUnion::zero();
    let np_ok = np.contains(&[0.0, -1.0], 1e-9)
        && [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]].iter().all(|v| !np.contains(v, 1e-6));
    // 0 is not a unit vector, so no sequence in Ω2 has x/|x| -> 0 and the
    // second factor cone is empty; the product of the factor cones is empty
    let product_of_factors_empty = true;
    let inclusion = np.has_nonzero() && !product_of_factors_empty;
    Ok(case(
        "product_set",
        "Ω1 = Ω2 = ℝ+: the product rule fails for directional cones",
        n1_zero && np_ok && !inclusion,
        json!({"N_Omega1(inf;1)": "{0}", "N_Omega2(inf;0)": "empty", "N_product(inf;(1,0))": "{0} x ℝ-", "inclusion_in_product": false}),
        json!({"N_Omega1(inf;1)": n1, "N_Omega2(inf;0)": "empty (0 is not on the unit sphere)", "N_product(inf;(1,0))": np, "inclusion_in_product": inclusion}),
        "the second factor direction is 0; the engine takes unit directions, so that factor is empty by definition",
    ))
}

fn run_escape_example(p: &EstimatorParams) -> Result<CaseReport> {
    let ps = ProblemSpec::new(escape_example(), HPolyhedron::whole_space(2))?;
    let c = existence_certificate(&ps, 16, p)?;
    let failing: Vec<&[f64]> = c.directions.iter().filter(|d| d.condition == Some(false)).map(|d| d.u.coords()).collect();
    let near = !failing.is_empty() && failing.iter().all(|u| dist(u, &[0.0, -1.0]) < 0.1);
    let escape = c.oracle["inner_search"]["escape_detected"] == json!(true);
    Ok(case(
        "escape_example",
        "x1^2 + e^{x2} has no minimizer",
        c.status == Status::Fails && near && escape,
        json!({"status": "fails", "failing_direction": [0.0, -1.0], "argmin": "empty"}),
        json!({"status": c.status, "failing_directions": failing, "oracle_escape_detected": escape, "oracle": c.oracle}),
        "failing directions must be within 0.1 of (0,-1)",
    ))
}

fn run_directional(p: &EstimatorParams) -> Result<CaseReport> {
    let f = directional_example();
    let up = estimate_dir_subdiff(&f, &dir(&[0.0, 1.0]), p)?;
    let diag = estimate_dir_subdiff(&f, &dir(&[1.0, 1.0]), p)?;
    let worst = diag.bounded_clusters.iter().map(|c| (c.centroid[0] + c.centroid[1]).abs()).fold(0.0, f64::max);
    let line = HPolyhedron::new(2, vec![], vec![], vec![vec![1.0, 0.0]], vec![0.0])?;
    let c = existence_certificate(&ProblemSpec::new(f, line)?, 16, p)?;
    let best = &c.oracle["inner_search"];
    let x: Vec<f64> = serde_json::from_value(best["best_point"].clone()).unwrap_or_default();
    let v = best["empirical_inf"].as_f64().unwrap_or(f64::NAN);
    let pass = up.empty_bounded
        && up.diagnostics.stability >= 0.9
        && !diag.bounded_clusters.is_empty()
        && worst < 1e-3
        && c.status == Status::Holds
        && x.len() == 2
        && dist(&x, &[0.0, 0.0]) < 1e-4
        && (v - 1.0).abs() < 1e-6;
    Ok(case(
        "directional_example",
        "e^{-x1} + (x2 - x1)^2: directional subdifferentials and existence on {x1 = 0}",
        pass,
        json!({"u=(0,1)": {"bounded_part": "empty"}, "u=(1,1)/sqrt2": {"bounded_part": "{(s,-s)}"}, "existence_on_x1_eq_0": "holds", "argmin": [0.0, 0.0], "min_value": 1.0}),
        json!({
            "u=(0,1)": {"empty_bounded": up.empty_bounded, "stability": up.diagnostics.stability},
            "u=(1,1)/sqrt2": {"clusters": diag.bounded_clusters.len(), "max_abs_xi1_plus_xi2": worst},
            "existence_on_x1_eq_0": c.status,
            "argmin": x,
            "min_value": v,
            "qualification_by_direction": c.directions.iter().map(|d| json!({"u": d.u, "qualification": d.qualification, "note": d.note})).collect::<Vec<_>>(),
        }),
        "the qualification fails at (0,±1); the verdict comes from the composite f + indicator(Ω), see decisions ledger",
    ))
}

fn run_error_bound(p: &EstimatorParams) -> Result<CaseReport> {
    let rplus = HPolyhedron::halfspace(vec![-1.0], 0.0);
    let c = error_bound_certificate(&[FuncExpr::pw(vec![1.0], 0.0)], &rplus, 8, p)?;
    let alpha = c.oracle["alpha_hat"].as_f64().unwrap_or(f64::NAN);
    Ok(case(
        "error_bound",
        "g(x) = x for x >= 0, e^x - 1 otherwise, on ℝ+",
        c.status == Status::Holds && (alpha - 1.0).abs() <= 1e-3,
        json!({"status": "holds", "alpha_hat": 1.0, "S": [0.0]}),
        json!({"status": c.status, "alpha_hat": alpha, "oracle": c.oracle}),
        "alpha_hat is the largest dist(x,S)/[g(x)]+ over sampled |x| in [10,100]",
    ))
}

/// `∂^∞f(∞;(±1,0))` for `x1^2 + e^{x2}`: the stated value is `ℝ×{0}`; the
/// estimator also sees `(0,1)` along `x = (t, s)` with `s` growing slowly.
fn run_discrepancy(p: &EstimatorParams) -> Result<CaseReport> {
    let f = escape_example();
    let mut found = Vec::new();
    let mut reproduced = true;
    for u in [[1.0, 0.0], [-1.0, 0.0]] {
        let a = estimate_dir_subdiff(&f, &dir(&u), p)?;
        let rays = &a.singular_rays;
        let has_e2 = rays.contains(&[0.0, 1.0], p.eps_c);
        let plus = rays.contains(&[1.0, 0.0], p.eps_c);
        let minus = rays.contains(&[-1.0, 0.0], p.eps_c);
        reproduced &= plus && minus && !has_e2;
        found.push(json!({"u": u, "singular_rays": rays, "contains_(0,1)": has_e2, "contains_(1,0)": plus, "contains_(-1,0)": minus}));
    }
    let note = if reproduced { "estimate matches the stated value" } else { FLAG_TEXT };
    Ok(CaseReport {
        id: "singular_subdiff_discrepancy".into(),
        title: "∂^∞f(∞;(±1,0)) for x1^2 + e^{x2}".into(),
        status: if reproduced { CaseStatus::Pass } else { CaseStatus::Flagged },
        blocking: false,
        expected: json!({"stated_value": "ℝ × {0}"}),
        computed: json!({"estimator_finding": found}),
        note: note.into(),
    })
}

/// Runs every case. Deterministic for fixed params; no timings are recorded.
pub fn reproduce_examples(p: &EstimatorParams) -> Result<Bundle> {
    p.validate()?;
    let cases = vec![
        run_cone_example()?,
        run_product_set()?,
        run_escape_example(p)?,
        run_directional(p)?,
        run_error_bound(p)?,
        run_discrepancy(p)?,
    ];
    let ok = cases.iter().all(|c| c.status != CaseStatus::Fail);
    Ok(Bundle { schema: 1, seed: p.seed, cases, ok })
}
