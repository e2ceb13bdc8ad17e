//! Nonempty faces of an H-polyhedron, keyed by exact active set.

use serde::{Deserialize, Serialize};

use super::cone::GenCone;
use super::dd;
use super::lp::{self, LinCon, LpResult};
use super::polyhedron::HPolyhedron;
use crate::error::Result;
use crate::linalg::{dot, norm};

/// Minimum slack on inactive rows for a face to count as having exactly
/// the given active set; thinner faces are treated as degenerate.
const EXACT_SLACK: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceDescriptor {
    pub active_set: Vec<usize>,
    pub witness: Vec<f64>,
    pub recession: GenCone,
}

impl FaceDescriptor {
    /// `A_i u = 0 (i in J), A_j u <= 0, E u = 0` up to `tol` on unit rows.
    pub fn recedes_along(&self, p: &HPolyhedron, u: &[f64], tol: f64) -> bool {
        let ok_eq = p.e().iter().all(|r| dot(r, u).abs() <= tol * norm(r).max(1e-300));
        ok_eq
            && (0..p.num_ineq()).all(|i| {
                let s = dot(&p.a()[i], u) / norm(&p.a()[i]).max(1e-300);
                if self.active_set.contains(&i) {
                    s.abs() <= tol
                } else {
                    s <= tol
                }
            })
    }

    /// `pos{A_i : i in J} + span{rows of E}`.
    pub fn normal_cone(&self, p: &HPolyhedron) -> GenCone {
        GenCone::new(self.active_set.iter().map(|&i| p.a()[i].clone()).collect(), p.e().to_vec())
    }

    pub fn is_unbounded(&self) -> bool {
        !self.recession.is_zero()
    }
}

/// Largest uniform slack `s <= 1` on rows outside `j` with rows in `j`
/// tight; returns the slack and the maximizer, or `None` if no point
/// satisfies even `s >= 0`.
fn face_slack(p: &HPolyhedron, j: &[usize]) -> Result<Option<(f64, Vec<f64>)>> {
    let n = p.dim();
    let nv = n + 1;
    let mut cons = Vec::new();
    for i in 0..p.num_ineq() {
        let mut a = p.a()[i].clone();
        if j.contains(&i) {
            a.push(0.0);
            cons.push(LinCon::eq(a, p.b()[i]));
        } else {
            a.push(norm(&p.a()[i]));
            cons.push(LinCon::le(a, p.b()[i]));
        }
    }
    for (e, d) in p.e().iter().zip(p.d()) {
        let mut a = e.clone();
        a.push(0.0);
        cons.push(LinCon::eq(a, *d));
    }
    let mut cap = vec![0.0; nv];
    cap[n] = 1.0;
    cons.push(LinCon::le(cap, 1.0));
    let mut objective = vec![0.0; nv];
    objective[n] = -1.0;
    let prob = lp::Lp { n: nv, free: vec![true; nv], cons, objective };
    match lp::solve(&prob)? {
        LpResult::Optimal { x, .. } => {
            let s = x[n];
            if s < -1e-9 {
                Ok(None)
            } else {
                Ok(Some((s, x[..n].to_vec())))
            }
        }
        _ => Ok(None),
    }
}

/// All nonempty faces with their exact active sets, in depth-first order
/// over active sets listed by increasing row index. Subsets whose face is
/// empty are pruned together with all their supersets.
pub fn enumerate_faces(p: &HPolyhedron) -> Result<Vec<FaceDescriptor>> {
    p.check_caps()?;
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    let m = p.num_ineq();
    while let Some(j) = stack.pop() {
        let Some((s, x)) = face_slack(p, &j)? else { continue };
        let exact = j.len() == m || s > EXACT_SLACK;
        if exact {
            let eq_rows: Vec<Vec<f64>> = j.iter().map(|&i| p.a()[i].clone()).chain(p.e().iter().cloned()).collect();
            let ineq_rows: Vec<Vec<f64>> =
                (0..m).filter(|i| !j.contains(i)).map(|i| p.a()[i].clone()).collect();
            let recession = dd::cone_from_h(&ineq_rows, &eq_rows, p.dim());
            out.push(FaceDescriptor { active_set: j.clone(), witness: x, recession });
        }
        let start = j.last().map_or(0, |l| l + 1);
        for k in (start..m).rev() {
            let mut child = j.clone();
            child.push(k);
            stack.push(child);
        }
    }
    Ok(out)
}
