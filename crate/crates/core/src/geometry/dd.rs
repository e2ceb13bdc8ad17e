//! Double description for cones `{u | A u <= 0, E u = 0}`.
//!
//! Starts from the whole space (lineality = identity basis, no rays) and
//! intersects one half-space at a time. Lineality directions that cut the
//! new half-space become rays; otherwise rays are split by sign and adjacent
//! pairs across the hyperplane are combined (combinatorial adjacency test).

use super::cone::GenCone;
use crate::linalg::{self, dot};

const ZERO: f64 = 1e-10;

struct Ray {
    v: Vec<f64>,
    zeros: Vec<usize>,
}

fn unit_or_none(v: &[f64]) -> Option<Vec<f64>> {
    linalg::normalized(v)
}

/// Generators of `{u | a·u <= 0 for a in ineq, e·u = 0 for e in eq}`.
pub fn cone_from_h(ineq: &[Vec<f64>], eq: &[Vec<f64>], n: usize) -> GenCone {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for e in eq {
        rows.push(e.clone());
        rows.push(linalg::neg(e));
    }
    rows.extend(ineq.iter().cloned());
    let rows: Vec<Vec<f64>> = rows.iter().filter_map(|r| unit_or_none(r)).collect();

    let mut lin: Vec<Vec<f64>> = (0..n).map(|i| linalg::unit(n, i)).collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, a) in rows.iter().enumerate() {
        let pick = lin
            .iter()
            .enumerate()
            .map(|(i, l)| (i, dot(a, l)))
            .filter(|(_, s)| s.abs() > ZERO)
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()));
        if let Some((i0, s0)) = pick {
            let l0 = lin.remove(i0);
            for l in lin.iter_mut() {
                let c = dot(a, l) / s0;
                *l = linalg::axpy(l, -c, &l0);
            }
            for r in rays.iter_mut() {
                let c = dot(a, &r.v) / s0;
                r.v = linalg::axpy(&r.v, -c, &l0);
                if let Some(u) = unit_or_none(&r.v) {
                    r.v = u;
                }
                r.zeros.push(k);
            }
            let oriented = if s0 < 0.0 { l0 } else { linalg::neg(&l0) };
            let zeros: Vec<usize> = (0..k).collect();
            rays.push(Ray { v: unit_or_none(&oriented).unwrap(), zeros });
            continue;
        }
        let vals: Vec<f64> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > ZERO).collect();
        if pos.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.abs() <= ZERO {
                    r.zeros.push(k);
                }
            }
            continue;
        }
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < -ZERO).collect();
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let z: Vec<usize> = rays[p].zeros.iter().filter(|i| rays[q].zeros.contains(i)).copied().collect();
                let blocked = (0..rays.len())
                    .any(|r| r != p && r != q && z.iter().all(|i| rays[r].zeros.contains(i)));
                if blocked {
                    continue;
                }
                let v = linalg::sub(&linalg::scale(&rays[q].v, vals[p]), &linalg::scale(&rays[p].v, vals[q]));
                if let Some(u) = unit_or_none(&v) {
                    let mut zeros = z;
                    zeros.push(k);
                    fresh.push(Ray { v: u, zeros });
                }
            }
        }
        let mut kept: Vec<Ray> = Vec::new();
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i] <= ZERO {
                if vals[i].abs() <= ZERO {
                    r.zeros.push(k);
                }
                kept.push(r);
            }
        }
        kept.extend(fresh);
        rays = kept;
    }
    GenCone::new(rays.into_iter().map(|r| r.v).collect(), lin)
}
