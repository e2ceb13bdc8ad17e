//! Checks shared by the certificates: `0 ∈ clusters + cone`, pointedness
//! of a sum of cone unions, and direction-grid bookkeeping.

use crate::asymptotics::{estimate_dir_subdiff, Cluster, EstimatorParams, SubdiffApprox};
use crate::error::{Error, Result};
use crate::func::FuncExpr;
use crate::geometry::cone::{negative_meet, nnls};
use crate::geometry::{ConeUnion, Direction, GenCone};
use crate::linalg::{self, dot, norm};

/// `∂f(∞;u)` estimate, or `None` when `dom f` does not recede along `u`
/// (both parts are then empty).
pub fn estimate_or_empty(f: &FuncExpr, u: &Direction, p: &EstimatorParams) -> Result<Option<SubdiffApprox>> {
    match estimate_dir_subdiff(f, u, p) {
        Ok(a) => Ok(Some(a)),
        Err(Error::DomainUnreachable(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// A pair `(ξ, η)` with `ξ` near a cluster, `η` in a piece of `cone` and
/// `ξ + η ≈ 0`, if one exists.
pub fn zero_in_sum(clusters: &[Cluster], cone: &ConeUnion, eps: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    for c in clusters {
        let minus = linalg::neg(&c.centroid);
        for piece in &cone.pieces {
            let k = piece.sum(&c.cone);
            let y = k.project(&minus);
            if linalg::dist(&y, &minus) <= c.radius + eps * (1.0 + norm(&c.centroid)) {
                // y = eta + k with eta in the piece, k in the cluster cone; xi = c + k
                let own = cols(piece);
                let all: Vec<Vec<f64>> = own.iter().cloned().chain(cols(&c.cone)).collect();
                let (w, _) = nnls(&all, &y);
                let mut eta = vec![0.0; y.len()];
                for (wi, g) in w.iter().zip(&own) {
                    eta = linalg::axpy(&eta, *wi, g);
                }
                let xi = linalg::add(&c.centroid, &linalg::sub(&y, &eta));
                return Some((xi, eta));
            }
        }
    }
    None
}

fn cols(c: &GenCone) -> Vec<Vec<f64>> {
    c.generators.iter().cloned().chain(c.lineality.iter().flat_map(|l| [l.clone(), linalg::neg(l)])).collect()
}

/// `u^⊥` as a cone union with a single lineality piece.
pub fn orthogonal_complement(u: &Direction) -> ConeUnion {
    let basis = linalg::null_space(&[u.coords().to_vec()], u.dim(), 1e-12);
    ConeUnion::from_pieces(vec![GenCone::new(vec![], basis)])
}

/// A nonzero `v` in one piece of `a` with `-v` in one piece of `b`.
pub fn meet(a: &ConeUnion, b: &ConeUnion, n: usize, eps: f64) -> Result<Option<Vec<f64>>> {
    a.negative_meet(b, n, eps)
}

/// Nonzero elements `ξ_i ∈ K_i` summing to zero, for some choice of one
/// piece per union. Empty unions make the statement vacuous.
pub fn zero_sum_nontrivial(unions: &[&ConeUnion], n: usize, eps: f64) -> Result<Option<Vec<f64>>> {
    if unions.iter().any(|u| u.is_empty()) {
        return Ok(None);
    }
    let sizes: Vec<usize> = unions.iter().map(|u| u.pieces.len()).collect();
    let mut idx = vec![0usize; unions.len()];
    loop {
        let pieces: Vec<&GenCone> = idx.iter().enumerate().map(|(i, &j)| &unions[i].pieces[j]).collect();
        for j in 0..pieces.len() {
            let rest = pieces.iter().enumerate().filter(|(i, _)| *i != j).fold(GenCone::zero(), |acc, (_, c)| acc.sum(c));
            if let Some(v) = negative_meet(pieces[j], &rest, n, eps)? {
                return Ok(Some(v));
            }
        }
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            return Ok(None);
        }
    }
}

/// Points of the simplex `Δ_m` with coordinates in `{0, 1/steps, ..., 1}`.
pub fn simplex_grid(m: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(m: usize, left: usize, steps: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() + 1 == m {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / steps as f64).collect());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k);
            rec(m, left - k, steps, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m > 0 {
        rec(m, steps, steps, &mut Vec::new(), &mut out);
    }
    out
}

/// Pairs `(i, nearest neighbor of i)` whose pass verdicts differ.
pub fn coarse_pairs(dirs: &[Direction], pass: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..dirs.len() {
        let nearest = (0..dirs.len())
            .filter(|&j| j != i)
            .max_by(|&a, &b| dot(dirs[i].coords(), dirs[a].coords()).total_cmp(&dot(dirs[i].coords(), dirs[b].coords())));
        if let Some(j) = nearest {
            let key = (i.min(j), i.max(j));
            if pass[i] != pass[j] && !out.contains(&key) {
                out.push(key);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_grid_sizes() {
        assert_eq!(simplex_grid(1, 10), vec![vec![1.0]]);
        assert_eq!(simplex_grid(2, 10).len(), 11);
        assert_eq!(simplex_grid(3, 10).len(), 66);
        for l in simplex_grid(3, 10) {
            assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_sum_of_opposite_rays() {
        let a = ConeUnion::from_pieces(vec![GenCone::ray(vec![1.0, 0.0])]);
        let b = ConeUnion::from_pieces(vec![GenCone::ray(vec![0.0, 1.0])]);
        let c = ConeUnion::from_pieces(vec![GenCone::ray(vec![-1.0, -1.0])]);
        assert!(zero_sum_nontrivial(&[&a, &b], 2, 1e-9).unwrap().is_none());
        assert!(zero_sum_nontrivial(&[&a, &b, &c], 2, 1e-9).unwrap().is_some());
        assert!(zero_sum_nontrivial(&[&a, &ConeUnion::empty()], 2, 1e-9).unwrap().is_none());
    }

    #[test]
    fn zero_in_cluster_plus_cone() {
        let c = Cluster { centroid: vec![0.0, 2.0], radius: 0.0, count: 1, cone: GenCone::zero() };
        let down = ConeUnion::from_pieces(vec![GenCone::ray(vec![0.0, -1.0])]);
        let (xi, eta) = zero_in_sum(&[c.clone()], &down, 1e-6).unwrap();
        assert!(linalg::norm(&linalg::add(&xi, &eta)) < 1e-12);
        assert!(linalg::dist(&xi, &[0.0, 2.0]) < 1e-12);
        let up = ConeUnion::from_pieces(vec![GenCone::ray(vec![0.0, 1.0])]);
        assert!(zero_in_sum(&[c], &up, 1e-6).is_none());
    }
}
