//! Euclidean projection onto an H-polyhedron by active-set enumeration.
//!
//! The projection of `x` lies in the relative interior of some face `F_J`
//! and equals the projection of `x` onto the affine hull of `F_J`. Each
//! face's hull is stored as a witness point plus an orthonormal basis of
//! its direction space; candidates outside `P` are discarded.

use serde::{Deserialize, Serialize};

use super::faces::enumerate_faces;
use super::polyhedron::{tau_act, HPolyhedron};
use crate::error::{Error, Result};
use crate::linalg::{self, dot};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct AffineHull {
    origin: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl AffineHull {
    fn project(&self, x: &[f64]) -> Vec<f64> {
        let r = linalg::sub(x, &self.origin);
        let mut y = self.origin.clone();
        for q in &self.basis {
            y = linalg::axpy(&y, dot(&r, q), q);
        }
        y
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projector {
    poly: HPolyhedron,
    hulls: Vec<AffineHull>,
}

impl Projector {
    pub fn new(p: &HPolyhedron) -> Result<Self> {
        let faces = enumerate_faces(p)?;
        if faces.is_empty() {
            return Err(Error::EmptySet);
        }
        let hulls = faces
            .into_iter()
            .map(|f| {
                let rows: Vec<Vec<f64>> =
                    f.active_set.iter().map(|&i| p.a()[i].clone()).chain(p.e().iter().cloned()).collect();
                AffineHull { basis: linalg::null_space(&rows, p.dim(), 1e-10), origin: f.witness }
            })
            .collect();
        Ok(Projector { poly: p.clone(), hulls })
    }

    pub fn polyhedron(&self) -> &HPolyhedron {
        &self.poly
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        if self.poly.contains(x, tau_act(x)) {
            return x.to_vec();
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut fallback: Option<(f64, Vec<f64>)> = None;
        for h in &self.hulls {
            let y = h.project(x);
            let d = linalg::dist(x, &y);
            let viol = self.poly.violation(&y);
            if viol <= 1e-7 * (1.0 + linalg::norm(&y)) {
                if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                    best = Some((d, y));
                }
            } else if fallback.as_ref().map_or(true, |(bv, _)| viol < *bv) {
                fallback = Some((viol, y));
            }
        }
        best.or(fallback).map(|(_, y)| y).unwrap_or_else(|| x.to_vec())
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        linalg::dist(x, &self.project(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfplane_projection_is_closed_form() {
        let p = HPolyhedron::halfspace(vec![0.0, 1.0], 0.0);
        let pr = Projector::new(&p).unwrap();
        assert_eq!(pr.project(&[3.0, 2.0]), vec![3.0, 0.0]);
        assert_eq!(pr.project(&[3.0, -2.0]), vec![3.0, -2.0]);
    }

    #[test]
    fn box_corner() {
        let p = HPolyhedron::boxed(&[0.0, 0.0], &[1.0, 1.0]);
        let pr = Projector::new(&p).unwrap();
        let y = pr.project(&[2.0, 3.0]);
        assert!(linalg::dist(&y, &[1.0, 1.0]) < 1e-12);
        let y = pr.project(&[0.5, -4.0]);
        assert!(linalg::dist(&y, &[0.5, 0.0]) < 1e-12);
    }

    #[test]
    fn cone_projection_matches_ray_formula() {
        // pos{(2,1),(1,2)}; points below the lower ray project onto it
        let p = HPolyhedron::new(
            2,
            vec![vec![1.0, -2.0], vec![-2.0, 1.0], vec![-1.0, 0.0]],
            vec![0.0; 3],
            vec![],
            vec![],
        )
        .unwrap();
        let pr = Projector::new(&p).unwrap();
        let x = [5.0, -1.0];
        let r = [2.0 / 5f64.sqrt(), 1.0 / 5f64.sqrt()];
        let want = linalg::scale(&r, dot(&x, &r));
        assert!(linalg::dist(&pr.project(&x), &want) < 1e-10);
        let y = pr.project(&[-3.0, -1.0]);
        assert!(linalg::norm(&y) < 1e-10);
    }
}
