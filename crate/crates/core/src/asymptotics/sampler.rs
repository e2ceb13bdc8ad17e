//! Sample points of `V_{R_k, delta_k}(inf; u)` inside a polyhedral domain.
//!
//! Points are `origin + t u + w` with `w` orthogonal to `u` and parallel
//! to the face being sampled. Each rung mixes fixed curve families
//! `w = c_a t^a e` (a in {0, 1/2, 3/4}, e from projected coordinate axes,
//! plus the bare ray) with random offsets. Every sample carries a companion
//! at parameter `t / rho` for growth tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::params::EstimatorParams;
use crate::error::{Error, Result};
use crate::geometry::{enumerate_faces, Direction, GenCone, HPolyhedron};
use crate::linalg::{self, dot};
use crate::poly_infinity::REC_TOL;

pub const EXPONENTS: [f64; 3] = [0.0, 0.5, 0.75];

#[derive(Clone, Debug)]
pub struct SampleFace {
    pub active_set: Vec<usize>,
    /// `pos{A_J} + span(E)` of the domain at this face.
    pub normal: GenCone,
    pub origin: Vec<f64>,
    /// Orthonormal basis of the face directions orthogonal to `u`.
    pub basis: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub rung: usize,
    pub face: usize,
    /// `None` for random offsets, else the index into `EXPONENTS` (or 3 for
    /// the bare ray).
    pub family: Option<usize>,
    pub x: Vec<f64>,
    pub companion: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct Sampler {
    pub u: Direction,
    pub domain: Option<HPolyhedron>,
    pub faces: Vec<SampleFace>,
    pub params: EstimatorParams,
}

fn perp_basis(u: &[f64], face_dirs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let projected: Vec<Vec<f64>> = face_dirs.iter().map(|d| linalg::axpy(d, -dot(d, u), u)).collect();
    linalg::orthonormal_basis(&projected, 1e-9)
}

impl Sampler {
    /// `domain` is the intersection of the indicator polyhedra (if any);
    /// `anchor` shifts the sampled rays.
    pub fn new(u: &Direction, domain: Option<HPolyhedron>, anchor: Option<&[f64]>, params: &EstimatorParams) -> Result<Self> {
        params.validate()?;
        let n = u.dim();
        let anchor = anchor.map(|a| a.to_vec()).unwrap_or_else(|| vec![0.0; n]);
        let faces = match &domain {
            None => {
                let axes: Vec<Vec<f64>> = (0..n).map(|i| linalg::unit(n, i)).collect();
                vec![SampleFace {
                    active_set: vec![],
                    normal: GenCone::zero(),
                    origin: anchor,
                    basis: perp_basis(u.coords(), &axes),
                }]
            }
            Some(p) => {
                if p.dim() != n {
                    return Err(Error::InvalidInput("domain dimension mismatch".into()));
                }
                let all = enumerate_faces(p)?;
                if all.is_empty() {
                    return Err(Error::EmptySet);
                }
                if !p.in_recession(u.coords(), REC_TOL) {
                    return Err(Error::DomainUnreachable(0));
                }
                all.into_iter()
                    .filter(|f| f.recedes_along(p, u.coords(), REC_TOL))
                    .map(|f| {
                        let rows: Vec<Vec<f64>> =
                            f.active_set.iter().map(|&i| p.a()[i].clone()).chain(p.e().iter().cloned()).collect();
                        let dirs = linalg::null_space(&rows, n, 1e-10);
                        let basis = perp_basis(u.coords(), &dirs);
                        // move the witness towards the anchor within the face's hull
                        let shift = linalg::sub(&anchor, &f.witness);
                        let mut origin = f.witness.clone();
                        for q in &basis {
                            origin = linalg::axpy(&origin, dot(&shift, q), q);
                        }
                        if p.active_set(&origin) != f.active_set || !p.contains(&origin, 1e-9) {
                            origin = f.witness.clone();
                        }
                        SampleFace { normal: f.normal_cone(p), active_set: f.active_set, origin, basis }
                    })
                    .collect()
            }
        };
        Ok(Sampler { u: u.clone(), domain, faces, params: params.clone() })
    }

    fn accept(&self, face: &SampleFace, x: &[f64]) -> bool {
        match &self.domain {
            None => x.iter().all(|v| v.is_finite()),
            Some(p) => p.contains(x, crate::geometry::tau_act(x)) && p.active_set(x) == face.active_set,
        }
    }

    /// Family offset directions for a face: projections of the signed
    /// coordinate axes onto its basis span, deduplicated.
    fn family_dirs(&self, face: &SampleFace) -> Vec<Vec<f64>> {
        let n = self.u.dim();
        let mut out: Vec<Vec<f64>> = Vec::new();
        if face.basis.is_empty() {
            return out;
        }
        for i in 0..n {
            for s in [1.0, -1.0] {
                let e = linalg::scale(&linalg::unit(n, i), s);
                let mut p = vec![0.0; n];
                for q in &face.basis {
                    p = linalg::axpy(&p, dot(&e, q), q);
                }
                if let Some(v) = linalg::normalized(&p) {
                    if linalg::norm(&p) > 1e-9 && !out.iter().any(|o| dot(o, &v) > 1.0 - 1e-9) {
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    pub fn family_coefficient(&self, a: f64) -> f64 {
        let rm = self.params.radius(self.params.first_persistent());
        (0.5 * self.params.delta * rm.powf(1.0 - a)).min(1.0)
    }

    fn point(&self, face: &SampleFace, t: f64, w: &[f64]) -> Vec<f64> {
        linalg::add(&linalg::axpy(&face.origin, t, self.u.coords()), w)
    }

    /// All samples of rung `k`, deterministic in the seed.
    pub fn rung(&self, k: usize) -> Vec<Sample> {
        let p = &self.params;
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(k as u64 + 1)));
        let r = p.radius(k);
        let per_face = (p.samples / self.faces.len()).max(8);
        let mut out = Vec::new();
        for (fi, face) in self.faces.iter().enumerate() {
            let dirs = self.family_dirs(face);
            let nfam = 1 + EXPONENTS.len() * dirs.len();
            let per_family = ((per_face / 2) / nfam).max(1);
            for j in 0..per_family {
                let t = r * p.rho.powf((j as f64 + 0.5) / per_family as f64);
                let mut push = |family: usize, off: &dyn Fn(f64) -> Vec<f64>| {
                    let x = self.point(face, t, &off(t));
                    if self.accept(face, &x) {
                        let c = self.point(face, t / p.rho, &off(t / p.rho));
                        let companion = self.accept(face, &c).then_some(c);
                        out.push(Sample { rung: k, face: fi, family: Some(family), x, companion });
                    }
                };
                push(EXPONENTS.len(), &|_| vec![0.0; self.u.dim()]);
                for (ai, a) in EXPONENTS.iter().enumerate() {
                    let ca = self.family_coefficient(*a);
                    for e in &dirs {
                        push(ai, &|t| linalg::scale(e, ca * t.powf(*a)));
                    }
                }
            }
            let random = per_face.saturating_sub(per_family * nfam);
            let dk = p.delta_at(k);
            for _ in 0..random {
                let t = r * p.rho.powf(rng.gen::<f64>());
                let v: f64 = rng.gen();
                let g: Vec<f64> = face.basis.iter().map(|_| rng.sample(StandardNormal)).collect();
                let mut w = vec![0.0; self.u.dim()];
                for (gi, q) in g.iter().zip(&face.basis) {
                    w = linalg::axpy(&w, *gi, q);
                }
                let w = linalg::normalized(&w).map(|d| linalg::scale(&d, dk * t * v)).unwrap_or(w);
                let x = self.point(face, t, &w);
                if self.accept(face, &x) {
                    let c = self.point(face, t / p.rho, &linalg::scale(&w, 1.0 / p.rho));
                    let companion = self.accept(face, &c).then_some(c);
                    out.push(Sample { rung: k, face: fi, family: None, x, companion });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_infinity::{in_dir_neighborhood, DirNeighborhood};

    #[test]
    fn samples_stay_in_neighborhood_and_domain() {
        let cone = HPolyhedron::new(2, vec![vec![1.0, -2.0], vec![-2.0, 1.0], vec![-1.0, 0.0]], vec![0.0; 3], vec![], vec![])
            .unwrap();
        let u = Direction::new(&[2.0, 1.0]).unwrap();
        let p = EstimatorParams::default();
        let s = Sampler::new(&u, Some(cone.clone()), None, &p).unwrap();
        assert_eq!(s.faces.len(), 2);
        for k in p.first_persistent()..=p.rungs {
            let rung = s.rung(k);
            assert!(rung.iter().any(|x| x.face == 0) && rung.iter().any(|x| x.face == 1));
            for smp in rung {
                assert!(cone.contains(&smp.x, 1e-6));
                let v = DirNeighborhood::new(u.clone(), p.radius(k) * 0.5, 0.06).unwrap();
                assert!(in_dir_neighborhood(&v, &smp.x), "{:?}", smp.x);
            }
        }
    }

    #[test]
    fn unreachable_direction() {
        let half = HPolyhedron::halfspace(vec![1.0, 0.0], 0.0);
        let u = Direction::new(&[1.0, 0.0]).unwrap();
        let r = Sampler::new(&u, Some(half), None, &EstimatorParams::default());
        assert!(matches!(r, Err(Error::DomainUnreachable(0))));
    }

    #[test]
    fn rungs_are_reproducible() {
        let u = Direction::new(&[1.0, 1.0, 0.0]).unwrap();
        let p = EstimatorParams::default();
        let a = Sampler::new(&u, None, None, &p).unwrap().rung(3);
        let b = Sampler::new(&u, None, None, &p).unwrap().rung(3);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.x, y.x);
        }
    }
}
