//! Normal cones at infinity of H-polyhedra, exact by face enumeration.
//!
//! A face `F_J` with exact active set `J` contributes its normal cone
//! `pos{A_i : i in J} + span(E)` to the cone in direction `u` whenever `u`
//! lies in the recession cone of `F_J`: the points `x0 + k u` then keep the
//! active set `J` and run off to infinity along `u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{enumerate_faces, sphere_grid, ConeUnion, Direction, FaceDescriptor, GenCone, HPolyhedron};
use crate::linalg::{self, dot, norm};

/// Tolerance for `u` against unit-normalized rows.
pub const REC_TOL: f64 = 1e-9;
/// Slack for cone intersections and sum memberships.
pub const CONE_TOL: f64 = 1e-9;

fn nonempty_faces(p: &HPolyhedron) -> Result<Vec<FaceDescriptor>> {
    let faces = enumerate_faces(p)?;
    if faces.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(faces)
}

fn check_dim(p: &HPolyhedron, u: &Direction) -> Result<()> {
    if p.dim() != u.dim() {
        return Err(Error::InvalidInput(format!("direction of dimension {} for polyhedron in R^{}", u.dim(), p.dim())));
    }
    Ok(())
}

pub fn dir_normal_cone_at_infinity(p: &HPolyhedron, u: &Direction) -> Result<ConeUnion> {
    check_dim(p, u)?;
    let faces = nonempty_faces(p)?;
    Ok(dir_cone_from_faces(p, &faces, u.coords()))
}

pub(crate) fn dir_cone_from_faces(p: &HPolyhedron, faces: &[FaceDescriptor], u: &[f64]) -> ConeUnion {
    if !p.in_recession(u, REC_TOL) {
        return ConeUnion::empty();
    }
    ConeUnion::from_pieces(
        faces.iter().filter(|f| f.recedes_along(p, u, REC_TOL)).map(|f| f.normal_cone(p)).collect(),
    )
}

pub fn normal_cone_at_infinity(p: &HPolyhedron) -> Result<ConeUnion> {
    let faces = nonempty_faces(p)?;
    if p.recession_cone()?.is_zero() {
        return Err(Error::BoundedSet);
    }
    Ok(ConeUnion::from_pieces(faces.iter().filter(|f| f.is_unbounded()).map(|f| f.normal_cone(p)).collect()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NontrivialityReport {
    pub lhs: bool,
    pub rhs: bool,
    pub consistent: bool,
}

/// `lhs`: the directional cone has a nonzero element. `rhs`: `u` is an
/// asymptotic direction of the boundary. For full-dimensional `P` the
/// boundary is the union of the facet slices `P ∩ {A_i x = b_i}`, so `rhs`
/// is decided row by row, independently of the face enumeration. When `P`
/// has empty interior the boundary is `P` itself.
pub fn nontriviality_check(p: &HPolyhedron, u: &Direction) -> Result<NontrivialityReport> {
    check_dim(p, u)?;
    let rec = p.recession_cone()?;
    if !rec.contains(u.coords(), 1e-8) {
        return Err(Error::InvalidInput("direction is not in the recession cone".into()));
    }
    let lhs = dir_normal_cone_at_infinity(p, u)?.has_nonzero();
    let rhs = if has_interior(p)? {
        let mut any = false;
        for i in 0..p.num_ineq() {
            if norm(&p.a()[i]) == 0.0 {
                continue;
            }
            let slice =
                p.intersect(&HPolyhedron::new(p.dim(), vec![], vec![], vec![p.a()[i].clone()], vec![p.b()[i]])?)?;
            if slice.is_empty()? {
                continue;
            }
            let ai = linalg::normalized(&p.a()[i]).unwrap();
            if dot(&ai, u.coords()).abs() <= REC_TOL && p.in_recession(u.coords(), REC_TOL) {
                any = true;
                break;
            }
        }
        any
    } else {
        true
    };
    Ok(NontrivialityReport { lhs, rhs, consistent: lhs == rhs })
}

/// Interior is nonempty iff there are no equalities and some point has a
/// positive uniform slack on every inequality.
fn has_interior(p: &HPolyhedron) -> Result<bool> {
    if p.num_eq() > 0 {
        return Ok(false);
    }
    let faces = nonempty_faces(p)?;
    Ok(faces.iter().any(|f| f.active_set.is_empty()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub qualification: bool,
    pub inclusion: bool,
    /// Nonzero `v` in `N1 ∩ (-N2)` when qualification fails, followed by
    /// generators of the intersection cone outside the sum.
    pub witnesses: Vec<Vec<f64>>,
    /// Qualification implies inclusion on this instance.
    pub implication_holds: bool,
}

pub fn intersection_rule_check(p1: &HPolyhedron, p2: &HPolyhedron, u: &Direction) -> Result<IntersectionReport> {
    check_dim(p1, u)?;
    check_dim(p2, u)?;
    let p12 = p1.intersect(p2)?;
    if !p12.in_recession(u.coords(), REC_TOL) || p12.is_empty()? {
        return Err(Error::InvalidInput("direction is not in the recession cone of the intersection".into()));
    }
    let n = p1.dim();
    let n1 = dir_normal_cone_at_infinity(p1, u)?;
    let n2 = dir_normal_cone_at_infinity(p2, u)?;
    let n12 = dir_normal_cone_at_infinity(&p12, u)?;
    let mut witnesses = Vec::new();
    let meet = n1.negative_meet(&n2, n, CONE_TOL)?;
    let qualification = meet.is_none();
    witnesses.extend(meet);
    let sum = n1.minkowski_sum(&n2);
    let mut inclusion = true;
    for piece in &n12.pieces {
        if sum.pieces.iter().any(|s| s.contains_cone(piece, 1e-7)) {
            continue;
        }
        inclusion = false;
        let probes = piece.generators.iter().cloned().chain(piece.lineality.iter().flat_map(|l| [l.clone(), linalg::neg(l)]));
        witnesses.extend(probes.filter(|g| !sum.contains(g, 1e-7)));
    }
    Ok(IntersectionReport { qualification, inclusion, witnesses, implication_holds: !qualification || inclusion })
}

pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_RADIUS: f64 = 100.0;

/// `V_{R,δ}(∞;u) = {z : |z| > R, |z/|z| - u| <= δ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirNeighborhood {
    pub u: Direction,
    pub radius: f64,
    pub delta: f64,
}

impl DirNeighborhood {
    pub fn new(u: Direction, radius: f64, delta: f64) -> Result<Self> {
        if !(radius > 0.0) || !(delta > 0.0 && delta <= 2.0) {
            return Err(Error::InvalidInput("neighborhood needs R > 0 and delta in (0, 2]".into()));
        }
        Ok(DirNeighborhood { u, radius, delta })
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        in_dir_neighborhood(self, z)
    }
}

pub fn in_dir_neighborhood(v: &DirNeighborhood, z: &[f64]) -> bool {
    let r = norm(z);
    r > v.radius && linalg::dist(&linalg::scale(z, 1.0 / r), v.u.coords()) <= v.delta
}

/// Unit directions of `rec(P)`: grid points that fall inside it, plus one
/// relative-interior direction per face of `rec(P)` (normalized sums of
/// subsets of its extreme rays) and the lineality directions with both
/// signs. Every face of the recession cone is hit, so sweeps over the
/// result see every distinct directional cone.
pub fn recession_sweep(p: &HPolyhedron, resolution: usize, seed: u64) -> Result<Vec<Direction>> {
    let rec = p.recession_cone()?;
    let mut out: Vec<Direction> = Vec::new();
    let push = |v: &[f64], out: &mut Vec<Direction>| {
        if let Ok(d) = Direction::new(v) {
            if !out.iter().any(|o| dot(o.coords(), d.coords()) > 1.0 - 1e-12) {
                out.push(d);
            }
        }
    };
    if rec.is_zero() {
        return Ok(out);
    }
    for d in sphere_grid(p.dim(), resolution, seed) {
        if p.in_recession(d.coords(), REC_TOL) {
            push(d.coords(), &mut out);
        }
    }
    for l in &rec.lineality {
        push(l, &mut out);
        push(&linalg::neg(l), &mut out);
    }
    let g = &rec.generators;
    let k = g.len().min(12);
    for mask in 1u32..(1u32 << k) {
        let mut s = vec![0.0; p.dim()];
        for (i, gi) in g.iter().enumerate().take(k) {
            if mask & (1 << i) != 0 {
                s = linalg::add(&s, gi);
            }
        }
        push(&s, &mut out);
    }
    Ok(out)
}

/// Union of the directional cones over a list of directions.
pub fn swept_union(p: &HPolyhedron, dirs: &[Direction]) -> Result<ConeUnion> {
    let faces = nonempty_faces(p)?;
    let mut u = ConeUnion::empty();
    for d in dirs {
        u = u.union(&dir_cone_from_faces(p, &faces, d.coords()));
    }
    Ok(u)
}

/// Points `witness + k u` of the faces that recede along `u`; the regular
/// normal cone there is the face's normal cone.
pub fn receding_witnesses(p: &HPolyhedron, u: &Direction, ks: &[f64]) -> Result<Vec<(GenCone, Vec<Vec<f64>>)>> {
    let faces = nonempty_faces(p)?;
    Ok(faces
        .iter()
        .filter(|f| f.recedes_along(p, u.coords(), REC_TOL))
        .map(|f| (f.normal_cone(p), ks.iter().map(|k| linalg::axpy(&f.witness, *k, u.coords())).collect()))
        .collect())
}
