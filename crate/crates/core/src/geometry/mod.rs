//! Exact finite-dimensional primitives: directions, H-polyhedra,
//! finitely generated cones and their unions, a small LP solver.

pub mod cone;
pub mod dd;
pub mod direction;
pub mod faces;
pub mod lp;
pub mod polyhedron;
pub mod project;
pub mod sphere;

pub use cone::{ConeUnion, GenCone};
pub use direction::Direction;
pub use faces::{enumerate_faces, FaceDescriptor};
pub use lp::{lp_feasible, LinCon, Rel};
pub use polyhedron::{tau_act, HPolyhedron};
pub use project::Projector;
pub use sphere::sphere_grid;

/// Free-function form of [`HPolyhedron::recession_cone`].
pub fn recession_cone(p: &HPolyhedron) -> crate::Result<GenCone> {
    p.recession_cone()
}

/// Free-function form of [`HPolyhedron::normal_cone_at`].
pub fn normal_cone_at(p: &HPolyhedron, x: &[f64]) -> crate::Result<GenCone> {
    p.normal_cone_at(x)
}

/// Membership within `tol` in a cone or a union of cones.
pub trait ConeLike {
    fn distance_to(&self, v: &[f64]) -> f64;
}

impl ConeLike for GenCone {
    fn distance_to(&self, v: &[f64]) -> f64 {
        self.distance(v)
    }
}

impl ConeLike for ConeUnion {
    fn distance_to(&self, v: &[f64]) -> f64 {
        self.distance(v)
    }
}

pub fn cone_member<C: ConeLike>(c: &C, v: &[f64], tol: f64) -> bool {
    c.distance_to(v) <= tol
}
