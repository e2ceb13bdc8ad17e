//! Theorem-level checkers: optimality at infinity, existence and weak
//! sharpness, minimizers along rays, constraint normal cones and error
//! bounds at infinity. Every verdict is Holds / Fails / Unknown, where
//! Fails means the hypotheses fail, not that the conclusion is false.

mod common;
mod constraints;
mod optimality;
mod problem;
mod types;

pub use common::{simplex_grid, zero_in_sum, zero_sum_nontrivial};
pub use constraints::{constraint_normal_cone_estimate, error_bound_certificate, LcqReport};
pub use optimality::{existence_certificate, optimality_at_infinity_check, ray_existence_check};
pub use problem::ProblemSpec;
pub use types::{Certificate, DirectionReport, Status};
