//! Brute-force numerical routines that validate the estimators and
//! certificates. They share no sampling or clustering code with
//! `asymptotics`: fixed curves, dense scans and pattern search only.

mod error_bound;
mod limits;
mod search;

pub use error_bound::{empirical_error_bound, SetOracle};
pub use limits::{brute_limit_points, limit_points_csv, standard_families, t_ladder, tail, CurveFamily, LimitSample};
pub use search::{ray_line_search, region_inf_search, shell_points, RaySearchResult};

use crate::linalg;

/// Unit directions for the oracles: ± axes always, then `m` angles
/// (n = 2), a `m`-point spiral (n = 3), or a golden-ratio sequence.
pub(crate) fn directions(n: usize, m: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        out.push(linalg::unit(n, i));
        out.push(linalg::neg(&linalg::unit(n, i)));
    }
    match n {
        1 => {}
        2 => {
            for k in 0..m {
                let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
                out.push(vec![th.cos(), th.sin()]);
            }
        }
        3 => {
            for k in 0..m {
                let z = -1.0 + (2.0 * k as f64 + 1.0) / m as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = 2.399_963_229_728_653 * k as f64;
                out.push(vec![r * phi.cos(), r * phi.sin(), z]);
            }
        }
        _ => {
            use rand::SeedableRng;
            use rand_distr::{Distribution, StandardNormal};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xD1B5_4A32_D192_ED03);
            while out.len() < 2 * n + m {
                let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                if let Some(d) = linalg::normalized(&v) {
                    out.push(d);
                }
            }
        }
    }
    out
}
