//! Brute-force infimum searches: over `Ω ∩ box`, and along a ray.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::directions;
use crate::error::{Error, Result};
use crate::func::FuncExpr;
use crate::geometry::{Direction, HPolyhedron, Projector};
use crate::linalg::{self, norm, norm_inf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RaySearchResult {
    pub empirical_inf: f64,
    /// The best point is interior to the searched region (not on its outer
    /// boundary), so the infimum is attained there.
    pub attained: bool,
    pub best_point: Vec<f64>,
    pub escape_detected: bool,
    pub escape_direction: Option<Direction>,
}

fn val(f: &FuncExpr, x: &[f64]) -> f64 {
    let v = f.value(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Pattern search along `± e_i` with projection onto the region; step
/// halves when a sweep makes no progress.
fn descend(f: &FuncExpr, proj: &Projector, x0: Vec<f64>, h0: f64) -> (f64, Vec<f64>) {
    let n = x0.len();
    let mut x = x0;
    let mut fx = val(f, &x);
    let mut h = h0;
    let floor = 1e-13 * (1.0 + h0);
    let mut evals = 0usize;
    while h > floor && evals < 200_000 {
        let mut moved = false;
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut step = h;
                // keep stepping while it helps, doubling the step
                loop {
                    let mut y = x.clone();
                    y[i] += s * step;
                    let y = proj.project(&y);
                    let fy = val(f, &y);
                    evals += 1;
                    if fy < fx && linalg::dist(&y, &x) > 0.0 {
                        x = y;
                        fx = fy;
                        moved = true;
                        step *= 2.0;
                        if step > 4.0 * h0 {
                            break;
                        }
                    } else {
                        break;
                    }
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    (fx, x)
}

fn region(omega: &HPolyhedron, radius: f64) -> Result<Projector> {
    let n = omega.dim();
    let q = omega.intersect(&HPolyhedron::boxed(&vec![-radius; n], &vec![radius; n]))?;
    if q.is_empty()? {
        return Err(Error::Infeasible(format!("region within radius {radius} is empty")));
    }
    Projector::new(&q)
}

fn search_box(f: &FuncExpr, omega: &HPolyhedron, radius: f64, starts: usize, seed: u64) -> Result<(f64, Vec<f64>)> {
    let n = omega.dim();
    let proj = region(omega, radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cands: Vec<Vec<f64>> = vec![proj.project(&vec![0.0; n])];
    for _ in 0..starts {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-radius..=radius)).collect();
        cands.push(proj.project(&x));
    }
    // boundary grid
    for d in directions(n, 64, seed) {
        let s = radius / norm_inf(&d);
        cands.push(proj.project(&linalg::scale(&d, s)));
    }
    let mut scored: Vec<(f64, Vec<f64>)> = cands.into_iter().map(|x| (val(f, &x), x)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| linalg::lex_cmp(&a.1, &b.1)));
    scored.truncate(starts.max(1) + 4);
    let mut best = (f64::INFINITY, vec![0.0; n]);
    for (_, x) in scored {
        let (v, y) = descend(f, &proj, x, radius / 4.0);
        if v < best.0 || (v == best.0 && linalg::lex_cmp(&y, &best.1).is_lt()) {
            best = (v, y);
        }
    }
    if !best.0.is_finite() {
        return Err(Error::Infeasible("no point of finite value in the region".into()));
    }
    Ok(best)
}

/// Multistart pattern search over `Ω ∩ [-radius, radius]^n`. When the best
/// point sits on the outer boundary, the search is repeated at twice the
/// radius; a strict decrease is reported as an escape.
pub fn region_inf_search(f: &FuncExpr, omega: &HPolyhedron, radius: f64, starts: usize, seed: u64) -> Result<RaySearchResult> {
    f.validate(omega.dim())?;
    let (v, x) = search_box(f, omega, radius, starts, seed)?;
    let on_boundary = norm_inf(&x) >= radius * (1.0 - 1e-6);
    let mut out =
        RaySearchResult { empirical_inf: v, attained: !on_boundary, best_point: x, escape_detected: false, escape_direction: None };
    if on_boundary {
        let (v2, x2) = search_box(f, omega, 2.0 * radius, starts, seed)?;
        // relative decrease, with the larger search again on its boundary
        if v2 < v - 1e-9 * v.abs() && norm_inf(&x2) >= 2.0 * radius * (1.0 - 1e-6) {
            out.escape_detected = true;
            out.escape_direction = Direction::new(&x2).ok();
        }
    }
    Ok(out)
}

/// Infimum of `t -> f(xbar + t u)` over `t >= 0`: a log-spaced scan up to
/// `t_max`, then golden-section refinement around the best scan point.
pub fn ray_line_search(f: &FuncExpr, xbar: &[f64], u: &Direction, t_max: f64) -> Result<RaySearchResult> {
    f.validate(xbar.len())?;
    let at = |t: f64| val(f, &linalg::axpy(xbar, t, u.coords()));
    let mut ts = vec![0.0];
    let m = 4000;
    for i in 0..m {
        ts.push(1e-6 * (t_max / 1e-6).powf(i as f64 / (m - 1) as f64));
    }
    let vs: Vec<f64> = ts.iter().map(|t| at(*t)).collect();
    let (mut bi, mut bv) = (0, vs[0]);
    for (i, v) in vs.iter().enumerate() {
        if *v < bv {
            bi = i;
            bv = *v;
        }
    }
    if !bv.is_finite() {
        return Err(Error::Infeasible("ray leaves the domain of f".into()));
    }
    let (mut lo, mut hi) = (ts[bi.saturating_sub(1)], ts[(bi + 1).min(ts.len() - 1)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if at(a) <= at(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let t = 0.5 * (lo + hi);
    let (t, v) = if at(t) < bv { (t, at(t)) } else { (ts[bi], bv) };
    // still decreasing at the far end of the scan
    let escape = bi + 1 >= ts.len() && vs[ts.len() - 2] > vs[ts.len() - 1];
    Ok(RaySearchResult {
        empirical_inf: v,
        attained: !escape,
        best_point: linalg::axpy(xbar, t, u.coords()),
        escape_detected: escape,
        escape_direction: escape.then(|| u.clone()),
    })
}

/// Sample points of `Ω` with norm in `[lo, hi]`: scaled directions
/// projected onto `Ω`, kept if the norm lands in range.
pub fn shell_points(omega: &HPolyhedron, lo: f64, hi: f64, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let proj = Projector::new(omega)?;
    let n = omega.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs = directions(n, 256, seed);
    let mut out = Vec::new();
    for i in 0..count.max(1) * 8 {
        if out.len() >= count {
            break;
        }
        let d = &dirs[i % dirs.len()];
        let r = lo * (hi / lo).powf(rng.gen::<f64>());
        let y = proj.project(&linalg::scale(d, r));
        let ny = norm(&y);
        if ny >= lo && ny <= hi {
            out.push(y);
        }
    }
    Ok(out)
}
