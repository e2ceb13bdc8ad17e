//! Empirical error-bound constant `sup dist(x, S) / Σ[g_i(x)]_+`.

use crate::error::{Error, Result};
use crate::func::FuncExpr;
use crate::geometry::HPolyhedron;
use crate::linalg;

use super::{directions, search::shell_points};

/// Membership oracle for `S = {x ∈ Ω | g_i(x) <= 0}` with a known member.
pub struct SetOracle<'a> {
    pub omega: &'a HPolyhedron,
    pub gs: &'a [FuncExpr],
    pub anchor: Vec<f64>,
    pub tol: f64,
}

impl<'a> SetOracle<'a> {
    /// Finds a member by scanning a grid of `Ω ∩ [-radius, radius]^n`
    /// (n <= 3; the origin and its projection onto `Ω` are tried first).
    pub fn new(omega: &'a HPolyhedron, gs: &'a [FuncExpr], radius: f64) -> Result<Self> {
        let n = omega.dim();
        if n > 3 {
            return Err(Error::DimensionLimit("grid set oracle needs n <= 3".into()));
        }
        let mut o = SetOracle { omega, gs, anchor: vec![0.0; n], tol: 1e-12 };
        let proj = crate::geometry::Projector::new(omega)?;
        let first = proj.project(&vec![0.0; n]);
        if o.member(&first) {
            o.anchor = first;
            return Ok(o);
        }
        let m = match n {
            1 => 4001,
            2 => 201,
            _ => 41,
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut idx = vec![0usize; n];
        loop {
            let x: Vec<f64> = idx.iter().map(|&i| -radius + 2.0 * radius * i as f64 / (m - 1) as f64).collect();
            let y = proj.project(&x);
            if o.member(&y) {
                let r = linalg::norm(&y);
                if best.as_ref().map_or(true, |(b, _)| r < *b) {
                    best = Some((r, y));
                }
            }
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        o.anchor = best.ok_or(Error::EmptySet)?.1;
        Ok(o)
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        self.gs.iter().map(|g| g.value(x).max(0.0)).sum()
    }

    pub fn member(&self, x: &[f64]) -> bool {
        self.omega.contains(x, 1e-9 * (1.0 + linalg::norm(x)))
            && self.gs.iter().all(|g| {
                let v = g.value(x);
                !v.is_nan() && v <= self.tol
            })
    }

    /// Upper estimate of `dist(x, S)`: for each direction of a fixed grid
    /// (plus the direction to the anchor) the first member along the ray,
    /// located by a scan and bisection. Exact when the nearest point lies
    /// on one of those rays.
    pub fn distance(&self, x: &[f64]) -> f64 {
        if self.member(x) {
            return 0.0;
        }
        let n = x.len();
        let mut best = linalg::dist(x, &self.anchor);
        let to_anchor = linalg::normalized(&linalg::sub(&self.anchor, x));
        let mut dirs = directions(n, 720, 0);
        if let Some(d) = to_anchor {
            dirs.insert(0, d);
        }
        let steps = 100;
        for d in &dirs {
            let r_max = best;
            let mut prev = 0.0;
            for i in 1..=steps {
                let r = r_max * i as f64 / steps as f64;
                if self.member(&linalg::axpy(x, r, d)) {
                    let (mut lo, mut hi) = (prev, r);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if self.member(&linalg::axpy(x, mid, d)) {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    best = best.min(hi);
                    break;
                }
                prev = r;
            }
        }
        best
    }
}

/// `max dist(x, S) / Σ[g_i(x)]_+` over sampled `x ∈ Ω` with `|x|` in
/// `[radius, 10 radius]` and violation above `1e-9`.
pub fn empirical_error_bound(s: &SetOracle, radius: f64, samples: usize, seed: u64) -> Result<f64> {
    let pts = shell_points(s.omega, radius, 10.0 * radius, samples, seed)?;
    let mut alpha: Option<f64> = None;
    for x in pts {
        let g = s.violation(&x);
        if g.is_finite() && g > 1e-9 {
            let r = s.distance(&x) / g;
            alpha = Some(alpha.map_or(r, |a: f64| a.max(r)));
        }
    }
    alpha.ok_or(Error::NoViolatingSamples)
}
