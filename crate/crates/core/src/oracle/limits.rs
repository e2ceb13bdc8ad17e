//! Raw subgradient vertices along fixed curves `x(t) = t u + t^a w`.

use serde::{Deserialize, Serialize};

use crate::func::FuncExpr;
use crate::geometry::Direction;
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub exponent: f64,
    pub offset: Vec<f64>,
}

impl CurveFamily {
    pub fn point(&self, u: &Direction, t: f64) -> Vec<f64> {
        linalg::axpy(&linalg::scale(u.coords(), t), t.powf(self.exponent), &self.offset)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitSample {
    pub family: usize,
    pub t: f64,
    pub x: Vec<f64>,
    pub vertex: Vec<f64>,
}

/// `count` log-spaced parameters in `[t0, t1]`.
pub fn t_ladder(t0: f64, t1: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![t0];
    }
    (0..count).map(|i| t0 * (t1 / t0).powf(i as f64 / (count - 1) as f64)).collect()
}

/// Offsets `s e` for every exponent, scale `s` and unit `e` among the
/// coordinate axes with their `u` component removed.
pub fn standard_families(u: &Direction, exponents: &[f64], scales: &[f64]) -> Vec<CurveFamily> {
    let n = u.dim();
    let mut axes: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let e = linalg::unit(n, i);
        let p = linalg::axpy(&e, -linalg::dot(&e, u.coords()), u.coords());
        if let Some(q) = linalg::normalized(&p) {
            if linalg::norm(&p) > 1e-9 && !axes.iter().any(|a| linalg::dot(a, &q).abs() > 1.0 - 1e-9) {
                axes.push(q);
            }
        }
    }
    let mut out = vec![CurveFamily { exponent: 0.0, offset: vec![0.0; n] }];
    for a in exponents {
        for e in &axes {
            for s in scales {
                if *s != 0.0 {
                    out.push(CurveFamily { exponent: *a, offset: linalg::scale(e, *s) });
                }
            }
        }
    }
    out
}

/// Every vertex of `∂f(x(t))` on every family and ladder point. Points
/// outside the domain or with non-finite vertices are left out.
pub fn brute_limit_points(f: &FuncExpr, u: &Direction, families: &[CurveFamily], ladder: &[f64]) -> Vec<LimitSample> {
    let mut out = Vec::new();
    for (fi, fam) in families.iter().enumerate() {
        for &t in ladder {
            let x = fam.point(u, t);
            let Ok(sd) = f.subdiff_at(&x) else { continue };
            for v in sd.vertices() {
                if v.iter().all(|c| c.is_finite()) {
                    out.push(LimitSample { family: fi, t, x: x.clone(), vertex: v.clone() });
                }
            }
        }
    }
    out
}

/// Samples with `t` at or beyond `t_min`.
pub fn tail(samples: &[LimitSample], t_min: f64) -> Vec<&LimitSample> {
    samples.iter().filter(|s| s.t >= t_min).collect()
}

pub fn limit_points_csv(samples: &[LimitSample]) -> String {
    let mut s = String::from("family,t,x,vertex\n");
    let join = |v: &[f64]| v.iter().map(|c| format!("{c:e}")).collect::<Vec<_>>().join(";");
    for p in samples {
        s.push_str(&format!("{},{:e},{},{}\n", p.family, p.t, join(&p.x), join(&p.vertex)));
    }
    s
}
