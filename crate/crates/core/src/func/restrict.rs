//! Symbolic restriction `x -> F(x, ybar)` of a function on `R^n x R^m`.

use super::FuncExpr;
use crate::error::{Error, Result};
use crate::geometry::HPolyhedron;
use crate::linalg::dot;

fn split(c: &[f64], n: usize, ybar: &[f64]) -> (Vec<f64>, f64) {
    (c[..n].to_vec(), dot(&c[n..], ybar))
}

impl FuncExpr {
    /// `F(., ybar)` for `F` on `R^(n+m)`, with `m = ybar.len()`.
    pub fn restrict_y(&self, n: usize, ybar: &[f64]) -> Result<FuncExpr> {
        self.validate(n + ybar.len())?;
        self.restrict(n, ybar)
    }

    fn restrict(&self, n: usize, ybar: &[f64]) -> Result<FuncExpr> {
        Ok(match self {
            FuncExpr::Affine { c, beta } => {
                let (cx, s) = split(c, n, ybar);
                FuncExpr::affine(cx, beta + s)
            }
            FuncExpr::ExpAffine { c, beta } => {
                let (cx, s) = split(c, n, ybar);
                FuncExpr::exp_affine(cx, beta + s)
            }
            FuncExpr::Pw { c, beta } => {
                let (cx, s) = split(c, n, ybar);
                FuncExpr::pw(cx, beta + s)
            }
            FuncExpr::PowerAbs { c, beta, p } => {
                let (cx, s) = split(c, n, ybar);
                FuncExpr::power_abs(cx, beta + s, *p)
            }
            FuncExpr::Quad { q } => {
                // x'Qxx x + (Qxy ybar + Qyx' ybar)'x + ybar'Qyy ybar
                let m = ybar.len();
                let qxx: Vec<Vec<f64>> = q[..n].iter().map(|r| r[..n].to_vec()).collect();
                let lin: Vec<f64> =
                    (0..n).map(|i| (0..m).map(|j| (q[i][n + j] + q[n + j][i]) * ybar[j]).sum()).collect();
                let cst: f64 =
                    (0..m).map(|i| (0..m).map(|j| ybar[i] * q[n + i][n + j] * ybar[j]).sum::<f64>()).sum();
                if lin.iter().all(|v| *v == 0.0) && cst == 0.0 {
                    FuncExpr::quad(qxx)
                } else {
                    FuncExpr::sum(vec![FuncExpr::quad(qxx), FuncExpr::affine(lin, cst)])
                }
            }
            FuncExpr::Norm => {
                if ybar.iter().any(|v| *v != 0.0) {
                    return Err(Error::Unsupported("restriction of the norm at a nonzero y".into()));
                }
                FuncExpr::Norm
            }
            FuncExpr::Dist(_) => return Err(Error::Unsupported("restriction of a distance function".into())),
            FuncExpr::Indicator(p) => {
                let rows = |m: &[Vec<f64>], r: &[f64]| -> (Vec<Vec<f64>>, Vec<f64>) {
                    m.iter().zip(r).map(|(a, b)| (a[..n].to_vec(), b - dot(&a[n..], ybar))).unzip()
                };
                let (a, b) = rows(p.a(), p.b());
                let (e, d) = rows(p.e(), p.d());
                FuncExpr::indicator(HPolyhedron::new(n, a, b, e, d)?)
            }
            FuncExpr::Sum(fs) => FuncExpr::sum(fs.iter().map(|f| f.restrict(n, ybar)).collect::<Result<_>>()?),
            FuncExpr::Max(fs) => FuncExpr::max(fs.iter().map(|f| f.restrict(n, ybar)).collect::<Result<_>>()?),
            FuncExpr::Min(fs) => FuncExpr::min(fs.iter().map(|f| f.restrict(n, ybar)).collect::<Result<_>>()?),
            FuncExpr::Scale { alpha, f } => FuncExpr::scale(*alpha, f.restrict(n, ybar)?),
        })
    }
}
