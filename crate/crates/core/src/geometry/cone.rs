//! Finitely generated cones `pos{G} + span{L}` and finite unions of them.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::lp::{self, LinCon, LpResult};
use crate::error::Result;
use crate::linalg::{self, dot, norm};

const MERGE_COS: f64 = 1.0 - 1e-10;
const SPAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenCone {
    pub generators: Vec<Vec<f64>>,
    pub lineality: Vec<Vec<f64>>,
}

/// Nonnegative least squares (Lawson-Hanson). Columns of `g` are the
/// vectors in `cols`; returns the coefficient vector and the residual norm.
pub fn nnls(cols: &[Vec<f64>], v: &[f64]) -> (Vec<f64>, f64) {
    let k = cols.len();
    let n = v.len();
    if k == 0 {
        return (Vec::new(), norm(v));
    }
    let g = DMatrix::from_fn(n, k, |i, j| cols[j][i]);
    let target = DVector::from_column_slice(v);
    let mut x = DVector::<f64>::zeros(k);
    let mut passive = vec![false; k];
    let scale = cols.iter().map(|c| norm(c)).fold(norm(v), f64::max).max(1.0);
    let tol = 1e-12 * scale * scale;

    let solve_passive = |passive: &[bool]| -> DVector<f64> {
        let idx: Vec<usize> = (0..k).filter(|&j| passive[j]).collect();
        let sub = DMatrix::from_fn(n, idx.len(), |i, c| g[(i, idx[c])]);
        let svd = sub.svd(true, true);
        let sol = svd.solve(&target, 1e-13).unwrap_or_else(|_| DVector::zeros(idx.len()));
        let mut full = DVector::zeros(k);
        for (c, &j) in idx.iter().enumerate() {
            full[j] = sol[c];
        }
        full
    };

    for _outer in 0..(3 * k + 10) {
        let w = g.transpose() * (&target - &g * &x);
        let cand = (0..k).filter(|&j| !passive[j] && w[j] > tol).max_by(|&a, &b| w[a].total_cmp(&w[b]));
        let Some(j) = cand else { break };
        passive[j] = true;
        for _inner in 0..(3 * k + 10) {
            let s = solve_passive(&passive);
            if (0..k).filter(|&i| passive[i]).all(|i| s[i] > 0.0) {
                x = s;
                break;
            }
            let mut alpha = 1.0f64;
            for i in 0..k {
                if passive[i] && s[i] <= 0.0 {
                    let d = x[i] - s[i];
                    if d > 0.0 {
                        alpha = alpha.min(x[i] / d);
                    }
                }
            }
            x = &x + (&s - &x) * alpha;
            for i in 0..k {
                if passive[i] && x[i] <= 1e-15 {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    let res = (&target - &g * &x).norm();
    (x.iter().copied().collect(), res)
}

impl GenCone {
    pub fn zero() -> Self {
        GenCone::default()
    }

    pub fn ray(g: Vec<f64>) -> Self {
        GenCone { generators: vec![g], lineality: Vec::new() }.canonical()
    }

    pub fn new(generators: Vec<Vec<f64>>, lineality: Vec<Vec<f64>>) -> Self {
        GenCone { generators, lineality }.canonical()
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty() && self.lineality.is_empty()
    }

    /// Euclidean distance from `v` to the cone.
    pub fn distance(&self, v: &[f64]) -> f64 {
        let basis = linalg::orthonormal_basis(&self.lineality, SPAN_TOL);
        let w = linalg::project_out(v, &basis);
        let gens: Vec<Vec<f64>> = self.generators.iter().map(|g| linalg::project_out(g, &basis)).collect();
        nnls(&gens, &w).1
    }

    /// Nearest point of the cone to `v`.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let basis = linalg::orthonormal_basis(&self.lineality, SPAN_TOL);
        let w = linalg::project_out(v, &basis);
        let mut p = linalg::sub(v, &w);
        let gens: Vec<Vec<f64>> = self.generators.iter().map(|g| linalg::project_out(g, &basis)).collect();
        let (lam, _) = nnls(&gens, &w);
        for (l, g) in lam.iter().zip(&gens) {
            p = linalg::axpy(&p, *l, g);
        }
        p
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        self.distance(v) <= tol
    }

    /// `pos{G1 ∪ G2} + span{L1 ∪ L2}`, the Minkowski sum.
    pub fn sum(&self, other: &GenCone) -> GenCone {
        let mut g = self.generators.clone();
        g.extend(other.generators.iter().cloned());
        let mut l = self.lineality.clone();
        l.extend(other.lineality.iter().cloned());
        GenCone::new(g, l)
    }

    pub fn negated(&self) -> GenCone {
        GenCone::new(self.generators.iter().map(|g| linalg::neg(g)).collect(), self.lineality.clone())
    }

    /// True when every generator and lineality direction of `other` lies
    /// in `self` (within `tol`, on unit vectors).
    pub fn contains_cone(&self, other: &GenCone, tol: f64) -> bool {
        other.generators.iter().all(|g| self.contains(g, tol))
            && other.lineality.iter().all(|l| self.contains(l, tol) && self.contains(&linalg::neg(l), tol))
    }

    pub fn equivalent(&self, other: &GenCone, tol: f64) -> bool {
        self.contains_cone(other, tol) && other.contains_cone(self, tol)
    }

    /// Canonical form: orthonormal lineality basis derived from coordinate
    /// axes, unit generators orthogonal to it, implicit lines moved into the
    /// lineality, duplicates merged, redundant generators dropped, sorted.
    pub fn canonical(&self) -> GenCone {
        let mut lin: Vec<Vec<f64>> = self.lineality.clone();
        let mut gens: Vec<Vec<f64>> = self.generators.clone();
        loop {
            let basis = linalg::orthonormal_basis(&lin, SPAN_TOL);
            let mut reduced: Vec<Vec<f64>> = Vec::new();
            for g in &gens {
                let n0 = norm(g);
                if n0 == 0.0 || !n0.is_finite() {
                    continue;
                }
                let r = linalg::project_out(g, &basis);
                let nr = norm(&r);
                if nr > SPAN_TOL * n0 {
                    let u = linalg::scale(&r, 1.0 / nr);
                    if !reduced.iter().any(|q| dot(q, &u) > MERGE_COS) {
                        reduced.push(u);
                    }
                }
            }
            // a generator whose negative lies in pos{gens} spans a line
            let mut moved = false;
            for g in &reduced {
                let ng = linalg::neg(g);
                if nnls(&reduced, &ng).1 <= 1e-9 {
                    lin.push(g.clone());
                    moved = true;
                }
            }
            if moved {
                gens = reduced;
                continue;
            }
            lin = basis;
            gens = reduced;
            break;
        }
        gens.sort_by(|a, b| linalg::lex_cmp(b, a));
        let mut keep: Vec<bool> = vec![true; gens.len()];
        for i in 0..gens.len() {
            let others: Vec<Vec<f64>> =
                (0..gens.len()).filter(|&j| j != i && keep[j]).map(|j| gens[j].clone()).collect();
            if nnls(&others, &gens[i]).1 <= 1e-9 {
                keep[i] = false;
            }
        }
        let mut generators: Vec<Vec<f64>> =
            gens.into_iter().zip(keep).filter(|(_, k)| *k).map(|(g, _)| g).collect();
        generators.sort_by(|a, b| linalg::lex_cmp(a, b));
        let lineality = canonical_subspace_basis(&lin, self.dim_hint());
        GenCone { generators: generators.into_iter().map(clean).collect(), lineality }
    }

    fn dim_hint(&self) -> usize {
        self.generators.first().or(self.lineality.first()).map_or(0, |v| v.len())
    }

    /// Dimension of the ambient space if known.
    pub fn ambient(&self) -> Option<usize> {
        let d = self.dim_hint();
        (d > 0).then_some(d)
    }
}

fn clean(v: Vec<f64>) -> Vec<f64> {
    v.into_iter().map(|x| if x.abs() < 1e-15 { 0.0 } else { x }).collect()
}

/// Orthonormal basis of span(vs) obtained by projecting the coordinate axes
/// onto the subspace, so the result depends only on the subspace.
fn canonical_subspace_basis(vs: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let basis = linalg::orthonormal_basis(vs, SPAN_TOL);
    if basis.is_empty() {
        return basis;
    }
    let images: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let e = linalg::unit(n, i);
            let r = linalg::project_out(&e, &basis);
            linalg::sub(&e, &r)
        })
        .collect();
    let out = linalg::orthonormal_basis(&images, 1e-8);
    out.into_iter()
        .map(|q| {
            // sign convention: first significant coordinate positive
            let s = q.iter().find(|x| x.abs() > 1e-12).map_or(1.0, |x| x.signum());
            clean(linalg::scale(&q, s))
        })
        .collect()
}

/// Searches for `v` with `v ∈ c1` and `-v` within `tol` (infinity norm) of
/// `c2`, normalized so that `|v|_inf = 1`. Returns such a `v` if it exists.
pub fn negative_meet(c1: &GenCone, c2: &GenCone, n: usize, tol: f64) -> Result<Option<Vec<f64>>> {
    if c1.is_zero() || c2.is_zero() {
        return Ok(None);
    }
    let (g1, l1, g2, l2) = (&c1.generators, &c1.lineality, &c2.generators, &c2.lineality);
    // variables: v (n, free) | lam (g1, >=0) | mu (l1, free) | kap (g2, >=0) | nu (l2, free) | s (n, free)
    let nv = n + g1.len() + l1.len() + g2.len() + l2.len() + n;
    let mut free = vec![true; nv];
    let o_lam = n;
    let o_mu = o_lam + g1.len();
    let o_kap = o_mu + l1.len();
    let o_nu = o_kap + g2.len();
    let o_s = o_nu + l2.len();
    for j in 0..g1.len() {
        free[o_lam + j] = false;
    }
    for j in 0..g2.len() {
        free[o_kap + j] = false;
    }
    let mut base = Vec::new();
    for i in 0..n {
        // v - G1 lam - L1 mu = 0
        let mut a = vec![0.0; nv];
        a[i] = 1.0;
        for (j, g) in g1.iter().enumerate() {
            a[o_lam + j] = -g[i];
        }
        for (j, l) in l1.iter().enumerate() {
            a[o_mu + j] = -l[i];
        }
        base.push(LinCon::eq(a, 0.0));
        // v + G2 kap + L2 nu + s = 0
        let mut a = vec![0.0; nv];
        a[i] = 1.0;
        for (j, g) in g2.iter().enumerate() {
            a[o_kap + j] = g[i];
        }
        for (j, l) in l2.iter().enumerate() {
            a[o_nu + j] = l[i];
        }
        a[o_s + i] = 1.0;
        base.push(LinCon::eq(a, 0.0));
        let mut a = vec![0.0; nv];
        a[o_s + i] = 1.0;
        base.push(LinCon::le(a.clone(), tol));
        base.push(LinCon::ge(a, -tol));
        let mut a = vec![0.0; nv];
        a[i] = 1.0;
        base.push(LinCon::le(a.clone(), 1.0));
        base.push(LinCon::ge(a, -1.0));
    }
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut cons = base.clone();
            let mut a = vec![0.0; nv];
            a[i] = 1.0;
            cons.push(LinCon::eq(a, sign));
            let prob = lp::Lp { n: nv, free: free.clone(), cons, objective: vec![0.0; nv] };
            if let LpResult::Optimal { x, .. } = lp::solve(&prob)? {
                return Ok(Some(x[..n].to_vec()));
            }
        }
    }
    Ok(None)
}

/// Finite union of cones. No pieces means the empty set, which is distinct
/// from a union holding only the zero cone.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConeUnion {
    pub pieces: Vec<GenCone>,
}

impl ConeUnion {
    pub fn empty() -> Self {
        ConeUnion { pieces: Vec::new() }
    }

    pub fn zero() -> Self {
        ConeUnion { pieces: vec![GenCone::zero()] }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn has_nonzero(&self) -> bool {
        self.pieces.iter().any(|p| !p.is_zero())
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        self.pieces.iter().any(|p| p.contains(v, tol))
    }

    pub fn distance(&self, v: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.distance(v)).fold(f64::INFINITY, f64::min)
    }

    /// Adds a piece unless an equivalent one is already present, then
    /// re-sorts canonically.
    pub fn push(&mut self, c: GenCone) {
        if !self.pieces.iter().any(|p| p.equivalent(&c, 1e-9)) {
            self.pieces.push(c);
        }
        self.sort();
    }

    pub fn from_pieces(pieces: Vec<GenCone>) -> Self {
        let mut u = ConeUnion::empty();
        for p in pieces {
            u.push(p);
        }
        u
    }

    fn sort(&mut self) {
        self.pieces.sort_by(|a, b| {
            let ka = (a.lineality.len(), a.generators.len());
            let kb = (b.lineality.len(), b.generators.len());
            ka.cmp(&kb).then_with(|| {
                let fa: Vec<f64> = a.lineality.iter().chain(&a.generators).flatten().copied().collect();
                let fb: Vec<f64> = b.lineality.iter().chain(&b.generators).flatten().copied().collect();
                linalg::lex_cmp(&fa, &fb)
            })
        });
    }

    pub fn union(&self, other: &ConeUnion) -> ConeUnion {
        ConeUnion::from_pieces(self.pieces.iter().chain(&other.pieces).cloned().collect())
    }

    /// Membership in the Minkowski sum `self + other`, decided piece pair by
    /// piece pair.
    pub fn sum_contains(&self, other: &ConeUnion, v: &[f64], tol: f64) -> bool {
        self.pieces.iter().any(|p| other.pieces.iter().any(|q| p.sum(q).contains(v, tol)))
    }

    pub fn minkowski_sum(&self, other: &ConeUnion) -> ConeUnion {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for q in &other.pieces {
                pieces.push(p.sum(q));
            }
        }
        ConeUnion::from_pieces(pieces)
    }

    /// A nonzero `v` in `self ∩ (-other)` if one exists (tolerance `tol`).
    pub fn negative_meet(&self, other: &ConeUnion, n: usize, tol: f64) -> Result<Option<Vec<f64>>> {
        for p in &self.pieces {
            for q in &other.pieces {
                if let Some(v) = negative_meet(p, q, n, tol)? {
                    return Ok(Some(v));
                }
            }
        }
        Ok(None)
    }

    /// Equality as sets, checked piecewise: every piece of each side is
    /// contained in some piece of the other, or covered by probing.
    pub fn same_pieces(&self, other: &ConeUnion, tol: f64) -> bool {
        let covered = |a: &ConeUnion, b: &ConeUnion| {
            a.pieces.iter().all(|p| b.pieces.iter().any(|q| q.contains_cone(p, tol)))
        };
        self.is_empty() == other.is_empty() && covered(self, other) && covered(other, self)
    }
}
