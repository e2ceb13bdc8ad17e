//! Dense two-phase simplex with Bland's rule.
//!
//! Sized for the small systems this crate builds (a handful of variables,
//! a few dozen rows). Every row is rescaled to unit infinity norm before
//! pivoting, so tolerances below are absolute on the scaled system.

use crate::error::{Error, Result};

const COST_EPS: f64 = 1e-10;
const PIVOT_CANDIDATE: f64 = 1e-9;
const PIVOT_MIN: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct LinCon {
    pub a: Vec<f64>,
    pub rel: Rel,
    pub b: f64,
}

impl LinCon {
    pub fn le(a: Vec<f64>, b: f64) -> Self {
        LinCon { a, rel: Rel::Le, b }
    }
    pub fn eq(a: Vec<f64>, b: f64) -> Self {
        LinCon { a, rel: Rel::Eq, b }
    }
    pub fn ge(a: Vec<f64>, b: f64) -> Self {
        LinCon { a, rel: Rel::Ge, b }
    }
}

/// Minimize `objective · x` subject to `cons`; variables flagged in `free`
/// are unrestricted, the rest are nonnegative.
#[derive(Clone, Debug)]
pub struct Lp {
    pub n: usize,
    pub free: Vec<bool>,
    pub cons: Vec<LinCon>,
    pub objective: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpResult {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl Lp {
    /// Feasibility problem over free variables.
    pub fn feasibility(n: usize, cons: Vec<LinCon>) -> Self {
        Lp { n, free: vec![true; n], cons, objective: vec![0.0; n] }
    }
}

/// Returns a point satisfying all constraints (free variables), or `None`.
pub fn lp_feasible(n: usize, cons: &[LinCon]) -> Result<Option<Vec<f64>>> {
    match solve(&Lp::feasibility(n, cons.to_vec()))? {
        LpResult::Optimal { x, .. } => Ok(Some(x)),
        LpResult::Infeasible => Ok(None),
        LpResult::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width - 1]
    }

    fn pivot(&mut self, cost: &mut [f64], r: usize, c: usize) -> Result<()> {
        let p = self.rows[r][c];
        if p.abs() < PIVOT_MIN {
            return Err(Error::NumericalFailure(format!("pivot magnitude {p:e}")));
        }
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = cost[c];
        if f != 0.0 {
            for (v, pv) in cost.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            cost[c] = 0.0;
        }
        self.basis[r] = c;
        Ok(())
    }

    /// Bland-rule iterations minimizing the objective whose reduced costs are
    /// `cost` (last entry holds minus the objective value). Columns with
    /// `banned[j]` never enter. Returns false when unbounded.
    fn run(&mut self, cost: &mut [f64], banned: &[bool]) -> Result<bool> {
        let ncols = self.width - 1;
        for _ in 0..MAX_PIVOTS {
            let enter = (0..ncols).find(|&j| !banned[j] && cost[j] < -COST_EPS);
            let Some(c) = enter else { return Ok(true) };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_CANDIDATE {
                    let ratio = self.rhs(i).max(0.0) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                            if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else { return Ok(false) };
            self.pivot(cost, r, c)?;
        }
        Err(Error::NumericalFailure("simplex pivot limit reached".into()))
    }
}

pub fn solve(lp: &Lp) -> Result<LpResult> {
    let n = lp.n;
    // column layout: one column per nonnegative variable, two per free one
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut ncols = 0;
    for j in 0..n {
        if lp.free[j] {
            col_of.push((ncols, Some(ncols + 1)));
            ncols += 2;
        } else {
            col_of.push((ncols, None));
            ncols += 1;
        }
    }
    let nstruct = ncols;

    let mut rows_in: Vec<(Vec<f64>, Rel, f64)> = Vec::new();
    for con in &lp.cons {
        let scale = con.a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !scale.is_finite() || !con.b.is_finite() {
            return Err(Error::InvalidInput("non-finite LP data".into()));
        }
        if scale < 1e-300 {
            let ok = match con.rel {
                Rel::Le => con.b >= -FEAS_EPS,
                Rel::Ge => con.b <= FEAS_EPS,
                Rel::Eq => con.b.abs() <= FEAS_EPS,
            };
            if !ok {
                return Ok(LpResult::Infeasible);
            }
            continue;
        }
        let mut a: Vec<f64> = vec![0.0; nstruct];
        for j in 0..n {
            let v = con.a[j] / scale;
            let (p, m) = col_of[j];
            a[p] = v;
            if let Some(m) = m {
                a[m] = -v;
            }
        }
        let mut b = con.b / scale;
        let mut rel = con.rel;
        if b < 0.0 {
            for v in a.iter_mut() {
                *v = -*v;
            }
            b = -b;
            rel = match rel {
                Rel::Le => Rel::Ge,
                Rel::Ge => Rel::Le,
                Rel::Eq => Rel::Eq,
            };
        }
        rows_in.push((a, rel, b));
    }

    let m = rows_in.len();
    let nslack = rows_in.iter().filter(|r| r.1 != Rel::Eq).count();
    let nart = rows_in.iter().filter(|r| r.1 != Rel::Le).count();
    let total = nstruct + nslack + nart;
    let width = total + 1;
    let mut tab = Tableau { rows: Vec::with_capacity(m), basis: Vec::with_capacity(m), width };
    let mut artificial = vec![false; total];
    let (mut s, mut t) = (nstruct, nstruct + nslack);
    for (a, rel, b) in rows_in {
        let mut row = vec![0.0; width];
        row[..nstruct].copy_from_slice(&a);
        row[width - 1] = b;
        match rel {
            Rel::Le => {
                row[s] = 1.0;
                tab.basis.push(s);
                s += 1;
            }
            Rel::Ge => {
                row[s] = -1.0;
                s += 1;
                row[t] = 1.0;
                artificial[t] = true;
                tab.basis.push(t);
                t += 1;
            }
            Rel::Eq => {
                row[t] = 1.0;
                artificial[t] = true;
                tab.basis.push(t);
                t += 1;
            }
        }
        tab.rows.push(row);
    }

    // phase 1: minimize the sum of artificials
    if nart > 0 {
        let mut cost = vec![0.0; width];
        for (i, row) in tab.rows.iter().enumerate() {
            if artificial[tab.basis[i]] {
                for (c, v) in cost.iter_mut().zip(row) {
                    *c -= v;
                }
            }
        }
        for j in 0..total {
            if artificial[j] {
                cost[j] = 0.0;
            }
        }
        let none = vec![false; total];
        tab.run(&mut cost, &none)?;
        if -cost[width - 1] > FEAS_EPS * (1.0 + m as f64) {
            return Ok(LpResult::Infeasible);
        }
        // drive remaining artificials out of the basis, drop redundant rows
        let mut i = 0;
        while i < tab.rows.len() {
            if artificial[tab.basis[i]] {
                let c = (0..total).find(|&j| !artificial[j] && tab.rows[i][j].abs() > PIVOT_CANDIDATE);
                match c {
                    Some(c) => {
                        let mut dummy = vec![0.0; width];
                        tab.pivot(&mut dummy, i, c)?;
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    // phase 2
    let mut cost = vec![0.0; width];
    for j in 0..n {
        let (p, mcol) = col_of[j];
        cost[p] = lp.objective[j];
        if let Some(mcol) = mcol {
            cost[mcol] = -lp.objective[j];
        }
    }
    for (i, row) in tab.rows.iter().enumerate() {
        let cb = cost[tab.basis[i]];
        if cb != 0.0 {
            for (c, v) in cost.iter_mut().zip(row) {
                *c -= cb * v;
            }
        }
    }
    for &bcol in &tab.basis {
        cost[bcol] = 0.0;
    }
    if !tab.run(&mut cost, &artificial)? {
        return Ok(LpResult::Unbounded);
    }

    let mut colval = vec![0.0; total];
    for (i, &bcol) in tab.basis.iter().enumerate() {
        colval[bcol] = tab.rhs(i).max(0.0);
    }
    let x: Vec<f64> = (0..n)
        .map(|j| {
            let (p, mcol) = col_of[j];
            colval[p] - mcol.map_or(0.0, |mc| colval[mc])
        })
        .collect();
    let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
    Ok(LpResult::Optimal { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contradictory_pair_is_infeasible() {
        let cons = vec![LinCon::le(vec![1.0], 1.0), LinCon::le(vec![-1.0], -2.0)];
        assert_eq!(lp_feasible(1, &cons).unwrap(), None);
    }

    #[test]
    fn single_upper_bound() {
        let x = lp_feasible(1, &[LinCon::le(vec![1.0], 1.0)]).unwrap().unwrap();
        assert!(x[0] <= 1.0 + 1e-12);
    }

    #[test]
    fn cone_with_lower_bound_on_x1() {
        let cons = vec![
            LinCon::le(vec![1.0, -2.0], 0.0),
            LinCon::le(vec![-2.0, 1.0], 0.0),
            LinCon::le(vec![-1.0, 0.0], 0.0),
            LinCon::ge(vec![1.0, 0.0], 7.0),
        ];
        let x = lp_feasible(2, &cons).unwrap().unwrap();
        for c in &cons {
            let lhs: f64 = c.a.iter().zip(&x).map(|(a, b)| a * b).sum();
            match c.rel {
                Rel::Le => assert!(lhs <= c.b + 1e-9),
                Rel::Ge => assert!(lhs >= c.b - 1e-9),
                Rel::Eq => assert!((lhs - c.b).abs() <= 1e-9),
            }
        }
    }

    #[test]
    fn small_optimum() {
        // max x + y  s.t. x + 2y <= 4, 3x + y <= 6, x,y >= 0  ->  (1.6, 1.2)
        let lp = Lp {
            n: 2,
            free: vec![false, false],
            cons: vec![LinCon::le(vec![1.0, 2.0], 4.0), LinCon::le(vec![3.0, 1.0], 6.0)],
            objective: vec![-1.0, -1.0],
        };
        match solve(&lp).unwrap() {
            LpResult::Optimal { x, value } => {
                assert!((x[0] - 1.6).abs() < 1e-9 && (x[1] - 1.2).abs() < 1e-9);
                assert!((value + 2.8).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        let lp = Lp { n: 1, free: vec![true], cons: vec![LinCon::le(vec![1.0], 1.0)], objective: vec![1.0] };
        assert_eq!(solve(&lp).unwrap(), LpResult::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let cons = vec![
            LinCon::eq(vec![1.0, 1.0], 2.0),
            LinCon::eq(vec![2.0, 2.0], 4.0),
            LinCon::ge(vec![1.0, 0.0], 0.5),
        ];
        let x = lp_feasible(2, &cons).unwrap().unwrap();
        assert!((x[0] + x[1] - 2.0).abs() < 1e-9 && x[0] >= 0.5 - 1e-9);
    }

    #[test]
    fn deterministic() {
        let cons = vec![LinCon::le(vec![1.0, 3.0], 5.0), LinCon::ge(vec![2.0, -1.0], -3.0)];
        let a = lp_feasible(2, &cons).unwrap();
        let b = lp_feasible(2, &cons).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
