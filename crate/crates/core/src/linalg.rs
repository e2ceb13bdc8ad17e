//! Small dense vector helpers on `&[f64]`.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n > 0.0 && n.is_finite() {
        Some(scale(a, 1.0 / n))
    } else {
        None
    }
}

pub fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

pub fn neg(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| -x).collect()
}

/// Total order used wherever output must be canonical: lexicographic on
/// coordinates, NaN-free inputs assumed.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Orthonormal basis of span(vs) by modified Gram-Schmidt, dropping
/// vectors whose residual falls below `tol` relative to their norm.
pub fn orthonormal_basis(vs: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let n0 = norm(v);
        if n0 == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&r, q);
                r = axpy(&r, -c, q);
            }
        }
        let nr = norm(&r);
        if nr > tol * n0 {
            basis.push(scale(&r, 1.0 / nr));
        }
    }
    basis
}

/// Removes from `v` its components along the orthonormal vectors `basis`.
pub fn project_out(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for q in basis {
        let c = dot(&r, q);
        r = axpy(&r, -c, q);
    }
    r
}

/// Orthonormal basis of the null space of the rows.
pub fn null_space(rows: &[Vec<f64>], n: usize, tol: f64) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return (0..n).map(|i| unit(n, i)).collect();
    }
    let row_basis = orthonormal_basis(rows, tol);
    let mut out = Vec::new();
    let mut acc = row_basis.clone();
    for i in 0..n {
        let e = unit(n, i);
        let r = project_out(&e, &acc);
        let nr = norm(&r);
        if nr > 1e-8 {
            let q = scale(&r, 1.0 / nr);
            let q = {
                let r2 = project_out(&q, &acc);
                let n2 = norm(&r2);
                scale(&r2, 1.0 / n2)
            };
            acc.push(q.clone());
            out.push(q);
        }
        if acc.len() == n {
            break;
        }
    }
    out
}
