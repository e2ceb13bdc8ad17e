use super::*;

fn wedge() -> HPolyhedron {
    HPolyhedron::new(2, vec![vec![1.0, -2.0], vec![-2.0, 1.0], vec![-1.0, 0.0]], vec![0.0; 3], vec![], vec![]).unwrap()
}

/// x1^2 + e^{x2}
fn escape() -> FuncExpr {
    FuncExpr::sum(vec![
        FuncExpr::quad(vec![vec![1.0, 0.0], vec![0.0, 0.0]]),
        FuncExpr::exp_affine(vec![0.0, 1.0], 0.0),
    ])
}

/// e^{-x1} + (x2 - x1)^2
fn directional() -> FuncExpr {
    FuncExpr::sum(vec![
        FuncExpr::exp_affine(vec![-1.0, 0.0], 0.0),
        FuncExpr::power_abs(vec![-1.0, 1.0], 0.0, 2.0),
    ])
}

fn central_diff(f: &FuncExpr, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            (f.eval(&xp).unwrap() - f.eval(&xm).unwrap()) / (2.0 * h)
        })
        .collect()
}

#[test]
fn eval_examples() {
    assert_eq!(escape().eval(&[0.0, 0.0]).unwrap(), 1.0);
    assert_eq!(directional().eval(&[0.0, 0.0]).unwrap(), 1.0);
    assert_eq!(FuncExpr::indicator(wedge()).eval(&[-1.0, 0.0]).unwrap(), f64::INFINITY);
    assert_eq!(FuncExpr::indicator(wedge()).eval(&[3.0, 3.0]).unwrap(), 0.0);
}

#[test]
fn overflow_is_flagged() {
    let f = FuncExpr::exp_affine(vec![1.0], 0.0);
    assert!(matches!(f.eval(&[800.0]), Err(Error::Overflow(_))));
}

#[test]
fn gradient_matches_finite_differences() {
    let g = escape().subdiff_at(&[1.0, 0.0]).unwrap();
    assert!(g.is_singleton());
    let fd = central_diff(&escape(), &[1.0, 0.0], 1e-6);
    assert!(linalg::dist(&g.polytopes[0][0], &[2.0, 1.0]) < 1e-12);
    assert!(linalg::dist(&fd, &[2.0, 1.0]) < 1e-8);
}

#[test]
fn abs_at_zero_is_segment() {
    let f = FuncExpr::max(vec![FuncExpr::affine(vec![1.0], 0.0), FuncExpr::affine(vec![-1.0], 0.0)]);
    let s = f.subdiff_at(&[0.0]).unwrap();
    assert_eq!(s.polytopes.len(), 1);
    let mut v: Vec<f64> = s.polytopes[0].iter().map(|p| p[0]).collect();
    v.sort_by(f64::total_cmp);
    assert_eq!(v, vec![-1.0, 1.0]);
    assert!(s.contains(&[0.3], 1e-12).unwrap());
    assert!(!s.contains(&[1.3], 1e-9).unwrap());
}

#[test]
fn min_is_union() {
    let f = FuncExpr::min(vec![FuncExpr::affine(vec![1.0, 0.0], 0.0), FuncExpr::affine(vec![0.0, 1.0], 0.0)]);
    let s = f.subdiff_at(&[1.0, 1.0]).unwrap();
    assert_eq!(s.polytopes, vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]]);
    assert!(!s.contains(&[0.5, 0.5], 1e-9).unwrap());
}

#[test]
fn indicator_adds_normal_cone() {
    let f = FuncExpr::sum(vec![FuncExpr::affine(vec![1.0, 1.0], 0.0), FuncExpr::indicator(wedge())]);
    let s = f.subdiff_at(&[2.0, 1.0]).unwrap();
    let cone = s.cone.clone().unwrap();
    assert!(cone.contains(&[1.0, -2.0], 1e-12));
    assert!(s.contains(&[2.0, -1.0], 1e-9).unwrap());
    assert!(matches!(f.subdiff_at(&[-1.0, 0.0]), Err(Error::NotInDomain)));
}

#[test]
fn two_nonsmooth_summands_rejected() {
    let f = FuncExpr::sum(vec![FuncExpr::power_abs(vec![1.0], 0.0, 1.0), FuncExpr::Norm]);
    assert!(matches!(f.subdiff_at(&[0.0]), Err(Error::Unsupported(_))));
    assert!(f.subdiff_at(&[1.0]).unwrap().is_singleton());
}

#[test]
fn dist_outside_and_on_boundary() {
    let f = FuncExpr::dist(HPolyhedron::halfspace(vec![0.0, 1.0], 0.0)).unwrap();
    assert_eq!(f.eval(&[4.0, 3.0]).unwrap(), 3.0);
    let s = f.subdiff_at(&[4.0, 3.0]).unwrap();
    assert_eq!(s.polytopes, vec![vec![vec![0.0, 1.0]]]);
    let s = f.subdiff_at(&[4.0, 0.0]).unwrap();
    assert!(s.contains(&[0.0, 1.0], 1e-12).unwrap());
    assert!(s.contains(&[0.0, 0.0], 1e-12).unwrap());
    assert!(!s.contains(&[0.0, -0.5], 1e-9).unwrap());
    assert!(f.subdiff_at(&[4.0, -2.0]).unwrap().is_singleton());
}

#[test]
fn pw_is_c1_at_zero() {
    let g = FuncExpr::pw(vec![1.0], 0.0);
    assert_eq!(g.eval(&[0.0]).unwrap(), 0.0);
    assert_eq!(g.eval(&[2.0]).unwrap(), 2.0);
    assert!((g.eval(&[-1.0]).unwrap() - ((-1f64).exp() - 1.0)).abs() < 1e-15);
    let l = g.subdiff_at(&[-1e-12]).unwrap().polytopes[0][0][0];
    let r = g.subdiff_at(&[0.0]).unwrap().polytopes[0][0][0];
    assert!((l - r).abs() < 1e-11);
}

#[test]
fn scale_is_homogeneous() {
    let f = FuncExpr::max(vec![FuncExpr::affine(vec![1.0, 2.0], 0.0), FuncExpr::affine(vec![-1.0, 0.5], 0.0)]);
    let g = FuncExpr::scale(3.0, f.clone());
    let a = f.subdiff_at(&[0.0, 0.0]).unwrap();
    let b = g.subdiff_at(&[0.0, 0.0]).unwrap();
    for (va, vb) in a.vertices().zip(b.vertices()) {
        assert_eq!(linalg::scale(va, 3.0), *vb);
    }
}

#[test]
fn json_round_trip_is_byte_stable() {
    let text = emit_func(&directional());
    let back = parse_func(&text).unwrap();
    assert_eq!(emit_func(&back), text);
    assert!(matches!(back, FuncExpr::Sum(ref c) if c.len() == 2));
}

#[test]
fn json_children_sorted() {
    let a = FuncExpr::sum(vec![FuncExpr::Norm, FuncExpr::affine(vec![1.0], 0.0)]);
    let b = FuncExpr::sum(vec![FuncExpr::affine(vec![1.0], 0.0), FuncExpr::Norm]);
    assert_eq!(emit_func(&a), emit_func(&b));
}

#[test]
fn json_errors_name_the_key() {
    let e = parse_func(r#"{"sum":[{"quad":{"Q":[[1.0]]}},{"exp_afine":{"c":[1.0],"beta":0.0}}]}"#).unwrap_err();
    match e {
        Error::Parse { location, message } => {
            assert_eq!(location, "$.sum[1]");
            assert!(message.contains("exp_afine"));
        }
        other => panic!("{other:?}"),
    }
    let e = parse_func(r#"{"affine":{"c":[1.0],"beta":0.0,"gamma":1}}"#).unwrap_err();
    assert!(matches!(e, Error::Parse { ref location, .. } if location == "$.affine.gamma"));
    assert!(parse_func(r#"{"scale":{"alpha":-1.0,"f":{"norm":{}}}}"#).is_err());
}

#[test]
fn indicator_and_dist_parse() {
    let f = parse_func(r#"{"sum":[{"dist":{"A":[[0.0,1.0]],"b":[0.0]}},{"indicator":{"A":[],"b":[],"E":[[1.0,0.0]],"d":[0.0]}}]}"#)
        .unwrap();
    assert_eq!(f.dim(), Some(2));
    let (rest, polys) = f.split_indicators();
    assert_eq!(polys.len(), 1);
    assert!(matches!(rest, Some(FuncExpr::Dist(_))));
}

#[test]
fn restriction_agrees_with_evaluation() {
    let f = FuncExpr::sum(vec![
        FuncExpr::quad(vec![vec![1.0, 0.5, 0.0], vec![0.0, 2.0, 1.0], vec![0.3, 0.0, -1.0]]),
        FuncExpr::exp_affine(vec![-1.0, 0.0, 0.5], 0.1),
        FuncExpr::max(vec![FuncExpr::affine(vec![1.0, 1.0, 1.0], 0.0), FuncExpr::pw(vec![0.0, 1.0, -2.0], 1.0)]),
    ]);
    let ybar = [0.7];
    let g = f.restrict_y(2, &ybar).unwrap();
    for x in [[0.0, 0.0], [1.5, -2.0], [-3.0, 0.25]] {
        let full = f.eval(&[x[0], x[1], ybar[0]]).unwrap();
        assert!((g.eval(&x).unwrap() - full).abs() < 1e-12);
    }
    let ind = FuncExpr::indicator(HPolyhedron::new(2, vec![vec![1.0, 1.0]], vec![1.0], vec![], vec![]).unwrap());
    let r = ind.restrict_y(1, &[3.0]).unwrap();
    assert_eq!(r.eval(&[-2.0]).unwrap(), 0.0);
    assert_eq!(r.eval(&[-1.0]).unwrap(), f64::INFINITY);
    assert!(matches!(FuncExpr::Norm.restrict_y(1, &[1.0]), Err(Error::Unsupported(_))));
}
