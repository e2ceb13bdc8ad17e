use asyminf::asymptotics::{estimate_dir_subdiff, EstimatorParams};
use asyminf::func::FuncExpr;
use asyminf::geometry::{cone_member, lp_feasible, recession_cone, Direction, HPolyhedron, LinCon};
use asyminf::linalg::{add, dot, norm, scale, sub};
use asyminf::oracle::region_inf_search;
use asyminf::poly_infinity::{dir_normal_cone_at_infinity, normal_cone_at_infinity, swept_union};
use asyminf::geometry::sphere_grid;
use proptest::prelude::*;

fn vec_in(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo..hi, n)
}

fn rows(n: usize, max_rows: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(vec_in(n, -3.0, 3.0), 1..=max_rows)
        .prop_filter("rows bounded away from zero", |a| a.iter().all(|r| norm(r) > 0.3))
}

fn polyhedron(max_rows: usize) -> impl Strategy<Value = HPolyhedron> {
    (2usize..=3)
        .prop_flat_map(move |n| (rows(n, max_rows), vec_in(max_rows, -2.0, 2.0), Just(n)))
        .prop_filter_map("nonempty", |(a, b, n)| {
            let b = b[..a.len()].to_vec();
            let p = HPolyhedron::new(n, a, b, vec![], vec![]).ok()?;
            (!p.is_empty().ok()?).then_some(p)
        })
}

fn unit(v: &[f64]) -> Vec<f64> {
    scale(v, 1.0 / norm(v))
}

/// Largest normalized row slack `max_i <a_i, v> / |a_i|`.
fn margin(a: &[Vec<f64>], v: &[f64]) -> f64 {
    a.iter().map(|r| dot(r, v) / norm(r)).fold(f64::NEG_INFINITY, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn recession_of_a_cone_is_the_cone(a in (2usize..=3).prop_flat_map(|n| rows(n, 6)), probes in prop::collection::vec(vec_in(3, -1.0, 1.0), 50)) {
        let n = a[0].len();
        let p = HPolyhedron::new(n, a.clone(), vec![0.0; a.len()], vec![], vec![]).unwrap();
        let rec = recession_cone(&p).unwrap();
        for v in probes.iter().map(|v| &v[..n]).filter(|v| norm(v) > 0.1) {
            let v = unit(v);
            let m = margin(&a, &v);
            if m.abs() < 1e-3 {
                continue;
            }
            prop_assert_eq!(m < 0.0, cone_member(&rec, &v, 1e-7), "v = {:?}", v);
            // membership does not change under positive scaling
            for s in [1e-2, 7.0, 1e2] {
                let w = scale(&v, s);
                prop_assert_eq!(rec.contains(&v, 1e-7), rec.contains(&w, 1e-7 * s));
            }
        }
    }

    #[test]
    fn lp_feasibility_is_deterministic(a in rows(3, 6), b in vec_in(6, -1.0, 2.0)) {
        let cons: Vec<LinCon> = a.iter().zip(&b).map(|(r, bi)| LinCon::le(r.clone(), *bi)).collect();
        let x = lp_feasible(3, &cons).unwrap();
        let y = lp_feasible(3, &cons).unwrap();
        prop_assert_eq!(format!("{x:?}"), format!("{y:?}"));
    }

    #[test]
    fn directional_cone_is_invariant_under_row_scaling(p in polyhedron(6), w in vec_in(3, -1.0, 1.0), d in vec_in(6, 0.1, 10.0)) {
        let n = p.dim();
        let rec = recession_cone(&p).unwrap();
        // a direction inside the recession cone (or skip if only {0})
        let mut u = vec![0.0; n];
        for (g, c) in rec.generators.iter().zip(w.iter().map(|c| c.abs() + 0.05)) {
            u = add(&u, &scale(g, c));
        }
        for (l, c) in rec.lineality.iter().zip(&w) {
            u = add(&u, &scale(l, *c));
        }
        prop_assume!(norm(&u) > 1e-3);
        let u = Direction::new(&u).unwrap();
        let scaled_a: Vec<Vec<f64>> = p.a().iter().zip(&d).map(|(r, s)| scale(r, *s)).collect();
        let scaled_b: Vec<f64> = p.b().iter().zip(&d).map(|(bi, s)| bi * s).collect();
        let q = HPolyhedron::new(n, scaled_a, scaled_b, vec![], vec![]).unwrap();
        let c1 = dir_normal_cone_at_infinity(&p, &u).unwrap();
        let c2 = dir_normal_cone_at_infinity(&q, &u).unwrap();
        prop_assert!(c1.same_pieces(&c2, 1e-7), "{:?} vs {:?}", c1, c2);
    }

    #[test]
    fn directions_outside_the_recession_cone_give_empty(p in polyhedron(6), v in vec_in(3, -1.0, 1.0)) {
        let n = p.dim();
        let v = &v[..n];
        prop_assume!(norm(v) > 0.1);
        let u = unit(v);
        prop_assume!(margin(p.a(), &u) > 1e-3);
        let c = dir_normal_cone_at_infinity(&p, &Direction::new(&u).unwrap()).unwrap();
        prop_assert!(c.is_empty());
    }
}

/// Recession generators and both signs of lineality directions: the
/// measure-zero directions a uniform grid misses.
fn boundary_directions(p: &HPolyhedron) -> Vec<Direction> {
    let rec = recession_cone(p).unwrap();
    let lin = rec.lineality.iter().flat_map(|l| [l.clone(), scale(l, -1.0)]);
    rec.generators.iter().cloned().chain(lin).filter_map(|g| Direction::new(&g).ok()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    /// Union relation in the plane: the normal cone at infinity agrees with
    /// the union of directional cones over a fine direction grid.
    #[test]
    fn union_over_directions(a in rows(2, 5), b in vec_in(5, -2.0, 2.0), probes in prop::collection::vec(0.0..std::f64::consts::TAU, 100)) {
        let p = HPolyhedron::new(2, a.clone(), b[..a.len()].to_vec(), vec![], vec![]).unwrap();
        prop_assume!(!p.is_empty().unwrap());
        let full = match normal_cone_at_infinity(&p) {
            Ok(c) => c,
            Err(asyminf::Error::BoundedSet) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let grid: Vec<Direction> = sphere_grid(2, 720, 0)
            .into_iter()
            .filter(|u| p.in_recession(u.coords(), 1e-9))
            .chain(boundary_directions(&p))
            .collect();
        let swept = swept_union(&p, &grid).unwrap();
        for t in probes {
            let v = [t.cos(), t.sin()];
            prop_assert_eq!(full.contains(&v, 1e-3), swept.contains(&v, 1e-3), "v = {:?}", v);
        }
    }
}

fn smooth_atom(n: usize) -> impl Strategy<Value = FuncExpr> {
    prop_oneof![
        (vec_in(n, -2.0, 2.0), -1.0..1.0f64).prop_map(|(c, b)| FuncExpr::affine(c, b)),
        prop::collection::vec(vec_in(n, -1.0, 1.0), n).prop_map(|m| {
            let n = m.len();
            let q = (0..n).map(|i| (0..n).map(|j| 0.5 * (m[i][j] + m[j][i])).collect()).collect();
            FuncExpr::quad(q)
        }),
        (vec_in(n, -0.5, 0.5), -0.5..0.5f64).prop_map(|(c, b)| FuncExpr::exp_affine(c, b)),
    ]
}

fn smooth(n: usize) -> impl Strategy<Value = FuncExpr> {
    prop::collection::vec(smooth_atom(n), 1..=3).prop_map(FuncExpr::sum)
}

fn fd_gradient(f: &FuncExpr, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let h = 1e-5 * (1.0 + x[i].abs());
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[i] += h;
            b[i] -= h;
            (f.value(&a) - f.value(&b)) / (2.0 * h)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn gradient_matches_finite_differences(f in smooth(3), x in vec_in(3, -2.0, 2.0)) {
        let s = f.subdiff_at(&x).unwrap();
        let v: Vec<&Vec<f64>> = s.vertices().collect();
        prop_assert_eq!(v.len(), 1);
        let fd = fd_gradient(&f, &x);
        prop_assert!(norm(&sub(v[0], &fd)) <= 1e-5 * (1.0 + norm(&fd)), "{:?} vs {:?}", v[0], fd);
    }

    /// f'(x; v) never exceeds the support function of the returned set.
    #[test]
    fn max_estimate_is_sound(fs in prop::collection::vec(smooth_atom(2), 2..=3), x in vec_in(2, -2.0, 2.0), tie in any::<bool>(), dirs in prop::collection::vec(vec_in(2, -1.0, 1.0), 20)) {
        let mut fs = fs;
        if tie {
            // shift the second piece so the first two pieces are active at x
            let d = fs[0].value(&x) - fs[1].value(&x);
            fs[1] = FuncExpr::sum(vec![fs[1].clone(), FuncExpr::affine(vec![0.0, 0.0], d)]);
        }
        let f = FuncExpr::max(fs);
        let s = f.subdiff_at(&x).unwrap();
        for v in dirs.iter().filter(|v| norm(v) > 1e-2) {
            let h = 1e-7;
            let deriv = (f.value(&add(&x, &scale(v, h))) - f.value(&x)) / h;
            let support = s.vertices().map(|w| dot(w, v)).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(deriv <= support + 1e-5 * (1.0 + support.abs()), "{} > {}", deriv, support);
        }
    }

    #[test]
    fn subdifferential_is_positively_homogeneous(f in smooth(2), alpha in 0.01..50.0f64, x in vec_in(2, -2.0, 2.0)) {
        let base = f.subdiff_at(&x).unwrap();
        let scaled = FuncExpr::scale(alpha, f.clone()).subdiff_at(&x).unwrap();
        let a: Vec<&Vec<f64>> = base.vertices().collect();
        let b: Vec<&Vec<f64>> = scaled.vertices().collect();
        prop_assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            prop_assert!(norm(&sub(&scale(p, alpha), q)) <= 1e-12 * (1.0 + alpha * norm(p)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn estimator_is_deterministic_and_conic(f in smooth(2), t in 0.0..std::f64::consts::TAU, seed in 0u64..1000) {
        let p = EstimatorParams { rungs: 4, samples: 64, seed, ..EstimatorParams::default() };
        let u = Direction::new(&[t.cos(), t.sin()]).unwrap();
        let a = estimate_dir_subdiff(&f, &u, &p);
        let b = estimate_dir_subdiff(&f, &u, &p);
        prop_assert_eq!(&a, &b);
        if let Ok(a) = a {
            for g in a.singular_rays.pieces.iter().flat_map(|c| c.generators.iter()) {
                prop_assert!((norm(g) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn region_search_is_deterministic(f in smooth(2), seed in 0u64..1000) {
        let omega = HPolyhedron::whole_space(2);
        let a = region_inf_search(&f, &omega, 10.0, 4, seed);
        let b = region_inf_search(&f, &omega, 10.0, 4, seed);
        prop_assert_eq!(a, b);
    }
}
