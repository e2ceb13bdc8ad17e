use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Direction;

/// Deterministic direction sweep: uniform angles for n=2, a Fibonacci
/// lattice for n=3, seeded Gaussian samples for n>=4. For n=1 the sphere
/// is {-1, 1} and `resolution` is ignored.
pub fn sphere_grid(n: usize, resolution: usize, seed: u64) -> Vec<Direction> {
    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    match n {
        0 => Vec::new(),
        1 => vec![Direction::new(&[1.0]).unwrap(), Direction::new(&[-1.0]).unwrap()],
        2 => (0..resolution)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / resolution as f64;
                Direction::new(&[snap(th.cos()), snap(th.sin())]).unwrap()
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..resolution)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / resolution as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * i as f64;
                    Direction::new(&[r * phi.cos(), r * phi.sin(), z]).unwrap()
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(resolution);
            while out.len() < resolution {
                let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                if let Ok(d) = Direction::new(&v) {
                    out.push(d);
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist, norm};

    #[test]
    fn square_grid() {
        let g = sphere_grid(2, 4, 0);
        let want = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (d, w) in g.iter().zip(want) {
            assert!(dist(d.coords(), &w) < 1e-12);
        }
    }

    #[test]
    fn octagon_has_diagonal() {
        let h = 0.5f64.sqrt();
        assert!(sphere_grid(2, 8, 0).iter().any(|d| dist(d.coords(), &[h, h]) < 1e-12));
    }

    #[test]
    fn fibonacci_distinct_units() {
        let g = sphere_grid(3, 100, 0);
        assert_eq!(g.len(), 100);
        let mut min_angle = f64::INFINITY;
        for (i, a) in g.iter().enumerate() {
            assert!((norm(a.coords()) - 1.0).abs() < 1e-12);
            for b in &g[i + 1..] {
                let c: f64 = a.coords().iter().zip(b.coords()).map(|(x, y)| x * y).sum();
                min_angle = min_angle.min(c.clamp(-1.0, 1.0).acos());
            }
        }
        assert!(min_angle > 0.0);
    }

    #[test]
    fn seeded_high_dim_is_reproducible() {
        assert_eq!(sphere_grid(5, 20, 7), sphere_grid(5, 20, 7));
        assert_ne!(sphere_grid(5, 20, 7), sphere_grid(5, 20, 8));
    }
}
