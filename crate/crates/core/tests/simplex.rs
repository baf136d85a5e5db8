use minimax_core::simplex::{project_simplex, project_simplex_in_place};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Sum with error-free accumulation so the check measures the projection, not the test.
fn exact_sum(w: &[f64]) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for &x in w {
        let t = s + x;
        c += if s.abs() >= x.abs() {
            (s - t) + x
        } else {
            (x - t) + s
        };
        s = t;
    }
    s + c
}

fn assert_feasible(w: &[f64]) {
    assert!(w.iter().all(|&v| (0.0..=1.0).contains(&v)));
    let s = exact_sum(w);
    assert!((s - 1.0).abs() <= 1e-12, "sum {s}");
}

#[test]
fn feasibility_idempotence_nonexpansiveness_bulk() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..100_000usize {
        let n = if k % 1000 == 0 {
            10_000
        } else {
            rng.random_range(1..=64)
        };
        let scale = [0.01, 1.0, 100.0][k % 3];
        let u: Vec<f64> = (0..n)
            .map(|_| scale * (rng.random::<f64>() - 0.3))
            .collect();
        let v: Vec<f64> = (0..n)
            .map(|_| scale * (rng.random::<f64>() - 0.3))
            .collect();
        let pu = project_simplex(&u).unwrap();
        let pv = project_simplex(&v).unwrap();
        assert_feasible(pu.as_slice());
        assert_eq!(project_simplex(pu.as_slice()).unwrap(), pu);
        assert!(dist(pu.as_slice(), pv.as_slice()) <= dist(&u, &v) + 1e-12);
    }
}

fn grid_oracle(v: &[f64], steps: usize) -> Vec<f64> {
    let h = 1.0 / steps as f64;
    let mut best = (f64::INFINITY, vec![]);
    let mut consider = |w: Vec<f64>| {
        let d = dist(&w, v);
        if d < best.0 {
            best = (d, w);
        }
    };
    match v.len() {
        1 => consider(vec![1.0]),
        2 => (0..=steps).for_each(|a| consider(vec![a as f64 * h, 1.0 - a as f64 * h])),
        3 => {
            for a in 0..=steps {
                for b in 0..=(steps - a) {
                    consider(vec![a as f64 * h, b as f64 * h, (steps - a - b) as f64 * h]);
                }
            }
        }
        _ => unreachable!(),
    }
    best.1
}

#[test]
fn matches_grid_search_for_small_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..60 {
        let n = 1 + k % 3;
        let v: Vec<f64> = (0..n).map(|_| 3.0 * rng.random::<f64>() - 1.0).collect();
        let p = project_simplex(&v).unwrap();
        let g = grid_oracle(&v, 1000);
        assert!(
            dist(p.as_slice(), &g) <= 2e-3,
            "{v:?}: {:?} vs {g:?}",
            p.as_slice()
        );
        assert!(dist(p.as_slice(), &v) <= dist(&g, &v) + 1e-12);
    }
}

#[test]
fn in_place_agrees() {
    let mut v = vec![0.7, -0.2, 1.4, 0.0];
    let p = project_simplex(&v).unwrap();
    project_simplex_in_place(&mut v).unwrap();
    assert_eq!(p.as_slice(), &v[..]);
    assert!(project_simplex_in_place(&mut []).is_err());
}

proptest! {
    #[test]
    fn permutation_equivariance(v in prop::collection::vec(-10.0f64..10.0, 1..40), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..v.len()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let permuted: Vec<f64> = perm.iter().map(|&i| v[i]).collect();
        let p = project_simplex(&v).unwrap();
        let q = project_simplex(&permuted).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((q.as_slice()[k] - p.as_slice()[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn optimality_against_feasible_points(v in prop::collection::vec(-5.0f64..5.0, 2..20),
                                          w in prop::collection::vec(0.0f64..1.0, 20)) {
        let p = project_simplex(&v).unwrap();
        let s: f64 = w[..v.len()].iter().sum::<f64>().max(1e-9);
        let other: Vec<f64> = w[..v.len()].iter().map(|x| x / s).collect();
        prop_assert!(dist(p.as_slice(), &v) <= dist(&other, &v) + 1e-9);
    }
}
