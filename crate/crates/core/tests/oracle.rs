mod common;

use common::*;
use minimax_core::oracle::{
    evaluate_p, evaluate_p_from, finite_difference_hvp, metric_ci, projected_gradient_mapping,
    MinimaxProblem, SampleId, DEFAULT_FD_STEP,
};
use minimax_core::problems::{PlToyProblem, PlToySpec, QuadraticMinimaxProblem, QuadraticSpec};
use minimax_core::simplex::project_simplex;
use minimax_core::state::{IterateState, MomentumState};
use minimax_core::vector;

/// Max of `||grad J(z2) - grad J(z1) - H(z1)(z2 - z1)|| / ||z2 - z1||^2` observed
/// on the 50 x 10 logistic instance over 1000 pairs with `||z2 - z1|| <= 0.1`
/// was 0.49; pinned with headroom.
const LOGISTIC_REMAINDER_CONSTANT: f64 = 1.0;

fn quadratic(noise: f64) -> QuadraticMinimaxProblem {
    QuadraticMinimaxProblem::random(&QuadraticSpec {
        noise_sigma: noise,
        seed: 11,
        ..Default::default()
    })
    .unwrap()
}

#[test]
fn logistic_hvp_matches_finite_differences() {
    let p = logistic_instance(50, 10, 1);
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let x = gaussian(&mut r, 10, 0.5);
        let y = random_simplex(&mut r, 50);
        let dx = gaussian(&mut r, 10, 1.0);
        let dy = gaussian(&mut r, 50, 0.05);
        let xi = SampleId::Index(k % 50);
        let h = p.sample_hvp(&x, &y, xi, &dx, &dy).unwrap();
        let fd = finite_difference_hvp(&p, &x, &y, xi, &dx, &dy, DEFAULT_FD_STEP).unwrap();
        worst = worst.max(rel_err(&concat(&h.hx, &h.hy), &concat(&fd.hx, &fd.hy)));
    }
    assert!(worst <= 1e-5, "worst relative error {worst:e}");
}

#[test]
fn quadratic_hvp_matches_finite_differences_exactly() {
    let spec = QuadraticSpec {
        noise_sigma: 0.3,
        noise_sigma_h: 0.2,
        seed: 11,
        ..Default::default()
    };
    let p = QuadraticMinimaxProblem::random(&spec).unwrap();
    let mut r = rng(3);
    for _ in 0..50 {
        let (x, y) = (gaussian(&mut r, 10, 1.0), gaussian(&mut r, 10, 1.0));
        let (dx, dy) = (gaussian(&mut r, 10, 1.0), gaussian(&mut r, 10, 1.0));
        let xi = SampleId::Draw(17);
        let h = p.sample_hvp(&x, &y, xi, &dx, &dy).unwrap();
        let fd = finite_difference_hvp(&p, &x, &y, xi, &dx, &dy, DEFAULT_FD_STEP).unwrap();
        for (a, b) in concat(&h.hx, &h.hy).iter().zip(concat(&fd.hx, &fd.hy)) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }
    let zero = finite_difference_hvp(
        &p,
        &[0.0; 10],
        &[0.0; 10],
        SampleId::Draw(0),
        &[0.0; 10],
        &[0.0; 10],
        1e-5,
    )
    .unwrap();
    assert_eq!(zero.hx, vec![0.0; 10]);
}

#[test]
fn logistic_sample_average_is_unbiased() {
    let p = logistic_instance(40, 8, 4);
    let n = 40;
    let mut r = rng(5);
    for _ in 0..100 {
        let x = gaussian(&mut r, 8, 0.7);
        let y = random_simplex(&mut r, n);
        let (dx, dy) = (gaussian(&mut r, 8, 1.0), gaussian(&mut r, n, 0.1));
        let mut gx = vec![0.0; 8];
        let mut gy = vec![0.0; n];
        let mut hx = vec![0.0; 8];
        let mut hy = vec![0.0; n];
        let mut obj = 0.0;
        for i in 0..n {
            let xi = SampleId::Index(i);
            let g = p.sample_gradient(&x, &y, xi).unwrap();
            let h = p.sample_hvp(&x, &y, xi, &dx, &dy).unwrap();
            vector::axpy_in_place(1.0, &g.gx, &mut gx);
            vector::axpy_in_place(1.0, &g.gy, &mut gy);
            vector::axpy_in_place(1.0, &h.hx, &mut hx);
            vector::axpy_in_place(1.0, &h.hy, &mut hy);
            obj += p.sample_objective(&x, &y, xi).unwrap();
        }
        let inv = 1.0 / n as f64;
        let full = p.full_gradient(&x, &y);
        let full_h = p.full_hvp(&x, &y, &dx, &dy);
        assert!(elementwise_rel_err(&vector::scale(inv, &gx), &full.gx) <= 1e-12);
        assert!(elementwise_rel_err(&vector::scale(inv, &gy), &full.gy) <= 1e-12);
        assert!(elementwise_rel_err(&vector::scale(inv, &hx), &full_h.hx) <= 1e-12);
        assert!(elementwise_rel_err(&vector::scale(inv, &hy), &full_h.hy) <= 1e-12);
        let j = p.objective(&x, &y);
        assert!((obj * inv - j).abs() <= 1e-12 * j.abs().max(1.0));
    }
}

#[test]
fn quadratic_antithetic_average_is_unbiased() {
    let spec = QuadraticSpec {
        noise_sigma: 1.0,
        noise_sigma_h: 0.5,
        seed: 2,
        ..Default::default()
    };
    let p = QuadraticMinimaxProblem::random(&spec).unwrap();
    let mut r = rng(6);
    for k in 0..100u64 {
        let (x, y) = (gaussian(&mut r, 10, 1.0), gaussian(&mut r, 10, 1.0));
        let (dx, dy) = (gaussian(&mut r, 10, 1.0), gaussian(&mut r, 10, 1.0));
        let pair = [SampleId::Draw(2 * k), SampleId::Draw(2 * k + 1)];
        let g: Vec<_> = pair
            .iter()
            .map(|&xi| p.sample_gradient(&x, &y, xi).unwrap())
            .collect();
        let h: Vec<_> = pair
            .iter()
            .map(|&xi| p.sample_hvp(&x, &y, xi, &dx, &dy).unwrap())
            .collect();
        let full = p.full_gradient(&x, &y);
        let full_h = p.full_hvp(&x, &y, &dx, &dy);
        let mean = |a: &[f64], b: &[f64]| vector::scale(0.5, &vector::add(a, b));
        assert!(elementwise_rel_err(&mean(&g[0].gx, &g[1].gx), &full.gx) <= 1e-12);
        assert!(elementwise_rel_err(&mean(&g[0].gy, &g[1].gy), &full.gy) <= 1e-12);
        assert!(elementwise_rel_err(&mean(&h[0].hx, &h[1].hx), &full_h.hx) <= 1e-12);
        assert!(elementwise_rel_err(&mean(&h[0].hy, &h[1].hy), &full_h.hy) <= 1e-12);
    }
}

#[test]
fn hvp_is_symmetric_and_linear() {
    let logistic = logistic_instance(30, 6, 8);
    let quad = quadratic(0.0);
    let problems: [(&dyn MinimaxProblem, SampleId); 2] =
        [(&logistic, SampleId::Index(7)), (&quad, SampleId::Draw(3))];
    let mut r = rng(9);
    for (p, xi) in problems {
        let (dim_x, dim_y) = (p.dim_x(), p.dim_y());
        for _ in 0..50 {
            let x = gaussian(&mut r, dim_x, 0.5);
            let y = random_simplex(&mut r, dim_y);
            let (ax, ay) = (gaussian(&mut r, dim_x, 1.0), gaussian(&mut r, dim_y, 1.0));
            let (bx, by) = (gaussian(&mut r, dim_x, 1.0), gaussian(&mut r, dim_y, 1.0));
            let ha = p.sample_hvp(&x, &y, xi, &ax, &ay).unwrap();
            let hb = p.sample_hvp(&x, &y, xi, &bx, &by).unwrap();
            let lhs = vector::dot(&concat(&ha.hx, &ha.hy), &concat(&bx, &by));
            let rhs = vector::dot(&concat(&hb.hx, &hb.hy), &concat(&ax, &ay));
            assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()).max(1.0));

            let alpha = 2.5;
            let cx = vector::axpy(alpha, &ax, &bx);
            let cy = vector::axpy(alpha, &ay, &by);
            let hc = p.sample_hvp(&x, &y, xi, &cx, &cy).unwrap();
            let expect = vector::axpy(alpha, &concat(&ha.hx, &ha.hy), &concat(&hb.hx, &hb.hy));
            assert!(rel_err(&concat(&hc.hx, &hc.hy), &expect) <= 1e-10);
        }
    }
}

fn taylor_remainder_ratio(
    p: &dyn MinimaxProblem,
    x1: &[f64],
    y1: &[f64],
    dx: &[f64],
    dy: &[f64],
) -> (f64, f64) {
    let x2 = vector::add(x1, dx);
    let y2 = vector::add(y1, dy);
    let g1 = p.full_gradient(x1, y1);
    let g2 = p.full_gradient(&x2, &y2);
    let h = p.full_hvp(x1, y1, dx, dy);
    let rem: Vec<f64> = concat(&g2.gx, &g2.gy)
        .iter()
        .zip(concat(&g1.gx, &g1.gy))
        .zip(concat(&h.hx, &h.hy))
        .map(|((a, b), c)| a - b - c)
        .collect();
    let step = vector::norm2_pair(dx, dy);
    (norm(&rem), norm(&rem) / (step * step))
}

#[test]
fn taylor_remainder_vanishes_on_quadratic() {
    let p = quadratic(0.0);
    let mut r = rng(10);
    for _ in 0..1000 {
        let (x, y) = (gaussian(&mut r, 10, 1.0), gaussian(&mut r, 10, 1.0));
        let (dx, dy) = (gaussian(&mut r, 10, 0.5), gaussian(&mut r, 10, 0.5));
        let (rem, _) = taylor_remainder_ratio(&p, &x, &y, &dx, &dy);
        assert!(rem <= 1e-9, "{rem:e}");
    }
}

#[test]
fn taylor_remainder_bounded_on_logistic() {
    let p = logistic_instance(50, 10, 1);
    let mut r = rng(12);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x = gaussian(&mut r, 10, 0.5);
        let y = random_simplex(&mut r, 50);
        let mut dx = gaussian(&mut r, 10, 1.0);
        let mut dy = gaussian(&mut r, 50, 1.0);
        let len = 0.1 * rand::Rng::random::<f64>(&mut r) / vector::norm2_pair(&dx, &dy);
        dx = vector::scale(len, &dx);
        dy = vector::scale(len, &dy);
        worst = worst.max(taylor_remainder_ratio(&p, &x, &y, &dx, &dy).1);
    }
    println!("worst remainder ratio {worst}");
    assert!(worst <= LOGISTIC_REMAINDER_CONSTANT, "{worst}");
}

#[test]
fn logistic_gradient_lipschitz_spot_check() {
    let p = logistic_instance(50, 10, 1);
    let l = p.lipschitz_bound();
    let mut r = rng(13);
    for _ in 0..1000 {
        let (x1, x2) = (gaussian(&mut r, 10, 1.0), gaussian(&mut r, 10, 1.0));
        let (y1, y2) = (random_simplex(&mut r, 50), random_simplex(&mut r, 50));
        let g1 = p.full_gradient(&x1, &y1);
        let g2 = p.full_gradient(&x2, &y2);
        let lhs = vector::dist2(&concat(&g1.gx, &g1.gy), &concat(&g2.gx, &g2.gy));
        let rhs = l * vector::dist2(&concat(&x1, &y1), &concat(&x2, &y2));
        assert!(lhs <= rhs);
    }
}

#[test]
fn quadratic_closed_form_inner_max() {
    let p = quadratic(0.0);
    let mut r = rng(14);
    for _ in 0..20 {
        let x = gaussian(&mut r, 10, 1.0);
        let report = evaluate_p(&p, &x, 1e-8, 100);
        assert!(report.converged);
        assert_eq!(report.residual, 0.0);
        let y_closed = vector::scale(
            1.0 / p.nu(),
            (p.b().transpose() * nalgebra::DVector::from_column_slice(&x)).as_slice(),
        );
        assert!(rel_err(&report.y_star, &y_closed) <= 1e-12);
        let hp = p.p_hessian() * nalgebra::DVector::from_column_slice(&x);
        let p_val = 0.5 * vector::dot(&x, hp.as_slice());
        assert!((report.p_value - p_val).abs() <= 1e-10 * p_val.abs().max(1.0));
        assert!((p.objective(&x, &report.y_star) - p_val).abs() <= 1e-10 * p_val.abs().max(1.0));

        // Danskin: grad P(x) = grad_x J(x, y*) with y* from iterative ascent.
        let iterative = evaluate_p_from(&p, &x, vec![0.0; 10], 1e-12, 1000);
        assert!(iterative.converged);
        let danskin = p.full_gradient(&x, &iterative.y_star).gx;
        let grad_p = minimax_core::oracle::ClosedFormMax::grad_p(&p, &x);
        for (a, b) in danskin.iter().zip(&grad_p) {
            assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
    }
}

#[test]
fn logistic_inner_max_symmetric_point() {
    let p = logistic_instance(20, 5, 15);
    let report = evaluate_p(&p, &[0.0; 5], 1e-6, 1000);
    assert!(report.converged);
    for v in &report.y_star {
        assert!((v - 0.05).abs() <= 1e-12);
    }
    assert!((report.p_value - std::f64::consts::LN_2).abs() <= 1e-12);
}

#[test]
fn logistic_inner_max_matches_grid_search() {
    let data = minimax_core::libsvm::Dataset::from_rows(
        vec![
            vec![(0, 1.0), (1, 0.5)],
            vec![(0, -0.3), (1, 2.0)],
            vec![(1, -1.0)],
        ],
        vec![1.0, -1.0, 1.0],
        2,
    );
    let p = minimax_core::RobustLogisticProblem::new(data, Default::default()).unwrap();
    for x in [[0.8, -0.4], [-1.5, 0.7], [0.0, 0.0], [3.0, 2.0]] {
        let report = evaluate_p(&p, &x, 1e-6, 10_000);
        assert!(report.converged);
        let steps = 1000;
        let mut best = f64::NEG_INFINITY;
        for a in 0..=steps {
            for b in 0..=(steps - a) {
                let y = [
                    a as f64 / steps as f64,
                    b as f64 / steps as f64,
                    (steps - a - b) as f64 / steps as f64,
                ];
                best = best.max(p.objective(&x, &y));
            }
        }
        assert!(
            (report.p_value - best).abs() <= 1e-4,
            "{} vs {best}",
            report.p_value
        );
        assert!(report.p_value >= best - 1e-12);
    }
}

#[test]
fn inner_max_residual_is_recomputable() {
    let p = logistic_instance(60, 8, 16);
    let mut r = rng(17);
    for _ in 0..20 {
        let x = gaussian(&mut r, 8, 2.0);
        let report = evaluate_p(&p, &x, 1e-6, 1000);
        assert!(report.converged);
        // independent recomputation of the projected-gradient mapping
        let g = p.full_gradient(&x, &report.y_star).gy;
        let l = p.y_curvature();
        let stepped: Vec<f64> = report
            .y_star
            .iter()
            .zip(&g)
            .map(|(y, g)| y + g / l)
            .collect();
        let proj = project_simplex(&stepped).unwrap();
        let mapping = l * vector::dist2(proj.as_slice(), &report.y_star);
        assert!((mapping - report.residual).abs() <= 1e-12);
        assert!(mapping <= 1e-6);
        assert_eq!(
            projected_gradient_mapping(&p, &x, &report.y_star).0,
            report.residual
        );
    }
}

#[test]
fn inner_max_flags_iteration_cap() {
    let p = logistic_instance(60, 8, 16);
    let x = vec![3.0; 8];
    let report = evaluate_p_from(&p, &x, vec![0.0; 60], 1e-300, 0);
    assert!(!report.converged);
    assert_eq!(report.iters_used, 0);
    assert!(report.residual > 0.0);
}

#[test]
fn metric_ci_examples_and_bound() {
    let p = quadratic(0.0);
    let saddle = IterateState::new(vec![0.0; 10], vec![0.0; 10]);
    let zero = MomentumState::zeros(10, 10);
    assert_eq!(metric_ci(&p, &saddle, &zero).unwrap(), 0.0);

    let mut r = rng(18);
    use minimax_core::oracle::ClosedFormMax;
    for _ in 0..200 {
        let x = gaussian(&mut r, 10, 1.0);
        // y on the maximizer and exact momentum: C = ||grad P||
        let y_opt = p.y_opt(&x);
        let gx = p.full_gradient(&x, &y_opt).gx;
        let state = IterateState::new(x.clone(), y_opt);
        let c = metric_ci(&p, &state, &MomentumState::new(gx, vec![0.0; 10])).unwrap();
        assert!((c - vector::norm2(&p.grad_p(&x))).abs() <= 1e-10);

        // arbitrary state: ||grad P|| <= C
        let y = gaussian(&mut r, 10, 1.0);
        let m = MomentumState::new(gaussian(&mut r, 10, 1.0), gaussian(&mut r, 10, 1.0));
        let state = IterateState::new(x.clone(), y);
        let c = metric_ci(&p, &state, &m).unwrap();
        assert!(vector::norm2(&p.grad_p(&x)) <= c + 1e-12);
    }

    let logistic = logistic_instance(10, 3, 1);
    let s = IterateState::new(vec![0.0; 3], logistic.default_y());
    assert!(metric_ci(&logistic, &s, &MomentumState::zeros(3, 10)).is_err());
}

#[test]
fn quadratic_strong_concavity_witness() {
    let p = quadratic(0.0);
    let nu = p.nu();
    let mut r = rng(19);
    for _ in 0..1000 {
        let x = gaussian(&mut r, 10, 1.0);
        let (y1, y2) = (gaussian(&mut r, 10, 1.0), gaussian(&mut r, 10, 1.0));
        let g = p.full_gradient(&x, &y1).gy;
        let diff = vector::sub(&y2, &y1);
        let bound =
            p.objective(&x, &y1) + vector::dot(&g, &diff) - 0.5 * nu * vector::dot(&diff, &diff);
        let lhs = p.objective(&x, &y2);
        assert!(
            lhs <= bound + 1e-9 * bound.abs().max(1.0),
            "{lhs} > {bound}"
        );
    }
}

#[test]
fn pl_inequality_holds() {
    let p = PlToyProblem::random(&PlToySpec {
        seed: 3,
        ..Default::default()
    })
    .unwrap();
    let delta = p.delta();
    use minimax_core::oracle::ClosedFormMax;
    let mut r = rng(20);
    for _ in 0..1000 {
        let x = gaussian(&mut r, 10, 1.0);
        let y = gaussian(&mut r, 10, 1.0);
        let gy = p.full_gradient(&x, &y).gy;
        let gap = p.p_value(&x) - p.objective(&x, &y);
        assert!(gap >= -1e-10);
        let lhs = vector::dot(&gy, &gy);
        assert!(
            lhs >= 2.0 * delta * gap - 1e-9 * lhs.max(1.0),
            "{lhs} < {}",
            2.0 * delta * gap
        );
        // y^o is a maximizer: grad_y J vanishes there
        let g_opt = p.full_gradient(&x, &p.y_opt(&x)).gy;
        assert!(vector::norm2(&g_opt) <= 1e-10);
    }
}

#[test]
fn sample_space_errors() {
    let p = logistic_instance(10, 3, 1);
    let y = p.default_y();
    assert!(p
        .sample_hvp(&[0.0; 3], &y, SampleId::Index(10), &[0.0; 3], &y)
        .is_err());
    assert!(
        finite_difference_hvp(&p, &[0.0; 3], &y, SampleId::Index(99), &[1.0; 3], &y, 1e-5).is_err()
    );
}
