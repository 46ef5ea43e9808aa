use std::path::PathBuf;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tmn_core::control::finite_time::{norm, DEAD_ZONE};
use tmn_core::control::{
    bang_bang_torque, finite_time_feedback, gradient_flow_rate, input_matrix_g, lyapunov_grad, lyapunov_v,
    settling_time_bound, Translated,
};
use tmn_core::dynamics::{digester_drift, digester_rates};
use tmn_core::params::read_params;
use tmn_core::sim::{rk4_guarded_step, OriginGuard};
use tmn_core::{Digester, DigesterState, Gains, Params, Plan};

fn params() -> Params {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/params/biomethane.json");
    read_params(&path, &[]).unwrap()
}

fn translated() -> impl Strategy<Value = Translated<f64>> {
    prop::array::uniform4(-5.0f64..5.0).prop_filter("away from the origin", |x| norm(x) > 1e-3)
}

proptest! {
    #[test]
    fn v_is_homogeneous(x in translated(), c in 0.1f64..10.0, p in 0.1f64..10.0) {
        let scaled = x.map(|e| c * e);
        let expected = c.powf(4.0 / 3.0) * lyapunov_v(&x, p);
        prop_assert!((lyapunov_v(&scaled, p) - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn gradient_is_radial(x in translated(), p in 0.1f64..10.0) {
        let g = lyapunov_grad(&x, p).unwrap();
        let k = g[0] / x[0];
        for i in 0..4 {
            prop_assert!((g[i] - k * x[i]).abs() <= 1e-12 * norm(&g));
        }
        let expected = 4.0 / 3.0 * p.powf(2.0 / 3.0) * norm(&x).powf(1.0 / 3.0);
        prop_assert!((norm(&g) - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn settling_bound_homogeneity(x in translated(), p in 0.1f64..10.0) {
        let t = settling_time_bound(&x, p);
        prop_assert!((settling_time_bound(&x, 8.0 * p) - t / 4.0).abs() <= 1e-12 * t);
    }

    #[test]
    fn bang_bang_is_odd_about_midpoint(s in 0.0f64..300.0) {
        let plan = Plan::new(65.0, 0.0, 600.0).unwrap();
        if s > 0.0 {
            prop_assert_eq!(bang_bang_torque(300.0 - s, &plan), -bang_bang_torque(300.0 + s, &plan));
        }
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let x: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-5.0..5.0));
        let p = rng.gen_range(0.2..5.0);
        let g = lyapunov_grad(&x, p).unwrap();
        for i in 0..4 {
            let h = 1e-6 * norm(&x);
            let (mut xp, mut xm) = (x, x);
            xp[i] += h;
            xm[i] -= h;
            let fd = (lyapunov_v(&xp, p) - lyapunov_v(&xm, p)) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-6 * norm(&g), "{fd} vs {}", g[i]);
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> DigesterState {
    DigesterState {
        x1: rng.gen_range(0.01..10.0),
        s1: rng.gen_range(-1.0..30.0),
        x2: rng.gen_range(0.01..10.0),
        s2: rng.gen_range(-1.0..700.0),
    }
}

#[test]
fn control_affine_decomposition() {
    let p = params().digester;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let x = random_state(&mut rng);
        let u: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..2.0));
        let f = digester_drift(&x, &p);
        let g = input_matrix_g(&x, &p).unwrap();
        let direct = digester_rates(&x, &u, &p);
        for i in 0..4 {
            let gu: f64 = (0..4).map(|j| g[i][j] * u[j]).sum();
            let scale = f[i].abs() + (0..4).map(|j| (g[i][j] * u[j]).abs()).sum::<f64>();
            assert!((f[i] + gu - direct[i]).abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE), "{i}");
        }
    }
}

/// Plant under feedback, in plant coordinates.
fn closed_loop(x0: &Translated<f64>, gains: &Gains, p: &Digester, h: f64, t_end: f64) -> Vec<Translated<f64>> {
    let guard = OriginGuard::new(gains.x_star.to_array().to_vec(), DEAD_ZONE);
    let mut x = gains.untranslate(x0).to_array().to_vec();
    let mut out = vec![*x0];
    let steps = (t_end / h).round() as usize;
    for k in 0..steps {
        x = rk4_guarded_step(
            |_, y: &[f64]| {
                let s = DigesterState::from_array([y[0], y[1], y[2], y[3]]);
                let u = finite_time_feedback(&gains.translate(&s), gains, p)?;
                Ok(digester_rates(&s, &u, p).to_vec())
            },
            &x,
            k as f64 * h,
            h,
            &guard,
        )
        .unwrap();
        out.push(gains.translate(&DigesterState::from_array([x[0], x[1], x[2], x[3]])));
    }
    out
}

/// The gradient system on its own.
fn gradient_flow(x0: &Translated<f64>, pg: f64, h: f64, t_end: f64) -> Vec<Translated<f64>> {
    let guard = OriginGuard::new(vec![0.0; 4], DEAD_ZONE);
    let mut x = x0.to_vec();
    let mut out = vec![*x0];
    for k in 0..(t_end / h).round() as usize {
        x = rk4_guarded_step(
            |_, y: &[f64]| Ok(gradient_flow_rate(&[y[0], y[1], y[2], y[3]], pg).to_vec()),
            &x,
            k as f64 * h,
            h,
            &guard,
        )
        .unwrap();
        out.push([x[0], x[1], x[2], x[3]]);
    }
    out
}

#[test]
fn closed_loop_equals_gradient_flow() {
    let p = params();
    let gains = Gains::at_working_point(p.control.p, p.control.d_bar, &p.digester).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut tried = 0;
    while tried < 20 {
        let x0: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-5.0..5.0));
        // the flow moves along the segment to the origin; keep X1 away from zero on it
        if norm(&x0) > 5.0 || gains.x_star.x1 + x0[0] < 0.1 {
            continue;
        }
        tried += 1;
        let t_end = settling_time_bound(&x0, p.control.p) + 0.2;
        let a = closed_loop(&x0, &gains, &p.digester, 0.001, t_end);
        let b = gradient_flow(&x0, p.control.p, 0.001, t_end);
        let worst = a.iter().zip(&b).map(|(u, v)| norm(&std::array::from_fn(|i| u[i] - v[i]))).fold(0.0, f64::max);
        assert!(worst <= 1e-8 * norm(&x0), "x0 = {x0:?}: {worst}");
    }
}

#[test]
fn finite_time_convergence() {
    let p = params();
    let x0 = p.control.x_tilde_0.to_array();
    let t_star = settling_time_bound(&x0, p.control.p);
    let h = 0.001;
    let traj = gradient_flow(&x0, p.control.p, h, t_star + 1.0);
    let norms: Vec<f64> = traj.iter().map(norm).collect();
    assert!(norms.windows(2).all(|w| w[1] <= w[0]));
    let first = norms.iter().position(|n| *n <= 1e-6).unwrap() as f64 * h;
    assert!((first - t_star).abs() <= 0.02 * t_star, "{first} vs {t_star}");
    assert!(norms[(t_star / h).ceil() as usize + 1] <= 1e-6);
    assert_eq!(*norms.last().unwrap(), 0.0);

    // s^{1/3} falls on a straight line of slope −(4/9)p^{2/3}
    let s0 = norms[0].powf(2.0 / 3.0);
    let slope = -4.0 / 9.0 * p.control.p.powf(2.0 / 3.0);
    let mut fit = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, n) in norms.iter().enumerate() {
        let t = k as f64 * h;
        if t > t_star - 0.05 {
            break;
        }
        let c = n.powf(2.0 / 3.0);
        assert!((c - (s0 + slope * t)).abs() <= 1e-6, "t = {t}");
        fit = (fit.0 + 1.0, fit.1 + t, fit.2 + c, fit.3 + t * t, fit.4 + t * c);
    }
    let (n, st, sc, stt, stc) = fit;
    let fitted = (n * stc - st * sc) / (n * stt - st * st);
    assert!((fitted - slope).abs() <= 1e-4);
}
