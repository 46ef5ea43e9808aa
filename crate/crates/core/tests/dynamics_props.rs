use std::path::PathBuf;

use proptest::prelude::*;
use tmn_core::dynamics::{
    digester_rates, haldane_mu2, monod_mu1, operating_equilibrium, straight_line_accel, truck_b_matrix,
    truck_forward_dynamics, truck_passive_rates,
};
use tmn_core::params::read_params;
use tmn_core::sim::rk4_step;
use tmn_core::{Digester, DigesterState, Params, Truck, TruckState};

fn params() -> Params {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/params/biomethane.json");
    read_params(&path, &[]).unwrap()
}

fn truck() -> impl Strategy<Value = Truck> {
    (
        (500.0f64..20000.0, 0.0f64..2000.0, 0.0f64..1e5),
        (0.1f64..5.0, 0.1f64..5.0, 0.1f64..1.5, 0.5f64..4.0, 0.01f64..1.0),
    )
        .prop_map(|((m_v, m_l, i_z), (a, b, r, l, d))| Truck {
            m_v,
            m_l,
            i_z,
            a,
            b,
            r,
            l,
            d,
            distance: 8000.0,
            t_u: 600.0,
        })
}

proptest! {
    #[test]
    fn straight_line_reduction(p in truck(), tau in -500.0f64..500.0) {
        let (a1, a2) = truck_forward_dynamics(&TruckState::at_rest(), tau, tau, &p).unwrap();
        prop_assert_eq!(a1, a2);
        let expected = straight_line_accel(tau, &p);
        prop_assert!((p.r * a1 - expected).abs() <= 1e-12 * expected.abs().max(1e-300));
    }

    #[test]
    fn forward_dynamics_inverts_b(p in truck(), t1 in -500.0f64..500.0, t2 in -500.0f64..500.0) {
        let b = truck_b_matrix(&p).unwrap();
        let (a1, a2) = truck_forward_dynamics(&TruckState::at_rest(), t1, t2, &p).unwrap();
        let scale = b[0][0].abs() * (a1.abs() + a2.abs()) + t1.abs() + t2.abs();
        prop_assert!((b[0][0] * a1 + b[0][1] * a2 - t1).abs() <= 1e-9 * scale);
        prop_assert!((b[1][0] * a1 + b[1][1] * a2 - t2).abs() <= 1e-9 * scale);
    }

    #[test]
    fn antisymmetric_torques(p in truck(), tau in 0.1f64..500.0) {
        let (a1, a2) = truck_forward_dynamics(&TruckState::at_rest(), tau, -tau, &p).unwrap();
        prop_assert!((a1 + a2).abs() <= 1e-12 * a1.abs());
    }

    #[test]
    fn straight_line_ignores_yaw_inertia(p in truck(), tau in -500.0f64..500.0) {
        let reference = truck_forward_dynamics(&TruckState::at_rest(), tau, tau, &p).unwrap();
        for i_z in [0.0, 3000.0, 1e6] {
            let q = Truck { i_z, ..p.clone() };
            prop_assert_eq!(truck_forward_dynamics(&TruckState::at_rest(), tau, tau, &q).unwrap(), reference);
        }
    }

    #[test]
    fn passive_joints_straight(p in truck(), w in -50.0f64..50.0) {
        let (t3, psi) = truck_passive_rates(0.0, w, w, &p);
        prop_assert!((t3 - w).abs() <= 1e-12 * w.abs());
        prop_assert!(psi.abs() <= 1e-12 * w.abs() * p.r / p.d);
        let (t3, _) = truck_passive_rates(0.0, w, -w, &p);
        prop_assert!(t3.abs() <= 1e-12 * w.abs());
    }

    #[test]
    fn equilibrium_residual(d in 0.05f64..1.2) {
        let p = params().digester;
        let u = [d; 4];
        if let Ok(x) = operating_equilibrium(&u, &p) {
            let r = digester_rates(&x, &u, &p);
            prop_assert!(r.iter().all(|v| v.abs() < 1e-10), "{:?}", r);
        }
    }
}

#[test]
fn monod_strictly_increasing() {
    let p = params().digester;
    let mut prev = 0.0;
    for i in 1..=20000 {
        let mu = monod_mu1(i as f64 * 0.01, &p);
        assert!(mu > prev && mu < p.mu1_max);
        prev = mu;
    }
}

fn haldane_derivative(s: f64, p: &Digester) -> f64 {
    let h = 1e-6 * s.max(1.0);
    (haldane_mu2(s + h, p) - haldane_mu2(s - h, p)) / (2.0 * h)
}

#[test]
fn haldane_single_peak() {
    let p = params().digester;
    let signs: Vec<bool> = (1..=40000).map(|i| haldane_derivative(i as f64 * 0.05, &p) > 0.0).collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(changes, 1);
    assert!(signs[0] && !signs[signs.len() - 1]);
}

#[test]
fn haldane_argmax_by_golden_section() {
    let p = params().digester;
    let (mut a, mut b) = (0.0f64, 10.0 * p.k_i2);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if haldane_mu2(c, &p) > haldane_mu2(d, &p) {
            b = d;
        } else {
            a = c;
        }
    }
    let s_star = 0.5 * (a + b);
    assert!(haldane_derivative(s_star, &p).abs() < 1e-8);
    assert!((s_star - p.k_i2 * p.k_s2.sqrt()).abs() < 1e-4 * s_star);
}

fn integrate(x0: DigesterState, u: [f64; 4], days: f64) -> Vec<[f64; 4]> {
    let p = params().digester;
    let h = 0.001;
    let mut x = x0.to_array().to_vec();
    let mut out = vec![x0.to_array()];
    for k in 0..(days / h) as usize {
        x = rk4_step(
            |_, y: &[f64]| {
                let s = DigesterState::from_array([y[0], y[1], y[2], y[3]]);
                Ok(digester_rates(&s, &u, &p).to_vec())
            },
            &x,
            k as f64 * h,
            h,
        )
        .unwrap();
        out.push([x[0], x[1], x[2], x[3]]);
    }
    out
}

#[test]
fn biomass_free_subspaces_are_invariant() {
    let no_x1 = DigesterState { x1: 0.0, s1: 3.0, x2: 2.0, s2: 10.0 };
    assert!(integrate(no_x1, [0.4, 0.3, 0.5, 0.6], 10.0).iter().all(|x| x[0] == 0.0));
    let no_x2 = DigesterState { x1: 1.0, s1: 3.0, x2: 0.0, s2: 10.0 };
    assert!(integrate(no_x2, [0.4, 0.3, 0.5, 0.6], 10.0).iter().all(|x| x[2] == 0.0));
}

#[test]
fn open_loop_settles_on_root_found_equilibrium() {
    let p = params();
    let u = [p.control.d_bar; 4];
    let x_star = operating_equilibrium(&u, &p.digester).unwrap().to_array();
    let last = *integrate(p.open_loop.x_0, u, 60.0).last().unwrap();
    let dist: f64 = (0..4).map(|i| (last[i] - x_star[i]).powi(2)).sum::<f64>().sqrt();
    assert!(dist < 1e-5, "{dist}");
}
