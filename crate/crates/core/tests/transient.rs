use std::f64::consts::PI;

use mgrestore::transient::*;
use proptest::prelude::*;

fn step(p_l: f64, p: &InverterParams, opts: &SimOptions) -> FrequencyTrace {
    let s0 = equilibrium_state(p, 0.0, 0.0).unwrap();
    simulate_load_step(&s0, p, p_l, 0.0, opts).unwrap()
}

/// Second-order Heun integration of the droop model written out by hand,
/// used as an oracle for the nadir of the production integrator.
fn heun_nadir(p_l: f64, d_p_pu: f64, dt: f64, duration: f64) -> f64 {
    let w0 = 2.0 * PI * 60.0;
    let (wc, r, l, dq) = (2.0 * PI * 10.0, 0.1, 0.005, 1e-5);
    let rhs = |x: &[f64; 7]| -> [f64; 7] {
        let [pp, qq, th, w, v, id, iq] = *x;
        [
            wc * (v * th.cos() * id + v * th.sin() * iq - pp),
            wc * (v * th.sin() * id - v * th.cos() * iq - qq),
            w0 - w,
            wc * (w0 - w + d_p_pu * (pp - p_l)),
            wc * (1.0 - v + dq * qq),
            (v * th.cos() - 1.0 - r * id) / l + w0 * iq,
            (v * th.sin() - r * iq) / l - w0 * id,
        ]
    };
    let mut x = [0.0, 0.0, 0.0, w0, 1.0, 0.0, 0.0];
    let mut lowest = w0;
    for _ in 0..(duration / dt).round() as usize {
        let k1 = rhs(&x);
        let mut y = x;
        for i in 0..7 {
            y[i] += dt * k1[i];
        }
        let k2 = rhs(&y);
        for i in 0..7 {
            x[i] += 0.5 * dt * (k1[i] + k2[i]);
        }
        lowest = lowest.min(x[3]);
    }
    lowest / (2.0 * PI)
}

#[test]
fn nadir_matches_independent_integrator() {
    let opts = SimOptions { dt: 1e-4, duration: 1.0 };
    let p = InverterParams::default();
    let ours = step(0.3, &p, &opts).f_nadir;
    let oracle = heun_nadir(0.3, 10.0, 2e-6, 1.0);
    assert!((ours - oracle).abs() < 1e-5, "{ours} vs {oracle}");
    // Frozen after agreement with the oracle above.
    assert!((ours - 59.5725).abs() < 1e-4, "{ours}");
}

#[test]
fn step_refinement_changes_nadir_negligibly() {
    let p = InverterParams::default();
    let a = step(0.3, &p, &SimOptions { dt: 1e-4, duration: 1.0 }).f_nadir;
    let b = step(0.3, &p, &SimOptions { dt: 5e-5, duration: 1.0 }).f_nadir;
    assert!((a - b).abs() < 1e-4);
}

#[test]
fn frequency_returns_to_nominal() {
    let p = InverterParams::default();
    for p_l in [0.1, 0.3, 0.5] {
        let tr = step(p_l, &p, &SimOptions::default());
        assert!(tr.stable);
        let last = *tr.f.last().unwrap();
        assert!((last - 60.0).abs() < 1e-3, "{p_l}: {last}");
    }
}

#[test]
fn nadir_non_increasing_in_step_size() {
    let p = InverterParams::default();
    let opts = SimOptions { dt: 1e-4, duration: 1.0 };
    let nadirs: Vec<f64> = (1..=6).map(|k| step(0.1 * k as f64, &p, &opts).f_nadir).collect();
    for w in nadirs.windows(2) {
        assert!(w[1] <= w[0], "{nadirs:?}");
    }
}

#[test]
fn stronger_droop_deepens_nadir() {
    let opts = SimOptions { dt: 1e-4, duration: 1.0 };
    let nadir = |d_p: f64| {
        let p = InverterParams { d_p, ..Default::default() };
        step(0.3, &p, &opts).f_nadir
    };
    let (n1, n2, n3) = (nadir(1e-5), nadir(2e-5), nadir(3e-5));
    assert!(n3 < n2 && n2 < n1, "{n1} {n2} {n3}");
    assert!((n1 - 59.5725).abs() < 1e-4);
    assert!((n2 - 59.1869).abs() < 1e-4);
    assert!((n3 - 58.8235).abs() < 1e-4);
}

#[test]
fn grid_is_uniform_and_nadir_is_sample_minimum() {
    let tr = step(0.2, &InverterParams::default(), &SimOptions::default());
    for (k, w) in tr.t.windows(2).enumerate() {
        assert!(w[1] > w[0], "sample {k}");
    }
    let min = tr.f.iter().cloned().fold(f64::INFINITY, f64::min);
    assert_eq!(tr.f_nadir, min);
    assert_eq!(tr.delta_f_meas, delta_f_meas(tr.f_nadir, InverterParams::default().f0()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn equilibrium_residual_small(p_l in 0.0f64..0.45, q_l in -0.2f64..0.2) {
        let p = InverterParams::default();
        let s = equilibrium_state(&p, p_l, q_l).unwrap();
        let d = state_derivative(&s, &p, p_l, q_l);
        prop_assert!(d.to_array().iter().all(|v| v.abs() <= EQUILIBRIUM_TOL));
        prop_assert!((s.omega - p.omega_0).abs() < 1e-9);
    }

    #[test]
    fn unchanged_load_is_a_fixed_point(p_l in 0.0f64..0.5) {
        let p = InverterParams::default();
        let s0 = equilibrium_state(&p, p_l, 0.0).unwrap();
        let tr = simulate_load_step(&s0, &p, p_l, 0.0, &SimOptions { dt: 1e-4, duration: 1.0 }).unwrap();
        prop_assert!(tr.final_state.max_abs_diff(&s0) < 1e-9);
    }
}
