//! The Merson integrator on problems with known solutions.

mod common;

use common::fitted_order;
use curveflow::integrator::{integrate, integrate_fixed, merson_step, output_grid};
use curveflow::{IntegratorConfig, Result};
use proptest::prelude::*;

fn decay(_t: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
    out[0] = -y[0];
    Ok(())
}

fn oscillator(_t: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
    out[0] = y[1];
    out[1] = -y[0];
    Ok(())
}

/// e^{-1} by its alternating series, summed until the terms underflow.
fn inverse_e_series() -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..40 {
        sum += term;
        term *= -1.0 / k as f64;
    }
    sum
}

#[test]
fn exponential_decay_reaches_inverse_e() {
    let config = IntegratorConfig::default().with_tol(1e-6).with_h_init(1e-3);
    let traj = integrate(decay, &[1.0], (0.0, 1.0), &[], &config).unwrap();
    assert_eq!(traj.snapshots.len(), 2);
    let y = traj.last().state[0];
    assert!((y - inverse_e_series()).abs() < 1e-6, "{y}");
}

#[test]
fn oscillator_returns_after_one_period() {
    let config = IntegratorConfig::default().with_tol(1e-6).with_h_init(1e-3);
    let period = 2.0 * std::f64::consts::PI;
    let traj = integrate(oscillator, &[1.0, 0.0], (0.0, period), &output_grid(0.0, period, 0.5), &config).unwrap();
    let end = &traj.last().state;
    assert!((end[0] - 1.0).abs() < 1e-4 && end[1].abs() < 1e-4, "{end:?}");
    for s in &traj.snapshots {
        let exact = [s.t.cos(), -s.t.sin()];
        assert!((s.state[0] - exact[0]).abs() < 1e-4 && (s.state[1] - exact[1]).abs() < 1e-4);
    }
}

#[test]
fn global_error_is_fourth_order() {
    let exact = inverse_e_series();
    let errs: Vec<(f64, f64)> = [4, 8, 16, 32]
        .iter()
        .map(|&n| {
            let y = integrate_fixed(decay, &[1.0], 0.0, 1.0, n).unwrap();
            (n as f64, (y[0] - exact).abs())
        })
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0].1 / w[1].1;
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio} in {errs:?}");
    }
    assert!((fitted_order(&errs) - 4.0).abs() < 0.3);
}

#[test]
fn integration_is_deterministic() {
    let config = IntegratorConfig::default().with_tol(1e-7).with_h_init(1e-2);
    let run = || integrate(oscillator, &[0.3, -1.1], (0.0, 7.0), &output_grid(0.0, 7.0, 0.25), &config).unwrap();
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_control_stays_in_bounds(
        y0 in prop::array::uniform2(-3.0..3.0f64),
        tol in 1e-9..1e-2f64,
        h0 in 1e-4..1.0f64,
    ) {
        let config = IntegratorConfig::default().with_tol(tol).with_h_init(h0);
        let (mut t, mut y, mut h) = (0.0, y0.to_vec(), h0);
        let mut f = oscillator;
        for _ in 0..200 {
            let out = merson_step(&mut f, t, &y, h, &config).unwrap();
            prop_assert!(out.h_next <= 5.0 * h * (1.0 + 1e-12));
            prop_assert!(out.h_next >= 0.1 * h * (1.0 - 1e-12));
            if out.accepted {
                prop_assert!(out.error <= tol);
                t += h;
                y = out.y_next;
            }
            h = out.h_next.max(config.h_min);
        }
    }
}
