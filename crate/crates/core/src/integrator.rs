//! Adaptive Runge-Kutta-Merson integration of `y' = f(t, y)`.
//!
//! Five stages give a fourth-order solution plus Merson's embedded error
//! estimate. The estimate is measured in the max norm and compared with an
//! absolute tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Absolute max-norm tolerance on the local error estimate.
    pub tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub safety: f64,
    /// Smallest and largest factor by which one step may change `h`.
    pub min_factor: f64,
    pub max_factor: f64,
    /// Attempted steps (accepted plus rejected) before giving up.
    pub max_steps: usize,
}

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self::for_mesh(100)
    }
}

impl IntegratorConfig {
    /// Defaults for a spatial mesh of `m` segments: tolerance `1e-3` and
    /// initial step `4 h²` with `h = 1 / m`.
    pub fn for_mesh(m: usize) -> Self {
        let h = 1.0 / m as f64;
        IntegratorConfig {
            tol: 1e-3,
            h_init: 4.0 * h * h,
            h_min: 1e-12,
            safety: 0.8,
            min_factor: 0.1,
            max_factor: 5.0,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_h_init(mut self, h_init: f64) -> Self {
        self.h_init = h_init;
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.tol > 0.0) {
            problems.push(format!("tol must be > 0, got {}", self.tol));
        }
        if !(self.h_min > 0.0 && self.h_min < self.h_init) || !self.h_init.is_finite() {
            problems.push(format!(
                "need 0 < h_min < h_init, got h_min={}, h_init={}",
                self.h_min, self.h_init
            ));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            problems.push(format!("safety must be in (0, 1], got {}", self.safety));
        }
        if !(self.min_factor > 0.0 && self.min_factor < 1.0 && self.max_factor > 1.0) {
            problems.push("step factor clamp must satisfy 0 < min < 1 < max".into());
        }
        if self.max_steps == 0 {
            problems.push("max_steps must be >= 1".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    fn next_step(&self, h: f64, error: f64) -> f64 {
        let factor = if error > 0.0 {
            self.safety * (self.tol / error).powf(0.2)
        } else {
            self.max_factor
        };
        h * factor.clamp(self.min_factor, self.max_factor)
    }
}

#[derive(Debug)]
pub struct StepOutcome {
    pub y_next: Vec<f64>,
    pub error: f64,
    pub accepted: bool,
    pub h_next: f64,
    /// Why a stage evaluation failed, when it did.
    pub failure: Option<Error>,
}

/// One Merson step from `(t, y)` with step `h`.
///
/// Errors only if `f(t, y)` itself fails; failures at later stage points
/// reject the step and halve `h`.
pub fn merson_step<F>(f: &mut F, t: f64, y: &[f64], h: f64, config: &IntegratorConfig) -> Result<StepOutcome>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let mut k1 = vec![0.0; y.len()];
    eval(f, t, y, &mut k1)?;
    Ok(step_from_k1(f, t, y, &k1, h, config))
}

fn eval<F>(f: &mut F, t: f64, y: &[f64], out: &mut [f64]) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    f(t, y, out)?;
    if out.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteRhs)
    }
}

fn step_from_k1<F>(f: &mut F, t: f64, y: &[f64], k1: &[f64], h: f64, config: &IntegratorConfig) -> StepOutcome
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y.len();
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut stage = vec![0.0; n];

    let stages = (|| -> Result<()> {
        for i in 0..n {
            stage[i] = y[i] + h * k1[i] / 3.0;
        }
        eval(f, t + h / 3.0, &stage, &mut k2)?;
        for i in 0..n {
            stage[i] = y[i] + h * (k1[i] + k2[i]) / 6.0;
        }
        eval(f, t + h / 3.0, &stage, &mut k3)?;
        for i in 0..n {
            stage[i] = y[i] + h * (k1[i] + 3.0 * k3[i]) / 8.0;
        }
        eval(f, t + h / 2.0, &stage, &mut k4)?;
        for i in 0..n {
            stage[i] = y[i] + h * (k1[i] - 3.0 * k3[i] + 4.0 * k4[i]) / 2.0;
        }
        eval(f, t + h, &stage, &mut k5)
    })();

    if let Err(e) = stages {
        return StepOutcome {
            y_next: y.to_vec(),
            error: f64::INFINITY,
            accepted: false,
            h_next: 0.5 * h,
            failure: Some(e),
        };
    }

    let mut error = 0.0f64;
    let mut y_next = Vec::with_capacity(n);
    for i in 0..n {
        y_next.push(y[i] + h * (k1[i] + 4.0 * k4[i] + k5[i]) / 6.0);
        let e = (h * (2.0 * k1[i] - 9.0 * k3[i] + 8.0 * k4[i] - k5[i]) / 30.0).abs();
        error = error.max(e);
    }
    if !error.is_finite() || y_next.iter().any(|v| !v.is_finite()) {
        return StepOutcome {
            y_next: y.to_vec(),
            error: f64::INFINITY,
            accepted: false,
            h_next: 0.5 * h,
            failure: Some(Error::NonFiniteRhs),
        };
    }
    let accepted = error <= config.tol;
    StepOutcome {
        y_next,
        error,
        accepted,
        h_next: config.next_step(h, error),
        failure: None,
    }
}

/// Fixed-step integration without error control; used for convergence studies.
pub fn integrate_fixed<F>(mut f: F, y0: &[f64], t0: f64, t_end: f64, steps: usize) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let config = IntegratorConfig {
        tol: f64::INFINITY,
        ..IntegratorConfig::default()
    };
    let h = (t_end - t0) / steps as f64;
    let mut y = y0.to_vec();
    for s in 0..steps {
        let t = t0 + s as f64 * h;
        let out = merson_step(&mut f, t, &y, h, &config)?;
        if let Some(e) = out.failure {
            return Err(e);
        }
        y = out.y_next;
    }
    Ok(y)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// Most recent step size proposed by the controller.
    pub h: f64,
    /// Largest error estimate among accepted steps.
    pub max_accepted_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub state: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("trajectory is never empty")
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}

/// Output times `t0 + dt, t0 + 2 dt, ...` up to and including `t_end`.
pub fn output_grid(t0: f64, t_end: f64, dt: f64) -> Vec<f64> {
    let n = ((t_end - t0) / dt + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (1..=n).map(|i| t0 + i as f64 * dt).collect();
    if grid.last().is_none_or(|&t| t_end - t > 1e-9 * dt) {
        grid.push(t_end);
    } else if let Some(last) = grid.last_mut() {
        *last = t_end;
    }
    grid
}

/// Integrates from `t0` to `t_end`, recording the initial state, each output
/// time, and the final state.
pub fn integrate<F>(
    f: F,
    y0: &[f64],
    t_span: (f64, f64),
    output_times: &[f64],
    config: &IntegratorConfig,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let mut snapshots = Vec::new();
    let stats = integrate_with(f, y0, t_span, output_times, config, |snap, _| {
        snapshots.push(snap.clone());
        Ok(())
    })?;
    Ok(Trajectory { snapshots, stats })
}

/// Like [`integrate`], but hands each recorded snapshot to `observer`
/// instead of storing it.
pub fn integrate_with<F, O>(
    mut f: F,
    y0: &[f64],
    (t0, t_end): (f64, f64),
    output_times: &[f64],
    config: &IntegratorConfig,
    mut observer: O,
) -> Result<StepStats>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    O: FnMut(&Snapshot, &StepStats) -> Result<()>,
{
    config.validate()?;
    if !(t_end > t0) {
        return Err(Error::Domain(format!("need t_end > t0, got [{t0}, {t_end}]")));
    }
    let mut stops: Vec<f64> = Vec::with_capacity(output_times.len() + 1);
    for &t in output_times {
        if !(t > t0 && t <= t_end) {
            return Err(Error::Domain(format!("output time {t} outside ({t0}, {t_end}]")));
        }
        if let Some(&prev) = stops.last() {
            if t <= prev {
                return Err(Error::Domain("output times must be strictly increasing".into()));
            }
        }
        stops.push(t);
    }
    if stops.last() != Some(&t_end) {
        stops.push(t_end);
    }

    let mut stats = StepStats {
        h: config.h_init,
        ..Default::default()
    };
    let mut t = t0;
    let mut y = y0.to_vec();
    observer(&Snapshot { t, state: y.clone() }, &stats)?;

    let fail = |t: f64, y: &[f64], cause: Error| Error::Integration {
        t,
        state: y.to_vec(),
        cause: Box::new(cause),
    };

    let mut k1 = vec![0.0; y.len()];
    let mut h = config.h_init;
    for &stop in &stops {
        while t < stop {
            if let Err(e) = eval(&mut f, t, &y, &mut k1) {
                return Err(fail(t, &y, e));
            }
            stats.rhs_evals += 1;
            loop {
                if stats.accepted + stats.rejected >= config.max_steps {
                    let cause = Error::StepLimit {
                        t,
                        steps: config.max_steps,
                    };
                    return Err(fail(t, &y, cause));
                }
                let remaining = stop - t;
                let truncated = h >= remaining || remaining - h <= 1e-12 * stop.abs().max(1.0);
                let h_try = if truncated { remaining } else { h };

                let out = step_from_k1(&mut f, t, &y, &k1, h_try, config);
                stats.rhs_evals += 4;
                if out.accepted {
                    debug_assert!(out.error <= config.tol);
                    stats.accepted += 1;
                    stats.max_accepted_error = stats.max_accepted_error.max(out.error);
                    t = if truncated { stop } else { t + h_try };
                    y = out.y_next;
                    h = if truncated && out.h_next >= h_try {
                        out.h_next.max(h)
                    } else {
                        out.h_next
                    };
                    stats.h = h;
                    break;
                }
                stats.rejected += 1;
                h = out.h_next;
                stats.h = h;
                if h < config.h_min {
                    let cause = out.failure.unwrap_or(Error::StepUnderflow { t, h });
                    return Err(fail(t, &y, cause));
                }
            }
        }
        observer(&Snapshot { t, state: y.clone() }, &stats)?;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_t: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
        out[0] = -y[0];
        Ok(())
    }

    #[test]
    fn constant_state_is_exact() {
        let mut zero = |_t: f64, _y: &[f64], out: &mut [f64]| -> Result<()> {
            out.fill(0.0);
            Ok(())
        };
        let out = merson_step(&mut zero, 0.0, &[1.5, -2.0], 0.3, &IntegratorConfig::default()).unwrap();
        assert_eq!(out.y_next, vec![1.5, -2.0]);
        assert_eq!(out.error, 0.0);
        assert!(out.accepted);
        assert_eq!(out.h_next, 0.3 * 5.0);
    }

    #[test]
    fn output_grid_ends_on_t_end() {
        let g = output_grid(0.0, 1.0, 0.2);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        let g = output_grid(0.0, 31.6, 0.2);
        assert_eq!(g.len(), 158);
        assert_eq!(*g.last().unwrap(), 31.6);
        let g = output_grid(0.0, 1.05, 0.2);
        assert_eq!(g.len(), 6);
        assert_eq!(*g.last().unwrap(), 1.05);
    }

    #[test]
    fn empty_outputs_give_initial_and_final() {
        let cfg = IntegratorConfig::default().with_tol(1e-8).with_h_init(1e-3);
        let tr = integrate(decay, &[1.0], (0.0, 2.0), &[], &cfg).unwrap();
        assert_eq!(tr.times(), vec![0.0, 2.0]);
    }

    #[test]
    fn outputs_are_hit_exactly() {
        let cfg = IntegratorConfig::default().with_tol(1e-8).with_h_init(1e-3);
        let outs = [0.1, 0.35, 1.0];
        let tr = integrate(decay, &[1.0], (0.0, 1.0), &outs, &cfg).unwrap();
        assert_eq!(tr.times(), vec![0.0, 0.1, 0.35, 1.0]);
        for s in &tr.snapshots {
            assert!((s.state[0] - (-s.t).exp()).abs() < 1e-7);
        }
    }

    #[test]
    fn unsorted_outputs_rejected() {
        let cfg = IntegratorConfig::default();
        assert!(integrate(decay, &[1.0], (0.0, 1.0), &[0.5, 0.2], &cfg).is_err());
        assert!(integrate(decay, &[1.0], (0.0, 1.0), &[1.5], &cfg).is_err());
    }

    #[test]
    fn nan_after_midpoint_reports_last_good_time() {
        let f = |t: f64, y: &[f64], out: &mut [f64]| -> Result<()> {
            out[0] = if t > 0.5 { f64::NAN } else { -y[0] };
            Ok(())
        };
        let cfg = IntegratorConfig::default().with_tol(1e-6).with_h_init(1e-2);
        match integrate(f, &[1.0], (0.0, 1.0), &[], &cfg) {
            Err(Error::Integration { t, state, cause }) => {
                assert!(t <= 0.5, "t = {t}");
                assert!(t > 0.4);
                assert!(matches!(*cause, Error::NonFiniteRhs));
                assert!((state[0] - (-t).exp()).abs() < 1e-5);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn rhs_error_at_start_propagates() {
        let f = |_t: f64, _y: &[f64], _out: &mut [f64]| -> Result<()> { Err(Error::Domain("boom".into())) };
        let err = integrate(f, &[1.0], (0.0, 1.0), &[], &IntegratorConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Integration { t, .. } if t == 0.0));
        assert!(matches!(err.root(), Error::Domain(_)));
    }

    #[test]
    fn stiff_problem_underflows_with_tiny_h_min() {
        // y' = -1e16 y is stable only for h ~ 1e-16, far below h_min
        let f = |_t: f64, y: &[f64], out: &mut [f64]| -> Result<()> {
            out[0] = -1e16 * y[0];
            Ok(())
        };
        let cfg = IntegratorConfig {
            tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-9,
            ..Default::default()
        };
        let err = integrate(f, &[1.0], (0.0, 1.0), &[], &cfg).unwrap_err();
        assert!(matches!(err.root(), Error::StepUnderflow { .. }));
    }

    #[test]
    fn step_budget_is_enforced() {
        let cfg = IntegratorConfig::default().with_tol(1e-10).with_h_init(1e-4).with_max_steps(7);
        let err = integrate(decay, &[1.0], (0.0, 1.0), &[], &cfg).unwrap_err();
        match err {
            Error::Integration { t, cause, .. } => {
                assert!(t > 0.0 && t < 1.0);
                assert!(matches!(*cause, Error::StepLimit { steps: 7, .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = IntegratorConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Validation(_))));
    }
}
