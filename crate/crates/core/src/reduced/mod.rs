//! Exact reduction for vertically concentric circles under pure binormal
//! motion with Biot-Savart coupling.
//!
//! Coaxial circles stay circles: only their radii and plane heights move.
//! The interaction integrals reduce to complete elliptic integrals, giving a
//! small ODE system that is used to check the full polygonal solver.

pub mod elliptic;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use elliptic::{elliptic_ke, i_0, i_c, i_s, EllipticPair};

use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorConfig, StepStats};
use crate::vec3::Vec3;

/// `δ = 2 r_i r_j / (r_i² + r_j² + z²)`, and `|r|²` alongside it.
#[inline]
pub fn ring_delta(r_i: f64, r_j: f64, z: f64) -> (f64, f64) {
    let norm2 = r_i * r_i + r_j * r_j + z * z;
    (2.0 * r_i * r_j / norm2, norm2)
}

/// Field induced by circle `j` (radius `r_j`) at the point with angle
/// parameter `u` on circle `i` (radius `r_i`), whose plane lies `z_ij` above
/// that of circle `j`. Both circles are counterclockwise about the z axis.
/// `r_i = 0` gives the field on the axis.
pub fn gamma_closed_form(r_i: f64, r_j: f64, z_ij: f64, u: f64) -> Result<Vec3> {
    if !(r_i >= 0.0 && r_j > 0.0) || !z_ij.is_finite() {
        return Err(Error::Domain(format!(
            "need r_i >= 0, r_j > 0 and a finite gap, got r_i={r_i}, r_j={r_j}, z={z_ij}"
        )));
    }
    let (delta, norm2) = ring_delta(r_i, r_j, z_ij);
    if delta >= 1.0 {
        return Err(Error::Domain(format!(
            "coincident circles (r={r_i}, z={z_ij}) have no finite interaction"
        )));
    }
    let is = i_s(delta)?;
    let i0 = i_0(delta)?;
    let scale = 2.0 * PI * r_j / (norm2 * norm2.sqrt());
    let phi = 2.0 * PI * u;
    Ok(Vec3::new(
        -z_ij * is * phi.cos(),
        -z_ij * is * phi.sin(),
        r_i * is - r_j * i0,
    ) * scale)
}

/// Radii `r_1..r_n` and consecutive gaps `z_{12}, z_{23}, ...`, where
/// `z_{ij}` is the height of circle `i` minus the height of circle `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleSystemState {
    pub radii: Vec<f64>,
    pub gaps: Vec<f64>,
}

impl CircleSystemState {
    pub fn new(radii: Vec<f64>, gaps: Vec<f64>) -> Result<Self> {
        let s = CircleSystemState { radii, gaps };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.radii.len();
        if n == 0 {
            return Err(Error::Domain("at least one circle is required".into()));
        }
        if self.gaps.len() + 1 != n {
            return Err(Error::Domain(format!(
                "{n} circles need {} gaps, got {}",
                n - 1,
                self.gaps.len()
            )));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
            return Err(Error::Domain(format!("radii must be positive and finite, got {r}")));
        }
        if let Some(z) = self.gaps.iter().find(|z| !z.is_finite()) {
            return Err(Error::Domain(format!("gaps must be finite, got {z}")));
        }
        for i in 0..n {
            for j in i + 1..n {
                let (delta, _) = ring_delta(self.radii[i], self.radii[j], self.z(i, j));
                if delta >= 1.0 {
                    return Err(Error::Domain(format!("circles {} and {} coincide", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.radii.len()
    }

    /// Plane heights relative to the first circle.
    pub fn heights(&self) -> Vec<f64> {
        let mut h = Vec::with_capacity(self.n());
        let mut cur = 0.0;
        h.push(cur);
        for g in &self.gaps {
            cur -= g;
            h.push(cur);
        }
        h
    }

    /// `z_ij` for zero-based indices, reconstructed from the gaps.
    pub fn z(&self, i: usize, j: usize) -> f64 {
        let h = self.heights();
        h[i] - h[j]
    }

    pub fn sum_r2(&self) -> f64 {
        self.radii.iter().map(|r| r * r).sum()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.radii.iter().chain(&self.gaps).copied().collect()
    }

    pub fn from_flat(n: usize, y: &[f64]) -> Self {
        CircleSystemState {
            radii: y[..n].to_vec(),
            gaps: y[n..].to_vec(),
        }
    }
}

/// Radial and vertical velocity of each circle, from the interaction alone.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleVelocities {
    pub radial: Vec<f64>,
    pub vertical: Vec<f64>,
}

pub fn circle_velocities(state: &CircleSystemState) -> Result<CircleVelocities> {
    let n = state.n();
    let r = &state.radii;
    let h = state.heights();
    let mut radial = vec![0.0; n];
    let mut vertical = vec![0.0; n];
    for i in 0..n {
        for k in 0..n {
            if k == i {
                continue;
            }
            let z_ik = h[i] - h[k];
            let (delta, norm2) = ring_delta(r[i], r[k], z_ik);
            if !(delta < 1.0) {
                return Err(Error::Domain(format!("circles {} and {} coincide", i + 1, k + 1)));
            }
            let is = i_s(delta)?;
            let i0 = i_0(delta)?;
            let denom = norm2 * norm2.sqrt();
            radial[i] -= 2.0 * PI * r[k] * z_ik * is / denom;
            vertical[i] += 2.0 * PI * (r[k] * r[i] * is - r[k] * r[k] * i0) / denom;
        }
    }
    Ok(CircleVelocities { radial, vertical })
}

/// Time derivative of `(r_1..r_n, z_{12}..z_{n-1,n})`.
pub fn circles_rhs(state: &CircleSystemState) -> Result<CircleSystemState> {
    if let Some(r) = state.radii.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::Domain(format!("radius became non-positive: {r}")));
    }
    let v = circle_velocities(state)?;
    let gaps = v.vertical.windows(2).map(|w| w[0] - w[1]).collect();
    Ok(CircleSystemState {
        radii: v.radial,
        gaps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedRow {
    pub t: f64,
    pub state: CircleSystemState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTrajectory {
    pub rows: Vec<ReducedRow>,
    pub stats: StepStats,
}

impl ReducedTrajectory {
    pub fn radius_series(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.state.radii[i]).collect()
    }

    pub fn gap_series(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.state.gaps[k]).collect()
    }
}

/// Integrates the circle system from `t = 0` to `t_end`.
pub fn run_reduced(
    state0: &CircleSystemState,
    t_end: f64,
    output_times: &[f64],
    config: &IntegratorConfig,
) -> Result<ReducedTrajectory> {
    state0.validate()?;
    let n = state0.n();
    let rhs = |_t: f64, y: &[f64], out: &mut [f64]| -> Result<()> {
        let d = circles_rhs(&CircleSystemState::from_flat(n, y))?;
        out[..n].copy_from_slice(&d.radii);
        out[n..].copy_from_slice(&d.gaps);
        Ok(())
    };
    let traj = integrate(rhs, &state0.to_flat(), (0.0, t_end), output_times, config)?;
    Ok(ReducedTrajectory {
        rows: traj
            .snapshots
            .into_iter()
            .map(|s| ReducedRow {
                t: s.t,
                state: CircleSystemState::from_flat(n, &s.state),
            })
            .collect(),
        stats: traj.stats,
    })
}

/// Number of strict local maxima in a sampled series.
pub fn count_local_maxima(xs: &[f64]) -> usize {
    xs.windows(3).filter(|w| w[1] > w[0] && w[1] >= w[2]).count()
}

/// Number of sign changes in a sampled series, ignoring exact zeros.
pub fn count_sign_changes(xs: &[f64]) -> usize {
    let signs: Vec<bool> = xs.iter().filter(|x| **x != 0.0).map(|x| *x > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}
