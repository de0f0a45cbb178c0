//! Semi-discrete flowing finite-volume scheme for the interacting family.
//!
//! For node `k` of curve `i`, with control-volume length `h = (d[k] + d[k+1]) / 2`:
//!
//! ```text
//! dx/dt · h = a (e[k+1] - e[k]) + b h (T × w) + F h + α (x[k+1] - x[k-1]) / 2
//! ```
//!
//! where `e[k]` is the unit direction of segment `k`. The binormal term uses
//! `T × w` instead of `κ (T × N)` so that straight stretches are harmless.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forces::{total_forces, BiotSavartSpec, ForceField};
use crate::geometry::{DiscreteCurve, GeometryCache};
use crate::redistribution::{normal_velocities, tangential_velocities, RedistParams};
use crate::vec3::Vec3;

/// Per-curve coefficients of the normal (`a`) and binormal (`b`) velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveParams {
    pub a: f64,
    pub b: f64,
}

impl CurveParams {
    pub fn new(a: f64, b: f64) -> Self {
        CurveParams { a, b }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub curves: Vec<DiscreteCurve>,
    pub params: Vec<CurveParams>,
    pub spec: BiotSavartSpec,
    pub redist: RedistParams,
}

impl SystemState {
    pub fn new(
        curves: Vec<DiscreteCurve>,
        params: Vec<CurveParams>,
        spec: BiotSavartSpec,
        redist: RedistParams,
    ) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::Domain("at least one curve is required".into()));
        }
        if curves.len() != params.len() {
            return Err(Error::Domain(format!(
                "{} curves but {} parameter sets",
                curves.len(),
                params.len()
            )));
        }
        for (i, p) in params.iter().enumerate() {
            if !(p.a >= 0.0) || !p.a.is_finite() || !p.b.is_finite() {
                return Err(Error::Domain(format!(
                    "curve {i}: need finite a >= 0 and finite b, got a={}, b={}",
                    p.a, p.b
                )));
            }
            if p.a == 0.0 {
                log::warn!(
                    "curve {i} has a = 0: the scheme has no parabolic smoothing and is only \
                     meant for short validation runs"
                );
            }
        }
        if !(redist.omega >= 0.0) {
            return Err(Error::Domain(format!("omega must be >= 0, got {}", redist.omega)));
        }
        if !(spec.delta >= 0.0) {
            return Err(Error::Domain(format!("delta must be >= 0, got {}", spec.delta)));
        }
        Ok(SystemState {
            curves,
            params,
            spec,
            redist,
        })
    }

    pub fn layout(&self) -> StateLayout {
        StateLayout::new(self.curves.iter().map(DiscreteCurve::len))
    }

    pub fn model(&self) -> SystemModel {
        SystemModel {
            layout: self.layout(),
            params: self.params.clone(),
            spec: self.spec,
            redist: self.redist,
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.layout().pack(&self.curves)
    }

    pub fn translated(&self, c: Vec3) -> Self {
        SystemState {
            curves: self.curves.iter().map(|cv| cv.translated(c)).collect(),
            ..self.clone()
        }
    }
}

/// How curves are laid out in a flat `[x0 y0 z0 x1 y1 z1 ...]` state vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateLayout {
    sizes: Vec<usize>,
}

impl StateLayout {
    pub fn new(sizes: impl IntoIterator<Item = usize>) -> Self {
        StateLayout {
            sizes: sizes.into_iter().collect(),
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn dim(&self) -> usize {
        3 * self.sizes.iter().sum::<usize>()
    }

    pub fn pack(&self, curves: &[DiscreteCurve]) -> Vec<f64> {
        curves
            .iter()
            .flat_map(|c| c.nodes().iter().flat_map(|p| p.to_array()))
            .collect()
    }

    pub fn unpack(&self, y: &[f64]) -> Result<Vec<DiscreteCurve>> {
        assert_eq!(y.len(), self.dim(), "state vector does not match layout");
        let mut offset = 0;
        self.sizes
            .iter()
            .map(|&m| {
                let nodes = y[offset..offset + 3 * m]
                    .chunks_exact(3)
                    .map(|c| Vec3::new(c[0], c[1], c[2]))
                    .collect();
                offset += 3 * m;
                DiscreteCurve::new(nodes)
            })
            .collect()
    }
}

/// Everything needed to evaluate the right-hand side for a flat state.
#[derive(Debug, Clone)]
pub struct SystemModel {
    pub layout: StateLayout,
    pub params: Vec<CurveParams>,
    pub spec: BiotSavartSpec,
    pub redist: RedistParams,
}

impl SystemModel {
    pub fn rhs(&self, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteRhs);
        }
        let curves = self.layout.unpack(y)?;
        let velocities = rhs_for_curves(&curves, &self.params, &self.spec, &self.redist)?;
        for (slot, v) in dydt.chunks_exact_mut(3).zip(velocities.iter().flatten()) {
            slot.copy_from_slice(&v.to_array());
        }
        Ok(())
    }
}

/// Time derivative of every node of every curve.
pub fn assemble_rhs(state: &SystemState) -> Result<Vec<Vec<Vec3>>> {
    rhs_for_curves(&state.curves, &state.params, &state.spec, &state.redist)
}

fn rhs_for_curves(
    curves: &[DiscreteCurve],
    params: &[CurveParams],
    spec: &BiotSavartSpec,
    redist: &RedistParams,
) -> Result<Vec<Vec<Vec3>>> {
    let caches = curves
        .iter()
        .map(GeometryCache::compute)
        .collect::<Result<Vec<_>>>()?;
    let forces = total_forces(curves, spec)?;
    let out: Vec<Vec<Vec3>> = curves
        .iter()
        .zip(&caches)
        .zip(params)
        .enumerate()
        .map(|(i, ((c, g), p))| curve_velocity(c, g, *p, forces.curve(i), redist))
        .collect();
    if out.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteRhs);
    }
    Ok(out)
}

/// Velocity of one curve given its geometry and the external force.
pub fn curve_velocity(
    curve: &DiscreteCurve,
    cache: &GeometryCache,
    params: CurveParams,
    forces: &[Vec3],
    redist: &RedistParams,
) -> Vec<Vec3> {
    let x = curve.nodes();
    let m = x.len();
    let v_n = normal_velocities(cache, params.a, forces);
    let alpha = tangential_velocities(cache, &v_n, forces, redist);

    (0..m)
        .map(|k| {
            let (prev, next) = (x[(k + m - 1) % m], x[(k + 1) % m]);
            let (d_back, d_ahead) = (cache.d[k], cache.d[(k + 1) % m]);
            let h = 0.5 * (d_back + d_ahead);
            let diffusion = ((next - x[k]) / d_ahead - (x[k] - prev) / d_back) * params.a;
            let binormal = cache.binormal_curvature(k) * (params.b * h);
            let tangential = (next - prev) * (0.5 * alpha[k]);
            (diffusion + binormal + forces[k] * h + tangential) / h
        })
        .collect()
}

/// Convenience for diagnostics: the force field of a state.
pub fn forces_of(state: &SystemState) -> Result<ForceField> {
    total_forces(&state.curves, &state.spec)
}
