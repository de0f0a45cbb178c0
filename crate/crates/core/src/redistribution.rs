//! Normal velocities and the tangential redistribution velocity.

use serde::{Deserialize, Serialize};

use crate::geometry::{GeometryCache, KAPPA_MIN};
use crate::vec3::Vec3;

/// `omega = 0` preserves the relative local length of every segment;
/// `omega > 0` relaxes the mesh toward equal segment lengths at that rate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RedistParams {
    pub omega: f64,
    pub flux_rule: FluxRule,
}

impl RedistParams {
    pub fn with_omega(omega: f64) -> Self {
        RedistParams {
            omega,
            ..Default::default()
        }
    }
}

/// How `κ v_N` at the nodes is integrated over segment `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxRule {
    /// `κ[k] v_N[k] d[k]`, the value at the segment's end node.
    #[default]
    Node,
    /// `(κ v_N)[k-1] + (κ v_N)[k]` averaged, times `d[k]`. Matches the
    /// stretching of each segment by normal motion to one order higher.
    Trapezoid,
}

/// `v_N[k] = a κ[k] + F[k]·N[k]`, with the force term dropped where the
/// normal is undefined.
pub fn normal_velocities(cache: &GeometryCache, a: f64, forces: &[Vec3]) -> Vec<f64> {
    assert_eq!(cache.len(), forces.len(), "forces must align with nodes");
    cache
        .curvatures
        .iter()
        .zip(forces)
        .enumerate()
        .map(|(k, (&kappa, &f))| {
            let fn_ = if kappa > KAPPA_MIN {
                f.dot(cache.curvature_vectors[k]) / kappa
            } else {
                0.0
            };
            a * kappa + fn_
        })
        .collect()
}

/// Contribution of each segment to `∫ κ v_N ds`.
pub fn segment_fluxes(cache: &GeometryCache, v_n: &[f64], rule: FluxRule) -> Vec<f64> {
    let m = cache.len();
    let psi = |k: usize| cache.curvatures[k] * v_n[k];
    (0..m)
        .map(|k| match rule {
            FluxRule::Node => psi(k) * cache.d[k],
            FluxRule::Trapezoid => 0.5 * (psi((k + m - 1) % m) + psi(k)) * cache.d[k],
        })
        .collect()
}

/// `∫ κ v_N ds`, summed in ascending segment order.
pub fn curvature_flux(cache: &GeometryCache, v_n: &[f64], rule: FluxRule) -> f64 {
    segment_fluxes(cache, v_n, rule).iter().sum()
}

/// Tangential velocity `α` from the discrete prefix-sum formula.
///
/// The free constant is fixed so that `Σ α[k] d[k] = 0`.
pub fn tangential_velocities(
    cache: &GeometryCache,
    v_n: &[f64],
    forces: &[Vec3],
    params: &RedistParams,
) -> Vec<f64> {
    let m = cache.len();
    assert_eq!(v_n.len(), m);
    assert_eq!(forces.len(), m);

    let length = cache.length;
    let target = length / m as f64;
    let seg = segment_fluxes(cache, v_n, params.flux_rule);
    let flux: f64 = seg.iter().sum();
    let ft = |k: usize| forces[k].dot(cache.tangents[k]);
    // the node before node 0 in the cumulative sums is the last node
    let ft_start = ft(m - 1);

    let mut alpha = Vec::with_capacity(m);
    let mut cum_flux = 0.0;
    let mut cum_len = 0.0;
    let mut cum_gap = 0.0;
    for (k, (&d, &s)) in cache.d.iter().zip(&seg).enumerate() {
        cum_flux += s;
        cum_len += d;
        cum_gap += target - d;
        alpha.push(
            -ft(k) + ft_start + cum_flux - cum_len / length * flux + params.omega * cum_gap,
        );
    }

    let weighted: f64 = alpha.iter().zip(&cache.d).map(|(a, d)| a * d).sum();
    let shift = -weighted / length;
    for a in &mut alpha {
        *a += shift;
    }
    alpha
}
