//! Discrete differential geometry of closed polygonal curves.
//!
//! Nodes are indexed `0..M` with periodic wraparound. Segment `k` joins node
//! `k - 1` to node `k`, so `d[k] = |x[k] - x[k-1]|` and node `k` is flanked by
//! segments `k` (behind) and `k + 1` (ahead).

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Segments shorter than this are treated as collapsed.
pub const MIN_SEGMENT_LENGTH: f64 = 1e-12;

/// Below this curvature the normal and binormal directions are not materialized.
pub const KAPPA_MIN: f64 = 1e-10;

/// A closed polygonal curve with at least three nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    nodes: Vec<Vec3>,
}

impl DiscreteCurve {
    pub fn new(nodes: Vec<Vec3>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Domain(format!(
                "a closed curve needs at least 3 nodes, got {}",
                nodes.len()
            )));
        }
        if let Some(k) = nodes.iter().position(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("node {k} has a non-finite coordinate")));
        }
        Ok(DiscreteCurve { nodes })
    }

    /// Samples `m` nodes at the uniform parameter values `u = k / m`.
    pub fn sample(m: usize, param: impl Fn(f64) -> Vec3) -> Result<Self> {
        Self::new((0..m).map(|k| param(k as f64 / m as f64)).collect())
    }

    /// Uniformly sampled circle of radius `r` around `center` in the plane
    /// parallel to x-y, counterclockwise when seen from +z.
    pub fn circle(m: usize, center: Vec3, r: f64) -> Result<Self> {
        Self::sample(m, |u| {
            let phi = 2.0 * std::f64::consts::PI * u;
            center + Vec3::new(r * phi.cos(), r * phi.sin(), 0.0)
        })
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn node(&self, k: usize) -> Vec3 {
        self.nodes[k % self.nodes.len()]
    }

    #[inline]
    pub fn prev_index(&self, k: usize) -> usize {
        (k + self.nodes.len() - 1) % self.nodes.len()
    }

    #[inline]
    pub fn next_index(&self, k: usize) -> usize {
        (k + 1) % self.nodes.len()
    }

    pub fn translated(&self, c: Vec3) -> Self {
        DiscreteCurve {
            nodes: self.nodes.iter().map(|&p| p + c).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Vec3) -> Vec3) -> Result<Self> {
        Self::new(self.nodes.iter().map(|&p| f(p)).collect())
    }

    /// Same geometric curve traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        DiscreteCurve {
            nodes: self.nodes.iter().rev().copied().collect(),
        }
    }

    pub fn centroid(&self) -> Vec3 {
        let sum = self.nodes.iter().fold(Vec3::ZERO, |acc, &p| acc + p);
        sum / self.nodes.len() as f64
    }
}

/// Derived per-node quantities of one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryCache {
    /// `d[k] = |x[k] - x[k-1]|`.
    pub d: Vec<f64>,
    /// Total length, summed in ascending index order.
    pub length: f64,
    /// Chord-averaged tangents `(x[k+1] - x[k-1]) / (d[k+1] + d[k])`; not unit length.
    pub tangents: Vec<Vec3>,
    /// Curvature vectors `w[k] ≈ κ N`.
    pub curvature_vectors: Vec<Vec3>,
    /// `κ[k] = |w[k]|`.
    pub curvatures: Vec<f64>,
}

impl GeometryCache {
    pub fn compute(curve: &DiscreteCurve) -> Result<Self> {
        let d = segment_lengths(curve)?;
        Ok(frenet_quantities(curve, d))
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Control-volume length `(d[k] + d[k+1]) / 2` around node `k`.
    #[inline]
    pub fn dual_length(&self, k: usize) -> f64 {
        let m = self.d.len();
        0.5 * (self.d[k] + self.d[(k + 1) % m])
    }

    /// Unit principal normal, only where `κ > KAPPA_MIN`.
    pub fn normal(&self, k: usize) -> Option<Vec3> {
        let kappa = self.curvatures[k];
        (kappa > KAPPA_MIN).then(|| self.curvature_vectors[k] / kappa)
    }

    /// `T × w`, the discrete `κ B`; well defined at zero curvature.
    #[inline]
    pub fn binormal_curvature(&self, k: usize) -> Vec3 {
        self.tangents[k].cross(self.curvature_vectors[k])
    }

    /// Unit binormal from the normalized discrete frame.
    pub fn unit_binormal(&self, k: usize) -> Option<Vec3> {
        if self.curvatures[k] <= KAPPA_MIN {
            return None;
        }
        self.binormal_curvature(k).normalized()
    }

    /// Worst relative deviation of the segment lengths from `L / M`.
    pub fn mesh_nonuniformity(&self) -> f64 {
        let m = self.d.len() as f64;
        self.d
            .iter()
            .map(|&dk| (dk * m / self.length - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn segment_lengths(curve: &DiscreteCurve) -> Result<Vec<f64>> {
    let nodes = curve.nodes();
    let m = nodes.len();
    (0..m)
        .map(|k| {
            let length = (nodes[k] - nodes[(k + m - 1) % m]).norm();
            if length < MIN_SEGMENT_LENGTH || !length.is_finite() {
                Err(Error::DegenerateSegment { index: k, length })
            } else {
                Ok(length)
            }
        })
        .collect()
}

pub fn total_length(d: &[f64]) -> f64 {
    d.iter().sum()
}

/// Tangents, curvature vectors and curvatures from the finite-volume formulas.
///
/// `d` must come from [`segment_lengths`] of the same curve.
pub fn frenet_quantities(curve: &DiscreteCurve, d: Vec<f64>) -> GeometryCache {
    let x = curve.nodes();
    let m = x.len();
    debug_assert_eq!(d.len(), m);

    let mut tangents = Vec::with_capacity(m);
    let mut curvature_vectors = Vec::with_capacity(m);
    let mut curvatures = Vec::with_capacity(m);
    for k in 0..m {
        let prev = x[(k + m - 1) % m];
        let next = x[(k + 1) % m];
        let (d_back, d_ahead) = (d[k], d[(k + 1) % m]);
        let sum = d_back + d_ahead;

        tangents.push((next - prev) / sum);
        let w = ((next - x[k]) / d_ahead - (x[k] - prev) / d_back) * (2.0 / sum);
        curvatures.push(w.norm());
        curvature_vectors.push(w);
    }

    let length = total_length(&d);
    GeometryCache {
        d,
        length,
        tangents,
        curvature_vectors,
        curvatures,
    }
}

/// Discrete generalized area `½ Σ (x × T)·B d`, using the unit discrete
/// frame. Diagnostic only; signed by orientation.
pub fn generalized_area(curve: &DiscreteCurve, cache: &GeometryCache) -> Result<f64> {
    let mut area = 0.0;
    for (k, &xk) in curve.nodes().iter().enumerate() {
        let kappa = cache.curvatures[k];
        let b = cache
            .unit_binormal(k)
            .ok_or(Error::UndefinedFrame { index: k, kappa })?;
        let t = cache.tangents[k]
            .normalized()
            .ok_or(Error::UndefinedFrame { index: k, kappa })?;
        area += 0.5 * xk.cross(t).dot(b) * cache.d[k];
    }
    Ok(area)
}
