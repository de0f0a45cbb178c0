//! Biot-Savart interaction between polygonal curves.
//!
//! The kernel follows the convention `(p - X) × T / (δ² + |p - X|²)^{3/2}`,
//! integrated over the source curve. This is the opposite sign of the usual
//! magnetostatic field: a counterclockwise unit circle in the x-y plane
//! induces `(0, 0, -2π)` at its center.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DiscreteCurve;
use crate::vec3::Vec3;

/// Minimum distance to a source quadrature point for an unregularized kernel.
pub const MIN_EVALUATION_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiotSavartSpec {
    /// Regularization length; `0` gives the singular kernel.
    pub delta: f64,
    /// Also let each curve act on its own nodes. Off in every model run.
    #[serde(default)]
    pub include_self: bool,
}

impl Default for BiotSavartSpec {
    fn default() -> Self {
        BiotSavartSpec {
            delta: 0.0,
            include_self: false,
        }
    }
}

impl BiotSavartSpec {
    pub fn regularized(delta: f64) -> Self {
        BiotSavartSpec {
            delta,
            ..Default::default()
        }
    }
}

/// Midpoint quadrature data of one source polygon.
#[derive(Debug, Clone)]
pub struct SegmentTable {
    midpoints: Vec<Vec3>,
    /// Unit direction times segment length, i.e. `x[j] - x[j-1]`.
    weighted_directions: Vec<Vec3>,
    /// Squared distance from the midpoint beyond which no point of the
    /// segment lies within the evaluation cutoff.
    reach2: Vec<f64>,
}

impl SegmentTable {
    pub fn new(source: &DiscreteCurve) -> Self {
        let x = source.nodes();
        let m = x.len();
        let mut midpoints = Vec::with_capacity(m);
        let mut weighted_directions = Vec::with_capacity(m);
        for j in 0..m {
            let (a, b) = (x[(j + m - 1) % m], x[j]);
            midpoints.push((a + b) * 0.5);
            weighted_directions.push(b - a);
        }
        let reach2 = weighted_directions
            .iter()
            .map(|t| (0.5 * t.norm() + MIN_EVALUATION_DISTANCE).powi(2))
            .collect();
        SegmentTable {
            midpoints,
            weighted_directions,
            reach2,
        }
    }

    /// Field at `p`, or the offending distance when `p` sits on an
    /// unregularized quadrature point.
    fn field_at(&self, p: Vec3, delta: f64) -> std::result::Result<Vec3, f64> {
        let delta2 = delta * delta;
        let mut acc = Vec3::ZERO;
        for ((&mj, &tj), &reach2) in self.midpoints.iter().zip(&self.weighted_directions).zip(&self.reach2) {
            let r = p - mj;
            let r2 = r.norm_squared();
            if delta == 0.0 {
                // only points within reach of the segment can lie on it
                if r2 <= reach2 {
                    let dist = point_segment_distance(p, mj - tj * 0.5, mj + tj * 0.5);
                    if dist <= MIN_EVALUATION_DISTANCE {
                        return Err(dist);
                    }
                }
            }
            let s = delta2 + r2;
            acc += r.cross(tj) / (s * s.sqrt());
        }
        Ok(acc)
    }
}

/// Biot-Savart field of `source` at `p` by the midpoint rule on each segment.
pub fn biot_savart_at_point(p: Vec3, source: &DiscreteCurve, spec: &BiotSavartSpec) -> Result<Vec3> {
    if !(spec.delta >= 0.0) {
        return Err(Error::Domain(format!("delta must be >= 0, got {}", spec.delta)));
    }
    SegmentTable::new(source)
        .field_at(p, spec.delta)
        .map_err(|distance| Error::SingularEvaluation {
            target: 0,
            node: 0,
            source_curve: 0,
            distance,
        })
}

/// Force on every node of every curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceField {
    pub per_curve: Vec<Vec<Vec3>>,
}

impl ForceField {
    pub fn zeros(sizes: impl IntoIterator<Item = usize>) -> Self {
        ForceField {
            per_curve: sizes.into_iter().map(|m| vec![Vec3::ZERO; m]).collect(),
        }
    }

    pub fn curve(&self, i: usize) -> &[Vec3] {
        &self.per_curve[i]
    }

    pub fn max_norm(&self) -> f64 {
        self.per_curve
            .iter()
            .flatten()
            .map(|f| f.norm())
            .fold(0.0, f64::max)
    }
}

/// `F[i][k] = Σ_{j ≠ i} γ(x[i][k], Γ_j)`.
///
/// Target nodes are processed in parallel; the sum for each node runs over
/// sources and segments in ascending order, so the result does not depend on
/// the thread count.
pub fn total_forces(curves: &[DiscreteCurve], spec: &BiotSavartSpec) -> Result<ForceField> {
    if !(spec.delta >= 0.0) {
        return Err(Error::Domain(format!("delta must be >= 0, got {}", spec.delta)));
    }
    let n = curves.len();
    if n == 1 && !spec.include_self {
        return Ok(ForceField::zeros([curves[0].len()]));
    }
    let tables: Vec<SegmentTable> = curves.iter().map(SegmentTable::new).collect();

    let targets: Vec<(usize, usize)> = curves
        .iter()
        .enumerate()
        .flat_map(|(i, c)| (0..c.len()).map(move |k| (i, k)))
        .collect();

    let flat: Vec<Vec3> = targets
        .par_iter()
        .map(|&(i, k)| {
            let p = curves[i].nodes()[k];
            let mut f = Vec3::ZERO;
            for (j, table) in tables.iter().enumerate() {
                if j == i && !spec.include_self {
                    continue;
                }
                f += table
                    .field_at(p, spec.delta)
                    .map_err(|distance| Error::SingularEvaluation {
                        target: i,
                        node: k,
                        source_curve: j,
                        distance,
                    })?;
            }
            Ok(f)
        })
        .collect::<Result<_>>()?;

    let mut per_curve = Vec::with_capacity(n);
    let mut offset = 0;
    for c in curves {
        per_curve.push(flat[offset..offset + c.len()].to_vec());
        offset += c.len();
    }
    Ok(ForceField { per_curve })
}

/// Smallest distance between a node of one curve and a segment of another.
pub fn min_intercurve_distance(curves: &[DiscreteCurve]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, ci) in curves.iter().enumerate() {
        for (j, cj) in curves.iter().enumerate() {
            if i == j {
                continue;
            }
            let y = cj.nodes();
            let m = y.len();
            for &p in ci.nodes() {
                for s in 0..m {
                    let dist = point_segment_distance(p, y[(s + m - 1) % m], y[s]);
                    best = Some(best.map_or(dist, |b| b.min(dist)));
                }
            }
        }
    }
    best
}

pub fn point_segment_distance(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).norm()
}
